/*
 * Copyright 2026 The stegkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "stegkit/lsb.hpp"

namespace stegkit {

std::size_t lsb_capacity_bits(const Image& cover, const LsbParams& params) {
  params.validate();
  return cover.pixels.size() * static_cast<std::size_t>(params.k);
}

Image lsb_embed(const Image& cover, std::span<const std::uint8_t> payload_bits,
                const LsbParams& params) {
  const std::size_t capacity = lsb_capacity_bits(cover, params);
  Bits frame = frame_bits(payload_bits);
  if (frame.size() > capacity) throw CapacityExceeded(frame.size(), capacity);

  Image stego = cover;
  const int k = params.k;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < stego.pixels.size() && pos < frame.size(); ++i) {
    std::uint8_t v = stego.pixels[i];
    for (int b = k - 1; b >= 0 && pos < frame.size(); --b) {
      v = static_cast<std::uint8_t>((v & ~(1u << b)) | (frame[pos++] << b));
    }
    stego.pixels[i] = v;
  }
  return stego;
}

Bits lsb_extract(const Image& stego, const LsbParams& params) {
  const std::size_t capacity = lsb_capacity_bits(stego, params);
  if (capacity < kFrameHeaderBits)
    throw MalformedHeader("carrier holds " + std::to_string(capacity) +
                          " bits, header needs 32");
  const int k = params.k;
  auto read_bits = [&](std::size_t count) {
    Bits out;
    out.reserve(count);
    for (std::size_t i = 0; i < stego.pixels.size() && out.size() < count; ++i)
      for (int b = k - 1; b >= 0 && out.size() < count; --b)
        out.push_back((stego.pixels[i] >> b) & 1);
    return out;
  };

  Bits header = read_bits(kFrameHeaderBits);
  std::uint32_t n = 0;
  for (auto b : header) n = (n << 1) | b;
  if (n > capacity - kFrameHeaderBits)
    throw MalformedHeader("header declares " + std::to_string(n) +
                          " payload bits but capacity is " +
                          std::to_string(capacity) + " bits");
  return unframe_bits(read_bits(kFrameHeaderBits + n), capacity);
}

}  // namespace stegkit
