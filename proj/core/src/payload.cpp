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

#include "stegkit/payload.hpp"

namespace stegkit {

Bits bytes_to_bits(std::span<const std::uint8_t> bytes) {
  Bits bits;
  bits.reserve(bytes.size() * 8);
  for (auto b : bytes)
    for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
  return bits;
}

std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return bytes;
}

BitPayload BitPayload::from_bytes(std::span<const std::uint8_t> bytes) {
  BitPayload p;
  p.bits = bytes_to_bits(bytes);
  p.mode = PayloadMode::bitstream;
  return p;
}

BitPayload BitPayload::from_image(const Image& img) {
  BitPayload p;
  p.bits = bytes_to_bits(img.pixels);
  p.mode = PayloadMode::image;
  p.source_image = img;
  return p;
}

BitPayload BitPayload::random(Rng& rng, std::size_t n_bits) {
  BitPayload p;
  p.bits.resize(n_bits);
  for (auto& b : p.bits) b = rng.next_bit() ? 1 : 0;
  return p;
}

std::vector<std::uint8_t> BitPayload::to_bytes() const {
  return bits_to_bytes(bits);
}

Bits frame_bits(std::span<const std::uint8_t> payload_bits) {
  const std::uint32_t n = static_cast<std::uint32_t>(payload_bits.size());
  Bits out;
  out.reserve(kFrameHeaderBits + payload_bits.size());
  for (int i = 31; i >= 0; --i) out.push_back((n >> i) & 1);
  out.insert(out.end(), payload_bits.begin(), payload_bits.end());
  return out;
}

Bits unframe_bits(std::span<const std::uint8_t> stream,
                  std::size_t capacity_bits) {
  if (stream.size() < kFrameHeaderBits)
    throw MalformedHeader("recovered stream has only " +
                          std::to_string(stream.size()) +
                          " bits, header needs 32");
  std::uint32_t n = 0;
  for (std::size_t i = 0; i < kFrameHeaderBits; ++i)
    n = (n << 1) | stream[i];
  if (capacity_bits < kFrameHeaderBits ||
      n > capacity_bits - kFrameHeaderBits || kFrameHeaderBits + n > stream.size())
    throw MalformedHeader("header declares " + std::to_string(n) +
                          " payload bits but capacity is " +
                          std::to_string(capacity_bits) + " bits");
  return Bits(stream.begin() + kFrameHeaderBits,
              stream.begin() + kFrameHeaderBits + n);
}

SecretPlane bits_to_plane(std::span<const std::uint8_t> bits, std::size_t h,
                          std::size_t w, std::size_t bpp) {
  const std::size_t capacity = h * w * bpp;
  if (bits.size() > capacity) throw CapacityExceeded(bits.size(), capacity);
  SecretPlane plane;
  plane.planes = bpp;
  plane.height = h;
  plane.width = w;
  plane.bits.assign(capacity, 0);
  std::copy(bits.begin(), bits.end(), plane.bits.begin());
  return plane;
}

Bits plane_to_bits(const SecretPlane& plane, std::size_t n_bits) {
  if (n_bits > plane.bits.size())
    throw ShapeError("plane_to_bits: " + std::to_string(n_bits) +
                     " bits requested from a plane of " +
                     std::to_string(plane.bits.size()));
  return Bits(plane.bits.begin(), plane.bits.begin() + n_bits);
}

double bit_error_rate(std::span<const std::uint8_t> sent,
                      std::span<const std::uint8_t> received) {
  if (sent.size() != received.size())
    throw ShapeError("bit_error_rate: length mismatch " +
                     std::to_string(sent.size()) + " vs " +
                     std::to_string(received.size()));
  if (sent.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.size(); ++i)
    if (sent[i] != received[i]) ++errors;
  return static_cast<double>(errors) / static_cast<double>(sent.size());
}

}  // namespace stegkit
