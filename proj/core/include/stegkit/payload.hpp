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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stegkit/image.hpp"
#include "stegkit/rng.hpp"
#include "stegkit/tensor.hpp"

namespace stegkit {

using Bits = std::vector<std::uint8_t>;  // one element per bit, each 0 or 1

enum class PayloadMode { bitstream, image };

/// The secret data: a bit sequence, either raw or the row-major MSB-first
/// serialization of a secret image.
struct BitPayload {
  Bits bits;
  PayloadMode mode = PayloadMode::bitstream;
  std::optional<Image> source_image;  // present iff mode == image
  std::size_t bits_per_pixel = 1;     // target bpp when bound to a carrier

  static BitPayload from_bytes(std::span<const std::uint8_t> bytes);
  static BitPayload from_image(const Image& img);
  static BitPayload random(Rng& rng, std::size_t n_bits);

  /// Packs to bytes, MSB-first; the last byte is zero-padded.
  std::vector<std::uint8_t> to_bytes() const;
};

Bits bytes_to_bits(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits);

/// Every embedder prepends this frame so extractors can recover the exact
/// payload length: a 32-bit big-endian bit count followed by the payload.
inline constexpr std::size_t kFrameHeaderBits = 32;

Bits frame_bits(std::span<const std::uint8_t> payload_bits);

/// Parses the header from a recovered stream and returns the payload bits.
/// Throws MalformedHeader when the declared length cannot fit the capacity.
Bits unframe_bits(std::span<const std::uint8_t> stream,
                  std::size_t capacity_bits);

/// Secret bits arranged as [planes, H, W] for the generator input; bit 0
/// maps to -1 and bit 1 to +1 so zero-mean inputs feed the network.
struct SecretPlane {
  std::size_t planes = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  Bits bits;  // planes*H*W entries, row-major within each plane

  std::size_t capacity() const { return planes * height * width; }

  template <typename T>
  Tensor<T> to_tensor() const {
    Tensor<T> t({planes, height, width});
    auto& d = t.mutable_data();
    for (std::size_t i = 0; i < bits.size(); ++i)
      d[i] = bits[i] ? T(1) : T(-1);
    return t;
  }
};

/// Packs bits row-major, plane-major, zero-padding up to H*W*bpp.
/// Throws CapacityExceeded when the bits do not fit.
SecretPlane bits_to_plane(std::span<const std::uint8_t> bits, std::size_t h,
                          std::size_t w, std::size_t bpp);

/// Exact inverse of bits_to_plane for the first n_bits.
Bits plane_to_bits(const SecretPlane& plane, std::size_t n_bits);

/// Decodes extractor logits with the "bit = 1 iff logit > 0" rule.
template <typename T>
Bits logits_to_bits(const Tensor<T>& logits, std::size_t n_bits) {
  if (n_bits > logits.size())
    throw ShapeError("logits_to_bits: " + std::to_string(n_bits) +
                     " bits requested from " + std::to_string(logits.size()) +
                     " logits");
  Bits out(n_bits);
  const auto& d = logits.data();
  for (std::size_t i = 0; i < n_bits; ++i) out[i] = d[i] > T(0) ? 1 : 0;
  return out;
}

/// Fraction of mismatched positions; sequences must have equal length.
double bit_error_rate(std::span<const std::uint8_t> sent,
                      std::span<const std::uint8_t> received);

}  // namespace stegkit
