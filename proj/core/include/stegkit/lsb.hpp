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

#include "stegkit/image.hpp"
#include "stegkit/payload.hpp"

namespace stegkit {

/// k-bit LSB substitution. Carrier bytes are visited in buffer order
/// (row-major, R then G then B); within each byte the k low bits take the
/// next payload bits MSB-of-group first.
struct LsbParams {
  int k = 1;  // bits per channel byte, 1..4

  void validate() const {
    if (k < 1 || k > 4)
      throw ConfigError("lsb: k must be in 1..4, got " + std::to_string(k));
  }
};

std::size_t lsb_capacity_bits(const Image& cover, const LsbParams& params);

/// Embeds the framed payload (32-bit length header + bits); bytes beyond the
/// frame keep their original low bits. Bits above position k-1 never change.
Image lsb_embed(const Image& cover, std::span<const std::uint8_t> payload_bits,
                const LsbParams& params);

/// Recovers the payload embedded by lsb_embed with the same params.
Bits lsb_extract(const Image& stego, const LsbParams& params);

}  // namespace stegkit
