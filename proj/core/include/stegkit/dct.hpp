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

#include <array>
#include <utility>
#include <vector>

#include "stegkit/image.hpp"
#include "stegkit/payload.hpp"

namespace stegkit {

using Block8 = std::array<double, 64>;  // one 8x8 block, row-major

/// Orthonormal type-II DCT of one 8x8 block; dct8_inverse is the type-III
/// inverse and inverse(forward(x)) == x to within 1e-9 at 64-bit.
Block8 dct8_forward(const Block8& block);
Block8 dct8_inverse(const Block8& coeffs);

/// QIM lattice rule: coefficient c moves to the nearest point of the coset
/// selected by `bit` (even multiples of delta for 0, odd for 1).
double qim_embed_coeff(double c, int bit, double delta);
int qim_extract_coeff(double c, double delta);

/// Mid-frequency quantization-index-modulation embedding in 8x8 block DCT
/// coefficients. For bit b and step delta the selected coefficient moves to
/// the nearest lattice point 2*delta*round((c - b*delta)/(2*delta)) + b*delta,
/// so the per-coefficient change never exceeds delta.
struct DctParams {
  double delta = 8.0;
  // Coefficient positions (u=row, v=col) inside the 8x8 block, visited in
  // order. Default: zig-zag positions 9..16, the mid-frequency band.
  std::vector<std::pair<int, int>> coefficients;
  bool luma_only = true;

  static DctParams defaults();

  void validate() const;
};

std::size_t dct_capacity_bits(const Image& cover, const DctParams& params);

/// Embeds the framed payload; partial trailing blocks are skipped (capacity
/// already reflects that). Requires delta >= 4 so parity survives the
/// pixel-domain clamp and 8-bit rounding.
Image dct_embed(const Image& cover, std::span<const std::uint8_t> payload_bits,
                const DctParams& params);

/// Nearest-lattice decoding; exact recovery absent attack, graceful
/// degradation under noise.
Bits dct_extract(const Image& stego, const DctParams& params);

/// First n_bits of the raw coefficient stream without header framing; used
/// for bit-error-rate measurements under attack.
Bits dct_extract_raw(const Image& stego, const DctParams& params,
                     std::size_t n_bits);

}  // namespace stegkit
