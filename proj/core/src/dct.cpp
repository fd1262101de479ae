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

#include "stegkit/dct.hpp"

#include <cmath>

namespace stegkit {

namespace {

// Orthonormal 1D DCT-II basis matrix M[k][n].
const std::array<std::array<double, 8>, 8>& dct_matrix() {
  static const auto m = [] {
    std::array<std::array<double, 8>, 8> out{};
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < 8; ++k) {
      double s = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n)
        out[k][n] = s * std::cos(pi * (2 * n + 1) * k / 16.0);
    }
    return out;
  }();
  return m;
}

struct YcbcrPlanes {
  std::vector<double> y, cb, cr;
};

YcbcrPlanes rgb_to_ycbcr(const Image& img) {
  YcbcrPlanes p;
  const std::size_t n = img.pixel_count();
  p.y.resize(n);
  p.cb.resize(n);
  p.cr.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = img.pixels[i * 3], g = img.pixels[i * 3 + 1],
           b = img.pixels[i * 3 + 2];
    p.y[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    p.cb[i] = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0;
    p.cr[i] = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0;
  }
  return p;
}

std::uint8_t round_clamp(double v) {
  v = std::round(v);
  if (v < 0) return 0;
  if (v > 255) return 255;
  return static_cast<std::uint8_t>(v);
}

Image ycbcr_to_rgb(const YcbcrPlanes& p, std::size_t w, std::size_t h) {
  Image img(w, h, 3);
  for (std::size_t i = 0; i < w * h; ++i) {
    double y = p.y[i], cb = p.cb[i] - 128.0, cr = p.cr[i] - 128.0;
    img.pixels[i * 3] = round_clamp(y + 1.402 * cr);
    img.pixels[i * 3 + 1] = round_clamp(y - 0.344136 * cb - 0.714136 * cr);
    img.pixels[i * 3 + 2] = round_clamp(y + 1.772 * cb);
  }
  return img;
}

std::vector<double> gray_plane(const Image& img) {
  std::vector<double> p(img.pixel_count());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = img.pixels[i];
  return p;
}

// Extracts/stores one 8x8 block of a W-stride plane.
Block8 get_block(const std::vector<double>& plane, std::size_t w,
                 std::size_t bx, std::size_t by) {
  Block8 b;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      b[i * 8 + j] = plane[(by * 8 + i) * w + bx * 8 + j];
  return b;
}

void put_block(std::vector<double>& plane, std::size_t w, std::size_t bx,
               std::size_t by, const Block8& b) {
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      plane[(by * 8 + i) * w + bx * 8 + j] = b[i * 8 + j];
}

}  // namespace

double qim_embed_coeff(double c, int bit, double delta) {
  double offset = bit ? delta : 0.0;
  return 2.0 * delta * std::round((c - offset) / (2.0 * delta)) + offset;
}

int qim_extract_coeff(double c, double delta) {
  double d0 = std::fabs(c - 2.0 * delta * std::round(c / (2.0 * delta)));
  double c1 = 2.0 * delta * std::round((c - delta) / (2.0 * delta)) + delta;
  double d1 = std::fabs(c - c1);
  return d1 < d0 ? 1 : 0;
}

Block8 dct8_forward(const Block8& block) {
  const auto& m = dct_matrix();
  Block8 tmp{}, out{};
  // rows: tmp = block * M^T
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 8; ++k) {
      double acc = 0;
      for (int n = 0; n < 8; ++n) acc += block[i * 8 + n] * m[k][n];
      tmp[i * 8 + k] = acc;
    }
  // cols: out = M * tmp
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j) {
      double acc = 0;
      for (int n = 0; n < 8; ++n) acc += m[k][n] * tmp[n * 8 + j];
      out[k * 8 + j] = acc;
    }
  return out;
}

Block8 dct8_inverse(const Block8& coeffs) {
  const auto& m = dct_matrix();
  Block8 tmp{}, out{};
  // cols: tmp = M^T * coeffs
  for (int n = 0; n < 8; ++n)
    for (int j = 0; j < 8; ++j) {
      double acc = 0;
      for (int k = 0; k < 8; ++k) acc += m[k][n] * coeffs[k * 8 + j];
      tmp[n * 8 + j] = acc;
    }
  // rows: out = tmp * M
  for (int i = 0; i < 8; ++i)
    for (int n = 0; n < 8; ++n) {
      double acc = 0;
      for (int k = 0; k < 8; ++k) acc += tmp[i * 8 + k] * m[k][n];
      out[i * 8 + n] = acc;
    }
  return out;
}

DctParams DctParams::defaults() {
  DctParams p;
  // Zig-zag positions 9..16 of the 8x8 grid.
  p.coefficients = {{3, 0}, {4, 0}, {3, 1}, {2, 2},
                    {1, 3}, {0, 4}, {0, 5}, {1, 4}};
  return p;
}

void DctParams::validate() const {
  if (delta <= 0) throw ConfigError("dct: delta must be > 0");
  if (coefficients.empty())
    throw ConfigError("dct: coefficient set must not be empty");
  for (auto [u, v] : coefficients) {
    if (u == 0 && v == 0)
      throw ConfigError("dct: DC coefficient (0,0) cannot carry payload");
    if (u < 0 || u > 7 || v < 0 || v > 7)
      throw ConfigError("dct: coefficient (" + std::to_string(u) + "," +
                        std::to_string(v) + ") outside the 8x8 block");
  }
}

std::size_t dct_capacity_bits(const Image& cover, const DctParams& params) {
  params.validate();
  const std::size_t blocks = (cover.width / 8) * (cover.height / 8);
  return blocks * params.coefficients.size();
}

Image dct_embed(const Image& cover, std::span<const std::uint8_t> payload_bits,
                const DctParams& params) {
  params.validate();
  if (params.delta < 4.0)
    throw ConfigError(
        "dct: delta must be >= 4 so parity survives pixel rounding, got " +
        std::to_string(params.delta));
  const std::size_t capacity = dct_capacity_bits(cover, params);
  Bits frame = frame_bits(payload_bits);
  if (frame.size() > capacity) throw CapacityExceeded(frame.size(), capacity);

  const bool rgb = cover.channels == 3;
  YcbcrPlanes planes;
  std::vector<double> luma;
  if (rgb) {
    planes = rgb_to_ycbcr(cover);
    luma = std::move(planes.y);
  } else {
    luma = gray_plane(cover);
  }

  Image stego = cover;  // blocks without payload keep their exact bytes

  // Writes one block of luma values into the stego pixels (rounded 8-bit,
  // recomposed with the original chroma when RGB) and returns the luma the
  // extractor will actually see.
  auto realize = [&](std::size_t bx, std::size_t by,
                     const Block8& yblock) -> Block8 {
    Block8 seen;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        std::size_t idx = (by * 8 + i) * cover.width + bx * 8 + j;
        double y = yblock[i * 8 + j];
        if (!rgb) {
          std::uint8_t px = round_clamp(y);
          stego.pixels[idx] = px;
          seen[i * 8 + j] = px;
        } else {
          double cb = planes.cb[idx] - 128.0, cr = planes.cr[idx] - 128.0;
          std::uint8_t r = round_clamp(y + 1.402 * cr);
          std::uint8_t g = round_clamp(y - 0.344136 * cb - 0.714136 * cr);
          std::uint8_t b = round_clamp(y + 1.772 * cb);
          stego.pixels[idx * 3] = r;
          stego.pixels[idx * 3 + 1] = g;
          stego.pixels[idx * 3 + 2] = b;
          seen[i * 8 + j] = 0.299 * r + 0.587 * g + 0.114 * b;
        }
      }
    return seen;
  };

  const std::size_t bw = cover.width / 8, bh = cover.height / 8;
  std::size_t pos = 0;
  for (std::size_t by = 0; by < bh && pos < frame.size(); ++by)
    for (std::size_t bx = 0; bx < bw && pos < frame.size(); ++bx) {
      Block8 coeffs = dct8_forward(get_block(luma, cover.width, bx, by));
      struct Slot {
        int idx;
        int bit;
        double target;
      };
      std::vector<Slot> slots;
      for (auto [u, v] : params.coefficients) {
        if (pos >= frame.size()) break;
        int bit = frame[pos++];
        double target = qim_embed_coeff(coeffs[u * 8 + v], bit, params.delta);
        coeffs[u * 8 + v] = target;
        slots.push_back({u * 8 + v, bit, target});
      }

      // 8-bit rounding perturbs the realized coefficients, occasionally past
      // the decode window at small delta; the rounding map also has wide
      // plateaus, so moving the one coefficient is not always enough. For
      // broken blocks, search written-value offsets for the failing slot
      // jointly with a small DC dither (which reshuffles the rounding
      // pattern), accepting only candidates where every slot decodes.
      auto all_decode = [&](const Block8& chk) {
        for (const auto& s : slots)
          if (qim_extract_coeff(chk[s.idx], params.delta) != s.bit)
            return false;
        return true;
      };
      static constexpr double kOffsets[] = {0.0,  0.5,  -0.5, 1.0,  -1.0,
                                            1.5,  -1.5, 2.0,  -2.0, 2.5,
                                            -2.5, 3.0,  -3.0, 3.5,  -3.5};
      static constexpr double kDcDither[] = {0.0, 0.49, -0.49, 0.98, -0.98};
      const double dc0 = coeffs[0];

      Block8 seen = realize(bx, by, dct8_inverse(coeffs));
      Block8 chk = dct8_forward(seen);
      for (int pass = 0; pass < 4 && !all_decode(chk); ++pass) {
        const Slot* bad = nullptr;
        for (const auto& s : slots)
          if (qim_extract_coeff(chk[s.idx], params.delta) != s.bit) {
            bad = &s;
            break;
          }
        bool fixed = false;
        for (double dc : kDcDither) {
          for (double offset : kOffsets) {
            coeffs[bad->idx] = bad->target + offset;
            coeffs[0] = dc0 + dc;
            seen = realize(bx, by, dct8_inverse(coeffs));
            chk = dct8_forward(seen);
            if (all_decode(chk)) {
              fixed = true;
              break;
            }
          }
          if (fixed) break;
        }
        if (!fixed) break;  // leave the closest attempt in place
      }
    }
  return stego;
}

Bits dct_extract_raw(const Image& stego, const DctParams& params,
                     std::size_t n_bits) {
  params.validate();
  const std::size_t capacity = dct_capacity_bits(stego, params);
  if (n_bits > capacity)
    throw CapacityExceeded(n_bits, capacity);

  std::vector<double> luma =
      stego.channels == 3 ? rgb_to_ycbcr(stego).y : gray_plane(stego);

  const std::size_t bw = stego.width / 8, bh = stego.height / 8;
  Bits stream;
  stream.reserve(n_bits);
  for (std::size_t by = 0; by < bh && stream.size() < n_bits; ++by)
    for (std::size_t bx = 0; bx < bw && stream.size() < n_bits; ++bx) {
      Block8 coeffs = dct8_forward(get_block(luma, stego.width, bx, by));
      for (auto [u, v] : params.coefficients) {
        if (stream.size() >= n_bits) break;
        stream.push_back(static_cast<std::uint8_t>(
            qim_extract_coeff(coeffs[u * 8 + v], params.delta)));
      }
    }
  return stream;
}

Bits dct_extract(const Image& stego, const DctParams& params) {
  params.validate();
  const std::size_t capacity = dct_capacity_bits(stego, params);
  if (capacity < kFrameHeaderBits)
    throw MalformedHeader("carrier holds " + std::to_string(capacity) +
                          " bits, header needs 32");

  Bits header = dct_extract_raw(stego, params, kFrameHeaderBits);
  std::uint32_t n = 0;
  for (auto b : header) n = (n << 1) | b;
  if (n > capacity - kFrameHeaderBits)
    throw MalformedHeader("header declares " + std::to_string(n) +
                          " payload bits but capacity is " +
                          std::to_string(capacity) + " bits");
  return unframe_bits(dct_extract_raw(stego, params, kFrameHeaderBits + n),
                      capacity);
}

}  // namespace stegkit
