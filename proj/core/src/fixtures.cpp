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

#include "stegkit/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

namespace stegkit {

namespace {

struct Wave {
  double fx, fy, phase, amp;
};

std::vector<double> texture_field(Rng& rng, std::size_t w, std::size_t h) {
  const int n_waves = 4 + static_cast<int>(rng.next_below(4));
  std::vector<Wave> waves(n_waves);
  for (auto& wv : waves) {
    double freq = rng.uniform(0.005, 0.09);
    double theta = rng.uniform(0, 6.283185307179586);
    wv.fx = freq * std::cos(theta);
    wv.fy = freq * std::sin(theta);
    wv.phase = rng.uniform(0, 6.283185307179586);
    wv.amp = rng.uniform(12.0, 40.0);
  }
  const double base = rng.uniform(90.0, 165.0);
  const double noise_sigma = rng.uniform(1.5, 5.0);

  std::vector<double> field(w * h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double v = base;
      for (const auto& wv : waves)
        v += wv.amp * std::sin(6.283185307179586 *
                                   (wv.fx * double(x) + wv.fy * double(y)) +
                               wv.phase);
      v += noise_sigma * rng.normal();
      field[y * w + x] = v;
    }
  return field;
}

// Tone pipeline applied per channel plane: rescale into a safe interior
// range, gamma-map, integerize, then an integer contrast stretch. The
// stretch maps the 8-bit lattice through a non-integer slope, which combs
// the histogram (some bins starve, neighbors double up) the way contrast-
// enhanced photographs do; that uneven adjacent-bin structure is what
// pairs-of-values steganalysis keys on.
std::vector<std::uint8_t> tone_pipeline(const std::vector<double>& field,
                                        double gamma, double stretch_u) {
  double lo = field[0], hi = field[0];
  for (double v : field) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span = hi - lo < 1e-9 ? 1.0 : hi - lo;

  std::vector<double> mapped(field.size());
  double mlo = 255.0, mhi = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    double t = 40.0 + 176.0 * (field[i] - lo) / span;  // [40, 216]
    double g = 255.0 * std::pow(t / 255.0, gamma);
    mapped[i] = g;
    mlo = std::min(mlo, g);
    mhi = std::max(mhi, g);
  }

  double mid = 0.5 * (mlo + mhi);
  double headroom = std::min(mid, 255.0 - mid);
  double half_span = std::max(1.0, 0.5 * (mhi - mlo));
  double a_max = std::max(1.1, 0.98 * headroom / half_span);
  double a = 1.1 + stretch_u * (std::min(1.5, a_max) - 1.1);

  std::vector<std::uint8_t> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    double q = std::round(mapped[i]);
    double v = std::round((q - mid) * a + mid);
    out[i] = static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, v)));
  }
  return out;
}

}  // namespace

Image synth_cover(Rng& rng, std::size_t width, std::size_t height,
                  std::size_t channels) {
  Image img(width, height, channels);
  const double gamma =
      rng.next_bit() ? rng.uniform(0.6, 0.9) : rng.uniform(1.15, 1.6);
  const double stretch_u = rng.next_double();
  auto luma = texture_field(rng, width, height);
  if (channels == 1) {
    auto plane = tone_pipeline(luma, gamma, stretch_u);
    img.pixels = std::move(plane);
    return img;
  }
  // Correlated channels: shared luminance plus per-channel tinted detail.
  auto detail = texture_field(rng, width, height);
  double tint[3] = {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4),
                    rng.uniform(-0.4, 0.4)};
  std::vector<double> chan(luma.size());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < luma.size(); ++i)
      chan[i] = luma[i] + tint[c] * (detail[i] - 128.0);
    auto plane = tone_pipeline(chan, gamma, stretch_u);
    for (std::size_t i = 0; i < plane.size(); ++i)
      img.pixels[i * 3 + c] = plane[i];
  }
  return img;
}

Image synth_secret(Rng& rng, std::size_t width, std::size_t height) {
  return synth_cover(rng, width, height, 1);
}

Image noise_cover(Rng& rng, std::size_t width, std::size_t height,
                  std::size_t channels) {
  Image img(width, height, channels);
  for (auto& p : img.pixels)
    p = static_cast<std::uint8_t>(rng.next_below(256));
  return img;
}

void write_fixture_dataset(const std::string& dir, std::size_t count,
                           std::size_t width, std::size_t height,
                           std::size_t channels, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng(seed).fork(i);
    Image img = synth_cover(rng, width, height, channels);
    char name[32];
    std::snprintf(name, sizeof(name), "cover_%04zu.png", i);
    save_image(img, (std::filesystem::path(dir) / name).string());
  }
}

}  // namespace stegkit
