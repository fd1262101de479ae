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

#include "stegkit/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace stegkit {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void check_dims(const Image& a, const Image& b, const char* op) {
  if (!a.same_dims(b))
    throw ShapeError(std::string(op) + ": dimension mismatch " +
                     std::to_string(a.width) + "x" + std::to_string(a.height) +
                     "x" + std::to_string(a.channels) + " vs " +
                     std::to_string(b.width) + "x" + std::to_string(b.height) +
                     "x" + std::to_string(b.channels));
}

double mse(const Image& a, const Image& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixels.size());
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    double d = i - (kWindow - 1) / 2.0;
    w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable Gaussian filter producing only the valid region
// (H-10) x (W-10); `src` is a single-channel double plane.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t h,
                                 std::size_t w,
                                 const std::array<double, kWindow>& win) {
  const std::size_t wo = w - kWindow + 1, ho = h - kWindow + 1;
  std::vector<double> tmp(h * wo);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < wo; ++x) {
      double acc = 0;
      for (int k = 0; k < kWindow; ++k) acc += win[k] * src[y * w + x + k];
      tmp[y * wo + x] = acc;
    }
  std::vector<double> out(ho * wo);
  for (std::size_t y = 0; y < ho; ++y)
    for (std::size_t x = 0; x < wo; ++x) {
      double acc = 0;
      for (int k = 0; k < kWindow; ++k) acc += win[k] * tmp[(y + k) * wo + x];
      out[y * wo + x] = acc;
    }
  return out;
}

double ssim_channel(const Image& a, const Image& b, std::size_t ch,
                    const std::array<double, kWindow>& win) {
  const std::size_t h = a.height, w = a.width;
  std::vector<double> xa(h * w), xb(h * w), xaa(h * w), xbb(h * w), xab(h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double va = a.at(x, y, ch), vb = b.at(x, y, ch);
      xa[y * w + x] = va;
      xb[y * w + x] = vb;
      xaa[y * w + x] = va * va;
      xbb[y * w + x] = vb * vb;
      xab[y * w + x] = va * vb;
    }
  auto mu_a = filter_valid(xa, h, w, win);
  auto mu_b = filter_valid(xb, h, w, win);
  auto m_aa = filter_valid(xaa, h, w, win);
  auto m_bb = filter_valid(xbb, h, w, win);
  auto m_ab = filter_valid(xab, h, w, win);

  double acc = 0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    double ma = mu_a[i], mb = mu_b[i];
    double va = m_aa[i] - ma * ma;
    double vb = m_bb[i] - mb * mb;
    double cov = m_ab[i] - ma * mb;
    double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
    double den = (ma * ma + mb * mb + kC1) * (va + vb + kC2);
    acc += num / den;
  }
  return acc / static_cast<double>(mu_a.size());
}

}  // namespace

std::string pair_kind_name(PairKind k) {
  return k == PairKind::cover_stego ? "cover/stego" : "secret/recovered";
}

double psnr(const Image& a, const Image& b) {
  check_dims(a, b, "psnr");
  double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double rmse(const Image& a, const Image& b) {
  check_dims(a, b, "rmse");
  return std::sqrt(mse(a, b));
}

double mae(const Image& a, const Image& b) {
  check_dims(a, b, "mae");
  double acc = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    acc += std::fabs(static_cast<double>(a.pixels[i]) -
                     static_cast<double>(b.pixels[i]));
  return acc / static_cast<double>(a.pixels.size());
}

double ssim(const Image& a, const Image& b) {
  check_dims(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow)
    throw ShapeError("ssim: image " + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " smaller than the " +
                     std::to_string(kWindow) + "x" + std::to_string(kWindow) +
                     " window");
  auto win = gaussian_window();
  double acc = 0;
  for (std::size_t c = 0; c < a.channels; ++c)
    acc += ssim_channel(a, b, c, win);
  return acc / static_cast<double>(a.channels);
}

MetricsReport compute_metrics(const Image& a, const Image& b, PairKind kind) {
  MetricsReport r;
  r.psnr_db = psnr(a, b);
  r.ssim = ssim(a, b);
  r.rmse = rmse(a, b);
  r.mae = mae(a, b);
  r.pair_kind = kind;
  return r;
}

}  // namespace stegkit
