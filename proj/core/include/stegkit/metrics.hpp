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

#include <string>

#include "stegkit/image.hpp"

namespace stegkit {

enum class PairKind { cover_stego, secret_recovered };

std::string pair_kind_name(PairKind k);

/// Image-pair quality scores. psnr_db is +infinity exactly when rmse is 0.
struct MetricsReport {
  double psnr_db = 0;
  double ssim = 0;
  double rmse = 0;
  double mae = 0;
  PairKind pair_kind = PairKind::cover_stego;
};

/// 10*log10(255^2 / MSE), MSE pooled over all channels at 64-bit;
/// +infinity when the images are identical.
double psnr(const Image& a, const Image& b);

double rmse(const Image& a, const Image& b);

double mae(const Image& a, const Image& b);

/// Mean local SSIM over an 11x11 Gaussian window (sigma 1.5) with
/// C1=(0.01*255)^2, C2=(0.03*255)^2, computed per channel and averaged.
/// Both extents must be at least the window size.
double ssim(const Image& a, const Image& b);

MetricsReport compute_metrics(const Image& a, const Image& b, PairKind kind);

}  // namespace stegkit
