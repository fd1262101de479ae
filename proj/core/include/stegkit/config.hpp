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
#include <cstdint>
#include <map>
#include <string>

#include "stegkit/losses.hpp"
#include "stegkit/models.hpp"

namespace stegkit {

/// Flat key=value text, one pair per line; '#' starts a comment. Unknown
/// keys are an error so typos cannot silently change a run.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv_text(const std::string& text);
KvMap parse_kv_file(const std::string& path);

/// Everything a training run depends on. The canonical serialization (fixed
/// key order) feeds the config hash stored in checkpoints; a resume with a
/// different hash is rejected.
struct TrainConfig {
  std::string dataset_dir;
  std::string out_dir = "train_out";
  std::size_t crop = 64;
  std::size_t batch = 4;
  std::size_t steps = 2000;
  double lr_g = 2e-4;
  double lr_d = 2e-4;
  double lr_e = 2e-4;
  LossWeights weights;  // lambda_rec=10, lambda_perc=1 defaults
  std::uint64_t seed = 42;
  std::size_t checkpoint_interval = 500;
  std::size_t bpp = 1;
  std::size_t d_per_step = 1;
  std::size_t g_per_step = 1;
  std::size_t e_per_step = 1;
  bool early_stop = false;
  std::size_t early_stop_window = 500;
  double early_stop_tol = 0.002;
  double target_bitacc = 0.0;  // 0 disables the accuracy-target stop
  std::size_t gen_base = 32;
  std::size_t disc_base = 16;
  std::size_t extractor_width = 16;
  std::size_t feature_width = 8;
  double feature_gain = 1.4;

  static TrainConfig from_kv(const KvMap& kv);
  static TrainConfig from_file(const std::string& path);

  void validate() const;
  NetTopology topology(std::size_t cover_channels) const;
  std::string canonical() const;
  std::array<std::uint8_t, 32> hash() const;
};

}  // namespace stegkit
