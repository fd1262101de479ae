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
#include <string>
#include <vector>

#include "stegkit/dct.hpp"
#include "stegkit/lsb.hpp"
#include "stegkit/metrics.hpp"
#include "stegkit/payload.hpp"

namespace stegkit {

/// One embedding method under evaluation. Parsed from compact strings:
/// "lsb:k=4", "dct:delta=8", "gan:checkpoint=path/to/ckpt.sgf1".
struct MethodSpec {
  enum class Kind { lsb, dct, gan };

  Kind kind = Kind::lsb;
  LsbParams lsb{};
  DctParams dct = DctParams::defaults();
  std::string checkpoint;

  static MethodSpec parse(const std::string& text);
  std::string label() const;
  std::string params_string() const;
};

struct BenchConfig {
  std::uint64_t seed = 42;
  PayloadMode payload_mode = PayloadMode::image;
  bool include_references = false;  // CAIS/HiNet paper-reported constants
  double detect_threshold = 0.5;

  std::string canonical() const;
};

struct PairMeans {
  double ssim = 0, psnr = 0, rmse = 0, mae = 0;
  bool operator==(const PairMeans&) const = default;
};

/// One (dataset, method) cell: metric means over the evaluation set for both
/// pair kinds, plus chi-square detection accuracy with the full score dump.
struct BenchCell {
  std::string dataset;
  std::string method;
  std::string params;
  PairMeans cover_stego;
  PairMeans secret_recovered;
  bool has_cover_stego = false;
  bool has_secret_recovered = false;
  bool has_detection = false;
  double detect_acc = 0;
  std::vector<double> cover_scores;
  std::vector<double> stego_scores;
  std::size_t n = 0;
  std::size_t failures = 0;
  bool reference = false;  // paper-reported, not reproduced here

  bool operator==(const BenchCell&) const = default;
};

struct BenchReport {
  std::uint64_t seed = 0;
  std::string config_hash;  // hex
  std::vector<BenchCell> cells;

  bool operator==(const BenchReport&) const = default;
};

/// Embeds/extracts every method over the PNGs of `dataset_dir`
/// (non-recursive, lexicographic), scoring cover/stego and secret/recovered
/// pairs and the chi-square detector. Per-image failures are recorded and
/// skipped; a method whose every image fails aborts the run. Deterministic
/// under the config seed.
BenchReport run_benchmark(const std::string& dataset_dir,
                          const std::vector<MethodSpec>& methods,
                          const BenchConfig& config);

/// CSV rows: dataset,method,metric,pair_kind,value,best_flag,n. The best
/// flag marks the winner per (dataset, metric, pair_kind) group honoring
/// metric direction; +inf PSNR serializes as "inf".
std::string report_csv(const BenchReport& report);
std::string report_json(const BenchReport& report);

BenchReport parse_report_json(const std::string& json_text);

/// Writes report.csv / report.json under out_dir (atomically).
void emit_report(const BenchReport& report, const std::string& out_dir,
                 bool csv, bool json);

}  // namespace stegkit
