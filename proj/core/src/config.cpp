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

#include "stegkit/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "stegkit/util.hpp"

namespace stegkit {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::size_t get_size(const KvMap& kv, const std::string& key,
                     std::size_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::size_t v = 0;
  auto res = std::from_chars(it->second.data(),
                             it->second.data() + it->second.size(), v);
  if (res.ec != std::errc() || res.ptr != it->second.data() + it->second.size())
    throw ConfigError("config: " + key + " must be a non-negative integer, got '" +
                      it->second + "'");
  return v;
}

double get_double(const KvMap& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return parse_double(it->second);
  } catch (const ConfigError&) {
    throw ConfigError("config: " + key + " must be a number, got '" +
                      it->second + "'");
  }
}

std::string get_str(const KvMap& kv, const std::string& key,
                    const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dataset", "out", "crop", "batch", "steps", "lr_g", "lr_d", "lr_e",
      "lambda_rec", "lambda_perc", "seed", "checkpoint_interval", "bpp",
      "d_per_step", "g_per_step", "e_per_step", "early_stop",
      "early_stop_window", "early_stop_tol", "target_bitacc", "gen_base",
      "disc_base", "extractor_width", "feature_width", "feature_gain"};
  return keys;
}

}  // namespace

KvMap parse_kv_text(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (kv.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

KvMap parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kv_text(ss.str());
}

TrainConfig TrainConfig::from_kv(const KvMap& kv) {
  for (const auto& [key, value] : kv)
    if (!known_keys().count(key))
      throw ConfigError("config: unknown key '" + key + "'");

  TrainConfig c;
  c.dataset_dir = get_str(kv, "dataset", "");
  c.out_dir = get_str(kv, "out", c.out_dir);
  c.crop = get_size(kv, "crop", c.crop);
  c.batch = get_size(kv, "batch", c.batch);
  c.steps = get_size(kv, "steps", c.steps);
  c.lr_g = get_double(kv, "lr_g", c.lr_g);
  c.lr_d = get_double(kv, "lr_d", c.lr_d);
  c.lr_e = get_double(kv, "lr_e", c.lr_e);
  c.weights.rec = get_double(kv, "lambda_rec", c.weights.rec);
  c.weights.perc = get_double(kv, "lambda_perc", c.weights.perc);
  c.seed = get_size(kv, "seed", c.seed);
  c.checkpoint_interval = get_size(kv, "checkpoint_interval", c.checkpoint_interval);
  c.bpp = get_size(kv, "bpp", c.bpp);
  c.d_per_step = get_size(kv, "d_per_step", c.d_per_step);
  c.g_per_step = get_size(kv, "g_per_step", c.g_per_step);
  c.e_per_step = get_size(kv, "e_per_step", c.e_per_step);
  c.early_stop = get_size(kv, "early_stop", c.early_stop ? 1 : 0) != 0;
  c.early_stop_window = get_size(kv, "early_stop_window", c.early_stop_window);
  c.early_stop_tol = get_double(kv, "early_stop_tol", c.early_stop_tol);
  c.target_bitacc = get_double(kv, "target_bitacc", c.target_bitacc);
  c.gen_base = get_size(kv, "gen_base", c.gen_base);
  c.disc_base = get_size(kv, "disc_base", c.disc_base);
  c.extractor_width = get_size(kv, "extractor_width", c.extractor_width);
  c.feature_width = get_size(kv, "feature_width", c.feature_width);
  c.feature_gain = get_double(kv, "feature_gain", c.feature_gain);
  c.validate();
  return c;
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  return from_kv(parse_kv_file(path));
}

void TrainConfig::validate() const {
  if (dataset_dir.empty()) throw ConfigError("config: dataset is required");
  if (crop == 0 || batch == 0)
    throw ConfigError("config: crop and batch must be >= 1");
  if (crop % 16 != 0)
    throw ConfigError("config: crop must be a multiple of 16 (generator and "
                      "discriminator stride pyramid), got " +
                      std::to_string(crop));
  if (bpp < 1 || bpp > 8)
    throw ConfigError("config: bpp must be in 1..8, got " + std::to_string(bpp));
  if (checkpoint_interval == 0)
    throw ConfigError("config: checkpoint_interval must be >= 1");
  if (d_per_step == 0 || g_per_step == 0 || e_per_step == 0)
    throw ConfigError("config: phase ratios must be >= 1");
  if (gen_base < 2 || gen_base % 2 != 0)
    throw ConfigError("config: gen_base must be even and >= 2");
  if (disc_base < 1 || extractor_width < 1 || feature_width < 1)
    throw ConfigError("config: network widths must be >= 1");
  if (lr_g <= 0 || lr_d <= 0 || lr_e <= 0)
    throw ConfigError("config: learning rates must be > 0");
  weights.validate();
}

NetTopology TrainConfig::topology(std::size_t cover_channels) const {
  NetTopology t;
  t.cover_channels = cover_channels;
  t.secret_planes = bpp;
  t.gen_base = gen_base;
  t.disc_base = disc_base;
  t.disc_extent = crop;
  t.extractor_width = extractor_width;
  t.feature_width = feature_width;
  t.feature_gain = feature_gain;
  return t;
}

// Only the fields that determine model compatibility enter the hash;
// run-control knobs (steps, checkpoint interval, early stop, output dir) may
// differ between a checkpoint and the run resuming from it.
std::string TrainConfig::canonical() const {
  std::string s;
  s += "batch=" + std::to_string(batch) + "\n";
  s += "bpp=" + std::to_string(bpp) + "\n";
  s += "crop=" + std::to_string(crop) + "\n";
  s += "d_per_step=" + std::to_string(d_per_step) + "\n";
  s += "dataset=" + dataset_dir + "\n";
  s += "disc_base=" + std::to_string(disc_base) + "\n";
  s += "e_per_step=" + std::to_string(e_per_step) + "\n";
  s += "extractor_width=" + std::to_string(extractor_width) + "\n";
  s += "feature_gain=" + format_double(feature_gain) + "\n";
  s += "feature_width=" + std::to_string(feature_width) + "\n";
  s += "g_per_step=" + std::to_string(g_per_step) + "\n";
  s += "gen_base=" + std::to_string(gen_base) + "\n";
  s += "lambda_perc=" + format_double(weights.perc) + "\n";
  s += "lambda_rec=" + format_double(weights.rec) + "\n";
  s += "lr_d=" + format_double(lr_d) + "\n";
  s += "lr_e=" + format_double(lr_e) + "\n";
  s += "lr_g=" + format_double(lr_g) + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  return s;
}

std::array<std::uint8_t, 32> TrainConfig::hash() const {
  return sha256_str(canonical());
}

}  // namespace stegkit
