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
#include <memory>
#include <string>
#include <vector>

#include "stegkit/adam.hpp"
#include "stegkit/config.hpp"
#include "stegkit/image.hpp"
#include "stegkit/losses.hpp"
#include "stegkit/models.hpp"
#include "stegkit/payload.hpp"

namespace stegkit {

/// One line of the training log.
struct TrainTraceRow {
  std::uint64_t step = 0;
  double l_adv = 0;
  double l_rec = 0;
  double l_perc = 0;
  double total = 0;
  double d_acc = 0;
  double e_bitacc = 0;
};

struct TrainTrace {
  std::vector<TrainTraceRow> rows;

  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// Checkpoint container. On disk: magic "SGF1", u16 version, 32-byte config
/// hash, u64 step, u64 RNG state, then length-prefixed named parameter blobs
/// (name, shape, little-endian f32 data) for G/D/E including batchnorm
/// running statistics, then Adam states for the trainable parameters, in the
/// same order. Round-trips bit-exactly.
struct CheckpointData {
  std::uint16_t version = 1;
  std::array<std::uint8_t, 32> config_hash{};
  std::uint64_t step = 0;
  std::uint64_t rng_state = 0;

  struct Blob {
    std::string name;
    Shape shape;
    std::vector<float> data;
  };
  std::vector<Blob> params;

  struct OptBlob {
    std::string name;
    std::uint64_t t = 0;
    std::vector<float> m, v;
  };
  std::vector<OptBlob> opt_states;
};

std::vector<std::uint8_t> serialize_checkpoint(const CheckpointData& ck);
CheckpointData deserialize_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint_file(const CheckpointData& ck, const std::string& path);
CheckpointData load_checkpoint_file(const std::string& path);

/// The alternating three-phase optimization loop: (1) discriminator on
/// covers vs fresh stego, (2) generator against the frozen discriminator and
/// extractor under the combined objective, (3) extractor on fresh stego.
/// Phase isolation holds per step: only the phase's own network changes.
class Trainer {
public:
  explicit Trainer(const TrainConfig& config);
  Trainer(const TrainConfig& config, const std::string& resume_checkpoint);
  ~Trainer();

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// One full step (all configured phase repetitions). Aborts with
  /// TrainError naming the phase if any loss goes non-finite.
  TrainTraceRow train_step();

  /// Runs to the step budget (or early stop), writing checkpoints at the
  /// configured interval plus ckpt-final.sgf1 and trace.csv in out_dir.
  TrainTrace run();

  CheckpointData checkpoint() const;
  std::uint64_t step() const;
  const TrainConfig& config() const;
  ModelBundle<float>& bundle();
  std::size_t dataset_size() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Inference-mode embed/extract with a trained model. Rebuilds G and E from
/// the checkpoint blobs (topology is recovered from the parameter shapes);
/// batchnorm uses running statistics. Cover extents must be multiples of 8.
class GanCodec {
public:
  explicit GanCodec(const CheckpointData& ck);
  explicit GanCodec(const std::string& checkpoint_path);
  ~GanCodec();

  GanCodec(GanCodec&&) noexcept;
  GanCodec& operator=(GanCodec&&) noexcept;

  std::size_t capacity_bits(const Image& cover) const;
  std::size_t bits_per_pixel() const;
  std::size_t cover_channels() const;

  /// Frames the payload (32-bit header) and produces the 8-bit stego image.
  Image embed(const Image& cover, std::span<const std::uint8_t> payload_bits) const;

  /// Logit sign decoding followed by header framing.
  Bits extract(const Image& stego) const;

  /// The full logit-sign stream (capacity bits) without header framing;
  /// used for bit-accuracy measurements.
  Bits extract_raw(const Image& stego) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stegkit
