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

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "stegkit/image.hpp"

namespace stegkit {

/// Pairs-of-values chi-square steganalysis. Scores in [0,1], higher meaning
/// more consistent with full-capacity LSB embedding (pair histograms
/// equalized). Degenerate histograms (under two usable pairs) score 0.
double chi_square_lsb_score(const Image& img);

class GanCodec;

/// A steganalysis probe: chi-square statistics or a trained CNN classifier.
/// score() is interpretable as P(stego).
class Detector {
public:
  enum class Kind { chi_square_lsb, cnn };

  static Detector chi_square();

  /// Wraps a trained discriminator checkpoint as a standalone classifier;
  /// inputs are center-cropped to the classifier extent.
  static Detector cnn_from_checkpoint(const std::string& checkpoint_path);

  double score(const Image& img) const;
  Kind kind() const { return kind_; }
  std::string name() const;

private:
  Detector(Kind kind, std::function<double(const Image&)> fn)
      : kind_(kind), fn_(std::move(fn)) {}

  Kind kind_;
  std::function<double(const Image&)> fn_;
};

/// Balanced accuracy at the given threshold: the mean of the true-positive
/// rate on stegos and the true-negative rate on covers. Both sets must be
/// nonempty.
double detection_accuracy(const Detector& detector,
                          std::span<const Image> covers,
                          std::span<const Image> stegos, double threshold);

double detection_accuracy(const std::function<double(const Image&)>& score,
                          std::span<const Image> covers,
                          std::span<const Image> stegos, double threshold);

/// Trains the discriminator topology as a standalone cover/stego classifier
/// (binary cross-entropy, Adam) and writes a checkpoint loadable by
/// Detector::cnn_from_checkpoint. Images are center-cropped to `extent`.
void train_cnn_detector(std::span<const Image> covers,
                        std::span<const Image> stegos, std::size_t extent,
                        std::size_t steps, std::size_t batch,
                        std::uint64_t seed, const std::string& checkpoint_path);

}  // namespace stegkit
