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

#include "stegkit/models.hpp"
#include "stegkit/tensor.hpp"

namespace stegkit {

/// Weights of the combined objective L = L_adv + rec*L_rec + perc*L_perc.
struct LossWeights {
  double rec = 10.0;
  double perc = 1.0;

  void validate() const {
    if (rec < 0 || perc < 0)
      throw ConfigError("loss weights must be non-negative");
  }
};

inline constexpr double kProbEps = 1e-7;

/// Value function of the adversarial game over a batch:
/// mean log D(x) + mean log(1 - D(G(s,x))). Probabilities are clamped to
/// [eps, 1-eps] so saturated discriminator outputs cannot produce -inf.
/// The discriminator maximizes this; the generator trains against the
/// non-saturating variant below, which has the same fixed points.
template <typename T>
Tensor<T> adversarial_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
  if (d_real.size() == 0 || d_fake.size() == 0)
    throw ShapeError("adversarial_loss: empty batch");
  auto real_term = mean(log(clamp(d_real, T(kProbEps), T(1 - kProbEps))));
  auto fake_term = mean(log(
      offset(neg(clamp(d_fake, T(kProbEps), T(1 - kProbEps))), T(1))));
  return add(real_term, fake_term);
}

/// Non-saturating generator objective: minimize -mean log D(fake).
template <typename T>
Tensor<T> generator_adversarial_loss(const Tensor<T>& d_fake) {
  if (d_fake.size() == 0)
    throw ShapeError("generator_adversarial_loss: empty batch");
  return neg(mean(log(clamp(d_fake, T(kProbEps), T(1 - kProbEps)))));
}

/// Squared recovery error, normalized per element: mean (s - sigmoid(l))^2
/// with targets s in {0,1}. The norm-vs-mean scale difference is absorbed
/// by the rec weight.
template <typename T>
Tensor<T> reconstruction_loss(const Tensor<T>& targets,
                              const Tensor<T>& logits) {
  check_same_shape(targets.shape(), logits.shape(), "reconstruction_loss");
  auto diff = sub(targets, sigmoid(logits));
  return mean(mul(diff, diff));
}

/// Feature-space distance: sum over tap layers of the per-layer mean squared
/// difference between cover and stego feature maps.
template <typename T>
Tensor<T> perceptual_loss(FeatureNet<T>& f, const Tensor<T>& cover,
                          const Tensor<T>& stego) {
  check_same_shape(cover.shape(), stego.shape(), "perceptual_loss");
  auto cover_taps = f.taps(cover);
  auto stego_taps = f.taps(stego);
  Tensor<T> total;
  for (std::size_t i = 0; i < cover_taps.size(); ++i) {
    auto diff = sub(cover_taps[i], stego_taps[i]);
    auto layer = mean(mul(diff, diff));
    total = i == 0 ? layer : add(total, layer);
  }
  return total;
}

/// L = L_adv + rec*L_rec + perc*L_perc, evaluated in that fixed order so
/// zeroing one weight reproduces the remaining sum exactly.
template <typename T>
Tensor<T> total_loss(const Tensor<T>& adv, const Tensor<T>& rec,
                     const Tensor<T>& perc, const LossWeights& w) {
  return add(add(adv, scale(rec, T(w.rec))), scale(perc, T(w.perc)));
}

inline double total_loss(double adv, double rec, double perc,
                         const LossWeights& w) {
  return (adv + w.rec * rec) + w.perc * perc;
}

}  // namespace stegkit
