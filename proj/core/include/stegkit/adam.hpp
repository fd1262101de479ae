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

#include <cmath>
#include <cstdint>
#include <vector>

#include "stegkit/tensor.hpp"

namespace stegkit {

struct AdamHyper {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates plus the step counter for one parameter.
template <typename T>
struct AdamState {
  std::vector<T> m, v;
  std::uint64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, T(0)), v(n, T(0)) {}
};

/// One Adam update with bias correction. Zero gradients leave the parameter
/// values unchanged (the step counter still advances).
template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads,
               AdamState<T>& state, const AdamHyper& h) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size())
    throw ShapeError("adam_step: size mismatch params=" +
                     std::to_string(params.size()) +
                     " grads=" + std::to_string(grads.size()) +
                     " state=" + std::to_string(state.m.size()));
  state.t += 1;
  const T b1 = static_cast<T>(h.beta1), b2 = static_cast<T>(h.beta2);
  const T corr1 = T(1) - static_cast<T>(std::pow(h.beta1, static_cast<double>(state.t)));
  const T corr2 = T(1) - static_cast<T>(std::pow(h.beta2, static_cast<double>(state.t)));
  const T lr = static_cast<T>(h.lr), eps = static_cast<T>(h.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    T g = grads[i];
    state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
    state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
    T mhat = state.m[i] / corr1;
    T vhat = state.v[i] / corr2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

template <typename T>
void adam_step(Parameter<T>& p, AdamState<T>& state, const AdamHyper& h) {
  adam_step(p.value, p.grad, state, h);
}

/// Adam over a fixed group of parameters; state is kept per parameter and
/// groups are fully independent of each other.
template <typename T>
class AdamOptimizer {
public:
  AdamOptimizer() = default;
  AdamOptimizer(std::vector<Parameter<T>*> params, AdamHyper hyper)
      : params_(std::move(params)), hyper_(hyper) {
    states_.reserve(params_.size());
    for (auto* p : params_) states_.emplace_back(p->size());
  }

  void step() {
    for (std::size_t i = 0; i < params_.size(); ++i)
      adam_step(*params_[i], states_[i], hyper_);
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  std::vector<AdamState<T>>& states() { return states_; }
  const std::vector<Parameter<T>*>& params() const { return params_; }
  const AdamHyper& hyper() const { return hyper_; }

private:
  std::vector<Parameter<T>*> params_;
  std::vector<AdamState<T>> states_;
  AdamHyper hyper_;
};

}  // namespace stegkit
