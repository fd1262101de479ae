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

#include <algorithm>
#include <cmath>

#include "stegkit/tensor.hpp"

namespace stegkit {

/// Compares the reverse-mode gradient of a scalar-valued fragment against
/// central finite differences at the probe point and returns the largest
/// relative error. `fragment` is called as fragment(tape*, x) and must build
/// the same computation for every call; probe points should avoid activation
/// kinks (nudge inputs away from exact zeros).
template <typename T, typename Fragment>
double grad_check(Fragment&& fragment, const Tensor<T>& probe, double eps) {
  Tape<T> tape;
  Tensor<T> x = tape.watch(probe);
  Tensor<T> loss = fragment(&tape, x);
  tape.backward(loss);
  std::vector<T> analytic = x.grad();

  auto eval = [&](const std::vector<T>& values) {
    Tensor<T> probe2(probe.shape(), values);
    Tape<T> t2;
    Tensor<T> x2 = t2.watch(probe2);
    return static_cast<double>(fragment(&t2, x2).item());
  };

  std::vector<T> values = probe.data();
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    T orig = values[i];
    values[i] = orig + static_cast<T>(eps);
    double up = eval(values);
    values[i] = orig - static_cast<T>(eps);
    double down = eval(values);
    values[i] = orig;
    double numeric = (up - down) / (2.0 * eps);
    double a = static_cast<double>(analytic[i]);
    double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
    worst = std::max(worst, std::fabs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace stegkit
