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
#include "stegkit/rng.hpp"

namespace stegkit {

/// Synthetic textured cover with natural-ish statistics: a mixture of
/// oriented sinusoids plus noise, pushed through a random tone curve so the
/// value histogram has the uneven adjacent-bin structure of photographic
/// content (which the chi-square detector relies on).
Image synth_cover(Rng& rng, std::size_t width, std::size_t height,
                  std::size_t channels);

/// Grayscale secret image (same texture family).
Image synth_secret(Rng& rng, std::size_t width, std::size_t height);

/// Uniform random pixels; the low-bit distribution is exactly uniform,
/// matching the closed-form LSB distortion analysis.
Image noise_cover(Rng& rng, std::size_t width, std::size_t height,
                  std::size_t channels);

/// Writes `count` covers as cover_0000.png .. into `dir` (created if absent).
void write_fixture_dataset(const std::string& dir, std::size_t count,
                           std::size_t width, std::size_t height,
                           std::size_t channels, std::uint64_t seed);

}  // namespace stegkit
