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
#include <string>
#include <vector>

#include "stegkit/errors.hpp"
#include "stegkit/tensor.hpp"

namespace stegkit {

enum class ColorSpace : std::uint8_t { srgb };

/// 8-bit raster, row-major with interleaved channels. Grayscale or RGB only.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;  // 1 or 3
  std::vector<std::uint8_t> pixels;
  ColorSpace color_space = ColorSpace::srgb;

  Image() = default;
  Image(std::size_t w, std::size_t h, std::size_t c)
      : width(w), height(h), channels(c), pixels(w * h * c, 0) {
    if (c != 1 && c != 3)
      throw UnsupportedFormat("channels must be 1 or 3, got " +
                              std::to_string(c));
  }

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) {
    return pixels[(y * width + x) * channels + c];
  }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const {
    return pixels[(y * width + x) * channels + c];
  }

  std::size_t pixel_count() const { return width * height; }
  bool same_dims(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  bool operator==(const Image& o) const {
    return same_dims(o) && pixels == o.pixels;
  }
};

/// Decodes an 8-bit non-interlaced grayscale/RGB PNG. Other bit depths,
/// interlacing, or color types are rejected with the offending property.
Image load_image(const std::string& path);

/// Encodes as PNG (8-bit, non-interlaced); lossless round-trip with
/// load_image. Writes atomically (temp file + rename).
void save_image(const Image& img, const std::string& path);

/// Crops the centered window of the given extents.
Image center_crop(const Image& img, std::size_t w, std::size_t h);

/// [C,H,W] tensor in [-1,1]: v = p/127.5 - 1.
template <typename T>
Tensor<T> normalize(const Image& img) {
  Tensor<T> t({img.channels, img.height, img.width});
  auto& d = t.mutable_data();
  for (std::size_t c = 0; c < img.channels; ++c)
    for (std::size_t y = 0; y < img.height; ++y)
      for (std::size_t x = 0; x < img.width; ++x)
        d[(c * img.height + y) * img.width + x] = static_cast<T>(
            static_cast<double>(img.at(x, y, c)) / 127.5 - 1.0);
  return t;
}

/// Inverse of normalize: clamps to [-1,1], maps back to [0,255], rounds
/// half away from zero. Exact inverse on the 8-bit lattice.
template <typename T>
Image denormalize(const Tensor<T>& t) {
  if (t.ndim() != 3 || (t.dim(0) != 1 && t.dim(0) != 3))
    throw ShapeError("denormalize: expected [C,H,W] with C in {1,3}, got " +
                     shape_str(t.shape()));
  Image img(t.dim(2), t.dim(1), t.dim(0));
  const auto& d = t.data();
  for (std::size_t c = 0; c < img.channels; ++c)
    for (std::size_t y = 0; y < img.height; ++y)
      for (std::size_t x = 0; x < img.width; ++x) {
        double v = static_cast<double>(d[(c * img.height + y) * img.width + x]);
        v = std::min(1.0, std::max(-1.0, v));
        img.at(x, y, c) =
            static_cast<std::uint8_t>(std::round((v + 1.0) * 127.5));
      }
  return img;
}

}  // namespace stegkit
