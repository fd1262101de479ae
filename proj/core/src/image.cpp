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

#include "stegkit/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <memory>

namespace stegkit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports fatal errors through longjmp; the message is stashed here
// first so the catch site can rethrow it as a typed exception.
struct PngState {
  Image img;
  std::vector<png_bytep> rows;
  std::string error_msg;
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* s = static_cast<PngState*>(png_get_error_ptr(png));
  if (s) s->error_msg = msg;
  longjmp(png_jmpbuf(png), 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct ReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~ReadGuard() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct WriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~WriteGuard() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

}  // namespace

Image load_image(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);

  png_byte header[8] = {};
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw UnsupportedFormat(path + ": not a PNG file");

  auto state = std::make_unique<PngState>();
  ReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state.get(),
                                 on_png_error, on_png_warning);
  if (!g.png) throw IoError("png_create_read_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("png_create_info_struct failed");

  if (setjmp(png_jmpbuf(g.png)))
    throw UnsupportedFormat(
        path + ": " +
        (state->error_msg.empty() ? "corrupt PNG" : state->error_msg));

  png_init_io(g.png, fp.get());
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);

  const int depth = png_get_bit_depth(g.png, g.info);
  const int color = png_get_color_type(g.png, g.info);
  const int interlace = png_get_interlace_type(g.png, g.info);
  if (depth != 8)
    throw UnsupportedFormat(path + ": unsupported bit depth " +
                            std::to_string(depth) + " (only 8-bit)");
  if (interlace != PNG_INTERLACE_NONE)
    throw UnsupportedFormat(path + ": interlaced PNG not supported");
  if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB)
    throw UnsupportedFormat(path + ": unsupported color type " +
                            std::to_string(color) +
                            " (only grayscale or RGB)");

  state->img = Image(png_get_image_width(g.png, g.info),
                     png_get_image_height(g.png, g.info),
                     color == PNG_COLOR_TYPE_GRAY ? 1 : 3);
  Image& img = state->img;
  const std::size_t stride = img.width * img.channels;
  if (png_get_rowbytes(g.png, g.info) != stride)
    throw UnsupportedFormat(path + ": unexpected row stride");

  state->rows.resize(img.height);
  for (std::size_t y = 0; y < img.height; ++y)
    state->rows[y] = img.pixels.data() + y * stride;
  png_read_image(g.png, state->rows.data());
  png_read_end(g.png, nullptr);
  return std::move(state->img);
}

void save_image(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw UnsupportedFormat("save_image: channels must be 1 or 3, got " +
                            std::to_string(img.channels));
  if (img.pixels.size() != img.width * img.height * img.channels)
    throw ShapeError("save_image: pixel buffer has " +
                     std::to_string(img.pixels.size()) + " bytes, expected " +
                     std::to_string(img.width * img.height * img.channels));

  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";

  auto state = std::make_unique<PngState>();
  {
    FilePtr fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) throw IoError("cannot create " + tmp.string());

    WriteGuard g;
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state.get(),
                                    on_png_error, on_png_warning);
    if (!g.png) throw IoError("png_create_write_struct failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("png_create_info_struct failed");

    if (setjmp(png_jmpbuf(g.png))) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("png encode failed for " + path + ": " +
                    state->error_msg);
    }

    png_init_io(g.png, fp.get());
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    const std::size_t stride = img.width * img.channels;
    for (std::size_t y = 0; y < img.height; ++y)
      png_write_row(g.png,
                    const_cast<png_bytep>(img.pixels.data() + y * stride));
    png_write_end(g.png, nullptr);
  }

  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path);
  }
}

Image center_crop(const Image& img, std::size_t w, std::size_t h) {
  if (w > img.width || h > img.height)
    throw ShapeError("center_crop: requested " + std::to_string(w) + "x" +
                     std::to_string(h) + " from " + std::to_string(img.width) +
                     "x" + std::to_string(img.height));
  Image out(w, h, img.channels);
  const std::size_t x0 = (img.width - w) / 2, y0 = (img.height - h) / 2;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < img.channels; ++c)
        out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
  return out;
}

}  // namespace stegkit
