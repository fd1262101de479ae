#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "stegkit/fixtures.hpp"
#include "stegkit/image.hpp"
#include "stegkit/payload.hpp"
#include "stegkit/rng.hpp"
#include "support/png_builder.hpp"

using namespace stegkit;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "stegkit_media_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_bytes(const std::string& name,
                        const std::vector<std::uint8_t>& bytes) {
  auto path = (temp_dir() / name).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  return path;
}

}  // namespace

TEST_CASE("hand-authored 2x2 RGB PNG decodes to the exact bytes") {
  // Scanlines: filter byte 0 then 3 bytes per pixel.
  std::vector<std::uint8_t> raw = {
      0, 10, 20, 30, 40, 50, 60,   // row 0: (10,20,30) (40,50,60)
      0, 70, 80, 90, 200, 150, 255 // row 1: (70,80,90) (200,150,255)
  };
  auto path = write_bytes("hand_rgb.png",
                          testsupport::build_png(2, 2, 8, 2, 0, raw));
  Image img = load_image(path);
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.channels == 3);
  CHECK(img.pixels == std::vector<std::uint8_t>{10, 20, 30, 40, 50, 60, 70,
                                                80, 90, 200, 150, 255});
}

TEST_CASE("png round-trip is byte-lossless") {
  Rng rng(5);
  for (std::size_t channels : {std::size_t(1), std::size_t(3)}) {
    Image img = noise_cover(rng, 23, 17, channels);
    auto path = (temp_dir() / ("rt" + std::to_string(channels) + ".png")).string();
    save_image(img, path);
    CHECK(load_image(path) == img);
  }
}

TEST_CASE("unsupported PNGs are rejected with the offending property") {
  SUBCASE("16-bit depth") {
    std::vector<std::uint8_t> raw(2 * (1 + 2 * 2), 0);  // 2 rows, 16-bit gray
    auto path = write_bytes("deep.png", testsupport::build_png(2, 2, 16, 0, 0, raw));
    CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("bit depth 16"),
                         UnsupportedFormat);
  }
  SUBCASE("interlaced") {
    // Adam7 pass structure differs, but the header check fires first.
    std::vector<std::uint8_t> raw(2 * (1 + 2), 0);
    auto path = write_bytes("interlaced.png",
                            testsupport::build_png(2, 2, 8, 0, 1, raw));
    CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("interlaced"),
                         UnsupportedFormat);
  }
  SUBCASE("rgba color type") {
    std::vector<std::uint8_t> raw(2 * (1 + 2 * 4), 0);
    auto path = write_bytes("rgba.png", testsupport::build_png(2, 2, 8, 6, 0, raw));
    CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("color type"),
                         UnsupportedFormat);
  }
  SUBCASE("not a png") {
    auto path = write_bytes("not.png", {1, 2, 3, 4});
    CHECK_THROWS_AS(load_image(path), UnsupportedFormat);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_image((temp_dir() / "nope.png").string()), IoError);
  }
}

TEST_CASE("normalize maps the 8-bit range onto [-1,1]") {
  Image img(2, 2, 1);
  img.pixels = {0, 255, 128, 64};
  auto t = normalize<double>(img);
  CHECK(t.shape() == Shape{1, 2, 2});
  CHECK(t.data()[0] == doctest::Approx(-1.0));
  CHECK(t.data()[1] == doctest::Approx(1.0));
  CHECK(t.data()[2] == doctest::Approx(128.0 / 127.5 - 1.0));  // 0.00392...
  CHECK(t.data()[2] == doctest::Approx(0.0039215686).epsilon(1e-6));
}

TEST_CASE("denormalize(normalize(img)) is exact for every 8-bit value") {
  Image img(16, 16, 1);
  for (int v = 0; v < 256; ++v) img.pixels[v] = static_cast<std::uint8_t>(v);
  CHECK(denormalize(normalize<double>(img)) == img);
  CHECK(denormalize(normalize<float>(img)) == img);
}

TEST_CASE("denormalize clamps out-of-range values") {
  Tensor<double> t({1, 1, 2}, {-3.0, 7.0});
  Image img = denormalize(t);
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[1] == 255);
}

TEST_CASE("bits_to_plane packs row-major with +/-1 values") {
  Bits bits = {1, 0, 1, 0};
  SecretPlane plane = bits_to_plane(bits, 2, 2, 1);
  auto t = plane.to_tensor<double>();
  CHECK(t.shape() == Shape{1, 2, 2});
  CHECK(t.data() == std::vector<double>{1, -1, 1, -1});
  CHECK(plane_to_bits(plane, 4) == bits);
}

TEST_CASE("payload codec round-trips exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Rng r = rng.fork(trial);
    std::size_t h = 1 + r.next_below(8), w = 1 + r.next_below(8);
    std::size_t bpp = 1 + r.next_below(3);
    std::size_t len = r.next_below(h * w * bpp + 1);
    BitPayload p = BitPayload::random(r, len);
    SecretPlane plane = bits_to_plane(p.bits, h, w, bpp);
    CHECK(plane_to_bits(plane, len) == p.bits);
  }
}

TEST_CASE("capacity errors carry both counts") {
  Bits bits(5, 1);
  try {
    bits_to_plane(bits, 2, 2, 1);
    FAIL("expected CapacityExceeded");
  } catch (const CapacityExceeded& e) {
    CHECK(e.needed == 5);
    CHECK(e.available == 4);
  }
}

TEST_CASE("frame header encodes the exact payload length") {
  Rng rng(3);
  BitPayload p = BitPayload::random(rng, 77);
  Bits framed = frame_bits(p.bits);
  CHECK(framed.size() == 77 + kFrameHeaderBits);
  CHECK(unframe_bits(framed, 4096) == p.bits);

  // header claiming more than capacity
  Bits bogus = frame_bits(Bits(100, 0));
  CHECK_THROWS_AS(unframe_bits(bogus, 64), MalformedHeader);
}

TEST_CASE("byte packing is MSB-first") {
  std::vector<std::uint8_t> bytes = {0b10110000, 0b00000001};
  Bits bits = bytes_to_bits(bytes);
  CHECK(bits.size() == 16);
  CHECK(bits[0] == 1);
  CHECK(bits[1] == 0);
  CHECK(bits[2] == 1);
  CHECK(bits[3] == 1);
  CHECK(bits[15] == 1);
  CHECK(bits_to_bytes(bits) == bytes);
}

TEST_CASE("image payloads serialize the raster row-major") {
  Image img(2, 1, 1);
  img.pixels = {0xAB, 0x01};
  BitPayload p = BitPayload::from_image(img);
  CHECK(p.mode == PayloadMode::image);
  REQUIRE(p.source_image.has_value());
  CHECK(p.bits == bytes_to_bits(img.pixels));
  CHECK(p.to_bytes() == img.pixels);
}

TEST_CASE("bit_error_rate counts mismatches") {
  Bits a = {0, 1, 1, 0, 1, 0, 0, 1};
  CHECK(bit_error_rate(a, a) == 0.0);
  Bits b = a;
  b[3] ^= 1;
  CHECK(bit_error_rate(a, b) == doctest::Approx(0.125));
  Bits c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] ^ 1;
  CHECK(bit_error_rate(a, c) == 1.0);
  CHECK_THROWS_AS(bit_error_rate(a, Bits(3)), ShapeError);
}

TEST_CASE("center_crop takes the middle window") {
  Image img(4, 4, 1);
  for (int i = 0; i < 16; ++i) img.pixels[i] = static_cast<std::uint8_t>(i);
  Image crop = center_crop(img, 2, 2);
  CHECK(crop.pixels == std::vector<std::uint8_t>{5, 6, 9, 10});
  CHECK_THROWS_AS(center_crop(img, 8, 2), ShapeError);
}
