#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "stegkit/fixtures.hpp"
#include "stegkit/metrics.hpp"
#include "stegkit/rng.hpp"

using namespace stegkit;

namespace {

Image constant_image(std::size_t w, std::size_t h, std::uint8_t v) {
  Image img(w, h, 1);
  std::fill(img.pixels.begin(), img.pixels.end(), v);
  return img;
}

}  // namespace

TEST_CASE("psnr hand oracles") {
  Rng rng(1);
  Image img = synth_cover(rng, 16, 16, 1);
  CHECK(std::isinf(psnr(img, img)));

  Image black = constant_image(8, 8, 0);
  Image white = constant_image(8, 8, 255);
  CHECK(psnr(black, white) == doctest::Approx(0.0));

  // 2x2 gray, one pixel off by one: MSE = 1/4, PSNR = 10*log10(255^2*4)
  Image a = constant_image(2, 2, 100);
  Image b = a;
  b.pixels[2] = 101;
  double expected = 10.0 * std::log10(255.0 * 255.0 / 0.25);
  CHECK(expected == doctest::Approx(54.1514).epsilon(1e-4));
  CHECK(psnr(a, b) == doctest::Approx(expected));
}

TEST_CASE("rmse and mae hand oracles") {
  Image a = constant_image(2, 2, 10);
  CHECK(rmse(a, a) == 0.0);
  CHECK(mae(a, a) == 0.0);

  Image b = constant_image(2, 2, 13);  // every pixel differs by 3
  CHECK(rmse(a, b) == doctest::Approx(3.0));

  Image c = a;
  c.pixels = {10, 10, 10, 14};  // diffs (0,0,0,4) -> sqrt(16/4) = 2
  CHECK(rmse(a, c) == doctest::Approx(2.0));

  Image d = a;
  d.pixels = {11, 13, 10, 10};  // |diffs| (1,3,0,0) over 4 pixels
  CHECK(mae(a, d) == doctest::Approx(1.0));
  Image e = constant_image(2, 2, 15);
  CHECK(mae(a, e) == doctest::Approx(5.0));
}

TEST_CASE("ssim hand oracles") {
  Rng rng(2);
  Image img = synth_cover(rng, 32, 32, 1);
  CHECK(ssim(img, img) == doctest::Approx(1.0));

  Image flat_a = constant_image(16, 16, 77);
  CHECK(ssim(flat_a, flat_a) == doctest::Approx(1.0));  // C-stabilized 0/0

  // constant 0 vs constant 255: luminance term C1/(255^2 + C1), rest 1
  Image black = constant_image(16, 16, 0);
  Image white = constant_image(16, 16, 255);
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  double expected = c1 / (255.0 * 255.0 + c1);
  CHECK(expected == doctest::Approx(1.0e-4).epsilon(0.01));
  CHECK(ssim(black, white) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ssim rejects images smaller than the window") {
  Image tiny = constant_image(8, 8, 0);
  CHECK_THROWS_AS(ssim(tiny, tiny), ShapeError);
}

TEST_CASE("metrics reject dimension mismatches") {
  Image a = constant_image(4, 4, 0);
  Image b = constant_image(5, 4, 0);
  CHECK_THROWS_AS(psnr(a, b), ShapeError);
  CHECK_THROWS_AS(rmse(a, b), ShapeError);
  CHECK_THROWS_AS(mae(a, b), ShapeError);
  CHECK_THROWS_AS(ssim(a, b), ShapeError);
}

TEST_CASE("metric invariants on random pairs") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Rng r = rng.fork(trial);
    std::size_t ch = r.next_bit() ? 1 : 3;
    Image a = noise_cover(r, 16, 16, ch);
    Image b = noise_cover(r, 16, 16, ch);

    CHECK(rmse(a, b) >= mae(a, b));
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    CHECK(rmse(a, b) == rmse(b, a));
    CHECK(mae(a, b) == mae(b, a));
    double s = ssim(a, b);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("psnr strictly decreases as MSE grows") {
  Image base = constant_image(16, 16, 100);
  double last = std::numeric_limits<double>::infinity();
  for (int off = 1; off <= 30; off += 3) {
    Image moved = constant_image(16, 16, static_cast<std::uint8_t>(100 + off));
    double p = psnr(base, moved);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("identity iff all metrics at their extremes") {
  Rng rng(4);
  Image a = synth_cover(rng, 16, 16, 3);
  MetricsReport same = compute_metrics(a, a, PairKind::cover_stego);
  CHECK(std::isinf(same.psnr_db));
  CHECK(same.ssim == doctest::Approx(1.0));
  CHECK(same.rmse == 0.0);
  CHECK(same.mae == 0.0);

  Image b = a;
  b.pixels[0] ^= 1;
  MetricsReport diff = compute_metrics(a, b, PairKind::secret_recovered);
  CHECK(!std::isinf(diff.psnr_db));
  CHECK(diff.rmse > 0.0);
  CHECK(diff.mae > 0.0);
  CHECK(diff.pair_kind == PairKind::secret_recovered);
}
