#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "stegkit/bench.hpp"
#include "stegkit/detect.hpp"
#include "stegkit/fixtures.hpp"
#include "stegkit/lsb.hpp"
#include "stegkit/rng.hpp"
#include "stegkit/util.hpp"

using namespace stegkit;

namespace {

namespace fs = std::filesystem;

Image lsb1_stego(const Image& cover, Rng& rng) {
  LsbParams p{1};
  BitPayload payload =
      BitPayload::random(rng, lsb_capacity_bits(cover, p) - kFrameHeaderBits);
  return lsb_embed(cover, payload.bits, p);
}

std::string fixture_dataset(std::size_t count, std::size_t extent,
                            std::size_t channels, std::uint64_t seed) {
  fs::path dir = fs::temp_directory_path() /
                 ("stegkit_bench_ds_" + std::to_string(extent) + "_" +
                  std::to_string(channels) + "_" + std::to_string(seed));
  if (!fs::exists(dir))
    write_fixture_dataset(dir.string(), count, extent, extent, channels, seed);
  return dir.string();
}

}  // namespace

TEST_CASE("chi-square separates pristine covers from full LSB stegos") {
  Rng rng(1);
  int stego_high = 0, cover_low = 0;
  const int n = 10;
  for (int i = 0; i < n; ++i) {
    Rng r = rng.fork(i);
    Image cover = synth_cover(r, 256, 256, 1);
    double cover_score = chi_square_lsb_score(cover);
    double stego_score = chi_square_lsb_score(lsb1_stego(cover, r));
    cover_low += cover_score < 0.1;
    stego_high += stego_score > 0.9;
  }
  CHECK(stego_high >= 9);
  CHECK(cover_low >= 9);
}

TEST_CASE("chi-square degenerate input rule") {
  Image single(1, 1, 1);
  single.pixels[0] = 137;
  CHECK(chi_square_lsb_score(single) == 0.0);
  Image empty;
  CHECK_THROWS_AS(chi_square_lsb_score(empty), ShapeError);
}

TEST_CASE("balanced accuracy oracles") {
  Rng rng(2);
  std::vector<Image> covers, stegos;
  for (int i = 0; i < 10; ++i) {
    Rng r = rng.fork(i);
    covers.push_back(synth_cover(r, 32, 32, 1));
    stegos.push_back(lsb1_stego(covers.back(), r));
  }

  SUBCASE("oracle detector scores 1.0") {
    // Labels are known through object identity: score by membership.
    auto oracle = [&](const Image& img) {
      for (const auto& s : stegos)
        if (s == img) return 1.0;
      return 0.0;
    };
    CHECK(detection_accuracy(oracle, covers, stegos, 0.5) == 1.0);
  }
  SUBCASE("constant 'always cover' detector scores 0.5") {
    auto constant = [](const Image&) { return 0.0; };
    CHECK(detection_accuracy(constant, covers, stegos, 0.5) == 0.5);
  }
  SUBCASE("fair coin stays within 3 sigma of 0.5") {
    std::vector<Image> many_covers(500, covers[0]), many_stegos(500, stegos[0]);
    Rng coin(3);
    auto flip = [&coin](const Image&) { return coin.next_bit() ? 1.0 : 0.0; };
    double acc = detection_accuracy(flip, many_covers, many_stegos, 0.5);
    // per-class sd = 0.5/sqrt(500); averaged sd ~ 0.0158; 3 sigma ~ 0.047
    CHECK(std::fabs(acc - 0.5) < 0.047 * 1.5);
  }
  SUBCASE("empty sets are rejected") {
    std::vector<Image> none;
    auto zero = [](const Image&) { return 0.0; };
    CHECK_THROWS_AS(detection_accuracy(zero, none, stegos, 0.5), ShapeError);
  }
}

TEST_CASE("label swap maps accuracy to its complement") {
  Rng rng(4);
  std::vector<Image> a, b;
  for (int i = 0; i < 8; ++i) {
    Rng r = rng.fork(i);
    a.push_back(synth_cover(r, 64, 64, 1));
    b.push_back(lsb1_stego(a.back(), r));
  }
  Detector chi = Detector::chi_square();
  double acc = detection_accuracy(chi, a, b, 0.5);
  double swapped = detection_accuracy(chi, b, a, 0.5);
  CHECK(acc + swapped == doctest::Approx(1.0));
}

TEST_CASE("method spec parsing") {
  MethodSpec lsb = MethodSpec::parse("lsb:k=4");
  CHECK(lsb.kind == MethodSpec::Kind::lsb);
  CHECK(lsb.lsb.k == 4);
  CHECK(lsb.label() == "lsb:k=4");

  MethodSpec dct = MethodSpec::parse("dct:delta=12");
  CHECK(dct.kind == MethodSpec::Kind::dct);
  CHECK(dct.dct.delta == 12.0);

  MethodSpec gan = MethodSpec::parse("gan:checkpoint=/tmp/x.sgf1");
  CHECK(gan.kind == MethodSpec::Kind::gan);
  CHECK(gan.checkpoint == "/tmp/x.sgf1");

  CHECK_THROWS_AS(MethodSpec::parse("rot13"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("lsb:k=9"), ConfigError);
  CHECK_THROWS_AS(MethodSpec::parse("lsb:delta=8"), ConfigError);
}

TEST_CASE("benchmark reproduces the closed-form LSB distortion") {
  std::string ds = fixture_dataset(6, 128, 3, 501);
  // uniform-noise covers for the closed-form check
  fs::path noise_dir = fs::temp_directory_path() / "stegkit_bench_noise";
  if (!fs::exists(noise_dir)) {
    fs::create_directories(noise_dir);
    Rng rng(77);
    for (int i = 0; i < 6; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "n%02d.png", i);
      save_image(noise_cover(rng, 256, 256, 3), (noise_dir / name).string());
    }
  }

  BenchConfig config;
  config.payload_mode = PayloadMode::bitstream;  // full-capacity random bits
  BenchReport report = run_benchmark(
      noise_dir.string(), {MethodSpec::parse("lsb:k=4")}, config);
  REQUIRE(report.cells.size() == 1);
  const auto& cell = report.cells[0];
  CHECK(cell.n == 6);
  CHECK(cell.failures == 0);
  double expected = 10.0 * std::log10(255.0 * 255.0 * 6.0 / 255.0);  // 31.85
  CHECK(cell.cover_stego.psnr == doctest::Approx(expected).epsilon(0.3 / expected));
  CHECK(ds != noise_dir.string());
}

TEST_CASE("benchmark with no methods yields metadata only") {
  std::string ds = fixture_dataset(3, 64, 1, 502);
  BenchReport report = run_benchmark(ds, {}, BenchConfig{});
  CHECK(report.cells.empty());
  CHECK(!report.config_hash.empty());
  CHECK(report.seed == 42);
}

TEST_CASE("benchmark runs are deterministic and reversible") {
  std::string ds = fixture_dataset(4, 64, 1, 503);
  std::vector<MethodSpec> methods = {MethodSpec::parse("lsb:k=2"),
                                     MethodSpec::parse("dct:delta=8")};
  BenchConfig config;
  BenchReport r1 = run_benchmark(ds, methods, config);
  BenchReport r2 = run_benchmark(ds, methods, config);
  CHECK(report_csv(r1) == report_csv(r2));
  CHECK(report_json(r1) == report_json(r2));

  // round-trip through JSON preserves everything
  BenchReport parsed = parse_report_json(report_json(r1));
  CHECK(parsed == r1);
}

TEST_CASE("csv and json encode identical values") {
  std::string ds = fixture_dataset(4, 64, 1, 504);
  BenchReport report =
      run_benchmark(ds, {MethodSpec::parse("lsb:k=1")}, BenchConfig{});
  std::string csv = report_csv(report);
  BenchReport parsed = parse_report_json(report_json(report));

  // walk csv rows and compare each value against the parsed JSON cell
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "dataset,method,metric,pair_kind,value,best_flag,n");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      auto c = line.find(',', pos);
      f.push_back(line.substr(pos, c == std::string::npos ? std::string::npos
                                                          : c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    REQUIRE(f.size() == 7);
    const auto& cell = parsed.cells[0];
    double value = parse_double(f[4]);
    const PairMeans& m = f[3] == "cover/stego" ? cell.cover_stego
                                               : cell.secret_recovered;
    if (f[2] == "ssim") CHECK(value == m.ssim);
    if (f[2] == "psnr") CHECK(value == m.psnr);
    if (f[2] == "rmse") CHECK(value == m.rmse);
    if (f[2] == "mae") CHECK(value == m.mae);
    if (f[2] == "detect_acc") CHECK(value == cell.detect_acc);
  }
  CHECK(rows >= 9);  // 2 pair kinds x 4 metrics + detection
}

TEST_CASE("best flags honor metric direction") {
  std::string ds = fixture_dataset(4, 64, 1, 505);
  std::vector<MethodSpec> methods = {MethodSpec::parse("lsb:k=1"),
                                     MethodSpec::parse("lsb:k=4")};
  BenchReport report = run_benchmark(ds, methods, BenchConfig{});
  // k=1 perturbs less: it must win cover/stego psnr (higher better) and
  // rmse (lower better).
  std::istringstream in(report_csv(report));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.find("cover/stego") == std::string::npos) continue;
    bool is_k1 = line.find("lsb:k=1") != std::string::npos;
    bool best = line.find(",1,") != std::string::npos;
    if (line.find("psnr") != std::string::npos) CHECK(is_k1 == best);
    if (line.find("rmse") != std::string::npos) CHECK(is_k1 == best);
  }
}

TEST_CASE("identical recovery serializes psnr as inf") {
  std::string ds = fixture_dataset(3, 128, 1, 506);
  BenchReport report =
      run_benchmark(ds, {MethodSpec::parse("lsb:k=4")}, BenchConfig{});
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].has_secret_recovered);
  CHECK(std::isinf(report.cells[0].secret_recovered.psnr));
  CHECK(report_csv(report).find(",inf,") != std::string::npos);
  CHECK(report_json(report).find("\"inf\"") != std::string::npos);
  BenchReport parsed = parse_report_json(report_json(report));
  CHECK(std::isinf(parsed.cells[0].secret_recovered.psnr));
}

TEST_CASE("reference rows are labeled and never measured") {
  std::string ds = fixture_dataset(3, 64, 1, 507);
  BenchConfig config;
  config.include_references = true;
  BenchReport report =
      run_benchmark(ds, {MethodSpec::parse("lsb:k=1")}, config);
  std::size_t refs = 0;
  for (const auto& c : report.cells)
    if (c.reference) {
      ++refs;
      CHECK(c.method.find("paper-reported") != std::string::npos);
      CHECK(c.n == 0);
      CHECK(!c.has_detection);
      CHECK(c.has_secret_recovered);
    }
  CHECK(refs == 6);
}

TEST_CASE("emit_report writes both files atomically") {
  std::string ds = fixture_dataset(3, 64, 1, 508);
  BenchReport report =
      run_benchmark(ds, {MethodSpec::parse("lsb:k=1")}, BenchConfig{});
  auto out = fs::temp_directory_path() / "stegkit_report_out";
  fs::remove_all(out);
  emit_report(report, out.string(), true, true);
  CHECK(fs::exists(out / "report.csv"));
  CHECK(fs::exists(out / "report.json"));
  auto json_text = read_file_bytes((out / "report.json").string());
  BenchReport parsed = parse_report_json(
      std::string(json_text.begin(), json_text.end()));
  CHECK(parsed == report);
}

TEST_CASE("cnn detector learns to spot 4-bit LSB") {
  // Needs texture diversity to generalize past the training pairs; with a
  // few dozen pairs the classifier memorizes covers instead.
  Rng rng(6);
  std::vector<Image> covers, stegos;
  for (int i = 0; i < 420; ++i) {
    Rng r = rng.fork(i);
    Image cover = synth_cover(r, 32, 32, 1);
    LsbParams p{4};
    BitPayload payload = BitPayload::random(
        r, lsb_capacity_bits(cover, p) - kFrameHeaderBits);
    stegos.push_back(lsb_embed(cover, payload.bits, p));
    covers.push_back(std::move(cover));
  }
  std::vector<Image> train_c(covers.begin(), covers.begin() + 384);
  std::vector<Image> train_s(stegos.begin(), stegos.begin() + 384);
  std::vector<Image> test_c(covers.begin() + 384, covers.end());
  std::vector<Image> test_s(stegos.begin() + 384, stegos.end());

  auto ckpt = (fs::temp_directory_path() / "stegkit_cnn_det.sgf1").string();
  train_cnn_detector(train_c, train_s, 32, 2000, 8, 11, ckpt);
  Detector cnn = Detector::cnn_from_checkpoint(ckpt);
  CHECK(cnn.name() == "cnn-classifier");
  double acc = detection_accuracy(cnn, test_c, test_s, 0.5);
  CHECK(acc >= 0.8);
}
