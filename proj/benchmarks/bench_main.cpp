#include <benchmark/benchmark.h>

#include "stegkit/dct.hpp"
#include "stegkit/detect.hpp"
#include "stegkit/fixtures.hpp"
#include "stegkit/lsb.hpp"
#include "stegkit/metrics.hpp"
#include "stegkit/models.hpp"
#include "stegkit/nn.hpp"
#include "stegkit/payload.hpp"
#include "stegkit/rng.hpp"

using namespace stegkit;

namespace {

Image make_cover(std::size_t extent, std::size_t channels) {
  Rng rng(7);
  return synth_cover(rng, extent, extent, channels);
}

void BM_Conv2dForward(benchmark::State& state) {
  const std::size_t c = 32, f = 64, h = state.range(0);
  Rng rng(1);
  Tensor<float> x({1, c, h, h});
  Tensor<float> w({f, c, 3, 3});
  for (auto& v : x.mutable_data()) v = static_cast<float>(rng.uniform(-1, 1));
  for (auto& v : w.mutable_data()) v = static_cast<float>(rng.uniform(-1, 1));
  for (auto _ : state) {
    auto y = conv2d(x, w, 1, 1);
    benchmark::DoNotOptimize(y.data().data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_Conv2dForward)->Arg(32)->Arg(64);

void BM_GeneratorForward(benchmark::State& state) {
  NetTopology topo;
  topo.cover_channels = 1;
  GeneratorNet<float> g(topo, Rng(3));
  const std::size_t extent = state.range(0);
  Rng rng(4);
  Tensor<float> x({1, 2, extent, extent});
  for (auto& v : x.mutable_data()) v = static_cast<float>(rng.uniform(-1, 1));
  for (auto _ : state) {
    auto y = g.forward(nullptr, x, false, false);
    benchmark::DoNotOptimize(y.data().data());
  }
}
BENCHMARK(BM_GeneratorForward)->Arg(64)->Arg(128);

void BM_LsbEmbed(benchmark::State& state) {
  Image cover = make_cover(state.range(0), 3);
  LsbParams params{4};
  Rng rng(5);
  BitPayload payload = BitPayload::random(
      rng, lsb_capacity_bits(cover, params) - kFrameHeaderBits);
  for (auto _ : state) {
    Image stego = lsb_embed(cover, payload.bits, params);
    benchmark::DoNotOptimize(stego.pixels.data());
  }
  state.SetBytesProcessed(state.iterations() * cover.pixels.size());
}
BENCHMARK(BM_LsbEmbed)->Arg(256)->Arg(512);

void BM_DctEmbed(benchmark::State& state) {
  Image cover = make_cover(state.range(0), 1);
  DctParams params = DctParams::defaults();
  Rng rng(6);
  BitPayload payload = BitPayload::random(
      rng, dct_capacity_bits(cover, params) - kFrameHeaderBits);
  for (auto _ : state) {
    Image stego = dct_embed(cover, payload.bits, params);
    benchmark::DoNotOptimize(stego.pixels.data());
  }
  state.SetBytesProcessed(state.iterations() * cover.pixels.size());
}
BENCHMARK(BM_DctEmbed)->Arg(256)->Arg(512);

void BM_Ssim(benchmark::State& state) {
  Image a = make_cover(state.range(0), 1);
  Image b = a;
  b.pixels[0] ^= 1;
  for (auto _ : state) {
    double s = ssim(a, b);
    benchmark::DoNotOptimize(s);
  }
  state.SetBytesProcessed(state.iterations() * a.pixels.size());
}
BENCHMARK(BM_Ssim)->Arg(256)->Arg(512);

void BM_ChiSquareScore(benchmark::State& state) {
  Image img = make_cover(state.range(0), 1);
  for (auto _ : state) {
    double s = chi_square_lsb_score(img);
    benchmark::DoNotOptimize(s);
  }
  state.SetBytesProcessed(state.iterations() * img.pixels.size());
}
BENCHMARK(BM_ChiSquareScore)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
