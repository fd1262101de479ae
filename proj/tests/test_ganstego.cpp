#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stegkit/gradcheck.hpp"
#include "stegkit/image.hpp"
#include "stegkit/losses.hpp"
#include "stegkit/metrics.hpp"
#include "stegkit/models.hpp"
#include "stegkit/payload.hpp"
#include "stegkit/rng.hpp"

using namespace stegkit;

namespace {

NetTopology tiny_topology() {
  NetTopology t;
  t.cover_channels = 1;
  t.secret_planes = 1;
  t.gen_base = 8;
  t.disc_base = 4;
  t.disc_extent = 16;
  t.extractor_width = 4;
  t.feature_width = 4;
  return t;
}

template <typename T>
void zero_all(std::vector<Parameter<T>*> params) {
  for (auto* p : params) std::fill(p->value.begin(), p->value.end(), T(0));
}

Tensor<double> random_cover_tensor(Rng& rng, std::size_t c, std::size_t h,
                                   std::size_t w) {
  Tensor<double> t({c, h, w});
  for (auto& v : t.mutable_data()) v = rng.uniform(-1, 1);
  return t;
}

}  // namespace

TEST_CASE("generator preserves shape and the tanh range") {
  NetTopology topo = tiny_topology();
  Rng rng(1);
  GeneratorNet<double> g(topo, rng.fork(1));

  for (std::size_t extent : {std::size_t(16), std::size_t(24), std::size_t(32)}) {
    Rng r = rng.fork(extent);
    Tensor<double> cover = random_cover_tensor(r, 1, extent, extent);
    SecretPlane secret = bits_to_plane(
        BitPayload::random(r, extent * extent).bits, extent, extent, 1);
    Tensor<double> stego = generator_forward(g, cover, secret);
    CHECK(stego.shape() == cover.shape());
    for (double v : stego.data()) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("generator with all-zero weights emits tanh(0) = 0") {
  NetTopology topo = tiny_topology();
  GeneratorNet<double> g(topo, Rng(2));
  zero_all(g.parameters());
  Rng rng(3);
  Tensor<double> cover = random_cover_tensor(rng, 1, 16, 16);
  SecretPlane secret =
      bits_to_plane(BitPayload::random(rng, 256).bits, 16, 16, 1);
  Tensor<double> stego = generator_forward(g, cover, secret);
  for (double v : stego.data()) CHECK(v == 0.0);
}

TEST_CASE("generator names the required extent multiple") {
  NetTopology topo = tiny_topology();
  GeneratorNet<double> g(topo, Rng(4));
  Rng rng(5);
  Tensor<double> cover = random_cover_tensor(rng, 1, 20, 20);  // not /8
  SecretPlane secret =
      bits_to_plane(BitPayload::random(rng, 400).bits, 20, 20, 1);
  CHECK_THROWS_WITH_AS(generator_forward(g, cover, secret),
                       doctest::Contains("multiples of 8"), ShapeError);
}

TEST_CASE("discriminator outputs probabilities") {
  NetTopology topo = tiny_topology();
  Rng rng(6);
  DiscriminatorNet<double> d(topo, rng.fork(1));

  SUBCASE("zero weights give sigmoid(0) = 0.5") {
    zero_all(d.parameters());
    Tensor<double> img = random_cover_tensor(rng, 1, 16, 16);
    CHECK(discriminator_forward(d, img) == doctest::Approx(0.5));
  }
  SUBCASE("range (0,1) under random weights and inputs") {
    for (int trial = 0; trial < 20; ++trial) {
      Rng r = rng.fork(100 + trial);
      DiscriminatorNet<double> dr(topo, r);
      Tensor<double> img = random_cover_tensor(r, 1, 16, 16);
      double p = discriminator_forward(dr, img);
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
  SUBCASE("batch outputs align with per-image evaluation") {
    Rng r = rng.fork(7);
    Tensor<double> a = random_cover_tensor(r, 1, 16, 16);
    Tensor<double> b = random_cover_tensor(r, 1, 16, 16);
    Tensor<double> batch({2, 1, 16, 16});
    std::copy(a.data().begin(), a.data().end(), batch.mutable_data().begin());
    std::copy(b.data().begin(), b.data().end(),
              batch.mutable_data().begin() + a.size());
    auto out = d.forward(nullptr, batch, false, false);
    CHECK(out.shape() == Shape{2, 1});
    CHECK(out.data()[0] == doctest::Approx(discriminator_forward(d, a)));
    CHECK(out.data()[1] == doctest::Approx(discriminator_forward(d, b)));
  }
  SUBCASE("wrong extent is rejected") {
    Tensor<double> img = random_cover_tensor(rng, 1, 32, 32);
    CHECK_THROWS_AS(discriminator_forward(d, img), ShapeError);
  }
}

TEST_CASE("extractor logits and the >0 decoding rule") {
  NetTopology topo = tiny_topology();
  Rng rng(8);
  ExtractorNet<double> e(topo, rng.fork(1));

  Tensor<double> stego = random_cover_tensor(rng, 1, 16, 16);
  Tensor<double> logits = extractor_forward(e, stego);
  CHECK(logits.shape() == Shape{1, 16, 16});

  SUBCASE("zero weights decode all zeros") {
    zero_all(e.parameters());
    Tensor<double> z = extractor_forward(e, stego);
    for (double v : z.data()) CHECK(v == 0.0);
    Bits bits = logits_to_bits(z, 256);
    for (auto b : bits) CHECK(b == 0);
  }
  SUBCASE("raising a logit never flips a decoded 1 to 0") {
    Bits before = logits_to_bits(logits, 256);
    Tensor<double> raised = logits;
    for (auto& v : raised.mutable_data()) v += 0.5;
    Bits after = logits_to_bits(raised, 256);
    for (std::size_t i = 0; i < before.size(); ++i)
      if (before[i] == 1) CHECK(after[i] == 1);
  }
}

TEST_CASE("adversarial loss follows the two-term value function") {
  SUBCASE("both at 0.5 gives 2*ln(0.5)") {
    Tensor<double> half({4}, {0.5, 0.5, 0.5, 0.5});
    double v = adversarial_loss(half, half).item();
    CHECK(v == doctest::Approx(-1.3863).epsilon(1e-4));
  }
  SUBCASE("perfect discrimination approaches zero") {
    Tensor<double> real({2}, {1.0 - 1e-7, 1.0 - 1e-7});
    Tensor<double> fake({2}, {1e-7, 1e-7});
    CHECK(adversarial_loss(real, fake).item() ==
          doctest::Approx(0.0).epsilon(1e-5));
  }
  SUBCASE("clamping prevents -inf at saturated outputs") {
    Tensor<double> real({1}, {0.0});
    Tensor<double> fake({1}, {1.0});
    double v = adversarial_loss(real, fake).item();
    CHECK(std::isfinite(v));
  }
  SUBCASE("empty batch is rejected") {
    Tensor<double> empty({0});
    Tensor<double> some({1}, {0.5});
    CHECK_THROWS_AS(adversarial_loss(empty, some), ShapeError);
  }
}

TEST_CASE("reconstruction loss is the per-element mean squared error") {
  SUBCASE("saturated logits recover the target exactly, loss 0") {
    Tensor<double> targets({4}, {1, 0, 1, 1});
    Tensor<double> logits({4}, {800.0, -800.0, 800.0, 800.0});
    CHECK(reconstruction_loss(targets, logits).item() == 0.0);
  }
  SUBCASE("all-ones target vs all-zeros recovery") {
    Tensor<double> targets({3}, {1, 1, 1});
    Tensor<double> logits({3}, {-800.0, -800.0, -800.0});
    CHECK(reconstruction_loss(targets, logits).item() == doctest::Approx(1.0));
  }
  SUBCASE("logit 0 against alternating bits") {
    Tensor<double> targets({4}, {1, 0, 1, 0});
    Tensor<double> logits({4}, {0, 0, 0, 0});
    CHECK(reconstruction_loss(targets, logits).item() == doctest::Approx(0.25));
  }
  SUBCASE("shape mismatch") {
    Tensor<double> t({2}), l({3});
    CHECK_THROWS_AS(reconstruction_loss(t, l), ShapeError);
  }
}

TEST_CASE("perceptual loss") {
  NetTopology topo = tiny_topology();
  Rng rng(9);

  SUBCASE("identical inputs give zero") {
    FeatureNet<double> f(topo, rng.fork(1));
    Tensor<double> x({1, 1, 16, 16});
    for (auto& v : x.mutable_data()) v = rng.uniform(-1, 1);
    CHECK(perceptual_loss(f, x, x).item() == 0.0);
  }
  SUBCASE("identity tap equals pixel MSE") {
    FeatureNet<double> f = FeatureNet<double>::identity_net();
    Image a = Image(16, 16, 1), b = Image(16, 16, 1);
    Rng r = rng.fork(2);
    for (auto& p : a.pixels) p = static_cast<std::uint8_t>(r.next_below(256));
    for (auto& p : b.pixels) p = static_cast<std::uint8_t>(r.next_below(256));
    Tensor<double> ta = normalize<double>(a), tb = normalize<double>(b);
    ta = reshape(ta, {1, 1, 16, 16});
    tb = reshape(tb, {1, 1, 16, 16});
    // rmse is on the 0..255 lattice; normalize scales by 1/127.5
    double expected = std::pow(rmse(a, b) / 127.5, 2);
    CHECK(perceptual_loss(f, ta, tb).item() ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("zero-weight feature net is a null probe") {
    FeatureNet<double> f(topo, rng.fork(3));
    f.zero_weights();
    Tensor<double> x({1, 1, 16, 16}), y({1, 1, 16, 16});
    for (auto& v : x.mutable_data()) v = rng.uniform(-1, 1);
    for (auto& v : y.mutable_data()) v = rng.uniform(-1, 1);
    CHECK(perceptual_loss(f, x, y).item() == 0.0);
  }
  SUBCASE("fixed weights never change") {
    FeatureNet<double> f(topo, rng.fork(4));
    auto params = f.parameters();
    std::vector<double> before = params[0]->value;
    Tensor<double> x({1, 1, 16, 16}), y({1, 1, 16, 16});
    perceptual_loss(f, x, y);
    CHECK(params[0]->value == before);
  }
}

TEST_CASE("total loss composes the three terms exactly") {
  Tensor<double> adv = Tensor<double>::scalar(-1.0);
  Tensor<double> rec = Tensor<double>::scalar(0.5);
  Tensor<double> perc = Tensor<double>::scalar(0.25);

  SUBCASE("zero weights reduce to the adversarial term exactly") {
    LossWeights w{0.0, 0.0};
    CHECK(total_loss(adv, rec, perc, w).item() == -1.0);
  }
  SUBCASE("hand arithmetic") {
    LossWeights w{10.0, 2.0};
    CHECK(total_loss(adv, rec, perc, w).item() == doctest::Approx(4.5));
    CHECK(total_loss(-1.0, 0.5, 0.25, w) == doctest::Approx(4.5));
  }
  SUBCASE("affine in the rec weight with slope L_rec") {
    LossWeights w1{3.0, 1.0}, w2{4.0, 1.0};
    double l1 = total_loss(adv, rec, perc, w1).item();
    double l2 = total_loss(adv, rec, perc, w2).item();
    CHECK(l2 - l1 == doctest::Approx(0.5));
  }
  SUBCASE("decomposition: one weight zeroed equals the remaining sum") {
    LossWeights w{0.0, 2.0};
    double with_zero = total_loss(adv, rec, perc, w).item();
    CHECK(with_zero == adv.item() + 2.0 * perc.item());
  }
  SUBCASE("negative weights rejected") {
    LossWeights w{-1.0, 0.0};
    CHECK_THROWS_AS(w.validate(), ConfigError);
  }
}

TEST_CASE("gradients flow from the total loss into the generator") {
  NetTopology topo = tiny_topology();
  Rng rng(10);
  GeneratorNet<float> g(topo, rng.fork(1));
  DiscriminatorNet<float> d(topo, rng.fork(2));
  ExtractorNet<float> e(topo, rng.fork(3));
  FeatureNet<float> f(topo, rng.fork(4));

  Tensor<float> gen_in({2, 2, 16, 16});
  Tensor<float> covers({2, 1, 16, 16});
  Tensor<float> targets({2, 1, 16, 16});
  Rng r = rng.fork(5);
  auto& gi = gen_in.mutable_data();
  auto& cv = covers.mutable_data();
  auto& tg = targets.mutable_data();
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t i = 0; i < 256; ++i) {
      float v = static_cast<float>(r.uniform(-1, 1));
      cv[n * 256 + i] = v;
      gi[n * 512 + i] = v;
      int bit = r.next_bit();
      tg[n * 256 + i] = static_cast<float>(bit);
      gi[n * 512 + 256 + i] = bit ? 1.0f : -1.0f;
    }
  }

  Tape<float> tape;
  auto stego = g.forward(&tape, gen_in, true, true);
  auto d_fake = d.forward(&tape, stego, false, true);
  auto logits = e.forward(&tape, stego, false, true);
  auto loss = total_loss(generator_adversarial_loss(d_fake),
                         reconstruction_loss(targets, logits),
                         perceptual_loss(f, covers, stego), LossWeights{});
  tape.backward(loss);

  double grad_norm = 0;
  for (auto* p : g.parameters())
    for (float v : p->grad) grad_norm += double(v) * v;
  CHECK(grad_norm > 0.0);

  double e_grad = 0;
  for (auto* p : e.parameters())
    for (float v : p->grad) e_grad += double(v) * v;
  CHECK(e_grad == 0.0);  // E was frozen in this pass
}

TEST_CASE("extractor reconstruction gradients match finite differences") {
  NetTopology topo = tiny_topology();
  Rng rng(11);
  ExtractorNet<double> e(topo, rng.fork(1));
  Tensor<double> stego({1, 1, 16, 16});
  Tensor<double> targets({1, 1, 16, 16});
  Rng r = rng.fork(2);
  for (auto& v : stego.mutable_data()) v = r.uniform(-1, 1);
  for (auto& v : targets.mutable_data()) v = r.next_bit() ? 1.0 : 0.0;

  // analytic gradient for every extractor parameter
  auto& probe_param = *e.parameters()[0];
  Tape<double> tape;
  auto logits = e.forward(&tape, stego, true, true);
  auto loss = reconstruction_loss(targets, logits);
  tape.backward(loss);

  // central differences against the accumulated parameter gradient
  double eps = 1e-5;
  double worst = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(probe_param.size(), 8); ++i) {
    double orig = probe_param.value[i];
    probe_param.value[i] = orig + eps;
    double up = reconstruction_loss(
                    targets, e.forward(nullptr, stego, false, true))
                    .item();
    probe_param.value[i] = orig - eps;
    double down = reconstruction_loss(
                      targets, e.forward(nullptr, stego, false, true))
                      .item();
    probe_param.value[i] = orig;
    double numeric = (up - down) / (2 * eps);
    double analytic = probe_param.grad[i];
    double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
    worst = std::max(worst, std::fabs(numeric - analytic) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("same seed and config give bitwise-identical stego tensors") {
  NetTopology topo = tiny_topology();
  GeneratorNet<double> g1(topo, Rng(77));
  GeneratorNet<double> g2(topo, Rng(77));
  Rng rng(12);
  Tensor<double> cover = random_cover_tensor(rng, 1, 16, 16);
  SecretPlane secret =
      bits_to_plane(BitPayload::random(rng, 256).bits, 16, 16, 1);
  Tensor<double> a = generator_forward(g1, cover, secret);
  Tensor<double> b = generator_forward(g2, cover, secret);
  CHECK(a.data() == b.data());
}
