#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stegkit/adam.hpp"
#include "stegkit/gradcheck.hpp"
#include "stegkit/nn.hpp"
#include "stegkit/rng.hpp"
#include "stegkit/tensor.hpp"

using namespace stegkit;

namespace {

Tensor<double> random_tensor(Shape shape, Rng& rng, double lo = -1,
                             double hi = 1) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.mutable_data()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("conv2d matches hand oracles") {
  // zero input stays zero through any kernel
  Rng rng(1);
  Tensor<double> zeros({1, 1, 3, 3});
  Tensor<double> k = random_tensor({2, 1, 2, 2}, rng);
  auto out = conv2d(zeros, k, 1, 0);
  for (double v : out.data()) CHECK(v == 0.0);

  // 1x1 kernel of value 2 doubles every element
  Tensor<double> x = random_tensor({1, 1, 3, 3}, rng);
  Tensor<double> two({1, 1, 1, 1}, {2.0});
  auto doubled = conv2d(x, two, 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(doubled.data()[i] == doctest::Approx(2.0 * x.data()[i]));

  // [[1,2],[3,4]] . ones(2x2) = 1+2+3+4 = 10 (hand dot product)
  Tensor<double> a({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor<double> ones({1, 1, 2, 2}, {1, 1, 1, 1});
  CHECK(conv2d(a, ones, 1, 0).item() == doctest::Approx(10.0));
}

TEST_CASE("conv2d rejects bad shapes with both shapes named") {
  Tensor<double> x({1, 2, 4, 4});
  Tensor<double> k({3, 1, 3, 3});  // channel mismatch
  CHECK_THROWS_WITH_AS(conv2d(x, k, 1, 0),
                       doctest::Contains("[1,2,4,4]"), ShapeError);
  Tensor<double> k2({3, 2, 3, 3});
  CHECK_THROWS_AS(conv2d(x, k2, 2, 0), ShapeError);  // (4-3)%2 != 0
}

TEST_CASE("conv2d is linear") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Rng r = rng.fork(trial);
    std::size_t c = 1 + r.next_below(3), h = 4 + r.next_below(5);
    std::size_t f = 1 + r.next_below(3);
    Tensor<double> x = random_tensor({1, c, h, h}, r);
    Tensor<double> y = random_tensor({1, c, h, h}, r);
    Tensor<double> k = random_tensor({f, c, 3, 3}, r);
    double alpha = r.uniform(-2, 2), beta = r.uniform(-2, 2);

    auto lhs = conv2d(add(scale(x, alpha), scale(y, beta)), k, 1, 1);
    auto rhs = add(scale(conv2d(x, k, 1, 1), alpha),
                   scale(conv2d(y, k, 1, 1), beta));
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(std::fabs(lhs.data()[i] - rhs.data()[i]) < 1e-10);
  }
}

TEST_CASE("backward hand oracles") {
  SUBCASE("d(sum(w*w))/dw = 2w") {
    Tape<double> tape;
    auto w = tape.watch(Tensor<double>({1}, {3.0}));
    tape.backward(sum(mul(w, w)));
    CHECK(w.grad()[0] == doctest::Approx(6.0));
  }
  SUBCASE("disconnected parameter gets zero gradient") {
    Tape<double> tape;
    auto w = tape.watch(Tensor<double>({1}, {3.0}));
    auto p = tape.watch(Tensor<double>({2}, {1.0, 2.0}));
    tape.backward(sum(mul(w, w)));
    CHECK(p.grad()[0] == 0.0);
    CHECK(p.grad()[1] == 0.0);
  }
  SUBCASE("leaky relu slope on the negative side") {
    Tape<double> tape;
    auto w = tape.watch(Tensor<double>({1}, {-1.0}));
    tape.backward(sum(leaky_relu(w, 0.2)));
    CHECK(w.grad()[0] == doctest::Approx(0.2));
  }
}

TEST_CASE("backward rejects non-scalar losses and double backward") {
  Tape<double> tape;
  auto w = tape.watch(Tensor<double>({2}, {1.0, 2.0}));
  auto y = mul(w, w);
  CHECK_THROWS_AS(tape.backward(y), ShapeError);

  Tape<double> tape2;
  auto w2 = tape2.watch(Tensor<double>({2}, {1.0, 2.0}));
  auto loss = sum(mul(w2, w2));
  tape2.backward(loss);
  CHECK_THROWS_AS(tape2.backward(loss), Error);
}

TEST_CASE("gradcheck passes for every layer kind") {
  Rng rng(42);

  SUBCASE("dense") {
    DenseLayer<double> layer("d", 5, 3, rng.fork(1));
    auto frag = [&](Tape<double>* t, const Tensor<double>& x) {
      return mean(mul(layer.forward(t, reshape(x, {2, 5}), false),
                      layer.forward(t, reshape(x, {2, 5}), false)));
    };
    Rng r(11);
    CHECK(grad_check(frag, random_tensor({10}, r), 1e-5) < 1e-4);
  }
  SUBCASE("conv") {
    Conv2dLayer<double> layer("c", 2, 3, 3, 1, 1, rng.fork(2));
    auto frag = [&](Tape<double>* t, const Tensor<double>& x) {
      auto h = layer.forward(t, reshape(x, {1, 2, 5, 5}), false);
      return mean(mul(h, h));
    };
    Rng r(12);
    CHECK(grad_check(frag, random_tensor({50}, r), 1e-5) < 1e-4);
  }
  SUBCASE("conv weight gradients") {
    Rng r(13);
    Tensor<double> input = random_tensor({1, 2, 5, 5}, r);
    auto frag = [&](Tape<double>* t, const Tensor<double>& w) {
      auto h = conv2d(input, reshape(w, {3, 2, 3, 3}), 1, 1);
      return mean(mul(h, h));
    };
    CHECK(grad_check(frag, random_tensor({54}, r), 1e-5) < 1e-4);
  }
  SUBCASE("tconv") {
    ConvTranspose2dLayer<double> layer("t", 2, 3, 4, 2, 1, rng.fork(3));
    auto frag = [&](Tape<double>* t, const Tensor<double>& x) {
      auto h = layer.forward(t, reshape(x, {1, 2, 4, 4}), false);
      return mean(mul(h, h));
    };
    Rng r(14);
    CHECK(grad_check(frag, random_tensor({32}, r), 1e-5) < 1e-4);
  }
  SUBCASE("batchnorm in training mode") {
    BatchNorm2dLayer<double> layer("b", 2);
    auto frag = [&](Tape<double>* t, const Tensor<double>& x) {
      auto h = layer.forward(t, reshape(x, {2, 2, 3, 3}), false, true);
      auto s = offset(sigmoid(h), -0.25);
      return mean(mul(s, s));
    };
    Rng r(15);
    CHECK(grad_check(frag, random_tensor({36}, r), 1e-5) < 1e-4);
  }
  SUBCASE("activations") {
    auto mk = [](auto op) {
      return [op](Tape<double>*, const Tensor<double>& x) {
        return mean(mul(op(x), op(x)));
      };
    };
    Rng r(16);
    // nudge away from the leaky-relu kink
    Tensor<double> probe = random_tensor({12}, r);
    for (auto& v : probe.mutable_data())
      if (std::fabs(v) < 1e-3) v += 0.01;
    CHECK(grad_check(mk([](const Tensor<double>& x) { return leaky_relu(x, 0.2); }),
                     probe, 1e-5) < 1e-4);
    CHECK(grad_check(mk([](const Tensor<double>& x) { return sigmoid(x); }),
                     probe, 1e-5) < 1e-4);
    CHECK(grad_check(mk([](const Tensor<double>& x) { return tanh(x); }),
                     probe, 1e-5) < 1e-4);
  }
  SUBCASE("concat and bias_add") {
    Rng r(17);
    Tensor<double> other = random_tensor({1, 2, 3, 3}, r);
    Tensor<double> bias = random_tensor({4}, r);
    auto frag = [&](Tape<double>* t, const Tensor<double>& x) {
      auto cat = concat_channels(reshape(x, {1, 2, 3, 3}), other);
      return mean(mul(bias_add(cat, bias), cat));
    };
    CHECK(grad_check(frag, random_tensor({18}, r), 1e-5) < 1e-4);
  }
}

TEST_CASE("adam follows the closed-form first step") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    Parameter<double> p("p", {3});
    p.value = {1.0, -2.0, 0.5};
    AdamState<double> st(3);
    adam_step(p, st, AdamHyper{});
    CHECK(p.value == std::vector<double>{1.0, -2.0, 0.5});
    CHECK(st.t == 1);
  }
  SUBCASE("first step moves by ~lr against the gradient sign") {
    // After bias correction the first update is lr*g/(|g| + eps).
    Parameter<double> p("p", {2});
    p.value = {0.0, 0.0};
    p.grad = {3.7, -0.004};
    AdamState<double> st(2);
    AdamHyper h;
    h.lr = 1e-3;
    adam_step(p, st, h);
    CHECK(p.value[0] == doctest::Approx(-1e-3).epsilon(1e-4));
    CHECK(p.value[1] == doctest::Approx(1e-3).epsilon(1e-3));
  }
  SUBCASE("parameter groups stay independent") {
    Parameter<double> a("a", {1}), b("b", {1});
    a.value = {1.0};
    b.value = {1.0};
    a.grad = {1.0};
    b.grad = {0.0};
    AdamState<double> sa(1), sb(1);
    AdamHyper h;
    adam_step(a, sa, h);
    adam_step(b, sb, h);
    CHECK(a.value[0] != 1.0);
    CHECK(b.value[0] == 1.0);
    CHECK(sb.m[0] == 0.0);
  }
  SUBCASE("size mismatch is rejected") {
    Parameter<double> p("p", {2});
    AdamState<double> st(3);
    CHECK_THROWS_AS(adam_step(p, st, AdamHyper{}), ShapeError);
  }
}

TEST_CASE("seeded initialization is bit-reproducible") {
  Conv2dLayer<double> a("c", 3, 8, 3, 1, 1, Rng(99).fork(5));
  Conv2dLayer<double> b("c", 3, 8, 3, 1, 1, Rng(99).fork(5));
  CHECK(a.weight().value == b.weight().value);

  Conv2dLayer<double> c("c", 3, 8, 3, 1, 1, Rng(99).fork(6));
  CHECK(a.weight().value != c.weight().value);
}

TEST_CASE("parameter leaves accumulate into Parameter::grad") {
  Parameter<double> w("w", {2});
  w.value = {2.0, -1.0};
  Tape<double> tape;
  auto wt = tape.leaf(w);
  tape.backward(sum(mul(wt, wt)));
  CHECK(w.grad[0] == doctest::Approx(4.0));
  CHECK(w.grad[1] == doctest::Approx(-2.0));
}

TEST_CASE("layer spec validates extents at build time") {
  CHECK(conv_out_extent(64, 4, 2, 1) == 32);
  CHECK(tconv_out_extent(32, 4, 2, 1) == 64);
  CHECK_THROWS_AS(conv_out_extent(5, 4, 2, 1), ShapeError);
  LayerSpec spec{LayerSpec::Kind::conv, 1, 1, 4, 2, 1};
  CHECK(spec.out_extent(64) == 32);
}
