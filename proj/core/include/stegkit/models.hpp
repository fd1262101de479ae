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
#include <vector>

#include "stegkit/nn.hpp"
#include "stegkit/payload.hpp"
#include "stegkit/rng.hpp"
#include "stegkit/tensor.hpp"

namespace stegkit {

/// Widths and channel counts for the three networks plus the fixed feature
/// extractor. Sized for desk-scale 64x64 training.
struct NetTopology {
  std::size_t cover_channels = 1;
  std::size_t secret_planes = 1;  // bits per pixel
  std::size_t gen_base = 32;
  std::size_t disc_base = 16;
  std::size_t disc_extent = 64;  // input extent the classifier head is sized for
  std::size_t extractor_width = 16;
  std::size_t feature_width = 8;
  double feature_gain = 1.4;
};

namespace detail {
inline void require_multiple(std::size_t h, std::size_t w, std::size_t mult,
                             const char* net) {
  if (h % mult != 0 || w % mult != 0 || h == 0 || w == 0)
    throw ShapeError(std::string(net) + ": extents must be positive multiples of " +
                     std::to_string(mult) + ", got " + std::to_string(h) +
                     "x" + std::to_string(w));
}
}  // namespace detail

/// U-Net generator: three stride-2 encoder stages, mirrored decoder with
/// skip connections, input-level skip into a 3x3 head, tanh output. Input is
/// the cover concatenated with the secret planes; output has cover channels
/// and values in [-1,1]. Extents must be multiples of 8.
template <typename T>
class GeneratorNet {
public:
  GeneratorNet(const NetTopology& topo, Rng rng)
      : in_ch_(topo.cover_channels + topo.secret_planes),
        out_ch_(topo.cover_channels),
        e1_("g.e1", in_ch_, topo.gen_base, 4, 2, 1, rng.fork(1)),
        e2_("g.e2", topo.gen_base, topo.gen_base * 2, 4, 2, 1, rng.fork(2)),
        e3_("g.e3", topo.gen_base * 2, topo.gen_base * 4, 4, 2, 1, rng.fork(3)),
        bn_e2_("g.bn_e2", topo.gen_base * 2),
        bn_e3_("g.bn_e3", topo.gen_base * 4),
        d3_("g.d3", topo.gen_base * 4, topo.gen_base * 2, 4, 2, 1, rng.fork(4)),
        d2_("g.d2", topo.gen_base * 4, topo.gen_base, 4, 2, 1, rng.fork(5)),
        d1_("g.d1", topo.gen_base * 2, topo.gen_base / 2, 4, 2, 1, rng.fork(6)),
        bn_d3_("g.bn_d3", topo.gen_base * 2),
        bn_d2_("g.bn_d2", topo.gen_base),
        bn_d1_("g.bn_d1", topo.gen_base / 2),
        head_("g.head", topo.gen_base / 2 + in_ch_, out_ch_, 3, 1, 1,
              rng.fork(7)) {}

  static constexpr std::size_t required_multiple() { return 8; }

  /// x: [N, cover+planes, H, W] -> [N, cover, H, W].
  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params,
                    bool bn_training) {
    if (x.ndim() != 4 || x.dim(1) != in_ch_)
      throw ShapeError("generator: expected [N," + std::to_string(in_ch_) +
                       ",H,W], got " + shape_str(x.shape()));
    detail::require_multiple(x.dim(2), x.dim(3), required_multiple(),
                             "generator");
    auto a1 = leaky_relu(e1_.forward(tape, x, watch_params));
    auto a2 = leaky_relu(bn_e2_.forward(
        tape, e2_.forward(tape, a1, watch_params), watch_params, bn_training));
    auto a3 = leaky_relu(bn_e3_.forward(
        tape, e3_.forward(tape, a2, watch_params), watch_params, bn_training));
    auto u3 = leaky_relu(bn_d3_.forward(
        tape, d3_.forward(tape, a3, watch_params), watch_params, bn_training));
    auto u2 = leaky_relu(bn_d2_.forward(
        tape, d2_.forward(tape, concat_channels(u3, a2), watch_params),
        watch_params, bn_training));
    auto u1 = leaky_relu(bn_d1_.forward(
        tape, d1_.forward(tape, concat_channels(u2, a1), watch_params),
        watch_params, bn_training));
    return tanh(head_.forward(tape, concat_channels(u1, x), watch_params));
  }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    e1_.collect(out);
    e2_.collect(out);
    e3_.collect(out);
    bn_e2_.collect(out);
    bn_e3_.collect(out);
    d3_.collect(out);
    d2_.collect(out);
    d1_.collect(out);
    bn_d3_.collect(out);
    bn_d2_.collect(out);
    bn_d1_.collect(out);
    head_.collect(out);
    return out;
  }

  std::vector<Parameter<T>*> buffers() {
    std::vector<Parameter<T>*> out;
    bn_e2_.collect_buffers(out);
    bn_e3_.collect_buffers(out);
    bn_d3_.collect_buffers(out);
    bn_d2_.collect_buffers(out);
    bn_d1_.collect_buffers(out);
    return out;
  }

  std::size_t input_channels() const { return in_ch_; }
  std::size_t output_channels() const { return out_ch_; }

private:
  std::size_t in_ch_, out_ch_;
  Conv2dLayer<T> e1_, e2_, e3_;
  BatchNorm2dLayer<T> bn_e2_, bn_e3_;
  ConvTranspose2dLayer<T> d3_, d2_, d1_;
  BatchNorm2dLayer<T> bn_d3_, bn_d2_, bn_d1_;
  Conv2dLayer<T> head_;
};

/// Binary cover/stego classifier: four stride-2 conv blocks (batchnorm +
/// leaky ReLU from the second block on) and a dense head with sigmoid
/// output in (0,1), interpreted as P(cover).
template <typename T>
class DiscriminatorNet {
public:
  DiscriminatorNet(const NetTopology& topo, Rng rng)
      : extent_(topo.disc_extent),
        c1_("d.c1", topo.cover_channels, topo.disc_base, 4, 2, 1, rng.fork(1)),
        c2_("d.c2", topo.disc_base, topo.disc_base * 2, 4, 2, 1, rng.fork(2)),
        c3_("d.c3", topo.disc_base * 2, topo.disc_base * 4, 4, 2, 1,
            rng.fork(3)),
        c4_("d.c4", topo.disc_base * 4, topo.disc_base * 8, 4, 2, 1,
            rng.fork(4)),
        bn2_("d.bn2", topo.disc_base * 2),
        bn3_("d.bn3", topo.disc_base * 4),
        bn4_("d.bn4", topo.disc_base * 8),
        fc_("d.fc",
            topo.disc_base * 8 * (topo.disc_extent / 16) *
                (topo.disc_extent / 16),
            1, rng.fork(5)) {
    detail::require_multiple(extent_, extent_, required_multiple(),
                             "discriminator");
  }

  static constexpr std::size_t required_multiple() { return 16; }
  std::size_t extent() const { return extent_; }

  /// x: [N, C, extent, extent] -> [N, 1] probabilities.
  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params,
                    bool bn_training) {
    if (x.ndim() != 4 || x.dim(2) != extent_ || x.dim(3) != extent_)
      throw ShapeError("discriminator: classifier head is sized for " +
                       std::to_string(extent_) + "x" + std::to_string(extent_) +
                       " inputs, got " + shape_str(x.shape()));
    auto h = leaky_relu(c1_.forward(tape, x, watch_params));
    h = leaky_relu(bn2_.forward(tape, c2_.forward(tape, h, watch_params),
                                watch_params, bn_training));
    h = leaky_relu(bn3_.forward(tape, c3_.forward(tape, h, watch_params),
                                watch_params, bn_training));
    h = leaky_relu(bn4_.forward(tape, c4_.forward(tape, h, watch_params),
                                watch_params, bn_training));
    auto flat = reshape(h, {h.dim(0), h.dim(1) * h.dim(2) * h.dim(3)});
    return sigmoid(fc_.forward(tape, flat, watch_params));
  }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    c1_.collect(out);
    c2_.collect(out);
    c3_.collect(out);
    c4_.collect(out);
    bn2_.collect(out);
    bn3_.collect(out);
    bn4_.collect(out);
    fc_.collect(out);
    return out;
  }

  std::vector<Parameter<T>*> buffers() {
    std::vector<Parameter<T>*> out;
    bn2_.collect_buffers(out);
    bn3_.collect_buffers(out);
    bn4_.collect_buffers(out);
    return out;
  }

private:
  std::size_t extent_;
  Conv2dLayer<T> c1_, c2_, c3_, c4_;
  BatchNorm2dLayer<T> bn2_, bn3_, bn4_;
  DenseLayer<T> fc_;
};

/// Lightweight extractor: five same-extent 3x3 conv layers mapping the stego
/// tensor to secret-plane logits [N, planes, H, W]. A recovered bit is 1 iff
/// its logit is > 0.
template <typename T>
class ExtractorNet {
public:
  ExtractorNet(const NetTopology& topo, Rng rng)
      : planes_(topo.secret_planes),
        c1_("e.c1", topo.cover_channels, topo.extractor_width, 3, 1, 1,
            rng.fork(1)),
        c2_("e.c2", topo.extractor_width, topo.extractor_width, 3, 1, 1,
            rng.fork(2)),
        c3_("e.c3", topo.extractor_width, topo.extractor_width, 3, 1, 1,
            rng.fork(3)),
        c4_("e.c4", topo.extractor_width, topo.extractor_width, 3, 1, 1,
            rng.fork(4)),
        c5_("e.c5", topo.extractor_width, topo.secret_planes, 3, 1, 1,
            rng.fork(5)),
        bn2_("e.bn2", topo.extractor_width),
        bn3_("e.bn3", topo.extractor_width),
        bn4_("e.bn4", topo.extractor_width) {}

  /// x: [N, C, H, W] -> logits [N, planes, H, W].
  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params,
                    bool bn_training) {
    auto h = leaky_relu(c1_.forward(tape, x, watch_params));
    h = leaky_relu(bn2_.forward(tape, c2_.forward(tape, h, watch_params),
                                watch_params, bn_training));
    h = leaky_relu(bn3_.forward(tape, c3_.forward(tape, h, watch_params),
                                watch_params, bn_training));
    h = leaky_relu(bn4_.forward(tape, c4_.forward(tape, h, watch_params),
                                watch_params, bn_training));
    return c5_.forward(tape, h, watch_params);
  }

  std::size_t planes() const { return planes_; }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    c1_.collect(out);
    c2_.collect(out);
    c3_.collect(out);
    c4_.collect(out);
    c5_.collect(out);
    bn2_.collect(out);
    bn3_.collect(out);
    bn4_.collect(out);
    return out;
  }

  std::vector<Parameter<T>*> buffers() {
    std::vector<Parameter<T>*> out;
    bn2_.collect_buffers(out);
    bn3_.collect_buffers(out);
    bn4_.collect_buffers(out);
    return out;
  }

private:
  std::size_t planes_;
  Conv2dLayer<T> c1_, c2_, c3_, c4_, c5_;
  BatchNorm2dLayer<T> bn2_, bn3_, bn4_;
};

/// Fixed feature extractor standing in for a pretrained backbone: six 3x3
/// convs with leaky ReLU, taps after layers 2, 4 and 6. Weights are
/// orthogonalized random filters scaled by `feature_gain` and never train,
/// so feature distances are repeatable functions of the seed. Absolute
/// values are not comparable with VGG-based perceptual losses.
template <typename T>
class FeatureNet {
public:
  FeatureNet(const NetTopology& topo, Rng rng) : identity_(false) {
    const std::size_t w = topo.feature_width;
    layers_.reserve(6);
    layers_.emplace_back("f.c1", topo.cover_channels, w, 3, 1, 1, rng.fork(1));
    for (int i = 2; i <= 6; ++i)
      layers_.emplace_back("f.c" + std::to_string(i), w, w, 3, 1, 1,
                           rng.fork(static_cast<std::uint64_t>(i)));
    for (auto& l : layers_) orthogonalize(l.weight(), topo.feature_gain);
  }

  /// Degenerate configuration passing the input through as the only tap;
  /// the perceptual distance then equals pixel-space MSE.
  static FeatureNet identity_net() { return FeatureNet(IdentityTag{}); }

  /// Taps for x: [N, C, H, W]. The weights never join a tape; gradients
  /// still flow through the convolutions into x.
  std::vector<Tensor<T>> taps(const Tensor<T>& x) {
    if (identity_) return {x};
    std::vector<Tensor<T>> out;
    Tensor<T> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      h = leaky_relu(layers_[i].forward(nullptr, h, false));
      if (i % 2 == 1) out.push_back(h);
    }
    return out;
  }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    for (auto& l : layers_) l.collect(out);
    return out;
  }

  /// Zeroes every weight; taps become identically zero (negative control).
  void zero_weights() {
    for (auto& l : layers_) {
      std::fill(l.weight().value.begin(), l.weight().value.end(), T(0));
      std::fill(l.bias().value.begin(), l.bias().value.end(), T(0));
    }
  }

private:
  struct IdentityTag {};
  explicit FeatureNet(IdentityTag) : identity_(true) {}

  // Gram-Schmidt over the [F, C*k*k] filter rows, scaled by gain. Rows that
  // cancel numerically fall back to their original direction normalized.
  static void orthogonalize(Parameter<T>& w, double gain) {
    const std::size_t f = w.shape[0];
    const std::size_t d = w.size() / f;
    for (std::size_t i = 0; i < f; ++i) {
      T* row = w.value.data() + i * d;
      for (std::size_t j = 0; j < i && j < d; ++j) {
        const T* prev = w.value.data() + j * d;
        T dot = 0;
        for (std::size_t k = 0; k < d; ++k) dot += row[k] * prev[k];
        for (std::size_t k = 0; k < d; ++k) row[k] -= dot * prev[k];
      }
      T norm = 0;
      for (std::size_t k = 0; k < d; ++k) norm += row[k] * row[k];
      norm = std::sqrt(norm);
      if (norm < T(1e-8)) norm = T(1);
      for (std::size_t k = 0; k < d; ++k) row[k] /= norm;
    }
    for (auto& v : w.value) v *= static_cast<T>(gain);
  }

  bool identity_;
  std::vector<Conv2dLayer<T>> layers_;
};

/// The three trainable networks plus the fixed feature net, all derived from
/// one topology and one seed.
template <typename T>
struct ModelBundle {
  NetTopology topology;
  GeneratorNet<T> generator;
  DiscriminatorNet<T> discriminator;
  ExtractorNet<T> extractor;
  FeatureNet<T> features;

  ModelBundle(const NetTopology& topo, Rng rng)
      : topology(topo),
        generator(topo, rng.fork(101)),
        discriminator(topo, rng.fork(102)),
        extractor(topo, rng.fork(103)),
        features(topo, rng.fork(104)) {}
};

// ---------------------------------------------------------------------------
// Single-image inference entry points.

/// stego = G(cover, secret); cover [C,H,W] in [-1,1], extents multiples of 8.
template <typename T>
Tensor<T> generator_forward(GeneratorNet<T>& g, const Tensor<T>& cover,
                            const SecretPlane& secret) {
  if (cover.ndim() != 3)
    throw ShapeError("generator_forward: expected [C,H,W], got " +
                     shape_str(cover.shape()));
  if (secret.height != cover.dim(1) || secret.width != cover.dim(2))
    throw ShapeError("generator_forward: secret plane " +
                     std::to_string(secret.height) + "x" +
                     std::to_string(secret.width) +
                     " does not match cover " + shape_str(cover.shape()));
  Tensor<T> x({1, cover.dim(0) + secret.planes, cover.dim(1), cover.dim(2)});
  auto& d = x.mutable_data();
  std::copy(cover.data().begin(), cover.data().end(), d.begin());
  auto plane = secret.template to_tensor<T>();
  std::copy(plane.data().begin(), plane.data().end(),
            d.begin() + cover.size());
  Tensor<T> y = g.forward(nullptr, x, false, false);
  return reshape(y, {y.dim(1), y.dim(2), y.dim(3)});
}

/// Scalar P(cover) for one image tensor.
template <typename T>
double discriminator_forward(DiscriminatorNet<T>& d, const Tensor<T>& image) {
  if (image.ndim() != 3)
    throw ShapeError("discriminator_forward: expected [C,H,W], got " +
                     shape_str(image.shape()));
  Tensor<T> x({1, image.dim(0), image.dim(1), image.dim(2)}, image.data());
  return static_cast<double>(d.forward(nullptr, x, false, false).item());
}

/// Secret-plane logits [planes,H,W] for one stego tensor.
template <typename T>
Tensor<T> extractor_forward(ExtractorNet<T>& e, const Tensor<T>& stego) {
  if (stego.ndim() != 3)
    throw ShapeError("extractor_forward: expected [C,H,W], got " +
                     shape_str(stego.shape()));
  Tensor<T> x({1, stego.dim(0), stego.dim(1), stego.dim(2)}, stego.data());
  Tensor<T> y = e.forward(nullptr, x, false, false);
  return reshape(y, {y.dim(1), y.dim(2), y.dim(3)});
}

}  // namespace stegkit
