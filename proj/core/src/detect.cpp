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

#include "stegkit/detect.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <memory>

#include "stegkit/losses.hpp"
#include "stegkit/models.hpp"
#include "stegkit/rng.hpp"
#include "stegkit/trainer.hpp"

namespace stegkit {

double chi_square_lsb_score(const Image& img) {
  if (img.pixels.empty())
    throw ShapeError("chi_square_lsb_score: empty image");
  std::array<std::uint64_t, 256> hist{};
  for (auto b : img.pixels) ++hist[b];

  double chi2 = 0;
  int pairs = 0;
  for (int i = 0; i < 128; ++i) {
    const double sum = static_cast<double>(hist[2 * i] + hist[2 * i + 1]);
    if (sum < 4) continue;  // merge out sparse pairs
    const double expected = sum / 2.0;
    const double d = static_cast<double>(hist[2 * i]) - expected;
    chi2 += d * d / expected;
    ++pairs;
  }
  const int dof = pairs - 1;
  if (dof < 1) return 0.0;
  // P(chi^2_dof >= observed): near 1 when the pair histogram is equalized
  // (as full LSB embedding leaves it), near 0 for natural statistics.
  return boost::math::gamma_q(dof / 2.0, chi2 / 2.0);
}

namespace {

struct CnnClassifier {
  NetTopology topo;
  std::unique_ptr<DiscriminatorNet<float>> net;

  explicit CnnClassifier(const CheckpointData& ck) {
    const CheckpointData::Blob* c1 = nullptr;
    const CheckpointData::Blob* fc = nullptr;
    for (const auto& b : ck.params) {
      if (b.name == "d.c1.weight") c1 = &b;
      if (b.name == "d.fc.weight") fc = &b;
    }
    if (!c1 || !fc)
      throw UnsupportedFormat("detector checkpoint: missing discriminator blobs");
    topo.cover_channels = c1->shape.at(1);
    topo.disc_base = c1->shape.at(0);
    std::size_t cells = fc->shape.at(0) / (topo.disc_base * 8);
    std::size_t side =
        static_cast<std::size_t>(std::lround(std::sqrt(double(cells))));
    topo.disc_extent = side * 16;
    net = std::make_unique<DiscriminatorNet<float>>(topo, Rng(0));

    std::vector<Parameter<float>*> params = net->parameters();
    auto buffers = net->buffers();
    params.insert(params.end(), buffers.begin(), buffers.end());
    if (params.size() != ck.params.size())
      throw UnsupportedFormat("detector checkpoint: expected " +
                              std::to_string(params.size()) + " blobs, found " +
                              std::to_string(ck.params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (ck.params[i].name != params[i]->name ||
          ck.params[i].shape != params[i]->shape)
        throw UnsupportedFormat("detector checkpoint: blob '" +
                                ck.params[i].name + "' does not match '" +
                                params[i]->name + "'");
      params[i]->value = ck.params[i].data;
    }
  }

  double p_stego(const Image& img) const {
    Image crop = img;
    if (img.width != topo.disc_extent || img.height != topo.disc_extent)
      crop = center_crop(img, topo.disc_extent, topo.disc_extent);
    if (crop.channels != topo.cover_channels)
      throw ShapeError("cnn detector: expects " +
                       std::to_string(topo.cover_channels) +
                       " channel(s), image has " +
                       std::to_string(crop.channels));
    Tensor<float> x = normalize<float>(crop);
    return 1.0 - discriminator_forward(*net, x);
  }
};

Tensor<float> make_batch(std::span<const Image> imgs,
                         std::span<const std::size_t> idx, std::size_t extent) {
  const std::size_t c = imgs[0].channels;
  Tensor<float> out({idx.size(), c, extent, extent});
  auto& d = out.mutable_data();
  std::size_t off = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Image crop = imgs[idx[i]].width == extent && imgs[idx[i]].height == extent
                     ? imgs[idx[i]]
                     : center_crop(imgs[idx[i]], extent, extent);
    Tensor<float> t = normalize<float>(crop);
    std::copy(t.data().begin(), t.data().end(), d.begin() + off);
    off += t.size();
  }
  return out;
}

}  // namespace

Detector Detector::chi_square() {
  return Detector(Kind::chi_square_lsb,
                  [](const Image& img) { return chi_square_lsb_score(img); });
}

Detector Detector::cnn_from_checkpoint(const std::string& checkpoint_path) {
  auto clf = std::make_shared<CnnClassifier>(load_checkpoint_file(checkpoint_path));
  return Detector(Kind::cnn,
                  [clf](const Image& img) { return clf->p_stego(img); });
}

double Detector::score(const Image& img) const { return fn_(img); }

std::string Detector::name() const {
  return kind_ == Kind::chi_square_lsb ? "chi-square-lsb" : "cnn-classifier";
}

double detection_accuracy(const std::function<double(const Image&)>& score,
                          std::span<const Image> covers,
                          std::span<const Image> stegos, double threshold) {
  if (covers.empty() || stegos.empty())
    throw ShapeError("detection_accuracy: empty cover or stego set");
  std::size_t tp = 0, tn = 0;
  for (const auto& s : stegos) tp += score(s) > threshold;
  for (const auto& c : covers) tn += score(c) <= threshold;
  return 0.5 * (static_cast<double>(tp) / static_cast<double>(stegos.size()) +
                static_cast<double>(tn) / static_cast<double>(covers.size()));
}

double detection_accuracy(const Detector& detector,
                          std::span<const Image> covers,
                          std::span<const Image> stegos, double threshold) {
  return detection_accuracy(
      [&detector](const Image& img) { return detector.score(img); }, covers,
      stegos, threshold);
}

void train_cnn_detector(std::span<const Image> covers,
                        std::span<const Image> stegos, std::size_t extent,
                        std::size_t steps, std::size_t batch,
                        std::uint64_t seed,
                        const std::string& checkpoint_path) {
  if (covers.empty() || stegos.empty())
    throw ShapeError("train_cnn_detector: empty training set");
  NetTopology topo;
  topo.cover_channels = covers[0].channels;
  topo.disc_extent = extent;
  DiscriminatorNet<float> net(topo, Rng(seed).fork(0x636E6E /* "cnn" */));
  AdamOptimizer<float> opt(net.parameters(), AdamHyper{2e-4, 0.5, 0.999, 1e-8});

  Rng master(seed);
  const std::size_t half = std::max<std::size_t>(1, batch / 2);
  const std::size_t c = covers[0].channels;
  for (std::size_t s = 0; s < steps; ++s) {
    Rng r = master.fork(s);
    std::vector<std::size_t> ci(half), si(half);
    for (auto& i : ci) i = r.next_below(covers.size());
    for (auto& i : si) i = r.next_below(stegos.size());
    // Mixed batch: batchnorm statistics must not carry class information,
    // otherwise single-image inference with running stats falls apart.
    Tensor<float> xc = make_batch(covers, ci, extent);
    Tensor<float> xs = make_batch(stegos, si, extent);
    Tensor<float> x({2 * half, c, extent, extent});
    std::copy(xc.data().begin(), xc.data().end(), x.mutable_data().begin());
    std::copy(xs.data().begin(), xs.data().end(),
              x.mutable_data().begin() + xc.size());
    Tensor<float> labels({2 * half, 1});  // 1 = cover, 0 = stego
    for (std::size_t i = 0; i < half; ++i) labels.mutable_data()[i] = 1.0f;

    Tape<float> tape;
    auto p = clamp(net.forward(&tape, x, true, true), float(kProbEps),
                   float(1 - kProbEps));
    auto one_minus_p = offset(neg(p), 1.0f);
    auto one_minus_l = offset(neg(labels), 1.0f);
    auto bce = neg(mean(add(mul(labels, log(p)),
                            mul(one_minus_l, log(one_minus_p)))));
    opt.zero_grad();
    tape.backward(bce);
    opt.step();
  }

  CheckpointData ck;
  ck.step = steps;
  ck.rng_state = seed;
  std::vector<Parameter<float>*> params = net.parameters();
  auto buffers = net.buffers();
  params.insert(params.end(), buffers.begin(), buffers.end());
  for (auto* p : params) ck.params.push_back({p->name, p->shape, p->value});
  save_checkpoint_file(ck, checkpoint_path);
}

}  // namespace stegkit
