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

#include <cstdint>
#include <string>
#include <vector>

#include "stegkit/rng.hpp"
#include "stegkit/tensor.hpp"

namespace stegkit {

// ---------------------------------------------------------------------------
// Extent arithmetic. Output extents must divide exactly; a fractional extent
// is an error rather than a floor.

inline std::size_t conv_out_extent(std::size_t in, std::size_t k,
                                   std::size_t stride, std::size_t pad) {
  if (stride < 1) throw ShapeError("conv: stride must be >= 1");
  if (in + 2 * pad < k)
    throw ShapeError("conv: kernel " + std::to_string(k) +
                     " exceeds padded extent " + std::to_string(in + 2 * pad));
  std::size_t span = in + 2 * pad - k;
  if (span % stride != 0)
    throw ShapeError("conv: non-integer output extent for in=" +
                     std::to_string(in) + " k=" + std::to_string(k) +
                     " stride=" + std::to_string(stride) +
                     " pad=" + std::to_string(pad));
  return span / stride + 1;
}

inline std::size_t tconv_out_extent(std::size_t in, std::size_t k,
                                    std::size_t stride, std::size_t pad) {
  std::size_t grown = (in - 1) * stride + k;
  if (in < 1 || grown < 2 * pad + 1)
    throw ShapeError("tconv: degenerate output extent for in=" +
                     std::to_string(in) + " k=" + std::to_string(k) +
                     " stride=" + std::to_string(stride) +
                     " pad=" + std::to_string(pad));
  return grown - 2 * pad;
}

namespace detail {

// col is [C*kh*kw, Ho*Wo]; x is one image [C,H,W]. Cross-correlation layout,
// no kernel flip.
template <typename T>
void im2col(const T* x, std::size_t c, std::size_t h, std::size_t w,
            std::size_t kh, std::size_t kw, std::size_t stride,
            std::size_t pad, std::size_t ho, std::size_t wo, T* col) {
  const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ki = 0; ki < kh; ++ki) {
      for (std::size_t kj = 0; kj < kw; ++kj) {
        T* dst = col + ((ch * kh + ki) * kw + kj) * (ho * wo);
        for (std::size_t oi = 0; oi < ho; ++oi) {
          std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(oi * stride + ki) - p;
          if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(h)) {
            for (std::size_t oj = 0; oj < wo; ++oj) dst[oi * wo + oj] = T(0);
            continue;
          }
          const T* row = x + (ch * h + ii) * w;
          for (std::size_t oj = 0; oj < wo; ++oj) {
            std::ptrdiff_t jj =
                static_cast<std::ptrdiff_t>(oj * stride + kj) - p;
            dst[oi * wo + oj] =
                (jj < 0 || jj >= static_cast<std::ptrdiff_t>(w)) ? T(0)
                                                                 : row[jj];
          }
        }
      }
    }
  }
}

// Scatter-add inverse of im2col.
template <typename T>
void col2im_add(const T* col, std::size_t c, std::size_t h, std::size_t w,
                std::size_t kh, std::size_t kw, std::size_t stride,
                std::size_t pad, std::size_t ho, std::size_t wo, T* x) {
  const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ki = 0; ki < kh; ++ki) {
      for (std::size_t kj = 0; kj < kw; ++kj) {
        const T* src = col + ((ch * kh + ki) * kw + kj) * (ho * wo);
        for (std::size_t oi = 0; oi < ho; ++oi) {
          std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(oi * stride + ki) - p;
          if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(h)) continue;
          T* row = x + (ch * h + ii) * w;
          for (std::size_t oj = 0; oj < wo; ++oj) {
            std::ptrdiff_t jj =
                static_cast<std::ptrdiff_t>(oj * stride + kj) - p;
            if (jj >= 0 && jj < static_cast<std::ptrdiff_t>(w))
              row[jj] += src[oi * wo + oj];
          }
        }
      }
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Conv ops

/// 2D cross-correlation (deep-learning convention, no kernel flip).
/// x: [N,C,H,W], w: [F,C,kh,kw] -> [N,F,H',W'] with
/// H' = (H + 2p - kh)/stride + 1.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, std::size_t stride,
                 std::size_t pad) {
  if (x.ndim() != 4 || w.ndim() != 4 || x.dim(1) != w.dim(1))
    throw ShapeError("conv2d: input " + shape_str(x.shape()) +
                     " incompatible with kernel " + shape_str(w.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t f = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const std::size_t ho = conv_out_extent(h, kh, stride, pad);
  const std::size_t wo = conv_out_extent(wd, kw, stride, pad);
  const std::size_t ckk = c * kh * kw, owo = ho * wo;

  Tensor<T> out({n, f, ho, wo});
  std::vector<T> col(ckk * owo);
  for (std::size_t i = 0; i < n; ++i) {
    detail::im2col(x.data().data() + i * c * h * wd, c, h, wd, kh, kw, stride,
                   pad, ho, wo, col.data());
    detail::gemm<T>(false, false, f, owo, ckk, T(1), w.data().data(), ckk,
                    col.data(), owo, T(0),
                    out.mutable_data().data() + i * f * owo, owo);
  }

  auto* tape = detail::common_tape<T>({&x, &w});
  detail::record_op(tape, out, [&](auto og) {
    return [og, n, c, h, wd, f, kh, kw, stride, pad, ho, wo, ckk, owo,
            xg = x.grad_handle(), wg = w.grad_handle(), xd = x.data_handle(),
            wdat = w.data_handle()] {
      std::vector<T> col(ckk * owo);
      std::vector<T> dcol(ckk * owo);
      for (std::size_t i = 0; i < n; ++i) {
        const T* g = og->data() + i * f * owo;
        if (wg) {
          detail::im2col(xd->data() + i * c * h * wd, c, h, wd, kh, kw, stride,
                         pad, ho, wo, col.data());
          detail::gemm<T>(false, true, f, ckk, owo, T(1), g, owo, col.data(),
                          owo, T(1), wg->data(), ckk);
        }
        if (xg) {
          detail::gemm<T>(true, false, ckk, owo, f, T(1), wdat->data(), ckk, g,
                          owo, T(0), dcol.data(), owo);
          detail::col2im_add(dcol.data(), c, h, wd, kh, kw, stride, pad, ho,
                             wo, xg->data() + i * c * h * wd);
        }
      }
    };
  });
  return out;
}

/// Transposed 2D convolution (stride-s upsampling).
/// x: [N,C,H,W], w: [C,F,kh,kw] -> [N,F,H'',W''] with
/// H'' = (H-1)*stride - 2p + kh.
template <typename T>
Tensor<T> conv_transpose2d(const Tensor<T>& x, const Tensor<T>& w,
                           std::size_t stride, std::size_t pad) {
  if (x.ndim() != 4 || w.ndim() != 4 || x.dim(1) != w.dim(0))
    throw ShapeError("conv_transpose2d: input " + shape_str(x.shape()) +
                     " incompatible with kernel " + shape_str(w.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t f = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  const std::size_t ho = tconv_out_extent(h, kh, stride, pad);
  const std::size_t wo = tconv_out_extent(wd, kw, stride, pad);
  const std::size_t fkk = f * kh * kw, hw = h * wd;

  Tensor<T> out({n, f, ho, wo});
  std::vector<T> cols(fkk * hw);
  for (std::size_t i = 0; i < n; ++i) {
    // cols = W^T [FKK,C] * x_i [C,HW]
    detail::gemm<T>(true, false, fkk, hw, c, T(1), w.data().data(), fkk,
                    x.data().data() + i * c * hw, hw, T(0), cols.data(), hw);
    detail::col2im_add(cols.data(), f, ho, wo, kh, kw, stride, pad, h, wd,
                       out.mutable_data().data() + i * f * ho * wo);
  }

  auto* tape = detail::common_tape<T>({&x, &w});
  detail::record_op(tape, out, [&](auto og) {
    return [og, n, c, h, wd, f, kh, kw, stride, pad, ho, wo, fkk, hw,
            xg = x.grad_handle(), wg = w.grad_handle(), xd = x.data_handle(),
            wdat = w.data_handle()] {
      std::vector<T> gcol(fkk * hw);
      for (std::size_t i = 0; i < n; ++i) {
        detail::im2col(og->data() + i * f * ho * wo, f, ho, wo, kh, kw, stride,
                       pad, h, wd, gcol.data());
        if (xg)  // dx_i [C,HW] += W [C,FKK] * gcol [FKK,HW]
          detail::gemm<T>(false, false, c, hw, fkk, T(1), wdat->data(), fkk,
                          gcol.data(), hw, T(1), xg->data() + i * c * hw, hw);
        if (wg)  // dW [C,FKK] += x_i [C,HW] * gcol^T [HW,FKK]
          detail::gemm<T>(false, true, c, fkk, hw, T(1), xd->data() + i * c * hw,
                          hw, gcol.data(), hw, T(1), wg->data(), fkk);
      }
    };
  });
  return out;
}

/// Batch normalization over [N,C,H,W] with per-channel statistics. In
/// training mode the batch statistics normalize and, when running buffers are
/// given, update them with the configured momentum; in inference mode the
/// running statistics are used as fixed affine constants.
template <typename T>
Tensor<T> batch_norm2d(const Tensor<T>& x, const Tensor<T>& gamma,
                       const Tensor<T>& beta, std::vector<T>* running_mean,
                       std::vector<T>* running_var, bool training,
                       T momentum = T(0.1), T eps = T(1e-5)) {
  if (x.ndim() != 4)
    throw ShapeError("batch_norm2d: expected [N,C,H,W], got " +
                     shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  if (gamma.size() != c || beta.size() != c)
    throw ShapeError("batch_norm2d: " + std::to_string(c) +
                     " channels but gamma " + shape_str(gamma.shape()) +
                     ", beta " + shape_str(beta.shape()));
  const std::size_t m = n * hw;
  const auto& xv = x.data();

  std::vector<T> mu(c), inv_std(c);
  if (training) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      T s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const T* p = xv.data() + (i * c + ch) * hw;
        for (std::size_t j = 0; j < hw; ++j) s += p[j];
      }
      mu[ch] = s / static_cast<T>(m);
      T v = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const T* p = xv.data() + (i * c + ch) * hw;
        for (std::size_t j = 0; j < hw; ++j) {
          T d = p[j] - mu[ch];
          v += d * d;
        }
      }
      v /= static_cast<T>(m);
      inv_std[ch] = T(1) / std::sqrt(v + eps);
      if (running_mean && running_var) {
        (*running_mean)[ch] = (T(1) - momentum) * (*running_mean)[ch] + momentum * mu[ch];
        (*running_var)[ch] = (T(1) - momentum) * (*running_var)[ch] + momentum * v;
      }
    }
  } else {
    if (!running_mean || !running_var)
      throw Error("batch_norm2d: inference mode requires running statistics");
    for (std::size_t ch = 0; ch < c; ++ch) {
      mu[ch] = (*running_mean)[ch];
      inv_std[ch] = T(1) / std::sqrt((*running_var)[ch] + eps);
    }
  }

  Tensor<T> out(x.shape());
  auto xhat = std::make_shared<std::vector<T>>(x.size());
  auto& o = out.mutable_data();
  const auto& gv = gamma.data();
  const auto& bv = beta.data();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* p = xv.data() + (i * c + ch) * hw;
      T* xh = xhat->data() + (i * c + ch) * hw;
      T* po = o.data() + (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) {
        xh[j] = (p[j] - mu[ch]) * inv_std[ch];
        po[j] = gv[ch] * xh[j] + bv[ch];
      }
    }

  auto* tape = detail::common_tape<T>({&x, &gamma, &beta});
  detail::record_op(tape, out, [&](auto og) {
    return [og, n, c, hw, m, training, xhat, inv_std, gd = gamma.data_handle(),
            xg = x.grad_handle(), gg = gamma.grad_handle(),
            bg = beta.grad_handle()] {
      for (std::size_t ch = 0; ch < c; ++ch) {
        T sum_g = 0, sum_gx = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const T* g = og->data() + (i * c + ch) * hw;
          const T* xh = xhat->data() + (i * c + ch) * hw;
          for (std::size_t j = 0; j < hw; ++j) {
            sum_g += g[j];
            sum_gx += g[j] * xh[j];
          }
        }
        if (gg) (*gg)[ch] += sum_gx;
        if (bg) (*bg)[ch] += sum_g;
        if (xg) {
          T gam = (*gd)[ch];
          if (training) {
            T inv_m = T(1) / static_cast<T>(m);
            for (std::size_t i = 0; i < n; ++i) {
              const T* g = og->data() + (i * c + ch) * hw;
              const T* xh = xhat->data() + (i * c + ch) * hw;
              T* dx = xg->data() + (i * c + ch) * hw;
              for (std::size_t j = 0; j < hw; ++j)
                dx[j] += gam * inv_std[ch] *
                         (g[j] - inv_m * sum_g - xh[j] * inv_m * sum_gx);
            }
          } else {
            for (std::size_t i = 0; i < n; ++i) {
              const T* g = og->data() + (i * c + ch) * hw;
              T* dx = xg->data() + (i * c + ch) * hw;
              for (std::size_t j = 0; j < hw; ++j)
                dx[j] += gam * inv_std[ch] * g[j];
            }
          }
        }
      }
    };
  });
  return out;
}

// ---------------------------------------------------------------------------
// Initialization. All weights flow from one explicit seed; biases start at
// zero, batchnorm at scale 1 / shift 0.

/// Kaiming-uniform fill with leaky-ReLU gain.
template <typename T>
void kaiming_uniform(Rng rng, std::vector<T>& w, std::size_t fan_in,
                     double slope = 0.2) {
  double gain = std::sqrt(2.0 / (1.0 + slope * slope));
  double bound = gain * std::sqrt(3.0 / static_cast<double>(fan_in));
  for (auto& v : w) v = static_cast<T>(rng.uniform(-bound, bound));
}

// ---------------------------------------------------------------------------
// Layers

enum class Activation { none, leaky_relu, sigmoid, tanh };

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Activation a, T slope = T(0.2)) {
  switch (a) {
    case Activation::none: return x;
    case Activation::leaky_relu: return leaky_relu(x, slope);
    case Activation::sigmoid: return sigmoid(x);
    case Activation::tanh: return tanh(x);
  }
  throw Error("activate: unknown activation");
}

/// Declarative layer description; extents arithmetic is validated when the
/// spec is resolved against an input extent.
struct LayerSpec {
  enum class Kind { conv, tconv, batchnorm, dense, activation };

  Kind kind = Kind::conv;
  std::size_t in_ch = 0, out_ch = 0;
  std::size_t kernel = 0, stride = 1, pad = 0;
  Activation act = Activation::none;
  std::uint64_t init_seed = 0;

  std::size_t out_extent(std::size_t in) const {
    switch (kind) {
      case Kind::conv: return conv_out_extent(in, kernel, stride, pad);
      case Kind::tconv: return tconv_out_extent(in, kernel, stride, pad);
      default: return in;
    }
  }
};

template <typename T>
class Conv2dLayer {
public:
  Conv2dLayer() = default;
  Conv2dLayer(const std::string& name, std::size_t in_ch, std::size_t out_ch,
              std::size_t kernel, std::size_t stride, std::size_t pad, Rng rng)
      : weight_(name + ".weight", {out_ch, in_ch, kernel, kernel}),
        bias_(name + ".bias", {out_ch}),
        spec_{LayerSpec::Kind::conv, in_ch, out_ch, kernel, stride, pad} {
    kaiming_uniform(rng, weight_.value, in_ch * kernel * kernel);
  }

  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params) {
    Tensor<T> w = (tape && watch_params) ? tape->leaf(weight_) : weight_.tensor();
    Tensor<T> b = (tape && watch_params) ? tape->leaf(bias_) : bias_.tensor();
    return bias_add(conv2d(x, w, spec_.stride, spec_.pad), b);
  }

  void collect(std::vector<Parameter<T>*>& params) {
    params.push_back(&weight_);
    params.push_back(&bias_);
  }
  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }
  const LayerSpec& spec() const { return spec_; }

private:
  Parameter<T> weight_, bias_;
  LayerSpec spec_;
};

template <typename T>
class ConvTranspose2dLayer {
public:
  ConvTranspose2dLayer() = default;
  ConvTranspose2dLayer(const std::string& name, std::size_t in_ch,
                       std::size_t out_ch, std::size_t kernel,
                       std::size_t stride, std::size_t pad, Rng rng)
      : weight_(name + ".weight", {in_ch, out_ch, kernel, kernel}),
        bias_(name + ".bias", {out_ch}),
        spec_{LayerSpec::Kind::tconv, in_ch, out_ch, kernel, stride, pad} {
    kaiming_uniform(rng, weight_.value, out_ch * kernel * kernel);
  }

  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params) {
    Tensor<T> w = (tape && watch_params) ? tape->leaf(weight_) : weight_.tensor();
    Tensor<T> b = (tape && watch_params) ? tape->leaf(bias_) : bias_.tensor();
    return bias_add(conv_transpose2d(x, w, spec_.stride, spec_.pad), b);
  }

  void collect(std::vector<Parameter<T>*>& params) {
    params.push_back(&weight_);
    params.push_back(&bias_);
  }
  Parameter<T>& weight() { return weight_; }
  const LayerSpec& spec() const { return spec_; }

private:
  Parameter<T> weight_, bias_;
  LayerSpec spec_;
};

/// Batchnorm layer with running statistics (momentum 0.1). The running
/// buffers are serialized state but not trainable parameters; they update
/// only when the layer is both in training mode and watched.
template <typename T>
class BatchNorm2dLayer {
public:
  BatchNorm2dLayer() = default;
  BatchNorm2dLayer(const std::string& name, std::size_t channels)
      : gamma_(name + ".gamma", {channels}),
        beta_(name + ".beta", {channels}),
        running_mean_(name + ".running_mean", {channels}),
        running_var_(name + ".running_var", {channels}) {
    std::fill(gamma_.value.begin(), gamma_.value.end(), T(1));
    std::fill(running_var_.value.begin(), running_var_.value.end(), T(1));
  }

  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params,
                    bool training) {
    Tensor<T> g = (tape && watch_params) ? tape->leaf(gamma_) : gamma_.tensor();
    Tensor<T> b = (tape && watch_params) ? tape->leaf(beta_) : beta_.tensor();
    bool update = training && watch_params;
    return batch_norm2d(x, g, b, update || !training ? &running_mean_.value : nullptr,
                        update || !training ? &running_var_.value : nullptr,
                        training, T(0.1), T(1e-5));
  }

  void collect(std::vector<Parameter<T>*>& params) {
    params.push_back(&gamma_);
    params.push_back(&beta_);
  }
  void collect_buffers(std::vector<Parameter<T>*>& buffers) {
    buffers.push_back(&running_mean_);
    buffers.push_back(&running_var_);
  }
  Parameter<T>& gamma() { return gamma_; }
  Parameter<T>& beta() { return beta_; }

private:
  Parameter<T> gamma_, beta_;
  Parameter<T> running_mean_, running_var_;
};

template <typename T>
class DenseLayer {
public:
  DenseLayer() = default;
  DenseLayer(const std::string& name, std::size_t in, std::size_t out, Rng rng)
      : weight_(name + ".weight", {in, out}), bias_(name + ".bias", {out}) {
    kaiming_uniform(rng, weight_.value, in);
  }

  // x: [N, in] -> [N, out]
  Tensor<T> forward(Tape<T>* tape, const Tensor<T>& x, bool watch_params) {
    Tensor<T> w = (tape && watch_params) ? tape->leaf(weight_) : weight_.tensor();
    Tensor<T> b = (tape && watch_params) ? tape->leaf(bias_) : bias_.tensor();
    return bias_add(matmul(x, w), b);
  }

  void collect(std::vector<Parameter<T>*>& params) {
    params.push_back(&weight_);
    params.push_back(&bias_);
  }
  Parameter<T>& weight() { return weight_; }

private:
  Parameter<T> weight_, bias_;
};

}  // namespace stegkit
