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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "stegkit/errors.hpp"

namespace stegkit {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (auto e : s) n *= e;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

inline void check_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b)
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) +
                     " vs " + shape_str(b));
}

template <typename T>
class Tape;

/// Dense N-dimensional array. Element count always equals the product of the
/// shape extents. A tensor is an immutable value once it participates in an
/// op; sharing across threads for reading is safe. When created under a Tape
/// it carries a backpointer used for reverse-mode differentiation.
template <typename T>
class Tensor {
public:
  Tensor() : data_(std::make_shared<std::vector<T>>()) {}

  explicit Tensor(Shape shape)
      : shape_(std::move(shape)),
        data_(std::make_shared<std::vector<T>>(shape_size(shape_), T(0))) {}

  Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)) {
    if (values.size() != shape_size(shape_))
      throw ShapeError("tensor init: " + std::to_string(values.size()) +
                       " elements for shape " + shape_str(shape_));
    data_ = std::make_shared<std::vector<T>>(std::move(values));
  }

  static Tensor full(Shape shape, T v) {
    Tensor t(std::move(shape));
    std::fill(t.mutable_data().begin(), t.mutable_data().end(), v);
    return t;
  }

  static Tensor scalar(T v) { return Tensor({1}, {v}); }

  const Shape& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t size() const { return data_->size(); }

  const std::vector<T>& data() const { return *data_; }

  /// For filling constants before use. Do not mutate a tensor that has been
  /// recorded on a tape.
  std::vector<T>& mutable_data() { return *data_; }

  T item() const {
    if (size() != 1)
      throw ShapeError("item(): tensor has shape " + shape_str(shape_) +
                       ", expected a scalar");
    return (*data_)[0];
  }

  bool on_tape() const { return tape_ != nullptr; }
  Tape<T>* tape() const { return tape_; }

  /// Gradient of a watched tensor, valid after Tape::backward.
  std::vector<T> grad() const {
    if (!grad_) throw Error("grad(): tensor is not attached to a tape");
    return *grad_;
  }

  // Tape wiring; used by the op implementations.
  const std::shared_ptr<std::vector<T>>& grad_handle() const { return grad_; }
  const std::shared_ptr<std::vector<T>>& data_handle() const { return data_; }
  void attach(Tape<T>* tape, std::shared_ptr<std::vector<T>> grad) {
    tape_ = tape;
    grad_ = std::move(grad);
  }

private:
  Shape shape_;
  std::shared_ptr<std::vector<T>> data_;
  Tape<T>* tape_ = nullptr;
  std::shared_ptr<std::vector<T>> grad_;
};

/// Named trainable array together with its accumulated gradient.
template <typename T>
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;

  Parameter() = default;
  Parameter(std::string n, Shape s)
      : name(std::move(n)),
        shape(std::move(s)),
        value(shape_size(shape), T(0)),
        grad(shape_size(shape), T(0)) {}

  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
  Tensor<T> tensor() const { return Tensor<T>(shape, value); }
};

/// Records operations in construction order (which is topological: inputs of
/// an op always precede it) and replays them newest-first on backward. One
/// tape serves one forward/backward pass; a second backward on the same tape
/// is an error, double-backward is not supported.
template <typename T>
class Tape {
public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf whose gradient is retained and readable via Tensor::grad().
  Tensor<T> watch(Tensor<T> t) {
    t.attach(this, alloc_grad(t.size()));
    return t;
  }

  /// Parameter leaf; backward() accumulates the node gradient into p.grad.
  Tensor<T> leaf(Parameter<T>& p) {
    Tensor<T> t(p.shape, p.value);
    auto g = alloc_grad(t.size());
    t.attach(this, g);
    leaves_.emplace_back(&p, g);
    return t;
  }

  void record(std::function<void()> fn) { steps_.push_back(std::move(fn)); }

  std::shared_ptr<std::vector<T>> alloc_grad(std::size_t n) {
    return std::make_shared<std::vector<T>>(n, T(0));
  }

  /// Reverse sweep; each recorded op is visited exactly once. Nodes not on a
  /// path to the loss keep their zero gradient.
  void backward(const Tensor<T>& loss) {
    if (done_) throw Error("backward(): tape already consumed");
    if (loss.size() != 1)
      throw ShapeError("backward(): loss must be scalar, got shape " +
                       shape_str(loss.shape()));
    if (loss.tape() != this || !loss.grad_handle())
      throw Error("backward(): loss is not recorded on this tape");
    done_ = true;
    (*loss.grad_handle())[0] = T(1);
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    for (auto& [param, g] : leaves_) {
      const auto& gv = *g;
      for (std::size_t i = 0; i < gv.size(); ++i) param->grad[i] += gv[i];
    }
  }

  bool consumed() const { return done_; }

private:
  std::vector<std::function<void()>> steps_;
  std::vector<std::pair<Parameter<T>*, std::shared_ptr<std::vector<T>>>> leaves_;
  bool done_ = false;
};

namespace detail {

template <typename T>
Tape<T>* common_tape(std::initializer_list<const Tensor<T>*> ts) {
  Tape<T>* tape = nullptr;
  for (auto* t : ts) {
    if (!t->on_tape()) continue;
    if (tape && t->tape() != tape)
      throw Error("operands are recorded on different tapes");
    tape = t->tape();
  }
  return tape;
}

// Attaches `out` to `tape` and registers the backward closure.
template <typename T, typename Fn>
void record_op(Tape<T>* tape, Tensor<T>& out, Fn&& make_backward) {
  if (!tape) return;
  auto og = tape->alloc_grad(out.size());
  out.attach(tape, og);
  tape->record(make_backward(og));
}

// Row-major C = alpha * op(A) * op(B) + beta * C; implemented over BLAS in
// gemm.cpp for float and double.
template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, T alpha, const T* a, std::size_t lda, const T* b,
          std::size_t ldb, T beta, T* c, std::size_t ldc);

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise ops

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a.shape(), b.shape(), "add");
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
  auto* tape = detail::common_tape<T>({&a, &b});
  detail::record_op(tape, out, [&](auto og) {
    return [og, ag = a.grad_handle(), bg = b.grad_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) (*ag)[i] += (*og)[i];
      if (bg)
        for (std::size_t i = 0; i < og->size(); ++i) (*bg)[i] += (*og)[i];
    };
  });
  return out;
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a.shape(), b.shape(), "sub");
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] - bv[i];
  auto* tape = detail::common_tape<T>({&a, &b});
  detail::record_op(tape, out, [&](auto og) {
    return [og, ag = a.grad_handle(), bg = b.grad_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) (*ag)[i] += (*og)[i];
      if (bg)
        for (std::size_t i = 0; i < og->size(); ++i) (*bg)[i] -= (*og)[i];
    };
  });
  return out;
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a.shape(), b.shape(), "mul");
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
  auto* tape = detail::common_tape<T>({&a, &b});
  detail::record_op(tape, out, [&](auto og) {
    return [og, ag = a.grad_handle(), bg = b.grad_handle(),
            ad = a.data_handle(), bd = b.data_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i)
          (*ag)[i] += (*og)[i] * (*bd)[i];
      if (bg)
        for (std::size_t i = 0; i < og->size(); ++i)
          (*bg)[i] += (*og)[i] * (*ad)[i];
    };
  });
  return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * s;
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, s, ag = a.grad_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) (*ag)[i] += (*og)[i] * s;
    };
  });
  return out;
}

template <typename T>
Tensor<T> offset(const Tensor<T>& a, T c) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + c;
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, ag = a.grad_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) (*ag)[i] += (*og)[i];
    };
  });
  return out;
}

template <typename T>
Tensor<T> neg(const Tensor<T>& a) {
  return scale(a, T(-1));
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::log(av[i]);
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, ag = a.grad_handle(), ad = a.data_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i)
          (*ag)[i] += (*og)[i] / (*ad)[i];
    };
  });
  return out;
}

/// Clamp to [lo, hi]; gradient passes only strictly inside the interval.
template <typename T>
Tensor<T> clamp(const Tensor<T>& a, T lo, T hi) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = std::min(std::max(av[i], lo), hi);
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, lo, hi, ag = a.grad_handle(), ad = a.data_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i)
          if ((*ad)[i] > lo && (*ad)[i] < hi) (*ag)[i] += (*og)[i];
    };
  });
  return out;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = T(1) / (T(1) + std::exp(-av[i]));
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, ag = a.grad_handle(), od = out.data_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) {
          T y = (*od)[i];
          (*ag)[i] += (*og)[i] * y * (T(1) - y);
        }
    };
  });
  return out;
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::tanh(av[i]);
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, ag = a.grad_handle(), od = out.data_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) {
          T y = (*od)[i];
          (*ag)[i] += (*og)[i] * (T(1) - y * y);
        }
    };
  });
  return out;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& a, T slope = T(0.2)) {
  Tensor<T> out(a.shape());
  auto& o = out.mutable_data();
  const auto& av = a.data();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = av[i] >= T(0) ? av[i] : slope * av[i];
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, slope, ag = a.grad_handle(), ad = a.data_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i)
          (*ag)[i] += (*og)[i] * ((*ad)[i] >= T(0) ? T(1) : slope);
    };
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T acc = 0;
  for (T v : a.data()) acc += v;
  Tensor<T> out = Tensor<T>::scalar(acc);
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, ag = a.grad_handle()] {
      if (ag) {
        T g = (*og)[0];
        for (auto& v : *ag) v += g;
      }
    };
  });
  return out;
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.size() == 0) throw ShapeError("mean(): empty tensor");
  T acc = 0;
  for (T v : a.data()) acc += v;
  T inv = T(1) / static_cast<T>(a.size());
  Tensor<T> out = Tensor<T>::scalar(acc * inv);
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, inv, ag = a.grad_handle()] {
      if (ag) {
        T g = (*og)[0] * inv;
        for (auto& v : *ag) v += g;
      }
    };
  });
  return out;
}

// ---------------------------------------------------------------------------
// Structure ops

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (shape_size(shape) != a.size())
    throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                     shape_str(shape));
  Tensor<T> out(std::move(shape), a.data());
  detail::record_op(a.tape(), out, [&](auto og) {
    return [og, ag = a.grad_handle()] {
      if (ag)
        for (std::size_t i = 0; i < og->size(); ++i) (*ag)[i] += (*og)[i];
    };
  });
  return out;
}

/// Concatenation along the channel axis of two [N,C,H,W] tensors.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.ndim() != 4 || b.ndim() != 4)
    throw ShapeError("concat_channels: expected rank-4 tensors, got " +
                     shape_str(a.shape()) + " and " + shape_str(b.shape()));
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
    throw ShapeError("concat_channels: incompatible shapes " +
                     shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  const std::size_t n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  const std::size_t hw = a.dim(2) * a.dim(3);
  Tensor<T> out({n, ca + cb, a.dim(2), a.dim(3)});
  auto& o = out.mutable_data();
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(av.begin() + i * ca * hw, ca * hw,
                o.begin() + i * (ca + cb) * hw);
    std::copy_n(bv.begin() + i * cb * hw, cb * hw,
                o.begin() + i * (ca + cb) * hw + ca * hw);
  }
  auto* tape = detail::common_tape<T>({&a, &b});
  detail::record_op(tape, out, [&](auto og) {
    return [og, n, ca, cb, hw, ag = a.grad_handle(), bg = b.grad_handle()] {
      for (std::size_t i = 0; i < n; ++i) {
        const T* src = og->data() + i * (ca + cb) * hw;
        if (ag) {
          T* dst = ag->data() + i * ca * hw;
          for (std::size_t j = 0; j < ca * hw; ++j) dst[j] += src[j];
        }
        if (bg) {
          T* dst = bg->data() + i * cb * hw;
          for (std::size_t j = 0; j < cb * hw; ++j) dst[j] += src[ca * hw + j];
        }
      }
    };
  });
  return out;
}

/// Matrix product of [N,K] x [K,M] -> [N,M].
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0))
    throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
  const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  Tensor<T> out({n, m});
  detail::gemm<T>(false, false, n, m, k, T(1), a.data().data(), k,
                  b.data().data(), m, T(0), out.mutable_data().data(), m);
  auto* tape = detail::common_tape<T>({&a, &b});
  detail::record_op(tape, out, [&](auto og) {
    return [og, n, k, m, ag = a.grad_handle(), bg = b.grad_handle(),
            ad = a.data_handle(), bd = b.data_handle()] {
      if (ag)  // dA += dC * B^T
        detail::gemm<T>(false, true, n, k, m, T(1), og->data(), m, bd->data(),
                        m, T(1), ag->data(), k);
      if (bg)  // dB += A^T * dC
        detail::gemm<T>(true, false, k, m, n, T(1), ad->data(), k, og->data(),
                        m, T(1), bg->data(), m);
    };
  });
  return out;
}

/// Adds a length-C vector across axis 1 of a rank >= 2 tensor.
template <typename T>
Tensor<T> bias_add(const Tensor<T>& x, const Tensor<T>& b) {
  if (x.ndim() < 2 || b.ndim() != 1 || b.dim(0) != x.dim(1))
    throw ShapeError("bias_add: bias " + shape_str(b.shape()) +
                     " does not match axis 1 of " + shape_str(x.shape()));
  const std::size_t c = x.dim(1);
  std::size_t inner = 1;
  for (std::size_t i = 2; i < x.ndim(); ++i) inner *= x.dim(i);
  Tensor<T> out(x.shape());
  auto& o = out.mutable_data();
  const auto& xv = x.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = xv[i] + bv[(i / inner) % c];
  auto* tape = detail::common_tape<T>({&x, &b});
  detail::record_op(tape, out, [&](auto og) {
    return [og, c, inner, xg = x.grad_handle(), bg = b.grad_handle()] {
      if (xg)
        for (std::size_t i = 0; i < og->size(); ++i) (*xg)[i] += (*og)[i];
      if (bg)
        for (std::size_t i = 0; i < og->size(); ++i)
          (*bg)[(i / inner) % c] += (*og)[i];
    };
  });
  return out;
}

// Operator sugar used throughout the model code.
template <typename T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) {
  return add(a, b);
}
template <typename T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) {
  return sub(a, b);
}
template <typename T>
Tensor<T> operator*(const Tensor<T>& a, const Tensor<T>& b) {
  return mul(a, b);
}
template <typename T>
Tensor<T> operator*(const Tensor<T>& a, T s) {
  return scale(a, s);
}
template <typename T>
Tensor<T> operator*(T s, const Tensor<T>& a) {
  return scale(a, s);
}

}  // namespace stegkit
