#pragma once

// Dense numeric kernel shared by every model: forward/backward primitives,
// the Adam update and a central-difference gradient checker. Everything is
// templated on the scalar so the same code trains in float and is verified
// in double.

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tweetpolarity/errors.hpp"

namespace tp {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Rng = std::mt19937_64;

// Uniform draw in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

template <typename Derived>
void fill_uniform(Eigen::DenseBase<Derived>& x, Rng& rng, double lo, double hi) {
  using T = typename Derived::Scalar;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = static_cast<T>(uniform(rng, lo, hi));
}

// Deterministic Fisher-Yates.
template <typename Item>
void shuffle(std::vector<Item>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream os;
  os << '[' << rows << 'x' << cols << ']';
  return os.str();
}

template <typename Derived>
void debug_check_finite([[maybe_unused]] const Eigen::DenseBase<Derived>& x) {
#ifndef NDEBUG
  assert(x.derived().array().isFinite().all());
#endif
}

// ---------------------------------------------------------------------------
// Activations

template <std::floating_point T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(typename Derived::Scalar(0));
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using T = typename Derived::Scalar;
  return x.unaryExpr([](T v) { return sigmoid(v); });
}

template <typename Derived>
auto tanh(const Eigen::MatrixBase<Derived>& x) {
  return x.array().tanh().matrix();
}

// ---------------------------------------------------------------------------
// Linear and convolutional primitives

// W * x + b
template <typename T>
Vector<T> affine(const Eigen::Ref<const Vector<T>>& x, const Eigen::Ref<const Matrix<T>>& W,
                 const Eigen::Ref<const Vector<T>>& b) {
  if (W.cols() != x.size() || W.rows() != b.size())
    throw ShapeError("affine: W " + shape_str(W.rows(), W.cols()) + " vs x " +
                     shape_str(x.size(), 1) + " and b " + shape_str(b.size(), 1));
  Vector<T> y = W * x + b;
  debug_check_finite(y);
  return y;
}

// Pre-activation of one filter w (h x d) slid over every window of X (s x d).
template <typename T>
Vector<T> conv_seq_linear(const Eigen::Ref<const Matrix<T>>& X, const Eigen::Ref<const Matrix<T>>& w, T b) {
  if (w.cols() != X.cols())
    throw ShapeError("conv_seq: filter " + shape_str(w.rows(), w.cols()) + " vs input " +
                     shape_str(X.rows(), X.cols()));
  if (w.rows() > X.rows() || w.rows() < 1)
    throw ShapeError("conv_seq: filter height " + std::to_string(w.rows()) + " exceeds sequence length " +
                     std::to_string(X.rows()));
  const Eigen::Index h = w.rows();
  const Eigen::Index len = X.rows() - h + 1;
  Vector<T> c(len);
  for (Eigen::Index i = 0; i < len; ++i) c(i) = X.middleRows(i, h).cwiseProduct(w).sum() + b;
  return c;
}

// c_i = relu(sum_{j,k} w_jk X[i+j, k] + b), i = 0 .. s-h.
template <typename T>
Vector<T> conv_seq(const Eigen::Ref<const Matrix<T>>& X, const Eigen::Ref<const Matrix<T>>& w, T b) {
  Vector<T> c = relu(conv_seq_linear<T>(X, w, b));
  debug_check_finite(c);
  return c;
}

// Row i of the result is the flattened window X[i .. i+h-1, :]. Rows of a
// row-major matrix are contiguous, so the windows are overlapping views of X.
template <typename T>
auto windows(const Matrix<T>& X, Eigen::Index h) {
  using Strided = Eigen::Map<const Matrix<T>, Eigen::Unaligned, Eigen::OuterStride<>>;
  return Strided(X.data(), X.rows() - h + 1, h * X.cols(), Eigen::OuterStride<>(X.cols()));
}

// Pre-activations of a bank of filters sharing height h. Each row of
// `filters` is one flattened h x d filter; result is (s-h+1) x n_filters.
template <typename T>
Matrix<T> conv_bank_linear(const Matrix<T>& X, const Matrix<T>& filters, const Vector<T>& bias, Eigen::Index h) {
  if (h < 1 || h > X.rows())
    throw ShapeError("conv_bank: filter height " + std::to_string(h) + " exceeds sequence length " +
                     std::to_string(X.rows()));
  if (filters.cols() != h * X.cols() || bias.size() != filters.rows())
    throw ShapeError("conv_bank: filters " + shape_str(filters.rows(), filters.cols()) + " vs input " +
                     shape_str(X.rows(), X.cols()));
  Matrix<T> pre = windows(X, h) * filters.transpose();
  pre.rowwise() += bias.transpose();
  return pre;
}

struct MaxResult {
  double value;
  Eigen::Index argmax;
};

// Largest entry; ties resolve to the first index.
template <typename Derived>
MaxResult max_over_time(const Eigen::MatrixBase<Derived>& c) {
  if (c.size() == 0) throw ShapeError("max_over_time: empty input");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < c.size(); ++i)
    if (c(i) > c(best)) best = i;
  return {static_cast<double>(c(best)), best};
}

// ---------------------------------------------------------------------------
// Loss

template <typename T>
struct SoftmaxXent {
  T loss;
  Vector<T> probs;
  Vector<T> dlogits;
};

template <typename T>
Vector<T> softmax(const Eigen::Ref<const Vector<T>>& logits) {
  Vector<T> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

// Weighted cross-entropy: loss = -weight * log softmax(logits)[label].
template <typename T>
SoftmaxXent<T> softmax_xent(const Eigen::Ref<const Vector<T>>& logits, int label, T weight) {
  if (label < 0 || label >= logits.size())
    throw ShapeError("softmax_xent: label " + std::to_string(label) + " outside [0, " +
                     std::to_string(logits.size()) + ")");
  SoftmaxXent<T> out;
  const T shift = logits.maxCoeff();
  const Vector<T> z = logits.array() - shift;
  const T log_norm = std::log(z.array().exp().sum());
  out.probs = (z.array() - log_norm).exp().matrix();
  out.loss = -weight * (z(label) - log_norm);
  out.dlogits = weight * out.probs;
  out.dlogits(label) -= weight;
  return out;
}

// ---------------------------------------------------------------------------
// Inverted dropout

template <typename Plain>
struct Dropped {
  Plain y;
  Plain mask;  // 0 or 1/(1-p); y = x .* mask and dx = dy .* mask
};

template <typename Plain>
Dropped<Plain> dropout(const Plain& x, double p, Rng& rng, bool train) {
  using T = typename Plain::Scalar;
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout: p must lie in [0, 1)");
  Dropped<Plain> out;
  out.mask = Plain::Ones(x.rows(), x.cols());
  if (train && p > 0.0) {
    const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
    for (Eigen::Index i = 0; i < out.mask.size(); ++i)
      out.mask.data()[i] = uniform01(rng) < p ? T(0) : keep_scale;
  }
  out.y = x.cwiseProduct(out.mask);
  return out;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moments for one parameter tensor, kept flat.
template <typename T>
struct AdamState {
  Vector<T> m;
  Vector<T> v;
  std::int64_t t = 0;
  AdamConfig cfg;

  AdamState() = default;
  AdamState(Eigen::Index size, AdamConfig config)
      : m(Vector<T>::Zero(size)), v(Vector<T>::Zero(size)), cfg(config) {}

  void reset() {
    m.setZero();
    v.setZero();
    t = 0;
  }
};

template <typename T>
void adam_step(std::span<T> param, std::span<const T> grad, AdamState<T>& state) {
  const auto n = static_cast<Eigen::Index>(param.size());
  if (grad.size() != param.size() || state.m.size() != n)
    throw ShapeError("adam_step: param " + shape_str(n, 1) + " grad " +
                     shape_str(static_cast<Eigen::Index>(grad.size()), 1) + " state " +
                     shape_str(state.m.size(), 1));
  Eigen::Map<Vector<T>> p(param.data(), n);
  Eigen::Map<const Vector<T>> g(grad.data(), n);
  const auto& c = state.cfg;
  state.t += 1;
  state.m = T(c.beta1) * state.m + T(1 - c.beta1) * g;
  state.v = T(c.beta2) * state.v + T(1 - c.beta2) * g.cwiseProduct(g);
  const T bc1 = T(1 - std::pow(c.beta1, static_cast<double>(state.t)));
  const T bc2 = T(1 - std::pow(c.beta2, static_cast<double>(state.t)));
  const T step = T(c.lr);
  p.array() -= step * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + T(c.eps));
}

template <typename Derived>
std::span<typename Derived::Scalar> as_span(Eigen::PlainObjectBase<Derived>& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}
template <typename Derived>
std::span<const typename Derived::Scalar> as_span(const Eigen::PlainObjectBase<Derived>& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

// ---------------------------------------------------------------------------
// Gradient checking

struct GradCheckOptions {
  double h = 1e-4;
  std::size_t max_coords = 0;  // 0 checks every coordinate
  std::uint64_t seed = 0;      // picks the subset when max_coords < size
};

// Max over coordinates of |fd - g| / max(1, |fd| + |g|) with central
// differences. `f` re-evaluates the loss and must read `param` live; each
// coordinate is restored after probing.
double grad_check(const std::function<double()>& f, std::span<double> param, std::span<const double> analytic,
                  const GradCheckOptions& opts = {});

}  // namespace tp
