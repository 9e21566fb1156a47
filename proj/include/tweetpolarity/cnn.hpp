#pragma once

// Convolutional sentence classifier: a bank of filters per height, ReLU,
// max-over-time pooling, dropout, a ReLU hidden layer, dropout, softmax.

#include <cstdint>
#include <string>
#include <vector>

#include "tweetpolarity/embedding.hpp"
#include "tweetpolarity/tensor.hpp"

namespace tp {

struct CnnConfig {
  std::vector<int> filter_sizes = {3, 4, 5};
  int num_filters = 200;  // per filter size
  int hidden = 30;
  int num_classes = 3;
  int seq_len = 80;
  double dropout = 0.5;

  int pooled_dim() const { return static_cast<int>(filter_sizes.size()) * num_filters; }
};

template <typename T>
struct CnnParams {
  std::vector<int> filter_sizes;
  std::vector<Matrix<T>> filters;  // per size: num_filters x (h * d_in), one flattened filter per row
  std::vector<Vector<T>> filter_bias;
  Matrix<T> W_hidden;
  Vector<T> b_hidden;
  Matrix<T> W_out;
  Vector<T> b_out;
  std::uint64_t revision = 0;  // bumped by every optimizer update

  int input_dim() const {
    return filters.empty() ? 0 : static_cast<int>(filters[0].cols()) / filter_sizes[0];
  }

  // Filters ~ U(-0.05, 0.05); dense layers Glorot-uniform; biases zero.
  static CnnParams init(const CnnConfig& cfg, int input_dim, Rng& rng) {
    CnnParams p;
    p.filter_sizes = cfg.filter_sizes;
    for (const int h : cfg.filter_sizes) {
      if (h < 1 || h > cfg.seq_len)
        throw ShapeError("cnn: filter height " + std::to_string(h) + " exceeds sequence length " +
                         std::to_string(cfg.seq_len));
      Matrix<T> w(cfg.num_filters, h * input_dim);
      fill_uniform(w, rng, -0.05, 0.05);
      p.filters.push_back(std::move(w));
      p.filter_bias.push_back(Vector<T>::Zero(cfg.num_filters));
    }
    const double g1 = std::sqrt(6.0 / (cfg.pooled_dim() + cfg.hidden));
    p.W_hidden.resize(cfg.hidden, cfg.pooled_dim());
    fill_uniform(p.W_hidden, rng, -g1, g1);
    p.b_hidden = Vector<T>::Zero(cfg.hidden);
    const double g2 = std::sqrt(6.0 / (cfg.hidden + cfg.num_classes));
    p.W_out.resize(cfg.num_classes, cfg.hidden);
    fill_uniform(p.W_out, rng, -g2, g2);
    p.b_out = Vector<T>::Zero(cfg.num_classes);
    return p;
  }

  CnnParams zeros_like() const {
    CnnParams z = *this;
    for (auto& t : z.tensors()) std::fill(t.data.begin(), t.data.end(), T(0));
    z.revision = 0;
    return z;
  }

  std::vector<TensorRef<T>> tensors() {
    std::vector<TensorRef<T>> out;
    const auto d_in = static_cast<std::uint32_t>(input_dim());
    for (std::size_t k = 0; k < filters.size(); ++k) {
      const std::string tag = "cnn.conv" + std::to_string(filter_sizes[k]);
      out.push_back(tensor_ref(tag + ".w", filters[k],
                               {static_cast<std::uint32_t>(filters[k].rows()),
                                static_cast<std::uint32_t>(filter_sizes[k]), d_in}));
      out.push_back(tensor_ref(tag + ".b", filter_bias[k]));
    }
    out.push_back(tensor_ref("cnn.hidden.W", W_hidden));
    out.push_back(tensor_ref("cnn.hidden.b", b_hidden));
    out.push_back(tensor_ref("cnn.out.W", W_out));
    out.push_back(tensor_ref("cnn.out.b", b_out));
    return out;
  }

  template <typename U>
  CnnParams<U> cast() const {
    CnnParams<U> p;
    p.filter_sizes = filter_sizes;
    for (const auto& f : filters) p.filters.push_back(f.template cast<U>());
    for (const auto& b : filter_bias) p.filter_bias.push_back(b.template cast<U>());
    p.W_hidden = W_hidden.template cast<U>();
    p.b_hidden = b_hidden.template cast<U>();
    p.W_out = W_out.template cast<U>();
    p.b_out = b_out.template cast<U>();
    return p;
  }
};

template <typename T>
struct CnnCache {
  const CnnParams<T>* params = nullptr;
  std::uint64_t revision = 0;
  Matrix<T> X;
  std::vector<Matrix<T>> pre;  // per size: (s-h+1) x num_filters pre-activations
  std::vector<std::vector<Eigen::Index>> argmax;
  Vector<T> pooled;
  Vector<T> pooled_mask;
  Vector<T> hidden_pre;
  Vector<T> hidden_mask;
  Vector<T> hidden_out;  // after relu and dropout
  Vector<T> logits;
  Vector<T> probs;
};

template <typename T>
CnnCache<T> cnn_forward(const Matrix<T>& X, const CnnParams<T>& p, const CnnConfig& cfg, Rng& rng, bool train) {
  if (X.rows() != cfg.seq_len || X.cols() != p.input_dim())
    throw ShapeError("cnn_forward: input " + shape_str(X.rows(), X.cols()) + " vs expected " +
                     shape_str(cfg.seq_len, p.input_dim()));
  CnnCache<T> c;
  c.params = &p;
  c.revision = p.revision;
  c.X = X;
  const Eigen::Index n = p.filters.empty() ? 0 : p.filters[0].rows();
  c.pooled.resize(static_cast<Eigen::Index>(p.filters.size()) * n);
  for (std::size_t k = 0; k < p.filters.size(); ++k) {
    c.pre.push_back(conv_bank_linear<T>(c.X, p.filters[k], p.filter_bias[k], p.filter_sizes[k]));
    const Matrix<T>& pre = c.pre.back();
    std::vector<Eigen::Index> arg(static_cast<std::size_t>(n));
    for (Eigen::Index f = 0; f < n; ++f) {
      // relu is monotone, so max(relu(pre)) = relu(max(pre)) with the same argmax
      const auto m = max_over_time(pre.col(f));
      arg[static_cast<std::size_t>(f)] = m.argmax;
      c.pooled(static_cast<Eigen::Index>(k) * n + f) = std::max(T(0), static_cast<T>(m.value));
    }
    c.argmax.push_back(std::move(arg));
  }
  auto d1 = dropout(c.pooled, cfg.dropout, rng, train);
  c.pooled_mask = std::move(d1.mask);
  c.hidden_pre = affine<T>(d1.y, p.W_hidden, p.b_hidden);
  auto d2 = dropout<Vector<T>>(relu(c.hidden_pre), cfg.dropout, rng, train);
  c.hidden_mask = std::move(d2.mask);
  c.hidden_out = std::move(d2.y);
  c.logits = affine<T>(c.hidden_out, p.W_out, p.b_out);
  c.probs = softmax<T>(c.logits);
  return c;
}

// Accumulates parameter gradients into `grads` and returns dLoss/dX.
template <typename T>
Matrix<T> cnn_backward(const CnnParams<T>& p, const CnnCache<T>& c, const Vector<T>& dlogits, CnnParams<T>& grads) {
  if (c.params != &p || c.revision != p.revision)
    throw std::logic_error("cnn_backward: stale cache (parameters changed since forward)");
  if (dlogits.size() != c.logits.size())
    throw ShapeError("cnn_backward: dlogits " + shape_str(dlogits.size(), 1) + " vs logits " +
                     shape_str(c.logits.size(), 1));
  grads.W_out.noalias() += dlogits * c.hidden_out.transpose();
  grads.b_out += dlogits;
  Vector<T> dhidden = (p.W_out.transpose() * dlogits).cwiseProduct(c.hidden_mask);
  dhidden = (c.hidden_pre.array() > T(0)).select(dhidden, T(0));
  const Vector<T> pooled_in = c.pooled.cwiseProduct(c.pooled_mask);
  grads.W_hidden.noalias() += dhidden * pooled_in.transpose();
  grads.b_hidden += dhidden;
  const Vector<T> dpooled = (p.W_hidden.transpose() * dhidden).cwiseProduct(c.pooled_mask);

  Matrix<T> dX = Matrix<T>::Zero(c.X.rows(), c.X.cols());
  const Eigen::Index d = c.X.cols();
  for (std::size_t k = 0; k < p.filters.size(); ++k) {
    const Eigen::Index h = p.filter_sizes[k];
    const Eigen::Index n = p.filters[k].rows();
    const auto win = windows(c.X, h);
    for (Eigen::Index f = 0; f < n; ++f) {
      const Eigen::Index a = c.argmax[k][static_cast<std::size_t>(f)];
      if (c.pre[k](a, f) <= T(0)) continue;
      const T g = dpooled(static_cast<Eigen::Index>(k) * n + f);
      if (g == T(0)) continue;
      grads.filters[k].row(f) += g * win.row(a);
      grads.filter_bias[k](f) += g;
      Eigen::Map<Vector<T>> dwin(dX.data() + a * d, h * d);
      dwin += g * p.filters[k].row(f).transpose();
    }
  }
  return dX;
}

}  // namespace tp
