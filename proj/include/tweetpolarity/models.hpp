#pragma once

// Uniform per-example interface over the two classifier kinds, shared by the
// trainer (float) and the gradient-check suite (double).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tweetpolarity/cnn.hpp"
#include "tweetpolarity/embedding.hpp"
#include "tweetpolarity/lstm.hpp"

namespace tp {

enum class ModelKind { Cnn, BiLstm };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);  // "cnn" | "bilstm" (also "lstm")

struct ArchConfig {
  int seq_len = 80;
  std::vector<int> filter_sizes = {3, 4, 5};
  int num_filters = 200;
  int lstm_units = 200;
  int hidden = 30;
  double dropout = 0.5;

  CnnConfig cnn(int num_classes) const {
    return {filter_sizes, num_filters, hidden, num_classes, seq_len, dropout};
  }
  BiLstmConfig bilstm(int num_classes) const { return {lstm_units, hidden, num_classes, seq_len, dropout}; }
};

template <typename T>
struct ModelParams {
  ModelKind kind = ModelKind::Cnn;
  int num_classes = 0;
  bool use_topic = false;
  CnnParams<T> cnn;       // used when kind == Cnn
  BiLstmParams<T> lstm;   // used when kind == BiLstm

  static ModelParams init(ModelKind kind, const ArchConfig& arch, int num_classes, int input_dim, bool use_topic,
                          Rng& rng) {
    ModelParams p;
    p.kind = kind;
    p.num_classes = num_classes;
    p.use_topic = use_topic;
    if (kind == ModelKind::Cnn)
      p.cnn = CnnParams<T>::init(arch.cnn(num_classes), input_dim, rng);
    else
      p.lstm = BiLstmParams<T>::init(arch.bilstm(num_classes), input_dim, rng);
    return p;
  }

  std::vector<TensorRef<T>> tensors() { return kind == ModelKind::Cnn ? cnn.tensors() : lstm.tensors(); }

  ModelParams zeros_like() const {
    ModelParams z = *this;
    if (kind == ModelKind::Cnn)
      z.cnn = cnn.zeros_like();
    else
      z.lstm = lstm.zeros_like();
    return z;
  }

  void bump_revision() {
    ++cnn.revision;
    ++lstm.revision;
  }

  template <typename U>
  ModelParams<U> cast() const {
    ModelParams<U> p;
    p.kind = kind;
    p.num_classes = num_classes;
    p.use_topic = use_topic;
    if (kind == ModelKind::Cnn)
      p.cnn = cnn.template cast<U>();
    else
      p.lstm = lstm.template cast<U>();
    return p;
  }
};

template <typename T>
struct StepResult {
  T loss = 0;
  Vector<T> probs;
};

// Forward pass on one tweet; with `label` set, also the weighted loss and,
// when `grads` is non-null, the backward pass accumulated into grads/egrad.
template <typename T>
StepResult<T> model_step(const ModelParams<T>& p, const ArchConfig& arch, const EmbeddingMatrix<T>& emb,
                         const EncodedTweet& tweet, std::optional<int> label, T weight, Rng& rng, bool train,
                         ModelParams<T>* grads = nullptr, EmbeddingGrad<T>* egrad = nullptr) {
  const Matrix<T> X = embed(tweet, emb, arch.seq_len, p.use_topic);
  const int true_len = std::min(tweet.length(), arch.seq_len);
  StepResult<T> out;
  auto finish = [&](const Vector<T>& logits, Vector<T> probs, auto&& backward) {
    if (!label) {
      out.probs = std::move(probs);
      return;
    }
    auto xent = softmax_xent<T>(logits, *label, weight);
    out.loss = xent.loss;
    out.probs = std::move(xent.probs);
    if (grads) {
      const Matrix<T> dX = backward(xent.dlogits);
      if (egrad) embed_backward(tweet, dX, emb, p.use_topic, *egrad);
    }
  };
  if (p.kind == ModelKind::Cnn) {
    const auto cache = cnn_forward(X, p.cnn, arch.cnn(p.num_classes), rng, train);
    finish(cache.logits, cache.probs, [&](const Vector<T>& dl) { return cnn_backward(p.cnn, cache, dl, grads->cnn); });
  } else {
    const auto cache = bilstm_forward(X, true_len, p.lstm, arch.bilstm(p.num_classes), rng, train);
    finish(cache.logits, cache.probs,
           [&](const Vector<T>& dl) { return bilstm_backward(p.lstm, cache, dl, X.rows(), grads->lstm); });
  }
  return out;
}

}  // namespace tp
