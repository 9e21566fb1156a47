#pragma once

// Word embedding table plus the two-vector topic-flag channel, and the
// lookup that turns a tweet into a zero-padded s' x d_in input matrix.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetpolarity/corpus.hpp"
#include "tweetpolarity/tensor.hpp"

namespace tp {

// Named, flat view of one parameter tensor. `dims` is the logical shape
// recorded in checkpoints.
template <typename T>
struct TensorRef {
  std::string name;
  std::span<T> data;
  std::vector<std::uint32_t> dims;
};

template <typename Derived>
auto tensor_ref(std::string name, Eigen::PlainObjectBase<Derived>& x, std::vector<std::uint32_t> dims = {}) {
  using T = typename Derived::Scalar;
  if (dims.empty()) {
    if (x.cols() == 1 && !Derived::IsRowMajor)
      dims = {static_cast<std::uint32_t>(x.rows())};
    else
      dims = {static_cast<std::uint32_t>(x.rows()), static_cast<std::uint32_t>(x.cols())};
  }
  return TensorRef<T>{std::move(name), std::span<T>(x.data(), static_cast<std::size_t>(x.size())), std::move(dims)};
}

template <typename T>
struct EmbeddingMatrix {
  Matrix<T> table;  // V x d; row 0 (PAD) stays zero
  Matrix<T> topic;  // 2 x topic_dim; row 0 = not in topic, row 1 = in topic
  bool frozen = false;

  int dim() const { return static_cast<int>(table.cols()); }
  int vocab_size() const { return static_cast<int>(table.rows()); }
  int topic_dim() const { return static_cast<int>(topic.cols()); }

  // Words ~ U(-scale, scale), topic vectors ~ U(-0.25, 0.25), PAD zero.
  static EmbeddingMatrix random(int vocab_size, int dim, int topic_dim, Rng& rng, double scale = 0.25) {
    EmbeddingMatrix e;
    e.table.resize(vocab_size, dim);
    fill_uniform(e.table, rng, -scale, scale);
    e.table.row(Vocabulary::kPad).setZero();
    e.topic.resize(2, topic_dim);
    fill_uniform(e.topic, rng, -0.25, 0.25);
    return e;
  }

  template <typename U>
  EmbeddingMatrix<U> cast() const {
    return {table.template cast<U>(), topic.template cast<U>(), frozen};
  }
};

// A tweet as vocabulary indices, truncated to the model's sequence length.
struct EncodedTweet {
  std::vector<int> ids;
  std::vector<std::uint8_t> flags;

  int length() const { return static_cast<int>(ids.size()); }
};

// Out-of-vocabulary tokens (and a literal PAD token) map to UNK. An empty
// tweet becomes a single UNK so that recurrent models always see one step.
inline EncodedTweet encode_tweet(const TokenizedTweet& tweet, const Vocabulary& vocab, int seq_len) {
  EncodedTweet e;
  const std::size_t n = std::min(tweet.tokens.size(), static_cast<std::size_t>(seq_len));
  e.ids.reserve(n);
  e.flags.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int id = vocab.index_of(tweet.tokens[i]);
    e.ids.push_back(id == Vocabulary::kPad ? Vocabulary::kUnk : id);
    e.flags.push_back(i < tweet.topic_flags.size() && tweet.topic_flags[i] ? 1 : 0);
  }
  if (e.ids.empty()) {
    e.ids.push_back(Vocabulary::kUnk);
    e.flags.push_back(0);
  }
  return e;
}

// Row i = table[id_i] (++ topic[flag_i] when use_topic); rows past the
// tweet are PAD: zeros in the word channel and topic[0] in the topic channel.
template <typename T>
Matrix<T> embed(const EncodedTweet& tweet, const EmbeddingMatrix<T>& emb, int seq_len, bool use_topic) {
  const int d = emb.dim();
  const int d_in = d + (use_topic ? emb.topic_dim() : 0);
  Matrix<T> X = Matrix<T>::Zero(seq_len, d_in);
  const int n = std::min(tweet.length(), seq_len);
  for (int i = 0; i < n; ++i) {
    const int id = tweet.ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= emb.vocab_size())
      throw ShapeError("embed: token index " + std::to_string(id) + " outside table of " +
                       std::to_string(emb.vocab_size()) + " rows");
    X.row(i).head(d) = emb.table.row(id);
  }
  if (use_topic)
    for (int i = 0; i < seq_len; ++i) {
      const int flag = i < n ? tweet.flags[static_cast<std::size_t>(i)] : 0;
      X.row(i).tail(emb.topic_dim()) = emb.topic.row(flag);
    }
  return X;
}

template <typename T>
Matrix<T> embed(const TokenizedTweet& tweet, const Vocabulary& vocab, const EmbeddingMatrix<T>& emb, int seq_len,
                bool use_topic) {
  return embed(encode_tweet(tweet, vocab, seq_len), emb, seq_len, use_topic);
}

// Gradient accumulator for the embedding. The word table gradient is dense
// in storage but only touched rows are cleared between batches.
template <typename T>
struct EmbeddingGrad {
  Matrix<T> table;
  Matrix<T> topic;
  std::vector<int> touched;

  explicit EmbeddingGrad(const EmbeddingMatrix<T>& emb)
      : table(Matrix<T>::Zero(emb.table.rows(), emb.table.cols())),
        topic(Matrix<T>::Zero(emb.topic.rows(), emb.topic.cols())) {}

  void clear() {
    for (const int r : touched) table.row(r).setZero();
    touched.clear();
    topic.setZero();
  }
};

// Routes dX back into the table rows and topic vectors used by `embed`.
// PAD never receives gradient; a frozen table receives none at all.
template <typename T>
void embed_backward(const EncodedTweet& tweet, const Matrix<T>& dX, const EmbeddingMatrix<T>& emb, bool use_topic,
                    EmbeddingGrad<T>& grad) {
  const int d = emb.dim();
  const int seq_len = static_cast<int>(dX.rows());
  const int n = std::min(tweet.length(), seq_len);
  if (!emb.frozen)
    for (int i = 0; i < n; ++i) {
      const int id = tweet.ids[static_cast<std::size_t>(i)];
      if (id == Vocabulary::kPad) continue;
      grad.table.row(id) += dX.row(i).head(d);
      grad.touched.push_back(id);
    }
  if (use_topic)
    for (int i = 0; i < seq_len; ++i) {
      const int flag = i < n ? tweet.flags[static_cast<std::size_t>(i)] : 0;
      grad.topic.row(flag) += dX.row(i).tail(emb.topic_dim());
    }
}

}  // namespace tp
