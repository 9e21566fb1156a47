#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "doctest.h"
#include "tweetpolarity/gradcheck.hpp"
#include "tweetpolarity/models.hpp"

using tp::Matrix;
using tp::Vector;

namespace {

tp::ArchConfig tiny_arch() {
  tp::ArchConfig a;
  a.seq_len = 6;
  a.filter_sizes = {1, 2, 3};
  a.num_filters = 2;
  a.lstm_units = 3;
  a.hidden = 5;
  return a;
}

tp::EncodedTweet tweet_of(std::vector<int> ids, std::vector<std::uint8_t> flags = {}) {
  tp::EncodedTweet t;
  t.ids = std::move(ids);
  t.flags = flags.empty() ? std::vector<std::uint8_t>(t.ids.size(), 0) : std::move(flags);
  return t;
}

template <typename Derived>
bool all_zero(const Eigen::MatrixBase<Derived>& m) {
  return (m.array() == 0).all();
}

}  // namespace

TEST_CASE("embed") {
  tp::Rng rng(1);
  auto emb = tp::EmbeddingMatrix<double>::random(10, 4, 5, rng);
  CHECK(all_zero(emb.table.row(0)));

  const auto X = tp::embed(tweet_of({4, 5, 6}), emb, 80, false);
  CHECK(X.rows() == 80);
  CHECK(X.cols() == 4);
  CHECK(X.row(1) == emb.table.row(5));
  CHECK(all_zero(X.bottomRows(77)));

  tp::Vocabulary vocab = tp::Vocabulary::build(std::vector<std::vector<std::string>>{{"a", "b"}}, 1);
  tp::TokenizedTweet tw;
  tw.tokens = {"a", "never-seen"};
  tw.topic_flags = {false, true};
  auto small = tp::EmbeddingMatrix<double>::random(vocab.size(), 4, 5, rng);
  const auto Xu = tp::embed(tw, vocab, small, 6, true);
  CHECK(Xu.cols() == 9);
  CHECK(Xu.row(1).head(4) == small.table.row(tp::Vocabulary::kUnk));
  CHECK(Xu.row(0).tail(5) == small.topic.row(0));
  CHECK(Xu.row(1).tail(5) == small.topic.row(1));
  for (int i = 2; i < 6; ++i) {
    CHECK(all_zero(Xu.row(i).head(4)));
    CHECK(Xu.row(i).tail(5) == small.topic.row(0));
  }

  SUBCASE("truncation at the sequence length") {
    std::vector<int> ids(100, 3);
    ids[79] = 7;
    const auto enc = tp::encode_tweet(tp::TokenizedTweet{std::vector<std::string>(100, "a"), std::vector<bool>(100)},
                                      vocab, 80);
    CHECK(enc.length() == 80);
    const auto Xt = tp::embed(tweet_of(ids), emb, 80, false);
    CHECK(Xt.row(79) == emb.table.row(7));
  }
  SUBCASE("empty and PAD-literal tweets") {
    const auto e = tp::encode_tweet(tp::TokenizedTweet{}, vocab, 80);
    CHECK(e.ids == std::vector<int>{tp::Vocabulary::kUnk});
    const auto p = tp::encode_tweet(tp::TokenizedTweet{{"<pad>"}, {false}}, vocab, 80);
    CHECK(p.ids == std::vector<int>{tp::Vocabulary::kUnk});
  }
}

TEST_CASE("cnn forward") {
  tp::Rng rng(3);
  tp::CnnConfig cfg;
  cfg.seq_len = 80;
  cfg.num_filters = 200;
  cfg.num_classes = 3;
  auto p = tp::CnnParams<float>::init(cfg, 200, rng);
  CHECK(cfg.pooled_dim() == 600);
  CHECK(p.W_hidden.rows() == 30);
  CHECK(p.W_hidden.cols() == 600);

  SUBCASE("all-zero input with zero biases is uniform") {
    const Matrix<float> X = Matrix<float>::Zero(80, 200);
    const auto c = tp::cnn_forward(X, p, cfg, rng, false);
    for (int k = 0; k < 3; ++k) CHECK(c.probs(k) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("probabilities on random input, train and eval") {
    auto emb = tp::EmbeddingMatrix<float>::random(50, 200, 5, rng);
    for (bool train : {false, true}) {
      const auto X = tp::embed(tweet_of({3, 9, 12, 40, 2}), emb, 80, false);
      const auto c = tp::cnn_forward(X, p, cfg, rng, train);
      CHECK(c.probs.size() == 3);
      CHECK(std::abs(c.probs.sum() - 1.0f) < 1e-6f);
    }
  }
  SUBCASE("bit-identical across runs under a fixed seed") {
    auto emb = tp::EmbeddingMatrix<float>::random(50, 200, 5, rng);
    const auto X = tp::embed(tweet_of({3, 9, 12, 40, 2}), emb, 80, false);
    tp::Rng r1(77), r2(77);
    const auto a = tp::cnn_forward(X, p, cfg, r1, true);
    const auto b = tp::cnn_forward(X, p, cfg, r2, true);
    CHECK(std::memcmp(a.probs.data(), b.probs.data(), sizeof(float) * 3) == 0);
  }
  SUBCASE("shape errors") {
    const Matrix<float> X = Matrix<float>::Zero(79, 200);
    CHECK_THROWS_AS(tp::cnn_forward(X, p, cfg, rng, false), tp::ShapeError);
    tp::CnnConfig bad = cfg;
    bad.filter_sizes = {3, 90};
    CHECK_THROWS_AS(tp::CnnParams<float>::init(bad, 200, rng), tp::ShapeError);
  }
}

TEST_CASE("cnn output ignores the order of PAD rows") {
  tp::Rng rng(8);
  const auto arch = tiny_arch();
  auto emb = tp::EmbeddingMatrix<double>::random(10, 4, 5, rng);
  auto p = tp::ModelParams<double>::init(tp::ModelKind::Cnn, arch, 3, 9, true, rng);
  auto X = tp::embed(tweet_of({2, 3}, {0, 1}), emb, 6, true);
  auto rng0 = tp::Rng(0);
  const auto base = tp::cnn_forward(X, p.cnn, arch.cnn(3), rng0, false).probs;
  // rows 2..5 are identical PAD rows; reverse them
  Matrix<double> Y = X;
  for (int i = 2; i < 6; ++i) Y.row(i) = X.row(7 - i);
  const auto perm = tp::cnn_forward(Y, p.cnn, arch.cnn(3), rng0, false).probs;
  CHECK(base == perm);
}

TEST_CASE("cnn backward contracts") {
  tp::Rng rng(5);
  const auto arch = tiny_arch();
  auto emb = tp::EmbeddingMatrix<double>::random(10, 4, 5, rng);
  auto p = tp::ModelParams<double>::init(tp::ModelKind::Cnn, arch, 3, 4, false, rng);
  const auto X = tp::embed(tweet_of({2, 3, 4}), emb, 6, false);
  const auto cache = tp::cnn_forward(X, p.cnn, arch.cnn(3), rng, true);

  auto grads = p.cnn.zeros_like();
  const Matrix<double> dX = tp::cnn_backward(p.cnn, cache, Vector<double>(Vector<double>::Zero(3)), grads);
  CHECK(all_zero(dX));
  for (auto& t : grads.tensors())
    for (double v : t.data) CHECK(v == 0.0);

  ++p.cnn.revision;
  CHECK_THROWS_AS(tp::cnn_backward(p.cnn, cache, Vector<double>(Vector<double>::Ones(3)), grads), std::logic_error);
}

TEST_CASE("frozen embeddings receive no gradient") {
  tp::Rng rng(6);
  const auto arch = tiny_arch();
  for (const auto kind : {tp::ModelKind::Cnn, tp::ModelKind::BiLstm}) {
    auto emb = tp::EmbeddingMatrix<double>::random(10, 4, 5, rng);
    emb.frozen = true;
    auto p = tp::ModelParams<double>::init(kind, arch, 3, 4, false, rng);
    auto grads = p.zeros_like();
    tp::EmbeddingGrad<double> eg(emb);
    tp::model_step<double>(p, arch, emb, tweet_of({2, 3, 4}), 1, 1.0, rng, true, &grads, &eg);
    CHECK(all_zero(eg.table));
    emb.frozen = false;
    tp::model_step<double>(p, arch, emb, tweet_of({2, 3, 4}), 1, 1.0, rng, false, &grads, &eg);
    CHECK_FALSE(all_zero(eg.table));
    // only rows of tokens in the tweet are touched
    for (int r = 0; r < 10; ++r)
      if (r < 2 || r > 4) CHECK(all_zero(eg.table.row(r)));
  }
}

TEST_CASE("lstm_cell") {
  const int m = 3, d = 2;
  auto p = tp::LstmCellParams<double>::zeros(d, m);
  const Vector<double> x = Vector<double>::Constant(d, 0.7);
  const Vector<double> zero = Vector<double>::Zero(m);

  auto s = tp::lstm_cell<double>(x, zero, zero, p);
  CHECK(all_zero(s.c));
  CHECK(all_zero(s.h));

  // forget gate saturated open: c' = sigmoid(40) * c + 0.5 * tanh(0) = c
  p.gate_bias(tp::kForget).setConstant(40.0);
  Vector<double> v(m);
  v << 0.3, -1.2, 2.5;
  s = tp::lstm_cell<double>(x, zero, v, p);
  CHECK((s.c - v).cwiseAbs().maxCoeff() < 1e-6);

  CHECK_THROWS_AS(tp::lstm_cell<double>(Vector<double>::Zero(d + 1), zero, zero, p), tp::ShapeError);
}

TEST_CASE("lstm_cell single-step gradient") {
  const int m = 3, d = 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    tp::Rng rng(seed);
    auto p = tp::LstmCellParams<double>::zeros(d, m);
    tp::fill_uniform(p.W, rng, -1, 1);
    tp::fill_uniform(p.U, rng, -1, 1);
    tp::fill_uniform(p.b, rng, -1, 1);
    Vector<double> x(d), h0(m), c0(m), a(m), b(m);
    for (auto* v : {&x, &h0, &c0, &a, &b}) tp::fill_uniform(*v, rng, -1, 1);
    // scalar objective a.h' + b.c'
    auto objective = [&] {
      const auto s = tp::lstm_cell<double>(x, h0, c0, p);
      return a.dot(s.h) + b.dot(s.c);
    };
    const auto s = tp::lstm_cell<double>(x, h0, c0, p);
    auto g = tp::LstmCellParams<double>::zeros(d, m);
    const auto in = tp::lstm_cell_backward<double>(x, h0, c0, s, p, a, b, g);
    tp::GradCheckOptions o;
    CHECK(tp::grad_check(objective, tp::as_span(p.W), tp::as_span(g.W), o) < 1e-6);
    CHECK(tp::grad_check(objective, tp::as_span(p.U), tp::as_span(g.U), o) < 1e-6);
    CHECK(tp::grad_check(objective, tp::as_span(p.b), tp::as_span(g.b), o) < 1e-6);
    CHECK(tp::grad_check(objective, tp::as_span(x), tp::as_span(in.dx), o) < 1e-6);
    CHECK(tp::grad_check(objective, tp::as_span(h0), tp::as_span(in.dh_prev), o) < 1e-6);
    CHECK(tp::grad_check(objective, tp::as_span(c0), tp::as_span(in.dc_prev), o) < 1e-6);
  }
}

TEST_CASE("rnn_cell") {
  tp::RnnCellParams<double> p{Matrix<double>::Zero(2, 3), Matrix<double>::Zero(2, 2), Vector<double>(2)};
  p.b << 0.4, -1.1;
  const auto h = tp::rnn_cell<double>(Vector<double>::Ones(3), Vector<double>::Ones(2), p);
  CHECK(h(0) == std::tanh(0.4));
  CHECK(h(1) == std::tanh(-1.1));

  // m = 1: tanh(1 * 0.5 + 1 * 0.25 + 0)
  tp::RnnCellParams<double> one{Matrix<double>::Ones(1, 1), Matrix<double>::Ones(1, 1), Vector<double>::Zero(1)};
  const auto h1 = tp::rnn_cell<double>(Vector<double>::Constant(1, 0.5), Vector<double>::Constant(1, 0.25), one);
  CHECK(h1(0) == std::tanh(0.75));

  CHECK_THROWS_AS(tp::rnn_cell<double>(Vector<double>::Ones(2), Vector<double>::Ones(2), p), tp::ShapeError);

  SUBCASE("gradient") {
    tp::Rng rng(12);
    tp::RnnCellParams<double> q{Matrix<double>(3, 4), Matrix<double>(3, 3), Vector<double>(3)};
    tp::fill_uniform(q.W, rng, -1, 1);
    tp::fill_uniform(q.U, rng, -1, 1);
    tp::fill_uniform(q.b, rng, -1, 1);
    Vector<double> x(4), h0(3), a(3);
    for (auto* v : {&x, &h0, &a}) tp::fill_uniform(*v, rng, -1, 1);
    auto objective = [&] { return a.dot(tp::rnn_cell<double>(x, h0, q)); };
    const Vector<double> h = tp::rnn_cell<double>(x, h0, q);
    tp::RnnCellParams<double> g{Matrix<double>::Zero(3, 4), Matrix<double>::Zero(3, 3), Vector<double>::Zero(3)};
    const auto in = tp::rnn_cell_backward<double>(x, h0, h, q, a, g);
    tp::GradCheckOptions o;
    o.h = 1e-5;
    CHECK(tp::grad_check(objective, tp::as_span(q.W), tp::as_span(g.W), o) < 1e-8);
    CHECK(tp::grad_check(objective, tp::as_span(q.U), tp::as_span(g.U), o) < 1e-8);
    CHECK(tp::grad_check(objective, tp::as_span(q.b), tp::as_span(g.b), o) < 1e-8);
    CHECK(tp::grad_check(objective, tp::as_span(x), tp::as_span(in.dx), o) < 1e-8);
    CHECK(tp::grad_check(objective, tp::as_span(h0), tp::as_span(in.dh_prev), o) < 1e-8);
  }
}

TEST_CASE("bilstm forward") {
  tp::Rng rng(21);
  tp::BiLstmConfig cfg;
  cfg.units = 2;
  cfg.hidden = 4;
  cfg.num_classes = 2;
  cfg.seq_len = 6;
  auto p = tp::BiLstmParams<double>::init(cfg, 3, rng);
  for (auto& t : p.tensors())
    for (auto& x : t.data) x = tp::uniform(rng, -0.8, 0.8);

  SUBCASE("mirrored weights on a palindrome give equal final states") {
    p.bw = p.fw;
    Matrix<double> X = Matrix<double>::Zero(6, 3);
    Vector<double> r0(3), r1(3);
    tp::fill_uniform(r0, rng, -1, 1);
    tp::fill_uniform(r1, rng, -1, 1);
    X.row(0) = r0.transpose();
    X.row(1) = r1.transpose();
    X.row(2) = r0.transpose();  // palindrome r0 r1 r0, PAD rows after
    const auto c = tp::bilstm_forward(X, 3, p, cfg, rng, false);
    CHECK((c.fw.back().h - c.bw.front().h).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.concat.size() == 4);
  }
  SUBCASE("probabilities and errors") {
    const Matrix<double> X = Matrix<double>::Random(6, 3);
    for (bool train : {false, true}) {
      const auto c = tp::bilstm_forward(X, 4, p, cfg, rng, train);
      CHECK(std::abs(c.probs.sum() - 1.0) < 1e-6);
    }
    CHECK_THROWS_AS(tp::bilstm_forward(X, 0, p, cfg, rng, false), tp::ShapeError);
    CHECK_THROWS_AS(tp::bilstm_forward(X, 7, p, cfg, rng, false), tp::ShapeError);
  }
  SUBCASE("PAD rows never influence the output") {
    Matrix<double> X = Matrix<double>::Random(6, 3);
    tp::Rng r1(4), r2(4);
    const auto a = tp::bilstm_forward(X, 3, p, cfg, r1, true);
    X.bottomRows(3).setRandom();
    const auto b = tp::bilstm_forward(X, 3, p, cfg, r2, true);
    CHECK(a.probs == b.probs);
  }
  SUBCASE("default size gives a 400-wide representation") {
    tp::BiLstmConfig full;
    auto big = tp::BiLstmParams<float>::init(full, 200, rng);
    CHECK(big.W_hidden.cols() == 400);
    CHECK(big.fw.b.segment(0, 200).minCoeff() == 1.0f);
  }
}

TEST_CASE("bilstm backward contracts") {
  tp::Rng rng(22);
  const auto arch = tiny_arch();
  auto p = tp::ModelParams<double>::init(tp::ModelKind::BiLstm, arch, 3, 4, false, rng);
  const Matrix<double> X = Matrix<double>::Random(6, 4);
  const auto cache = tp::bilstm_forward(X, 4, p.lstm, arch.bilstm(3), rng, true);
  auto grads = p.lstm.zeros_like();
  Matrix<double> dX = tp::bilstm_backward(p.lstm, cache, Vector<double>(Vector<double>::Zero(3)), 6, grads);
  CHECK(all_zero(dX));
  for (auto& t : grads.tensors())
    for (double v : t.data) CHECK(v == 0.0);

  dX = tp::bilstm_backward(p.lstm, cache, Vector<double>(Vector<double>::Ones(3)), 6, grads);
  CHECK(all_zero(dX.bottomRows(2)));

  ++p.lstm.revision;
  CHECK_THROWS_AS(tp::bilstm_backward(p.lstm, cache, Vector<double>(Vector<double>::Ones(3)), 6, grads), std::logic_error);
}

TEST_CASE("gradient check of both classifiers") {
  tp::GradCheckSuiteOptions opts;
  opts.num_seeds = 20;
  for (bool train : {true, false}) {
    opts.train_mode = train;
    const auto report = tp::run_gradcheck_suite(opts);
    INFO("train mode ", train, " worst ", report.worst());
    CHECK(report.passed(1e-3));
    std::set<std::string> groups;
    for (const auto& r : report.rows) groups.insert(r.model + "/" + r.group);
    CHECK(groups.count("cnn/embedding.topic") == 1);
    CHECK(groups.count("bilstm/embedding.topic") == 1);
    CHECK(groups.count("cnn/cnn.conv3.w") == 1);
    CHECK(groups.count("bilstm/lstm.bw.U") == 1);
  }
}
