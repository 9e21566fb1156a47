#pragma once

// Recurrent cells and the bidirectional LSTM classifier.
//
// Gate pre-activations are stacked into one 4m vector in the order
// [forget, input, output, candidate]:
//   f = sigmoid(W_f x + U_f h + b_f)     i = sigmoid(W_i x + U_i h + b_i)
//   o = sigmoid(W_o x + U_o h + b_o)     g = tanh(W_c x + U_c h + b_c)
//   c' = f .* c + i .* g                 h' = o .* tanh(c')

#include <cstdint>
#include <string>
#include <vector>

#include "tweetpolarity/embedding.hpp"
#include "tweetpolarity/tensor.hpp"

namespace tp {

enum Gate : int { kForget = 0, kInput = 1, kOutput = 2, kCandidate = 3 };

template <typename T>
struct LstmCellParams {
  Matrix<T> W;  // 4m x d_in
  Matrix<T> U;  // 4m x m
  Vector<T> b;  // 4m

  int units() const { return static_cast<int>(U.cols()); }
  int input_dim() const { return static_cast<int>(W.cols()); }

  auto gate_bias(Gate g) { return b.segment(g * units(), units()); }
  auto gate_W(Gate g) { return W.middleRows(g * units(), units()); }
  auto gate_U(Gate g) { return U.middleRows(g * units(), units()); }

  static LstmCellParams zeros(int input_dim, int units) {
    return {Matrix<T>::Zero(4 * units, input_dim), Matrix<T>::Zero(4 * units, units), Vector<T>::Zero(4 * units)};
  }

  // Weights ~ U(-0.05, 0.05), forget bias 1, other biases 0.
  static LstmCellParams init(int input_dim, int units, Rng& rng) {
    LstmCellParams p = zeros(input_dim, units);
    fill_uniform(p.W, rng, -0.05, 0.05);
    fill_uniform(p.U, rng, -0.05, 0.05);
    p.gate_bias(kForget).setConstant(T(1));
    return p;
  }

  void append_tensors(const std::string& tag, std::vector<TensorRef<T>>& out) {
    out.push_back(tensor_ref(tag + ".W", W));
    out.push_back(tensor_ref(tag + ".U", U));
    out.push_back(tensor_ref(tag + ".b", b));
  }

  template <typename U2>
  LstmCellParams<U2> cast() const {
    return {W.template cast<U2>(), U.template cast<U2>(), b.template cast<U2>()};
  }
};

template <typename T>
struct LstmStep {
  Vector<T> gates;  // activated [f, i, o, g]
  Vector<T> c;
  Vector<T> h;
  Vector<T> tanh_c;
};

template <typename T>
LstmStep<T> lstm_cell(const Eigen::Ref<const Vector<T>>& x, const Eigen::Ref<const Vector<T>>& h_prev,
                      const Eigen::Ref<const Vector<T>>& c_prev, const LstmCellParams<T>& p) {
  const Eigen::Index m = p.units();
  if (x.size() != p.W.cols() || h_prev.size() != m || c_prev.size() != m)
    throw ShapeError("lstm_cell: x " + shape_str(x.size(), 1) + " h " + shape_str(h_prev.size(), 1) + " c " +
                     shape_str(c_prev.size(), 1) + " vs W " + shape_str(p.W.rows(), p.W.cols()));
  LstmStep<T> s;
  s.gates = p.W * x + p.U * h_prev + p.b;
  s.gates.head(3 * m) = sigmoid(s.gates.head(3 * m));
  s.gates.tail(m) = tanh(s.gates.tail(m));
  const auto f = s.gates.segment(kForget * m, m);
  const auto i = s.gates.segment(kInput * m, m);
  const auto o = s.gates.segment(kOutput * m, m);
  const auto g = s.gates.segment(kCandidate * m, m);
  s.c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
  s.tanh_c = tanh(s.c);
  s.h = o.cwiseProduct(s.tanh_c);
  debug_check_finite(s.h);
  return s;
}

template <typename T>
struct CellInputGrads {
  Vector<T> dx;
  Vector<T> dh_prev;
  Vector<T> dc_prev;
};

// Backward through one step given dL/dh and dL/dc flowing into its outputs.
template <typename T>
CellInputGrads<T> lstm_cell_backward(const Eigen::Ref<const Vector<T>>& x, const Eigen::Ref<const Vector<T>>& h_prev,
                                     const Eigen::Ref<const Vector<T>>& c_prev, const LstmStep<T>& s,
                                     const LstmCellParams<T>& p, const Eigen::Ref<const Vector<T>>& dh,
                                     const Eigen::Ref<const Vector<T>>& dc_in, LstmCellParams<T>& grads) {
  const Eigen::Index m = p.units();
  const auto f = s.gates.segment(kForget * m, m).array();
  const auto i = s.gates.segment(kInput * m, m).array();
  const auto o = s.gates.segment(kOutput * m, m).array();
  const auto g = s.gates.segment(kCandidate * m, m).array();
  const auto tc = s.tanh_c.array();

  const Vector<T> dc = (dc_in.array() + dh.array() * o * (T(1) - tc * tc)).matrix();
  Vector<T> dz(4 * m);
  dz.segment(kForget * m, m) = (dc.array() * c_prev.array() * f * (T(1) - f)).matrix();
  dz.segment(kInput * m, m) = (dc.array() * g * i * (T(1) - i)).matrix();
  dz.segment(kOutput * m, m) = (dh.array() * tc * o * (T(1) - o)).matrix();
  dz.segment(kCandidate * m, m) = (dc.array() * i * (T(1) - g * g)).matrix();

  grads.W.noalias() += dz * x.transpose();
  grads.U.noalias() += dz * h_prev.transpose();
  grads.b += dz;
  return {p.W.transpose() * dz, p.U.transpose() * dz, (dc.array() * f).matrix()};
}

// Plain tanh recurrence h' = tanh(W x + U h + b); a reference cell for
// gradient checking.
template <typename T>
struct RnnCellParams {
  Matrix<T> W;
  Matrix<T> U;
  Vector<T> b;
};

template <typename T>
Vector<T> rnn_cell(const Eigen::Ref<const Vector<T>>& x, const Eigen::Ref<const Vector<T>>& h_prev,
                   const RnnCellParams<T>& p) {
  if (x.size() != p.W.cols() || h_prev.size() != p.U.cols() || p.U.rows() != p.b.size() || p.W.rows() != p.b.size())
    throw ShapeError("rnn_cell: x " + shape_str(x.size(), 1) + " h " + shape_str(h_prev.size(), 1) + " vs W " +
                     shape_str(p.W.rows(), p.W.cols()) + " U " + shape_str(p.U.rows(), p.U.cols()));
  return tanh(p.W * x + p.U * h_prev + p.b);
}

template <typename T>
CellInputGrads<T> rnn_cell_backward(const Eigen::Ref<const Vector<T>>& x, const Eigen::Ref<const Vector<T>>& h_prev,
                                    const Eigen::Ref<const Vector<T>>& h, const RnnCellParams<T>& p,
                                    const Eigen::Ref<const Vector<T>>& dh, RnnCellParams<T>& grads) {
  const Vector<T> dz = (dh.array() * (T(1) - h.array() * h.array())).matrix();
  grads.W.noalias() += dz * x.transpose();
  grads.U.noalias() += dz * h_prev.transpose();
  grads.b += dz;
  return {p.W.transpose() * dz, p.U.transpose() * dz, Vector<T>()};
}

// ---------------------------------------------------------------------------
// Bidirectional LSTM classifier

struct BiLstmConfig {
  int units = 200;
  int hidden = 30;
  int num_classes = 3;
  int seq_len = 80;
  double dropout = 0.5;
};

template <typename T>
struct BiLstmParams {
  LstmCellParams<T> fw;
  LstmCellParams<T> bw;
  Matrix<T> W_hidden;  // hidden x 2m
  Vector<T> b_hidden;
  Matrix<T> W_out;
  Vector<T> b_out;
  std::uint64_t revision = 0;

  int input_dim() const { return fw.input_dim(); }

  static BiLstmParams init(const BiLstmConfig& cfg, int input_dim, Rng& rng) {
    BiLstmParams p;
    p.fw = LstmCellParams<T>::init(input_dim, cfg.units, rng);
    p.bw = LstmCellParams<T>::init(input_dim, cfg.units, rng);
    const double g1 = std::sqrt(6.0 / (2 * cfg.units + cfg.hidden));
    p.W_hidden.resize(cfg.hidden, 2 * cfg.units);
    fill_uniform(p.W_hidden, rng, -g1, g1);
    p.b_hidden = Vector<T>::Zero(cfg.hidden);
    const double g2 = std::sqrt(6.0 / (cfg.hidden + cfg.num_classes));
    p.W_out.resize(cfg.num_classes, cfg.hidden);
    fill_uniform(p.W_out, rng, -g2, g2);
    p.b_out = Vector<T>::Zero(cfg.num_classes);
    return p;
  }

  BiLstmParams zeros_like() const {
    BiLstmParams z = *this;
    for (auto& t : z.tensors()) std::fill(t.data.begin(), t.data.end(), T(0));
    z.revision = 0;
    return z;
  }

  std::vector<TensorRef<T>> tensors() {
    std::vector<TensorRef<T>> out;
    fw.append_tensors("lstm.fw", out);
    bw.append_tensors("lstm.bw", out);
    out.push_back(tensor_ref("lstm.hidden.W", W_hidden));
    out.push_back(tensor_ref("lstm.hidden.b", b_hidden));
    out.push_back(tensor_ref("lstm.out.W", W_out));
    out.push_back(tensor_ref("lstm.out.b", b_out));
    return out;
  }

  template <typename U>
  BiLstmParams<U> cast() const {
    BiLstmParams<U> p;
    p.fw = fw.template cast<U>();
    p.bw = bw.template cast<U>();
    p.W_hidden = W_hidden.template cast<U>();
    p.b_hidden = b_hidden.template cast<U>();
    p.W_out = W_out.template cast<U>();
    p.b_out = b_out.template cast<U>();
    return p;
  }
};

template <typename T>
struct BiLstmCache {
  const BiLstmParams<T>* params = nullptr;
  std::uint64_t revision = 0;
  int true_len = 0;
  Matrix<T> input_mask;  // true_len x d_in
  Matrix<T> Xd;          // dropped input rows
  std::vector<LstmStep<T>> fw;  // fw[t] after reading token t
  std::vector<LstmStep<T>> bw;  // bw[t] after reading token t (right to left)
  Vector<T> concat;
  Vector<T> concat_mask;
  Vector<T> hidden_pre;
  Vector<T> hidden_mask;
  Vector<T> hidden_out;
  Vector<T> logits;
  Vector<T> probs;
};

template <typename T>
BiLstmCache<T> bilstm_forward(const Matrix<T>& X, int true_len, const BiLstmParams<T>& p, const BiLstmConfig& cfg,
                              Rng& rng, bool train) {
  if (true_len < 1 || true_len > X.rows())
    throw ShapeError("bilstm_forward: true length " + std::to_string(true_len) + " outside [1, " +
                     std::to_string(X.rows()) + "]");
  if (X.cols() != p.input_dim())
    throw ShapeError("bilstm_forward: input " + shape_str(X.rows(), X.cols()) + " vs input dim " +
                     std::to_string(p.input_dim()));
  const Eigen::Index m = p.fw.units();
  BiLstmCache<T> c;
  c.params = &p;
  c.revision = p.revision;
  c.true_len = true_len;
  auto din = dropout<Matrix<T>>(X.topRows(true_len), cfg.dropout, rng, train);
  c.input_mask = std::move(din.mask);
  c.Xd = std::move(din.y);

  const Vector<T> zero = Vector<T>::Zero(m);
  c.fw.reserve(static_cast<std::size_t>(true_len));
  for (int t = 0; t < true_len; ++t) {
    const Vector<T>& h = t == 0 ? zero : c.fw.back().h;
    const Vector<T>& cs = t == 0 ? zero : c.fw.back().c;
    c.fw.push_back(lstm_cell<T>(c.Xd.row(t).transpose(), h, cs, p.fw));
  }
  c.bw.resize(static_cast<std::size_t>(true_len));
  for (int t = true_len - 1; t >= 0; --t) {
    const bool first = t == true_len - 1;
    const Vector<T>& h = first ? zero : c.bw[static_cast<std::size_t>(t + 1)].h;
    const Vector<T>& cs = first ? zero : c.bw[static_cast<std::size_t>(t + 1)].c;
    c.bw[static_cast<std::size_t>(t)] = lstm_cell<T>(c.Xd.row(t).transpose(), h, cs, p.bw);
  }
  c.concat.resize(2 * m);
  c.concat << c.fw.back().h, c.bw.front().h;
  auto dmid = dropout(c.concat, cfg.dropout, rng, train);
  c.concat_mask = std::move(dmid.mask);
  c.hidden_pre = affine<T>(dmid.y, p.W_hidden, p.b_hidden);
  auto dh = dropout<Vector<T>>(relu(c.hidden_pre), cfg.dropout, rng, train);
  c.hidden_mask = std::move(dh.mask);
  c.hidden_out = std::move(dh.y);
  c.logits = affine<T>(c.hidden_out, p.W_out, p.b_out);
  c.probs = softmax<T>(c.logits);
  return c;
}

// Backpropagation through time. Returns dLoss/dX with X's full row count;
// rows at and beyond true_len are zero.
template <typename T>
Matrix<T> bilstm_backward(const BiLstmParams<T>& p, const BiLstmCache<T>& c, const Vector<T>& dlogits,
                          Eigen::Index seq_rows, BiLstmParams<T>& grads) {
  if (c.params != &p || c.revision != p.revision)
    throw std::logic_error("bilstm_backward: stale cache (parameters changed since forward)");
  if (dlogits.size() != c.logits.size())
    throw ShapeError("bilstm_backward: dlogits " + shape_str(dlogits.size(), 1) + " vs logits " +
                     shape_str(c.logits.size(), 1));
  const Eigen::Index m = p.fw.units();
  const int n = c.true_len;

  grads.W_out.noalias() += dlogits * c.hidden_out.transpose();
  grads.b_out += dlogits;
  Vector<T> dhidden = (p.W_out.transpose() * dlogits).cwiseProduct(c.hidden_mask);
  dhidden = (c.hidden_pre.array() > T(0)).select(dhidden, T(0));
  grads.W_hidden.noalias() += dhidden * c.concat.cwiseProduct(c.concat_mask).transpose();
  grads.b_hidden += dhidden;
  const Vector<T> dconcat = (p.W_hidden.transpose() * dhidden).cwiseProduct(c.concat_mask);

  Matrix<T> dXd = Matrix<T>::Zero(n, p.input_dim());
  const Vector<T> zero = Vector<T>::Zero(m);

  Vector<T> dh = dconcat.head(m);
  Vector<T> dc = zero;
  for (int t = n - 1; t >= 0; --t) {
    const auto& s = c.fw[static_cast<std::size_t>(t)];
    const Vector<T>& h_prev = t == 0 ? zero : c.fw[static_cast<std::size_t>(t - 1)].h;
    const Vector<T>& c_prev = t == 0 ? zero : c.fw[static_cast<std::size_t>(t - 1)].c;
    auto g = lstm_cell_backward<T>(c.Xd.row(t).transpose(), h_prev, c_prev, s, p.fw, dh, dc, grads.fw);
    dXd.row(t) += g.dx.transpose();
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }

  dh = dconcat.tail(m);
  dc = zero;
  for (int t = 0; t < n; ++t) {
    const auto& s = c.bw[static_cast<std::size_t>(t)];
    const bool first = t == n - 1;
    const Vector<T>& h_prev = first ? zero : c.bw[static_cast<std::size_t>(t + 1)].h;
    const Vector<T>& c_prev = first ? zero : c.bw[static_cast<std::size_t>(t + 1)].c;
    auto g = lstm_cell_backward<T>(c.Xd.row(t).transpose(), h_prev, c_prev, s, p.bw, dh, dc, grads.bw);
    dXd.row(t) += g.dx.transpose();
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }

  Matrix<T> dX = Matrix<T>::Zero(seq_rows, p.input_dim());
  dX.topRows(n) = dXd.cwiseProduct(c.input_mask);
  return dX;
}

}  // namespace tp
