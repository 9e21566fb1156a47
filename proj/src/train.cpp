#include "tweetpolarity/train.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>

namespace tp {

std::string_view to_string(Phase phase) { return phase == Phase::Distant ? "distant" : "supervised"; }

TrainSchedule TrainSchedule::distant() {
  TrainSchedule s;
  s.phase = Phase::Distant;
  s.frozen_epochs = 1;
  s.unfrozen_epochs = 6;
  s.lr_unfrozen_scale = 1.0;
  return s;
}

TrainSchedule TrainSchedule::supervised() { return {}; }

void TrainSchedule::validate() const {
  if (frozen_epochs < 0 || unfrozen_epochs < 0 || total_epochs() < 1)
    throw std::invalid_argument("schedule: need frozen_epochs, unfrozen_epochs >= 0 and at least one epoch");
  if (!(lr_initial > 0) || !(lr_unfrozen_scale > 0)) throw std::invalid_argument("schedule: learning rates must be > 0");
  if (batch_size < 1) throw std::invalid_argument("schedule: batch_size must be >= 1");
}

namespace {

struct Sample {
  EncodedTweet tweet;
  int label = 0;
};

void set_zero(ModelParams<float>& g) {
  for (auto& t : g.tensors()) std::fill(t.data.begin(), t.data.end(), 0.0f);
}

// One Adam state per parameter tensor plus the embedding table and topic
// vectors, all sharing one learning rate.
class Optimizer {
 public:
  Optimizer(ModelParams<float>& p, const EmbeddingMatrix<float>& emb, double lr) {
    const AdamConfig cfg{lr};
    for (auto& t : p.tensors()) params_.emplace_back(static_cast<Eigen::Index>(t.data.size()), cfg);
    table_ = AdamState<float>(emb.table.size(), cfg);
    topic_ = AdamState<float>(emb.topic.size(), cfg);
  }

  void set_lr(double lr) {
    for (auto& s : params_) s.cfg.lr = lr;
    table_.cfg.lr = lr;
    topic_.cfg.lr = lr;
  }
  double lr() const { return table_.cfg.lr; }
  void reset_table() { table_.reset(); }

  void step(ModelParams<float>& p, ModelParams<float>& g, EmbeddingMatrix<float>& emb, EmbeddingGrad<float>& eg) {
    auto pt = p.tensors();
    auto gt = g.tensors();
    for (std::size_t i = 0; i < pt.size(); ++i)
      adam_step<float>(pt[i].data, std::span<const float>(gt[i].data), params_[i]);
    if (!emb.frozen) {
      adam_step<float>(as_span(emb.table), std::span<const float>(as_span(eg.table)), table_);
      emb.table.row(Vocabulary::kPad).setZero();
    }
    if (p.use_topic) adam_step<float>(as_span(emb.topic), std::span<const float>(as_span(eg.topic)), topic_);
    p.bump_revision();
  }

 private:
  std::vector<AdamState<float>> params_;
  AdamState<float> table_;
  AdamState<float> topic_;
};

double accuracy(const ModelParams<float>& p, const ArchConfig& arch, const EmbeddingMatrix<float>& emb,
                const std::vector<Sample>& data) {
  Rng unused(0);
  std::size_t correct = 0;
  for (const auto& s : data) {
    const auto r = model_step<float>(p, arch, emb, s.tweet, std::nullopt, 1.0f, unused, false);
    Eigen::Index k = 0;
    r.probs.maxCoeff(&k);
    if (k == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<EpochStats> run_schedule(ModelParams<float>& p, EmbeddingMatrix<float>& emb, const ArchConfig& arch,
                                     const std::vector<Sample>& data, const std::vector<double>& class_w,
                                     const TrainSchedule& sched, Rng& rng, const TrainHooks& hooks) {
  Optimizer opt(p, emb, sched.lr_initial);
  ModelParams<float> grads = p.zeros_like();
  EmbeddingGrad<float> egrad(emb);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<EpochStats> history;

  for (int epoch = 1; epoch <= sched.total_epochs(); ++epoch) {
    const bool frozen = sched.frozen_at(epoch);
    if (!frozen && emb.frozen) opt.reset_table();
    emb.frozen = frozen;
    opt.set_lr(sched.lr_at(epoch));
    shuffle(order, rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(sched.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(sched.batch_size));
      set_zero(grads);
      egrad.clear();
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = data[order[i]];
        const auto w = static_cast<float>(class_w[static_cast<std::size_t>(s.label)]);
        loss_sum += model_step<float>(p, arch, emb, s.tweet, s.label, w, rng, true, &grads, &egrad).loss;
      }
      const float scale = 1.0f / static_cast<float>(end - start);
      for (auto& t : grads.tensors())
        for (auto& x : t.data) x *= scale;
      egrad.table *= scale;
      egrad.topic *= scale;
      opt.step(p, grads, emb, egrad);
    }
    if (!emb.table.allFinite() || !std::isfinite(loss_sum)) throw NumericError("training diverged in epoch " + std::to_string(epoch));

    EpochStats st;
    st.epoch = epoch;
    st.phase = sched.phase;
    st.frozen = frozen;
    st.lr = opt.lr();
    st.loss = loss_sum / static_cast<double>(data.size());
    st.accuracy = accuracy(p, arch, emb, data);
    history.push_back(st);
    if (hooks.log)
      *hooks.log << epoch << '\t' << to_string(sched.phase) << (frozen ? "-frozen" : "-unfrozen") << '\t'
                 << std::setprecision(6) << st.loss << '\t' << st.accuracy << '\n';
    if (hooks.on_epoch) hooks.on_epoch(st, emb);
  }
  emb.frozen = false;
  return history;
}

int input_dim(const EmbeddingMatrix<float>& emb, bool use_topic) {
  return emb.dim() + (use_topic ? emb.topic_dim() : 0);
}

}  // namespace

DistantResult distant_train(const EmbeddingMatrix<float>& emb, const Vocabulary& vocab, const DistantSet& data,
                            const ArchConfig& arch, const TrainSchedule& sched, const TrainHooks& hooks) {
  sched.validate();
  if (sched.phase != Phase::Distant) throw std::invalid_argument("distant_train: schedule phase must be distant");
  if (data.positives.empty() || data.negatives.empty())
    throw DataError("distant_train: need both positive and negative tweets");
  if (emb.vocab_size() != vocab.size()) throw ShapeError("distant_train: embedding rows do not match vocabulary size");

  std::vector<Sample> samples;
  for (const auto& t : data.negatives) samples.push_back({encode_tweet(t, vocab, arch.seq_len), 0});
  for (const auto& t : data.positives) samples.push_back({encode_tweet(t, vocab, arch.seq_len), 1});

  Rng rng(sched.seed);
  DistantResult out{emb, {}};
  auto p = ModelParams<float>::init(ModelKind::Cnn, arch, 2, input_dim(emb, false), false, rng);
  out.history = run_schedule(p, out.emb, arch, samples, {1.0, 1.0}, sched, rng, hooks);
  return out;
}

TrainedModel supervised_train(ModelKind kind, const Subtask& subtask, std::span<const Example> data,
                              const Vocabulary& vocab, const EmbeddingMatrix<float>& emb, const ArchConfig& arch,
                              const TrainSchedule& sched, const TrainHooks& hooks) {
  sched.validate();
  if (sched.phase != Phase::Supervised) throw std::invalid_argument("supervised_train: schedule phase must be supervised");
  if (data.empty()) throw DataError("supervised_train: empty dataset");
  if (emb.vocab_size() != vocab.size()) throw ShapeError("supervised_train: embedding rows do not match vocabulary size");
  const auto weights = class_weights(data, subtask.num_classes);

  std::vector<Sample> samples;
  samples.reserve(data.size());
  for (const auto& ex : data) samples.push_back({encode_tweet(ex.tweet, vocab, arch.seq_len), ex.label});

  Rng rng(sched.seed);
  TrainedModel m;
  m.kind = kind;
  m.subtask = subtask;
  m.arch = arch;
  m.emb = emb;
  m.params = ModelParams<float>::init(kind, arch, subtask.num_classes, input_dim(emb, subtask.has_topic),
                                      subtask.has_topic, rng);
  m.history = run_schedule(m.params, m.emb, arch, samples, weights, sched, rng, hooks);
  return m;
}

std::vector<Vector<float>> predict(const TrainedModel& model, const Vocabulary& vocab,
                                   std::span<const TokenizedTweet> tweets) {
  Rng unused(0);
  std::vector<Vector<float>> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets)
    out.push_back(model_step<float>(model.params, model.arch, model.emb, encode_tweet(t, vocab, model.arch.seq_len),
                                    std::nullopt, 1.0f, unused, false)
                      .probs);
  return out;
}

std::vector<Vector<float>> predict(const TrainedModel& model, const Vocabulary& vocab,
                                   std::span<const Example> examples) {
  std::vector<TokenizedTweet> tweets;
  tweets.reserve(examples.size());
  for (const auto& e : examples) tweets.push_back(e.tweet);
  return predict(model, vocab, tweets);
}

}  // namespace tp
