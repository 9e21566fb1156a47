#include "tweetpolarity/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tp {

void SkipGramConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("skipgram: dim must be >= 1");
  if (window < 1) throw std::invalid_argument("skipgram: window must be >= 1");
  if (negatives < 1) throw std::invalid_argument("skipgram: negatives must be >= 1");
  if (epochs < 1) throw std::invalid_argument("skipgram: epochs must be >= 1");
  if (!(initial_lr > 0) || !(final_lr > 0) || final_lr > initial_lr)
    throw std::invalid_argument("skipgram: need 0 < final_lr <= initial_lr");
  if (!(subsample_t > 0)) throw std::invalid_argument("skipgram: subsample_t must be > 0");
  if (topic_dim < 0) throw std::invalid_argument("skipgram: topic_dim must be >= 0");
}

UnigramSampler::UnigramSampler(std::span<const std::int64_t> counts, double power) {
  cdf_.reserve(counts.size());
  double acc = 0.0;
  for (const auto c : counts) {
    acc += c > 0 ? std::pow(static_cast<double>(c), power) : 0.0;
    cdf_.push_back(acc);
  }
  if (acc <= 0.0) throw DataError("unigram sampler: all counts are zero");
  for (auto& x : cdf_) x /= acc;
  cdf_.back() = 1.0;
}

int UnigramSampler::sample(Rng& rng) const {
  const double u = uniform01(rng);
  return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

double UnigramSampler::probability(int index) const {
  const auto i = static_cast<std::size_t>(index);
  return cdf_.at(i) - (i == 0 ? 0.0 : cdf_[i - 1]);
}

double keep_probability(std::int64_t count, std::int64_t total, double t) {
  const double freq = static_cast<double>(count) / static_cast<double>(total);
  return freq <= t ? 1.0 : std::sqrt(t / freq);
}

namespace {

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

double sgns_loss(const SkipGramModel& m, int center, int context, std::span<const int> negatives) {
  const auto v = m.in.row(center).cast<double>();
  double loss = -log_sigmoid(v.dot(m.out.row(context).cast<double>()));
  for (const int n : negatives) loss -= log_sigmoid(-v.dot(m.out.row(n).cast<double>()));
  return loss;
}

void sgns_update(SkipGramModel& m, int center, int context, std::span<const int> negatives, float lr) {
  const Eigen::RowVectorXf v = m.in.row(center);
  Eigen::RowVectorXf dv = Eigen::RowVectorXf::Zero(v.size());
  auto step = [&](int target, float label) {
    const float g = lr * (label - sigmoid(v.dot(m.out.row(target))));
    dv += g * m.out.row(target);
    m.out.row(target) += g * v;
  };
  step(context, 1.0f);
  for (const int n : negatives) step(n, 0.0f);
  m.in.row(center) += dv;
}

EmbeddingMatrix<float> train_skipgram(std::span<const std::vector<std::string>> corpus, const Vocabulary& vocab,
                                      const SkipGramConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<int>> sentences;
  std::int64_t total = 0;
  for (const auto& tweet : corpus) {
    std::vector<int> ids;
    for (const auto& t : tweet) {
      const int id = vocab.index_of(t);
      if (id != Vocabulary::kUnk && id != Vocabulary::kPad) ids.push_back(id);
    }
    total += static_cast<std::int64_t>(ids.size());
    if (!ids.empty()) sentences.push_back(std::move(ids));
  }
  if (total == 0) throw DataError("skipgram: empty corpus (no in-vocabulary tokens)");

  std::vector<std::int64_t> counts(static_cast<std::size_t>(vocab.size()), 0);
  for (const auto& s : sentences)
    for (const int id : s) ++counts[static_cast<std::size_t>(id)];
  const UnigramSampler sampler(counts);
  std::vector<double> keep(counts.size(), 1.0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) keep[i] = keep_probability(counts[i], total, cfg.subsample_t);

  Rng rng(cfg.seed);
  const int V = vocab.size();
  SkipGramModel m{Matrix<float>(V, cfg.dim), Matrix<float>::Zero(V, cfg.dim)};
  const double init = 0.5 / cfg.dim;
  fill_uniform(m.in, rng, -init, init);

  const double steps = static_cast<double>(total) * cfg.epochs;
  double seen = 0;
  std::vector<int> kept, negs(static_cast<std::size_t>(cfg.negatives));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& s : sentences) {
      kept.clear();
      for (const int id : s)
        if (keep[static_cast<std::size_t>(id)] >= 1.0 || uniform01(rng) < keep[static_cast<std::size_t>(id)])
          kept.push_back(id);
      seen += static_cast<double>(s.size());
      const float lr = static_cast<float>(cfg.initial_lr - (cfg.initial_lr - cfg.final_lr) * std::min(1.0, seen / steps));
      const int n = static_cast<int>(kept.size());
      for (int i = 0; i < n; ++i) {
        const int b = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.window)));
        for (int j = std::max(0, i - b); j <= std::min(n - 1, i + b); ++j) {
          if (j == i) continue;
          const int context = kept[static_cast<std::size_t>(j)];
          std::size_t k = 0;
          while (k < negs.size()) {
            const int neg = sampler.sample(rng);
            if (neg != context) negs[k++] = neg;
          }
          sgns_update(m, kept[static_cast<std::size_t>(i)], context, negs, lr);
        }
      }
    }
  }

  EmbeddingMatrix<float> e;
  e.table = std::move(m.in);
  e.table.row(Vocabulary::kPad).setZero();
  e.topic.resize(2, cfg.topic_dim);
  fill_uniform(e.topic, rng, -0.25, 0.25);
  return e;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingMatrix<float>& emb,
                                                              const Vocabulary& vocab, std::string_view token, int k) {
  if (!vocab.contains(token)) throw DataError("nearest_neighbors: unknown token '" + std::string(token) + "'");
  const int q = vocab.index_of(token);
  std::vector<std::pair<std::string, double>> all;
  for (int i = 0; i < emb.vocab_size(); ++i) {
    if (i == q || i == Vocabulary::kPad || i == Vocabulary::kUnk) continue;
    all.emplace_back(vocab.token_of(i), cosine(emb.table.row(q), emb.table.row(i)));
  }
  const auto top = std::min<std::size_t>(all.size(), static_cast<std::size_t>(std::max(0, k)));
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(top), all.end(),
                    [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  all.resize(top);
  return all;
}

}  // namespace tp
