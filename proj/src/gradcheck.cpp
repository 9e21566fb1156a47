#include "tweetpolarity/gradcheck.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>

namespace tp {

double GradCheckReport::worst() const {
  double w = 0.0;
  for (const auto& r : rows) w = std::max(w, r.max_rel_error);
  return w;
}

void GradCheckReport::print(std::ostream& os) const {
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> agg;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.model, r.group);
    auto [it, fresh] = agg.try_emplace(key, 0.0, 0);
    if (fresh) order.push_back(key);
    it->second.first = std::max(it->second.first, r.max_rel_error);
    it->second.second += 1;
  }
  os << "model\tgroup\tseeds\tmax_rel_error\n";
  for (const auto& key : order) {
    const auto& [err, n] = agg.at(key);
    os << key.first << '\t' << key.second << '\t' << n << '\t' << std::scientific << std::setprecision(3) << err
       << std::defaultfloat << '\n';
  }
}

std::vector<GradCheckRow> grad_check_model(ModelParams<double>& params, const ArchConfig& arch,
                                           EmbeddingMatrix<double>& emb, const EncodedTweet& tweet, int label,
                                           double weight, std::uint64_t seed, double h, bool train_mode) {
  const std::uint64_t dropout_seed = seed * 0x9E3779B97F4A7C15ULL + 1;
  auto loss = [&] {
    Rng rng(dropout_seed);
    return model_step<double>(params, arch, emb, tweet, label, weight, rng, train_mode).loss;
  };

  ModelParams<double> grads = params.zeros_like();
  EmbeddingGrad<double> egrad(emb);
  {
    Rng rng(dropout_seed);
    model_step<double>(params, arch, emb, tweet, label, weight, rng, train_mode, &grads, &egrad);
  }

  GradCheckOptions opts;
  opts.h = h;
  std::vector<GradCheckRow> rows;
  const std::string model(to_string(params.kind));
  auto ptensors = params.tensors();
  auto gtensors = grads.tensors();
  for (std::size_t i = 0; i < ptensors.size(); ++i) {
    const double err = grad_check(loss, ptensors[i].data, gtensors[i].data, opts);
    rows.push_back({model, ptensors[i].name, seed, err});
  }
  rows.push_back({model, "embedding.table", seed, grad_check(loss, as_span(emb.table), as_span(egrad.table), opts)});
  if (params.use_topic)
    rows.push_back({model, "embedding.topic", seed, grad_check(loss, as_span(emb.topic), as_span(egrad.topic), opts)});
  return rows;
}

namespace {

void randomize(ModelParams<double>& p, Rng& rng) {
  for (auto& t : p.tensors())
    for (auto& x : t.data) x = uniform(rng, -0.5, 0.5);
}

EncodedTweet random_tweet(Rng& rng, int length, int vocab_size) {
  EncodedTweet t;
  for (int i = 0; i < length; ++i) {
    t.ids.push_back(1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(vocab_size - 1))));
    t.flags.push_back(uniform01(rng) < 0.3 ? 1 : 0);
  }
  return t;
}

}  // namespace

GradCheckReport run_gradcheck_suite(const GradCheckSuiteOptions& opts) {
  constexpr int kVocab = 10;
  constexpr int kDim = 4;
  constexpr int kTopicDim = 5;
  constexpr int kClasses = 3;

  ArchConfig arch;
  arch.seq_len = 6;
  arch.filter_sizes = {1, 2, 3};
  arch.num_filters = 2;
  arch.lstm_units = 3;
  arch.hidden = 5;

  GradCheckReport report;
  for (int s = 0; s < opts.num_seeds; ++s) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(s);
    for (const bool use_topic : {false, true}) {
      for (const ModelKind kind : {ModelKind::Cnn, ModelKind::BiLstm}) {
        Rng rng(seed * 31 + (kind == ModelKind::Cnn ? 1 : 2) + (use_topic ? 8 : 0));
        auto emb = EmbeddingMatrix<double>::random(kVocab, kDim, kTopicDim, rng, 1.0);
        const int d_in = kDim + (use_topic ? kTopicDim : 0);
        auto params = ModelParams<double>::init(kind, arch, kClasses, d_in, use_topic, rng);
        randomize(params, rng);
        const int length = kind == ModelKind::Cnn ? 1 + static_cast<int>(uniform_index(rng, 6)) : 4;
        const auto tweet = random_tweet(rng, length, kVocab);
        const int label = static_cast<int>(uniform_index(rng, kClasses));
        const double weight = uniform(rng, 0.5, 2.0);
        auto rows = grad_check_model(params, arch, emb, tweet, label, weight, seed, opts.h, opts.train_mode);
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
      }
    }
  }
  return report;
}

}  // namespace tp
