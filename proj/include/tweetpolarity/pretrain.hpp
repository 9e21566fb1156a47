#pragma once

// Skip-gram with negative sampling over a tokenized tweet corpus.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tweetpolarity/corpus.hpp"
#include "tweetpolarity/embedding.hpp"

namespace tp {

struct SkipGramConfig {
  int dim = 200;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  double final_lr = 1e-4;  // linear decay endpoint
  double subsample_t = 1e-3;
  int topic_dim = 5;
  std::uint64_t seed = 1;

  void validate() const;
};

// Draws word indices with probability proportional to count^power.
class UnigramSampler {
 public:
  UnigramSampler(std::span<const std::int64_t> counts, double power = 0.75);

  int sample(Rng& rng) const;
  double probability(int index) const;
  int size() const { return static_cast<int>(cdf_.size()); }

 private:
  std::vector<double> cdf_;
};

// min(1, sqrt(t / freq)); words rarer than t are always kept.
double keep_probability(std::int64_t count, std::int64_t total, double t);

// Input and output vectors of the skip-gram model.
struct SkipGramModel {
  Matrix<float> in;
  Matrix<float> out;
};

// -log s(in_c . out_o) - sum_n log s(-in_c . out_n)
double sgns_loss(const SkipGramModel& m, int center, int context, std::span<const int> negatives);

// One SGD step on the objective above.
void sgns_update(SkipGramModel& m, int center, int context, std::span<const int> negatives, float lr);

// Trains on `corpus` (one token list per tweet) and returns the input vectors
// as the word table. Windows never cross tweet boundaries; tokens outside the
// vocabulary are skipped.
EmbeddingMatrix<float> train_skipgram(std::span<const std::vector<std::string>> corpus, const Vocabulary& vocab,
                                      const SkipGramConfig& cfg);

template <typename DA, typename DB>
double cosine(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  const double na = a.template cast<double>().norm();
  const double nb = b.template cast<double>().norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.template cast<double>().dot(b.template cast<double>()) / (na * nb);
}

// Top-k rows by cosine to `token`; the query and the PAD/UNK rows are skipped.
std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingMatrix<float>& emb,
                                                              const Vocabulary& vocab, std::string_view token, int k);

}  // namespace tp
