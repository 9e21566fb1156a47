#pragma once

// Finite-difference verification of every backward pass on tiny models in
// double precision.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tweetpolarity/models.hpp"

namespace tp {

struct GradCheckRow {
  std::string model;
  std::string group;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;

  double worst() const;
  bool passed(double tolerance) const { return worst() < tolerance; }
  // One line per (model, group) with the worst error over seeds.
  void print(std::ostream& os) const;
};

struct GradCheckSuiteOptions {
  std::uint64_t seed = 7;
  int num_seeds = 20;
  double h = 1e-4;
  bool train_mode = true;  // dropout active with a fixed mask per evaluation
};

// Checks every parameter group of one model instance, plus the embedding
// table and topic vectors, against central differences.
std::vector<GradCheckRow> grad_check_model(ModelParams<double>& params, const ArchConfig& arch,
                                           EmbeddingMatrix<double>& emb, const EncodedTweet& tweet, int label,
                                           double weight, std::uint64_t seed, double h, bool train_mode);

// CNN (d=4, s'=6, filter sizes 1,2,3 with two filters each) and BiLSTM
// (d=4, m=3, 4 tokens) over `num_seeds` random instances, each with and
// without topic vectors.
GradCheckReport run_gradcheck_suite(const GradCheckSuiteOptions& opts = {});

}  // namespace tp
