#pragma once

// Official scores of the five subtasks, one function per measure.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tweetpolarity/corpus.hpp"
#include "tweetpolarity/tensor.hpp"

namespace tp {

// Mean over classes of correct_c / gold_count_c. Every class must occur in gold.
double macro_recall(std::span<const int> gold, std::span<const int> pred, int num_classes);

double accuracy(std::span<const int> gold, std::span<const int> pred);

// (F1(positive) + F1(negative)) / 2 for labels negative=0, neutral=1,
// positive=2; F1 is 0 when precision + recall is 0.
double f1_pn(std::span<const int> gold, std::span<const int> pred);

// (1/K) sum_c mean_{t in T_c} |pred_t - c|. Every class must occur in gold.
double macro_mae(std::span<const int> gold, std::span<const int> pred, int num_classes);
// Same, averaged over the distinct classes occurring in gold (labels 0..4).
double macro_mae(std::span<const int> gold, std::span<const int> pred);

// Smoothing constant 1 / (2 n_test).
double kld_epsilon(int n_test);

// sum_c g'_c ln(g'_c / p'_c) with x' = (x + eps) / (1 + K eps).
double kld(std::span<const double> gold, std::span<const double> pred, double eps);
double kld(std::span<const double> gold, std::span<const double> pred, int n_test);

// sum_{j<K-1} |sum_{i<=j} (gold_i - pred_i)|, classes one unit apart.
double emd(std::span<const double> gold, std::span<const double> pred);

struct EvalReport {
  Subtask subtask;
  std::string metric;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> details;  // secondary metrics, per-class or per-topic values
};

struct EvalOptions {
  // Used for topics whose gold row carries no tweet count.
  std::optional<double> kld_epsilon;
};

// Classification files: `id<TAB>label`, where a prediction may instead carry
// K probabilities (argmax is taken). Distribution files:
// `topic<TAB>p_0<TAB>...<TAB>p_{K-1}[<TAB>n_test]`.
EvalReport evaluate(const Subtask& subtask, const std::filesystem::path& gold_file,
                    const std::filesystem::path& pred_file, const EvalOptions& opts = {});

}  // namespace tp
