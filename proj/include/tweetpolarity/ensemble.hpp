#pragma once

// Combining member outputs, and correlating them.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tweetpolarity/models.hpp"

namespace tp {

// Entrywise mean of the members' probability vectors for one example.
Vector<double> soft_vote(std::span<const Vector<double>> members);

// Corpus-level prevalence: columnwise mean of per-tweet probabilities.
Vector<double> quantify(std::span<const Vector<double>> probs);
Vector<double> quantify(const Matrix<double>& probs);  // N x K

// Entry (i, j) is the Pearson correlation of the flattened N x K outputs of
// models i and j. `names` label errors for zero-variance outputs.
Matrix<double> pearson_matrix(std::span<const Matrix<double>> outputs, std::span<const std::string> names = {});

// Per-tweet probabilities keyed by id; file rows are `id<TAB>p_0<TAB>...`.
struct PredictionSet {
  std::vector<std::string> ids;
  Matrix<double> probs;  // N x K

  int size() const { return static_cast<int>(ids.size()); }
  int num_classes() const { return static_cast<int>(probs.cols()); }
};

PredictionSet read_predictions(std::istream& in);
PredictionSet read_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, const PredictionSet& set);

// Soft vote across members that cover the same ids in the same order.
PredictionSet soft_vote(std::span<const PredictionSet> members);

// `kind<TAB>checkpoint_path` per line; relative paths resolve against `base`.
struct MemberSpec {
  ModelKind kind = ModelKind::Cnn;
  std::filesystem::path checkpoint;
};

std::vector<MemberSpec> parse_member_specs(std::istream& in, const std::filesystem::path& base = {});
std::vector<MemberSpec> read_member_specs(const std::filesystem::path& path);

}  // namespace tp
