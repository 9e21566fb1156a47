#pragma once

// Flat key=value run configuration covering every tunable default.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tweetpolarity/pretrain.hpp"
#include "tweetpolarity/train.hpp"

namespace tp {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  // architecture
  int dim = 200;
  int topic_dim = 5;
  int seq_len = 80;
  std::vector<int> filter_sizes = {3, 4, 5};
  int num_filters = 200;
  int lstm_units = 200;
  int hidden = 30;
  double dropout = 0.5;
  // training
  double lr = 1e-3;
  double lr_unfrozen_scale = 0.1;
  int frozen_epochs = 5;
  int unfrozen_epochs = 5;
  int distant_frozen_epochs = 1;
  int distant_unfrozen_epochs = 6;
  int batch_size = 32;
  std::uint64_t seed = 1;
  // vocabulary and preprocessing
  int min_count = 1;
  int pretrain_min_count = 2;
  std::string emoticon_rules;  // empty: built-in rules
  int max_repeat = 2;
  // skip-gram
  int sg_window = 5;
  int sg_negatives = 5;
  int sg_epochs = 5;
  double sg_lr = 0.025;
  double sg_final_lr = 1e-4;
  double sg_subsample = 1e-3;
  // evaluation
  std::optional<double> kld_epsilon;

  // Applies `key=value` lines; `#` starts a comment. Unknown keys and
  // ill-typed values throw ConfigError naming the line.
  void apply(std::istream& in, const std::string& source = "config");
  void apply_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);

  ArchConfig arch() const;
  TrainSchedule supervised_schedule() const;
  TrainSchedule distant_schedule() const;
  SkipGramConfig skipgram() const;
  NormRules norm_rules() const;

  static const std::vector<std::string>& keys();
};

}  // namespace tp
