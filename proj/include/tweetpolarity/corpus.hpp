#pragma once

// Labeled and distant datasets with the vocabulary built over them.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tweetpolarity/text.hpp"

namespace tp {

enum class SubtaskId { A, B, C, D, E };

struct Subtask {
  SubtaskId id = SubtaskId::A;
  int num_classes = 3;
  bool has_topic = false;

  static Subtask of(SubtaskId id);
  static Subtask parse(std::string_view name);  // "A".."E", case-insensitive
  char letter() const;

  // Index of a label as written in the data files, or nullopt.
  std::optional<int> label_index(std::string_view label) const;
  std::string label_name(int index) const;
  bool is_quantification() const { return id == SubtaskId::D || id == SubtaskId::E; }
};

struct Example {
  std::string id;
  std::optional<std::string> topic;
  int label = 0;
  TokenizedTweet tweet;
};

std::vector<Example> load_labeled(std::istream& in, const Subtask& subtask, const NormRules& rules);
std::vector<Example> load_labeled(const std::filesystem::path& path, const Subtask& subtask, const NormRules& rules);

// Which normalized emoticon tokens carry polarity for distant labeling.
struct DistantRules {
  std::vector<std::string> positive = {"<smile>", "<lolface>"};
  std::vector<std::string> negative = {"<sadface>"};
};

struct DistantSet {
  std::vector<TokenizedTweet> positives;
  std::vector<TokenizedTweet> negatives;
};

// Emoticon-labeled tweets with the polarity emoticons stripped; tweets with
// both polarities or neither are dropped.
DistantSet extract_distant(std::istream& raw, const NormRules& rules, const DistantRules& polarity = {});

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Tokens with count >= min_count, by descending count then lexicographic.
  static Vocabulary build(std::span<const std::vector<std::string>> corpora, int min_count);

  int size() const { return static_cast<int>(tokens_.size()); }
  int index_of(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token_of(int index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::int64_t count_of(int index) const { return counts_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  std::vector<int> encode(std::span<const std::string> tokens) const;

  // FNV-1a over the ordered token list; checkpoints record it.
  std::uint64_t hash() const;

  // `token<TAB>count` per line in index order, PAD and UNK included.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  void add(std::string token, std::int64_t count);

  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

std::vector<std::int64_t> class_counts(std::span<const Example> examples, int num_classes);

// w_c proportional to 1/count_c, scaled to mean 1 over classes.
std::vector<double> class_weights(std::span<const std::int64_t> counts);
std::vector<double> class_weights(std::span<const Example> examples, int num_classes);

}  // namespace tp
