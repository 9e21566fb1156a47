#pragma once

// Tweet normalization and tokenization.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tp {

struct NormRules {
  std::string url_token = "<url>";
  // (emoticon, replacement token); matched case-insensitively on
  // whitespace-delimited chunks.
  std::vector<std::pair<std::string, std::string>> emoticons;
  int max_repeat = 2;

  static NormRules defaults();

  // `pattern<TAB>token` per line. A missing file yields the defaults.
  static NormRules load(const std::filesystem::path& path);

  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

struct TokenizedTweet {
  std::vector<std::string> tokens;
  std::vector<bool> topic_flags;  // parallel to tokens
};

// URLs -> url_token, emoticons -> tokens, runs longer than max_repeat
// collapsed, ASCII lowercased; in that order.
std::string normalize(std::string_view raw, const NormRules& rules);

// Whitespace split, then leading/trailing punctuation from .,!?;:"()[] peeled
// off one character at a time. Angle-bracket tokens stay whole.
std::vector<std::string> tokenize(std::string_view normalized);

// normalize + tokenize
std::vector<std::string> preprocess(std::string_view raw, const NormRules& rules);

// Appends topic words missing from `tokens` and flags every position that
// holds a topic word.
TokenizedTweet augment_with_topic(std::vector<std::string> tokens, std::span<const std::string> topic_words);
TokenizedTweet augment_with_topic(std::vector<std::string> tokens, std::string_view topic, const NormRules& rules);

std::string join_tokens(std::span<const std::string> tokens);

bool is_peelable_punct(char c);

}  // namespace tp
