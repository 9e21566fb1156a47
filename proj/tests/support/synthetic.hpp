#pragma once

// Synthetic datasets shared by the unit and acceptance tests.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "tweetpolarity/corpus.hpp"
#include "tweetpolarity/models.hpp"
#include "tweetpolarity/tensor.hpp"

namespace tptest {

inline const std::vector<std::string> kFiller = {"the", "a", "day", "movie", "phone", "was", "is", "really",
                                                 "today", "so", "my", "this", "game", "food", "it", "very", "new", "old"};

inline std::vector<std::string> filler(tp::Rng& rng, int n) {
  std::vector<std::string> t;
  for (int i = 0; i < n; ++i) t.push_back(kFiller[tp::uniform_index(rng, kFiller.size())]);
  return t;
}

// 200 tweets; "good" marks positive (label 1), "bad" negative (label 0).
inline std::vector<tp::Example> keyword_set(std::uint64_t seed, int n = 200) {
  tp::Rng rng(seed);
  std::vector<tp::Example> out;
  for (int i = 0; i < n; ++i) {
    tp::Example e;
    e.id = std::to_string(i);
    e.label = i % 2;
    auto toks = filler(rng, 3 + static_cast<int>(tp::uniform_index(rng, 6)));
    const auto at = tp::uniform_index(rng, toks.size() + 1);
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(at), e.label == 1 ? "good" : "bad");
    e.tweet.tokens = toks;
    e.tweet.topic_flags.assign(toks.size(), false);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<std::vector<std::string>> token_lists(const std::vector<tp::Example>& ex) {
  std::vector<std::vector<std::string>> c;
  for (const auto& e : ex) c.push_back(e.tweet.tokens);
  return c;
}

inline tp::ArchConfig small_arch() {
  tp::ArchConfig a;
  a.num_filters = 16;
  a.lstm_units = 16;
  return a;
}

inline bool same_bits(const tp::Matrix<float>& a, const tp::Matrix<float>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

// "yay" occurs only in positive tweets, "ugh" only in negative ones.
inline tp::DistantSet polarity_distant_set(std::uint64_t seed, int per_class = 150) {
  tp::Rng rng(seed);
  tp::DistantSet set;
  for (int i = 0; i < per_class; ++i) {
    auto p = filler(rng, 4);
    p.push_back("yay");
    set.positives.push_back({p, std::vector<bool>(p.size(), false)});
    auto n = filler(rng, 4);
    n.insert(n.begin(), "ugh");
    set.negatives.push_back({n, std::vector<bool>(n.size(), false)});
  }
  return set;
}

// Random strings biased towards the characters the normalizer reacts to.
inline std::string fuzz_string(tp::Rng& rng) {
  static const std::vector<std::string> pieces = {
      "a", "A", "o", "O", "s", "S", "x", "D", "d", "p", "P", "h", "t", "T", "w", "W", ".", ":", ";", ")", "(",
      "-", "=", "|", "/", "!", "?", " ", " ", "  ", "\t", "http://", "HTTPS://", "www.", "htttp://", ":)", ":-(",
      "xD", ":P", ":|", "é", "\xF0\x90\x90\x90", "<", ">", "<url>", "<smile>", "\"", "[", "]", "1", "0"};
  std::string s;
  const auto n = tp::uniform_index(rng, 25);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto& piece = pieces[tp::uniform_index(rng, pieces.size())];
    const auto reps = 1 + tp::uniform_index(rng, tp::uniform01(rng) < 0.2 ? 6 : 1);
    for (std::uint64_t r = 0; r < reps; ++r) s += piece;
  }
  return s;
}

}  // namespace tptest
