#include "tweetpolarity/text.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace tp {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return ascii_lower(x) == ascii_lower(y); });
}

// Byte length of the UTF-8 sequence starting with `lead`; malformed bytes
// count as single characters.
std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::string_view next_char(std::string_view s, std::size_t pos) {
  std::size_t len = utf8_length(static_cast<unsigned char>(s[pos]));
  if (pos + len > s.size()) len = 1;
  for (std::size_t k = 1; k < len; ++k)
    if ((static_cast<unsigned char>(s[pos + k]) & 0xC0) != 0x80) return s.substr(pos, 1);
  return s.substr(pos, len);
}

// Length of a URL scheme `h t+ p s* ://` starting at pos (case-insensitive),
// or 0. Accepting any run of t and s keeps the rule stable under repeat
// collapsing.
std::size_t scheme_length(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  auto at = [&](std::size_t k) { return k < s.size() ? ascii_lower(s[k]) : '\0'; };
  if (at(i) != 'h') return 0;
  ++i;
  if (at(i) != 't') return 0;
  while (at(i) == 't') ++i;
  if (at(i) != 'p') return 0;
  ++i;
  while (at(i) == 's') ++i;
  if (s.substr(i, 3) != "://") return 0;
  return i + 3 - pos;
}

bool www_prefix(std::string_view s, std::size_t pos) {
  if (pos != 0 && !is_space(s[pos - 1])) return false;
  return s.size() - pos >= 4 && iequals(s.substr(pos, 4), "www.");
}

std::string replace_urls(std::string_view s, const std::string& url_token) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (scheme_length(s, i) > 0 || www_prefix(s, i)) {
      while (i < s.size() && !is_space(s[i])) ++i;
      out += url_token;
      continue;
    }
    out += s[i++];
  }
  return out;
}

std::string replace_emoticons(std::string_view s, const NormRules& rules) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      out += s[i++];
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    const std::string_view chunk = s.substr(i, j - i);
    const auto hit = std::find_if(rules.emoticons.begin(), rules.emoticons.end(),
                                  [&](const auto& entry) { return iequals(chunk, entry.first); });
    if (hit != rules.emoticons.end())
      out += hit->second;
    else
      out += chunk;
    i = j;
  }
  return out;
}

// Runs are compared case-insensitively so that lowercasing afterwards cannot
// create a new over-long run.
std::string collapse_repeats(std::string_view s, int max_repeat) {
  std::string out;
  out.reserve(s.size());
  std::string_view prev;
  int run = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::string_view ch = next_char(s, i);
    i += ch.size();
    if (!prev.empty() && iequals(ch, prev)) {
      ++run;
    } else {
      prev = ch;
      run = 1;
    }
    if (run <= max_repeat) out += ch;
  }
  return out;
}

}  // namespace

NormRules NormRules::defaults() {
  NormRules r;
  r.emoticons = {
      {":)", "<smile>"},   {":-)", "<smile>"},   {"=)", "<smile>"},  {":D", "<smile>"},
      {":(", "<sadface>"}, {":-(", "<sadface>"}, {"=(", "<sadface>"},
      {":p", "<lolface>"}, {":-p", "<lolface>"}, {"xD", "<lolface>"},
      {":|", "<neutralface>"}, {":-|", "<neutralface>"},
  };
  return r;
}

NormRules NormRules::load(const std::filesystem::path& path) {
  NormRules r = defaults();
  std::ifstream in(path);
  if (!in) return r;
  r.emoticons.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw std::invalid_argument("emoticon rules line " + std::to_string(lineno) + ": expected pattern<TAB>token");
    r.emoticons.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  r.validate();
  return r;
}

void NormRules::validate() const {
  if (max_repeat < 1) throw std::invalid_argument("max_repeat must be >= 1");
  if (url_token.empty()) throw std::invalid_argument("url_token must be non-empty");
  for (std::size_t i = 0; i < emoticons.size(); ++i) {
    const auto& [pattern, token] = emoticons[i];
    if (pattern.empty() || token.empty()) throw std::invalid_argument("emoticon entries must be non-empty");
    if (std::any_of(pattern.begin(), pattern.end(), is_space))
      throw std::invalid_argument("emoticon pattern contains whitespace: " + pattern);
    for (std::size_t j = 0; j < i; ++j)
      if (iequals(emoticons[j].first, pattern)) throw std::invalid_argument("duplicate emoticon pattern: " + pattern);
  }
}

std::string normalize(std::string_view raw, const NormRules& rules) {
  std::string s = replace_urls(raw, rules.url_token);
  s = replace_emoticons(s, rules);
  s = collapse_repeats(s, rules.max_repeat);
  std::transform(s.begin(), s.end(), s.begin(), ascii_lower);
  return s;
}

bool is_peelable_punct(char c) {
  static constexpr std::string_view kPunct = ".,!?;:\"()[]";
  return kPunct.find(c) != std::string_view::npos;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && is_space(normalized[i])) ++i;
    std::size_t j = i;
    while (j < normalized.size() && !is_space(normalized[j])) ++j;
    std::string_view chunk = normalized.substr(i, j - i);
    i = j;
    if (chunk.empty()) continue;

    std::vector<std::string> tail;
    while (!chunk.empty() && is_peelable_punct(chunk.front())) {
      tokens.emplace_back(1, chunk.front());
      chunk.remove_prefix(1);
    }
    while (!chunk.empty() && is_peelable_punct(chunk.back())) {
      tail.emplace_back(1, chunk.back());
      chunk.remove_suffix(1);
    }
    if (!chunk.empty()) tokens.emplace_back(chunk);
    tokens.insert(tokens.end(), tail.rbegin(), tail.rend());
  }
  return tokens;
}

std::vector<std::string> preprocess(std::string_view raw, const NormRules& rules) {
  return tokenize(normalize(raw, rules));
}

TokenizedTweet augment_with_topic(std::vector<std::string> tokens, std::span<const std::string> topic_words) {
  std::vector<std::string> words;
  for (const auto& w : topic_words) {
    if (w.size() == 1 && is_peelable_punct(w[0])) continue;
    if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
  }
  for (const auto& w : words)
    if (std::find(tokens.begin(), tokens.end(), w) == tokens.end()) tokens.push_back(w);

  TokenizedTweet out;
  out.topic_flags.reserve(tokens.size());
  for (const auto& t : tokens) out.topic_flags.push_back(std::find(words.begin(), words.end(), t) != words.end());
  out.tokens = std::move(tokens);
  return out;
}

TokenizedTweet augment_with_topic(std::vector<std::string> tokens, std::string_view topic, const NormRules& rules) {
  const auto words = preprocess(topic, rules);
  return augment_with_topic(std::move(tokens), words);
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace tp
