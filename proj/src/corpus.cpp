#include "tweetpolarity/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>

#include "tweetpolarity/errors.hpp"

namespace tp {

Subtask Subtask::of(SubtaskId id) {
  switch (id) {
    case SubtaskId::A: return {id, 3, false};
    case SubtaskId::B: return {id, 2, true};
    case SubtaskId::C: return {id, 5, true};
    case SubtaskId::D: return {id, 2, true};
    case SubtaskId::E: return {id, 5, true};
  }
  throw std::invalid_argument("unknown subtask");
}

Subtask Subtask::parse(std::string_view name) {
  if (name.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (c >= 'A' && c <= 'E') return of(static_cast<SubtaskId>(c - 'A'));
  }
  throw std::invalid_argument("unknown subtask '" + std::string(name) + "' (expected A-E)");
}

char Subtask::letter() const { return static_cast<char>('A' + static_cast<int>(id)); }

std::optional<int> Subtask::label_index(std::string_view label) const {
  switch (num_classes) {
    case 3:
      if (label == "negative") return 0;
      if (label == "neutral") return 1;
      if (label == "positive") return 2;
      return std::nullopt;
    case 2:
      if (label == "negative") return 0;
      if (label == "positive") return 1;
      return std::nullopt;
    default: {
      static constexpr std::string_view kOrdinal[] = {"-2", "-1", "0", "1", "2"};
      for (int i = 0; i < 5; ++i)
        if (label == kOrdinal[i]) return i;
      return std::nullopt;
    }
  }
}

std::string Subtask::label_name(int index) const {
  if (index < 0 || index >= num_classes) throw std::out_of_range("label index out of range");
  switch (num_classes) {
    case 3: return std::array<const char*, 3>{"negative", "neutral", "positive"}[static_cast<std::size_t>(index)];
    case 2: return index == 0 ? "negative" : "positive";
    default: return std::to_string(index - 2);
  }
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line, std::size_t max_fields) {
  std::vector<std::string_view> fields;
  while (fields.size() + 1 < max_fields) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) break;
    fields.push_back(line.substr(0, tab));
    line.remove_prefix(tab + 1);
  }
  fields.push_back(line);
  return fields;
}

std::string line_error(int lineno, const std::string& what) { return "line " + std::to_string(lineno) + ": " + what; }

}  // namespace

std::vector<Example> load_labeled(std::istream& in, const Subtask& subtask, const NormRules& rules) {
  const std::size_t columns = subtask.has_topic ? 4 : 3;
  std::vector<Example> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line, columns);
    if (fields.size() != columns)
      throw DataError(line_error(lineno, "expected " + std::to_string(columns) + " tab-separated columns, found " +
                                             std::to_string(fields.size())));
    Example ex;
    ex.id = std::string(fields[0]);
    const std::string_view label = fields[columns - 2];
    const auto index = subtask.label_index(label);
    if (!index) throw DataError(line_error(lineno, "unknown label '" + std::string(label) + "'"));
    ex.label = *index;
    auto tokens = preprocess(fields[columns - 1], rules);
    if (subtask.has_topic) {
      ex.topic = std::string(fields[1]);
      ex.tweet = augment_with_topic(std::move(tokens), *ex.topic, rules);
    } else {
      ex.tweet.topic_flags.assign(tokens.size(), false);
      ex.tweet.tokens = std::move(tokens);
    }
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw DataError("empty file: no labeled rows");
  return out;
}

std::vector<Example> load_labeled(const std::filesystem::path& path, const Subtask& subtask, const NormRules& rules) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return load_labeled(in, subtask, rules);
}

DistantSet extract_distant(std::istream& raw, const NormRules& rules, const DistantRules& polarity) {
  auto member = [](const std::vector<std::string>& set, const std::string& t) {
    return std::find(set.begin(), set.end(), t) != set.end();
  };
  DistantSet out;
  std::string line;
  while (std::getline(raw, line)) {
    auto tokens = preprocess(line, rules);
    bool pos = false;
    bool neg = false;
    for (const auto& t : tokens) {
      pos = pos || member(polarity.positive, t);
      neg = neg || member(polarity.negative, t);
    }
    if (pos == neg) continue;
    std::erase_if(tokens, [&](const std::string& t) { return member(polarity.positive, t) || member(polarity.negative, t); });
    if (tokens.empty()) continue;
    TokenizedTweet tweet;
    tweet.topic_flags.assign(tokens.size(), false);
    tweet.tokens = std::move(tokens);
    (pos ? out.positives : out.negatives).push_back(std::move(tweet));
  }
  return out;
}

Vocabulary::Vocabulary() {
  add(std::string(kPadToken), 0);
  add(std::string(kUnkToken), 0);
}

void Vocabulary::add(std::string token, std::int64_t count) {
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> corpora, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& stream : corpora)
    for (const auto& t : stream)
      if (t != kPadToken && t != kUnkToken) ++freq[t];
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [t, c] : freq)
    if (c >= min_count) kept.emplace_back(t, c);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary v;
  for (auto& [t, c] : kept) v.add(std::move(t), c);
  return v;
}

int Vocabulary::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.count(std::string(token)) != 0; }

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(index_of(t));
  return ids;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (const unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // separator that cannot occur inside UTF-8 text
    h *= 0x100000001b3ULL;
  }
  return h;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << counts_[i] << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  Vocabulary v;
  v.tokens_.clear();
  v.counts_.clear();
  v.index_.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) throw DataError("vocabulary " + line_error(lineno, "expected token<TAB>count"));
    std::int64_t count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError("vocabulary " + line_error(lineno, "bad count"));
    }
    std::string token = line.substr(0, tab);
    if (v.index_.count(token)) throw DataError("vocabulary " + line_error(lineno, "duplicate token " + token));
    v.add(std::move(token), count);
  }
  if (v.size() < 2 || v.tokens_[kPad] != kPadToken || v.tokens_[kUnk] != kUnkToken)
    throw DataError("vocabulary " + path.string() + " must start with <pad> and <unk>");
  return v;
}

std::vector<std::int64_t> class_counts(std::span<const Example> examples, int num_classes) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& ex : examples) {
    if (ex.label < 0 || ex.label >= num_classes)
      throw DataError("example " + ex.id + ": label " + std::to_string(ex.label) + " out of range");
    ++counts[static_cast<std::size_t>(ex.label)];
  }
  return counts;
}

std::vector<double> class_weights(std::span<const std::int64_t> counts) {
  std::vector<double> w;
  w.reserve(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] <= 0) throw DataError("class " + std::to_string(c) + " has no examples");
    w.push_back(1.0 / static_cast<double>(counts[c]));
  }
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (auto& x : w) x /= mean;
  return w;
}

std::vector<double> class_weights(std::span<const Example> examples, int num_classes) {
  const auto counts = class_counts(examples, num_classes);
  return class_weights(counts);
}

}  // namespace tp
