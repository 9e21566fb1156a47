#include "tweetpolarity/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace tp {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename N>
N parse_number(const std::string& key, std::string_view v) {
  N out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || v.empty())
    throw ConfigError("config key '" + key + "': expected " + (std::is_integral_v<N> ? "an integer" : "a number") +
                      ", got '" + std::string(v) + "'");
  return out;
}

int positive_int(const std::string& key, std::string_view v, int min = 1) {
  const int x = parse_number<int>(key, v);
  if (x < min) throw ConfigError("config key '" + key + "': must be >= " + std::to_string(min));
  return x;
}

double positive_real(const std::string& key, std::string_view v) {
  const double x = parse_number<double>(key, v);
  if (!(x > 0)) throw ConfigError("config key '" + key + "': must be > 0");
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dim", [](RunConfig& c, const std::string& k, std::string_view v) { c.dim = positive_int(k, v); }},
      {"topic_dim", [](RunConfig& c, const std::string& k, std::string_view v) { c.topic_dim = positive_int(k, v); }},
      {"seq_len", [](RunConfig& c, const std::string& k, std::string_view v) { c.seq_len = positive_int(k, v); }},
      {"filter_sizes",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         std::vector<int> sizes;
         while (!v.empty()) {
           const auto comma = v.find(',');
           sizes.push_back(positive_int(k, trim(v.substr(0, comma))));
           v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
         }
         if (sizes.empty()) throw ConfigError("config key '" + k + "': needs at least one filter size");
         c.filter_sizes = sizes;
       }},
      {"num_filters", [](RunConfig& c, const std::string& k, std::string_view v) { c.num_filters = positive_int(k, v); }},
      {"lstm_units", [](RunConfig& c, const std::string& k, std::string_view v) { c.lstm_units = positive_int(k, v); }},
      {"hidden", [](RunConfig& c, const std::string& k, std::string_view v) { c.hidden = positive_int(k, v); }},
      {"dropout",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         const double p = parse_number<double>(k, v);
         if (!(p >= 0 && p < 1)) throw ConfigError("config key '" + k + "': must be in [0, 1)");
         c.dropout = p;
       }},
      {"lr", [](RunConfig& c, const std::string& k, std::string_view v) { c.lr = positive_real(k, v); }},
      {"lr_unfrozen_scale",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.lr_unfrozen_scale = positive_real(k, v); }},
      {"frozen_epochs", [](RunConfig& c, const std::string& k, std::string_view v) { c.frozen_epochs = positive_int(k, v, 0); }},
      {"unfrozen_epochs",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.unfrozen_epochs = positive_int(k, v, 0); }},
      {"distant_frozen_epochs",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.distant_frozen_epochs = positive_int(k, v, 0); }},
      {"distant_unfrozen_epochs",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.distant_unfrozen_epochs = positive_int(k, v, 0); }},
      {"batch_size", [](RunConfig& c, const std::string& k, std::string_view v) { c.batch_size = positive_int(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, std::string_view v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"min_count", [](RunConfig& c, const std::string& k, std::string_view v) { c.min_count = positive_int(k, v); }},
      {"pretrain_min_count",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.pretrain_min_count = positive_int(k, v); }},
      {"emoticon_rules", [](RunConfig& c, const std::string&, std::string_view v) { c.emoticon_rules = std::string(v); }},
      {"max_repeat", [](RunConfig& c, const std::string& k, std::string_view v) { c.max_repeat = positive_int(k, v); }},
      {"sg_window", [](RunConfig& c, const std::string& k, std::string_view v) { c.sg_window = positive_int(k, v); }},
      {"sg_negatives", [](RunConfig& c, const std::string& k, std::string_view v) { c.sg_negatives = positive_int(k, v); }},
      {"sg_epochs", [](RunConfig& c, const std::string& k, std::string_view v) { c.sg_epochs = positive_int(k, v); }},
      {"sg_lr", [](RunConfig& c, const std::string& k, std::string_view v) { c.sg_lr = positive_real(k, v); }},
      {"sg_final_lr", [](RunConfig& c, const std::string& k, std::string_view v) { c.sg_final_lr = positive_real(k, v); }},
      {"sg_subsample", [](RunConfig& c, const std::string& k, std::string_view v) { c.sg_subsample = positive_real(k, v); }},
      {"kld_epsilon", [](RunConfig& c, const std::string& k, std::string_view v) { c.kld_epsilon = positive_real(k, v); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : setters()) out.push_back(name);
    return out;
  }();
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(*this, key, trim(value));
}

void RunConfig::apply(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key=value");
    try {
      set(std::string(trim(body.substr(0, eq))), std::string(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void RunConfig::apply_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply(in, path.string());
}

ArchConfig RunConfig::arch() const {
  ArchConfig a;
  a.seq_len = seq_len;
  a.filter_sizes = filter_sizes;
  a.num_filters = num_filters;
  a.lstm_units = lstm_units;
  a.hidden = hidden;
  a.dropout = dropout;
  return a;
}

TrainSchedule RunConfig::supervised_schedule() const {
  auto s = TrainSchedule::supervised();
  s.frozen_epochs = frozen_epochs;
  s.unfrozen_epochs = unfrozen_epochs;
  s.lr_initial = lr;
  s.lr_unfrozen_scale = lr_unfrozen_scale;
  s.batch_size = batch_size;
  s.seed = seed;
  return s;
}

TrainSchedule RunConfig::distant_schedule() const {
  auto s = TrainSchedule::distant();
  s.frozen_epochs = distant_frozen_epochs;
  s.unfrozen_epochs = distant_unfrozen_epochs;
  s.lr_initial = lr;
  s.batch_size = batch_size;
  s.seed = seed;
  return s;
}

SkipGramConfig RunConfig::skipgram() const {
  SkipGramConfig s;
  s.dim = dim;
  s.window = sg_window;
  s.negatives = sg_negatives;
  s.epochs = sg_epochs;
  s.initial_lr = sg_lr;
  s.final_lr = sg_final_lr;
  s.subsample_t = sg_subsample;
  s.topic_dim = topic_dim;
  s.seed = seed;
  return s;
}

NormRules RunConfig::norm_rules() const {
  if (!emoticon_rules.empty() && !std::filesystem::exists(emoticon_rules))
    throw ConfigError("emoticon rules file not found: " + emoticon_rules);
  NormRules r = emoticon_rules.empty() ? NormRules::defaults() : NormRules::load(emoticon_rules);
  r.max_repeat = max_repeat;
  r.validate();
  return r;
}

}  // namespace tp
