#include "tweetpolarity/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace tp {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ShapeError(std::string(what) + ": gold has " + std::to_string(a) + " entries, prediction " +
                     std::to_string(b));
}

void require_labels(std::span<const int> labels, int num_classes, const char* what) {
  for (const int l : labels)
    if (l < 0 || l >= num_classes)
      throw DataError(std::string(what) + ": label " + std::to_string(l) + " outside 0.." +
                      std::to_string(num_classes - 1));
}

std::vector<std::int64_t> gold_counts(std::span<const int> gold, int num_classes, const char* what) {
  std::vector<std::int64_t> n(static_cast<std::size_t>(num_classes), 0);
  for (const int g : gold) ++n[static_cast<std::size_t>(g)];
  for (int c = 0; c < num_classes; ++c)
    if (n[static_cast<std::size_t>(c)] == 0)
      throw DataError(std::string(what) + ": class " + std::to_string(c) + " absent from gold");
  return n;
}

}  // namespace

double macro_recall(std::span<const int> gold, std::span<const int> pred, int num_classes) {
  require_same_length(gold.size(), pred.size(), "macro_recall");
  require_labels(gold, num_classes, "macro_recall");
  const auto n = gold_counts(gold, num_classes, "macro_recall");
  std::vector<std::int64_t> hit(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] == pred[i]) ++hit[static_cast<std::size_t>(gold[i])];
  double sum = 0;
  for (std::size_t c = 0; c < n.size(); ++c) sum += static_cast<double>(hit[c]) / static_cast<double>(n[c]);
  return sum / num_classes;
}

double accuracy(std::span<const int> gold, std::span<const int> pred) {
  require_same_length(gold.size(), pred.size(), "accuracy");
  if (gold.empty()) throw DataError("accuracy: no examples");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

double f1_pn(std::span<const int> gold, std::span<const int> pred) {
  require_same_length(gold.size(), pred.size(), "f1_pn");
  require_labels(gold, 3, "f1_pn");
  require_labels(pred, 3, "f1_pn");
  auto f1 = [&](int c) {
    std::int64_t tp = 0, gold_c = 0, pred_c = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      gold_c += gold[i] == c;
      pred_c += pred[i] == c;
      tp += gold[i] == c && pred[i] == c;
    }
    const double p = pred_c ? static_cast<double>(tp) / static_cast<double>(pred_c) : 0.0;
    const double r = gold_c ? static_cast<double>(tp) / static_cast<double>(gold_c) : 0.0;
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  };
  return (f1(2) + f1(0)) / 2;
}

double macro_mae(std::span<const int> gold, std::span<const int> pred, int num_classes) {
  require_same_length(gold.size(), pred.size(), "macro_mae");
  require_labels(gold, num_classes, "macro_mae");
  require_labels(pred, num_classes, "macro_mae");
  const auto n = gold_counts(gold, num_classes, "macro_mae");
  std::vector<double> err(static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t i = 0; i < gold.size(); ++i) err[static_cast<std::size_t>(gold[i])] += std::abs(pred[i] - gold[i]);
  double sum = 0;
  for (std::size_t c = 0; c < n.size(); ++c) sum += err[c] / static_cast<double>(n[c]);
  return sum / num_classes;
}

double macro_mae(std::span<const int> gold, std::span<const int> pred) {
  require_same_length(gold.size(), pred.size(), "macro_mae");
  if (gold.empty()) throw DataError("macro_mae: no examples");
  require_labels(gold, 5, "macro_mae");
  require_labels(pred, 5, "macro_mae");
  std::map<int, std::pair<double, std::int64_t>> per_class;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto& [err, n] = per_class[gold[i]];
    err += std::abs(pred[i] - gold[i]);
    ++n;
  }
  double sum = 0;
  for (const auto& [c, en] : per_class) sum += en.first / static_cast<double>(en.second);
  return sum / static_cast<double>(per_class.size());
}

double kld_epsilon(int n_test) {
  if (n_test <= 0) throw std::invalid_argument("kld: n_test must be positive, got " + std::to_string(n_test));
  return 1.0 / (2.0 * n_test);
}

double kld(std::span<const double> gold, std::span<const double> pred, double eps) {
  require_same_length(gold.size(), pred.size(), "kld");
  if (!(eps > 0)) throw std::invalid_argument("kld: epsilon must be positive");
  const double z = 1.0 + static_cast<double>(gold.size()) * eps;
  double sum = 0;
  for (std::size_t c = 0; c < gold.size(); ++c) {
    const double g = (gold[c] + eps) / z;
    const double p = (pred[c] + eps) / z;
    sum += g * std::log(g / p);
  }
  return sum;
}

double kld(std::span<const double> gold, std::span<const double> pred, int n_test) {
  return kld(gold, pred, kld_epsilon(n_test));
}

double emd(std::span<const double> gold, std::span<const double> pred) {
  require_same_length(gold.size(), pred.size(), "emd");
  double cum = 0, sum = 0;
  for (std::size_t j = 0; j + 1 < gold.size(); ++j) {
    cum += gold[j] - pred[j];
    sum += std::abs(cum);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// File-level evaluation

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Rows {
  std::vector<std::string> keys;
  std::vector<std::vector<std::string>> fields;
};

Rows read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Rows r;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() < 2)
      throw DataError(path.string() + ": line " + std::to_string(lineno) + ": expected at least two tab-separated fields");
    std::string key(f[0]);
    if (!seen.insert(key).second) throw DataError(path.string() + ": duplicate id '" + key + "'");
    r.keys.push_back(key);
    r.fields.emplace_back(f.begin() + 1, f.end());
  }
  if (r.keys.empty()) throw DataError(path.string() + ": empty file");
  return r;
}

// Pairs gold and prediction rows by key; a mismatch lists missing keys.
std::vector<std::size_t> align(const Rows& gold, const Rows& pred) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pred.keys.size(); ++i) index[pred.keys[i]] = i;
  std::vector<std::size_t> order;
  std::vector<std::string> missing;
  for (const auto& k : gold.keys) {
    const auto it = index.find(k);
    if (it == index.end())
      missing.push_back(k);
    else
      order.push_back(it->second);
  }
  std::vector<std::string> extra;
  const std::set<std::string> gold_keys(gold.keys.begin(), gold.keys.end());
  for (const auto& k : pred.keys)
    if (!gold_keys.count(k)) extra.push_back(k);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "id mismatch between gold and prediction files";
    auto list = [&](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += std::string("; ") + what + ":";
      for (std::size_t i = 0; i < ids.size() && i < 20; ++i) msg += " " + ids[i];
      if (ids.size() > 20) msg += " ... (" + std::to_string(ids.size()) + " total)";
    };
    list("missing from prediction", missing);
    list("not in gold", extra);
    throw DataError(msg);
  }
  return order;
}

int parse_label(const Subtask& st, const std::vector<std::string>& f, const std::string& key, const char* side) {
  if (f.size() == 1) {
    if (const auto l = st.label_index(f[0])) return *l;
    throw DataError(std::string(side) + " id '" + key + "': unknown label '" + f[0] + "'");
  }
  if (static_cast<int>(f.size()) != st.num_classes)
    throw DataError(std::string(side) + " id '" + key + "': expected a label or " + std::to_string(st.num_classes) +
                    " probabilities");
  int best = 0;
  double best_p = -1;
  for (int k = 0; k < st.num_classes; ++k) {
    const auto v = to_double(f[static_cast<std::size_t>(k)]);
    if (!v) throw DataError(std::string(side) + " id '" + key + "': not a number '" + f[static_cast<std::size_t>(k)] + "'");
    if (*v > best_p) {
      best_p = *v;
      best = k;
    }
  }
  return best;
}

struct DistRow {
  std::vector<double> p;
  std::optional<int> n_test;
};

DistRow parse_dist(const Subtask& st, const std::vector<std::string>& f, const std::string& topic, const char* side) {
  const auto K = static_cast<std::size_t>(st.num_classes);
  if (f.size() != K && f.size() != K + 1)
    throw DataError(std::string(side) + " topic '" + topic + "': expected " + std::to_string(K) +
                    " proportions (optionally followed by a tweet count)");
  DistRow r;
  for (std::size_t k = 0; k < K; ++k) {
    const auto v = to_double(f[k]);
    if (!v || *v < 0) throw DataError(std::string(side) + " topic '" + topic + "': bad proportion '" + f[k] + "'");
    r.p.push_back(*v);
  }
  if (f.size() == K + 1) {
    int n = 0;
    const auto [end, ec] = std::from_chars(f[K].data(), f[K].data() + f[K].size(), n);
    if (ec != std::errc() || end != f[K].data() + f[K].size() || n <= 0)
      throw DataError(std::string(side) + " topic '" + topic + "': bad tweet count '" + f[K] + "'");
    r.n_test = n;
  }
  return r;
}

}  // namespace

EvalReport evaluate(const Subtask& subtask, const std::filesystem::path& gold_file,
                    const std::filesystem::path& pred_file, const EvalOptions& opts) {
  const Rows gold = read_rows(gold_file);
  const Rows pred = read_rows(pred_file);
  const auto order = align(gold, pred);
  EvalReport rep;
  rep.subtask = subtask;

  if (!subtask.is_quantification()) {
    std::vector<int> g, p;
    for (std::size_t i = 0; i < gold.keys.size(); ++i) {
      g.push_back(parse_label(subtask, gold.fields[i], gold.keys[i], "gold"));
      p.push_back(parse_label(subtask, pred.fields[order[i]], gold.keys[i], "prediction"));
    }
    if (subtask.id == SubtaskId::C) {
      rep.metric = "macro_mae";
      rep.value = macro_mae(g, p, subtask.num_classes);
    } else {
      rep.metric = "macro_recall";
      rep.value = macro_recall(g, p, subtask.num_classes);
    }
    rep.details.emplace_back("accuracy", accuracy(g, p));
    if (subtask.id == SubtaskId::A) rep.details.emplace_back("f1_pn", f1_pn(g, p));
    return rep;
  }

  rep.metric = subtask.id == SubtaskId::D ? "kld" : "emd";
  double sum = 0;
  for (std::size_t i = 0; i < gold.keys.size(); ++i) {
    const auto g = parse_dist(subtask, gold.fields[i], gold.keys[i], "gold");
    const auto p = parse_dist(subtask, pred.fields[order[i]], gold.keys[i], "prediction");
    double v = 0;
    if (subtask.id == SubtaskId::D) {
      double eps = 0;
      if (g.n_test)
        eps = kld_epsilon(*g.n_test);
      else if (opts.kld_epsilon)
        eps = *opts.kld_epsilon;
      else
        throw DataError("gold topic '" + gold.keys[i] + "': no tweet count column and no kld epsilon configured");
      v = kld(g.p, p.p, eps);
    } else {
      v = emd(g.p, p.p);
    }
    rep.details.emplace_back(gold.keys[i], v);
    sum += v;
  }
  rep.value = sum / static_cast<double>(gold.keys.size());
  return rep;
}

}  // namespace tp
