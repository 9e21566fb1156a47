// tweetpolarity: batch command-line driver for the three-phase pipeline.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numeric failure (including a failed gradient check).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "tweetpolarity/checkpoint.hpp"
#include "tweetpolarity/config.hpp"
#include "tweetpolarity/ensemble.hpp"
#include "tweetpolarity/gradcheck.hpp"
#include "tweetpolarity/metrics.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Flags every subcommand accepts.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "key=value config file (default: $TWEETPOLARITY_CONFIG)");
    cmd->add_option("--seed", seed, "random seed, overrides the config");
    cmd->add_option("--out", out, "output path (default: stdout where applicable)");
    cmd->add_option("--set", overrides, "config override key=value (repeatable)");
  }

  tp::RunConfig load() const {
    tp::RunConfig cfg;
    std::string path = config;
    if (path.empty())
      if (const char* env = std::getenv("TWEETPOLARITY_CONFIG"); env && *env) path = env;
    if (!path.empty()) cfg.apply_file(path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw tp::ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    return cfg;
  }

  std::string require_out(const std::string& what) const {
    if (out.empty()) throw tp::ConfigError("--out is required for " + what);
    return out;
  }
};

// Writes to `path`, or to stdout when empty.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw tp::DataError("cannot write " + path);
  body(f);
  f.close();
  if (!f) throw tp::DataError("write failed for " + path);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw tp::DataError("cannot open " + path);
  return f;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto p = s.find(sep);
    out.emplace_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

std::vector<std::string> space_tokens(std::string_view line) {
  std::vector<std::string> out;
  for (auto& t : split(line, ' '))
    if (!t.empty()) out.push_back(std::move(t));
  return out;
}

// One tokenized tweet per line, tokens separated by single spaces.
std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(space_tokens(line));
  return out;
}

// Lines `positive|negative<TAB>tokens`.
void write_distant(std::ostream& os, const tp::DistantSet& set) {
  for (const auto& t : set.positives) os << "positive\t" << tp::join_tokens(t.tokens) << '\n';
  for (const auto& t : set.negatives) os << "negative\t" << tp::join_tokens(t.tokens) << '\n';
}

tp::DistantSet read_distant(const std::string& path) {
  auto in = open_in(path);
  tp::DistantSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const std::string label = line.substr(0, tab);
    if (tab == std::string::npos || (label != "positive" && label != "negative"))
      throw tp::DataError(path + ":" + std::to_string(lineno) + ": expected positive|negative<TAB>tokens");
    tp::TokenizedTweet t;
    t.tokens = space_tokens(std::string_view(line).substr(tab + 1));
    t.topic_flags.assign(t.tokens.size(), false);
    (label == "positive" ? set.positives : set.negatives).push_back(std::move(t));
  }
  return set;
}

struct InputTweet {
  std::string id;
  std::string topic;
  tp::TokenizedTweet tweet;
};

// Accepts labeled or unlabeled rows: the first field is the id, the second is
// the topic for topic subtasks, the last is the raw text.
std::vector<InputTweet> read_tweets(const std::string& path, const tp::Subtask& subtask, const tp::NormRules& rules) {
  auto in = open_in(path);
  std::vector<InputTweet> out;
  std::string line;
  int lineno = 0;
  const std::size_t min_fields = subtask.has_topic ? 3 : 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() < min_fields)
      throw tp::DataError(path + ":" + std::to_string(lineno) + ": expected at least " + std::to_string(min_fields) +
                          " tab-separated columns");
    InputTweet t;
    t.id = f.front();
    auto tokens = tp::preprocess(f.back(), rules);
    if (subtask.has_topic) {
      t.topic = f[1];
      t.tweet = tp::augment_with_topic(std::move(tokens), t.topic, rules);
    } else {
      t.tweet.topic_flags.assign(tokens.size(), false);
      t.tweet.tokens = std::move(tokens);
    }
    out.push_back(std::move(t));
  }
  return out;
}

tp::PredictionSet to_prediction_set(const std::vector<InputTweet>& tweets, const std::vector<tp::Vector<float>>& probs) {
  tp::PredictionSet set;
  const int k = probs.empty() ? 0 : static_cast<int>(probs.front().size());
  set.probs.resize(static_cast<Eigen::Index>(probs.size()), k);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    set.ids.push_back(tweets[i].id);
    set.probs.row(static_cast<Eigen::Index>(i)) = probs[i].cast<double>().transpose();
  }
  return set;
}

std::ostream* open_log(const std::string& path, std::ofstream& holder) {
  if (path.empty()) return nullptr;
  if (path == "-") return &std::cerr;
  holder.open(path, std::ios::binary);
  if (!holder) throw tp::DataError("cannot write " + path);
  return &holder;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// ---- subcommands ----

int cmd_preprocess(const Common& c, const std::string& input) {
  const auto cfg = c.load();
  const auto rules = cfg.norm_rules();
  auto in = open_in(input);
  emit(c.out, [&](std::ostream& os) {
    std::string line;
    while (std::getline(in, line)) os << tp::join_tokens(tp::preprocess(line, rules)) << '\n';
  });
  return 0;
}

int cmd_distant_extract(const Common& c, const std::string& input) {
  const auto cfg = c.load();
  auto in = open_in(input);
  const auto set = tp::extract_distant(in, cfg.norm_rules());
  emit(c.out, [&](std::ostream& os) { write_distant(os, set); });
  std::cerr << "positives\t" << set.positives.size() << "\nnegatives\t" << set.negatives.size() << '\n';
  return 0;
}

int cmd_pretrain(const Common& c, const std::vector<std::string>& corpora, const std::string& vocab_out) {
  const auto cfg = c.load();
  const auto out = c.require_out("pretrain");
  std::vector<std::vector<std::string>> tweets;
  for (const auto& p : corpora) {
    auto part = read_token_lines(p);
    tweets.insert(tweets.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const auto vocab = tp::Vocabulary::build(tweets, cfg.pretrain_min_count);
  const auto emb = tp::train_skipgram(tweets, vocab, cfg.skipgram());
  vocab.save(vocab_out);
  tp::save_checkpoint(out, tp::embeddings_checkpoint(emb, vocab, cfg.seed));
  return 0;
}

int cmd_distant_train(const Common& c, const std::string& vocab_path, const std::string& emb_path,
                      const std::string& distant_path, const std::string& log_path) {
  const auto cfg = c.load();
  const auto out = c.require_out("distant-train");
  const auto vocab = tp::Vocabulary::load(vocab_path);
  const auto emb = tp::embeddings_from(tp::load_checkpoint(emb_path), vocab);
  const auto data = read_distant(distant_path);
  std::ofstream log_file;
  tp::TrainHooks hooks;
  hooks.log = open_log(log_path, log_file);
  const auto result = tp::distant_train(emb, vocab, data, cfg.arch(), cfg.distant_schedule(), hooks);
  tp::save_checkpoint(out, tp::embeddings_checkpoint(result.emb, vocab, cfg.seed));
  return 0;
}

struct TrainArgs {
  std::string kind = "cnn";
  std::string subtask = "A";
  std::string data;
  std::string vocab;
  std::string vocab_out;
  std::string emb;
  std::string log;
};

int cmd_train(const Common& c, const TrainArgs& a) {
  const auto cfg = c.load();
  const auto out = c.require_out("train");
  const auto kind = tp::parse_model_kind(a.kind);
  const auto subtask = tp::Subtask::parse(a.subtask);
  const auto rules = cfg.norm_rules();
  const auto data = tp::load_labeled(std::filesystem::path(a.data), subtask, rules);
  // Fail on a missing class before any embedding work.
  tp::class_weights(data, subtask.num_classes);

  tp::Vocabulary vocab;
  if (!a.vocab.empty()) {
    vocab = tp::Vocabulary::load(a.vocab);
  } else {
    if (!a.emb.empty()) throw tp::ConfigError("--emb requires the matching --vocab");
    std::vector<std::vector<std::string>> lists;
    for (const auto& e : data) lists.push_back(e.tweet.tokens);
    vocab = tp::Vocabulary::build(lists, cfg.min_count);
  }
  if (!a.vocab_out.empty()) vocab.save(a.vocab_out);

  tp::EmbeddingMatrix<float> emb;
  if (!a.emb.empty()) {
    emb = tp::embeddings_from(tp::load_checkpoint(a.emb), vocab);
  } else {
    tp::Rng rng(cfg.seed);
    emb = tp::EmbeddingMatrix<float>::random(vocab.size(), cfg.dim, cfg.topic_dim, rng);
  }

  std::ofstream log_file;
  tp::TrainHooks hooks;
  hooks.log = open_log(a.log, log_file);
  const auto model = tp::supervised_train(kind, subtask, data, vocab, emb, cfg.arch(), cfg.supervised_schedule(), hooks);
  tp::save_checkpoint(out, tp::model_checkpoint(model, vocab, cfg.seed));
  return 0;
}

tp::PredictionSet predict_file(const std::string& model_path, const tp::Vocabulary& vocab, const std::string& data,
                               const tp::NormRules& rules, std::optional<tp::ModelKind> expect_kind = std::nullopt) {
  const auto model = tp::model_from(tp::load_checkpoint(model_path), vocab);
  if (expect_kind && *expect_kind != model.kind)
    throw tp::DataError(model_path + ": checkpoint holds a " + std::string(tp::to_string(model.kind)) +
                        " model, member spec says " + std::string(tp::to_string(*expect_kind)));
  const auto tweets = read_tweets(data, model.subtask, rules);
  std::vector<tp::TokenizedTweet> toks;
  toks.reserve(tweets.size());
  for (const auto& t : tweets) toks.push_back(t.tweet);
  return to_prediction_set(tweets, tp::predict(model, vocab, toks));
}

int cmd_predict(const Common& c, const std::string& model, const std::string& vocab_path, const std::string& data) {
  const auto cfg = c.load();
  const auto vocab = tp::Vocabulary::load(vocab_path);
  const auto set = predict_file(model, vocab, data, cfg.norm_rules());
  emit(c.out, [&](std::ostream& os) { tp::write_predictions(os, set); });
  return 0;
}

int cmd_ensemble(const Common& c, const std::vector<std::string>& preds, const std::string& members,
                 const std::string& vocab_path, const std::string& data) {
  const auto cfg = c.load();
  std::vector<tp::PredictionSet> sets;
  for (const auto& p : preds) sets.push_back(tp::read_predictions(std::filesystem::path(p)));
  if (!members.empty()) {
    if (vocab_path.empty() || data.empty()) throw tp::ConfigError("--members needs --vocab and --data");
    const auto vocab = tp::Vocabulary::load(vocab_path);
    const auto rules = cfg.norm_rules();
    for (const auto& m : tp::read_member_specs(members))
      sets.push_back(predict_file(m.checkpoint.string(), vocab, data, rules, m.kind));
  }
  if (sets.empty()) throw tp::ConfigError("ensemble needs --pred files or --members");
  const auto voted = tp::soft_vote(sets);
  emit(c.out, [&](std::ostream& os) { tp::write_predictions(os, voted); });
  return 0;
}

int cmd_quantify(const Common& c, const std::string& pred, const std::string& data) {
  (void)c.load();
  const auto set = tp::read_predictions(std::filesystem::path(pred));
  // Topic of each id, from the second column of the data file.
  std::map<std::string, std::string> topic_of;
  auto in = open_in(data);
  std::string line;
  while (std::getline(in, line)) {
    const auto f = split(line, '\t');
    if (f.size() >= 2) topic_of[f[0]] = f[1];
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<Eigen::Index>> rows;
  for (int i = 0; i < set.size(); ++i) {
    const auto it = topic_of.find(set.ids[static_cast<std::size_t>(i)]);
    if (it == topic_of.end()) throw tp::DataError("id '" + set.ids[static_cast<std::size_t>(i)] + "' has no topic in " + data);
    auto& r = rows[it->second];
    if (r.empty()) order.push_back(it->second);
    r.push_back(i);
  }
  emit(c.out, [&](std::ostream& os) {
    os << std::setprecision(17);
    for (const auto& topic : order) {
      const auto& r = rows[topic];
      tp::Matrix<double> m(static_cast<Eigen::Index>(r.size()), set.num_classes());
      for (std::size_t j = 0; j < r.size(); ++j) m.row(static_cast<Eigen::Index>(j)) = set.probs.row(r[j]);
      const auto q = tp::quantify(m);
      os << topic;
      for (Eigen::Index k = 0; k < q.size(); ++k) os << '\t' << q(k);
      os << '\t' << r.size() << '\n';
    }
  });
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& subtask, const std::string& gold, const std::string& pred) {
  const auto cfg = c.load();
  tp::EvalOptions opts;
  opts.kld_epsilon = cfg.kld_epsilon;
  const auto report = tp::evaluate(tp::Subtask::parse(subtask), gold, pred, opts);
  emit(c.out, [&](std::ostream& os) {
    os << std::fixed << std::setprecision(6);
    os << report.metric << '\t' << report.value << '\n';
    for (const auto& [name, value] : report.details) os << name << '\t' << value << '\n';
  });
  return 0;
}

int cmd_gradcheck(const Common& c, int num_seeds, double h) {
  const auto cfg = c.load();
  tp::GradCheckSuiteOptions opts;
  opts.seed = cfg.seed;
  opts.num_seeds = num_seeds;
  opts.h = h;
  // Dropout active, then inactive; rows are tagged by mode.
  tp::GradCheckReport report;
  for (const bool train_mode : {true, false}) {
    opts.train_mode = train_mode;
    for (auto row : tp::run_gradcheck_suite(opts).rows) {
      row.model += train_mode ? "/train" : "/eval";
      report.rows.push_back(std::move(row));
    }
  }
  constexpr double kTolerance = 1e-3;
  const bool ok = report.passed(kTolerance);
  emit(c.out, [&](std::ostream& os) {
    report.print(os);
    os << "worst\t" << std::scientific << std::setprecision(3) << report.worst() << '\t' << (ok ? "PASS" : "FAIL")
       << '\n';
  });
  return ok ? 0 : kExitNumeric;
}

int cmd_correlate(const Common& c, const std::vector<std::string>& preds) {
  (void)c.load();
  if (preds.size() < 2) throw tp::ConfigError("correlate needs at least two --pred files");
  std::vector<tp::PredictionSet> sets;
  std::vector<std::string> names;
  for (const auto& p : preds) {
    sets.push_back(tp::read_predictions(std::filesystem::path(p)));
    names.push_back(stem(p));
    if (sets.back().ids != sets.front().ids) throw tp::DataError(p + ": ids differ from " + preds.front());
  }
  std::vector<tp::Matrix<double>> outputs;
  for (const auto& s : sets) outputs.push_back(s.probs);
  const auto r = tp::pearson_matrix(outputs, names);
  emit(c.out, [&](std::ostream& os) {
    os << std::fixed << std::setprecision(6) << "model";
    for (const auto& n : names) os << '\t' << n;
    os << '\n';
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      os << names[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < r.cols(); ++j) os << '\t' << r(i, j);
      os << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tweet polarity classification pipeline"};
  app.require_subcommand(1);
  std::map<CLI::App*, std::function<int()>> actions;
  std::vector<std::unique_ptr<Common>> commons;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    commons.push_back(std::make_unique<Common>());
    commons.back()->attach(cmd);
    return std::pair{cmd, commons.back().get()};
  };

  std::string input;
  {
    auto [cmd, c] = sub("preprocess", "normalize and tokenize raw tweets, one per line");
    cmd->add_option("--in", input, "raw tweets")->required()->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &input] { return cmd_preprocess(*c, input); };
  }
  std::string distant_in;
  {
    auto [cmd, c] = sub("distant-extract", "label raw tweets by emoticon polarity");
    cmd->add_option("--in", distant_in, "raw tweets")->required()->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &distant_in] { return cmd_distant_extract(*c, distant_in); };
  }
  std::vector<std::string> corpora;
  std::string pre_vocab_out;
  {
    auto [cmd, c] = sub("pretrain", "skip-gram embeddings from tokenized tweets");
    cmd->add_option("--corpus", corpora, "tokenized tweets (repeatable)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--vocab-out", pre_vocab_out, "vocabulary output")->required();
    actions[cmd] = [c = c, &corpora, &pre_vocab_out] { return cmd_pretrain(*c, corpora, pre_vocab_out); };
  }
  std::string dt_vocab, dt_emb, dt_data, dt_log;
  {
    auto [cmd, c] = sub("distant-train", "fine-tune embeddings on emoticon-labeled tweets");
    cmd->add_option("--vocab", dt_vocab)->required()->check(CLI::ExistingFile);
    cmd->add_option("--emb", dt_emb, "embedding checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--distant", dt_data, "output of distant-extract")->required()->check(CLI::ExistingFile);
    cmd->add_option("--log", dt_log, "epoch log path, '-' for stderr");
    actions[cmd] = [c = c, &dt_vocab, &dt_emb, &dt_data, &dt_log] {
      return cmd_distant_train(*c, dt_vocab, dt_emb, dt_data, dt_log);
    };
  }
  TrainArgs ta;
  {
    auto [cmd, c] = sub("train", "supervised training of one classifier");
    cmd->add_option("--kind", ta.kind, "cnn | bilstm")->check(CLI::IsMember({"cnn", "bilstm", "lstm"}));
    cmd->add_option("--subtask", ta.subtask, "A..E")->check(CLI::IsMember({"A", "B", "C", "D", "E", "a", "b", "c", "d", "e"}));
    cmd->add_option("--data", ta.data, "labeled tweets")->required()->check(CLI::ExistingFile);
    cmd->add_option("--vocab", ta.vocab, "vocabulary (default: built from --data)")->check(CLI::ExistingFile);
    cmd->add_option("--vocab-out", ta.vocab_out, "write the vocabulary used");
    cmd->add_option("--emb", ta.emb, "embedding checkpoint (default: random)")->check(CLI::ExistingFile);
    cmd->add_option("--log", ta.log, "epoch log path, '-' for stderr");
    actions[cmd] = [c = c, &ta] { return cmd_train(*c, ta); };
  }
  std::string pr_model, pr_vocab, pr_data;
  {
    auto [cmd, c] = sub("predict", "class probabilities as id<TAB>p_0<TAB>...");
    cmd->add_option("--model", pr_model)->required()->check(CLI::ExistingFile);
    cmd->add_option("--vocab", pr_vocab)->required()->check(CLI::ExistingFile);
    cmd->add_option("--data", pr_data, "tweets, labeled or not")->required()->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &pr_model, &pr_vocab, &pr_data] { return cmd_predict(*c, pr_model, pr_vocab, pr_data); };
  }
  std::vector<std::string> en_preds;
  std::string en_members, en_vocab, en_data;
  {
    auto [cmd, c] = sub("ensemble", "soft vote over prediction files or checkpoints");
    cmd->add_option("--pred", en_preds, "prediction file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--members", en_members, "kind<TAB>checkpoint per line")->check(CLI::ExistingFile);
    cmd->add_option("--vocab", en_vocab)->check(CLI::ExistingFile);
    cmd->add_option("--data", en_data)->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &en_preds, &en_members, &en_vocab, &en_data] {
      return cmd_ensemble(*c, en_preds, en_members, en_vocab, en_data);
    };
  }
  std::string q_pred, q_data;
  {
    auto [cmd, c] = sub("quantify", "per-topic prevalence as topic<TAB>p_0<TAB>...<TAB>n");
    cmd->add_option("--pred", q_pred)->required()->check(CLI::ExistingFile);
    cmd->add_option("--data", q_data, "tweets with id and topic columns")->required()->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &q_pred, &q_data] { return cmd_quantify(*c, q_pred, q_data); };
  }
  std::string ev_subtask, ev_gold, ev_pred;
  {
    auto [cmd, c] = sub("evaluate", "official metric of a subtask");
    cmd->add_option("--subtask", ev_subtask)->required()->check(CLI::IsMember({"A", "B", "C", "D", "E", "a", "b", "c", "d", "e"}));
    cmd->add_option("--gold", ev_gold)->required()->check(CLI::ExistingFile);
    cmd->add_option("--pred", ev_pred)->required()->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &ev_subtask, &ev_gold, &ev_pred] { return cmd_evaluate(*c, ev_subtask, ev_gold, ev_pred); };
  }
  int gc_seeds = 20;
  double gc_h = 1e-4;
  {
    auto [cmd, c] = sub("gradcheck", "finite-difference check of every backward pass");
    cmd->add_option("--seeds", gc_seeds, "number of random instances")->check(CLI::PositiveNumber);
    cmd->add_option("--step", gc_h, "central difference step")->check(CLI::PositiveNumber);
    actions[cmd] = [c = c, &gc_seeds, &gc_h] { return cmd_gradcheck(*c, gc_seeds, gc_h); };
  }
  std::vector<std::string> co_preds;
  {
    auto [cmd, c] = sub("correlate", "Pearson correlation matrix of prediction files");
    cmd->add_option("--pred", co_preds, "prediction file (repeatable)")->required()->check(CLI::ExistingFile);
    actions[cmd] = [c = c, &co_preds] { return cmd_correlate(*c, co_preds); };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto* cmd = app.get_subcommands().front();
  try {
    return actions.at(const_cast<CLI::App*>(cmd))();
  } catch (const tp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tp::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const tp::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const tp::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
