#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "tweetpolarity/corpus.hpp"
#include "tweetpolarity/errors.hpp"
#include "tweetpolarity/tensor.hpp"

using Tokens = std::vector<std::string>;

TEST_CASE("subtask table") {
  CHECK(tp::Subtask::parse("A").num_classes == 3);
  CHECK_FALSE(tp::Subtask::parse("A").has_topic);
  for (const char* s : {"B", "D"}) {
    CHECK(tp::Subtask::parse(s).num_classes == 2);
    CHECK(tp::Subtask::parse(s).has_topic);
  }
  for (const char* s : {"C", "e"}) {
    CHECK(tp::Subtask::parse(s).num_classes == 5);
    CHECK(tp::Subtask::parse(s).has_topic);
  }
  CHECK_THROWS(tp::Subtask::parse("F"));
  const auto c = tp::Subtask::parse("C");
  CHECK(c.label_index("-2") == 0);
  CHECK(c.label_index("2") == 4);
  CHECK(c.label_name(0) == "-2");
  CHECK(tp::Subtask::parse("A").label_name(2) == "positive");
}

TEST_CASE("load_labeled") {
  const auto rules = tp::NormRules::defaults();
  SUBCASE("subtask A") {
    std::istringstream in("t1\tpositive\tNice day :)\n");
    const auto ex = tp::load_labeled(in, tp::Subtask::parse("A"), rules);
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].id == "t1");
    CHECK(ex[0].label == 2);
    CHECK_FALSE(ex[0].topic.has_value());
    CHECK(ex[0].tweet.tokens == Tokens{"nice", "day", "<smile>"});
    CHECK(ex[0].tweet.topic_flags == std::vector<bool>{false, false, false});
  }
  SUBCASE("subtask C with topic") {
    // normalize("hate it") = "hate it"; tokens [hate, it]; "phone" missing -> appended and flagged
    std::istringstream in("t2\tphone\t-2\thate it\n");
    const auto ex = tp::load_labeled(in, tp::Subtask::parse("C"), rules);
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].label == 0);
    CHECK(ex[0].topic == "phone");
    CHECK(ex[0].tweet.tokens == Tokens{"hate", "it", "phone"});
    CHECK(ex[0].tweet.topic_flags == std::vector<bool>{false, false, true});
  }
  SUBCASE("unknown label names the line") {
    std::istringstream in("a\tpositive\tx\nb\tnegative\ty\nc\tbogus\tz\n");
    try {
      tp::load_labeled(in, tp::Subtask::parse("A"), rules);
      FAIL("expected an error");
    } catch (const tp::DataError& e) {
      CHECK(std::string(e.what()).rfind("line 3: unknown label", 0) == 0);
    }
  }
  SUBCASE("wrong column count") {
    std::istringstream in("a\tpositive\n");
    CHECK_THROWS_WITH_AS(tp::load_labeled(in, tp::Subtask::parse("A"), rules), doctest::Contains("line 1"),
                         tp::DataError);
  }
  SUBCASE("empty file") {
    std::istringstream in("");
    CHECK_THROWS_AS(tp::load_labeled(in, tp::Subtask::parse("B"), rules), tp::DataError);
  }
}

TEST_CASE("extract_distant") {
  const auto rules = tp::NormRules::defaults();
  std::istringstream in("love it :)\nmeh :) :(\nno emoticon here\nawful day :(\nso fun xD\n:)\n");
  const auto d = tp::extract_distant(in, rules);
  // a tweet that is only an emoticon is empty once stripped and is dropped
  REQUIRE(d.positives.size() == 2);
  CHECK(d.positives[0].tokens == Tokens{"love", "it"});
  CHECK(d.positives[1].tokens == Tokens{"so", "fun"});
  REQUIRE(d.negatives.size() == 1);
  CHECK(d.negatives[0].tokens == Tokens{"awful", "day"});

  std::istringstream empty("");
  const auto e = tp::extract_distant(empty, rules);
  CHECK(e.positives.empty());
  CHECK(e.negatives.empty());
}

TEST_CASE("extract_distant leaks no polarity emoticon") {
  const auto rules = tp::NormRules::defaults();
  const tp::DistantRules polarity;
  tp::Rng rng(42);
  const Tokens words = {"good", "bad", "day", "ok", ":)", ":(", ":D", "=(", "xD", ":|", "http://a.b", "WOW"};
  std::ostringstream raw;
  for (int i = 0; i < 2000; ++i) {
    for (auto n = tp::uniform_index(rng, 8); n > 0; --n) raw << words[tp::uniform_index(rng, words.size())] << ' ';
    raw << '\n';
  }
  std::istringstream in(raw.str());
  const auto d = tp::extract_distant(in, rules);
  CHECK(d.positives.size() > 100);
  CHECK(d.negatives.size() > 100);
  for (const auto* set : {&d.positives, &d.negatives})
    for (const auto& tw : *set)
      for (const auto& t : tw.tokens) {
        CHECK(std::find(polarity.positive.begin(), polarity.positive.end(), t) == polarity.positive.end());
        CHECK(std::find(polarity.negative.begin(), polarity.negative.end(), t) == polarity.negative.end());
      }
}

TEST_CASE("build_vocab") {
  const std::vector<Tokens> corpus = {{"a", "a", "b"}};
  auto v = tp::Vocabulary::build(corpus, 1);
  CHECK(v.size() == 4);
  CHECK(v.index_of("<pad>") == 0);
  CHECK(v.index_of("<unk>") == 1);
  CHECK(v.index_of("a") == 2);
  CHECK(v.index_of("b") == 3);
  CHECK(v.index_of("zzz") == tp::Vocabulary::kUnk);

  v = tp::Vocabulary::build(corpus, 2);
  CHECK(v.size() == 3);
  CHECK(v.index_of("a") == 2);
  CHECK_FALSE(v.contains("b"));

  CHECK(tp::Vocabulary::build(std::vector<Tokens>{}, 1).size() == 2);
  CHECK_THROWS(tp::Vocabulary::build(corpus, 0));

  SUBCASE("Zipf stream against a counting oracle") {
    tp::Rng rng(9);
    std::vector<double> cdf;
    double acc = 0;
    for (int r = 1; r <= 500; ++r) cdf.push_back(acc += 1.0 / r);
    Tokens stream;
    for (int i = 0; i < 10000; ++i) {
      const double u = tp::uniform01(rng) * acc;
      const auto rank = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      stream.push_back("w" + std::to_string(rank));
    }
    for (int min_count : {1, 2, 5, 20}) {
      const auto vocab = tp::Vocabulary::build(std::vector<Tokens>{stream}, min_count);
      std::map<std::string, std::int64_t> oracle;
      for (const auto& t : stream) oracle[t]++;
      std::size_t expected = 0;
      for (const auto& [t, c] : oracle) {
        const bool keep = c >= min_count;
        expected += keep;
        CHECK(vocab.contains(t) == keep);
        if (keep) CHECK(vocab.count_of(vocab.index_of(t)) == c);
      }
      CHECK(static_cast<std::size_t>(vocab.size()) == expected + 2);
      for (int i = 3; i < vocab.size(); ++i) {
        const bool ordered = vocab.count_of(i - 1) > vocab.count_of(i) ||
                             (vocab.count_of(i - 1) == vocab.count_of(i) && vocab.token_of(i - 1) < vocab.token_of(i));
        CHECK(ordered);
      }
      for (int i = 0; i < vocab.size(); ++i) CHECK(vocab.index_of(vocab.token_of(i)) == i);
    }
  }
}

TEST_CASE("vocabulary persistence and hash") {
  const std::vector<Tokens> corpus = {{"x", "y", "y", "z"}};
  const auto v = tp::Vocabulary::build(corpus, 1);
  const auto path = std::filesystem::temp_directory_path() / "tp_vocab_test.tsv";
  v.save(path);
  const auto w = tp::Vocabulary::load(path);
  CHECK(w.size() == v.size());
  CHECK(w.hash() == v.hash());
  CHECK(w.index_of("y") == v.index_of("y"));
  const auto other = tp::Vocabulary::build(std::vector<Tokens>{{"x", "y"}}, 1);
  CHECK(other.hash() != v.hash());
  std::filesystem::remove(path);
}

TEST_CASE("class_weights") {
  std::vector<std::int64_t> counts = {50, 50};
  CHECK(tp::class_weights(counts) == std::vector<double>{1.0, 1.0});

  counts = {10, 30, 60};
  // 1/count = (0.1, 0.0333.., 0.01666..), mean 0.05 -> (2, 2/3, 1/3)
  const auto w = tp::class_weights(counts);
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(w[1] == doctest::Approx(0.6667).epsilon(1e-4));
  CHECK(w[2] == doctest::Approx(0.3333).epsilon(1e-4));

  counts = {0, 10};
  CHECK_THROWS_WITH_AS(tp::class_weights(counts), doctest::Contains("class 0"), tp::DataError);

  SUBCASE("mean one and permutation equivariance") {
    tp::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> c(2 + tp::uniform_index(rng, 4));
      for (auto& x : c) x = 1 + static_cast<std::int64_t>(tp::uniform_index(rng, 1000));
      const auto base = tp::class_weights(c);
      CHECK(std::abs(std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(base.size()) - 1.0) < 1e-9);
      std::vector<std::size_t> perm(c.size());
      std::iota(perm.begin(), perm.end(), 0);
      tp::shuffle(perm, rng);
      std::vector<std::int64_t> pc(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) pc[i] = c[perm[i]];
      const auto pw = tp::class_weights(pc);
      for (std::size_t i = 0; i < c.size(); ++i) CHECK(pw[i] == doctest::Approx(base[perm[i]]).epsilon(1e-12));
    }
  }

  SUBCASE("from examples") {
    std::vector<tp::Example> ex(4);
    ex[0].label = 0;
    ex[1].label = 1;
    ex[2].label = 1;
    ex[3].label = 1;
    const auto ew = tp::class_weights(ex, 2);
    CHECK(ew[0] == doctest::Approx(1.5));
    CHECK(ew[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(tp::class_weights(ex, 3), tp::DataError);
  }
}
