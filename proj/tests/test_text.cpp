#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/synthetic.hpp"
#include "tweetpolarity/tensor.hpp"
#include "tweetpolarity/text.hpp"

using Tokens = std::vector<std::string>;

using namespace tptest;

TEST_CASE("normalize examples") {
  const auto rules = tp::NormRules::defaults();
  CHECK(tp::normalize("sooooo", rules) == "soo");
  CHECK(tp::normalize("check http://x.co/ab :)", rules) == "check <url> <smile>");
  CHECK(tp::normalize("", rules) == "");
  CHECK(tp::normalize("GOOD Day", rules) == "good day");
}

TEST_CASE("normalize rules") {
  const auto rules = tp::NormRules::defaults();
  CHECK(tp::normalize("see www.example.com now", rules) == "see <url> now");
  CHECK(tp::normalize("HTTPS://A.B/C?d=1", rules) == "<url>");
  CHECK(tp::normalize("sad :( and :-( =(", rules) == "sad <sadface> and <sadface> <sadface>");
  CHECK(tp::normalize("lol :P xD :p", rules) == "lol <lolface> <lolface> <lolface>");
  CHECK(tp::normalize("hmm :| :-|", rules) == "hmm <neutralface> <neutralface>");
  CHECK(tp::normalize(":D =) :-)", rules) == "<smile> <smile> <smile>");
  CHECK(tp::normalize("!!!!", rules) == "!!");
  CHECK(tp::normalize("aAAa", rules) == "aa");
  CHECK(tp::normalize("ééé", rules) == "éé");
  // four-byte code point whose continuation bytes repeat; must survive intact
  CHECK(tp::normalize("\xF0\x90\x90\x90", rules) == "\xF0\x90\x90\x90");
  // emoticons are whole chunks only
  CHECK(tp::normalize("xdrive", rules) == "xdrive");
}

TEST_CASE("normalize is idempotent on a fuzz corpus") {
  const auto rules = tp::NormRules::defaults();
  tp::Rng rng(20170801);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string s = fuzz_string(rng);
    const std::string once = tp::normalize(s, rules);
    if (tp::normalize(once, rules) != once && ++failures <= 5) FAIL_CHECK("not idempotent on: " << s);
  }
  CHECK(failures == 0);
}

TEST_CASE("tokenize examples") {
  CHECK(tp::tokenize("good day") == Tokens{"good", "day"});
  CHECK(tp::tokenize("great!") == Tokens{"great", "!"});
  CHECK(tp::tokenize("<smile> ok") == Tokens{"<smile>", "ok"});
  CHECK(tp::tokenize("(<smile>)") == Tokens{"(", "<smile>", ")"});
  CHECK(tp::tokenize("\"wow,\" he said.") == Tokens{"\"", "wow", ",", "\"", "he", "said", "."});
  CHECK(tp::tokenize("e.g. ok") == Tokens{"e.g", ".", "ok"});
  CHECK(tp::tokenize("   ").empty());
}

TEST_CASE("tokenize peels exactly the listed punctuation") {
  const std::string listed = ".,!?;:\"()[]";
  for (int c = 0; c < 128; ++c) {
    if (!std::ispunct(c)) continue;
    const std::string p(1, static_cast<char>(c));
    const auto toks = tp::tokenize("great" + p);
    const Tokens split = {"great", p};
    const Tokens whole = {"great" + p};
    INFO("char ", p);
    CHECK(toks == (listed.find(static_cast<char>(c)) != std::string::npos ? split : whole));
  }
}

TEST_CASE("tokenize properties") {
  const auto rules = tp::NormRules::defaults();
  tp::Rng rng(7);
  for (int i = 0; i < 3000; ++i) {
    const auto toks = tp::tokenize(tp::normalize(fuzz_string(rng), rules));
    for (const auto& t : toks) {
      CHECK_FALSE(t.empty());
      CHECK(t.find_first_of(" \t\n\r\f\v") == std::string::npos);
    }
    CHECK(tp::tokenize(tp::join_tokens(toks)) == toks);
  }
}

TEST_CASE("augment_with_topic") {
  const auto rules = tp::NormRules::defaults();
  auto t = tp::augment_with_topic({"love", "this", "phone"}, "phone", rules);
  CHECK(t.tokens == Tokens{"love", "this", "phone"});
  CHECK(t.topic_flags == std::vector<bool>{false, false, true});

  t = tp::augment_with_topic({"love", "it"}, "new phone", rules);
  CHECK(t.tokens == Tokens{"love", "it", "new", "phone"});
  CHECK(t.topic_flags == std::vector<bool>{false, false, true, true});

  t = tp::augment_with_topic({}, "x", rules);
  CHECK(t.tokens == Tokens{"x"});
  CHECK(t.topic_flags == std::vector<bool>{true});

  // topics are normalized with the same rules
  t = tp::augment_with_topic({"the", "iphone", "rocks"}, "iPhone", rules);
  CHECK(t.tokens == Tokens{"the", "iphone", "rocks"});
  CHECK(t.topic_flags == std::vector<bool>{false, true, false});

  SUBCASE("flags mark exactly the topic words; every topic word present") {
    tp::Rng rng(3);
    const Tokens pool = {"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 500; ++trial) {
      Tokens tweet, topic;
      for (auto n = tp::uniform_index(rng, 8); n > 0; --n) tweet.push_back(pool[tp::uniform_index(rng, pool.size())]);
      for (auto n = 1 + tp::uniform_index(rng, 3); n > 0; --n) topic.push_back(pool[tp::uniform_index(rng, pool.size())]);
      const auto out = tp::augment_with_topic(tweet, topic);
      REQUIRE(out.tokens.size() == out.topic_flags.size());
      for (const auto& w : topic) CHECK(std::find(out.tokens.begin(), out.tokens.end(), w) != out.tokens.end());
      for (std::size_t i = 0; i < out.tokens.size(); ++i) {
        const bool is_topic = std::find(topic.begin(), topic.end(), out.tokens[i]) != topic.end();
        CHECK(out.topic_flags[i] == is_topic);
      }
      // original tokens keep their order at the front
      CHECK(std::equal(tweet.begin(), tweet.end(), out.tokens.begin()));
    }
  }
}

TEST_CASE("emoticon rules file") {
  const auto dir = std::filesystem::temp_directory_path() / "tp_text_rules";
  std::filesystem::create_directories(dir);
  const auto path = dir / "rules.tsv";
  {
    std::ofstream out(path);
    out << "# custom\n<3\t<heart>\n:)\t<smile>\n";
  }
  const auto rules = tp::NormRules::load(path);
  CHECK(rules.emoticons.size() == 2);
  CHECK(tp::normalize("i <3 it :)", rules) == "i <heart> it <smile>");
  CHECK(tp::normalize("sad :(", rules) == "sad :(");

  CHECK(tp::NormRules::load(dir / "missing.tsv").emoticons.size() == tp::NormRules::defaults().emoticons.size());

  {
    std::ofstream out(path);
    out << ":)\t<smile>\n:)\t<other>\n";
  }
  CHECK_THROWS_AS(tp::NormRules::load(path), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "no-tab-here\n";
  }
  CHECK_THROWS_AS(tp::NormRules::load(path), std::invalid_argument);

  tp::NormRules bad = tp::NormRules::defaults();
  bad.max_repeat = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  std::filesystem::remove_all(dir);
}
