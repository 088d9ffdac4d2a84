#include <fstream>
#include <map>

#include "doctest.h"
#include "maintminer/random.hpp"
#include "maintminer/stemmer.hpp"
#include "maintminer/strings.hpp"
#include "maintminer/text.hpp"

using namespace maintminer;
using namespace maintminer::text;

TEST_CASE("stemmer agrees with the frozen Snowball table") {
  // Generated by tools/gen_stem_table.py from the Python snowballstemmer package.
  std::ifstream in(MAINTMINER_FIXTURES "/stems.tsv");
  REQUIRE(in);
  std::string line;
  int checked = 0, mismatches = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string word = line.substr(0, tab), expected = line.substr(tab + 1);
    const std::string got = stem(word);
    if (got != expected) {
      ++mismatches;
      if (mismatches <= 20) MESSAGE(word << ": expected " << expected << ", got " << got);
    }
    ++checked;
  }
  CHECK(checked > 9000);
  CHECK(mismatches == 0);
}

TEST_CASE("vocabulary stems are fixed points of the stemmer") {
  for (const auto& s : Vocabulary::defaults().stems()) CHECK(stem(s) == s);
}

TEST_CASE("default vocabulary is the twenty reference stems") {
  const std::vector<std::string> expected{"add",    "allow",  "bug",    "chang",  "error",   "fail",  "fix",
                                          "implement", "improv", "issu", "method", "new",    "npe",   "refactor",
                                          "remov",  "report", "set",    "support", "test",   "use"};
  CHECK(Vocabulary::defaults().stems() == expected);
}

TEST_CASE("merged top-10 lists give the twenty-stem vocabulary") {
  auto merged = Vocabulary::merged(default_top10());
  CHECK(merged.stems() == Vocabulary::defaults().stems());
  for (const auto& list : default_top10()) CHECK(list.size() == 10);
}

TEST_CASE("normalize the worked message") {
  auto stems = normalize("Refactored blob logic into separate methods");
  CHECK(stems.count("refactor"));
  CHECK(stems.count("method"));
  CHECK_FALSE(stems.count("into"));
  CHECK(normalize("").empty());
  CHECK(normalize("Fixes fixed fixing") == StemSet{"fix"});
}

TEST_CASE("normalized output carries no stopwords, custom stems or punctuation") {
  const auto& sw = Stopwords::defaults();
  auto stems = normalize("The patch for HBase: we've merged the commit, also fixed a bug!!", sw);
  for (const auto& s : stems) {
    CHECK_FALSE(s.empty());
    CHECK_FALSE(sw.english.count(s));
    CHECK_FALSE(sw.custom.count(s));
    for (char c : s) CHECK(std::isalnum(static_cast<unsigned char>(c)));
  }
  CHECK(stems.count("fix"));
  CHECK(stems.count("bug"));
  CHECK_FALSE(stems.count("patch"));
  CHECK_FALSE(stems.count("merg"));
}

TEST_CASE("keyword vector of the worked message") {
  const auto& vocab = Vocabulary::defaults();
  auto v = keyword_vector(normalize("Refactored blob logic into separate methods"), vocab);
  REQUIRE(v.size() == 20);
  CHECK(v.sum() == 2);
  CHECK(v(vocab.index_of("refactor")) == 1);
  CHECK(v(vocab.index_of("method")) == 1);
  CHECK(keyword_vector({}, vocab).isZero());
  StemSet all(vocab.stems().begin(), vocab.stems().end());
  CHECK(keyword_vector(all, vocab).isOnes());
}

TEST_CASE("duplicated words do not change the keyword vector") {
  const auto& vocab = Vocabulary::defaults();
  Rng rng(11);
  const std::vector<std::string> words{"fix", "tests", "adding", "support", "the", "bug", "widget", "refactoring",
                                       "set", "errors", "npe", "improve", "new", "method", "report"};
  for (int t = 0; t < 200; ++t) {
    std::string msg;
    for (int i = 0; i < 6; ++i) msg += words[uniform_index(rng, words.size())] + " ";
    auto v = keyword_vector(normalize(msg), vocab);
    CHECK(((v.array() == 0) || (v.array() == 1)).all());
    CHECK(v == keyword_vector(normalize(msg + msg), vocab));
  }
}

TEST_CASE("naive classifier") {
  CHECK(naive_classify("fixed NPE when closing stream") == Activity::Corrective);
  CHECK(naive_classify("misc housekeeping") == Activity::Corrective);
  CHECK(naive_classify("add new support for widgets") == Activity::Adaptive);
  CHECK(naive_classify("fix crash and add feature") == Activity::Corrective);
  CHECK(naive_classify("refactor the parser") == Activity::Perfective);
  CHECK(naive_classify("") == Activity::Corrective);
  // Perfective beats adaptive on a tie.
  CHECK(naive_classify("refactor and add") == Activity::Perfective);
  CHECK(naive_scores(normalize("add new support for widgets"), NaiveKeywordTable::defaults()) ==
        std::array<int, 3>{3, 0, 0});
}

TEST_CASE("naive table holds the reference keywords") {
  const auto& t = NaiveKeywordTable::defaults();
  auto has = [&](Activity a, const char* s) {
    const auto& l = t.stems[index_of(a)];
    return std::find(l.begin(), l.end(), s) != l.end();
  };
  CHECK(has(Activity::Corrective, "fix"));
  CHECK(has(Activity::Adaptive, "add"));
  CHECK(has(Activity::Perfective, "refactor"));
  CHECK(t.stems[index_of(Activity::Corrective)].size() == 9);
  CHECK(t.stems[index_of(Activity::Perfective)].size() == 11);
  CHECK(t.stems[index_of(Activity::Adaptive)].size() == 7);
}

TEST_CASE("naive classifier is total over arbitrary bytes") {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    std::string s;
    for (int i = 0; i < 40; ++i) s.push_back(static_cast<char>(uniform_index(rng, 256)));
    auto a = naive_classify(s);
    CHECK(index_of(a) >= 0);
    CHECK(index_of(a) < 3);
  }
}

TEST_CASE("top-k by document frequency with lexicographic ties") {
  const auto& sw = Stopwords::defaults();
  std::vector<std::pair<Activity, std::string>> corpus{
      {Activity::Corrective, "fix fix bug"}, {Activity::Perfective, "refactor"}, {Activity::Adaptive, "add"}};
  auto top = top_k_frequencies(corpus, 2, sw);
  const auto& c = top.per_class[index_of(Activity::Corrective)];
  REQUIRE(c.size() == 2);
  CHECK(c[0].first == "bug");
  CHECK(c[1].first == "fix");
  CHECK(top.merged.stems() == std::vector<std::string>{"add", "bug", "fix", "refactor"});
  CHECK_THROWS_AS(top_k_frequencies({{Activity::Corrective, "fix"}}, 2, sw), EmptyCorpus);
}

TEST_CASE("top-k recovers a planted ranking") {
  const auto& sw = Stopwords::defaults();
  const std::vector<std::string> words{"widget", "gadget", "sprocket", "lever", "pulley", "spring"};
  Rng rng(9);
  std::vector<std::pair<Activity, std::string>> corpus;
  std::map<std::string, int> planted;
  for (int d = 0; d < 120; ++d) {
    std::string msg;
    for (std::size_t w = 0; w < words.size(); ++w)
      if (uniform_index(rng, 12) < 12 - 2 * w) msg += words[w] + " " + words[w] + " ";
    for (const auto& s : normalize(msg, sw)) ++planted[s];
    corpus.push_back({Activity::Corrective, msg});
  }
  corpus.push_back({Activity::Perfective, "x"});
  corpus.push_back({Activity::Adaptive, "y"});
  std::vector<std::pair<std::string, int>> expected(planted.begin(), planted.end());
  std::stable_sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.second > b.second; });
  expected.resize(4);
  auto top = top_k_frequencies(corpus, 4, sw);
  CHECK(top.per_class[index_of(Activity::Corrective)] == expected);
}
