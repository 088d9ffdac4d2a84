#include "maintminer/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "maintminer/resources.hpp"
#include "maintminer/stemmer.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::text {

Stopwords Stopwords::from_text(std::string_view english_text, std::string_view custom_text) {
  Stopwords s;
  for (auto& w : resource_lines(english_text)) s.english.insert(to_lower(w));
  for (auto& w : resource_lines(custom_text)) s.custom.insert(to_lower(w));
  return s;
}

const Stopwords& Stopwords::defaults() {
  static const Stopwords s = from_text(resources::english_stopwords, resources::custom_stopwords);
  return s;
}

Vocabulary::Vocabulary(std::vector<std::string> stems) : stems_(std::move(stems)) {
  std::set<std::string> seen;
  for (const auto& s : stems_) {
    if (s.empty()) throw ArgError("vocabulary: empty stem");
    if (!seen.insert(s).second) throw ArgError("vocabulary: duplicate stem '" + s + "'");
  }
}

Vocabulary Vocabulary::from_text(std::string_view text) { return Vocabulary(resource_lines(text)); }

const Vocabulary& Vocabulary::defaults() {
  static const Vocabulary v = from_text(resources::vocab20);
  return v;
}

Vocabulary Vocabulary::merged(const std::array<std::vector<std::string>, kActivityCount>& per_class) {
  std::set<std::string> all;
  for (const auto& list : per_class) all.insert(list.begin(), list.end());
  return Vocabulary(std::vector<std::string>(all.begin(), all.end()));
}

int Vocabulary::index_of(std::string_view stem) const {
  auto it = std::find(stems_.begin(), stems_.end(), stem);
  return it == stems_.end() ? -1 : static_cast<int>(it - stems_.begin());
}

namespace {

std::array<std::vector<std::string>, kActivityCount> parse_class_lists(std::string_view text, bool one_per_line) {
  std::array<std::vector<std::string>, kActivityCount> out;
  for (const auto& line : resource_lines(text)) {
    auto tokens = split_whitespace(line);
    if (tokens.size() < 2 || (one_per_line && tokens.size() != 2))
      throw ArgError("malformed class list line: " + line);
    auto activity = parse_activity(tokens[0]);
    if (!activity) throw ArgError("unknown activity '" + tokens[0] + "'");
    auto& list = out[index_of(*activity)];
    list.insert(list.end(), tokens.begin() + 1, tokens.end());
  }
  return out;
}

}  // namespace

std::array<std::vector<std::string>, kActivityCount> default_top10() {
  return parse_class_lists(resources::vocab_top10, false);
}

NaiveKeywordTable NaiveKeywordTable::from_text(std::string_view text) {
  NaiveKeywordTable t;
  t.stems = parse_class_lists(text, true);
  return t;
}

const NaiveKeywordTable& NaiveKeywordTable::defaults() {
  static const NaiveKeywordTable t = from_text(resources::naive_keywords);
  return t;
}

std::string strip_special(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || std::isspace(u)) out.push_back(c);
  }
  return out;
}

StemSet normalize(std::string_view message, const Stopwords& stopwords) {
  StemSet out;
  for (const auto& word : split_whitespace(to_lower(strip_special(message)))) {
    if (stopwords.english.count(word)) continue;
    std::string s = stem(word);
    if (s.empty() || stopwords.custom.count(s)) continue;
    out.insert(std::move(s));
  }
  return out;
}

StemSet normalize(std::string_view message) { return normalize(message, Stopwords::defaults()); }

Eigen::VectorXd keyword_vector(const StemSet& stems, const Vocabulary& vocabulary) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocabulary.size()));
  for (std::size_t i = 0; i < vocabulary.size(); ++i)
    if (stems.count(vocabulary.stems()[i])) v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

bool has_keywords(const StemSet& stems, const Vocabulary& vocabulary) {
  return std::any_of(vocabulary.stems().begin(), vocabulary.stems().end(),
                     [&](const std::string& s) { return stems.count(s) > 0; });
}

std::array<int, kActivityCount> naive_scores(const StemSet& stems, const NaiveKeywordTable& table) {
  std::array<int, kActivityCount> scores{};
  for (int k = 0; k < kActivityCount; ++k)
    for (const auto& s : table.stems[k])
      if (stems.count(s)) ++scores[k];
  return scores;
}

Activity naive_classify(std::string_view message, const NaiveKeywordTable& table, const Stopwords& stopwords) {
  const auto scores = naive_scores(normalize(message, stopwords), table);
  Activity best = Activity::Corrective;
  for (auto a : {Activity::Perfective, Activity::Adaptive})
    if (scores[index_of(a)] > scores[index_of(best)]) best = a;
  return best;
}

Activity naive_classify(std::string_view message) {
  return naive_classify(message, NaiveKeywordTable::defaults(), Stopwords::defaults());
}

TopK top_k_frequencies(const std::vector<std::pair<Activity, std::string>>& corpus, std::size_t k,
                       const Stopwords& stopwords) {
  std::array<std::map<std::string, int>, kActivityCount> counts;
  std::array<int, kActivityCount> documents{};
  for (const auto& [label, message] : corpus) {
    ++documents[index_of(label)];
    for (const auto& s : normalize(message, stopwords)) ++counts[index_of(label)][s];
  }
  TopK out;
  std::array<std::vector<std::string>, kActivityCount> lists;
  for (int c = 0; c < kActivityCount; ++c) {
    if (documents[c] == 0) throw EmptyCorpus("no messages labeled " + std::string(to_string(activity_at(c))));
    std::vector<std::pair<std::string, int>> ranked(counts[c].begin(), counts[c].end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > k) ranked.resize(k);
    for (const auto& [stem, n] : ranked) lists[c].push_back(stem);
    out.per_class[c] = std::move(ranked);
  }
  out.merged = Vocabulary::merged(lists);
  return out;
}

}  // namespace maintminer::text
