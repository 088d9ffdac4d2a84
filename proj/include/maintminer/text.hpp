#pragma once

#include <Eigen/Core>
#include <array>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maintminer/activity.hpp"
#include "maintminer/error.hpp"

namespace maintminer::text {

using StemSet = std::set<std::string>;

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

/// Stopword lists applied by normalize(). `english` is matched against
/// case-folded words before stemming, `custom` against stems.
struct Stopwords {
  std::set<std::string, std::less<>> english;
  std::set<std::string, std::less<>> custom;

  static const Stopwords& defaults();
  static Stopwords from_text(std::string_view english_text, std::string_view custom_text);
};

/// Ordered stem vocabulary used for the 20-coordinate keyword encoding.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> stems);

  /// The shipped 20-stem vocabulary.
  static const Vocabulary& defaults();
  /// One stem per line.
  static Vocabulary from_text(std::string_view text);
  /// De-duplicated union of per-class lists, sorted.
  static Vocabulary merged(const std::array<std::vector<std::string>, kActivityCount>& per_class);

  const std::vector<std::string>& stems() const { return stems_; }
  std::size_t size() const { return stems_.size(); }
  /// Coordinate of `stem`, or -1.
  int index_of(std::string_view stem) const;

 private:
  std::vector<std::string> stems_;
};

/// Per-class top-k lists shipped with the default vocabulary ("class stem ...").
std::array<std::vector<std::string>, kActivityCount> default_top10();

/// Stems the naive baseline searches for, keyed by activity.
struct NaiveKeywordTable {
  std::array<std::vector<std::string>, kActivityCount> stems;

  static const NaiveKeywordTable& defaults();
  /// Lines of the form "<class> <stem>".
  static NaiveKeywordTable from_text(std::string_view text);
};

/// Removes every character that is neither alphanumeric nor whitespace.
std::string strip_special(std::string_view text);

StemSet normalize(std::string_view message, const Stopwords& stopwords);
StemSet normalize(std::string_view message);

/// 0/1 indicator per vocabulary coordinate.
Eigen::VectorXd keyword_vector(const StemSet& stems, const Vocabulary& vocabulary);

/// True iff at least one vocabulary stem occurs in the message.
bool has_keywords(const StemSet& stems, const Vocabulary& vocabulary);

/// Per-class match counts of the naive table against the message stems.
std::array<int, kActivityCount> naive_scores(const StemSet& stems, const NaiveKeywordTable& table);

/// Argmax of naive_scores; ties go corrective, then perfective, then adaptive;
/// no match at all is corrective.
Activity naive_classify(std::string_view message, const NaiveKeywordTable& table, const Stopwords& stopwords);
Activity naive_classify(std::string_view message);

struct TopK {
  std::array<std::vector<std::pair<std::string, int>>, kActivityCount> per_class;
  Vocabulary merged;
};

/// Document frequency of each stem per class; the k most frequent per class,
/// ties broken lexicographically.
TopK top_k_frequencies(const std::vector<std::pair<Activity, std::string>>& corpus, std::size_t k,
                       const Stopwords& stopwords);

}  // namespace maintminer::text
