#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maintminer/activity.hpp"
#include "maintminer/change_type.hpp"
#include "maintminer/error.hpp"
#include "maintminer/text.hpp"

namespace maintminer::dataset {

class SchemaError : public Error {
 public:
  using Error::Error;
};

class StratifyError : public Error {
 public:
  using Error::Error;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

/// Raised when a file has data rows and every one of them was rejected.
class RowErrors : public Error {
 public:
  RowErrors(std::string what, std::vector<RowError> errors) : Error(std::move(what)), errors(std::move(errors)) {}
  std::vector<RowError> errors;
};

struct LabeledCommit {
  std::string project;
  std::string commit_id;
  Activity label = Activity::Corrective;
  std::string message;
  ChangeCounts change_counts{};

  bool operator==(const LabeledCommit&) const = default;
};

struct LoadResult {
  std::vector<LabeledCommit> commits;
  std::vector<RowError> errors;
  std::array<std::size_t, kActivityCount> class_counts{};
};

/// Parses either schema. Long form has columns project, commit_id, label,
/// message, change_type, count (one change type per row, rows of a commit
/// may be spread over the file). Wide form has one row per commit and one
/// column per change type; column names are matched case-insensitively and
/// commit/label/message columns accept common aliases.
LoadResult parse_labeled_dataset(std::string_view csv_text);
LoadResult load_labeled_dataset(const std::string& path);

/// Long-form CSV. A commit without changes is written as one row with empty
/// change_type and count.
std::string to_long_form(const std::vector<LabeledCommit>& commits);

struct SplitSpec {
  double train_fraction = 0.85;
  std::uint64_t seed = 42;
};

struct Split {
  std::vector<LabeledCommit> train;
  std::vector<LabeledCommit> test;
};

/// Per class, ceil(train_fraction * n_c) randomly chosen instances go to the
/// training fold; both folds keep input order.
Split stratified_split(const std::vector<LabeledCommit>& data, const SplitSpec& spec);

/// Number of training instances drawn from a class of size n.
std::size_t train_count(std::size_t n, double train_fraction);

enum class Encoding { Keywords20, Changes48, Combined68 };

std::string_view to_string(Encoding e);
/// Accepts KEYWORDS/KEYWORDS_20/Keywords, CHANGES..., COMBINED...
Encoding parse_encoding(std::string_view name);
constexpr std::array<Encoding, 3> kAllEncodings{Encoding::Keywords20, Encoding::Changes48, Encoding::Combined68};

/// Feature dimension for the given encoding and keyword vocabulary size.
Eigen::Index dimension(Encoding e, std::size_t vocabulary_size = 20);

/// Encodes the message stems and change counts. Combined is the keyword block
/// followed by the change block.
Eigen::VectorXd encode(const text::StemSet& stems, const ChangeCounts& counts, Encoding e,
                       const text::Vocabulary& vocabulary);

Eigen::VectorXd assemble_features(const LabeledCommit& commit, Encoding e,
                                  const text::Vocabulary& vocabulary = text::Vocabulary::defaults());

/// Feature names in coordinate order.
std::vector<std::string> feature_names(Encoding e, const text::Vocabulary& vocabulary = text::Vocabulary::defaults());

/// Row-per-commit design matrix plus labels (Activity indices).
struct FeatureMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  Encoding encoding = Encoding::Combined68;
};

FeatureMatrix assemble_matrix(const std::vector<LabeledCommit>& commits, Encoding e,
                              const text::Vocabulary& vocabulary = text::Vocabulary::defaults());

/// One JSON object per commit: project, commit_id, label, encoding, features.
std::string to_features_jsonl(const std::vector<LabeledCommit>& commits, Encoding e,
                              const text::Vocabulary& vocabulary = text::Vocabulary::defaults());

}  // namespace maintminer::dataset
