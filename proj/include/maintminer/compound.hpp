#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "maintminer/dataset.hpp"
#include "maintminer/learners.hpp"
#include "maintminer/metrics.hpp"
#include "maintminer/text.hpp"

namespace maintminer::learners {

class CvError : public Error {
 public:
  using Error::Error;
};

/// Commits turned into the widest (keywords + changes) feature matrix once,
/// plus the routing flag and labels. Narrower encodings are column slices.
struct CommitTable {
  Eigen::MatrixXd features;  // rows x (|vocabulary| + 48)
  Eigen::VectorXi labels;
  std::vector<char> keyword;  // routing flag per row
  text::Vocabulary vocabulary = text::Vocabulary::defaults();

  static CommitTable from_commits(const std::vector<dataset::LabeledCommit>& commits,
                                  const text::Vocabulary& vocabulary = text::Vocabulary::defaults(),
                                  const text::Stopwords& stopwords = text::Stopwords::defaults());
  Eigen::Index rows() const { return features.rows(); }
  CommitTable subset(const std::vector<Eigen::Index>& rows) const;
  Eigen::MatrixXd slice(dataset::Encoding e) const;
};

/// Columns of a widest-encoding matrix (or vector) that make up encoding `e`.
Eigen::MatrixXd slice_columns(const Eigen::MatrixXd& combined, dataset::Encoding e, std::size_t vocabulary_size);

struct CompoundSpec {
  Algorithm algorithm = Algorithm::Forest;
  dataset::Encoding model_kw = dataset::Encoding::Keywords20;
  dataset::Encoding model_nokw = dataset::Encoding::Combined68;
  Hyperparameters hyper;
  std::uint64_t seed = 42;
};

class CompoundModel {
 public:
  CompoundModel(Component model_kw, Component model_nokw, text::Vocabulary vocabulary);

  const Component& model_kw() const { return kw_; }
  const Component& model_nokw() const { return nokw_; }
  const text::Vocabulary& vocabulary() const { return vocabulary_; }

  bool routes_to_kw(const text::StemSet& stems) const;
  Activity classify(std::string_view message, const ChangeCounts& counts,
                    const text::Stopwords& stopwords = text::Stopwords::defaults()) const;
  /// Row of the widest encoding plus its routing flag.
  Activity classify_row(const Eigen::Ref<const Eigen::VectorXd>& combined, bool keyword) const;
  std::vector<Activity> classify_table(const CommitTable& table) const;

  nlohmann::json to_json() const;
  static CompoundModel from_json(const nlohmann::json& j);

 private:
  Component kw_;
  Component nokw_;
  text::Vocabulary vocabulary_;
};

Activity classify_commit(const CompoundModel& model, const dataset::LabeledCommit& commit);

/// Both components see every row of `train`; only prediction is routed.
/// The table's vocabulary becomes the routing vocabulary.
CompoundModel train_compound(const CommitTable& train, const CompoundSpec& spec);

struct SixNumber {
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};

/// Quartiles interpolate between order statistics (type 7).
SixNumber six_number(std::vector<double> values);

struct ResampleStats {
  std::vector<double> accuracy;
  std::vector<double> kappa;
  SixNumber accuracy_summary;
  SixNumber kappa_summary;
};

struct CvParams {
  int folds = 10;
  int repeats = 5;
};

/// Stratified fold ids for one repeat: each class is shuffled separately and
/// dealt round-robin across folds.
std::vector<int> stratified_folds(const Eigen::VectorXi& labels, int folds, std::uint64_t seed);

ResampleStats repeated_cv(const CommitTable& train, const CompoundSpec& spec, const CvParams& cv = {});

struct GridCell {
  Algorithm algorithm;
  dataset::Encoding model_kw;
  dataset::Encoding model_nokw;
  ResampleStats cv;
};

struct Champion {
  std::size_t cell = 0;  // index into GridReport::cells
  metrics::ConfusionMatrix confusion;
  metrics::Summary test;
};

struct GridReport {
  std::vector<GridCell> cells;
  std::vector<Champion> champions;  // one per algorithm, grid order

  /// Alg,Model_KW,Model_notKW,Accuracy,Kappa; one row per cell.
  std::string render_csv() const;
  /// Same columns for the champions on the held-out set.
  std::string render_test_csv() const;
  /// Alg,Metric,Min,Q1,Median,Mean,Q3,Max for each champion.
  std::string render_resamples_csv() const;
};

struct GridOptions {
  std::vector<Algorithm> algorithms{Algorithm::Tree, Algorithm::Gbm, Algorithm::Forest};
  Hyperparameters hyper;
  std::uint64_t seed = 42;
  CvParams cv;
};

/// Short encoding label used in grid output: Keywords, Changes, Combined.
std::string_view grid_label(dataset::Encoding e);

/// Champion per algorithm: highest mean CV accuracy, then kappa, then grid order.
GridReport grid_evaluate(const CommitTable& train, const CommitTable& test, const GridOptions& options = {});

}  // namespace maintminer::learners
