#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "maintminer/analytics.hpp"
#include "maintminer/compound.hpp"
#include "maintminer/distiller.hpp"
#include "maintminer/error.hpp"

namespace maintminer::cli {

/// Every problem found while validating a config, one per entry.
class ConfigError : public Error {
 public:
  ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage " + stage + " failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Another pipeline holds the output directory.
class LockError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::array<std::string_view, 6> kStages{"harvest", "distill", "featurize", "train", "profile", "export"};

struct ModelConfig {
  learners::Algorithm algorithm = learners::Algorithm::Forest;
  dataset::Encoding model_kw = dataset::Encoding::Keywords20;
  dataset::Encoding model_nokw = dataset::Encoding::Combined68;
  learners::Hyperparameters hyper;
};

struct PipelineConfig {
  std::vector<std::string> repos;
  std::vector<std::string> branches{"master", "trunk"};
  std::optional<std::string> vocabulary;  // one stem per line
  std::optional<std::string> english_stopwords;
  std::optional<std::string> custom_stopwords;
  std::string labeled_dataset;  // training data, long or wide form
  ModelConfig model;
  bool grid = true;
  std::vector<learners::Algorithm> grid_algorithms{learners::Algorithm::Tree, learners::Algorithm::Gbm,
                                                   learners::Algorithm::Forest};
  learners::CvParams cv;
  double train_fraction = 0.85;
  std::uint64_t seed = 42;
  int window_days = 28;
  std::map<std::string, std::string> identity_merge;  // alias email -> canonical email
  std::string output_dir;

  /// Relative paths are resolved against `base_dir`. Unknown keys are errors.
  static PipelineConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;

  /// Throws ConfigError unless every referenced file exists and every
  /// setting is in range.
  void validate() const;

  text::Vocabulary load_vocabulary() const;
  text::Stopwords load_stopwords() const;
};

enum class StageStatus { Ran, Skipped };

struct StageReport {
  std::string stage;
  StageStatus status = StageStatus::Ran;
  double seconds = 0;
};

struct PipelineOptions {
  bool force = false;
};

/// harvest, distill, featurize, train, profile and export under
/// config.output_dir/<stage>/. A stage whose checkpoint matches its inputs and
/// whose outputs are unchanged is skipped unless `force`. Holds an exclusive
/// lock on the output directory for the whole run.
std::vector<StageReport> run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

/// Exclusive advisory lock on `<dir>/.maintminer.lock`; released on destruction.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::string& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

/// Joins commit identity with its predicted activity.
analytics::ClassifiedCommit classified(const distiller::CommitChanges& commit, Activity activity);

/// Prediction for every commit, in input order.
std::vector<analytics::ClassifiedCommit> classify_commits(const learners::CompoundModel& model,
                                                          const std::vector<distiller::CommitChanges>& commits,
                                                          const text::Stopwords& stopwords);

/// "maintminer <version> (change types <manifest hash>)"
std::string version_string();

}  // namespace maintminer::cli
