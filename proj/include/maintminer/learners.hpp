#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "maintminer/activity.hpp"
#include "maintminer/dataset.hpp"
#include "maintminer/error.hpp"

namespace maintminer::learners {

class SpecError : public Error {
 public:
  using Error::Error;
};

enum class Algorithm {
  Tree,    // C4.5 (J48)
  Forest,  // random forest
  Gbm,     // multinomial gradient boosting
  Majority,  // constant most-frequent-class baseline
};

std::string_view to_string(Algorithm a);
/// Grid label: J48, RF, GBM, Majority.
std::string_view display_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct TreeParams {
  double confidence = 0.25;
  int min_leaf = 2;
  bool prune = true;
  bool collapse = true;
};

struct ForestParams {
  int trees = 500;
  int mtry = 0;  // 0 means floor(sqrt(p))
  int min_node = 1;
};

struct GbmParams {
  int rounds = 150;
  double shrinkage = 0.1;
  int depth = 3;  // splits per tree
  int min_node = 10;
  double subsample = 1.0;
};

struct Hyperparameters {
  TreeParams tree;
  ForestParams forest;
  GbmParams gbm;

  nlohmann::json to_json() const;
  /// Fields absent from `j` keep their defaults.
  static Hyperparameters from_json(const nlohmann::json& j);
};

struct ComponentSpec {
  Algorithm algorithm = Algorithm::Forest;
  dataset::Encoding encoding = dataset::Encoding::Combined68;
  Hyperparameters hyper;
  std::uint64_t seed = 42;
};

/// Binary numeric split tree. Internal nodes route x(feature) <= threshold to
/// `left`. Leaves carry a class distribution (tree, forest) or a scalar in
/// value(0) (boosting).
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  Eigen::Vector3d value = Eigen::Vector3d::Zero();

  bool leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int leaf_count() const;
  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);
};

class Component {
 public:
  Algorithm algorithm() const { return algorithm_; }
  dataset::Encoding encoding() const { return encoding_; }
  std::uint64_t seed() const { return seed_; }
  Eigen::Index dimension() const { return dimension_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const Hyperparameters& hyperparameters() const { return hyper_; }
  std::size_t training_size() const { return training_size_; }

  /// Probabilities in Activity order; sums to one.
  Eigen::Vector3d predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Argmax of predict_proba, lowest index on ties.
  Activity predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::vector<Activity> predict_all(const Eigen::MatrixXd& x) const;

  nlohmann::json to_json() const;
  static Component from_json(const nlohmann::json& j);

 private:
  friend Component train_component(const Eigen::MatrixXd&, const Eigen::VectorXi&, const ComponentSpec&);

  Algorithm algorithm_ = Algorithm::Majority;
  dataset::Encoding encoding_ = dataset::Encoding::Combined68;
  std::uint64_t seed_ = 0;
  Eigen::Index dimension_ = 0;
  Hyperparameters hyper_;
  std::size_t training_size_ = 0;
  // Majority: class distribution; boosting: initial scores.
  Eigen::Vector3d base_ = Eigen::Vector3d::Zero();
  bool constant_ = false;
  std::vector<DecisionTree> trees_;
};

/// Trains on rows of `x` with labels `y` (Activity indices). A single-class
/// input yields a constant predictor. Deterministic given the spec seed.
Component train_component(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, const ComponentSpec& spec);

struct Importance {
  std::vector<std::string> features;
  Eigen::MatrixXd scores;         // features x classes, scaled to [0, 100]
  std::vector<std::size_t> order;  // features by descending max class score
};

/// Per-class permutation importance on each tree's out-of-bag rows, divided by
/// its standard error across trees, then min-max scaled over the whole table.
/// `x`, `y` must be the rows the forest was trained on.
Importance variable_importance(const Component& forest, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                               std::vector<std::string> feature_names, std::uint64_t seed = 1);

}  // namespace maintminer::learners
