#include <cmath>

#include "c45.hpp"
#include "ensemble.hpp"
#include "maintminer/log.hpp"
#include "maintminer/parallel.hpp"

namespace maintminer::learners {

using nlohmann::json;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Tree: return "tree";
    case Algorithm::Forest: return "forest";
    case Algorithm::Gbm: return "gbm";
    case Algorithm::Majority: return "majority";
  }
  return "?";
}

std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::Tree: return "J48";
    case Algorithm::Forest: return "RF";
    case Algorithm::Gbm: return "GBM";
    case Algorithm::Majority: return "Majority";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "tree" || s == "j48" || s == "c45" || s == "c4.5") return Algorithm::Tree;
  if (s == "forest" || s == "rf" || s == "randomforest") return Algorithm::Forest;
  if (s == "gbm" || s == "boosting") return Algorithm::Gbm;
  if (s == "majority" || s == "zeror") return Algorithm::Majority;
  throw SpecError("unknown algorithm: " + std::string(name));
}

json Hyperparameters::to_json() const {
  return {
      {"tree", {{"confidence", tree.confidence}, {"min_leaf", tree.min_leaf}, {"prune", tree.prune},
                {"collapse", tree.collapse}}},
      {"forest", {{"trees", forest.trees}, {"mtry", forest.mtry}, {"min_node", forest.min_node}}},
      {"gbm", {{"rounds", gbm.rounds}, {"shrinkage", gbm.shrinkage}, {"depth", gbm.depth},
               {"min_node", gbm.min_node}, {"subsample", gbm.subsample}}},
  };
}

Hyperparameters Hyperparameters::from_json(const json& j) {
  Hyperparameters h;
  try {
    if (auto t = j.find("tree"); t != j.end()) {
      h.tree.confidence = t->value("confidence", h.tree.confidence);
      h.tree.min_leaf = t->value("min_leaf", h.tree.min_leaf);
      h.tree.prune = t->value("prune", h.tree.prune);
      h.tree.collapse = t->value("collapse", h.tree.collapse);
    }
    if (auto f = j.find("forest"); f != j.end()) {
      h.forest.trees = f->value("trees", h.forest.trees);
      h.forest.mtry = f->value("mtry", h.forest.mtry);
      h.forest.min_node = f->value("min_node", h.forest.min_node);
    }
    if (auto g = j.find("gbm"); g != j.end()) {
      h.gbm.rounds = g->value("rounds", h.gbm.rounds);
      h.gbm.shrinkage = g->value("shrinkage", h.gbm.shrinkage);
      h.gbm.depth = g->value("depth", h.gbm.depth);
      h.gbm.min_node = g->value("min_node", h.gbm.min_node);
      h.gbm.subsample = g->value("subsample", h.gbm.subsample);
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("bad hyperparameters: ") + e.what());
  }
  if (!(h.tree.confidence > 0 && h.tree.confidence < 1)) throw SpecError("tree.confidence must be in (0, 1)");
  if (h.tree.min_leaf < 1) throw SpecError("tree.min_leaf must be positive");
  if (h.forest.trees < 1) throw SpecError("forest.trees must be positive");
  if (h.forest.mtry < 0) throw SpecError("forest.mtry must be non-negative");
  if (h.forest.min_node < 1) throw SpecError("forest.min_node must be positive");
  if (h.gbm.rounds < 1) throw SpecError("gbm.rounds must be positive");
  if (!(h.gbm.shrinkage > 0)) throw SpecError("gbm.shrinkage must be positive");
  if (h.gbm.depth < 1) throw SpecError("gbm.depth must be positive");
  if (h.gbm.min_node < 1) throw SpecError("gbm.min_node must be positive");
  if (!(h.gbm.subsample > 0 && h.gbm.subsample <= 1)) throw SpecError("gbm.subsample must be in (0, 1]");
  return h;
}

const TreeNode& DecisionTree::leaf_for(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int i = 0;
  while (!nodes[i].leaf()) i = x(nodes[i].feature) <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return nodes[i];
}

int DecisionTree::leaf_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.leaf() ? 1 : 0;
  return n;
}

namespace {

json node_json(const DecisionTree& t, int i, bool scalar) {
  const auto& n = t.nodes[i];
  if (n.leaf()) {
    if (scalar) return {{"value", n.value(0)}};
    return {{"distribution", {n.value(0), n.value(1), n.value(2)}}};
  }
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_json(t, n.left, scalar)},
          {"right", node_json(t, n.right, scalar)}};
}

int node_from_json(DecisionTree& t, const json& j) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    if (feature < 0) throw SpecError("negative feature index in tree");
    t.nodes[id].feature = feature;
    t.nodes[id].threshold = j.at("threshold").get<double>();
    const int l = node_from_json(t, j.at("left"));
    const int r = node_from_json(t, j.at("right"));
    t.nodes[id].left = l;
    t.nodes[id].right = r;
  } else if (j.contains("value")) {
    t.nodes[id].value(0) = j.at("value").get<double>();
  } else {
    const auto d = j.at("distribution").get<std::vector<double>>();
    if (d.size() != 3) throw SpecError("leaf distribution must have 3 entries");
    t.nodes[id].value = Eigen::Vector3d(d[0], d[1], d[2]);
  }
  return id;
}

bool scalar_leaves(const DecisionTree& t) {
  for (const auto& n : t.nodes)
    if (n.leaf() && (n.value(1) != 0 || n.value(2) != 0)) return false;
  return true;
}

Eigen::Vector3d normalized(const Eigen::Vector3d& v) {
  const double s = v.sum();
  return s > 0 ? Eigen::Vector3d(v / s) : Eigen::Vector3d::Constant(1.0 / 3);
}

}  // namespace

json DecisionTree::to_json() const {
  if (nodes.empty()) return json::object();
  return node_json(*this, 0, scalar_leaves(*this));
}

DecisionTree DecisionTree::from_json(const json& j) {
  DecisionTree t;
  node_from_json(t, j);
  return t;
}

Eigen::Vector3d Component::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dimension_)
    throw ArgError("feature vector has " + std::to_string(x.size()) + " entries, expected " +
                   std::to_string(dimension_));
  if (constant_ || algorithm_ == Algorithm::Majority) return base_;
  switch (algorithm_) {
    case Algorithm::Tree: return normalized(trees_.front().leaf_for(x).value);
    case Algorithm::Forest: {
      Eigen::Vector3d votes = Eigen::Vector3d::Zero();
      for (const auto& t : trees_) {
        Eigen::Index k;
        t.leaf_for(x).value.maxCoeff(&k);
        votes(k) += 1;
      }
      return votes / static_cast<double>(trees_.size());
    }
    case Algorithm::Gbm: {
      Eigen::Vector3d f = base_;
      for (std::size_t i = 0; i < trees_.size(); ++i) f(static_cast<Eigen::Index>(i % 3)) += trees_[i].leaf_for(x).value(0);
      const Eigen::Vector3d e = (f.array() - f.maxCoeff()).exp();
      return e / e.sum();
    }
    case Algorithm::Majority: break;
  }
  return base_;
}

Activity Component::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::Index k;
  predict_proba(x).maxCoeff(&k);
  return kAllActivities[static_cast<std::size_t>(k)];
}

std::vector<Activity> Component::predict_all(const Eigen::MatrixXd& x) const {
  std::vector<Activity> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(predict(x.row(i).transpose()));
  return out;
}

json Component::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"format", "maintminer-component"},
          {"version", 1},
          {"algorithm", std::string(to_string(algorithm_))},
          {"encoding", std::string(dataset::to_string(encoding_))},
          {"seed", seed_},
          {"dimension", dimension_},
          {"training_size", training_size_},
          {"hyperparameters", hyper_.to_json()},
          {"constant", constant_},
          {"base", {base_(0), base_(1), base_(2)}},
          {"trees", std::move(trees)}};
}

Component Component::from_json(const json& j) {
  Component c;
  try {
    if (j.value("format", "") != "maintminer-component") throw SpecError("not a maintminer component");
    if (j.value("version", 0) != 1) throw SpecError("unsupported component version");
    c.algorithm_ = parse_algorithm(j.at("algorithm").get<std::string>());
    c.encoding_ = dataset::parse_encoding(j.at("encoding").get<std::string>());
    c.seed_ = j.at("seed").get<std::uint64_t>();
    c.dimension_ = j.at("dimension").get<Eigen::Index>();
    c.training_size_ = j.at("training_size").get<std::size_t>();
    c.hyper_ = Hyperparameters::from_json(j.at("hyperparameters"));
    c.constant_ = j.at("constant").get<bool>();
    const auto base = j.at("base").get<std::vector<double>>();
    if (base.size() != 3) throw SpecError("base must have 3 entries");
    c.base_ = Eigen::Vector3d(base[0], base[1], base[2]);
    for (const auto& t : j.at("trees")) c.trees_.push_back(DecisionTree::from_json(t));
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed component: ") + e.what());
  } catch (const Error& e) {
    if (dynamic_cast<const SpecError*>(&e)) throw;
    throw SpecError(std::string("malformed component: ") + e.what());
  }
  if (!c.constant_ && c.algorithm_ != Algorithm::Majority && c.trees_.empty())
    throw SpecError("component has no trees");
  for (const auto& t : c.trees_)
    for (const auto& n : t.nodes)
      if (!n.leaf() && n.feature >= c.dimension_) throw SpecError("tree feature index out of range");
  return c;
}

Component train_component(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, const ComponentSpec& spec) {
  if (x.rows() != y.size()) throw ArgError("feature rows and labels differ in length");
  if (x.rows() == 0) throw ArgError("empty training set");
  const bool width_ok = spec.encoding == dataset::Encoding::Changes48
                            ? x.cols() == static_cast<Eigen::Index>(kChangeTypeCount)
                            : x.cols() > (spec.encoding == dataset::Encoding::Combined68
                                              ? static_cast<Eigen::Index>(kChangeTypeCount)
                                              : 0);
  if (!width_ok)
    throw SpecError("feature matrix has " + std::to_string(x.cols()) + " columns, encoding " +
                   std::string(dataset::to_string(spec.encoding)) + " needs " +
                   std::to_string(dataset::dimension(spec.encoding)));
  Component c;
  c.algorithm_ = spec.algorithm;
  c.encoding_ = spec.encoding;
  c.seed_ = spec.seed;
  c.dimension_ = x.cols();
  c.hyper_ = spec.hyper;
  c.training_size_ = static_cast<std::size_t>(x.rows());

  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) < 0 || y(i) > 2) throw ArgError("label index out of range");
    counts(y(i)) += 1;
  }
  const int classes = static_cast<int>((counts.array() > 0).count());
  if (classes == 1) {
    log::warn("training set has a single class; using a constant predictor");
    c.constant_ = true;
    c.base_ = counts / counts.sum();
    return c;
  }

  switch (spec.algorithm) {
    case Algorithm::Majority: {
      Eigen::Index k;
      counts.maxCoeff(&k);
      c.base_.setZero();
      c.base_(k) = 1;
      break;
    }
    case Algorithm::Tree: {
      const detail::BinnedMatrix data(x);
      c.trees_.push_back(detail::build_c45(data, y, spec.hyper.tree));
      break;
    }
    case Algorithm::Forest: {
      const detail::BinnedMatrix data(x);
      const int mtry = spec.hyper.forest.mtry > 0
                           ? std::min<int>(spec.hyper.forest.mtry, static_cast<int>(x.cols()))
                           : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
      c.trees_.resize(static_cast<std::size_t>(spec.hyper.forest.trees));
      parallel_for(c.trees_.size(), [&](std::size_t t) {
        const auto rows = detail::bootstrap_rows(x.rows(), spec.seed, static_cast<int>(t));
        Rng rng(derive_seed(spec.seed, 2 * t + 1));
        c.trees_[t] = detail::build_forest_tree(data, y, rows, mtry, spec.hyper.forest.min_node, rng);
      });
      break;
    }
    case Algorithm::Gbm: {
      const detail::BinnedMatrix data(x);
      c.base_.setZero();
      c.trees_ = detail::build_gbm(data, y, spec.hyper.gbm, spec.seed);
      break;
    }
  }
  return c;
}

}  // namespace maintminer::learners
