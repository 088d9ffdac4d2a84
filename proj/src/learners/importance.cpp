#include <numeric>

#include "ensemble.hpp"
#include "maintminer/parallel.hpp"

namespace maintminer::learners {

namespace {

int tree_class(const DecisionTree& t, const Eigen::MatrixXd& x, Eigen::Index row, int swapped, Eigen::Index donor) {
  int i = 0;
  while (!t.nodes[i].leaf()) {
    const auto& n = t.nodes[i];
    const double v = n.feature == swapped ? x(donor, n.feature) : x(row, n.feature);
    i = v <= n.threshold ? n.left : n.right;
  }
  Eigen::Index k;
  t.nodes[i].value.maxCoeff(&k);
  return static_cast<int>(k);
}

}  // namespace

Importance variable_importance(const Component& forest, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                               std::vector<std::string> feature_names, std::uint64_t seed) {
  if (forest.algorithm() != Algorithm::Forest)
    throw SpecError("variable importance needs a forest component, got " + std::string(to_string(forest.algorithm())));
  if (x.rows() != y.size()) throw ArgError("feature rows and labels differ in length");
  if (static_cast<std::size_t>(x.rows()) != forest.training_size())
    throw ArgError("importance needs the forest's training rows");
  if (x.cols() != forest.dimension()) throw ArgError("feature matrix width does not match the forest");
  if (feature_names.size() != static_cast<std::size_t>(x.cols()))
    throw ArgError("feature name count does not match the matrix width");

  const Eigen::Index p = x.cols();
  const auto& trees = forest.trees();
  const std::size_t nt = trees.size();
  // delta[t] is p x 3: per-class drop in OOB accuracy after permuting a feature.
  std::vector<Eigen::MatrixXd> delta(nt, Eigen::MatrixXd::Zero(p, 3));
  if (!trees.empty()) {
    parallel_for(nt, [&](std::size_t t) {
      const auto boot = detail::bootstrap_rows(x.rows(), forest.seed(), static_cast<int>(t));
      std::vector<char> in_bag(static_cast<std::size_t>(x.rows()), 0);
      for (auto r : boot) in_bag[r] = 1;
      std::vector<Eigen::Index> oob;
      for (Eigen::Index r = 0; r < x.rows(); ++r)
        if (!in_bag[r]) oob.push_back(r);
      if (oob.empty()) return;
      Eigen::Vector3d per_class = Eigen::Vector3d::Zero();
      Eigen::Vector3d correct = Eigen::Vector3d::Zero();
      for (auto r : oob) {
        per_class(y(r)) += 1;
        if (tree_class(trees[t], x, r, -1, r) == y(r)) correct(y(r)) += 1;
      }
      Rng rng(derive_seed(seed, t));
      std::vector<Eigen::Index> donors = oob;
      for (Eigen::Index j = 0; j < p; ++j) {
        shuffle(donors, rng);
        Eigen::Vector3d permuted = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < oob.size(); ++i)
          if (tree_class(trees[t], x, oob[i], static_cast<int>(j), donors[i]) == y(oob[i])) permuted(y(oob[i])) += 1;
        for (int k = 0; k < 3; ++k)
          if (per_class(k) > 0) delta[t](j, k) = (correct(k) - permuted(k)) / per_class(k);
      }
    });
  }

  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(p, 3);
  if (nt > 0) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(p, 3);
    for (const auto& d : delta) mean += d;
    mean /= static_cast<double>(nt);
    Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(p, 3);
    for (const auto& d : delta) ss += (d - mean).array().square().matrix();
    for (Eigen::Index j = 0; j < p; ++j)
      for (int k = 0; k < 3; ++k) {
        const double se = nt > 1 ? std::sqrt(ss(j, k) / static_cast<double>(nt - 1) / static_cast<double>(nt)) : 0.0;
        raw(j, k) = se > 0 ? mean(j, k) / se : mean(j, k);
      }
  }

  Importance out;
  out.features = std::move(feature_names);
  const double lo = raw.minCoeff(), hi = raw.maxCoeff();
  out.scores = hi - lo > 0 ? Eigen::MatrixXd((raw.array() - lo) / (hi - lo) * 100.0)
                           : Eigen::MatrixXd::Constant(p, 3, 100.0);
  out.order.resize(static_cast<std::size_t>(p));
  std::iota(out.order.begin(), out.order.end(), 0);
  const Eigen::VectorXd best = out.scores.rowwise().maxCoeff();
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) { return best(a) > best(b); });
  return out;
}

}  // namespace maintminer::learners
