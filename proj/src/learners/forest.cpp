#include <numeric>

#include "ensemble.hpp"

namespace maintminer::learners::detail {

std::vector<Eigen::Index> bootstrap_rows(Eigen::Index n, std::uint64_t seed, int t) {
  Rng rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(t)));
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  for (auto& r : rows) r = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
  return rows;
}

namespace {

class GiniBuilder {
 public:
  GiniBuilder(const BinnedMatrix& data, const Eigen::VectorXi& y, int mtry, int min_node, Rng& rng)
      : data_(data), y_(y), mtry_(mtry), min_node_(min_node), rng_(rng), features_(data.cols) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<Eigen::Index> rows) {
    grow(std::move(rows));
    return std::move(tree_);
  }

 private:
  const BinnedMatrix& data_;
  const Eigen::VectorXi& y_;
  int mtry_;
  int min_node_;
  Rng& rng_;
  std::vector<Eigen::Index> features_;
  std::vector<Eigen::Vector3d> hist_;
  DecisionTree tree_;

  int grow(std::vector<Eigen::Index> rows) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    Eigen::Vector3d dist = Eigen::Vector3d::Zero();
    for (auto r : rows) dist(y_(r)) += 1;
    tree_.nodes[id].value = dist;
    const double n = dist.sum();
    if (n <= min_node_ || dist.maxCoeff() == n) return id;

    const double parent = dist.squaredNorm() / n;
    double best_crit = parent;
    int best_feature = -1;
    std::int32_t best_left = 0, best_right = 0;

    // Sample mtry distinct features (partial Fisher-Yates).
    const int m = std::min<int>(mtry_, static_cast<int>(features_.size()));
    for (int j = 0; j < m; ++j) {
      const auto pick = j + static_cast<std::size_t>(uniform_index(rng_, features_.size() - j));
      std::swap(features_[j], features_[pick]);
      const auto f = features_[j];
      const std::size_t nb = data_.bin_count(f);
      if (nb < 2) continue;
      hist_.assign(nb, Eigen::Vector3d::Zero());
      const auto& bins = data_.bins[f];
      for (auto r : rows) hist_[bins[r]](y_(r)) += 1;
      Eigen::Vector3d left = Eigen::Vector3d::Zero();
      std::int32_t prev = -1;
      for (std::size_t b = 0; b < nb; ++b) {
        const double in_bin = hist_[b].sum();
        if (in_bin == 0) continue;
        if (prev >= 0) {
          const double nl = left.sum();
          const Eigen::Vector3d right = dist - left;
          const double crit = left.squaredNorm() / nl + right.squaredNorm() / (n - nl);
          if (crit > best_crit + 1e-12 * n) {
            best_crit = crit;
            best_feature = static_cast<int>(f);
            best_left = prev;
            best_right = static_cast<std::int32_t>(b);
          }
        }
        left += hist_[b];
        prev = static_cast<std::int32_t>(b);
      }
    }
    if (best_feature < 0) return id;

    std::vector<Eigen::Index> l, r;
    const auto& bins = data_.bins[best_feature];
    for (auto row : rows) (bins[row] <= best_left ? l : r).push_back(row);
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[id].feature = best_feature;
    tree_.nodes[id].threshold =
        0.5 * (data_.value(best_feature, best_left) + data_.value(best_feature, best_right));
    const int left_id = grow(std::move(l));
    const int right_id = grow(std::move(r));
    tree_.nodes[id].left = left_id;
    tree_.nodes[id].right = right_id;
    return id;
  }
};

}  // namespace

DecisionTree build_forest_tree(const BinnedMatrix& data, const Eigen::VectorXi& y,
                               const std::vector<Eigen::Index>& rows, int mtry, int min_node, Rng& rng) {
  return GiniBuilder(data, y, mtry, min_node, rng).build(rows);
}

}  // namespace maintminer::learners::detail
