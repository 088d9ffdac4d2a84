#include <cmath>
#include <numeric>

#include "ensemble.hpp"

namespace maintminer::learners::detail {

namespace {

struct LeafCandidate {
  int node = -1;
  std::vector<Eigen::Index> rows;
  double improvement = 0;
  int feature = -1;
  std::int32_t left_bin = 0;
  std::int32_t right_bin = 0;
};

class RegressionTreeBuilder {
 public:
  RegressionTreeBuilder(const BinnedMatrix& data, const Eigen::VectorXd& residual, const GbmParams& params)
      : data_(data), r_(residual), params_(params) {}

  DecisionTree build(std::vector<Eigen::Index> rows) {
    tree_.nodes.emplace_back();
    std::vector<LeafCandidate> open;
    open.push_back(candidate(0, std::move(rows)));
    for (int split = 0; split < params_.depth; ++split) {
      int best = -1;
      for (int i = 0; i < static_cast<int>(open.size()); ++i)
        if (open[i].feature >= 0 && (best < 0 || open[i].improvement > open[best].improvement)) best = i;
      if (best < 0) break;
      LeafCandidate c = std::move(open[best]);
      open.erase(open.begin() + best);
      std::vector<Eigen::Index> l, r;
      for (auto row : c.rows) (data_.bins[c.feature][row] <= c.left_bin ? l : r).push_back(row);
      const int left = static_cast<int>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      const int right = static_cast<int>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      auto& node = tree_.nodes[c.node];
      node.feature = c.feature;
      node.threshold = 0.5 * (data_.value(c.feature, c.left_bin) + data_.value(c.feature, c.right_bin));
      node.left = left;
      node.right = right;
      open.push_back(candidate(left, std::move(l)));
      open.push_back(candidate(right, std::move(r)));
    }
    for (const auto& c : open) tree_.nodes[c.node].value(0) = leaf_value(c.rows);
    return std::move(tree_);
  }

 private:
  const BinnedMatrix& data_;
  const Eigen::VectorXd& r_;
  GbmParams params_;
  DecisionTree tree_;
  std::vector<double> sums_;
  std::vector<double> counts_;

  double leaf_value(const std::vector<Eigen::Index>& rows) const {
    double num = 0, den = 0;
    for (auto i : rows) {
      num += r_(i);
      den += std::abs(r_(i)) * (1 - std::abs(r_(i)));
    }
    if (den < 1e-150) return 0.0;
    return params_.shrinkage * (2.0 / 3.0) * num / den;
  }

  LeafCandidate candidate(int node, std::vector<Eigen::Index> rows) {
    LeafCandidate c;
    c.node = node;
    c.rows = std::move(rows);
    const double n = static_cast<double>(c.rows.size());
    if (n < 2.0 * params_.min_node) return c;
    double total = 0;
    for (auto i : c.rows) total += r_(i);
    for (Eigen::Index f = 0; f < data_.cols; ++f) {
      const std::size_t nb = data_.bin_count(f);
      if (nb < 2) continue;
      sums_.assign(nb, 0.0);
      counts_.assign(nb, 0.0);
      const auto& bins = data_.bins[f];
      for (auto i : c.rows) {
        sums_[bins[i]] += r_(i);
        counts_[bins[i]] += 1;
      }
      double sl = 0, nl = 0;
      std::int32_t prev = -1;
      for (std::size_t b = 0; b < nb; ++b) {
        if (counts_[b] == 0) continue;
        if (prev >= 0 && nl >= params_.min_node && n - nl >= params_.min_node) {
          const double nr = n - nl;
          const double diff = sl / nl - (total - sl) / nr;
          const double improvement = nl * nr / n * diff * diff;
          if (improvement > c.improvement + 1e-12) {
            c.improvement = improvement;
            c.feature = static_cast<int>(f);
            c.left_bin = prev;
            c.right_bin = static_cast<std::int32_t>(b);
          }
        }
        sl += sums_[b];
        nl += counts_[b];
        prev = static_cast<std::int32_t>(b);
      }
    }
    return c;
  }
};

}  // namespace

std::vector<DecisionTree> build_gbm(const BinnedMatrix& data, const Eigen::VectorXi& y, const GbmParams& params,
                                    std::uint64_t seed) {
  const Eigen::Index n = data.rows;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, 3);
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, y(i)) = 1;
  Rng rng(seed);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);

  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(params.rounds) * 3);
  for (int round = 0; round < params.rounds; ++round) {
    Eigen::MatrixXd p = (f.colwise() - f.rowwise().maxCoeff()).array().exp().matrix();
    p.array().colwise() /= p.rowwise().sum().array();
    std::vector<Eigen::Index> rows = all;
    if (params.subsample < 1.0) {
      shuffle(rows, rng);
      rows.resize(std::max<std::size_t>(1, static_cast<std::size_t>(params.subsample * static_cast<double>(n))));
      std::sort(rows.begin(), rows.end());
    }
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd residual = onehot.col(k) - p.col(k);
      DecisionTree tree = RegressionTreeBuilder(data, residual, params).build(rows);
      for (Eigen::Index i = 0; i < n; ++i) {
        // Rows share the binned layout, so route through the tree by bins.
        int node = 0;
        while (!tree.nodes[node].leaf()) {
          const auto& nd = tree.nodes[node];
          node = data.value(nd.feature, data.bins[nd.feature][i]) <= nd.threshold ? nd.left : nd.right;
        }
        f(i, k) += tree.nodes[node].value(0);
      }
      trees.push_back(std::move(tree));
    }
  }
  return trees;
}

}  // namespace maintminer::learners::detail
