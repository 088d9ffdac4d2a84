#include "c45.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace maintminer::learners::detail {

namespace {

constexpr double kSmall = 1e-6;
constexpr int kClasses = 3;

using Counts = std::array<double, kClasses>;

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

double total(const Counts& c) { return c[0] + c[1] + c[2]; }

int max_class(const Counts& c) {
  int best = 0;
  for (int k = 1; k < kClasses; ++k)
    if (c[k] > c[best]) best = k;
  return best;
}

double incorrect(const Counts& c) { return total(c) - c[max_class(c)]; }

// Entropy terms in the count-weighted form used by C4.5 (bits times count).
double old_entropy(const Counts& c) {
  double s = 0;
  for (double v : c) s += xlogx(v);
  return (xlogx(total(c)) - s) / std::log(2.0);
}

double new_entropy(const Counts& left, const Counts& right) {
  double s = 0;
  for (const Counts* bag : {&left, &right}) {
    for (double v : *bag) s += xlogx(v);
    s -= xlogx(total(*bag));
  }
  return -s / std::log(2.0);
}

double split_entropy(double nl, double nr) {
  return (xlogx(nl + nr) - xlogx(nl) - xlogx(nr)) / std::log(2.0);
}

struct Candidate {
  bool valid = false;
  int feature = -1;
  std::int32_t left_bin = 0;  // rows with bin <= left_bin go left
  std::int32_t right_bin = 0;
  double info_gain = 0;
  double gain_ratio = 0;
};

class Builder {
 public:
  Builder(const BinnedMatrix& data, const Eigen::VectorXi& y, const TreeParams& params)
      : data_(data), y_(y), params_(params) {
    z_ = boost::math::quantile(boost::math::normal(), 1.0 - params.confidence);
  }

  DecisionTree build() {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(data_.rows));
    for (Eigen::Index i = 0; i < data_.rows; ++i) rows[i] = i;
    grow(rows);
    if (params_.collapse) collapse(0);
    if (params_.prune) prune(0);
    return compact();
  }

 private:
  struct Node {
    Counts dist{};
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
  };

  const BinnedMatrix& data_;
  const Eigen::VectorXi& y_;
  TreeParams params_;
  double z_ = 0;
  std::vector<Node> nodes_;
  std::vector<Counts> hist_;

  Counts distribution(const std::vector<Eigen::Index>& rows) const {
    Counts c{};
    for (auto r : rows) c[y_(r)] += 1;
    return c;
  }

  Candidate evaluate(int f, const std::vector<Eigen::Index>& rows, const Counts& dist) {
    Candidate best;
    const double n = total(dist);
    double min_split = 0.1 * n / kClasses;
    if (min_split <= params_.min_leaf) min_split = params_.min_leaf;
    else if (min_split > 25) min_split = 25;
    if (n < 2 * min_split - kSmall) return best;

    const std::size_t nb = data_.bin_count(f);
    hist_.assign(nb, Counts{});
    const auto& bins = data_.bins[f];
    for (auto r : rows) hist_[bins[r]][y_(r)] += 1;

    const double default_entropy = old_entropy(dist);
    Counts left{}, right = dist;
    int candidates = 0;
    double best_gain = 0;
    std::int32_t prev = -1;
    for (std::size_t b = 0; b < nb; ++b) {
      const double in_bin = total(hist_[b]);
      if (in_bin == 0) continue;
      if (prev >= 0) {
        // Boundary between bin `prev` and bin `b`.
        if (total(left) >= min_split && total(right) >= min_split) {
          double gain = default_entropy - new_entropy(left, right);
          gain = std::abs(gain) < kSmall ? 0.0 : gain / n;
          if (gain - best_gain > kSmall) {
            best_gain = gain;
            best.left_bin = prev;
            best.right_bin = static_cast<std::int32_t>(b);
            best.valid = true;
          }
          ++candidates;
        }
      }
      for (int k = 0; k < kClasses; ++k) {
        left[k] += hist_[b][k];
        right[k] -= hist_[b][k];
      }
      prev = static_cast<std::int32_t>(b);
    }
    if (candidates == 0 || !best.valid) return Candidate{};
    best.info_gain = best_gain - std::log2(static_cast<double>(candidates)) / n;
    if (best.info_gain - 0.0 < kSmall) return Candidate{};

    double nl = 0;
    for (std::int32_t b = 0; b <= best.left_bin; ++b) nl += total(hist_[b]);
    const double se = split_entropy(nl, n - nl) / n;
    best.gain_ratio = std::abs(se) < kSmall ? 0.0 : best.info_gain / se;
    best.feature = f;
    return best;
  }

  // Threshold at the largest training value not above the midpoint, so the
  // split point is always a value that occurs in the data.
  double split_point(const Candidate& c) const {
    const auto& v = data_.values[c.feature];
    const double mid = 0.5 * (v[c.left_bin] + v[c.right_bin]);
    auto it = std::upper_bound(v.begin(), v.end(), mid);
    return *(it - 1);
  }

  int grow(const std::vector<Eigen::Index>& rows) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    const Counts dist = distribution(rows);
    nodes_[id].dist = dist;
    const double n = total(dist);
    if (n < 2 * params_.min_leaf || std::abs(n - dist[max_class(dist)]) < kSmall) return id;

    std::vector<Candidate> candidates;
    double average_gain = 0;
    int valid = 0;
    for (Eigen::Index f = 0; f < data_.cols; ++f) {
      Candidate c = evaluate(static_cast<int>(f), rows, dist);
      if (c.valid) {
        average_gain += c.info_gain;
        ++valid;
        candidates.push_back(c);
      }
    }
    if (valid == 0) return id;
    average_gain /= valid;
    const Candidate* best = nullptr;
    double best_ratio = 0;
    for (const auto& c : candidates) {
      if (c.info_gain >= average_gain - 1e-3 && c.gain_ratio - best_ratio > kSmall) {
        best = &c;
        best_ratio = c.gain_ratio;
      }
    }
    if (!best || std::abs(best_ratio) < kSmall) return id;

    const int feature = best->feature;
    const double threshold = split_point(*best);
    const std::int32_t left_bin = best->left_bin;
    std::vector<Eigen::Index> l, r;
    for (auto row : rows) (data_.bins[feature][row] <= left_bin ? l : r).push_back(row);
    nodes_[id].feature = feature;
    nodes_[id].threshold = threshold;
    const int left = grow(l);
    const int right = grow(r);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  bool is_leaf(int id) const { return nodes_[id].feature < 0; }

  void make_leaf(int id) {
    nodes_[id].feature = -1;
    nodes_[id].left = nodes_[id].right = -1;
  }

  double training_errors(int id) const {
    if (is_leaf(id)) return incorrect(nodes_[id].dist);
    return training_errors(nodes_[id].left) + training_errors(nodes_[id].right);
  }

  void collapse(int id) {
    if (is_leaf(id)) return;
    if (training_errors(id) >= incorrect(nodes_[id].dist) - 1e-3) {
      make_leaf(id);
      return;
    }
    collapse(nodes_[id].left);
    collapse(nodes_[id].right);
  }

  double estimated_errors(const Counts& dist) const {
    const double n = total(dist);
    if (n == 0) return 0;
    const double e = incorrect(dist);
    return e + added_errors(n, e, params_.confidence, z_);
  }

  double estimated_subtree_errors(int id) const {
    if (is_leaf(id)) return estimated_errors(nodes_[id].dist);
    return estimated_subtree_errors(nodes_[id].left) + estimated_subtree_errors(nodes_[id].right);
  }

  void prune(int id) {
    if (is_leaf(id)) return;
    prune(nodes_[id].left);
    prune(nodes_[id].right);
    if (estimated_errors(nodes_[id].dist) <= estimated_subtree_errors(id) + 0.1) make_leaf(id);
  }

  DecisionTree compact() const {
    DecisionTree tree;
    copy(0, tree);
    return tree;
  }

  int copy(int id, DecisionTree& out) const {
    const int at = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    const Node& n = nodes_[id];
    out.nodes[at].value = Eigen::Vector3d(n.dist[0], n.dist[1], n.dist[2]);
    if (!is_leaf(id)) {
      out.nodes[at].feature = n.feature;
      out.nodes[at].threshold = n.threshold;
      const int l = copy(n.left, out);
      const int r = copy(n.right, out);
      out.nodes[at].left = l;
      out.nodes[at].right = r;
    }
    return at;
  }
};

}  // namespace

double added_errors(double n, double e, double confidence, double z) {
  if (e < 1) {
    const double base = n * (1 - std::pow(confidence, 1 / n));
    if (e == 0) return base;
    return base + e * (added_errors(n, 1, confidence, z) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double f = (e + 0.5) / n;
  const double r =
      (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
  return r * n - e;
}

DecisionTree build_c45(const BinnedMatrix& data, const Eigen::VectorXi& y, const TreeParams& params) {
  return Builder(data, y, params).build();
}

}  // namespace maintminer::learners::detail
