#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <vector>

namespace maintminer::learners::detail {

// Column-wise rank encoding of a feature matrix: every value is replaced by
// the index of its distinct value. Split search then runs on per-bin
// histograms, which is exact because bins are the distinct values.
struct BinnedMatrix {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<std::vector<double>> values;     // sorted distinct values per column
  std::vector<std::vector<std::int32_t>> bins;  // bin of each row per column

  explicit BinnedMatrix(const Eigen::MatrixXd& x) : rows(x.rows()), cols(x.cols()), values(x.cols()), bins(x.cols()) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      auto& v = values[c];
      v.assign(x.col(c).data(), x.col(c).data() + rows);
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      auto& b = bins[c];
      b.resize(static_cast<std::size_t>(rows));
      for (Eigen::Index r = 0; r < rows; ++r)
        b[r] = static_cast<std::int32_t>(std::lower_bound(v.begin(), v.end(), x(r, c)) - v.begin());
    }
  }

  std::size_t bin_count(Eigen::Index c) const { return values[c].size(); }
  double value(Eigen::Index c, std::int32_t bin) const { return values[c][bin]; }
};

}  // namespace maintminer::learners::detail
