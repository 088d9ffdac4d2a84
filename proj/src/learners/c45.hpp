#pragma once

#include "binned.hpp"
#include "maintminer/learners.hpp"

namespace maintminer::learners::detail {

/// Upper confidence limit on the error count of a leaf holding n instances
/// with e errors, minus e (C4.5 pessimistic pruning).
double added_errors(double n, double e, double confidence, double z);

DecisionTree build_c45(const BinnedMatrix& data, const Eigen::VectorXi& y, const TreeParams& params);

}  // namespace maintminer::learners::detail
