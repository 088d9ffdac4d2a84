#pragma once

#include "binned.hpp"
#include "maintminer/learners.hpp"
#include "maintminer/random.hpp"

namespace maintminer::learners::detail {

/// Row indices drawn with replacement for forest tree `t`.
std::vector<Eigen::Index> bootstrap_rows(Eigen::Index n, std::uint64_t seed, int t);

/// One unpruned Gini tree on the given (possibly repeated) rows.
DecisionTree build_forest_tree(const BinnedMatrix& data, const Eigen::VectorXi& y,
                               const std::vector<Eigen::Index>& rows, int mtry, int min_node, Rng& rng);

/// Boosting trees, round-major then class; leaves already scaled by shrinkage.
std::vector<DecisionTree> build_gbm(const BinnedMatrix& data, const Eigen::VectorXi& y, const GbmParams& params,
                                    std::uint64_t seed);

}  // namespace maintminer::learners::detail
