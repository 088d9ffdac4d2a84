#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maintminer/activity.hpp"

namespace maintminer::metrics {

/// Rows are the classified-as activity, columns the true activity, both in
/// Activity order (adaptive, corrective, perfective).
using ConfusionMatrix = Eigen::Matrix<std::int64_t, kActivityCount, kActivityCount>;

struct Summary {
  std::array<std::optional<double>, kActivityCount> precision;
  std::array<std::optional<double>, kActivityCount> recall;
  std::array<std::optional<double>, kActivityCount> f1;
  double accuracy = 0;
  double kappa = 0;
  double nir = 0;
  double f1_micro = 0;
  std::optional<double> f1_macro;
  double p_value = 1;
  std::int64_t total = 0;
};

struct Interval {
  double lower = 0;
  double upper = 0;
  double margin = 0;
};

ConfusionMatrix confusion(const std::vector<Activity>& predicted, const std::vector<Activity>& truth);

/// Builds a matrix from row-major cells (classified-as rows).
ConfusionMatrix from_cells(const std::array<std::int64_t, 9>& cells);

Summary summarize(const ConfusionMatrix& m);

/// Cohen's kappa from the marginals; 1 when the expected agreement is 1.
double kappa(const ConfusionMatrix& m);

/// P(X >= successes) for X ~ Binomial(n, p).
double binomial_upper_tail(std::int64_t successes, std::int64_t n, double p);

double binomial_nir_test(std::int64_t successes, std::int64_t n, double nir);

/// Wald interval p_hat +- z * sqrt(p_hat (1 - p_hat) / n), clipped to [0, 1].
Interval proportion_ci(double p_hat, std::int64_t n, double level = 0.95);

/// Formats a p-value the way the evaluation tables print it ("<2e-16" floor).
std::string format_p_value(double p);

/// Aligned text table with the confusion matrix and its summary rows.
std::string render_table(const ConfusionMatrix& m, const Summary& s);

/// Same content as render_table as CSV.
std::string render_csv(const ConfusionMatrix& m, const Summary& s);

}  // namespace maintminer::metrics
