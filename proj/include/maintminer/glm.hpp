#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maintminer/error.hpp"

namespace maintminer::glm {

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  /// Deviance after each outer iteration.
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

class SingularError : public Error {
 public:
  SingularError(const std::string& what, std::vector<std::string> columns)
      : Error(what), columns_(std::move(columns)) {}
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

struct ProjectFeatures {
  std::string project;
  std::int64_t corrective = 0;
  std::int64_t perfective = 0;
  std::int64_t adaptive = 0;
  std::int64_t developers = 0;
  std::int64_t loc = 0;
  std::int64_t age = 0;  // days
  std::int64_t test_methods = 0;
  std::int64_t test_classes = 0;
};

enum class Outcome { TestMethods, TestClasses };
std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view name);

/// Header: project,corrective,perfective,adaptive,developers,loc,age,test_methods,test_classes.
std::vector<ProjectFeatures> parse_projects_csv(std::string_view text);
std::vector<ProjectFeatures> load_projects_csv(const std::string& path);
std::string to_projects_csv(const std::vector<ProjectFeatures>& rows);

/// Regression inputs: column 0 is the intercept ("Constant").
struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> names;

  Design without(std::size_t column) const;
};

/// ln(x + 1) of the six predictors, in the fixed order corrective, perfective,
/// adaptive, developers, LOC, age.
Design project_design(const std::vector<ProjectFeatures>& rows, Outcome outcome);

struct Coefficient {
  std::string name;
  double estimate = 0;
  double std_error = 0;
  double z = 0;
  double p_value = 1;
};

/// "***" below 0.01, "**" below 0.05, "*" below 0.1.
std::string_view stars(double p_value);

struct GlmFit {
  std::string outcome;
  std::string family;  // "negative_binomial" or "poisson"
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd mu;
  double theta = 0;  // infinity for poisson
  double deviance = 0;
  double null_deviance = 0;
  double log_likelihood = 0;
  double aic = 0;
  std::size_t n_observations = 0;
  int iterations = 0;
  std::vector<double> loglik_trace;  // after each outer iteration

  std::size_t parameters() const;  // coefficients plus theta when estimated
};

struct FitOptions {
  int max_outer = 50;
  int max_irls = 100;
  double tolerance = 1e-8;
  double theta_min = 1e-3;
  double theta_max = 1e7;
};

GlmFit fit_poisson(const Design& d, const FitOptions& options = {});
/// Negative binomial with dispersion held at `theta`.
GlmFit fit_nb_fixed(const Design& d, double theta, const FitOptions& options = {});
/// Alternates IRLS for the coefficients with profile-likelihood maximisation
/// for theta (golden section over ln theta).
GlmFit fit_nb(const Design& d, const FitOptions& options = {});

/// Needs at least 10 rows.
GlmFit fit_nb_glm(const std::vector<ProjectFeatures>& rows, Outcome outcome, const FitOptions& options = {});

double nb_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double theta);
double nb_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double theta);

struct AnovaRow {
  std::string term;  // "<none>" for the full model
  std::optional<int> df;
  double deviance = 0;
  double aic = 0;
  std::optional<double> f_value;
  std::optional<double> p_value;
  std::optional<std::string> failure;
};

struct FTest {
  double f = 0;
  double p_value = 1;
};

/// F = (delta_deviance / df) / (full_deviance / df_residual), upper tail of F(df, df_residual).
FTest f_test(double delta_deviance, int df, double full_deviance, int df_residual);

/// Drops one predictor at a time and refits with theta held at the full fit's
/// value. F = (delta deviance / df) / (full deviance / (n - p - 1)).
std::vector<AnovaRow> anova_type2(const Design& d, const GlmFit& full, const FitOptions& options = {});
std::vector<AnovaRow> anova_type2(const std::vector<ProjectFeatures>& rows, Outcome outcome,
                                  const FitOptions& options = {});

/// One line per coefficient: "log(corrective)  -1.696 (0.314) ***".
std::string render_coefficients(const GlmFit& fit);
std::string render_coefficients_csv(const GlmFit& fit);
std::string render_anova(const std::vector<AnovaRow>& rows);
std::string render_anova_csv(const std::vector<AnovaRow>& rows);

}  // namespace maintminer::glm
