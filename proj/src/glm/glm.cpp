#include "maintminer/glm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "maintminer/csv.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::glm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string_view to_string(Outcome o) { return o == Outcome::TestMethods ? "test_methods" : "test_classes"; }

Outcome parse_outcome(std::string_view name) {
  const auto s = to_lower(trim(name));
  if (s == "test_methods" || s == "methods") return Outcome::TestMethods;
  if (s == "test_classes" || s == "classes") return Outcome::TestClasses;
  throw ArgError("unknown outcome: " + std::string(name));
}

std::vector<ProjectFeatures> parse_projects_csv(std::string_view text) {
  std::vector<std::size_t> lines;
  const auto rows = csv::parse(text, &lines);
  if (rows.empty()) throw ArgError("projects CSV is empty");
  const std::vector<std::string> want{"project",    "corrective", "perfective",   "adaptive",    "developers",
                                      "loc",        "age",        "test_methods", "test_classes"};
  std::vector<int> col(want.size(), -1);
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    const auto h = to_lower(trim(rows[0][i]));
    for (std::size_t k = 0; k < want.size(); ++k)
      if (h == want[k]) col[k] = static_cast<int>(i);
  }
  for (std::size_t k = 0; k < want.size(); ++k)
    if (col[k] < 0) throw ArgError("projects CSV lacks column " + want[k]);
  std::vector<ProjectFeatures> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto field = [&](std::size_t k) -> std::string {
      const auto c = static_cast<std::size_t>(col[k]);
      return c < row.size() ? std::string(trim(row[c])) : std::string();
    };
    auto count = [&](std::size_t k) {
      const auto s = field(k);
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (s.empty() || used != s.size() || v < 0)
        throw ArgError("line " + std::to_string(lines[r]) + ": " + want[k] + " must be a non-negative integer, got '" +
                       s + "'");
      return static_cast<std::int64_t>(v);
    };
    ProjectFeatures p;
    p.project = field(0);
    p.corrective = count(1);
    p.perfective = count(2);
    p.adaptive = count(3);
    p.developers = count(4);
    p.loc = count(5);
    p.age = count(6);
    p.test_methods = count(7);
    p.test_classes = count(8);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ProjectFeatures> load_projects_csv(const std::string& path) { return parse_projects_csv(read_file(path)); }

std::string to_projects_csv(const std::vector<ProjectFeatures>& rows) {
  std::string out = "project,corrective,perfective,adaptive,developers,loc,age,test_methods,test_classes\n";
  for (const auto& p : rows) {
    out += csv::format_row({p.project, std::to_string(p.corrective), std::to_string(p.perfective),
                            std::to_string(p.adaptive), std::to_string(p.developers), std::to_string(p.loc),
                            std::to_string(p.age), std::to_string(p.test_methods), std::to_string(p.test_classes)});
    out += '\n';
  }
  return out;
}

Design Design::without(std::size_t column) const {
  if (column >= names.size()) throw ArgError("column out of range");
  Design d;
  d.y = y;
  d.x.resize(x.rows(), x.cols() - 1);
  Eigen::Index at = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (static_cast<std::size_t>(j) != column) {
      d.x.col(at++) = x.col(j);
      d.names.push_back(names[static_cast<std::size_t>(j)]);
    }
  return d;
}

Design project_design(const std::vector<ProjectFeatures>& rows, Outcome outcome) {
  Design d;
  d.names = {"Constant", "log(corrective)", "log(perfective)", "log(adaptive)", "log(developers)", "log(LOC)",
             "log(age)"};
  const auto n = static_cast<Eigen::Index>(rows.size());
  d.x.resize(n, 7);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = rows[static_cast<std::size_t>(i)];
    auto l = [](std::int64_t v) { return std::log1p(static_cast<double>(v)); };
    d.x.row(i) << 1.0, l(p.corrective), l(p.perfective), l(p.adaptive), l(p.developers), l(p.loc), l(p.age);
    d.y(i) = static_cast<double>(outcome == Outcome::TestMethods ? p.test_methods : p.test_classes);
  }
  return d;
}

std::string_view stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

std::size_t GlmFit::parameters() const { return coefficients.size() + (family == "negative_binomial" ? 1 : 0); }

double nb_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double theta) {
  double l = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double yi = y(i), m = mu(i);
    if (std::isinf(theta)) {
      l += (yi > 0 ? yi * std::log(m) : 0.0) - m - std::lgamma(yi + 1);
      continue;
    }
    l += std::lgamma(yi + theta) - std::lgamma(theta) - std::lgamma(yi + 1) + theta * std::log(theta / (theta + m)) +
         (yi > 0 ? yi * std::log(m / (theta + m)) : 0.0);
  }
  return l;
}

double nb_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double theta) {
  double d = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double yi = y(i), m = mu(i);
    const double a = yi > 0 ? yi * std::log(yi / m) : 0.0;
    if (std::isinf(theta))
      d += 2 * (a - (yi - m));
    else
      d += 2 * (a - (yi + theta) * std::log((yi + theta) / (m + theta)));
  }
  return std::max(d, 0.0);
}

namespace {

void check_design(const Design& d) {
  if (d.x.rows() != d.y.size()) throw ArgError("design rows and outcome differ in length");
  if (static_cast<std::size_t>(d.x.cols()) != d.names.size()) throw ArgError("design names do not match columns");
  if (d.x.rows() <= d.x.cols()) throw ArgError("need more observations than coefficients");
  for (Eigen::Index i = 0; i < d.y.size(); ++i)
    if (!(d.y(i) >= 0) || d.y(i) != std::floor(d.y(i))) throw ArgError("outcome must be non-negative integers");
  if (!d.x.allFinite()) throw ArgError("design matrix has non-finite entries");
  // Column j is aliased when it lies in the span of the columns before it.
  std::vector<std::string> aliased;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < d.x.cols(); ++j) {
    const double norm = d.x.col(j).norm();
    bool dependent = norm == 0;
    if (!dependent && !kept.empty()) {
      Eigen::MatrixXd basis(d.x.rows(), static_cast<Eigen::Index>(kept.size()));
      for (std::size_t k = 0; k < kept.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = d.x.col(kept[k]);
      const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(d.x.col(j));
      dependent = (d.x.col(j) - basis * coef).norm() <= 1e-7 * norm;
    }
    if (dependent)
      aliased.push_back(d.names[static_cast<std::size_t>(j)]);
    else
      kept.push_back(j);
  }
  if (!aliased.empty()) {
    std::string msg = "singular design; collinear columns:";
    for (const auto& a : aliased) msg += " " + a;
    throw SingularError(msg, aliased);
  }
}

// Columns reordered to intercept-first then by name, so a fit does not depend
// on the order predictors were supplied in.
std::vector<std::size_t> canonical_order(const Design& d) {
  std::vector<std::size_t> order(d.names.size());
  std::iota(order.begin(), order.end(), 0);
  auto is_const = [&](std::size_t j) { return (d.x.col(static_cast<Eigen::Index>(j)).array() == 1.0).all(); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool ca = is_const(a), cb = is_const(b);
    if (ca != cb) return ca;
    return d.names[a] < d.names[b];
  });
  return order;
}

struct IrlsResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd mu;
  Eigen::MatrixXd xtwx;
  int iterations = 0;
  bool converged = false;
};

Eigen::VectorXd mu_of(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta) {
  return (x * beta).array().min(700.0).exp().matrix();
}

IrlsResult irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double theta, Eigen::VectorXd mu,
                const FitOptions& o) {
  IrlsResult r;
  double dev = nb_deviance(y, mu, theta);
  Eigen::VectorXd eta = mu.array().log().matrix();
  bool have_beta = false;
  for (int it = 0; it < o.max_irls; ++it) {
    Eigen::VectorXd w(y.size()), z(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double m = mu(i);
      w(i) = std::isinf(theta) ? m : m / (1 + m / theta);
      z(i) = eta(i) + (y(i) - m) / m;
    }
    const Eigen::VectorXd sw = w.array().sqrt();
    Eigen::VectorXd beta = (sw.asDiagonal() * x).colPivHouseholderQr().solve(sw.cwiseProduct(z));
    Eigen::VectorXd new_mu = mu_of(x, beta);
    double new_dev = nb_deviance(y, new_mu, theta);
    // Step halving on divergence.
    for (int h = 0; have_beta && (!std::isfinite(new_dev) || new_dev > dev + 1e-12 * (std::abs(dev) + 1)) && h < 30; ++h) {
      beta = 0.5 * (beta + r.beta);
      new_mu = mu_of(x, beta);
      new_dev = nb_deviance(y, new_mu, theta);
    }
    if (!std::isfinite(new_dev)) break;
    const double change = std::abs(new_dev - dev) / (std::abs(new_dev) + 0.1);
    r.beta = beta;
    have_beta = true;
    mu = new_mu;
    eta = x * beta;
    dev = new_dev;
    r.iterations = it + 1;
    if (change < o.tolerance) {
      r.converged = true;
      break;
    }
  }
  if (!have_beta) {
    r.converged = false;
    return r;
  }
  r.mu = mu_of(x, r.beta);
  Eigen::VectorXd w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    w(i) = std::isinf(theta) ? r.mu(i) : r.mu(i) / (1 + r.mu(i) / theta);
  r.xtwx = x.transpose() * w.asDiagonal() * x;
  return r;
}

double theta_ml(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double current, const FitOptions& o) {
  auto f = [&](double log_theta) { return nb_log_likelihood(y, mu, std::exp(log_theta)); };
  double a = std::log(o.theta_min), b = std::log(o.theta_max);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double best = std::exp(0.5 * (a + b));
  if (current > 0 && std::isfinite(current) && nb_log_likelihood(y, mu, current) >= nb_log_likelihood(y, mu, best))
    return current;
  return best;
}

GlmFit finish(const Design& d, const std::vector<std::size_t>& order, const IrlsResult& r, double theta,
              std::string family) {
  GlmFit fit;
  fit.family = std::move(family);
  fit.theta = theta;
  fit.mu = r.mu;
  fit.n_observations = static_cast<std::size_t>(d.y.size());
  fit.deviance = nb_deviance(d.y, r.mu, theta);
  fit.null_deviance = nb_deviance(d.y, Eigen::VectorXd::Constant(d.y.size(), std::max(d.y.mean(), 1e-300)), theta);
  fit.log_likelihood = nb_log_likelihood(d.y, r.mu, theta);
  const Eigen::MatrixXd cov = r.xtwx.inverse();
  const boost::math::normal normal;
  fit.coefficients.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Coefficient c;
    c.name = d.names[order[k]];
    c.estimate = r.beta(static_cast<Eigen::Index>(k));
    c.std_error = std::sqrt(std::max(cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), 0.0));
    c.z = c.std_error > 0 ? c.estimate / c.std_error : 0.0;
    c.p_value = c.std_error > 0 ? 2 * boost::math::cdf(boost::math::complement(normal, std::abs(c.z))) : 1.0;
    fit.coefficients[order[k]] = c;
  }
  fit.aic = -2 * fit.log_likelihood + 2 * static_cast<double>(fit.parameters());
  return fit;
}

Eigen::MatrixXd reordered(const Design& d, const std::vector<std::size_t>& order) {
  Eigen::MatrixXd x(d.x.rows(), d.x.cols());
  for (std::size_t k = 0; k < order.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = d.x.col(static_cast<Eigen::Index>(order[k]));
  return x;
}

Eigen::VectorXd start_mu(const Eigen::VectorXd& y) { return (y.array() + 0.1).matrix(); }

}  // namespace

GlmFit fit_poisson(const Design& d, const FitOptions& o) {
  check_design(d);
  const auto order = canonical_order(d);
  const auto x = reordered(d, order);
  const auto r = irls(x, d.y, kInf, start_mu(d.y), o);
  if (!r.converged) throw ConvergenceError("poisson IRLS did not converge", {});
  auto fit = finish(d, order, r, kInf, "poisson");
  fit.iterations = r.iterations;
  fit.loglik_trace = {fit.log_likelihood};
  return fit;
}

GlmFit fit_nb_fixed(const Design& d, double theta, const FitOptions& o) {
  if (!(theta > 0)) throw ArgError("theta must be positive");
  check_design(d);
  const auto order = canonical_order(d);
  const auto x = reordered(d, order);
  const auto r = irls(x, d.y, theta, start_mu(d.y), o);
  if (!r.converged) throw ConvergenceError("negative binomial IRLS did not converge", {});
  auto fit = finish(d, order, r, theta, "negative_binomial_fixed_theta");
  fit.iterations = r.iterations;
  fit.loglik_trace = {fit.log_likelihood};
  return fit;
}

GlmFit fit_nb(const Design& d, const FitOptions& o) {
  check_design(d);
  const auto order = canonical_order(d);
  const auto x = reordered(d, order);
  auto r = irls(x, d.y, kInf, start_mu(d.y), o);
  if (!r.converged) throw ConvergenceError("initial poisson IRLS did not converge", {});
  double theta = theta_ml(d.y, r.mu, -1, o);
  std::vector<double> trace, loglik;
  double prev_dev = std::numeric_limits<double>::quiet_NaN();
  for (int outer = 1; outer <= o.max_outer; ++outer) {
    auto next = irls(x, d.y, theta, r.mu, o);
    if (!next.converged) {
      trace.push_back(std::numeric_limits<double>::quiet_NaN());
      throw ConvergenceError("IRLS did not converge at theta " + fmt("%g", theta), trace);
    }
    r = std::move(next);
    theta = theta_ml(d.y, r.mu, theta, o);
    const double dev = nb_deviance(d.y, r.mu, theta);
    trace.push_back(dev);
    loglik.push_back(nb_log_likelihood(d.y, r.mu, theta));
    if (outer > 1 && std::abs(dev - prev_dev) < o.tolerance * (std::abs(dev) + 0.1)) {
      // Coefficient covariance at the final theta.
      r = irls(x, d.y, theta, r.mu, o);
      auto fit = finish(d, order, r, theta, "negative_binomial");
      fit.iterations = outer;
      fit.loglik_trace = std::move(loglik);
      return fit;
    }
    prev_dev = dev;
  }
  std::string msg = "negative binomial fit did not converge in " + std::to_string(o.max_outer) +
                    " outer iterations; deviance trace:";
  for (double t : trace) msg += " " + fmt("%.10g", t);
  throw ConvergenceError(msg, trace);
}

GlmFit fit_nb_glm(const std::vector<ProjectFeatures>& rows, Outcome outcome, const FitOptions& o) {
  if (rows.size() < 10) throw ArgError("need at least 10 projects, got " + std::to_string(rows.size()));
  auto fit = fit_nb(project_design(rows, outcome), o);
  fit.outcome = std::string(to_string(outcome));
  return fit;
}

FTest f_test(double delta_deviance, int df, double full_deviance, int df_residual) {
  if (df < 1 || df_residual < 1) throw ArgError("degrees of freedom must be positive");
  FTest t;
  t.f = (delta_deviance / df) / (full_deviance / df_residual);
  if (!(t.f > 0)) {
    t.f = std::max(t.f, 0.0);
    t.p_value = 1;
    return t;
  }
  const boost::math::fisher_f dist(df, df_residual);
  t.p_value = boost::math::cdf(boost::math::complement(dist, t.f));
  return t;
}

std::vector<AnovaRow> anova_type2(const Design& d, const GlmFit& full, const FitOptions& o) {
  std::vector<AnovaRow> rows;
  AnovaRow none;
  none.term = "<none>";
  none.deviance = full.deviance;
  none.aic = full.aic;
  rows.push_back(none);
  const int df_resid = static_cast<int>(d.y.size()) - static_cast<int>(d.x.cols());
  const auto order = canonical_order(d);
  const bool has_intercept = !order.empty() && (d.x.col(static_cast<Eigen::Index>(order[0])).array() == 1.0).all();
  for (std::size_t j = 0; j < d.names.size(); ++j) {
    if (has_intercept && j == order[0]) continue;
    AnovaRow row;
    row.term = d.names[j];
    row.df = 1;
    try {
      const auto reduced = fit_nb_fixed(d.without(j), full.theta, o);
      row.deviance = reduced.deviance;
      // theta counted as in the full model
      row.aic = -2 * reduced.log_likelihood + 2 * static_cast<double>(reduced.coefficients.size() + 1);
      const auto t = f_test(reduced.deviance - full.deviance, 1, full.deviance, df_resid);
      row.f_value = t.f;
      row.p_value = t.p_value;
    } catch (const Error& e) {
      row.failure = e.what();
      row.deviance = std::numeric_limits<double>::quiet_NaN();
      row.aic = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AnovaRow> anova_type2(const std::vector<ProjectFeatures>& rows, Outcome outcome, const FitOptions& o) {
  const auto d = project_design(rows, outcome);
  return anova_type2(d, fit_nb_glm(rows, outcome, o), o);
}

std::string render_coefficients(const GlmFit& fit) {
  std::size_t width = 0;
  for (const auto& c : fit.coefficients) width = std::max(width, c.name.size());
  std::ostringstream out;
  if (!fit.outcome.empty()) out << "Outcome: " << fit.outcome << '\n';
  for (const auto& c : fit.coefficients) {
    out << c.name << std::string(width - c.name.size() + 2, ' ') << fmt("%.3f", c.estimate) << " ("
        << fmt("%.3f", c.std_error) << ")";
    const auto s = stars(c.p_value);
    if (!s.empty()) out << ' ' << s;
    out << '\n';
  }
  out << "Number of observations: " << fit.n_observations << '\n';
  out << "theta: " << fmt("%.4g", fit.theta) << "  deviance: " << fmt("%.3f", fit.deviance)
      << "  AIC: " << fmt("%.3f", fit.aic) << '\n';
  out << "Signif.: * p<0.1; ** p<0.05; *** p<0.01\n";
  return out.str();
}

std::string render_coefficients_csv(const GlmFit& fit) {
  std::string out = "term,estimate,std_error,z,p_value,stars\n";
  for (const auto& c : fit.coefficients)
    out += csv::format_row({c.name, fmt("%.6g", c.estimate), fmt("%.6g", c.std_error), fmt("%.6g", c.z),
                            fmt("%.6g", c.p_value), std::string(stars(c.p_value))}) +
           '\n';
  return out;
}

std::string render_anova(const std::vector<AnovaRow>& rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.term.size());
  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };
  out << std::string(width, ' ') << pad("Df", 4) << pad("Deviance", 11) << pad("AIC", 11) << pad("F value", 9)
      << pad("Pr(>F)", 11) << '\n';
  for (const auto& r : rows) {
    out << r.term << std::string(width - r.term.size(), ' ');
    if (r.failure) {
      out << "  refit failed: " << *r.failure << '\n';
      continue;
    }
    out << pad(r.df ? std::to_string(*r.df) : "", 4) << pad(fmt("%.3f", r.deviance), 11) << pad(fmt("%.3f", r.aic), 11)
        << pad(r.f_value ? fmt("%.3f", *r.f_value) : "", 9);
    if (r.p_value) {
      const double p = *r.p_value;
      out << pad(p < 1e-4 ? fmt("%.3e", p) : fmt("%.4f", p), 11);
      const auto s = stars(p);
      if (!s.empty()) out << ' ' << s;
    }
    out << '\n';
  }
  return out.str();
}

std::string render_anova_csv(const std::vector<AnovaRow>& rows) {
  std::string out = "term,df,deviance,aic,f_value,p_value,status\n";
  for (const auto& r : rows)
    out += csv::format_row({r.term, r.df ? std::to_string(*r.df) : "", r.failure ? "" : fmt("%.6f", r.deviance),
                            r.failure ? "" : fmt("%.6f", r.aic), r.f_value ? fmt("%.6g", *r.f_value) : "",
                            r.p_value ? fmt("%.6g", *r.p_value) : "", r.failure ? "failed: " + *r.failure : "ok"}) +
           '\n';
  return out;
}

}  // namespace maintminer::glm
