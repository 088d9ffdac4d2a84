#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "glm_fixtures.hpp"
#include "maintminer/glm.hpp"

using namespace maintminer;
using namespace maintminer::glm;
using maintminer::testing::draw_nb;
using maintminer::testing::synthetic;

TEST_CASE("constant outcome with intercept only") {
  Design d;
  d.x = Eigen::MatrixXd::Ones(20, 1);
  d.y = Eigen::VectorXd::Constant(20, 7);
  d.names = {"Constant"};
  const auto fit = fit_nb(d);
  CHECK(fit.coefficients[0].estimate == doctest::Approx(std::log(7.0)).epsilon(1e-8));
  CHECK(fit.deviance == doctest::Approx(0).epsilon(1e-6));
}

static std::array<int, 3> coverage(std::uint64_t first_seed, int reps) {
  const std::vector<double> beta{1.0, 0.5, -0.3};
  std::array<int, 3> covered{};
  for (int rep = 0; rep < reps; ++rep) {
    const auto fit = fit_nb(synthetic(first_seed + static_cast<std::uint64_t>(rep), 200, beta, 2.0));
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& c = fit.coefficients[j];
      if (std::abs(c.estimate - beta[j]) <= 1.959964 * c.std_error) ++covered[j];
    }
  }
  return covered;
}

TEST_CASE("coefficient recovery: 95% intervals cover the truth") {
  for (int c : coverage(1, 50)) CHECK(c >= 45);
}

TEST_CASE("coefficient recovery: interval coverage is calibrated") {
  // Binomial sd at 400 draws is about 1.1pp.
  for (int c : coverage(5000, 400)) {
    CHECK(c >= 0.92 * 400);
    CHECK(c <= 0.98 * 400);
  }
}

TEST_CASE("fit invariants: AIC, loglik trace, nesting") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto d = synthetic(seed, 120, {0.8, 0.4, -0.2, 0.1}, 1.5);
    const auto fit = fit_nb(d);
    CHECK(std::isfinite(fit.aic));
    CHECK(std::isfinite(fit.deviance));
    CHECK(fit.n_observations > fit.coefficients.size());
    CHECK(fit.aic == doctest::Approx(-2 * fit.log_likelihood + 2 * (fit.coefficients.size() + 1.0)).epsilon(1e-12));
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
      CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-10);
    CHECK(fit.log_likelihood == doctest::Approx(nb_log_likelihood(d.y, fit.mu, fit.theta)));
    for (std::size_t j = 1; j < d.names.size(); ++j) {
      const auto reduced = fit_nb_fixed(d.without(j), fit.theta);
      CHECK(reduced.deviance >= fit.deviance - 1e-9);
    }
  }
}

TEST_CASE("deviance and likelihood against direct formulas") {
  Eigen::VectorXd y(4), mu(4);
  y << 0, 1, 3, 10;
  mu << 0.5, 2, 3, 6;
  const double theta = 2.5;
  auto log_pmf = [&](double k, double m) {
    if (m == 0) return k == 0 ? 0.0 : -INFINITY;
    return std::log(std::tgamma(k + theta) / (std::tgamma(theta) * std::tgamma(k + 1)) *
                    std::pow(theta / (theta + m), theta) * std::pow(m / (theta + m), k));
  };
  double ll = 0, dev = 0;
  for (int i = 0; i < 4; ++i) {
    ll += log_pmf(y(i), mu(i));
    dev += 2 * (log_pmf(y(i), y(i)) - log_pmf(y(i), mu(i)));  // saturated minus fitted
  }
  CHECK(nb_log_likelihood(y, mu, theta) == doctest::Approx(ll).epsilon(1e-12));
  CHECK(nb_deviance(y, mu, theta) == doctest::Approx(dev).epsilon(1e-10));
}

TEST_CASE("large theta approaches the poisson fit") {
  const auto d = synthetic(77, 300, {0.7, 0.3, -0.4}, std::numeric_limits<double>::infinity());
  const auto nb = fit_nb(d);
  const auto pois = fit_poisson(d);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(std::abs(nb.coefficients[j].estimate - pois.coefficients[j].estimate) < 0.05);
  CHECK(pois.aic == doctest::Approx(-2 * pois.log_likelihood + 2 * 3.0));
}

TEST_CASE("singular design names the collinear column") {
  auto d = synthetic(3, 50, {0.5, 0.2}, 2.0);
  d.x.conservativeResize(Eigen::NoChange, 3);
  d.x.col(2) = 2 * d.x.col(1);
  d.names.push_back("twice_x1");
  try {
    fit_nb(d);
    FAIL("expected SingularError");
  } catch (const SingularError& e) {
    CHECK(e.columns() == std::vector<std::string>{"twice_x1"});
    CHECK(std::string(e.what()).find("twice_x1") != std::string::npos);
  }
}

TEST_CASE("non-convergence carries the deviance trace") {
  const auto d = synthetic(4, 100, {0.5, 0.2}, 2.0);
  FitOptions o;
  o.max_outer = 1;
  try {
    fit_nb(d, o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.trace().size() == 1);
    CHECK(std::string(e.what()).find("trace") != std::string::npos);
  }
}

TEST_CASE("F test reproduces the reference drop rows") {
  // Full model deviance 72.311 on 61 - 7 residual df.
  auto t = f_test(95.903 - 72.311, 1, 72.311, 54);
  CHECK(t.f == doctest::Approx(17.617).epsilon(2e-4));
  CHECK(t.p_value == doctest::Approx(0.0001).epsilon(0.5));
  t = f_test(106.675 - 72.311, 1, 72.311, 54);
  CHECK(t.f == doctest::Approx(25.661).epsilon(2e-4));
  CHECK(t.p_value == doctest::Approx(5.077e-06).epsilon(0.01));
  t = f_test(72.762 - 72.311, 1, 72.311, 54);
  CHECK(t.f == doctest::Approx(0.336).epsilon(0.01));
  CHECK(t.p_value == doctest::Approx(0.564).epsilon(0.01));
  // Reference AIC moves by delta deviance minus 2 for a one-df drop.
  CHECK(1015.071 - 993.480 == doctest::Approx(95.903 - 72.311 - 2).epsilon(1e-3));
}

TEST_CASE("anova: delta AIC = delta deviance - 2, rows per predictor") {
  const auto d = synthetic(9, 150, {1.0, 0.5, -0.3, 0.0}, 2.0);
  const auto full = fit_nb(d);
  const auto rows = anova_type2(d, full);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].term == "<none>");
  CHECK(rows[0].deviance == full.deviance);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK_FALSE(rows[i].failure);
    CHECK(rows[i].aic - rows[0].aic == doctest::Approx(rows[i].deviance - rows[0].deviance - 2).epsilon(1e-8));
    CHECK(rows[i].deviance >= rows[0].deviance - 1e-9);
  }
}

TEST_CASE("anova: permuting predictor columns gives an identical table") {
  const auto d = synthetic(10, 150, {1.0, 0.5, -0.3, 0.2}, 2.0);
  Design p = d;
  const std::vector<Eigen::Index> perm{2, 0, 3, 1};
  for (std::size_t k = 0; k < perm.size(); ++k) {
    p.x.col(static_cast<Eigen::Index>(k)) = d.x.col(perm[k]);
    p.names[k] = d.names[static_cast<std::size_t>(perm[k])];
  }
  auto a = anova_type2(d, fit_nb(d));
  auto b = anova_type2(p, fit_nb(p));
  auto by_term = [](const AnovaRow& x, const AnovaRow& y) { return x.term < y.term; };
  std::sort(a.begin(), a.end(), by_term);
  std::sort(b.begin(), b.end(), by_term);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].term == b[i].term);
    CHECK(a[i].deviance == b[i].deviance);
    CHECK(a[i].aic == b[i].aic);
    CHECK(a[i].f_value == b[i].f_value);
    CHECK(a[i].p_value == b[i].p_value);
  }
}

TEST_CASE("anova: pure-noise predictor rarely matters") {
  int below = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = synthetic(500 + rep, 150, {1.0, 0.5}, 2.0, true);
    const auto full = fit_nb(d);
    const auto rows = anova_type2(d, full);
    const auto& noise = rows.back();
    REQUIRE(noise.term == "x2");
    if (noise.deviance - full.deviance < 3.841459) ++below;
  }
  CHECK(below >= 45);
}

TEST_CASE("project CSV, design and rendering") {
  std::vector<ProjectFeatures> rows;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    ProjectFeatures p;
    p.project = "prj" + std::to_string(i);
    p.corrective = 10 + static_cast<std::int64_t>(rng() % 300);
    p.perfective = 10 + static_cast<std::int64_t>(rng() % 300);
    p.adaptive = static_cast<std::int64_t>(rng() % 200);
    p.developers = 1 + static_cast<std::int64_t>(rng() % 50);
    p.loc = 1000 + static_cast<std::int64_t>(rng() % 100000);
    p.age = 100 + static_cast<std::int64_t>(rng() % 3000);
    const double mu = std::exp(-4 + 0.6 * std::log1p(static_cast<double>(p.loc)) +
                               0.3 * std::log1p(static_cast<double>(p.perfective)) -
                               0.3 * std::log1p(static_cast<double>(p.corrective)));
    p.test_methods = static_cast<std::int64_t>(draw_nb(rng, mu, 3));
    p.test_classes = p.test_methods / 4;
    rows.push_back(p);
  }
  const auto text = to_projects_csv(rows);
  const auto back = parse_projects_csv(text);
  REQUIRE(back.size() == rows.size());
  CHECK(back[5].loc == rows[5].loc);
  CHECK(back[5].project == rows[5].project);

  const auto d = project_design(rows, Outcome::TestMethods);
  CHECK(d.names[1] == "log(corrective)");
  CHECK(d.x(3, 5) == std::log1p(static_cast<double>(rows[3].loc)));

  const auto fit = fit_nb_glm(rows, Outcome::TestMethods);
  CHECK(fit.outcome == "test_methods");
  CHECK(fit.coefficients.size() == 7);
  const auto table = render_coefficients(fit);
  CHECK(table.find("log(developers)  ") != std::string::npos);
  CHECK(render_coefficients_csv(fit).rfind("term,estimate,std_error,z,p_value,stars\n", 0) == 0);
  const auto anova = anova_type2(rows, Outcome::TestMethods);
  CHECK(anova.size() == 7);
  CHECK(render_anova(anova).find("<none>") != std::string::npos);
  CHECK(render_anova_csv(anova).find("log(LOC),1,") != std::string::npos);

  CHECK_THROWS_AS(fit_nb_glm(std::vector<ProjectFeatures>(rows.begin(), rows.begin() + 9), Outcome::TestMethods), ArgError);
  CHECK_THROWS_AS(parse_projects_csv("project,corrective\nx,1\n"), ArgError);
  CHECK_THROWS_AS(parse_projects_csv("project,corrective,perfective,adaptive,developers,loc,age,test_methods,test_classes\n"
                                     "a,1,2,3,4,5,6,-7,1\n"),
                  ArgError);
}

TEST_CASE("coefficient row format and significance stars") {
  GlmFit fit;
  fit.coefficients = {{"log(corrective)", -1.696, 0.314, -5.4, 1e-7}, {"log(perfective)", 1.621, 0.397, 4.08, 4e-5},
                      {"log(adaptive)", -0.247, 0.366, -0.67, 0.5}, {"log(developers)", 0.318, 0.182, 1.75, 0.08}};
  fit.n_observations = 61;
  const auto text = render_coefficients(fit);
  CHECK(text.find("log(corrective)  -1.696 (0.314) ***\n") != std::string::npos);
  CHECK(text.find("log(adaptive)    -0.247 (0.366)\n") != std::string::npos);
  CHECK(text.find("log(developers)  0.318 (0.182) *\n") != std::string::npos);
  CHECK(stars(0.0099) == "***");
  CHECK(stars(0.01) == "**");
  CHECK(stars(0.05) == "*");
  CHECK(stars(0.1) == "");
}
