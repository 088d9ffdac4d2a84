#include "maintminer/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "maintminer/csv.hpp"
#include "maintminer/error.hpp"

namespace maintminer::metrics {

ConfusionMatrix confusion(const std::vector<Activity>& predicted, const std::vector<Activity>& truth) {
  if (predicted.size() != truth.size())
    throw ArgError("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                   std::to_string(truth.size()) + " labels");
  if (predicted.empty()) throw ArgError("confusion: empty input");
  ConfusionMatrix m = ConfusionMatrix::Zero();
  for (std::size_t i = 0; i < predicted.size(); ++i) m(index_of(predicted[i]), index_of(truth[i])) += 1;
  return m;
}

ConfusionMatrix from_cells(const std::array<std::int64_t, 9>& cells) {
  ConfusionMatrix m;
  for (int r = 0; r < kActivityCount; ++r)
    for (int c = 0; c < kActivityCount; ++c) m(r, c) = cells[r * kActivityCount + c];
  return m;
}

double kappa(const ConfusionMatrix& m) {
  const Eigen::Matrix3d d = m.cast<double>();
  const double n = d.sum();
  const double observed = d.trace() / n;
  const double expected = d.rowwise().sum().dot(d.colwise().sum().transpose()) / (n * n);
  if (expected >= 1.0) return 1.0;
  return (observed - expected) / (1.0 - expected);
}

double binomial_upper_tail(std::int64_t successes, std::int64_t n, double p) {
  if (successes <= 0) return 1.0;
  if (successes > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // P(X >= k) = I_p(k, n - k + 1).
  return boost::math::ibeta(static_cast<double>(successes), static_cast<double>(n - successes + 1), p);
}

double binomial_nir_test(std::int64_t successes, std::int64_t n, double nir) {
  return binomial_upper_tail(successes, n, nir);
}

Summary summarize(const ConfusionMatrix& m) {
  if ((m.array() < 0).any()) throw ArgError("summarize: negative cell");
  Summary s;
  s.total = m.sum();
  if (s.total <= 0) throw ArgError("summarize: empty confusion matrix");
  const double n = static_cast<double>(s.total);
  const auto predicted = m.rowwise().sum();
  const auto actual = m.colwise().sum();
  const std::int64_t hits = m.trace();

  s.accuracy = hits / n;
  s.f1_micro = s.accuracy;
  s.nir = actual.maxCoeff() / n;
  s.kappa = kappa(m);
  s.p_value = binomial_nir_test(hits, s.total, s.nir);

  double f1_sum = 0;
  bool macro_defined = true;
  for (int k = 0; k < kActivityCount; ++k) {
    const auto tp = m(k, k);
    if (predicted(k) > 0) s.precision[k] = static_cast<double>(tp) / predicted(k);
    if (actual(k) > 0) s.recall[k] = static_cast<double>(tp) / actual(k);
    if (s.precision[k] && s.recall[k]) {
      const double denom = 2.0 * tp + (predicted(k) - tp) + (actual(k) - tp);
      s.f1[k] = denom > 0 ? 2.0 * tp / denom : 0.0;
    } else if (!s.precision[k] && !s.recall[k]) {
      s.f1[k] = 0.0;
    }
    if (s.f1[k]) {
      f1_sum += *s.f1[k];
    } else {
      macro_defined = false;
    }
  }
  if (macro_defined) s.f1_macro = f1_sum / kActivityCount;
  return s;
}

Interval proportion_ci(double p_hat, std::int64_t n, double level) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw ArgError("proportion_ci: rate outside [0, 1]");
  if (n < 1) throw ArgError("proportion_ci: n must be positive");
  if (!(level > 0.0 && level < 1.0)) throw ArgError("proportion_ci: level outside (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  Interval ci;
  ci.margin = z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
  ci.lower = std::clamp(p_hat - ci.margin, 0.0, 1.0);
  ci.upper = std::clamp(p_hat + ci.margin, 0.0, 1.0);
  return ci;
}

std::string format_p_value(double p) {
  if (p < 2e-16) return "<2e-16";
  char buf[32];
  if (p < 1e-4) {
    std::snprintf(buf, sizeof buf, "%.2e", p);
  } else {
    std::snprintf(buf, sizeof buf, "%.4f", p);
  }
  return buf;
}

namespace {

std::string percent(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.0f%%", *v * 100.0);
  return buf;
}

std::string percent(double v) { return percent(std::optional<double>(v)); }

std::string fixed2(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

std::string title(Activity a) {
  std::string s(to_string(a));
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::vector<csv::Row> table_rows(const ConfusionMatrix& m, const Summary& s) {
  std::vector<csv::Row> rows;
  csv::Row header{"classified as \\ true class"};
  for (auto a : kAllActivities) header.push_back(title(a));
  rows.push_back(header);
  for (auto r : kAllActivities) {
    csv::Row row{title(r)};
    for (auto c : kAllActivities) row.push_back(std::to_string(m(index_of(r), index_of(c))));
    rows.push_back(row);
  }
  csv::Row recall{"Recall:"}, precision{"Precision:"};
  for (int k = 0; k < kActivityCount; ++k) {
    recall.push_back(percent(s.recall[k]));
    precision.push_back(percent(s.precision[k]));
  }
  rows.push_back(recall);
  rows.push_back(precision);
  rows.push_back({"Accuracy:", percent(s.accuracy)});
  rows.push_back({"Kappa:", percent(s.kappa)});
  rows.push_back({"F1 Score (micro-averaged):", fixed2(s.f1_micro)});
  rows.push_back({"F1 Score (macro-averaged):", fixed2(s.f1_macro)});
  rows.push_back({"No Information Rate (NIR):", percent(s.nir)});
  rows.push_back({"P-Value [Accuracy > NIR]:", format_p_value(s.p_value)});
  return rows;
}

}  // namespace

std::string render_table(const ConfusionMatrix& m, const Summary& s) {
  const auto rows = table_rows(m, s);
  std::size_t label_width = 0;
  for (const auto& r : rows) label_width = std::max(label_width, r[0].size());
  std::ostringstream out;
  for (const auto& r : rows) {
    out << r[0] << std::string(label_width - r[0].size() + 2, ' ');
    for (std::size_t i = 1; i < r.size(); ++i) {
      std::string cell = r[i];
      if (cell.size() < 12) cell.insert(0, 12 - cell.size(), ' ');
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string render_csv(const ConfusionMatrix& m, const Summary& s) {
  std::string out;
  for (const auto& r : table_rows(m, s)) out += csv::format_row(r);
  return out;
}

}  // namespace maintminer::metrics
