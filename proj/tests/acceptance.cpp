#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "acceptance_report.hpp"
#include "distiller_corpus.hpp"
#include "glm_fixtures.hpp"
#include "maintminer/analytics.hpp"
#include "maintminer/distiller.hpp"
#include "maintminer/glm.hpp"
#include "maintminer/log.hpp"
#include "maintminer/metrics.hpp"

using namespace maintminer;
using namespace maintminer::testing;

namespace {

// Reference confusion matrices: classified-as rows, true columns, adaptive / corrective / perfective.
constexpr std::array<std::int64_t, 9> kNaiveCells{18, 2, 16, 18, 72, 37, 1, 1, 7};
constexpr std::array<std::int64_t, 9> kChampionCells{28, 5, 5, 6, 63, 14, 3, 7, 41};

double pct(double v) { return 100 * v; }

Verdict naive_matrix() {
  const auto s = metrics::summarize(metrics::from_cells(kNaiveCells));
  const double recall[3] = {pct(*s.recall[index_of(Activity::Adaptive)]), pct(*s.recall[index_of(Activity::Corrective)]),
                            pct(*s.recall[index_of(Activity::Perfective)])};
  const bool ok = within(pct(s.accuracy), 56.4, 0.5) && within(pct(s.kappa), 29.1, 0.5) && within(pct(s.nir), 43.6, 0.2) &&
                  within(s.f1_micro, 0.56, 0.005) && s.f1_macro && within(*s.f1_macro, 0.46, 0.01) &&
                  within(recall[0], 49, 1) && within(recall[1], 96, 1) && within(recall[2], 12, 1) &&
                  within(s.p_value, 0.0005, 0.0003);
  return {ok, "accuracy " + fmt("%.2f%%", pct(s.accuracy)) + ", kappa " + fmt("%.2f%%", pct(s.kappa)) + ", NIR " +
                  fmt("%.2f%%", pct(s.nir)) + ", F1 micro " + fmt("%.3f", s.f1_micro) + ", F1 macro " +
                  fmt("%.3f", s.f1_macro.value_or(NAN)) + ", recall a/c/p " + fmt("%.1f", recall[0]) + "/" +
                  fmt("%.1f", recall[1]) + "/" + fmt("%.1f", recall[2]) + "%, p " + fmt("%.5f", s.p_value)};
}

Verdict champion_matrix() {
  const auto s = metrics::summarize(metrics::from_cells(kChampionCells));
  const bool ok = within(pct(s.accuracy), 76.7, 0.5) && within(pct(s.kappa), 63.6, 0.5) && s.p_value < 1e-15;
  return {ok, "accuracy " + fmt("%.2f%%", pct(s.accuracy)) + ", kappa " + fmt("%.2f%%", pct(s.kappa)) + ", p " +
                  fmt("%.3g", s.p_value)};
}

Verdict agreement_ci() {
  const auto ci = metrics::proportion_ci(0.945, 110, 0.95);
  const bool ok = within(ci.lower, 0.903, 0.002) && within(ci.upper, 0.987, 0.002) && within(ci.margin, 0.042, 0.002);
  return {ok, "[" + fmt("%.4f", ci.lower) + ", " + fmt("%.4f", ci.upper) + "], margin " + fmt("%.4f", ci.margin)};
}

Verdict distiller_corpus() {
  const auto corpus = load_distiller_corpus(MAINTMINER_FIXTURES "/distiller");
  int matched = 0;
  std::string mismatches;
  for (const auto& f : corpus) {
    const auto got = distiller::tally(distiller::distill(f.before, f.after, f.name));
    if (got == f.expected)
      ++matched;
    else
      mismatches += " " + f.name + "=" + describe(got);
  }
  // The worked commit, its frequency vector and its pound lines.
  const auto records = distiller::distill_commit(worked_commit(MAINTMINER_FIXTURES "/distiller/1a2b3c"));
  const auto reference = read_file(MAINTMINER_FIXTURES "/distiller/1a2b3c/worked.pound");
  const auto ours = analytics::per_commit_frequencies(records);
  const auto theirs = analytics::per_commit_frequencies(distiller::parse_pound(reference));
  std::vector<std::string> a, b;
  for (const auto& l : split(distiller::to_pound(records), '\n'))
    if (!l.empty()) a.emplace_back(l);
  for (const auto& l : split(reference, '\n'))
    if (!trim(l).empty()) b.emplace_back(trim(l));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  ChangeCounts expected{};
  expected[index_of(ChangeType::PARAMETER_INSERT)] = 3;
  expected[index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)] = 1;
  expected[index_of(ChangeType::DOC_DELETE)] = 2;
  const bool worked = ours == theirs && ours.size() == 1 && ours.at("1a2b3c") == expected && a == b &&
                      distiller::parse_pound(distiller::to_pound(records)) == records;
  const bool ok = corpus.size() == 25 && matched == 25 && worked;
  return {ok, std::to_string(matched) + "/" + std::to_string(corpus.size()) + " fixtures match" + mismatches +
                  "; 1a2b3c " + (worked ? describe(ours.at("1a2b3c")) + ", pound lines identical" : "mismatch")};
}

Verdict glm_properties() {
  std::string detail;
  bool ok = true;
  // Recovery: each coefficient's 95% interval covers the truth in >= 45 of 50 replications.
  const std::vector<double> beta{1.0, 0.5, -0.3};
  std::array<int, 3> covered{};
  for (int rep = 0; rep < 50; ++rep) {
    const auto fit = glm::fit_nb(synthetic(1 + static_cast<std::uint64_t>(rep), 200, beta, 2.0));
    for (std::size_t j = 0; j < 3; ++j)
      covered[j] += std::abs(fit.coefficients[j].estimate - beta[j]) <= 1.959964 * fit.coefficients[j].std_error;
  }
  for (int c : covered) ok = ok && c >= 45;
  detail += "coverage " + std::to_string(covered[0]) + "/" + std::to_string(covered[1]) + "/" +
            std::to_string(covered[2]) + " of 50";
  // Poisson limit.
  const auto pd = synthetic(77, 300, {0.7, 0.3, -0.4}, std::numeric_limits<double>::infinity());
  const auto nb = glm::fit_nb(pd);
  const auto pois = glm::fit_poisson(pd);
  double max_delta = 0;
  for (std::size_t j = 0; j < 3; ++j)
    max_delta = std::max(max_delta, std::abs(nb.coefficients[j].estimate - pois.coefficients[j].estimate));
  ok = ok && max_delta < 0.05;
  detail += ", poisson max|dbeta| " + fmt("%.4f", max_delta);
  // Delta AIC = delta deviance - 2 on every single-df drop, and on the reference table.
  const auto d = synthetic(9, 150, {1.0, 0.5, -0.3, 0.0}, 2.0);
  const auto rows = glm::anova_type2(d, glm::fit_nb(d));
  double worst = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    worst = std::max(worst, std::abs((rows[i].aic - rows[0].aic) - (rows[i].deviance - rows[0].deviance - 2)));
  const double ref_delta_dev = 95.903 - 72.311, ref_delta_aic = 1015.071 - 993.480;
  ok = ok && worst < 1e-8 && within(ref_delta_dev, 23.592, 5e-4) && within(ref_delta_aic, 21.591, 5e-4) &&
       within(ref_delta_aic, ref_delta_dev - 2, 2e-3);
  detail += ", anova |dAIC-(dDev-2)| " + fmt("%.1e", worst) + ", reference " + fmt("%.3f", ref_delta_dev) + " vs " +
            fmt("%.3f", ref_delta_aic);
  // Type-II order invariance, exact.
  const auto base = synthetic(10, 150, {1.0, 0.5, -0.3, 0.2}, 2.0);
  glm::Design perm = base;
  const std::vector<Eigen::Index> order{2, 0, 3, 1};
  for (std::size_t k = 0; k < order.size(); ++k) {
    perm.x.col(static_cast<Eigen::Index>(k)) = base.x.col(order[k]);
    perm.names[k] = base.names[static_cast<std::size_t>(order[k])];
  }
  auto ta = glm::anova_type2(base, glm::fit_nb(base));
  auto tb = glm::anova_type2(perm, glm::fit_nb(perm));
  auto by_term = [](const glm::AnovaRow& x, const glm::AnovaRow& y) { return x.term < y.term; };
  std::sort(ta.begin(), ta.end(), by_term);
  std::sort(tb.begin(), tb.end(), by_term);
  bool same = ta.size() == tb.size();
  for (std::size_t i = 0; same && i < ta.size(); ++i)
    same = ta[i].term == tb[i].term && ta[i].deviance == tb[i].deviance && ta[i].aic == tb[i].aic &&
           ta[i].f_value == tb[i].f_value && ta[i].p_value == tb[i].p_value;
  ok = ok && same;
  detail += same ? ", permuted table identical" : ", permuted table differs";
  return {ok, detail};
}

std::vector<analytics::ClassifiedCommit> corpus_1000() {
  std::mt19937_64 rng(2024);
  const std::int64_t start = parse_date("2015-06-01");
  std::vector<analytics::ClassifiedCommit> out;
  for (int i = 0; i < 1000; ++i) {
    analytics::ClassifiedCommit c;
    c.commit_id = "k" + std::to_string(i);
    c.project = "p" + std::to_string(rng() % 5);
    c.author_email = "d" + std::to_string(rng() % 50) + "@example.org";
    c.timestamp = start + static_cast<std::int64_t>(rng() % (700 * 86400));
    c.activity = activity_at(static_cast<int>(rng() % 3));
    out.push_back(c);
  }
  return out;
}

using ProfileKey = std::tuple<std::string, std::string, std::int64_t>;

std::map<ProfileKey, analytics::ActivityCounts> keyed(const std::vector<analytics::ActivityProfile>& v) {
  std::map<ProfileKey, analytics::ActivityCounts> m;
  for (const auto& p : v) {
    auto& slot = m[{p.project, p.developer_email, p.window_start.value_or(-1)}];
    for (int k = 0; k < kActivityCount; ++k) slot[k] += p.counts[k];
  }
  return m;
}

Verdict aggregation_conservation() {
  const auto commits = corpus_1000();
  analytics::ActivityCounts totals{};
  for (const auto& c : commits) ++totals[index_of(c.activity)];
  auto sum = [](const std::vector<analytics::ActivityProfile>& v) {
    analytics::ActivityCounts t{};
    for (const auto& p : v)
      for (int k = 0; k < kActivityCount; ++k) t[k] += p.counts[k];
    return t;
  };
  bool conserved = true;
  int views = 0;
  for (auto dim : {analytics::Dimension::Developer, analytics::Dimension::Project, analytics::Dimension::Window})
    for (int w : {7, 28, 90}) {
      conserved = conserved && sum(analytics::aggregate(commits, {dim, w, std::nullopt, {}})) == totals;
      ++views;
    }
  for (auto dim : {analytics::Dimension::Developer, analytics::Dimension::Project}) {
    conserved = conserved && sum(analytics::aggregate(commits, {dim, std::nullopt, std::nullopt, {}})) == totals;
    ++views;
  }
  // Partial aggregation over 4 interleaved shards, merged by count sums.
  const auto range = analytics::covering_range(commits);
  bool merged_equal = true;
  for (auto dim : {analytics::Dimension::Developer, analytics::Dimension::Project, analytics::Dimension::Window}) {
    const analytics::AggregateOptions o{dim, 28, range, {}};
    std::map<ProfileKey, analytics::ActivityCounts> merged;
    for (int s = 0; s < 4; ++s) {
      std::vector<analytics::ClassifiedCommit> shard;
      for (std::size_t i = static_cast<std::size_t>(s); i < commits.size(); i += 4) shard.push_back(commits[i]);
      for (const auto& [k, c] : keyed(analytics::aggregate(shard, o)))
        for (int a = 0; a < kActivityCount; ++a) merged[k][a] += c[a];
    }
    merged_equal = merged_equal && merged == keyed(analytics::aggregate(commits, o));
  }
  std::mt19937 rng(5);
  std::vector<distiller::ChangeRecord> records;
  for (int i = 0; i < 20000; ++i)
    records.push_back({"k" + std::to_string(rng() % 1000), change_type_at(rng() % kChangeTypeCount), "F.java"});
  const auto single = analytics::per_commit_frequencies(records);
  for (std::size_t parts = 1; parts <= 8; ++parts)
    merged_equal = merged_equal && analytics::parallel_frequencies(records, parts) == single;
  return {conserved && merged_equal,
          std::to_string(views) + " views sum to " + std::to_string(totals[index_of(Activity::Corrective)]) + "/" +
              std::to_string(totals[index_of(Activity::Perfective)]) + "/" +
              std::to_string(totals[index_of(Activity::Adaptive)]) + " (c/p/a)" +
              (conserved ? "" : " VIOLATED") + "; partial merges " + (merged_equal ? "equal" : "differ")};
}

}  // namespace

int main() {
  log::set_level(log::Level::Error);
  AcceptanceReport report;
  report.run("C1", "metrics oracle, naive matrix", 1, naive_matrix);
  report.run("C2", "metrics oracle, champion matrix", 1, champion_matrix);
  report.run("C3", "agreement CI", 1, agreement_ci);
  report.run("C7", "distiller corpus and worked commit", 60, distiller_corpus);
  report.run("C8", "GLM properties", 120, glm_properties);
  report.run("C9", "aggregation conservation", 60, aggregation_conservation);
  return report.finish();
}
