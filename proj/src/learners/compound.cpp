#include "maintminer/compound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "maintminer/log.hpp"
#include "maintminer/parallel.hpp"
#include "maintminer/random.hpp"

namespace maintminer::learners {

using dataset::Encoding;
using nlohmann::json;

CommitTable CommitTable::from_commits(const std::vector<dataset::LabeledCommit>& commits,
                                      const text::Vocabulary& vocabulary, const text::Stopwords& stopwords) {
  CommitTable t;
  t.vocabulary = vocabulary;
  const auto n = static_cast<Eigen::Index>(commits.size());
  t.features.resize(n, dataset::dimension(Encoding::Combined68, vocabulary.size()));
  t.labels.resize(n);
  t.keyword.resize(commits.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = commits[static_cast<std::size_t>(i)];
    const auto stems = text::normalize(c.message, stopwords);
    t.features.row(i) = dataset::encode(stems, c.change_counts, Encoding::Combined68, vocabulary).transpose();
    t.labels(i) = index_of(c.label);
    t.keyword[static_cast<std::size_t>(i)] = text::has_keywords(stems, vocabulary) ? 1 : 0;
  }
  return t;
}

CommitTable CommitTable::subset(const std::vector<Eigen::Index>& rows) const {
  CommitTable t;
  t.vocabulary = vocabulary;
  t.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  t.labels.resize(static_cast<Eigen::Index>(rows.size()));
  t.keyword.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    const auto ii = static_cast<Eigen::Index>(i);
    t.features.row(ii) = features.row(r);
    t.labels(ii) = labels(r);
    t.keyword[i] = keyword[static_cast<std::size_t>(r)];
  }
  return t;
}

Eigen::MatrixXd slice_columns(const Eigen::MatrixXd& combined, Encoding e, std::size_t vocabulary_size) {
  const auto v = static_cast<Eigen::Index>(vocabulary_size);
  switch (e) {
    case Encoding::Keywords20: return combined.leftCols(v);
    case Encoding::Changes48: return combined.middleCols(v, static_cast<Eigen::Index>(kChangeTypeCount));
    case Encoding::Combined68: return combined;
  }
  return combined;
}

Eigen::MatrixXd CommitTable::slice(Encoding e) const { return slice_columns(features, e, vocabulary.size()); }

CompoundModel::CompoundModel(Component model_kw, Component model_nokw, text::Vocabulary vocabulary)
    : kw_(std::move(model_kw)), nokw_(std::move(model_nokw)), vocabulary_(std::move(vocabulary)) {}

bool CompoundModel::routes_to_kw(const text::StemSet& stems) const { return text::has_keywords(stems, vocabulary_); }

Activity CompoundModel::classify_row(const Eigen::Ref<const Eigen::VectorXd>& combined, bool keyword) const {
  const Component& c = keyword ? kw_ : nokw_;
  const auto v = static_cast<Eigen::Index>(vocabulary_.size());
  switch (c.encoding()) {
    case Encoding::Keywords20: return c.predict(combined.head(v));
    case Encoding::Changes48: return c.predict(combined.segment(v, static_cast<Eigen::Index>(kChangeTypeCount)));
    case Encoding::Combined68: return c.predict(combined);
  }
  return c.predict(combined);
}

Activity CompoundModel::classify(std::string_view message, const ChangeCounts& counts,
                                 const text::Stopwords& stopwords) const {
  const auto stems = text::normalize(message, stopwords);
  return classify_row(dataset::encode(stems, counts, Encoding::Combined68, vocabulary_), routes_to_kw(stems));
}

std::vector<Activity> CompoundModel::classify_table(const CommitTable& table) const {
  if (table.vocabulary.stems() != vocabulary_.stems()) throw ArgError("table vocabulary differs from the model's");
  std::vector<Activity> out;
  out.reserve(static_cast<std::size_t>(table.rows()));
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    out.push_back(classify_row(table.features.row(i).transpose(), table.keyword[static_cast<std::size_t>(i)] != 0));
  return out;
}

json CompoundModel::to_json() const {
  return {{"format", "maintminer-compound"},
          {"version", 1},
          {"routing_vocabulary", vocabulary_.stems()},
          {"model_kw", kw_.to_json()},
          {"model_nokw", nokw_.to_json()}};
}

CompoundModel CompoundModel::from_json(const json& j) {
  try {
    if (j.value("format", "") != "maintminer-compound") throw SpecError("not a maintminer compound model");
    if (j.value("version", 0) != 1) throw SpecError("unsupported compound model version");
    text::Vocabulary vocab(j.at("routing_vocabulary").get<std::vector<std::string>>());
    auto kw = Component::from_json(j.at("model_kw"));
    auto nokw = Component::from_json(j.at("model_nokw"));
    for (const auto* c : {&kw, &nokw})
      if (c->dimension() != dataset::dimension(c->encoding(), vocab.size()))
        throw SpecError("component width does not match the routing vocabulary");
    return CompoundModel(std::move(kw), std::move(nokw), std::move(vocab));
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed compound model: ") + e.what());
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(std::string("malformed compound model: ") + e.what());
  }
}

Activity classify_commit(const CompoundModel& model, const dataset::LabeledCommit& commit) {
  return model.classify(commit.message, commit.change_counts);
}

CompoundModel train_compound(const CommitTable& train, const CompoundSpec& spec) {
  auto component = [&](Encoding e, std::uint64_t role) {
    ComponentSpec cs{spec.algorithm, e, spec.hyper, derive_seed(spec.seed, role)};
    return train_component(train.slice(e), train.labels, cs);
  };
  auto kw = component(spec.model_kw, 0);
  auto nokw = component(spec.model_nokw, 1);
  return CompoundModel(std::move(kw), std::move(nokw), train.vocabulary);
}

SixNumber six_number(std::vector<double> v) {
  if (v.empty()) throw ArgError("six-number summary of an empty list");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = static_cast<double>(v.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  SixNumber s;
  s.min = v.front();
  s.max = v.back();
  s.q1 = q(0.25);
  s.median = q(0.5);
  s.q3 = q(0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

std::vector<int> stratified_folds(const Eigen::VectorXi& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw CvError("need at least 2 folds");
  std::array<std::vector<Eigen::Index>, kActivityCount> by_class;
  for (Eigen::Index i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels(i))].push_back(i);
  for (std::size_t k = 0; k < kActivityCount; ++k)
    if (!by_class[k].empty() && by_class[k].size() < static_cast<std::size_t>(folds))
      throw CvError("class " + std::string(to_string(kAllActivities[k])) + " has " +
                    std::to_string(by_class[k].size()) + " instances, fewer than " + std::to_string(folds) + " folds");
  Rng rng(seed);
  std::vector<int> fold(static_cast<std::size_t>(labels.size()), 0);
  for (auto& rows : by_class) {
    shuffle(rows, rng);
    for (std::size_t i = 0; i < rows.size(); ++i) fold[static_cast<std::size_t>(rows[i])] = static_cast<int>(i % folds);
  }
  return fold;
}

ResampleStats repeated_cv(const CommitTable& train, const CompoundSpec& spec, const CvParams& cv) {
  if (cv.repeats < 1) throw CvError("need at least one repeat");
  if (train.rows() < cv.folds) throw CvError("fewer rows than folds");
  std::vector<std::vector<int>> assignment;
  for (int r = 0; r < cv.repeats; ++r)
    assignment.push_back(stratified_folds(train.labels, cv.folds, derive_seed(spec.seed, static_cast<std::uint64_t>(r))));

  const auto tasks = static_cast<std::size_t>(cv.folds) * static_cast<std::size_t>(cv.repeats);
  ResampleStats stats;
  stats.accuracy.assign(tasks, 0.0);
  stats.kappa.assign(tasks, 0.0);
  parallel_for(tasks, [&](std::size_t task) {
    const auto& fold = assignment[task / static_cast<std::size_t>(cv.folds)];
    const int held = static_cast<int>(task % static_cast<std::size_t>(cv.folds));
    std::vector<Eigen::Index> in, out;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == held ? out : in).push_back(static_cast<Eigen::Index>(i));
    CompoundSpec s = spec;
    s.seed = derive_seed(spec.seed, 0x10000 + task);
    const auto model = train_compound(train.subset(in), s);
    const auto test = train.subset(out);
    std::vector<Activity> truth;
    for (Eigen::Index i = 0; i < test.labels.size(); ++i) truth.push_back(kAllActivities[static_cast<std::size_t>(test.labels(i))]);
    const auto m = metrics::confusion(model.classify_table(test), truth);
    const auto sum = metrics::summarize(m);
    stats.accuracy[task] = sum.accuracy;
    stats.kappa[task] = sum.kappa;
  });
  stats.accuracy_summary = six_number(stats.accuracy);
  stats.kappa_summary = six_number(stats.kappa);
  return stats;
}

std::string_view grid_label(Encoding e) {
  switch (e) {
    case Encoding::Keywords20: return "Keywords";
    case Encoding::Changes48: return "Changes";
    case Encoding::Combined68: return "Combined";
  }
  return "?";
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string GridReport::render_csv() const {
  std::ostringstream out;
  out << "Alg,Model_KW,Model_notKW,Accuracy,Kappa\n";
  for (const auto& c : cells)
    out << display_name(c.algorithm) << ',' << grid_label(c.model_kw) << ',' << grid_label(c.model_nokw) << ','
        << fixed4(c.cv.accuracy_summary.mean) << ',' << fixed4(c.cv.kappa_summary.mean) << '\n';
  return out.str();
}

std::string GridReport::render_test_csv() const {
  std::ostringstream out;
  out << "Alg,Model_KW,Model_notKW,Accuracy,Kappa\n";
  for (const auto& ch : champions) {
    const auto& c = cells[ch.cell];
    out << display_name(c.algorithm) << ',' << grid_label(c.model_kw) << ',' << grid_label(c.model_nokw) << ','
        << fixed4(ch.test.accuracy) << ',' << fixed4(ch.test.kappa) << '\n';
  }
  return out.str();
}

std::string GridReport::render_resamples_csv() const {
  std::ostringstream out;
  out << "Alg,Metric,Min,Q1,Median,Mean,Q3,Max\n";
  for (const auto& ch : champions) {
    const auto& c = cells[ch.cell];
    for (int m = 0; m < 2; ++m) {
      const SixNumber& s = m == 0 ? c.cv.accuracy_summary : c.cv.kappa_summary;
      out << display_name(c.algorithm) << ',' << (m == 0 ? "Accuracy" : "Kappa");
      for (double v : {s.min, s.q1, s.median, s.mean, s.q3, s.max}) out << ',' << fixed4(v);
      out << '\n';
    }
  }
  return out.str();
}

GridReport grid_evaluate(const CommitTable& train, const CommitTable& test, const GridOptions& options) {
  if (test.vocabulary.stems() != train.vocabulary.stems()) throw ArgError("train and test vocabularies differ");
  GridReport report;
  std::vector<Activity> truth;
  for (Eigen::Index i = 0; i < test.labels.size(); ++i) truth.push_back(kAllActivities[static_cast<std::size_t>(test.labels(i))]);
  for (auto alg : options.algorithms) {
    const std::size_t first = report.cells.size();
    for (auto kw : dataset::kAllEncodings)
      for (auto nokw : dataset::kAllEncodings) {
        CompoundSpec spec{alg, kw, nokw, options.hyper, options.seed};
        log::info(std::string("cv ") + std::string(display_name(alg)) + " " + std::string(grid_label(kw)) + "/" +
                  std::string(grid_label(nokw)));
        report.cells.push_back({alg, kw, nokw, repeated_cv(train, spec, options.cv)});
      }
    std::size_t best = first;
    for (std::size_t i = first + 1; i < report.cells.size(); ++i) {
      const auto& a = report.cells[i].cv;
      const auto& b = report.cells[best].cv;
      if (a.accuracy_summary.mean > b.accuracy_summary.mean ||
          (a.accuracy_summary.mean == b.accuracy_summary.mean && a.kappa_summary.mean > b.kappa_summary.mean))
        best = i;
    }
    const auto& cell = report.cells[best];
    const auto model = train_compound(train, {alg, cell.model_kw, cell.model_nokw, options.hyper, options.seed});
    Champion ch;
    ch.cell = best;
    ch.confusion = metrics::confusion(model.classify_table(test), truth);
    ch.test = metrics::summarize(ch.confusion);
    report.champions.push_back(ch);
  }
  return report;
}

}  // namespace maintminer::learners
