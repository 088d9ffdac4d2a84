#include <algorithm>
#include <cmath>
#include <tuple>

#include "maintminer/analytics.hpp"
#include "maintminer/parallel.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::analytics {

namespace {

constexpr std::int64_t kDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

CommitFrequencies per_commit_frequencies(const std::vector<distiller::ChangeRecord>& records) {
  CommitFrequencies out;
  for (const auto& r : records) {
    auto [it, fresh] = out.try_emplace(r.commit_id);
    if (fresh) it->second.fill(0);
    ++it->second[index_of(r.change_type)];
  }
  return out;
}

void merge_into(CommitFrequencies& into, const CommitFrequencies& part) {
  for (const auto& [id, counts] : part) {
    auto [it, fresh] = into.try_emplace(id);
    if (fresh) it->second.fill(0);
    for (std::size_t k = 0; k < kChangeTypeCount; ++k) it->second[k] += counts[k];
  }
}

CommitFrequencies parallel_frequencies(const std::vector<distiller::ChangeRecord>& records, std::size_t parts) {
  parts = std::max<std::size_t>(1, parts);
  std::vector<CommitFrequencies> partial(parts);
  const std::size_t n = records.size();
  parallel_for(parts, [&](std::size_t p) {
    const std::size_t lo = n * p / parts, hi = n * (p + 1) / parts;
    partial[p] = per_commit_frequencies({records.begin() + static_cast<std::ptrdiff_t>(lo),
                                         records.begin() + static_cast<std::ptrdiff_t>(hi)});
  });
  CommitFrequencies out;
  for (const auto& p : partial) merge_into(out, p);
  return out;
}

std::int64_t total(const ActivityCounts& c) { return c[0] + c[1] + c[2]; }

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Developer: return "developer";
    case Dimension::Project: return "project";
    case Dimension::Window: return "window";
  }
  return "?";
}

Dimension parse_dimension(std::string_view name) {
  const auto n = to_lower(trim(name));
  if (n == "developer" || n == "dev") return Dimension::Developer;
  if (n == "project") return Dimension::Project;
  if (n == "window") return Dimension::Window;
  throw ArgError("unknown dimension '" + std::string(name) + "' (developer, project, window)");
}

DateRange covering_range(const std::vector<ClassifiedCommit>& commits) {
  if (commits.empty()) return {};
  std::int64_t lo = commits[0].timestamp, hi = lo;
  for (const auto& c : commits) {
    lo = std::min(lo, c.timestamp);
    hi = std::max(hi, c.timestamp);
  }
  const std::int64_t from = floor_div(lo, kDay) * kDay;
  return {from, (floor_div(hi, kDay) + 1) * kDay};
}

namespace {

std::string canonical_email(const std::string& email, const std::map<std::string, std::string>& merge) {
  auto it = merge.find(email);
  return it == merge.end() ? email : it->second;
}

}  // namespace

std::vector<ActivityProfile> aggregate(const std::vector<ClassifiedCommit>& commits, const AggregateOptions& options) {
  const DateRange range = options.range.value_or(covering_range(commits));
  if (range.to < range.from) throw ArgError("aggregate: inverted date range");
  if (options.window_days && *options.window_days <= 0) throw ArgError("aggregate: window_days must be positive");
  if (options.dimension == Dimension::Window && !options.window_days)
    throw ArgError("aggregate: the window dimension needs window_days");
  const bool by_dev = options.dimension == Dimension::Developer;
  const bool by_project = options.dimension != Dimension::Window;

  using Key = std::tuple<std::string, std::string, std::int64_t>;
  std::map<Key, ActivityCounts> counts;
  std::map<std::string, std::map<std::string, std::int64_t>> names;
  for (const auto& c : commits) {
    if (c.timestamp < range.from || c.timestamp >= range.to) continue;
    const std::string email = by_dev ? canonical_email(c.author_email, options.identity_merge) : "";
    std::int64_t window = 0;
    if (options.window_days) window = floor_div(c.timestamp - range.from, *options.window_days * kDay);
    auto [it, fresh] = counts.try_emplace(Key{by_project ? c.project : "", email, window});
    if (fresh) it->second.fill(0);
    ++it->second[index_of(c.activity)];
    if (by_dev) ++names[email][c.author_name];
  }
  std::vector<ActivityProfile> out;
  out.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    ActivityProfile p;
    p.project = std::get<0>(key);
    p.developer_email = std::get<1>(key);
    if (by_dev) {
      const auto& n = names[p.developer_email];
      p.developer_name = std::max_element(n.begin(), n.end(), [](const auto& a, const auto& b) {
                           return a.second < b.second;
                         })->first;
    }
    if (options.window_days) {
      p.window_days = *options.window_days;
      p.window_start = range.from + std::get<2>(key) * *options.window_days * kDay;
    }
    p.counts = c;
    out.push_back(std::move(p));
  }
  return out;
}

int HomogeneityRow::share_percent() const {
  if (contributors <= 0) return 0;
  return static_cast<int>(100 * homogeneous() / contributors);
}

std::string HomogeneityRow::share_text() const {
  const int s = share_percent();
  if (s == 0 && homogeneous() > 0) return "<1%";
  return std::to_string(s) + "%";
}

HomogeneityReport detect_homogeneous(const std::vector<ClassifiedCommit>& commits,
                                     const std::map<std::string, std::string>& identity_merge) {
  auto rows = [&](bool java_only) {
    std::map<std::string, std::map<std::string, ActivityCounts>> per;
    for (const auto& c : commits) {
      if (java_only && !c.touches_java) continue;
      auto& counts = per[c.project][canonical_email(c.author_email, identity_merge)];
      ++counts[index_of(c.activity)];
    }
    std::vector<HomogeneityRow> out;
    for (const auto& [project, devs] : per) {
      HomogeneityRow r;
      r.project = project;
      for (const auto& [email, c] : devs) {
        ++r.contributors;
        const auto t = total(c);
        if (c[index_of(Activity::Corrective)] == t)
          ++r.corrective_only;
        else if (c[index_of(Activity::Perfective)] == t)
          ++r.perfective_only;
        else if (c[index_of(Activity::Adaptive)] == t)
          ++r.adaptive_only;
        else
          ++r.heterogeneous;
      }
      out.push_back(std::move(r));
    }
    return out;
  };
  return {rows(false), rows(true)};
}

std::string render_homogeneity(const std::vector<HomogeneityRow>& rows) {
  std::string s;
  for (const auto& r : rows)
    s += r.project + " & " + std::to_string(r.corrective_only) + " & " + std::to_string(r.perfective_only) + " & " +
         std::to_string(r.adaptive_only) + " & " + r.share_text() + " & " + std::to_string(r.contributors) + "\n";
  return s;
}

}  // namespace maintminer::analytics
