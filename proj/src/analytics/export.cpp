#include <algorithm>
#include <filesystem>
#include <set>

#include "maintminer/analytics.hpp"
#include "maintminer/csv.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::analytics {

namespace {

constexpr std::int64_t kDay = 86400;
// Column order of every exported table.
constexpr Activity kColumns[] = {Activity::Corrective, Activity::Perfective, Activity::Adaptive};

nlohmann::json counts_json(const ActivityCounts& c) {
  nlohmann::json j = nlohmann::json::object();
  for (auto a : kColumns) j[std::string(to_string(a))] = c[index_of(a)];
  return j;
}

ActivityCounts counts_from(const nlohmann::json& j) {
  ActivityCounts c{};
  for (auto a : kColumns) c[index_of(a)] = j.at(std::string(to_string(a))).get<std::int64_t>();
  return c;
}

std::int64_t window_count(const DateRange& r, int days) {
  const std::int64_t span = r.to - r.from, w = static_cast<std::int64_t>(days) * kDay;
  return span <= 0 ? 0 : (span + w - 1) / w;
}

// Zero-filled tiling of the range from (day offset, counts) entries.
nlohmann::json series(const std::vector<std::pair<std::int64_t, ActivityCounts>>& days, const DateRange& r,
                      int window_days) {
  std::vector<ActivityCounts> buckets(static_cast<std::size_t>(window_count(r, window_days)), ActivityCounts{});
  for (const auto& [day, c] : days) {
    const auto w = static_cast<std::size_t>(day / window_days);
    if (w >= buckets.size()) continue;
    for (int k = 0; k < kActivityCount; ++k) buckets[w][k] += c[k];
  }
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t w = 0; w < buckets.size(); ++w) {
    auto j = counts_json(buckets[w]);
    j["window_start"] = iso_date(r.from + static_cast<std::int64_t>(w) * window_days * kDay);
    out.push_back(std::move(j));
  }
  return out;
}

nlohmann::json homogeneity_json(const std::vector<HomogeneityRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"project", r.project},
                   {"corrective_only", r.corrective_only},
                   {"perfective_only", r.perfective_only},
                   {"adaptive_only", r.adaptive_only},
                   {"heterogeneous", r.heterogeneous},
                   {"contributors", r.contributors},
                   {"share_percent", r.share_percent()},
                   {"share_text", r.share_text()}});
  return out;
}

}  // namespace

nlohmann::json to_json(const ClassifiedCommit& c) {
  nlohmann::json changes = nlohmann::json::object();
  for (std::size_t k = 0; k < kChangeTypeCount; ++k)
    if (c.changes[k]) changes[std::string(to_string(change_type_at(k)))] = c.changes[k];
  return {{"commit_id", c.commit_id},   {"project", c.project},        {"author_name", c.author_name},
          {"author_email", c.author_email}, {"timestamp", c.timestamp}, {"activity", to_string(c.activity)},
          {"message", c.message},       {"changes", changes},          {"touches_java", c.touches_java}};
}

ClassifiedCommit classified_from_json(const nlohmann::json& j) {
  ClassifiedCommit c;
  c.commit_id = j.at("commit_id").get<std::string>();
  c.project = j.value("project", "");
  c.author_name = j.value("author_name", "");
  c.author_email = j.value("author_email", "");
  c.timestamp = j.at("timestamp").get<std::int64_t>();
  const auto label = j.at("activity").get<std::string>();
  const auto a = parse_activity(label);
  if (!a) throw ArgError("unknown activity '" + label + "'");
  c.activity = *a;
  c.message = j.value("message", "");
  c.touches_java = j.value("touches_java", true);
  if (j.contains("changes"))
    for (const auto& [name, n] : j.at("changes").items()) {
      const auto t = parse_change_type(name);
      if (!t) throw ArgError("unknown change type '" + name + "'");
      c.changes[index_of(*t)] = n.get<std::int64_t>();
    }
  return c;
}

std::string to_classified_jsonl(const std::vector<ClassifiedCommit>& commits) {
  std::string s;
  for (const auto& c : commits) s += to_json(c).dump() + "\n";
  return s;
}

std::vector<ClassifiedCommit> parse_classified_jsonl(std::string_view text) {
  std::vector<ClassifiedCommit> out;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(classified_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ArgError("classified JSONL line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ArgError& e) {
      throw ArgError("classified JSONL line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string profiles_csv(const std::vector<ActivityProfile>& profiles) {
  std::string s = csv::format_row(
      {"project", "developer_email", "window_start", "window_days", "corrective", "perfective", "adaptive"});
  for (const auto& p : profiles) {
    csv::Row row{p.project, p.developer_email, p.window_start ? iso_date(*p.window_start) : "",
                 p.window_days ? std::to_string(*p.window_days) : ""};
    for (auto a : kColumns) row.push_back(std::to_string(p.counts[index_of(a)]));
    s += csv::format_row(row);
  }
  return s;
}

std::string labeled_csv(const std::vector<ClassifiedCommit>& commits) {
  std::string s = csv::format_row({"project", "commit_id", "author_name", "author_email", "date", "label", "message"});
  for (const auto& c : commits)
    s += csv::format_row({c.project, c.commit_id, c.author_name, c.author_email, iso_date(c.timestamp),
                          std::string(to_string(c.activity)), c.message});
  return s;
}

nlohmann::json build_bundle(const std::vector<ClassifiedCommit>& commits, const BundleOptions& options) {
  if (options.window_days <= 0) throw ArgError("bundle: window_days must be positive");
  const DateRange range = options.range.value_or(covering_range(commits));
  if (range.to < range.from) throw ArgError("bundle: inverted date range");
  auto merged = [&](const std::string& email) {
    auto it = options.identity_merge.find(email);
    return it == options.identity_merge.end() ? email : it->second;
  };

  // (project, email, day) -> counts
  std::map<std::tuple<std::string, std::string, std::int64_t>, ActivityCounts> daily;
  std::vector<ClassifiedCommit> in_range;
  for (const auto& c : commits) {
    if (c.timestamp < range.from || c.timestamp >= range.to) continue;
    in_range.push_back(c);
    auto& slot = daily[{c.project, merged(c.author_email), (c.timestamp - range.from) / kDay}];
    ++slot[index_of(c.activity)];
  }
  AggregateOptions dev_opts{Dimension::Developer, std::nullopt, range, options.identity_merge};
  const auto developers = aggregate(in_range, dev_opts);
  std::map<std::string, std::string> dev_names;
  for (const auto& d : developers) dev_names[d.project + '\n' + d.developer_email] = d.developer_name;

  nlohmann::json day_rows = nlohmann::json::array();
  std::map<std::string, std::vector<std::pair<std::int64_t, ActivityCounts>>> by_project, by_dev;
  ActivityCounts totals{};
  for (const auto& [key, c] : daily) {
    const auto& [project, email, day] = key;
    auto j = counts_json(c);
    j["project"] = project;
    j["email"] = email;
    j["name"] = dev_names[project + '\n' + email];
    j["day"] = day;
    j["date"] = iso_date(range.from + day * kDay);
    day_rows.push_back(std::move(j));
    by_project[project].emplace_back(day, c);
    by_dev[project + '\n' + email].emplace_back(day, c);
    for (int k = 0; k < kActivityCount; ++k) totals[k] += c[k];
  }

  nlohmann::json projects = nlohmann::json::array();
  for (const auto& p : aggregate(in_range, {Dimension::Project, std::nullopt, range, {}}))
    projects.push_back({{"project", p.project}, {"totals", counts_json(p.counts)},
                        {"series", series(by_project[p.project], range, options.window_days)}});
  nlohmann::json devs = nlohmann::json::array();
  for (const auto& d : developers) {
    const auto t = total(d.counts);
    const bool homogeneous = std::any_of(d.counts.begin(), d.counts.end(), [&](auto v) { return v == t; });
    devs.push_back({{"project", d.project},
                    {"email", d.developer_email},
                    {"name", d.developer_name},
                    {"homogeneous", homogeneous},
                    {"totals", counts_json(d.counts)},
                    {"series", series(by_dev[d.project + '\n' + d.developer_email], range, options.window_days)}});
  }

  const auto homo = detect_homogeneous(in_range, options.identity_merge);
  // Commits per class containing each vocabulary stem, and change-type sums per class.
  std::vector<ActivityCounts> stem_counts(options.vocabulary.size(), ActivityCounts{});
  std::vector<ActivityCounts> change_counts(kChangeTypeCount, ActivityCounts{});
  for (const auto& c : in_range) {
    const auto stems = text::normalize(c.message);
    for (const auto& s : stems) {
      const int k = options.vocabulary.index_of(s);
      if (k >= 0) ++stem_counts[static_cast<std::size_t>(k)][index_of(c.activity)];
    }
    for (std::size_t k = 0; k < kChangeTypeCount; ++k) change_counts[k][index_of(c.activity)] += c.changes[k];
  }
  nlohmann::json keywords = nlohmann::json::array(), changes = nlohmann::json::array();
  for (std::size_t k = 0; k < options.vocabulary.size(); ++k) {
    auto j = counts_json(stem_counts[k]);
    j["stem"] = options.vocabulary.stems()[k];
    keywords.push_back(std::move(j));
  }
  for (std::size_t k = 0; k < kChangeTypeCount; ++k) {
    auto j = counts_json(change_counts[k]);
    j["change_type"] = to_string(change_type_at(k));
    changes.push_back(std::move(j));
  }

  nlohmann::json activities = nlohmann::json::array();
  for (auto a : kColumns) activities.push_back(to_string(a));
  return {{"schema_version", kBundleSchemaVersion},
          {"window_days", options.window_days},
          {"range", {{"from", range.from}, {"to", range.to}, {"from_date", iso_date(range.from)},
                     {"to_date", iso_date(range.to)}}},
          {"activities", activities},
          {"totals", counts_json(totals)},
          {"commit_count", in_range.size()},
          {"daily", day_rows},
          {"projects", projects},
          {"developers", devs},
          {"homogeneity", {{"all", homogeneity_json(homo.all)}, {"java", homogeneity_json(homo.java)}}},
          {"keyword_frequencies", keywords},
          {"change_type_frequencies", changes}};
}

void export_views(const std::vector<ClassifiedCommit>& commits, const BundleOptions& options,
                  const std::string& destination) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(destination) / "datasets", ec);
  if (ec) throw IoError("cannot create " + destination + ": " + ec.message());
  const auto bundle = build_bundle(commits, options);
  const DateRange range{bundle["range"]["from"].get<std::int64_t>(), bundle["range"]["to"].get<std::int64_t>()};
  AggregateOptions windowed{Dimension::Developer, options.window_days, range, options.identity_merge};
  write_file((fs::path(destination) / "bundle.json").string(), bundle.dump(1) + "\n");
  write_file((fs::path(destination) / "datasets" / "profiles.csv").string(),
             profiles_csv(aggregate(commits, windowed)));
  std::vector<ClassifiedCommit> in_range;
  for (const auto& c : commits)
    if (c.timestamp >= range.from && c.timestamp < range.to) in_range.push_back(c);
  write_file((fs::path(destination) / "datasets" / "labeled.csv").string(), labeled_csv(in_range));
}

nlohmann::json bundle_profiles(const nlohmann::json& bundle, const std::string& project, int window_days,
                               const std::string& developer) {
  if (window_days <= 0) throw ArgError("window must be positive");
  const DateRange range{bundle.at("range").at("from").get<std::int64_t>(),
                        bundle.at("range").at("to").get<std::int64_t>()};
  std::vector<std::pair<std::int64_t, ActivityCounts>> days;
  ActivityCounts totals{};
  bool known = project.empty() && developer.empty();
  for (const auto& row : bundle.at("daily")) {
    const bool p_ok = project.empty() || row.at("project").get<std::string>() == project;
    const bool d_ok = developer.empty() || row.at("email").get<std::string>() == developer;
    if (!(p_ok && d_ok)) continue;
    known = true;
    const auto c = counts_from(row);
    days.emplace_back(row.at("day").get<std::int64_t>(), c);
    for (int k = 0; k < kActivityCount; ++k) totals[k] += c[k];
  }
  if (!known) {
    for (const auto& p : bundle.at("projects"))
      if (p.at("project").get<std::string>() == project && developer.empty()) known = true;
  }
  if (!known) throw ArgError("no data for project '" + project + "'" + (developer.empty() ? "" : " and developer '" + developer + "'"));
  nlohmann::json out{{"project", project},
                     {"window_days", window_days},
                     {"range", bundle.at("range")},
                     {"totals", counts_json(totals)},
                     {"series", series(days, range, window_days)}};
  if (!developer.empty()) out["developer"] = developer;
  return out;
}

}  // namespace maintminer::analytics
