#include "maintminer/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "json.hpp"
#include "maintminer/csv.hpp"
#include "maintminer/random.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::dataset {

namespace {

std::string normalize_header(std::string_view name) {
  std::string out;
  for (char c : trim(name)) {
    if (c == '_' || c == ' ' || c == '-' || c == '.') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& headers,
                                       std::initializer_list<std::string_view> aliases) {
  for (auto alias : aliases) {
    for (std::size_t i = 0; i < headers.size(); ++i)
      if (headers[i] == alias) return i;
  }
  return std::nullopt;
}

std::optional<std::int64_t> parse_count(std::string_view s) {
  s = trim(s);
  if (s.empty()) return 0;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc{} && p == s.data() + s.size() && v >= 0) return v;
  // Wide-form exports sometimes carry counts as "3.0".
  double d = 0;
  auto [pd, ecd] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ecd == std::errc{} && pd == s.data() + s.size() && d >= 0 && std::floor(d) == d && d < 9e15)
    return static_cast<std::int64_t>(d);
  return std::nullopt;
}

struct Columns {
  std::optional<std::size_t> project;
  std::size_t commit = 0;
  std::size_t label = 0;
  std::size_t message = 0;
  std::optional<std::size_t> change_type;
  std::optional<std::size_t> count;
  std::vector<std::pair<std::size_t, ChangeType>> wide;
};

Columns resolve_columns(const csv::Row& header) {
  std::vector<std::string> h;
  for (const auto& name : header) h.push_back(normalize_header(name));
  Columns cols;
  auto commit = find_column(h, {"commitid", "commit", "sha", "hash", "commithash", "commitsha", "revision"});
  auto label = find_column(h, {"label", "class", "activity", "maintenanceactivity", "category"});
  auto message = find_column(h, {"message", "comment", "msg", "commitmessage"});
  std::vector<std::string> missing;
  if (!commit) missing.emplace_back("commit_id");
  if (!label) missing.emplace_back("label");
  if (!message) missing.emplace_back("message");
  if (!missing.empty()) {
    std::string what = "labeled dataset is missing column(s):";
    for (auto& m : missing) what += " " + m;
    throw SchemaError(what);
  }
  cols.commit = *commit;
  cols.label = *label;
  cols.message = *message;
  cols.project = find_column(h, {"project", "repo", "repository", "prj"});
  cols.change_type = find_column(h, {"changetype", "type"});
  cols.count = find_column(h, {"count", "frequency", "freq", "n"});
  if (cols.change_type.has_value() != cols.count.has_value())
    throw SchemaError("long-form dataset needs both change_type and count columns");
  if (!cols.change_type) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      for (auto t : all_change_types()) {
        if (h[i] == normalize_header(to_string(t))) {
          cols.wide.emplace_back(i, t);
          break;
        }
      }
    }
  }
  return cols;
}

}  // namespace

LoadResult parse_labeled_dataset(std::string_view csv_text) {
  std::vector<std::size_t> lines;
  auto rows = csv::parse(csv_text, &lines);
  if (rows.empty()) throw SchemaError("labeled dataset is empty (no header row)");
  const Columns cols = resolve_columns(rows[0]);

  LoadResult result;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  const std::size_t width = rows[0].size();

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = lines[r];
    auto reject = [&](std::string message) { result.errors.push_back({line, std::move(message)}); };
    if (row.size() != width) {
      reject("expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()));
      continue;
    }
    auto label = parse_activity(row[cols.label]);
    if (!label) {
      reject("unknown label '" + row[cols.label] + "'");
      continue;
    }
    const std::string commit_id(trim(row[cols.commit]));
    if (commit_id.empty()) {
      reject("empty commit id");
      continue;
    }
    const std::string project = cols.project ? std::string(trim(row[*cols.project])) : std::string();

    ChangeCounts counts{};
    bool bad = false;
    if (cols.change_type) {
      const auto type_text = trim(row[*cols.change_type]);
      auto n = parse_count(row[*cols.count]);
      if (!n) {
        reject("invalid count '" + row[*cols.count] + "'");
        continue;
      }
      if (!type_text.empty()) {
        auto t = parse_change_type(type_text);
        if (!t) {
          reject("unknown change type '" + std::string(type_text) + "'");
          continue;
        }
        counts[index_of(*t)] = *n;
      }
    } else {
      for (const auto& [col, type] : cols.wide) {
        auto n = parse_count(row[col]);
        if (!n) {
          reject("invalid count '" + row[col] + "' for " + std::string(to_string(type)));
          bad = true;
          break;
        }
        counts[index_of(type)] += *n;
      }
      if (bad) continue;
    }

    auto key = std::make_pair(project, commit_id);
    auto it = index.find(key);
    if (it == index.end()) {
      LabeledCommit c;
      c.project = project;
      c.commit_id = commit_id;
      c.label = *label;
      c.message = row[cols.message];
      c.change_counts = counts;
      index.emplace(key, result.commits.size());
      result.commits.push_back(std::move(c));
      continue;
    }
    if (!cols.change_type) {
      reject("duplicate commit " + commit_id);
      continue;
    }
    auto& existing = result.commits[it->second];
    if (existing.label != *label) {
      reject("conflicting label for commit " + commit_id);
      continue;
    }
    for (std::size_t i = 0; i < kChangeTypeCount; ++i) existing.change_counts[i] += counts[i];
  }

  if (result.commits.empty() && !result.errors.empty())
    throw RowErrors("every data row was rejected (" + std::to_string(result.errors.size()) + " errors)",
                    result.errors);
  for (const auto& c : result.commits) ++result.class_counts[index_of(c.label)];
  return result;
}

LoadResult load_labeled_dataset(const std::string& path) { return parse_labeled_dataset(read_file(path)); }

std::string to_long_form(const std::vector<LabeledCommit>& commits) {
  std::string out = csv::format_row({"project", "commit_id", "label", "message", "change_type", "count"});
  for (const auto& c : commits) {
    const std::string label(to_string(c.label));
    bool any = false;
    for (std::size_t i = 0; i < kChangeTypeCount; ++i) {
      if (c.change_counts[i] == 0) continue;
      any = true;
      out += csv::format_row({c.project, c.commit_id, label, c.message, std::string(to_string(change_type_at(i))),
                              std::to_string(c.change_counts[i])});
    }
    if (!any) out += csv::format_row({c.project, c.commit_id, label, c.message, "", ""});
  }
  return out;
}

std::size_t train_count(std::size_t n, double train_fraction) {
  // Guard against products like 0.85 * 500 landing a hair above an integer.
  return std::min(n, static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9)));
}

Split stratified_split(const std::vector<LabeledCommit>& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0))
    throw ArgError("train fraction must be in (0, 1]");
  std::array<std::vector<std::size_t>, kActivityCount> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[index_of(data[i].label)].push_back(i);
  for (int c = 0; c < kActivityCount; ++c)
    if (by_class[c].empty())
      throw StratifyError("class " + std::string(to_string(activity_at(c))) + " has no instances");

  Rng rng(spec.seed);
  std::vector<bool> in_train(data.size(), false);
  for (auto& members : by_class) {
    shuffle(members, rng);
    const std::size_t take = train_count(members.size(), spec.train_fraction);
    for (std::size_t j = 0; j < take; ++j) in_train[members[j]] = true;
  }
  Split split;
  for (std::size_t i = 0; i < data.size(); ++i) (in_train[i] ? split.train : split.test).push_back(data[i]);
  return split;
}

std::string_view to_string(Encoding e) {
  switch (e) {
    case Encoding::Keywords20:
      return "KEYWORDS_20";
    case Encoding::Changes48:
      return "CHANGES_48";
    case Encoding::Combined68:
      return "COMBINED_68";
  }
  return "UNKNOWN";
}

Encoding parse_encoding(std::string_view name) {
  const std::string n = to_upper(trim(name));
  if (n == "KEYWORDS" || n == "KEYWORDS_20" || n == "KW") return Encoding::Keywords20;
  if (n == "CHANGES" || n == "CHANGES_48") return Encoding::Changes48;
  if (n == "COMBINED" || n == "COMBINED_68") return Encoding::Combined68;
  throw ArgError("unknown encoding '" + std::string(name) + "'");
}

Eigen::Index dimension(Encoding e, std::size_t vocabulary_size) {
  const auto kw = static_cast<Eigen::Index>(vocabulary_size);
  const auto ch = static_cast<Eigen::Index>(kChangeTypeCount);
  switch (e) {
    case Encoding::Keywords20:
      return kw;
    case Encoding::Changes48:
      return ch;
    case Encoding::Combined68:
      return kw + ch;
  }
  return 0;
}

Eigen::VectorXd encode(const text::StemSet& stems, const ChangeCounts& counts, Encoding e,
                       const text::Vocabulary& vocabulary) {
  Eigen::VectorXd v(dimension(e, vocabulary.size()));
  Eigen::Index offset = 0;
  if (e != Encoding::Changes48) {
    const auto kw = static_cast<Eigen::Index>(vocabulary.size());
    v.head(kw) = text::keyword_vector(stems, vocabulary);
    offset = kw;
  }
  if (e != Encoding::Keywords20) {
    for (std::size_t i = 0; i < kChangeTypeCount; ++i)
      v(offset + static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]);
  }
  return v;
}

Eigen::VectorXd assemble_features(const LabeledCommit& commit, Encoding e, const text::Vocabulary& vocabulary) {
  return encode(text::normalize(commit.message), commit.change_counts, e, vocabulary);
}

std::vector<std::string> feature_names(Encoding e, const text::Vocabulary& vocabulary) {
  std::vector<std::string> names;
  if (e != Encoding::Changes48) names = vocabulary.stems();
  if (e != Encoding::Keywords20)
    for (auto t : all_change_types()) names.emplace_back(to_string(t));
  return names;
}

FeatureMatrix assemble_matrix(const std::vector<LabeledCommit>& commits, Encoding e,
                              const text::Vocabulary& vocabulary) {
  FeatureMatrix m;
  m.encoding = e;
  m.x.resize(static_cast<Eigen::Index>(commits.size()), dimension(e, vocabulary.size()));
  m.y.resize(static_cast<Eigen::Index>(commits.size()));
  for (std::size_t i = 0; i < commits.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    m.x.row(r) = assemble_features(commits[i], e, vocabulary).transpose();
    m.y(r) = index_of(commits[i].label);
  }
  return m;
}

std::string to_features_jsonl(const std::vector<LabeledCommit>& commits, Encoding e,
                              const text::Vocabulary& vocabulary) {
  std::string out;
  for (const auto& c : commits) {
    const Eigen::VectorXd v = assemble_features(c, e, vocabulary);
    nlohmann::json j;
    j["project"] = c.project;
    j["commit_id"] = c.commit_id;
    j["label"] = std::string(to_string(c.label));
    j["encoding"] = std::string(to_string(e));
    j["features"] = std::vector<double>(v.data(), v.data() + v.size());
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace maintminer::dataset
