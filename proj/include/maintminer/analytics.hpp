#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "maintminer/activity.hpp"
#include "maintminer/change_type.hpp"
#include "maintminer/distiller.hpp"
#include "maintminer/text.hpp"

namespace maintminer::analytics {

/// commit_id -> change-type counts; ordered for deterministic output.
using CommitFrequencies = std::map<std::string, ChangeCounts>;

CommitFrequencies per_commit_frequencies(const std::vector<distiller::ChangeRecord>& records);

/// Count-sum merge of partial results.
void merge_into(CommitFrequencies& into, const CommitFrequencies& part);

/// Splits the records into `parts` contiguous chunks, counts them in parallel
/// and merges the partials.
CommitFrequencies parallel_frequencies(const std::vector<distiller::ChangeRecord>& records, std::size_t parts);

using ActivityCounts = std::array<std::int64_t, kActivityCount>;  // indexed by index_of(Activity)

std::int64_t total(const ActivityCounts& c);

struct ClassifiedCommit {
  std::string commit_id;
  std::string project;
  std::string author_name;
  std::string author_email;
  std::int64_t timestamp = 0;
  Activity activity = Activity::Corrective;
  std::string message;
  ChangeCounts changes{};
  bool touches_java = true;

  bool operator==(const ClassifiedCommit&) const = default;
};

nlohmann::json to_json(const ClassifiedCommit& c);
ClassifiedCommit classified_from_json(const nlohmann::json& j);
std::string to_classified_jsonl(const std::vector<ClassifiedCommit>& commits);
std::vector<ClassifiedCommit> parse_classified_jsonl(std::string_view text);

enum class Dimension { Developer, Project, Window };

std::string_view to_string(Dimension d);
Dimension parse_dimension(std::string_view name);

/// Half-open [from, to) in UTC seconds.
struct DateRange {
  std::int64_t from = 0;
  std::int64_t to = 0;
};

/// Smallest range starting at UTC midnight that covers every commit.
DateRange covering_range(const std::vector<ClassifiedCommit>& commits);

struct AggregateOptions {
  Dimension dimension = Dimension::Project;
  /// Required for Dimension::Window (global windows); with Developer or
  /// Project it windows each entity's profile.
  std::optional<int> window_days;
  /// Defaults to covering_range of the input. Commits outside are dropped.
  std::optional<DateRange> range;
  /// Alias email -> canonical email applied before developer keying.
  std::map<std::string, std::string> identity_merge;
};

struct ActivityProfile {
  std::string project;          // empty for global windows
  std::string developer_email;  // empty unless keyed by developer
  std::string developer_name;   // most frequent name under the email
  std::optional<std::int64_t> window_start;
  std::optional<int> window_days;
  ActivityCounts counts{};

  bool operator==(const ActivityProfile&) const = default;
};

/// Profiles sorted by (project, email, window_start). Throws ArgError for an
/// inverted range or a non-positive window.
std::vector<ActivityProfile> aggregate(const std::vector<ClassifiedCommit>& commits, const AggregateOptions& options);

struct HomogeneityRow {
  std::string project;
  std::int64_t corrective_only = 0;
  std::int64_t perfective_only = 0;
  std::int64_t adaptive_only = 0;
  std::int64_t heterogeneous = 0;
  std::int64_t contributors = 0;

  std::int64_t homogeneous() const { return corrective_only + perfective_only + adaptive_only; }
  /// floor(100 * homogeneous / contributors).
  int share_percent() const;
  /// Cell text: "41%", or "<1%" when the truncated share is 0
  /// but some contributor is homogeneous.
  std::string share_text() const;
};

/// Developers are keyed by email within a project. `all` counts every
/// contributor; `java` only those with a Java-touching commit, judged on
/// those commits alone.
struct HomogeneityReport {
  std::vector<HomogeneityRow> all;
  std::vector<HomogeneityRow> java;
};

HomogeneityReport detect_homogeneous(const std::vector<ClassifiedCommit>& commits,
                                     const std::map<std::string, std::string>& identity_merge = {});

/// "Project & c & p & a & share & total" rows, one per line.
std::string render_homogeneity(const std::vector<HomogeneityRow>& rows);

struct TestCounts {
  std::int64_t test_methods = 0;
  std::int64_t test_classes = 0;

  bool operator==(const TestCounts&) const = default;
};

/// JUnit heuristics over (path, source) pairs: a method is a test if it
/// carries a @Test annotation, or is named test* in a class under src/test
/// or named *Test / Test*. Unparseable files are skipped with a warning.
TestCounts count_tests(const std::vector<std::pair<std::string, std::string>>& snapshot);

struct BundleOptions {
  int window_days = 28;
  std::optional<DateRange> range;
  std::map<std::string, std::string> identity_merge;
  text::Vocabulary vocabulary = text::Vocabulary::defaults();
};

inline constexpr int kBundleSchemaVersion = 1;

/// Explorer bundle: per-day counts per (project, developer), default-window
/// series per project and developer, homogeneity tables, keyword and
/// change-type frequency tables.
nlohmann::json build_bundle(const std::vector<ClassifiedCommit>& commits, const BundleOptions& options);

/// `project,developer_email,window_start,window_days,corrective,perfective,adaptive`
std::string profiles_csv(const std::vector<ActivityProfile>& profiles);

/// One row per classified commit.
std::string labeled_csv(const std::vector<ClassifiedCommit>& commits);

/// Writes bundle.json, datasets/profiles.csv and datasets/labeled.csv under
/// `destination`, creating it. Throws IoError naming the failing path.
void export_views(const std::vector<ClassifiedCommit>& commits, const BundleOptions& options,
                  const std::string& destination);

/// Windowed series for one project (or every project when empty) re-bucketed
/// from a bundle's per-day data; the payload of GET /api/profiles.
nlohmann::json bundle_profiles(const nlohmann::json& bundle, const std::string& project, int window_days,
                               const std::string& developer = "");

}  // namespace maintminer::analytics
