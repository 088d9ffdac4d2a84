#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maintminer/change_type.hpp"
#include "maintminer/error.hpp"
#include "maintminer/vcs.hpp"

namespace maintminer::distiller {

/// Neither side of a file pair could be parsed.
class DistillError : public Error {
 public:
  DistillError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

using ChangeList = std::vector<ChangeType>;

/// Change types between two revisions of one Java file, in a deterministic
/// order. A missing side is treated as an empty compilation unit. One side
/// failing to parse yields {UNKNOWN}; both failing throws DistillError.
/// Throws ArgError when both sides are missing.
ChangeList distill(const std::optional<std::string>& before, const std::optional<std::string>& after,
                   const std::string& path = "");

ChangeCounts tally(const ChangeList& changes);

struct ChangeRecord {
  std::string commit_id;
  ChangeType change_type = ChangeType::UNKNOWN;
  std::string path;

  bool operator==(const ChangeRecord&) const = default;
};

/// Per-pair distill output in file-pair order, tagged with commit and path.
/// Per-file failures become a single UNKNOWN record for that path.
std::vector<ChangeRecord> distill_commit(const vcs::CommitRecord& commit);

/// `<commitId>#<CHANGE_TYPE>#<path>`, one newline-terminated line per record.
std::string to_pound(const std::vector<ChangeRecord>& records);

/// Reads pound lines; trailing whitespace and blank lines are ignored. The
/// path is everything after the second '#'. Throws ArgError naming the line.
std::vector<ChangeRecord> parse_pound(std::string_view text);

/// One commit's identity plus its change records; the JSONL unit written by
/// `maintminer distill`.
struct CommitChanges {
  std::string commit_id;
  std::string project;
  std::string author_name;
  std::string author_email;
  std::int64_t timestamp = 0;
  std::string message;
  std::vector<ChangeRecord> changes;
  bool touches_java = false;  // some .java file changed, even if only in formatting

  ChangeCounts counts() const;
  bool operator==(const CommitChanges&) const = default;
};

CommitChanges changes_of(const vcs::CommitRecord& commit);

std::string to_changes_jsonl(const std::vector<CommitChanges>& commits);
std::vector<CommitChanges> parse_changes_jsonl(std::string_view text);

}  // namespace maintminer::distiller
