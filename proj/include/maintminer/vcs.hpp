#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "maintminer/error.hpp"

namespace maintminer::vcs {

class RepoAccessError : public Error {
 public:
  using Error::Error;
};

class BranchNotFound : public Error {
 public:
  using Error::Error;
};

class CommitNotFound : public Error {
 public:
  using Error::Error;
};

struct FilePair {
  std::string path;
  std::optional<std::string> before;  // absent for added files
  std::optional<std::string> after;   // absent for deleted files

  bool operator==(const FilePair&) const = default;
};

struct CommitRecord {
  std::string commit_id;
  std::string author_name;
  std::string author_email;
  std::int64_t timestamp = 0;  // UTC seconds
  std::string message;
  std::string project;
  std::vector<FilePair> file_pairs;

  bool operator==(const CommitRecord&) const = default;
};

/// Field names as written to JSONL; missing sides are JSON null.
nlohmann::json to_json(const CommitRecord& c);
CommitRecord commit_from_json(const nlohmann::json& j);

std::string to_jsonl(const std::vector<CommitRecord>& commits);
std::vector<CommitRecord> parse_jsonl(std::string_view text);

struct HarvestOptions {
  std::vector<std::string> branches{"master", "trunk"};
  std::string project;  // defaults to the repository directory name
};

/// Handle on a local repository; all object access goes through the git CLI.
class Repository {
 public:
  /// Throws RepoAccessError unless `path` is a readable git repository.
  explicit Repository(std::string path);

  const std::string& path() const { return path_; }

  /// First entry of `preference` naming an existing local branch.
  std::string resolve_branch(const std::vector<std::string>& preference) const;

  /// First-parent history of the branch, oldest first, without file pairs.
  /// An empty repository (no commits at all) yields an empty list.
  std::vector<CommitRecord> linearize_history(const std::vector<std::string>& preference,
                                              const std::string& project = "") const;

  /// One pair per .java file the commit touches relative to its first parent.
  /// Files whose content is neither UTF-8 nor Latin-1 decodable text are
  /// skipped with a warning.
  std::vector<FilePair> extract_file_pairs(const std::string& commit_id) const;

  /// Paths and contents of every .java file in a commit's tree.
  std::vector<std::pair<std::string, std::string>> java_snapshot(const std::string& commit_id) const;

 private:
  std::string path_;
  std::string git_dir_;
};

/// linearize_history plus file pairs for every commit.
std::vector<CommitRecord> harvest(const std::string& repo_path, const HarvestOptions& options = {});

/// Decodes bytes as UTF-8, else Latin-1 (re-encoded as UTF-8). Returns empty
/// when the content looks binary (contains NUL).
std::optional<std::string> decode_text(std::string_view bytes);

/// Output of a subprocess run without a shell.
struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& cwd = "",
                          std::string_view input = {});

}  // namespace maintminer::vcs
