#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maintminer/distiller.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::testing {

struct DistillerFixture {
  std::string name;
  std::optional<std::string> before, after;
  ChangeCounts expected{};
};

inline std::optional<std::string> read_optional(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) return std::nullopt;
  return read_file(p.string());
}

/// Each fixture directory holds before.java and/or after.java plus
/// expected.txt with one "TYPE count" line per change type.
inline std::vector<DistillerFixture> load_distiller_corpus(const std::string& root) {
  std::vector<DistillerFixture> out;
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root))
    if (e.is_directory() && std::filesystem::exists(e.path() / "expected.txt")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    DistillerFixture f;
    f.name = d.filename().string();
    f.before = read_optional(d / "before.java");
    f.after = read_optional(d / "after.java");
    for (const auto& line : resource_lines(read_file((d / "expected.txt").string()))) {
      const auto parts = split_whitespace(line);
      if (parts.size() != 2) throw ArgError(f.name + ": bad expected line '" + line + "'");
      const auto t = parse_change_type(parts[0]);
      if (!t) throw ArgError(f.name + ": unknown change type " + parts[0]);
      f.expected[index_of(*t)] += std::stoll(parts[1]);
    }
    out.push_back(std::move(f));
  }
  return out;
}

inline std::string describe(const ChangeCounts& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) s += std::string(s.size() > 1 ? ", " : "") + std::string(to_string(change_type_at(i))) + ": " +
                   std::to_string(c[i]);
  return s + "}";
}

/// The worked commit: three files distilled as one commit.
inline vcs::CommitRecord worked_commit(const std::string& dir) {
  vcs::CommitRecord c;
  c.commit_id = "1a2b3c";
  c.project = "demo";
  for (const char* f : {"file1", "file2", "file3"})
    c.file_pairs.push_back({std::string(f) + ".java", read_file(dir + "/" + f + ".before.java"),
                            read_file(dir + "/" + f + ".after.java")});
  return c;
}

}  // namespace maintminer::testing
