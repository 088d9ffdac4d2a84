#include <cctype>

#include "maintminer/distiller.hpp"
#include "maintminer/log.hpp"
#include "maintminer/strings.hpp"

namespace maintminer::distiller {

std::vector<ChangeRecord> distill_commit(const vcs::CommitRecord& commit) {
  std::vector<ChangeRecord> out;
  for (const auto& pair : commit.file_pairs) {
    ChangeList changes;
    try {
      changes = distill(pair.before, pair.after, pair.path);
    } catch (const Error& e) {
      log::warn(std::string("distill_commit ") + commit.commit_id + ": " + e.what());
      changes = {ChangeType::UNKNOWN};
    }
    for (auto t : changes) out.push_back({commit.commit_id, t, pair.path});
  }
  return out;
}

std::string to_pound(const std::vector<ChangeRecord>& records) {
  std::string s;
  for (const auto& r : records) {
    s += r.commit_id;
    s += '#';
    s += to_string(r.change_type);
    s += '#';
    s += r.path;
    s += '\n';
  }
  return s;
}

std::vector<ChangeRecord> parse_pound(std::string_view text) {
  std::vector<ChangeRecord> out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto first = line.find('#');
    const auto second = first == std::string_view::npos ? first : line.find('#', first + 1);
    if (second == std::string_view::npos)
      throw ArgError("pound record line " + std::to_string(line_no) + ": expected <commit>#<TYPE>#<path>");
    auto type = parse_change_type(line.substr(first + 1, second - first - 1));
    if (!type)
      throw ArgError("pound record line " + std::to_string(line_no) + ": unknown change type '" +
                     std::string(line.substr(first + 1, second - first - 1)) + "'");
    if (first == 0 || second + 1 >= line.size())
      throw ArgError("pound record line " + std::to_string(line_no) + ": empty commit id or path");
    out.push_back({std::string(line.substr(0, first)), *type, std::string(line.substr(second + 1))});
  }
  return out;
}

ChangeCounts CommitChanges::counts() const {
  ChangeCounts c{};
  for (const auto& r : changes) ++c[index_of(r.change_type)];
  return c;
}

CommitChanges changes_of(const vcs::CommitRecord& commit) {
  return {commit.commit_id, commit.project,   commit.author_name, commit.author_email,
          commit.timestamp, commit.message, distill_commit(commit), !commit.file_pairs.empty()};
}

std::string to_changes_jsonl(const std::vector<CommitChanges>& commits) {
  std::string s;
  for (const auto& c : commits) {
    nlohmann::json changes = nlohmann::json::array();
    for (const auto& r : c.changes) changes.push_back({{"change_type", to_string(r.change_type)}, {"path", r.path}});
    nlohmann::json j{{"commit_id", c.commit_id},       {"project", c.project},     {"author_name", c.author_name},
                     {"author_email", c.author_email}, {"timestamp", c.timestamp}, {"message", c.message},
                     {"changes", changes},             {"touches_java", c.touches_java}};
    s += j.dump();
    s += '\n';
  }
  return s;
}

std::vector<CommitChanges> parse_changes_jsonl(std::string_view text) {
  std::vector<CommitChanges> out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CommitChanges c;
      c.commit_id = j.at("commit_id").get<std::string>();
      c.project = j.value("project", "");
      c.author_name = j.value("author_name", "");
      c.author_email = j.value("author_email", "");
      c.timestamp = j.value("timestamp", std::int64_t{0});
      c.message = j.value("message", "");
      c.touches_java = j.value("touches_java", !j.at("changes").empty());
      for (const auto& r : j.at("changes")) {
        const auto name = r.at("change_type").get<std::string>();
        auto type = parse_change_type(name);
        if (!type) throw ArgError("unknown change type '" + name + "'");
        c.changes.push_back({c.commit_id, *type, r.at("path").get<std::string>()});
      }
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ArgError("changes JSONL line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ArgError& e) {
      throw ArgError("changes JSONL line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace maintminer::distiller
