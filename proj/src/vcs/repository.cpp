#include <filesystem>

#include "maintminer/log.hpp"
#include "maintminer/parallel.hpp"
#include "maintminer/strings.hpp"
#include "maintminer/vcs.hpp"

namespace maintminer::vcs {

namespace {

bool is_java(std::string_view path) { return path.size() > 5 && path.substr(path.size() - 5) == ".java"; }

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    // Overlong two-byte forms.
    if (len == 2 && c < 0xC2) return false;
    i += len;
  }
  return true;
}

std::string project_name(const std::string& path) {
  auto p = std::filesystem::weakly_canonical(std::filesystem::path(path));
  auto name = p.filename().string();
  if (name.empty()) name = p.parent_path().filename().string();
  if (name.size() > 4 && name.substr(name.size() - 4) == ".git") name.resize(name.size() - 4);
  return name;
}

}  // namespace

std::optional<std::string> decode_text(std::string_view bytes) {
  if (bytes.find('\0') != std::string_view::npos) return std::nullopt;
  if (valid_utf8(bytes)) return std::string(bytes);
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 8);
  for (char ch : bytes) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      out += ch;
    } else {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

namespace {

ProcessResult git(const std::string& repo, std::vector<std::string> args, std::string_view input = {}) {
  args.insert(args.begin(), {"git", "-C", repo, "-c", "core.quotepath=false"});
  return run_process(args, "", input);
}

// Reads blobs through one `git cat-file --batch` process.
std::vector<std::string> read_blobs(const std::string& repo, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  if (ids.empty()) return out;
  std::string request;
  for (const auto& id : ids) request += id + "\n";
  const auto r = git(repo, {"cat-file", "--batch"}, request);
  if (r.exit_code != 0) throw RepoAccessError("git cat-file failed in " + repo + ": " + r.err);
  std::size_t pos = 0;
  for (const auto& id : ids) {
    const auto eol = r.out.find('\n', pos);
    if (eol == std::string::npos) throw RepoAccessError("truncated cat-file output for " + id);
    const auto header = split_whitespace(std::string_view(r.out).substr(pos, eol - pos));
    if (header.size() != 3 || header[1] != "blob") throw RepoAccessError("object " + id + " is not a blob");
    const auto size = static_cast<std::size_t>(std::stoull(header[2]));
    out.push_back(r.out.substr(eol + 1, size));
    pos = eol + 1 + size + 1;
  }
  return out;
}

}  // namespace

Repository::Repository(std::string path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::is_directory(path_, ec)) throw RepoAccessError("not a directory: " + path_);
  const auto r = git(path_, {"rev-parse", "--absolute-git-dir"});
  if (r.exit_code != 0) throw RepoAccessError("not a git repository: " + path_ + ": " + std::string(trim(r.err)));
  git_dir_ = std::string(trim(r.out));
}

std::string Repository::resolve_branch(const std::vector<std::string>& preference) const {
  for (const auto& name : preference)
    for (const auto& ref : {"refs/heads/" + name, "refs/remotes/origin/" + name})
      if (git(path_, {"rev-parse", "--verify", "--quiet", ref + "^{commit}"}).exit_code == 0) return ref;
  std::string names;
  for (const auto& n : preference) names += (names.empty() ? "" : ", ") + n;
  throw BranchNotFound("none of the branches [" + names + "] exists in " + path_);
}

std::vector<CommitRecord> Repository::linearize_history(const std::vector<std::string>& preference,
                                                        const std::string& project) const {
  if (git(path_, {"rev-parse", "--verify", "--quiet", "HEAD"}).exit_code != 0 &&
      trim(git(path_, {"for-each-ref", "--count=1"}).out).empty())
    return {};
  const auto ref = resolve_branch(preference);
  const auto r = git(path_, {"log", "--first-parent", "--reverse", "--encoding=UTF-8",
                             "--format=%H%x1f%an%x1f%ae%x1f%at%x1f%B%x1e", ref});
  if (r.exit_code != 0) throw RepoAccessError("git log failed in " + path_ + ": " + r.err);
  const std::string proj = project.empty() ? project_name(path_) : project;
  std::vector<CommitRecord> out;
  for (const auto& rec : split(r.out, '\x1e')) {
    const auto body = trim(rec);
    if (body.empty()) continue;
    const auto f = split(rec.substr(rec.find_first_not_of("\n")), '\x1f');
    if (f.size() != 5) throw RepoAccessError("unexpected git log record in " + path_);
    CommitRecord c;
    c.commit_id = f[0];
    c.author_name = decode_text(f[1]).value_or("");
    c.author_email = decode_text(f[2]).value_or("");
    c.timestamp = std::stoll(f[3]);
    std::string msg = decode_text(f[4]).value_or("");
    while (!msg.empty() && msg.back() == '\n') msg.pop_back();
    c.message = std::move(msg);
    c.project = proj;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<FilePair> Repository::extract_file_pairs(const std::string& commit_id) const {
  if (commit_id.empty() || commit_id[0] == '-' ||
      git(path_, {"cat-file", "-e", commit_id + "^{commit}"}).exit_code != 0)
    throw CommitNotFound("commit " + commit_id + " not found in " + path_);
  const auto parent = git(path_, {"rev-parse", "--verify", "--quiet", commit_id + "^1"});
  std::vector<std::string> args{"diff-tree", "-r", "-z", "--no-renames", "--no-commit-id"};
  if (parent.exit_code == 0) {
    args.push_back(std::string(trim(parent.out)));
  } else {
    args.push_back("--root");
  }
  args.push_back(commit_id);
  const auto r = git(path_, args);
  if (r.exit_code != 0) throw RepoAccessError("git diff-tree failed for " + commit_id + ": " + r.err);

  struct Entry {
    std::string path, old_id, new_id;
  };
  std::vector<Entry> entries;
  const auto fields = split(r.out, '\0');
  for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
    const auto meta = split_whitespace(fields[i]);
    const std::string& path = fields[i + 1];
    if (meta.size() != 5 || !is_java(path)) continue;
    const std::string& status = meta[4];
    const bool old_blob = meta[0] != ":000000" && meta[0] != ":160000" && status != "A";
    const bool new_blob = meta[1] != "000000" && meta[1] != "160000" && status != "D";
    if (!old_blob && !new_blob) continue;
    entries.push_back({path, old_blob ? meta[2] : "", new_blob ? meta[3] : ""});
  }
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    if (!e.old_id.empty()) ids.push_back(e.old_id);
    if (!e.new_id.empty()) ids.push_back(e.new_id);
  }
  const auto blobs = read_blobs(path_, ids);
  std::vector<FilePair> out;
  std::size_t k = 0;
  for (const auto& e : entries) {
    FilePair p{e.path, std::nullopt, std::nullopt};
    bool ok = true;
    if (!e.old_id.empty()) {
      p.before = decode_text(blobs[k++]);
      ok = ok && p.before.has_value();
    }
    if (!e.new_id.empty()) {
      p.after = decode_text(blobs[k++]);
      ok = ok && p.after.has_value();
    }
    if (!ok) {
      log::warn("harvest: skipping undecodable " + e.path + " in " + commit_id);
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Repository::java_snapshot(const std::string& commit_id) const {
  if (commit_id.empty() || commit_id[0] == '-' ||
      git(path_, {"cat-file", "-e", commit_id + "^{commit}"}).exit_code != 0)
    throw CommitNotFound("commit " + commit_id + " not found in " + path_);
  const auto r = git(path_, {"ls-tree", "-r", "-z", commit_id});
  if (r.exit_code != 0) throw RepoAccessError("git ls-tree failed for " + commit_id + ": " + r.err);
  std::vector<std::string> paths, ids;
  for (const auto& line : split(r.out, '\0')) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const auto meta = split_whitespace(std::string_view(line).substr(0, tab));
    const auto path = line.substr(tab + 1);
    if (meta.size() == 3 && meta[1] == "blob" && is_java(path)) {
      paths.push_back(path);
      ids.push_back(meta[2]);
    }
  }
  const auto blobs = read_blobs(path_, ids);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto text = decode_text(blobs[i]);
    if (!text) {
      log::warn("snapshot: skipping undecodable " + paths[i]);
      continue;
    }
    out.emplace_back(paths[i], std::move(*text));
  }
  return out;
}

std::vector<CommitRecord> harvest(const std::string& repo_path, const HarvestOptions& options) {
  const Repository repo(repo_path);
  auto commits = repo.linearize_history(options.branches, options.project);
  parallel_for(commits.size(), [&](std::size_t i) { commits[i].file_pairs = repo.extract_file_pairs(commits[i].commit_id); });
  return commits;
}

nlohmann::json to_json(const CommitRecord& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : c.file_pairs)
    pairs.push_back({{"path", p.path},
                     {"before", p.before ? nlohmann::json(*p.before) : nlohmann::json(nullptr)},
                     {"after", p.after ? nlohmann::json(*p.after) : nlohmann::json(nullptr)}});
  return {{"commit_id", c.commit_id}, {"author_name", c.author_name}, {"author_email", c.author_email},
          {"timestamp", c.timestamp}, {"message", c.message},         {"project", c.project},
          {"file_pairs", pairs}};
}

CommitRecord commit_from_json(const nlohmann::json& j) {
  CommitRecord c;
  c.commit_id = j.at("commit_id").get<std::string>();
  if (c.commit_id.empty()) throw ArgError("commit record without commit_id");
  c.author_name = j.value("author_name", "");
  c.author_email = j.value("author_email", "");
  c.timestamp = j.value("timestamp", std::int64_t{0});
  c.message = j.value("message", "");
  c.project = j.value("project", "");
  if (j.contains("file_pairs"))
    for (const auto& p : j.at("file_pairs")) {
      FilePair fp;
      fp.path = p.at("path").get<std::string>();
      if (p.contains("before") && !p.at("before").is_null()) fp.before = p.at("before").get<std::string>();
      if (p.contains("after") && !p.at("after").is_null()) fp.after = p.at("after").get<std::string>();
      if (!fp.before && !fp.after) throw ArgError("file pair " + fp.path + " has neither side");
      c.file_pairs.push_back(std::move(fp));
    }
  return c;
}

std::string to_jsonl(const std::vector<CommitRecord>& commits) {
  std::string s;
  for (const auto& c : commits) {
    s += to_json(c).dump();
    s += '\n';
  }
  return s;
}

std::vector<CommitRecord> parse_jsonl(std::string_view text) {
  std::vector<CommitRecord> out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(commit_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ArgError("commit JSONL line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ArgError& e) {
      throw ArgError("commit JSONL line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace maintminer::vcs
