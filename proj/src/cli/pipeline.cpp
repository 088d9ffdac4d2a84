#include "maintminer/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "maintminer/csv.hpp"
#include "maintminer/log.hpp"
#include "maintminer/parallel.hpp"
#include "maintminer/strings.hpp"
#include "maintminer/vcs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace maintminer::cli {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string s = "invalid pipeline config";
  for (const auto& p : problems) s += "\n  " + p;
  return s;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

const std::set<std::string> kKeys{"repos",  "branches", "vocabulary",  "stopwords",      "labeled_dataset",
                                  "model",  "grid",     "split",       "window_days",    "identity_merge",
                                  "output_dir"};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

PipelineConfig PipelineConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
  std::vector<std::string> problems;
  for (const auto& [key, value] : j.items())
    if (!kKeys.count(key)) problems.push_back("unknown key '" + key + "'");
  if (!problems.empty()) throw ConfigError(problems);

  PipelineConfig c;
  try {
    for (const auto& r : j.value("repos", json::array())) c.repos.push_back(resolve(base_dir, r.get<std::string>()));
    if (j.contains("branches")) c.branches = j.at("branches").get<std::vector<std::string>>();
    if (j.contains("vocabulary")) c.vocabulary = resolve(base_dir, j.at("vocabulary").get<std::string>());
    if (j.contains("stopwords")) {
      const auto& s = j.at("stopwords");
      if (s.contains("english")) c.english_stopwords = resolve(base_dir, s.at("english").get<std::string>());
      if (s.contains("custom")) c.custom_stopwords = resolve(base_dir, s.at("custom").get<std::string>());
    }
    c.labeled_dataset = resolve(base_dir, j.value("labeled_dataset", ""));
    if (j.contains("model")) {
      const auto& m = j.at("model");
      if (m.contains("algorithm")) c.model.algorithm = learners::parse_algorithm(m.at("algorithm").get<std::string>());
      if (m.contains("model_kw")) c.model.model_kw = dataset::parse_encoding(m.at("model_kw").get<std::string>());
      if (m.contains("model_nokw"))
        c.model.model_nokw = dataset::parse_encoding(m.at("model_nokw").get<std::string>());
      if (m.contains("hyperparameters")) c.model.hyper = learners::Hyperparameters::from_json(m.at("hyperparameters"));
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid = g.value("enabled", true);
      if (g.contains("algorithms")) {
        c.grid_algorithms.clear();
        for (const auto& a : g.at("algorithms")) c.grid_algorithms.push_back(learners::parse_algorithm(a.get<std::string>()));
      }
      c.cv.folds = g.value("folds", c.cv.folds);
      c.cv.repeats = g.value("repeats", c.cv.repeats);
    }
    if (j.contains("split")) {
      c.train_fraction = j.at("split").value("train_fraction", c.train_fraction);
      c.seed = j.at("split").value("seed", c.seed);
    }
    c.window_days = j.value("window_days", c.window_days);
    if (j.contains("identity_merge")) c.identity_merge = j.at("identity_merge").get<std::map<std::string, std::string>>();
    c.output_dir = resolve(base_dir, j.value("output_dir", ""));
  } catch (const json::exception& e) {
    throw ConfigError({e.what()});
  } catch (const Error& e) {
    throw ConfigError({e.what()});
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return from_json(j, fs::path(path).parent_path().string());
}

json PipelineConfig::to_json() const {
  json stopwords = json::object();
  if (english_stopwords) stopwords["english"] = *english_stopwords;
  if (custom_stopwords) stopwords["custom"] = *custom_stopwords;
  json algorithms = json::array();
  for (auto a : grid_algorithms) algorithms.push_back(learners::to_string(a));
  json j{{"repos", repos},
         {"branches", branches},
         {"stopwords", stopwords},
         {"labeled_dataset", labeled_dataset},
         {"model",
          {{"algorithm", learners::to_string(model.algorithm)},
           {"model_kw", dataset::to_string(model.model_kw)},
           {"model_nokw", dataset::to_string(model.model_nokw)},
           {"hyperparameters", model.hyper.to_json()}}},
         {"grid", {{"enabled", grid}, {"algorithms", algorithms}, {"folds", cv.folds}, {"repeats", cv.repeats}}},
         {"split", {{"train_fraction", train_fraction}, {"seed", seed}}},
         {"window_days", window_days},
         {"identity_merge", identity_merge},
         {"output_dir", output_dir}};
  if (vocabulary) j["vocabulary"] = *vocabulary;
  return j;
}

void PipelineConfig::validate() const {
  std::vector<std::string> problems;
  auto need_file = [&](const std::string& what, const std::string& path) {
    if (path.empty())
      problems.push_back(what + " is not set");
    else if (!fs::is_regular_file(path))
      problems.push_back(what + " not found: " + path);
  };
  if (repos.empty()) problems.push_back("repos is empty");
  for (const auto& r : repos)
    if (!fs::is_directory(r)) problems.push_back("repository not found: " + r);
  if (branches.empty()) problems.push_back("branches is empty");
  if (vocabulary) need_file("vocabulary", *vocabulary);
  if (english_stopwords) need_file("english stopwords", *english_stopwords);
  if (custom_stopwords) need_file("custom stopwords", *custom_stopwords);
  need_file("labeled_dataset", labeled_dataset);
  if (!(train_fraction > 0 && train_fraction < 1)) problems.push_back("split.train_fraction must be in (0, 1)");
  if (window_days <= 0) problems.push_back("window_days must be positive");
  if (grid && grid_algorithms.empty()) problems.push_back("grid.algorithms is empty");
  if (cv.folds < 2) problems.push_back("grid.folds must be at least 2");
  if (cv.repeats < 1) problems.push_back("grid.repeats must be at least 1");
  if (output_dir.empty()) problems.push_back("output_dir is not set");
  if (!problems.empty()) throw ConfigError(problems);
}

text::Vocabulary PipelineConfig::load_vocabulary() const {
  return vocabulary ? text::Vocabulary::from_text(read_file(*vocabulary)) : text::Vocabulary::defaults();
}

text::Stopwords PipelineConfig::load_stopwords() const {
  if (!english_stopwords && !custom_stopwords) return text::Stopwords::defaults();
  auto s = text::Stopwords::defaults();
  if (english_stopwords) s.english = text::Stopwords::from_text(read_file(*english_stopwords), "").english;
  if (custom_stopwords) s.custom = text::Stopwords::from_text("", read_file(*custom_stopwords)).custom;
  return s;
}

DirectoryLock::DirectoryLock(const std::string& dir) {
  fs::create_directories(dir);
  const auto path = (fs::path(dir) / ".maintminer.lock").string();
  fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError(path + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    throw LockError("another pipeline is running on " + dir);
  }
}

DirectoryLock::~DirectoryLock() {
  ::flock(fd_, LOCK_UN);
  ::close(fd_);
}

analytics::ClassifiedCommit classified(const distiller::CommitChanges& commit, Activity activity) {
  analytics::ClassifiedCommit c;
  c.commit_id = commit.commit_id;
  c.project = commit.project;
  c.author_name = commit.author_name;
  c.author_email = commit.author_email;
  c.timestamp = commit.timestamp;
  c.activity = activity;
  c.message = commit.message;
  c.changes = commit.counts();
  c.touches_java = commit.touches_java;
  return c;
}

std::vector<analytics::ClassifiedCommit> classify_commits(const learners::CompoundModel& model,
                                                          const std::vector<distiller::CommitChanges>& commits,
                                                          const text::Stopwords& stopwords) {
  std::vector<analytics::ClassifiedCommit> out(commits.size());
  parallel_for(commits.size(), [&](std::size_t i) {
    out[i] = classified(commits[i], model.classify(commits[i].message, commits[i].counts(), stopwords));
  });
  return out;
}

std::string version_string() {
  return std::string("maintminer ") + MAINTMINER_VERSION + " (change types " +
         fnv1a64_hex(change_type_manifest()) + ")";
}

namespace {

struct Context {
  const PipelineConfig& config;
  fs::path root;
  text::Vocabulary vocabulary;
  text::Stopwords stopwords;
};

struct Stage {
  std::string name;
  std::function<std::string(const Context&)> inputs;  // stage-specific part of the checkpoint key
  std::function<std::vector<std::string>(const Context&, const fs::path&)> run;  // returns written files
};

std::string file_digest(const std::string& path) { return fnv1a64_hex(read_file(path)); }

std::string branch_tips(const PipelineConfig& c) {
  std::string s;
  for (const auto& repo : c.repos) {
    s += repo + '\n';
    for (const auto& b : c.branches)
      for (const auto& ref : {"refs/heads/" + b, "refs/remotes/origin/" + b}) {
        const auto r = vcs::run_process({"git", "-C", repo, "rev-parse", "--verify", "-q", ref});
        if (r.exit_code == 0) s += ref + ' ' + std::string(trim(r.out)) + '\n';
      }
  }
  return s;
}

std::vector<vcs::CommitRecord> read_harvest(const fs::path& root) {
  return vcs::parse_jsonl(read_file((root / "harvest/commits.jsonl").string()));
}

std::vector<distiller::CommitChanges> read_changes(const fs::path& root) {
  return distiller::parse_changes_jsonl(read_file((root / "distill/commits.jsonl").string()));
}

std::vector<analytics::ClassifiedCommit> read_classified(const fs::path& root) {
  return analytics::parse_classified_jsonl(read_file((root / "profile/classified.jsonl").string()));
}

std::vector<std::string> write_all(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::string> out;
  for (const auto& [name, content] : files) {
    const auto path = dir / name;
    fs::create_directories(path.parent_path());
    write_file(path.string(), content);
    out.push_back(name);
  }
  return out;
}

std::vector<std::string> harvest_stage(const Context& ctx, const fs::path& dir) {
  std::vector<vcs::CommitRecord> all;
  for (const auto& repo : ctx.config.repos) {
    auto part = vcs::harvest(repo, {ctx.config.branches, ""});
    log::info("harvest: " + repo + ": " + std::to_string(part.size()) + " commits");
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return write_all(dir, {{"commits.jsonl", vcs::to_jsonl(all)}});
}

std::vector<std::string> distill_stage(const Context& ctx, const fs::path& dir) {
  const auto commits = read_harvest(ctx.root);
  std::vector<distiller::CommitChanges> changes(commits.size());
  parallel_for(commits.size(), [&](std::size_t i) { changes[i] = distiller::changes_of(commits[i]); });
  std::vector<distiller::ChangeRecord> records;
  for (const auto& c : changes) records.insert(records.end(), c.changes.begin(), c.changes.end());
  return write_all(dir, {{"commits.jsonl", distiller::to_changes_jsonl(changes)},
                         {"changes.pound", distiller::to_pound(records)}});
}

std::vector<std::string> featurize_stage(const Context& ctx, const fs::path& dir) {
  const auto commits = read_changes(ctx.root);
  std::vector<std::string> lines(commits.size());
  parallel_for(commits.size(), [&](std::size_t i) {
    const auto& c = commits[i];
    const auto stems = text::normalize(c.message, ctx.stopwords);
    const Eigen::VectorXd f = dataset::encode(stems, c.counts(), dataset::Encoding::Combined68, ctx.vocabulary);
    lines[i] = json{{"commit_id", c.commit_id},
                    {"project", c.project},
                    {"keyword", text::has_keywords(stems, ctx.vocabulary)},
                    {"features", std::vector<double>(f.data(), f.data() + f.size())}}
                   .dump() +
               '\n';
  });
  std::string features, names;
  for (const auto& l : lines) features += l;
  for (const auto& n : dataset::feature_names(dataset::Encoding::Combined68, ctx.vocabulary)) names += n + '\n';
  return write_all(dir, {{"features.jsonl", features}, {"feature_names.txt", names}});
}

json class_counts(const std::vector<dataset::LabeledCommit>& rows) {
  json j{{"corrective", 0}, {"perfective", 0}, {"adaptive", 0}};
  for (const auto& r : rows) j[std::string(to_string(r.label))] = j[std::string(to_string(r.label))].get<int>() + 1;
  return j;
}

std::vector<std::string> train_stage(const Context& ctx, const fs::path& dir) {
  const auto& cfg = ctx.config;
  const auto loaded = dataset::load_labeled_dataset(cfg.labeled_dataset);
  for (const auto& e : loaded.errors)
    log::warn("labeled dataset line " + std::to_string(e.line) + ": " + e.message);
  const auto split = dataset::stratified_split(loaded.commits, {cfg.train_fraction, cfg.seed});
  const auto train = learners::CommitTable::from_commits(split.train, ctx.vocabulary, ctx.stopwords);
  const auto test = learners::CommitTable::from_commits(split.test, ctx.vocabulary, ctx.stopwords);

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("split.json", json{{"total", loaded.commits.size()},
                                        {"rejected_rows", loaded.errors.size()},
                                        {"train", class_counts(split.train)},
                                        {"test", class_counts(split.test)}}
                                       .dump(1) +
                                       '\n');
  if (cfg.grid) {
    const auto report = learners::grid_evaluate(train, test, {cfg.grid_algorithms, cfg.model.hyper, cfg.seed, cfg.cv});
    files.emplace_back("grid.csv", report.render_csv());
    files.emplace_back("grid_test.csv", report.render_test_csv());
    files.emplace_back("resamples.csv", report.render_resamples_csv());
  }
  const auto model = learners::train_compound(
      train, {cfg.model.algorithm, cfg.model.model_kw, cfg.model.model_nokw, cfg.model.hyper, cfg.seed});
  files.emplace_back("model.json", model.to_json().dump() + '\n');
  if (test.rows() > 0) {
    std::vector<Activity> truth;
    for (Eigen::Index i = 0; i < test.rows(); ++i) truth.push_back(activity_at(test.labels(i)));
    const auto m = metrics::confusion(model.classify_table(test), truth);
    const auto s = metrics::summarize(m);
    files.emplace_back("evaluation.txt", metrics::render_table(m, s));
    files.emplace_back("evaluation.csv", metrics::render_csv(m, s));
  }
  return write_all(dir, files);
}

std::vector<std::string> profile_stage(const Context& ctx, const fs::path& dir) {
  const auto& cfg = ctx.config;
  const auto commits = read_changes(ctx.root);
  const auto model = learners::CompoundModel::from_json(json::parse(read_file((ctx.root / "train/model.json").string())));
  const auto lines = split(read_file((ctx.root / "featurize/features.jsonl").string()), '\n');
  std::vector<json> features;
  for (const auto& l : lines)
    if (!trim(l).empty()) features.push_back(json::parse(l));
  if (features.size() != commits.size()) throw Error("features and distilled commits disagree in length");
  const auto width = static_cast<Eigen::Index>(model.vocabulary().size() + kChangeTypeCount);

  std::vector<analytics::ClassifiedCommit> out(commits.size());
  parallel_for(commits.size(), [&](std::size_t i) {
    const auto& f = features[i];
    if (f.at("commit_id").get<std::string>() != commits[i].commit_id)
      throw Error("features out of order at " + commits[i].commit_id);
    const auto v = f.at("features").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != width) throw Error("feature width does not match the model");
    const Eigen::Map<const Eigen::VectorXd> row(v.data(), width);
    out[i] = classified(commits[i], model.classify_row(row, f.at("keyword").get<bool>()));
  });

  const auto developers =
      analytics::aggregate(out, {analytics::Dimension::Developer, cfg.window_days, std::nullopt, cfg.identity_merge});
  const auto projects =
      analytics::aggregate(out, {analytics::Dimension::Project, cfg.window_days, std::nullopt, cfg.identity_merge});
  const auto homogeneity = analytics::detect_homogeneous(out, cfg.identity_merge);
  std::string hcsv = csv::format_row({"scope", "project", "corrective_only", "perfective_only", "adaptive_only",
                                      "heterogeneous", "contributors", "share"});
  for (const auto& [scope, rows] : {std::pair{"all", &homogeneity.all}, std::pair{"java", &homogeneity.java}})
    for (const auto& r : *rows)
      hcsv += csv::format_row({scope, r.project, std::to_string(r.corrective_only), std::to_string(r.perfective_only),
                               std::to_string(r.adaptive_only), std::to_string(r.heterogeneous),
                               std::to_string(r.contributors), r.share_text()});
  const std::string htxt = "# all contributors\n" + analytics::render_homogeneity(homogeneity.all) +
                           "# java contributors\n" + analytics::render_homogeneity(homogeneity.java);
  return write_all(dir, {{"classified.jsonl", analytics::to_classified_jsonl(out)},
                         {"developers.csv", analytics::profiles_csv(developers)},
                         {"projects.csv", analytics::profiles_csv(projects)},
                         {"homogeneity.csv", hcsv},
                         {"homogeneity.txt", htxt}});
}

std::vector<std::string> export_stage(const Context& ctx, const fs::path& dir) {
  const auto& cfg = ctx.config;
  analytics::export_views(read_classified(ctx.root), {cfg.window_days, std::nullopt, cfg.identity_merge, ctx.vocabulary},
                          dir.string());
  return {"bundle.json", "datasets/profiles.csv", "datasets/labeled.csv"};
}

std::string optional_digest(const std::optional<std::string>& path) { return path ? file_digest(*path) : "default"; }

std::vector<Stage> stages() {
  return {
      {"harvest", [](const Context& c) { return json(c.config.repos).dump() + json(c.config.branches).dump() + branch_tips(c.config); },
       harvest_stage},
      {"distill", [](const Context&) { return std::string(fnv1a64_hex(change_type_manifest())); }, distill_stage},
      {"featurize",
       [](const Context& c) {
         return optional_digest(c.config.vocabulary) + optional_digest(c.config.english_stopwords) +
                optional_digest(c.config.custom_stopwords);
       },
       featurize_stage},
      {"train",
       [](const Context& c) {
         auto j = c.config.to_json();
         return file_digest(c.config.labeled_dataset) + j["model"].dump() + j["grid"].dump() + j["split"].dump();
       },
       train_stage},
      {"profile",
       [](const Context& c) { return std::to_string(c.config.window_days) + json(c.config.identity_merge).dump(); },
       profile_stage},
      {"export",
       [](const Context& c) { return std::to_string(c.config.window_days) + json(c.config.identity_merge).dump(); },
       export_stage},
  };
}

bool checkpoint_valid(const fs::path& dir, const std::string& key) {
  const auto path = dir / "checkpoint.json";
  if (!fs::is_regular_file(path)) return false;
  try {
    const auto j = json::parse(read_file(path.string()));
    if (j.at("key").get<std::string>() != key) return false;
    for (const auto& [name, digest] : j.at("outputs").items()) {
      const auto file = dir / name;
      if (!fs::is_regular_file(file) || file_digest(file.string()) != digest.get<std::string>()) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::vector<StageReport> run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
  config.validate();
  DirectoryLock lock(config.output_dir);
  const Context ctx{config, fs::path(config.output_dir), config.load_vocabulary(), config.load_stopwords()};
  std::vector<StageReport> reports;
  std::string key = version_string();
  for (const auto& stage : stages()) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = ctx.root / stage.name;
    try {
      key = fnv1a64_hex(key + '\0' + stage.name + '\0' + stage.inputs(ctx));
      StageReport report{stage.name, StageStatus::Skipped, 0};
      if (options.force || !checkpoint_valid(dir, key)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        json outputs = json::object();
        for (const auto& name : stage.run(ctx, dir)) outputs[name] = file_digest((dir / name).string());
        write_file((dir / "checkpoint.json").string(), json{{"stage", stage.name}, {"key", key}, {"outputs", outputs}}.dump(1) + '\n');
        report.status = StageStatus::Ran;
      }
      // Downstream keys cover this stage's outputs, not just its inputs.
      key = fnv1a64_hex(key + '\0' + json::parse(read_file((dir / "checkpoint.json").string())).at("outputs").dump());
      report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log::info("stage " + stage.name + (report.status == StageStatus::Ran ? " ran" : " skipped"));
      reports.push_back(report);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage.name, e.what());
    }
  }
  return reports;
}

}  // namespace maintminer::cli
