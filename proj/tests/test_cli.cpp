#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "git_fixture.hpp"
#include "learners_fixtures.hpp"
#include "maintminer/csv.hpp"
#include "maintminer/pipeline.hpp"
#include "maintminer/strings.hpp"

using namespace maintminer;
using namespace maintminer::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path path;
  Scratch() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("mm-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

/// Three commits: a new class, a new method, a bug fix in a statement.
void three_commits(testing::GitFixture& repo) {
  repo.write("src/main/java/Calc.java", "class Calc {\n  int add(int a, int b) { return a + b; }\n}\n");
  repo.commit("add support for calc", 1600000000);
  repo.write("src/main/java/Calc.java",
             "class Calc {\n  int add(int a, int b) { return a + b; }\n  int sub(int a, int b) { return a - b; }\n}\n");
  repo.commit("implement new subtraction feature", 1600000000 + 86400 * 3);
  repo.write("src/main/java/Calc.java",
             "class Calc {\n  int add(int a, int b) { return a + b; }\n  int sub(int a, int b) { return b - a; }\n}\n");
  repo.commit("fix bug in sub", 1600000000 + 86400 * 40);
}

json small_config(const std::string& repo, const std::string& labeled, const std::string& out) {
  return {{"repos", {repo}},
          {"labeled_dataset", labeled},
          {"output_dir", out},
          {"model",
           {{"algorithm", "rf"},
            {"hyperparameters", {{"forest", {{"trees", 15}}}, {"gbm", {{"rounds", 15}}}}}}},
          {"grid", {{"folds", 3}, {"repeats", 1}}},
          {"split", {{"seed", 7}}}};
}

std::map<std::string, std::string> digests(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = fnv1a64_hex(read_file(e.path().string()));
  return out;
}

std::vector<StageStatus> statuses(const std::vector<StageReport>& r) {
  std::vector<StageStatus> s;
  for (const auto& x : r) s.push_back(x.status);
  return s;
}

std::size_t lines_of(const std::string& path) {
  std::size_t n = 0;
  for (const auto& l : split(read_file(path), '\n')) n += !trim(l).empty();
  return n;
}

vcs::ProcessResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), MAINTMINER_BINARY);
  return vcs::run_process(args);
}

}  // namespace

TEST_CASE("config parsing and validation") {
  Scratch s;
  write_file((s.path / "labeled.csv").string(), dataset::to_long_form(testing::signal_commits(5, 1)));
  fs::create_directories(s.path / "repo");
  auto j = small_config("repo", "labeled.csv", "out");
  write_file((s.path / "pipeline.json").string(), j.dump());
  const auto c = PipelineConfig::load((s.path / "pipeline.json").string());
  CHECK(c.repos == std::vector<std::string>{(s.path / "repo").string()});
  CHECK(c.output_dir == (s.path / "out").string());
  CHECK(c.cv.folds == 3);
  CHECK(c.model.hyper.forest.trees == 15);
  CHECK(c.seed == 7);
  CHECK(c.window_days == 28);
  CHECK_NOTHROW(c.validate());
  CHECK(PipelineConfig::from_json(c.to_json()).to_json() == c.to_json());

  SUBCASE("missing vocabulary fails before any work") {
    j["vocabulary"] = "missing-vocab.txt";
    const auto bad = PipelineConfig::from_json(j, s.path.string());
    try {
      run_pipeline(bad);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      REQUIRE(e.problems().size() == 1);
      CHECK(e.problems()[0].find("vocabulary not found") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(s.path / "out"));
  }
  SUBCASE("every problem is reported") {
    j["window_days"] = 0;
    j["split"]["train_fraction"] = 1.5;
    j["repos"] = {"nowhere"};
    try {
      PipelineConfig::from_json(j, s.path.string()).validate();
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.problems().size() == 3);
    }
  }
  SUBCASE("unknown keys and bad values") {
    j["colour"] = "blue";
    CHECK_THROWS_AS(PipelineConfig::from_json(j), ConfigError);
    j.erase("colour");
    j["model"]["algorithm"] = "svm";
    CHECK_THROWS_AS(PipelineConfig::from_json(j), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(json::array()), ConfigError);
  }
}

TEST_CASE("pipeline end to end on a three-commit repository") {
  testing::GitFixture repo;
  three_commits(repo);
  Scratch s;
  const auto labeled = (s.path / "labeled.csv").string();
  write_file(labeled, dataset::to_long_form(testing::signal_commits(30, 3)));
  const auto out = s.path / "out";
  auto config = PipelineConfig::from_json(small_config(repo.path(), labeled, out.string()));

  const auto first = run_pipeline(config);
  REQUIRE(first.size() == kStages.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].stage == kStages[i]);
    CHECK(first[i].status == StageStatus::Ran);
  }
  for (const char* f : {"harvest/commits.jsonl", "distill/commits.jsonl", "distill/changes.pound",
                        "featurize/features.jsonl", "featurize/feature_names.txt", "train/split.json", "train/grid.csv",
                        "train/grid_test.csv", "train/resamples.csv", "train/model.json", "train/evaluation.txt",
                        "profile/classified.jsonl", "profile/developers.csv", "profile/projects.csv",
                        "profile/homogeneity.txt", "export/bundle.json", "export/datasets/profiles.csv",
                        "export/datasets/labeled.csv"})
    CHECK_MESSAGE(fs::is_regular_file(out / f), f);

  const auto grid = csv::parse(read_file((out / "train/grid.csv").string()));
  CHECK(grid.size() == 1 + 27);
  CHECK(lines_of((out / "harvest/commits.jsonl").string()) == 3);
  CHECK(lines_of((out / "profile/classified.jsonl").string()) == 3);
  CHECK(csv::parse(read_file((out / "train/grid_test.csv").string())).size() == 1 + 3);

  const auto pound = distiller::parse_pound(read_file((out / "distill/changes.pound").string()));
  std::map<ChangeType, int> kinds;
  for (const auto& r : pound) ++kinds[r.change_type];
  CHECK(kinds[ChangeType::ADDITIONAL_CLASS] == 1);
  CHECK(kinds[ChangeType::ADDITIONAL_FUNCTIONALITY] == 1);
  CHECK(kinds[ChangeType::STATEMENT_UPDATE] == 1);

  const auto bundle = json::parse(read_file((out / "export/bundle.json").string()));
  CHECK(bundle["commit_count"] == 3);
  CHECK(bundle["window_days"] == 28);

  // The feature-file route used by the pipeline agrees with classifying messages directly.
  const auto model =
      learners::CompoundModel::from_json(json::parse(read_file((out / "train/model.json").string())));
  const auto direct = classify_commits(model, distiller::parse_changes_jsonl(read_file((out / "distill/commits.jsonl").string())),
                                       text::Stopwords::defaults());
  CHECK(direct == analytics::parse_classified_jsonl(read_file((out / "profile/classified.jsonl").string())));

  const auto before = digests(out);
  SUBCASE("re-run skips everything and changes nothing") {
    const auto again = run_pipeline(config);
    CHECK(statuses(again) == std::vector<StageStatus>(kStages.size(), StageStatus::Skipped));
    CHECK(digests(out) == before);
  }
  SUBCASE("forced re-run recomputes identical artifacts") {
    CHECK(statuses(run_pipeline(config, {true})) == std::vector<StageStatus>(kStages.size(), StageStatus::Ran));
    CHECK(digests(out) == before);
  }
  SUBCASE("a window change reruns only the stages that use it") {
    config.window_days = 7;
    const auto r = statuses(run_pipeline(config));
    CHECK(r == std::vector<StageStatus>{StageStatus::Skipped, StageStatus::Skipped, StageStatus::Skipped,
                                        StageStatus::Skipped, StageStatus::Ran, StageStatus::Ran});
    CHECK(json::parse(read_file((out / "export/bundle.json").string()))["window_days"] == 7);
  }
  SUBCASE("a damaged output reruns its stage; identical results keep downstream checkpoints") {
    fs::remove(out / "train/model.json");
    const auto r = statuses(run_pipeline(config));
    CHECK(r == std::vector<StageStatus>{StageStatus::Skipped, StageStatus::Skipped, StageStatus::Skipped,
                                        StageStatus::Ran, StageStatus::Skipped, StageStatus::Skipped});
    CHECK(digests(out) == before);
  }
  SUBCASE("a new commit reruns from harvest") {
    repo.write("src/main/java/Calc.java", "class Calc {\n  int add(int a, int b) { return a + b; }\n}\n");
    repo.commit("remove unused sub", 1600000000 + 86400 * 50);
    CHECK(run_pipeline(config).front().status == StageStatus::Ran);
    CHECK(lines_of((out / "profile/classified.jsonl").string()) == 4);
  }
  SUBCASE("one pipeline per output directory") {
    DirectoryLock held(out.string());
    CHECK_THROWS_AS(run_pipeline(config), LockError);
  }
}

TEST_CASE("stage failure names the stage") {
  Scratch s;
  const auto labeled = (s.path / "labeled.csv").string();
  write_file(labeled, dataset::to_long_form(testing::signal_commits(10, 3)));
  fs::create_directories(s.path / "not-a-repo");
  const auto config =
      PipelineConfig::from_json(small_config((s.path / "not-a-repo").string(), labeled, (s.path / "out").string()));
  try {
    run_pipeline(config);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "harvest");
  }
  write_file((s.path / "bad.json").string(),
             small_config((s.path / "not-a-repo").string(), labeled, (s.path / "out").string()).dump());
  const auto r = run_cli({"run", "--config", (s.path / "bad.json").string()});
  CHECK(r.exit_code == 10);
  CHECK(r.err.find("stage harvest failed") != std::string::npos);
}

TEST_CASE("command-line interface") {
  const auto version = run_cli({"--version"});
  CHECK(version.exit_code == 0);
  CHECK(version.out.find(fnv1a64_hex(change_type_manifest())) != std::string::npos);
  CHECK(version.out == version_string() + "\n");

  const auto help = run_cli({"--help"});
  CHECK(help.exit_code == 0);
  for (const char* sub : {"harvest", "distill", "featurize", "dataset", "train", "classify", "profile", "glm", "export",
                          "serve"})
    CHECK_MESSAGE(help.out.find(sub) != std::string::npos, sub);
  CHECK(run_cli({"bogus"}).exit_code != 0);
  CHECK(run_cli({}).exit_code != 0);

  const std::string pair = MAINTMINER_FIXTURES "/distiller/02_parameter_insert/";
  const auto d = run_cli({"distill", "--before", pair + "before.java", "--after", pair + "after.java"});
  CHECK(d.exit_code == 0);
  CHECK(d.out == "PARAMETER_INSERT 1\n");

  Scratch s;
  const auto labeled = (s.path / "labeled.csv").string();
  write_file(labeled, dataset::to_long_form(testing::signal_commits(20, 5)));
  const auto ds = run_cli({"dataset", "--in", labeled, "--out-dir", s.path.string()});
  CHECK(ds.exit_code == 0);
  CHECK(ds.out == "fold,corrective,perfective,adaptive,total\nall,20,20,20,60\ntrain,17,17,17,51\ntest,3,3,3,9\n");

  const auto model = (s.path / "model.json").string();
  const auto t = run_cli({"train", "--train", (s.path / "train.csv").string(), "--test", (s.path / "test.csv").string(),
                          "-a", "j48", "-o", model});
  CHECK(t.exit_code == 0);
  CHECK(t.out.find("Accuracy") != std::string::npos);
  const auto c = run_cli({"classify", "-m", model, "--message", "fix bug in parser", "--changes", "STATEMENT_UPDATE=2"});
  CHECK(c.exit_code == 0);
  CHECK(c.out == "corrective\n");

  // Missing vocabulary in a config: validation error, nothing written.
  write_file((s.path / "cfg.json").string(),
             json{{"repos", {s.path.string()}},
                  {"labeled_dataset", labeled},
                  {"vocabulary", "nope.txt"},
                  {"output_dir", "out"}}
                 .dump());
  const auto v = run_cli({"run", "--config", (s.path / "cfg.json").string()});
  CHECK(v.exit_code == 3);
  CHECK(v.err.find("vocabulary not found") != std::string::npos);
  CHECK_FALSE(fs::exists(s.path / "out"));
}
