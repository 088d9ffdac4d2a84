#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "maintminer/analytics.hpp"
#include "maintminer/compound.hpp"
#include "maintminer/csv.hpp"
#include "maintminer/dataset.hpp"
#include "maintminer/distiller.hpp"
#include "maintminer/glm.hpp"
#include "maintminer/log.hpp"
#include "maintminer/parallel.hpp"
#include "maintminer/pipeline.hpp"
#include "maintminer/server.hpp"
#include "maintminer/strings.hpp"
#include "maintminer/vcs.hpp"

using namespace maintminer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 3, kLocked = 4, kServe = 5, kStage = 10 };

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  write_file(path, content);
}

text::Vocabulary vocabulary_from(const std::string& path) {
  return path.empty() ? text::Vocabulary::defaults() : text::Vocabulary::from_text(read_file(path));
}

std::map<std::string, std::string> merge_map(const std::vector<std::string>& pairs) {
  std::map<std::string, std::string> out;
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size())
      throw ArgError("--merge expects alias=canonical, got '" + p + "'");
    out[p.substr(0, eq)] = p.substr(eq + 1);
  }
  return out;
}

/// "TYPE=n,TYPE=n"
ChangeCounts counts_from(const std::string& spec) {
  ChangeCounts c{};
  for (const auto& item : split(spec, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    const auto name = std::string(trim(item.substr(0, eq)));
    const auto type = parse_change_type(name);
    if (!type) throw ArgError("unknown change type '" + name + "'");
    c[index_of(*type)] += eq == std::string::npos ? 1 : std::stoll(item.substr(eq + 1));
  }
  return c;
}

std::string counts_text(const ChangeCounts& c) {
  std::string s;
  for (std::size_t i = 0; i < kChangeTypeCount; ++i)
    if (c[i]) s += std::string(to_string(change_type_at(i))) + ' ' + std::to_string(c[i]) + '\n';
  return s;
}

std::vector<dataset::LabeledCommit> load_labeled(const std::string& path) {
  auto loaded = dataset::load_labeled_dataset(path);
  for (const auto& e : loaded.errors) log::warn(path + ": line " + std::to_string(e.line) + ": " + e.message);
  return std::move(loaded.commits);
}

struct Harvest {
  std::vector<std::string> repos, branches{"master", "trunk"};
  std::string project, out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("harvest", "Linearize first-parent history and extract .java file pairs");
    c->add_option("--repo", repos, "Repository path (repeatable)")->required();
    c->add_option("--branch", branches, "Branch preference, first existing wins")->capture_default_str();
    c->add_option("--project", project, "Project name (default: repository directory name)");
    c->add_option("-o,--out", out, "Commits JSONL ('-' for stdout)")->capture_default_str();
    c->callback([this] {
      std::vector<vcs::CommitRecord> all;
      for (const auto& r : repos) {
        auto part = vcs::harvest(r, {branches, project});
        all.insert(all.end(), part.begin(), part.end());
      }
      emit(out, vcs::to_jsonl(all));
    });
  }
};

struct Distill {
  std::string in, out, pound, before, after;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("distill", "Classify source changes into change types");
    c->add_option("-i,--in", in, "Commits JSONL from harvest");
    c->add_option("-o,--out", out, "Per-commit changes JSONL ('-' for stdout)")->capture_default_str();
    c->add_option("--pound", pound, "Also write <commit>#<TYPE>#<path> lines here");
    c->add_option("--before", before, "Single-pair mode: old revision of a file");
    c->add_option("--after", after, "Single-pair mode: new revision of a file");
    c->callback([this] {
      if (!before.empty() || !after.empty()) {
        std::optional<std::string> a, b;
        if (!before.empty()) a = read_file(before);
        if (!after.empty()) b = read_file(after);
        emit(out, counts_text(distiller::tally(distiller::distill(a, b, after.empty() ? before : after))));
        return;
      }
      if (in.empty()) throw ArgError("distill needs --in or --before/--after");
      const auto commits = vcs::parse_jsonl(read_file(in));
      std::vector<distiller::CommitChanges> changes(commits.size());
      parallel_for(commits.size(), [&](std::size_t i) { changes[i] = distiller::changes_of(commits[i]); });
      if (!pound.empty()) {
        std::vector<distiller::ChangeRecord> records;
        for (const auto& c : changes) records.insert(records.end(), c.changes.begin(), c.changes.end());
        emit(pound, distiller::to_pound(records));
      }
      emit(out, distiller::to_changes_jsonl(changes));
    });
  }
};

struct Featurize {
  std::string in, out, encoding = "combined", vocabulary;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("featurize", "Encode commits as keyword / change-type feature vectors");
    c->add_option("-i,--in", in, "Labeled dataset CSV or changes JSONL")->required();
    c->add_option("-e,--encoding", encoding, "keywords, changes or combined")->capture_default_str();
    c->add_option("--vocabulary", vocabulary, "Stem vocabulary file (default: shipped 20 stems)");
    c->add_option("-o,--out", out, "Features JSONL ('-' for stdout)")->capture_default_str();
    c->callback([this] {
      const auto e = dataset::parse_encoding(encoding);
      const auto vocab = vocabulary_from(vocabulary);
      if (fs::path(in).extension() == ".csv") return emit(out, dataset::to_features_jsonl(load_labeled(in), e, vocab));
      std::string s;
      for (const auto& commit : distiller::parse_changes_jsonl(read_file(in))) {
        dataset::LabeledCommit lc{commit.project, commit.commit_id, Activity::Corrective, commit.message, commit.counts()};
        const auto f = dataset::assemble_features(lc, e, vocab);
        s += json{{"project", lc.project},
                  {"commit_id", lc.commit_id},
                  {"encoding", dataset::to_string(e)},
                  {"features", std::vector<double>(f.data(), f.data() + f.size())}}
                 .dump() +
             '\n';
      }
      emit(out, s);
    });
  }
};

struct Dataset {
  std::string in, out_dir;
  double fraction = 0.85;
  std::uint64_t seed = 42;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("dataset", "Load a labeled dataset and make the stratified split");
    c->add_option("-i,--in", in, "Labeled dataset CSV (long or wide form)")->required()->check(CLI::ExistingFile);
    c->add_option("--train-fraction", fraction, "Share of each class that goes to training")->capture_default_str();
    c->add_option("--seed", seed, "Split seed")->capture_default_str();
    c->add_option("--out-dir", out_dir, "Write train.csv and test.csv (long form) here");
    c->callback([this] {
      const auto commits = load_labeled(in);
      const auto split = dataset::stratified_split(commits, {fraction, seed});
      auto row = [](const std::string& name, const std::vector<dataset::LabeledCommit>& v) {
        std::array<int, kActivityCount> n{};
        for (const auto& c : v) ++n[index_of(c.label)];
        return csv::format_row({name, std::to_string(n[index_of(Activity::Corrective)]),
                                std::to_string(n[index_of(Activity::Perfective)]),
                                std::to_string(n[index_of(Activity::Adaptive)]), std::to_string(v.size())});
      };
      std::cout << csv::format_row({"fold", "corrective", "perfective", "adaptive", "total"}) << row("all", commits)
                << row("train", split.train) << row("test", split.test);
      if (!out_dir.empty()) {
        emit((fs::path(out_dir) / "train.csv").string(), dataset::to_long_form(split.train));
        emit((fs::path(out_dir) / "test.csv").string(), dataset::to_long_form(split.test));
      }
    });
  }
};

struct Train {
  std::string train, test, out = "model.json", algorithm = "rf", model_kw = "keywords", model_nokw = "combined";
  std::string hyper_file, vocabulary, grid_dir, importance;
  std::uint64_t seed = 42;
  int folds = 10, repeats = 5;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train", "Train a compound model, optionally evaluating the full grid");
    c->add_option("--train", train, "Training CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--test", test, "Held-out CSV")->check(CLI::ExistingFile);
    c->add_option("-a,--algorithm", algorithm, "j48, rf, gbm or majority")->capture_default_str();
    c->add_option("--model-kw", model_kw, "Encoding for messages with keywords")->capture_default_str();
    c->add_option("--model-nokw", model_nokw, "Encoding for messages without keywords")->capture_default_str();
    c->add_option("--hyperparameters", hyper_file, "JSON file with tree/forest/gbm settings")->check(CLI::ExistingFile);
    c->add_option("--vocabulary", vocabulary, "Stem vocabulary file");
    c->add_option("--seed", seed, "Training seed")->capture_default_str();
    c->add_option("-o,--out", out, "Model JSON")->capture_default_str();
    c->add_option("--grid", grid_dir, "Run the 27-cell grid and write grid.csv, grid_test.csv, resamples.csv here");
    c->add_option("--folds", folds, "CV folds for --grid")->capture_default_str();
    c->add_option("--repeats", repeats, "CV repeats for --grid")->capture_default_str();
    c->add_option("--importance", importance, "Write forest variable importance of the non-keyword model (CSV)");
    c->callback([this] {
      const auto vocab = vocabulary_from(vocabulary);
      learners::Hyperparameters hyper;
      if (!hyper_file.empty()) hyper = learners::Hyperparameters::from_json(json::parse(read_file(hyper_file)));
      const auto train_table = learners::CommitTable::from_commits(load_labeled(train), vocab);
      std::optional<learners::CommitTable> test_table;
      if (!test.empty()) test_table = learners::CommitTable::from_commits(load_labeled(test), vocab);
      const learners::CompoundSpec spec{learners::parse_algorithm(algorithm), dataset::parse_encoding(model_kw),
                                        dataset::parse_encoding(model_nokw), hyper, seed};
      if (!grid_dir.empty()) {
        if (!test_table) throw ArgError("--grid needs --test");
        learners::GridOptions options;
        options.hyper = hyper;
        options.seed = seed;
        options.cv = {folds, repeats};
        const auto report = learners::grid_evaluate(train_table, *test_table, options);
        emit((fs::path(grid_dir) / "grid.csv").string(), report.render_csv());
        emit((fs::path(grid_dir) / "grid_test.csv").string(), report.render_test_csv());
        emit((fs::path(grid_dir) / "resamples.csv").string(), report.render_resamples_csv());
      }
      const auto model = learners::train_compound(train_table, spec);
      emit(out, model.to_json().dump() + '\n');
      if (test_table) {
        std::vector<Activity> truth;
        for (Eigen::Index i = 0; i < test_table->rows(); ++i) truth.push_back(activity_at(test_table->labels(i)));
        const auto m = metrics::confusion(model.classify_table(*test_table), truth);
        std::cout << metrics::render_table(m, metrics::summarize(m));
      }
      if (!importance.empty()) {
        const auto& comp = model.model_nokw();
        if (comp.algorithm() != learners::Algorithm::Forest) throw ArgError("--importance needs a forest model");
        const auto imp = learners::variable_importance(comp, train_table.slice(comp.encoding()), train_table.labels,
                                                       dataset::feature_names(comp.encoding(), vocab), seed);
        std::string s = csv::format_row({"feature", "adaptive", "corrective", "perfective"});
        for (auto r : imp.order)
          s += csv::format_row({imp.features[r], std::to_string(imp.scores(r, 0)), std::to_string(imp.scores(r, 1)),
                                std::to_string(imp.scores(r, 2))});
        emit(importance, s);
      }
    });
  }
};

struct Classify {
  std::string model, in, out, message, changes;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("classify", "Label commits with a trained compound model");
    c->add_option("-m,--model", model, "Model JSON from train")->required()->check(CLI::ExistingFile);
    c->add_option("-i,--in", in, "Changes JSONL from distill");
    c->add_option("-o,--out", out, "Classified commits JSONL ('-' for stdout)")->capture_default_str();
    c->add_option("--message", message, "Classify one message instead of a file");
    c->add_option("--changes", changes, "Change counts for --message, e.g. STATEMENT_UPDATE=2,DOC_INSERT=1");
    c->callback([this] {
      const auto m = learners::CompoundModel::from_json(json::parse(read_file(model)));
      if (in.empty()) {
        std::cout << to_string(m.classify(message, counts_from(changes))) << '\n';
        return;
      }
      emit(out, analytics::to_classified_jsonl(
                    cli::classify_commits(m, distiller::parse_changes_jsonl(read_file(in)), text::Stopwords::defaults())));
    });
  }
};

struct Profile {
  std::string in, out, dimension = "developer", from, to;
  std::optional<int> window;
  std::vector<std::string> merge;
  bool homogeneity = false, java = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("profile", "Aggregate classified commits into activity profiles");
    c->add_option("-i,--in", in, "Classified commits JSONL")->required()->check(CLI::ExistingFile);
    c->add_option("-d,--dimension", dimension, "developer, project or window")->capture_default_str();
    c->add_option("-w,--window", window, "Window length in days");
    c->add_option("--from", from, "Range start, YYYY-MM-DD (inclusive)");
    c->add_option("--to", to, "Range end, YYYY-MM-DD (exclusive)");
    c->add_option("--merge", merge, "Identity merge alias=canonical email (repeatable)");
    c->add_flag("--homogeneity", homogeneity, "Print the homogeneous-profile table instead");
    c->add_flag("--java", java, "With --homogeneity: count Java contributors only");
    c->add_option("-o,--out", out, "Profiles CSV ('-' for stdout)")->capture_default_str();
    c->callback([this] {
      const auto commits = analytics::parse_classified_jsonl(read_file(in));
      const auto identity = merge_map(merge);
      if (homogeneity) {
        const auto r = analytics::detect_homogeneous(commits, identity);
        return emit(out, analytics::render_homogeneity(java ? r.java : r.all));
      }
      analytics::AggregateOptions o{analytics::parse_dimension(dimension), window, std::nullopt, identity};
      if (!from.empty() || !to.empty()) {
        auto range = analytics::covering_range(commits);
        if (!from.empty()) range.from = parse_date(from);
        if (!to.empty()) range.to = parse_date(to);
        o.range = range;
      }
      emit(out, analytics::profiles_csv(analytics::aggregate(commits, o)));
    });
  }
};

struct Glm {
  std::string in, outcome = "test_methods", out;
  bool anova = false, as_csv = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("glm", "Negative binomial model of test counts");
    c->add_option("-i,--in", in, "Projects CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--outcome", outcome, "test_methods or test_classes")->capture_default_str();
    c->add_flag("--anova", anova, "Also print the type-II ANOVA table");
    c->add_flag("--csv", as_csv, "CSV instead of aligned text");
    c->add_option("-o,--out", out, "Output file ('-' for stdout)")->capture_default_str();
    c->callback([this] {
      const auto rows = glm::load_projects_csv(in);
      const auto o = glm::parse_outcome(outcome);
      const auto fit = glm::fit_nb_glm(rows, o);
      std::string s = as_csv ? glm::render_coefficients_csv(fit) : glm::render_coefficients(fit);
      if (anova) {
        const auto table = glm::anova_type2(rows, o);
        s += as_csv ? glm::render_anova_csv(table) : "\n" + glm::render_anova(table);
      }
      emit(out, s);
    });
  }
};

struct Export {
  std::string in, out, vocabulary;
  int window = 28;
  std::vector<std::string> merge;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("export", "Write the explorer bundle and CSV downloads");
    c->add_option("-i,--in", in, "Classified commits JSONL")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--out", out, "Bundle directory")->required();
    c->add_option("-w,--window", window, "Default window length in days")->capture_default_str();
    c->add_option("--vocabulary", vocabulary, "Stems for the keyword frequency table");
    c->add_option("--merge", merge, "Identity merge alias=canonical email (repeatable)");
    c->callback([this] {
      analytics::export_views(analytics::parse_classified_jsonl(read_file(in)),
                              {window, std::nullopt, merge_map(merge), vocabulary_from(vocabulary)}, out);
    });
  }
};

struct Serve {
  std::string bundle, host = "127.0.0.1";
  int port = 8080;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("serve", "Serve an exported bundle over local HTTP (read-only)");
    c->add_option("-b,--bundle", bundle, "Bundle directory from export")->required();
    c->add_option("--host", host, "Listen address")->capture_default_str();
    c->add_option("-p,--port", port, "Port, 0 for any free port")->capture_default_str();
    c->callback([this] {
      cli::BundleServer server(bundle);
      const int bound = server.bind(host, port);
      std::cout << "serving " << bundle << " on http://" << host << ':' << bound << std::endl;
      server.listen();
    });
  }
};

struct Run {
  std::string config;
  bool force = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("run", "Run the whole pipeline from a JSON config with checkpoints");
    c->add_option("-c,--config", config, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
    c->add_flag("--force", force, "Recompute every stage");
    c->callback([this] {
      for (const auto& r : cli::run_pipeline(cli::PipelineConfig::load(config), {force}))
        std::cout << r.stage << ' ' << (r.status == cli::StageStatus::Ran ? "ran" : "skipped") << '\n';
    });
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine git histories into change types, classify maintenance activities and analyse them"};
  app.set_version_flag("--version", cli::version_string());
  app.require_subcommand(1);
  std::string level = "warning";
  int threads = 0;
  app.add_option("--log-level", level, "debug, info, warning, error or off")->capture_default_str();
  app.add_option("--threads", threads, "Worker cap (overrides MAINTMINER_THREADS)");
  app.parse_complete_callback([&] {
    const std::map<std::string, log::Level> levels{{"debug", log::Level::Debug},
                                                   {"info", log::Level::Info},
                                                   {"warning", log::Level::Warning},
                                                   {"error", log::Level::Error},
                                                   {"off", log::Level::Off}};
    const auto it = levels.find(level);
    if (it == levels.end()) throw CLI::ValidationError("--log-level", "unknown level " + level);
    log::set_level(it->second);
    if (threads > 0) ::setenv("MAINTMINER_THREADS", std::to_string(threads).c_str(), 1);
  });

  Harvest harvest;
  Distill distill;
  Featurize featurize;
  Dataset data;
  Train train;
  Classify classify;
  Profile profile;
  Glm glm_cmd;
  Export export_cmd;
  Serve serve;
  Run run;
  harvest.add(app);
  distill.add(app);
  featurize.add(app);
  data.add(app);
  train.add(app);
  classify.add(app);
  profile.add(app);
  glm_cmd.add(app);
  export_cmd.add(app);
  serve.add(app);
  run.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cli::ConfigError& e) {
    std::cerr << "maintminer: " << e.what() << '\n';
    return kConfig;
  } catch (const cli::LockError& e) {
    std::cerr << "maintminer: " << e.what() << '\n';
    return kLocked;
  } catch (const cli::StageError& e) {
    std::cerr << "maintminer: " << e.what() << '\n';
    for (std::size_t i = 0; i < cli::kStages.size(); ++i)
      if (cli::kStages[i] == e.stage()) return kStage + static_cast<int>(i);
    return kFailure;
  } catch (const cli::StartupError& e) {
    std::cerr << "maintminer: " << e.what() << '\n';
    return kServe;
  } catch (const cli::BindError& e) {
    std::cerr << "maintminer: " << e.what() << '\n';
    return kServe;
  } catch (const std::exception& e) {
    std::cerr << "maintminer: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
