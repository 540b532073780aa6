#include <CLI11.hpp>

#include <iostream>

#include "framecl/parser.hpp"
#include "framecl/runner.hpp"
#include "framecl/verify.hpp"
#include "framecl/wire.hpp"

namespace {

using namespace framecl;

struct GlobalOpts {
  std::string config_path;
  std::string cache_dir;
  std::string templates_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool offline = false;
  std::size_t jobs = 1;
};

PromptLibrary load_library(const GlobalOpts& g) {
  if (!g.templates_dir.empty()) return PromptLibrary::from_directory(g.templates_dir);
  return PromptLibrary::embedded();
}

AppConfig require_config(const GlobalOpts& g) {
  if (g.config_path.empty())
    throw Error(ErrorCode::ConfigError, "this command needs --config <file>");
  AppConfig config = load_config(g.config_path);
  if (g.seed_set)
    for (auto& [name, split] : config.splits) split.seed = g.seed;
  return config;
}

int cmd_ingest(const std::string& frames_dir, const std::string& lus_dir, const std::string& out,
               bool skip_unknown) {
  ImportOptions options;
  options.skip_unknown_lu_frames = skip_unknown;
  ImportResult result = import_framenet(frames_dir, lus_dir, options);
  export_normalized(result.store, out);
  std::cout << "frames: " << result.report.frames_loaded
            << "  lexical units: " << result.report.lexical_units_loaded
            << "  examples: " << result.report.examples_loaded
            << "  skipped: " << result.report.skipped.size() << "\n";
  for (const auto& s : result.report.skipped)
    std::cerr << "skipped " << s.file << " #" << s.sentence_id << ": " << s.reason << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_split(const GlobalOpts& g, const std::string& store_path, const std::string& split_name,
              const std::vector<std::string>& frames, std::size_t n_icl, std::size_t n_eval,
              std::uint64_t seed, const std::string& out) {
  FrameStore store = load_normalized(store_path);
  SplitConfig sc;
  if (!split_name.empty()) {
    AppConfig config = require_config(g);
    auto it = config.splits.find(split_name);
    if (it == config.splits.end())
      throw Error(ErrorCode::ConfigError, "no split named " + split_name + " in config");
    sc = it->second;
  } else {
    sc = SplitConfig{frames, n_icl, n_eval, seed};
  }
  if (g.seed_set) sc.seed = g.seed;
  DatasetSplit split = stratified_split(store, sc);
  save_split(split, out);
  std::cout << "icl_pool: " << split.icl_pool.size() << "  eval_set: " << split.eval_set.size()
            << "  -> " << out << "\n";
  return 0;
}

int cmd_prompt(const GlobalOpts& g, const std::string& store_path, const std::string& task,
               const std::vector<std::string>& frames, std::size_t shots,
               const std::string& split_path, const std::string& ablation, bool all_elements) {
  FrameStore store = load_normalized(store_path);
  PromptLibrary library = load_library(g);
  PromptConfig pc;
  pc.task = task_from_string(task);
  pc.frame_names = frames;
  pc.ablation = ablation_from_string(ablation);
  pc.core_only = !all_elements;
  if (shots > 0) {
    if (split_path.empty())
      throw Error(ErrorCode::ConfigError, "--shots needs --split <file> for the example pool");
    DatasetSplit split = load_split(split_path);
    pc.shot_ids = shot_prefix(split, shots);
  }
  Prompt prompt = library.render(store, pc);
  std::cout << prompt.text;
  return 0;
}

int cmd_run(const GlobalOpts& g, const std::vector<std::string>& experiments,
            const std::string& runs_dir, bool run_all_experiments) {
  AppConfig config = require_config(g);
  if (config.store_path.empty())
    throw Error(ErrorCode::ConfigError, "config has no \"store\" entry");
  FrameStore store = load_normalized(config.store_path);
  RunnerOptions options;
  options.cache_dir = g.cache_dir;
  options.runs_dir = runs_dir;
  options.offline = g.offline;
  options.jobs = g.jobs;
  Runner runner(std::move(store), load_library(g), config, options);

  std::vector<std::string> names = experiments;
  if (run_all_experiments) {
    names.clear();
    for (const auto& e : runner.config().experiments) names.push_back(e.name);
  }
  if (names.empty())
    throw Error(ErrorCode::ConfigError, "name experiments to run, or pass --all");
  for (const auto& name : names) {
    RunRecord record = runner.run(name);
    std::cout << name << ": " << record.items.size() << " calls, " << record.failures
              << " failures, " << record.wall_seconds << "s -> " << runs_dir << "/" << name
              << "\n";
  }
  return 0;
}

int cmd_report(const std::string& runs_dir, const std::vector<std::string>& experiments,
               const std::string& out_dir) {
  std::vector<RunRecord> records;
  if (experiments.empty()) {
    for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
      auto file = entry.path() / "record.json";
      if (std::filesystem::exists(file)) records.push_back(load_record(file));
    }
    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) {
                return a.experiment_name < b.experiment_name;
              });
  } else {
    for (const auto& name : experiments)
      records.push_back(load_record(std::filesystem::path(runs_dir) / name / "record.json"));
  }
  write_reports(records, out_dir);
  std::cout << "wrote reports for " << records.size() << " run(s) to " << out_dir << "\n";
  return 0;
}

int cmd_verify(const std::string& fixtures_dir) {
  verify::Options options;
  options.fixtures_dir = fixtures_dir;
  auto results = verify::run_all(options);
  verify::print_results(results, std::cout);
  return verify::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FrameNet frame-semantic parsing with in-context learning"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "experiment/provider config file");
  app.add_option("--cache-dir", g.cache_dir, "response cache directory");
  app.add_option("--templates", g.templates_dir, "override the built-in prompt templates");
  app.add_flag("--offline", g.offline, "mock providers only; refuse network providers");
  app.add_option("--jobs", g.jobs, "max in-flight requests per cell")->default_val(1);
  auto* seed_opt = app.add_option("--seed", g.seed, "override split seeds");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "FrameNet XML -> normalized corpus");
  std::string in_frames, in_lus, in_out;
  bool skip_unknown = false;
  ingest->add_option("--frames", in_frames, "frame XML directory")->required();
  ingest->add_option("--lus", in_lus, "lexical-unit XML directory")->required();
  ingest->add_option("--out", in_out, "output corpus (line-delimited JSON)")->required();
  ingest->add_flag("--skip-unknown-lus", skip_unknown,
                   "skip LU files whose frame is not in --frames instead of failing");

  // split
  auto* split = app.add_subcommand("split", "build a reproducible ICL/eval split");
  std::string sp_store, sp_name, sp_out;
  std::vector<std::string> sp_frames;
  std::size_t sp_icl = 0, sp_eval = 1;
  std::uint64_t sp_seed = 0;
  split->add_option("--store", sp_store, "normalized corpus")->required();
  split->add_option("--name", sp_name, "take the split config from --config");
  split->add_option("--frames", sp_frames, "frame names")->delimiter(',');
  split->add_option("--n-icl", sp_icl, "ICL pool size");
  split->add_option("--n-eval", sp_eval, "evaluation set size");
  split->add_option("--split-seed", sp_seed, "sampling seed");
  split->add_option("--out", sp_out, "output split file")->required();

  // prompt
  auto* prompt = app.add_subcommand("prompt", "render a prompt to stdout");
  std::string pr_store, pr_task = "fi", pr_split, pr_ablation = "full_frame_info";
  std::vector<std::string> pr_frames;
  std::size_t pr_shots = 0;
  bool pr_all_elements = false;
  prompt->add_option("--store", pr_store, "normalized corpus")->required();
  prompt->add_option("--task", pr_task, "fsp | fi | fsrl");
  prompt->add_option("--frames", pr_frames, "frame names")->delimiter(',')->required();
  prompt->add_option("--shots", pr_shots, "number of in-context examples");
  prompt->add_option("--split", pr_split, "split file providing the example pool");
  prompt->add_option("--ablation", pr_ablation,
                     "no_frame_info | frame_def_only | full_frame_info");
  prompt->add_flag("--all-elements", pr_all_elements, "include non-core frame elements");

  // run
  auto* run = app.add_subcommand("run", "execute experiments from the config");
  std::vector<std::string> run_names;
  std::string run_dir = "runs";
  bool run_all_experiments = false;
  run->add_option("experiments", run_names, "experiment names");
  run->add_option("--runs-dir", run_dir, "output directory for run records");
  run->add_flag("--all", run_all_experiments, "run every configured experiment");

  // report
  auto* report = app.add_subcommand("report", "emit CSV tables from run records");
  std::vector<std::string> rep_names;
  std::string rep_runs = "runs", rep_out = "reports";
  report->add_option("experiments", rep_names, "experiment names (default: all in --runs-dir)");
  report->add_option("--runs-dir", rep_runs, "directory holding run records");
  report->add_option("--out", rep_out, "report output directory");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the fixture-based property suite");
  std::string fixtures = "tests/fixtures";
  verify_cmd->add_option("--fixtures", fixtures, "fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*ingest) return cmd_ingest(in_frames, in_lus, in_out, skip_unknown);
    if (*split) return cmd_split(g, sp_store, sp_name, sp_frames, sp_icl, sp_eval, sp_seed, sp_out);
    if (*prompt)
      return cmd_prompt(g, pr_store, pr_task, pr_frames, pr_shots, pr_split, pr_ablation,
                        pr_all_elements);
    if (*run) return cmd_run(g, run_names, run_dir, run_all_experiments);
    if (*report) return cmd_report(rep_runs, rep_names, rep_out);
    if (*verify_cmd) return cmd_verify(fixtures);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
