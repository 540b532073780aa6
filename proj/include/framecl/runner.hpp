#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "framecl/client.hpp"
#include "framecl/dataset.hpp"
#include "framecl/eval.hpp"
#include "framecl/prompt.hpp"
#include "framecl/store.hpp"

namespace framecl {

enum class TaskMode { FspSingleStage, FiOnly, FsrlGold, FiThenFsrl };
std::string_view to_string(TaskMode mode);
TaskMode task_mode_from_string(std::string_view s);

struct ExperimentSpec {
  std::string name;
  TaskMode task_mode = TaskMode::FiOnly;
  std::vector<std::string> frames;
  std::string split_name;
  std::vector<std::size_t> shots;  // resolved; chained mode uses exactly one count
  std::vector<std::string> model_ids;
  AblationLevel ablation = AblationLevel::FullFrameInfo;
  bool core_only = true;
  std::optional<std::string> reuse_fi_from;  // chained mode: prior record name
};

struct ProviderSpec {
  std::string model_id;
  std::string kind;  // "mock" | "http"
  MockMode mock_mode = MockMode::echo_gold();
  HttpProviderConfig http;
};

struct BudgetConfig {
  std::size_t prompt_char_limit = 1000000;
};

struct AppConfig {
  std::filesystem::path store_path;
  std::vector<ProviderSpec> providers;
  std::map<std::string, SplitConfig> splits;
  std::vector<ExperimentSpec> experiments;
  BudgetConfig budgets;

  const ProviderSpec& provider(std::string_view model_id) const;
  const ExperimentSpec& experiment(std::string_view name) const;
};

// Parses the structured config file; relative paths resolve against the
// config file's directory. Shot lists accept either [0,5,...] or
// "schedule:small:<max>" / "schedule:large:<max>".
AppConfig load_config(const std::filesystem::path& file);

struct ItemRecord {
  std::string stage;  // fsp | fi | fsrl
  std::string model_id;
  std::size_t shots = 0;
  std::string sentence_id;
  std::string prompt_digest;
  std::string raw_response;
  bool cached = false;
  std::size_t instances = 0;
  std::vector<ParseWarning> warnings;
};

struct RunRecord {
  std::string experiment_name;
  nlohmann::ordered_json snapshot;  // resolved spec, split ids, template digest
  std::map<std::string, std::string> stage_sources;  // stage -> fresh | reused:<name>
  std::vector<ItemRecord> items;
  // model -> shots -> scope -> report
  std::map<std::string, std::map<std::size_t, std::map<std::string, EvalReport>>> reports;
  std::size_t failures = 0;
  double wall_seconds = 0;
  std::map<std::string, double> usage_totals;  // summed provider usage.* meta

  // Digest over the stable content (no cached flags, no timings): equal
  // digests mean byte-identical reports.
  std::string content_digest() const;
  nlohmann::ordered_json to_json() const;
  static RunRecord from_json(const nlohmann::ordered_json& j);
};

struct RunnerOptions {
  std::filesystem::path cache_dir;        // empty = no cache
  std::filesystem::path runs_dir = "runs";
  std::size_t jobs = 1;
  bool offline = false;                   // refuse non-mock providers
  bool persist = true;                    // write runs/<name>/{record.json,items.jsonl}
  RetryPolicy retry;
};

class Runner {
 public:
  Runner(FrameStore store, PromptLibrary library, AppConfig config, RunnerOptions options);

  RunRecord run(const std::string& experiment_name);
  RunRecord run(const ExperimentSpec& spec);

  // Lazily constructed, shared per model id.
  ProviderHandle provider(const std::string& model_id);
  // Injects a provider ahead of lazy construction (tests, custom backends).
  void set_provider(const std::string& model_id, ProviderHandle handle);
  const FrameStore& store() const { return store_; }
  const AppConfig& config() const { return config_; }

 private:
  struct StageOutput;
  StageOutput run_stage(const ExperimentSpec& spec, TaskKind task, const std::string& model_id,
                        std::size_t shots, const std::vector<const AnnotatedExample*>& eval,
                        const std::vector<std::string>& shot_ids,
                        const std::vector<std::vector<FrameTargetPair>>& expected_pairs,
                        RunRecord& record);

  FrameStore store_;
  PromptLibrary library_;
  AppConfig config_;
  RunnerOptions options_;
  LlmClient client_;
  std::map<std::string, ProviderHandle> providers_;
};

// Emits per-experiment CSV tables (shot curves, best-shot summaries,
// per-attribute bests) plus an ablation table when runs at several ablation
// levels are present.
void write_reports(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir);

void save_record(const RunRecord& record, const std::filesystem::path& dir);
RunRecord load_record(const std::filesystem::path& record_json);

}  // namespace framecl
