#include "framecl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include "framecl/hash.hpp"
#include "framecl/parser.hpp"
#include "framecl/wire.hpp"

namespace framecl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json warning_json(const std::vector<ParseWarning>& warnings) {
  auto arr = ordered_json::array();
  for (const auto& w : warnings) arr.push_back({{"code", w.code}, {"detail", w.detail}});
  return arr;
}

ordered_json item_json(const ItemRecord& item, bool stable_only) {
  ordered_json j;
  j["stage"] = item.stage;
  j["model"] = item.model_id;
  j["shots"] = item.shots;
  j["sentence_id"] = item.sentence_id;
  j["prompt_digest"] = item.prompt_digest;
  j["raw_response"] = item.raw_response;
  j["instances"] = item.instances;
  j["warnings"] = warning_json(item.warnings);
  if (!stable_only) j["cached"] = item.cached;
  return j;
}

Metric metric_from_json(const ordered_json& j) {
  Metric m;
  m.tp = j.value("tp", std::size_t{0});
  m.fp = j.value("fp", std::size_t{0});
  m.fn = j.value("fn", std::size_t{0});
  m.precision = j.value("precision", 0.0);
  m.recall = j.value("recall", 0.0);
  m.f1 = j.value("f1", 0.0);
  return m;
}

EvalReport report_from_json(const ordered_json& j) {
  EvalReport r;
  r.scope = j.value("scope", "");
  r.micro = metric_from_json(j.at("micro"));
  if (j.contains("per_attribute"))
    for (const auto& [k, v] : j["per_attribute"].items()) r.per_attribute[k] = metric_from_json(v);
  if (j.contains("per_frame"))
    for (const auto& [k, v] : j["per_frame"].items()) r.per_frame[k] = metric_from_json(v);
  if (j.contains("metadata"))
    for (const auto& [k, v] : j["metadata"].items()) r.metadata[k] = v.get<std::string>();
  return r;
}

std::string percent1(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", f1 * 100.0);
  return buf;
}

std::string primary_scope(TaskMode mode) {
  switch (mode) {
    case TaskMode::FspSingleStage: return "all_roles";
    case TaskMode::FiOnly: return "pair_exact";
    case TaskMode::FsrlGold: return "arguments_only";
    case TaskMode::FiThenFsrl: return "all_roles";
  }
  return "all_roles";
}

}  // namespace

ordered_json RunRecord::to_json() const {
  ordered_json j;
  j["schema"] = kRunSchema;
  j["experiment"] = experiment_name;
  j["snapshot"] = snapshot;
  j["stage_sources"] = ordered_json::object();
  for (const auto& [k, v] : stage_sources) j["stage_sources"][k] = v;
  auto items_arr = ordered_json::array();
  for (const auto& item : items) items_arr.push_back(item_json(item, false));
  j["items"] = std::move(items_arr);
  j["reports"] = ordered_json::object();
  for (const auto& [model, by_shots] : reports) {
    for (const auto& [shots, scopes] : by_shots) {
      ordered_json cell = ordered_json::object();
      for (const auto& [scope, report] : scopes) cell[scope] = report.to_json();
      j["reports"][model][std::to_string(shots)] = std::move(cell);
    }
  }
  j["failures"] = failures;
  j["wall_seconds"] = wall_seconds;
  j["usage_totals"] = ordered_json::object();
  for (const auto& [k, v] : usage_totals) j["usage_totals"][k] = v;
  j["content_digest"] = content_digest();
  return j;
}

std::string RunRecord::content_digest() const {
  ordered_json j;
  j["snapshot"] = snapshot;
  auto items_arr = ordered_json::array();
  for (const auto& item : items) items_arr.push_back(item_json(item, true));
  j["items"] = std::move(items_arr);
  j["reports"] = ordered_json::object();
  for (const auto& [model, by_shots] : reports)
    for (const auto& [shots, scopes] : by_shots)
      for (const auto& [scope, report] : scopes)
        j["reports"][model][std::to_string(shots)][scope] = report.to_json();
  return sha256_hex(j.dump());
}

RunRecord RunRecord::from_json(const ordered_json& j) {
  if (j.value("schema", "") != kRunSchema)
    throw Error(ErrorCode::SchemaVersionMismatch, "not a run record");
  RunRecord r;
  r.experiment_name = j.value("experiment", "");
  r.snapshot = j.value("snapshot", ordered_json::object());
  if (j.contains("stage_sources"))
    for (const auto& [k, v] : j["stage_sources"].items()) r.stage_sources[k] = v.get<std::string>();
  for (const auto& it : j.value("items", ordered_json::array())) {
    ItemRecord item;
    item.stage = it.value("stage", "");
    item.model_id = it.value("model", "");
    item.shots = it.value("shots", std::size_t{0});
    item.sentence_id = it.value("sentence_id", "");
    item.prompt_digest = it.value("prompt_digest", "");
    item.raw_response = it.value("raw_response", "");
    item.instances = it.value("instances", std::size_t{0});
    item.cached = it.value("cached", false);
    for (const auto& w : it.value("warnings", ordered_json::array()))
      item.warnings.push_back({w.value("code", ""), w.value("detail", "")});
    r.items.push_back(std::move(item));
  }
  if (j.contains("reports"))
    for (const auto& [model, by_shots] : j["reports"].items())
      for (const auto& [shots, scopes] : by_shots.items())
        for (const auto& [scope, report] : scopes.items())
          r.reports[model][std::stoul(shots)][scope] = report_from_json(report);
  r.failures = j.value("failures", std::size_t{0});
  r.wall_seconds = j.value("wall_seconds", 0.0);
  if (j.contains("usage_totals"))
    for (const auto& [k, v] : j["usage_totals"].items()) r.usage_totals[k] = v.get<double>();
  return r;
}

void save_record(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "record.json", std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + (dir / "record.json").string());
    os << record.to_json().dump(1) << "\n";
  }
  {
    std::ofstream os(dir / "items.jsonl", std::ios::binary);
    for (const auto& item : record.items) os << item_json(item, false).dump() << "\n";
  }
}

RunRecord load_record(const std::filesystem::path& record_json) {
  std::ifstream is(record_json, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + record_json.string());
  ordered_json j = ordered_json::parse(is, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::ValidationFailure, record_json.string() + " is not valid JSON");
  return RunRecord::from_json(j);
}

// ---------------------------------------------------------------------------

Runner::Runner(FrameStore store, PromptLibrary library, AppConfig config, RunnerOptions options)
    : store_(std::move(store)),
      library_(std::move(library)),
      config_(std::move(config)),
      options_(std::move(options)),
      client_(ResponseCache(options_.cache_dir), options_.retry) {}

void Runner::set_provider(const std::string& model_id, ProviderHandle handle) {
  providers_[model_id] = std::move(handle);
}

ProviderHandle Runner::provider(const std::string& model_id) {
  auto it = providers_.find(model_id);
  if (it != providers_.end()) return it->second;
  const ProviderSpec& spec = config_.provider(model_id);
  if (options_.offline && spec.kind != "mock")
    throw Error(ErrorCode::ConfigError,
                "offline mode refuses network provider " + model_id);
  ProviderHandle handle;
  if (spec.kind == "mock") {
    handle = std::make_shared<MockProvider>(store_, spec.mock_mode, model_id);
  } else {
    handle = std::make_shared<HttpProvider>(spec.http);
  }
  providers_[model_id] = handle;
  return handle;
}

struct Runner::StageOutput {
  std::string prompt_digest;
  std::vector<std::string> raw;         // by eval index
  std::vector<ParseOutcome> outcomes;   // by eval index
};

Runner::StageOutput Runner::run_stage(const ExperimentSpec& spec, TaskKind task,
                                      const std::string& model_id, std::size_t shots,
                                      const std::vector<const AnnotatedExample*>& eval,
                                      const std::vector<std::string>& shot_ids,
                                      const std::vector<std::vector<FrameTargetPair>>& expected_pairs,
                                      RunRecord& record) {
  PromptConfig pconfig{task, spec.frames, shot_ids, spec.ablation, spec.core_only};
  Prompt prompt = library_.render(store_, pconfig);
  BudgetCheck budget = estimate_prompt_budget(prompt, config_.budgets.prompt_char_limit);
  if (!budget.fits)
    throw Error(ErrorCode::BudgetExceeded,
                spec.name + ": " + std::string(to_string(task)) + " prompt with " +
                    std::to_string(shots) + " shots exceeds the character limit by " +
                    std::to_string(budget.excess));

  StageOutput out;
  out.prompt_digest = prompt.digest();
  out.raw.resize(eval.size());
  out.outcomes.resize(eval.size());
  std::vector<ItemRecord> item_records(eval.size());
  ProviderHandle handle = provider(model_id);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::mutex usage_mutex;
  std::map<std::string, double> usage;

  auto process = [&](std::size_t i) {
    const AnnotatedExample& ex = *eval[i];
    std::string user_input;
    if (task == TaskKind::FSRL) {
      auto pairs = ordered_json::array();
      for (const auto& p : expected_pairs[i]) pairs.push_back(wire::pair_entry(p.frame_name, p.target_text));
      user_input = wire::fsrl_input(ex.sentence, pairs);
    } else {
      user_input = wire::task_input(store_, ex, task);
    }
    CompletionRequest request;
    request.system_prompt = prompt.text;
    request.user_input = user_input;
    request.model_id = model_id;
    request.task = task;
    ItemRecord& item = item_records[i];
    item.stage = std::string(to_string(task));
    item.model_id = model_id;
    item.shots = shots;
    item.sentence_id = ex.id;
    item.prompt_digest = out.prompt_digest;
    try {
      CompletionResponse resp = client_.complete(*handle, request);
      out.raw[i] = resp.text;
      item.cached = resp.cached;
      for (const auto& [k, v] : resp.provider_meta) {
        if (k.rfind("usage.", 0) != 0) continue;
        try {
          const double n = std::stod(v);
          std::lock_guard lock(usage_mutex);
          usage[k] += n;
        } catch (const std::exception&) {
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ProviderRefusal) {
        // Refusals score as empty predictions; sweeps keep going.
        out.raw[i] = "";
        item.warnings.push_back({"ProviderRefusal", e.what()});
      } else if (e.code() == ErrorCode::RateLimited || e.code() == ErrorCode::TransportError) {
        throw Error(ErrorCode::ProviderExhausted,
                    model_id + " failed after retries (" + e.what() + "); the run is resumable "
                    "from the response cache");
      } else {
        throw;
      }
    }
    out.outcomes[i] = parse_prediction(task, out.raw[i], ex.sentence, store_,
                                       task == TaskKind::FSRL ? expected_pairs[i]
                                                              : std::vector<FrameTargetPair>{},
                                       spec.core_only);
    item.raw_response = out.raw[i];
    item.instances = out.outcomes[i].instances.size();
    for (const auto& w : out.outcomes[i].warnings) item.warnings.push_back(w);
  };

  const std::size_t jobs = std::max<std::size_t>(1, options_.jobs);
  if (jobs == 1 || eval.size() <= 1) {
    for (std::size_t i = 0; i < eval.size(); ++i) process(i);
  } else {
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= eval.size()) return;
        try {
          process(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < std::min(jobs, eval.size()); ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (auto& item : item_records) {
    for (const auto& w : item.warnings)
      if (w.code == "ProviderRefusal" || w.code == warning::kNoPayload) {
        ++record.failures;
        break;
      }
    record.items.push_back(std::move(item));
  }
  for (const auto& [k, v] : usage) record.usage_totals[k] += v;
  return out;
}

RunRecord Runner::run(const std::string& experiment_name) {
  return run(config_.experiment(experiment_name));
}

RunRecord Runner::run(const ExperimentSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& model : spec.model_ids) provider(model);  // validate early

  auto split_it = config_.splits.find(spec.split_name);
  if (split_it == config_.splits.end())
    throw Error(ErrorCode::ConfigError, spec.name + ": unknown split " + spec.split_name);
  DatasetSplit split = stratified_split(store_, split_it->second);

  std::vector<const AnnotatedExample*> eval;
  for (const auto& id : split.eval_set) eval.push_back(&store_.example(id));

  for (std::size_t shots : spec.shots)
    if (shots > split.icl_pool.size())
      throw Error(ErrorCode::ConfigError,
                  spec.name + ": " + std::to_string(shots) + " shots requested but the ICL pool has " +
                      std::to_string(split.icl_pool.size()));

  RunRecord record;
  record.experiment_name = spec.name;
  {
    ordered_json snap;
    snap["name"] = spec.name;
    snap["task_mode"] = to_string(spec.task_mode);
    snap["frames"] = spec.frames;
    snap["split"] = {{"name", spec.split_name},
                     {"frames", split.config.frame_names},
                     {"n_icl", split.config.n_icl},
                     {"n_eval", split.config.n_eval},
                     {"seed", split.config.seed}};
    snap["split_ids"] = {{"icl_pool", split.icl_pool}, {"eval_set", split.eval_set}};
    snap["shots"] = spec.shots;
    snap["models"] = spec.model_ids;
    snap["ablation"] = to_string(spec.ablation);
    snap["core_only"] = spec.core_only;
    snap["temperature"] = 0.01;
    snap["template_digest"] = library_.digest();
    snap["store_release"] = store_.release();
    if (spec.reuse_fi_from) snap["reuse_fi_from"] = *spec.reuse_fi_from;
    record.snapshot = std::move(snap);
  }

  // Gold views used by several modes.
  std::vector<LabeledItem> gold_items;
  std::vector<PairItem> gold_pairs;
  for (const AnnotatedExample* ex : eval) {
    auto items = items_from_gold(store_, *ex, spec.core_only);
    gold_items.insert(gold_items.end(), items.begin(), items.end());
    gold_pairs.push_back({ex->id, ex->frame_name, ex->target});
  }

  for (const auto& model : spec.model_ids) {
    for (std::size_t shots : spec.shots) {
      auto shot_ids = shot_prefix(split, shots);
      auto& scopes = record.reports[model][shots];

      if (spec.task_mode == TaskMode::FspSingleStage) {
        auto stage = run_stage(spec, TaskKind::FSP, model, shots, eval, shot_ids, {}, record);
        std::vector<LabeledItem> pred;
        for (std::size_t i = 0; i < eval.size(); ++i) {
          auto items = items_from_instances(eval[i]->id, stage.outcomes[i].instances);
          pred.insert(pred.end(), items.begin(), items.end());
        }
        scopes["all_roles"] = micro_report(gold_items, pred, EvalScope::AllRoles);
        scopes["target_only"] = micro_report(gold_items, pred, EvalScope::TargetOnly);
        scopes["arguments_only"] = micro_report(gold_items, pred, EvalScope::ArgumentsOnly);
        record.stage_sources["fsp"] = "fresh";
      } else if (spec.task_mode == TaskMode::FiOnly) {
        auto stage = run_stage(spec, TaskKind::FI, model, shots, eval, shot_ids, {}, record);
        std::vector<PairItem> pred;
        for (std::size_t i = 0; i < eval.size(); ++i)
          for (const auto& inst : stage.outcomes[i].instances)
            pred.push_back({eval[i]->id, inst.pair.frame_name, inst.pair.target});
        FiReport fi = fi_report(gold_pairs, pred);
        scopes["pair_exact"] = fi.pair_exact;
        scopes["name_only"] = fi.name_only;
        scopes["target_only"] = fi.target_only;
        record.stage_sources["fi"] = "fresh";
      } else if (spec.task_mode == TaskMode::FsrlGold) {
        std::vector<std::vector<FrameTargetPair>> expected(eval.size());
        for (std::size_t i = 0; i < eval.size(); ++i)
          expected[i].push_back({eval[i]->frame_name, eval[i]->target,
                                 std::string(eval[i]->target_text())});
        auto stage = run_stage(spec, TaskKind::FSRL, model, shots, eval, shot_ids, expected, record);
        std::vector<LabeledItem> pred;
        for (std::size_t i = 0; i < eval.size(); ++i) {
          auto items = items_from_instances(eval[i]->id, stage.outcomes[i].instances);
          pred.insert(pred.end(), items.begin(), items.end());
        }
        scopes["arguments_only"] = micro_report(gold_items, pred, EvalScope::ArgumentsOnly);
        record.stage_sources["fsrl"] = "fresh(gold pairs)";
      } else {  // FiThenFsrl
        std::vector<ParseOutcome> fi_outcomes(eval.size());
        if (spec.reuse_fi_from) {
          RunRecord prior =
              load_record(options_.runs_dir / *spec.reuse_fi_from / "record.json");
          std::map<std::string, const ItemRecord*> by_id;
          for (const auto& item : prior.items)
            if (item.stage == "fi" && item.model_id == model && item.shots == shots)
              by_id[item.sentence_id] = &item;
          for (std::size_t i = 0; i < eval.size(); ++i) {
            auto it = by_id.find(eval[i]->id);
            if (it == by_id.end())
              throw Error(ErrorCode::ConfigError,
                          spec.name + ": record " + *spec.reuse_fi_from +
                              " has no fi item for " + eval[i]->id + " at " +
                              std::to_string(shots) + " shots for model " + model);
            fi_outcomes[i] = parse_prediction(TaskKind::FI, it->second->raw_response,
                                              eval[i]->sentence, store_, {}, spec.core_only);
          }
          record.stage_sources["fi"] = "reused:" + *spec.reuse_fi_from;
        } else {
          auto stage1 = run_stage(spec, TaskKind::FI, model, shots, eval, shot_ids, {}, record);
          fi_outcomes = std::move(stage1.outcomes);
          record.stage_sources["fi"] = "fresh";
        }
        std::vector<PairItem> fi_pred;
        std::vector<std::vector<FrameTargetPair>> detected(eval.size());
        for (std::size_t i = 0; i < eval.size(); ++i) {
          for (const auto& inst : fi_outcomes[i].instances) {
            fi_pred.push_back({eval[i]->id, inst.pair.frame_name, inst.pair.target});
            detected[i].push_back(inst.pair);
          }
        }
        FiReport fi = fi_report(gold_pairs, fi_pred);
        scopes["fi_pair_exact"] = fi.pair_exact;
        scopes["fi_name_only"] = fi.name_only;
        scopes["fi_target_only"] = fi.target_only;

        auto stage2 = run_stage(spec, TaskKind::FSRL, model, shots, eval, shot_ids, detected, record);
        std::vector<LabeledItem> pred;
        for (std::size_t i = 0; i < eval.size(); ++i) {
          auto items = items_from_instances(eval[i]->id, stage2.outcomes[i].instances);
          pred.insert(pred.end(), items.begin(), items.end());
        }
        // Arguments relative to gold (the detected-pairs FSRL metric), and
        // the combined view covering targets plus arguments.
        scopes["arguments_only"] = micro_report(gold_items, pred, EvalScope::ArgumentsOnly);
        scopes["all_roles"] = micro_report(gold_items, pred, EvalScope::AllRoles);
        record.stage_sources["fsrl"] = "fresh(detected pairs)";
      }
    }
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (options_.persist) {
    save_record(record, options_.runs_dir / spec.name);
    save_split(split, options_.runs_dir / spec.name / "split.json");
  }
  return record;
}

// ---------------------------------------------------------------------------
// Report tables

namespace {

struct BestCell {
  std::size_t shots = 0;
  double f1 = -1.0;
};

BestCell best_over_shots(const std::map<std::size_t, std::map<std::string, EvalReport>>& by_shots,
                         const std::string& scope, bool nonzero_only) {
  BestCell best;
  for (const auto& [shots, scopes] : by_shots) {
    if (nonzero_only && shots == 0) continue;
    auto it = scopes.find(scope);
    if (it == scopes.end()) continue;
    if (it->second.micro.f1 > best.f1) {
      best.f1 = it->second.micro.f1;
      best.shots = shots;
    }
  }
  return best;
}

}  // namespace

void write_reports(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir) {
  if (records.empty()) throw Error(ErrorCode::ConfigError, "no run records to report on");

  for (const auto& record : records) {
    const auto dir = out_dir / record.experiment_name;
    std::filesystem::create_directories(dir);
    const TaskMode mode =
        task_mode_from_string(record.snapshot.value("task_mode", "fi_only"));
    const std::string scope0 = primary_scope(mode);

    {
      std::ofstream os(dir / "report.json", std::ios::binary);
      ordered_json j;
      j["experiment"] = record.experiment_name;
      j["snapshot"] = record.snapshot;
      j["failures"] = record.failures;
      for (const auto& [model, by_shots] : record.reports)
        for (const auto& [shots, scopes] : by_shots)
          for (const auto& [scope, report] : scopes)
            j["reports"][model][std::to_string(shots)][scope] = report.to_json();
      os << j.dump(1) << "\n";
    }
    {
      std::ofstream os(dir / "f1_curve.csv", std::ios::binary);
      os << "model,scope,shots,tp,fp,fn,precision,recall,f1_pct\n";
      for (const auto& [model, by_shots] : record.reports)
        for (const auto& [shots, scopes] : by_shots)
          for (const auto& [scope, report] : scopes) {
            const Metric& m = report.micro;
            os << model << ',' << scope << ',' << shots << ',' << m.tp << ',' << m.fp << ','
               << m.fn << ',' << percent1(m.precision) << ',' << percent1(m.recall) << ','
               << percent1(m.f1) << '\n';
          }
    }
    {
      std::ofstream os(dir / "best_shots.csv", std::ios::binary);
      os << "model,scope,best_shots,f1_pct,display\n";
      for (const auto& [model, by_shots] : record.reports) {
        std::set<std::string> scope_names;
        for (const auto& [shots, scopes] : by_shots)
          for (const auto& [scope, report] : scopes) scope_names.insert(scope);
        for (const auto& scope : scope_names) {
          BestCell best = best_over_shots(by_shots, scope, false);
          if (best.f1 < 0) continue;
          os << model << ',' << scope << ',' << best.shots << ',' << percent1(best.f1) << ",\"("
             << best.shots << ") " << percent1(best.f1) << "\"\n";
        }
      }
    }
    {
      // Per-attribute bests over shot counts for the experiment's headline
      // scope.
      std::ofstream os(dir / "per_attribute_best.csv", std::ios::binary);
      os << "model,scope,role,best_shots,f1_pct\n";
      for (const auto& [model, by_shots] : record.reports) {
        std::map<std::string, BestCell> best_by_role;
        for (const auto& [shots, scopes] : by_shots) {
          auto it = scopes.find(scope0);
          if (it == scopes.end()) continue;
          for (const auto& [role, metric] : it->second.per_attribute) {
            auto& best = best_by_role[role];
            if (metric.f1 > best.f1) {
              best.f1 = metric.f1;
              best.shots = shots;
            }
          }
        }
        for (const auto& [role, best] : best_by_role)
          os << model << ',' << scope0 << ',' << role << ',' << best.shots << ','
             << percent1(best.f1) << '\n';
      }
    }
  }

  // Ablation table across records sharing a task mode (zero-shot levels a-c
  // plus the best-shot full-information column d).
  std::map<std::string, std::map<std::string, std::map<std::string, std::string>>> ablation;
  std::map<std::string, std::set<std::string>> levels_seen;
  for (const auto& record : records) {
    const std::string mode = record.snapshot.value("task_mode", "");
    const std::string level = record.snapshot.value("ablation", "");
    const std::string scope0 =
        primary_scope(task_mode_from_string(mode.empty() ? "fi_only" : mode));
    levels_seen[mode].insert(level);
    for (const auto& [model, by_shots] : record.reports) {
      auto& row = ablation[mode][model];
      if (level == "no_frame_info" || level == "frame_def_only") {
        auto it = by_shots.find(0);
        if (it != by_shots.end() && it->second.count(scope0))
          row[level == "no_frame_info" ? "a" : "b"] = percent1(it->second.at(scope0).micro.f1);
      } else if (level == "full_frame_info") {
        auto it = by_shots.find(0);
        if (it != by_shots.end() && it->second.count(scope0))
          row["c"] = percent1(it->second.at(scope0).micro.f1);
        BestCell best = best_over_shots(by_shots, scope0, true);
        if (best.f1 >= 0)
          row["d"] = "(" + std::to_string(best.shots) + ") " + percent1(best.f1);
      }
    }
  }
  for (const auto& [mode, rows] : ablation) {
    if (levels_seen[mode].size() < 2) continue;
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir / ("ablation_" + mode + ".csv"), std::ios::binary);
    os << "model,a_zero_shot_no_frame_info,b_zero_shot_frame_def,c_zero_shot_full_info,"
          "d_best_shot_full_info\n";
    for (const auto& [model, cells] : rows) {
      auto get = [&](const char* k) {
        auto it = cells.find(k);
        return it == cells.end() ? std::string("-") : it->second;
      };
      os << model << ',' << get("a") << ',' << get("b") << ',' << get("c") << ",\"" << get("d")
         << "\"\n";
    }
  }
}

}  // namespace framecl
