#include <fstream>

#include "framecl/runner.hpp"

namespace framecl {

using nlohmann::json;

std::string_view to_string(TaskMode mode) {
  switch (mode) {
    case TaskMode::FspSingleStage: return "fsp_single_stage";
    case TaskMode::FiOnly: return "fi_only";
    case TaskMode::FsrlGold: return "fsrl_gold";
    case TaskMode::FiThenFsrl: return "fi_then_fsrl";
  }
  return "?";
}

TaskMode task_mode_from_string(std::string_view s) {
  if (s == "fsp_single_stage" || s == "fsp") return TaskMode::FspSingleStage;
  if (s == "fi_only" || s == "fi") return TaskMode::FiOnly;
  if (s == "fsrl_gold") return TaskMode::FsrlGold;
  if (s == "fi_then_fsrl") return TaskMode::FiThenFsrl;
  throw Error(ErrorCode::ConfigError, "unknown task_mode: " + std::string(s));
}

const ProviderSpec& AppConfig::provider(std::string_view model_id) const {
  for (const auto& p : providers)
    if (p.model_id == model_id) return p;
  throw Error(ErrorCode::ConfigError, "no provider configured for model " + std::string(model_id));
}

const ExperimentSpec& AppConfig::experiment(std::string_view name) const {
  for (const auto& e : experiments)
    if (e.name == name) return e;
  throw Error(ErrorCode::ConfigError, "no experiment named " + std::string(name));
}

namespace {

std::vector<std::size_t> parse_shots(const json& j) {
  if (j.is_array()) return j.get<std::vector<std::size_t>>();
  if (j.is_number_unsigned()) return {j.get<std::size_t>()};
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    // schedule:<small|large>:<max>
    if (s.rfind("schedule:", 0) == 0) {
      auto second = s.find(':', 9);
      if (second != std::string::npos) {
        const std::string profile = s.substr(9, second - 9);
        const std::size_t max = std::stoul(s.substr(second + 1));
        if (profile == "small") return shot_schedule(ModelProfile::Small, max);
        if (profile == "large") return shot_schedule(ModelProfile::Large, max);
      }
    }
    throw Error(ErrorCode::ConfigError, "bad shots expression: " + s);
  }
  throw Error(ErrorCode::ConfigError, "shots must be a list or a schedule expression");
}

MockMode parse_mock_mode(const json& p) {
  const std::string mode = p.value("mode", "echo_gold");
  if (mode == "echo_gold") return MockMode::echo_gold();
  if (mode == "corrupt")
    return MockMode::corrupt(p.value("rate", 0.0), p.value("seed", std::uint64_t{0}));
  if (mode == "fixed_text") return MockMode::fixed_text(p.value("text", ""));
  throw Error(ErrorCode::ConfigError, "unknown mock mode: " + mode);
}

HttpProviderConfig parse_http(const json& p) {
  HttpProviderConfig cfg;
  cfg.model_id = p.at("model_id").get<std::string>();
  cfg.base_url = p.at("base_url").get<std::string>();
  cfg.auth_env = p.value("auth_env", "");
  cfg.auth_header = p.value("auth_header", "Authorization");
  cfg.auth_prefix = p.value("auth_prefix", "Bearer ");
  if (p.contains("extra_headers"))
    for (const auto& [k, v] : p["extra_headers"].items())
      cfg.extra_headers[k] = v.get<std::string>();
  if (p.contains("request_template")) cfg.request_template = p["request_template"];
  cfg.response_path = p.value("response_path", "");
  cfg.usage_path = p.value("usage_path", "");
  cfg.rate_limit_per_min = p.value("rate_limit_per_min", 0.0);
  cfg.timeout_s = p.value("timeout_s", std::size_t{120});
  return cfg;
}

}  // namespace

AppConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read config " + file.string());
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ConfigError, file.string() + " is not valid JSON");

  const auto base_dir = std::filesystem::absolute(file).parent_path();
  AppConfig cfg;
  if (j.contains("store")) {
    std::filesystem::path p = j["store"].get<std::string>();
    cfg.store_path = p.is_absolute() ? p : base_dir / p;
  }
  if (j.contains("budgets"))
    cfg.budgets.prompt_char_limit =
        j["budgets"].value("prompt_char_limit", cfg.budgets.prompt_char_limit);

  for (const auto& p : j.value("providers", json::array())) {
    ProviderSpec spec;
    spec.model_id = p.at("model_id").get<std::string>();
    spec.kind = p.value("kind", "http");
    if (spec.kind == "mock") {
      spec.mock_mode = parse_mock_mode(p);
    } else if (spec.kind == "http") {
      spec.http = parse_http(p);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown provider kind: " + spec.kind);
    }
    cfg.providers.push_back(std::move(spec));
  }

  if (j.contains("splits")) {
    for (const auto& [name, s] : j["splits"].items()) {
      SplitConfig sc;
      sc.frame_names = s.at("frames").get<std::vector<std::string>>();
      sc.n_icl = s.value("n_icl", std::size_t{0});
      sc.n_eval = s.value("n_eval", std::size_t{1});
      sc.seed = s.value("seed", std::uint64_t{0});
      cfg.splits[name] = std::move(sc);
    }
  }

  for (const auto& e : j.value("experiments", json::array())) {
    ExperimentSpec spec;
    spec.name = e.at("name").get<std::string>();
    spec.task_mode = task_mode_from_string(e.at("task_mode").get<std::string>());
    spec.frames = e.at("frames").get<std::vector<std::string>>();
    spec.split_name = e.at("split").get<std::string>();
    spec.shots = parse_shots(e.at("shots"));
    spec.model_ids = e.at("models").get<std::vector<std::string>>();
    spec.ablation = ablation_from_string(e.value("ablation", "full_frame_info"));
    spec.core_only = e.value("core_only", true);
    if (e.contains("reuse_fi_from")) spec.reuse_fi_from = e["reuse_fi_from"].get<std::string>();
    if (spec.task_mode == TaskMode::FiThenFsrl && spec.shots.size() != 1)
      throw Error(ErrorCode::ConfigError,
                  spec.name + ": the chained task uses a single shot count for both stages");
    if (!cfg.splits.count(spec.split_name))
      throw Error(ErrorCode::ConfigError, spec.name + ": unknown split " + spec.split_name);
    cfg.experiments.push_back(std::move(spec));
  }
  return cfg;
}

}  // namespace framecl
