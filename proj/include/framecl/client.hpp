#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "framecl/dataset.hpp"
#include "framecl/eval.hpp"
#include "framecl/store.hpp"

namespace framecl {

struct CompletionRequest {
  std::string system_prompt;
  std::string user_input;
  std::string model_id;
  double temperature = 0.01;
  std::size_t max_output = 2048;
  // Task hint for offline providers; HTTP providers ignore it and it does
  // not enter the cache key.
  std::optional<TaskKind> task;
};

struct CompletionResponse {
  std::string text;  // raw provider output, unmodified
  std::map<std::string, std::string> provider_meta;
  bool cached = false;
};

// Content address of a request; any byte difference changes the key.
std::string cache_key(const CompletionRequest& request);

// One file per key under dir/<model>/<digest>.json.
class ResponseCache {
 public:
  ResponseCache() : mutex_(std::make_unique<std::mutex>()) {}
  explicit ResponseCache(std::filesystem::path dir)
      : dir_(std::move(dir)), mutex_(std::make_unique<std::mutex>()) {}

  bool enabled() const { return !dir_.empty(); }
  std::optional<CompletionResponse> lookup(const CompletionRequest& request) const;
  void store(const CompletionRequest& request, const CompletionResponse& response) const;

 private:
  std::filesystem::path entry_path(const CompletionRequest& request) const;
  std::filesystem::path dir_;
  std::unique_ptr<std::mutex> mutex_;  // writes serialize per cache
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual const std::string& model_id() const = 0;
  // One upstream call; throws Error on failure.
  virtual CompletionResponse call(const CompletionRequest& request) = 0;
};

using ProviderHandle = std::shared_ptr<Provider>;

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds base_delay{250};
  std::uint64_t jitter_seed = 0;
  std::function<void(std::chrono::milliseconds)> sleep;  // injectable for tests
};

// Cache-first completion with bounded, jittered retries on transient
// failures. Exactly one upstream call per cache miss on the happy path.
class LlmClient {
 public:
  explicit LlmClient(ResponseCache cache = {}, RetryPolicy retry = {});
  CompletionResponse complete(Provider& provider, const CompletionRequest& request);

 private:
  ResponseCache cache_;
  RetryPolicy retry_;
  std::mutex rng_mutex_;
  std::uint64_t rng_state_;
};

// ---------------------------------------------------------------------------
// Offline providers

struct MockMode {
  enum class Kind { EchoGold, Corrupt, FixedText } kind = Kind::EchoGold;
  double rate = 0.0;        // Corrupt
  std::uint64_t seed = 0;   // Corrupt
  std::string text;         // FixedText

  static MockMode echo_gold() { return {Kind::EchoGold, 0, 0, ""}; }
  static MockMode corrupt(double rate, std::uint64_t seed) {
    return {Kind::Corrupt, rate, seed, ""};
  }
  static MockMode fixed_text(std::string s) {
    return {Kind::FixedText, 0, 0, std::move(s)};
  }
};

// What one mock call produced, in evaluator-ready units. The acceptance
// suite recomputes expected counts from these records alone.
struct PerturbationRecord {
  std::string example_id;
  TaskKind task = TaskKind::FI;
  bool perturbed = false;
  std::string kind;    // none|drop_argument|shift_boundary|swap_frame|add_spurious
  std::string detail;
  std::vector<LabeledItem> gold_items;
  std::vector<LabeledItem> pred_items;
  std::vector<PairItem> gold_pairs;  // FI only
  std::vector<PairItem> pred_pairs;  // FI only
};

// Deterministic offline provider: echoes gold annotations, optionally
// perturbing them item-by-item under a seed. Perturbation draws depend only
// on (seed, example id), so results are stable under any concurrency.
class MockProvider : public Provider {
 public:
  MockProvider(FrameStore store, MockMode mode, std::string model_id = "mock",
               bool core_only = true);

  const std::string& model_id() const override { return model_id_; }
  CompletionResponse call(const CompletionRequest& request) override;

  std::size_t upstream_calls() const { return calls_.load(); }
  void reset_counter() { calls_ = 0; }
  std::vector<PerturbationRecord> perturbation_log() const;

 private:
  void perturb(nlohmann::ordered_json& payload, TaskKind task, const AnnotatedExample& ex,
               SplitMix64& rng, PerturbationRecord& record);

  FrameStore store_;
  MockMode mode_;
  std::string model_id_;
  bool core_only_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex log_mutex_;
  std::vector<PerturbationRecord> log_;
};

ProviderHandle mock_provider(FrameStore store, MockMode mode, std::string model_id = "mock",
                             bool core_only = true);

// ---------------------------------------------------------------------------
// Declarative HTTP provider: two chat-API shapes (system/user "messages" and
// "chat/completions") are both expressible as a request template plus a
// response path, so vendors live in configuration rather than code.

struct HttpProviderConfig {
  std::string model_id;
  std::string base_url;             // scheme://host[:port]/full/endpoint/path
  std::string auth_env;             // environment variable holding the key
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::map<std::string, std::string> extra_headers;
  nlohmann::ordered_json request_template;  // {{system_prompt}} etc. placeholders
  std::string response_path;        // e.g. choices.0.message.content
  std::string usage_path;           // optional; copied into provider_meta
  double rate_limit_per_min = 0;    // 0 = unlimited
  std::size_t timeout_s = 120;
};

class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  const std::string& model_id() const override { return config_.model_id; }
  CompletionResponse call(const CompletionRequest& request) override;

 private:
  HttpProviderConfig config_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point last_call_{};
};

// Fills a request template: a string value equal to one placeholder becomes
// the typed value; embedded placeholders substitute as text.
nlohmann::ordered_json instantiate_request_template(const nlohmann::ordered_json& tmpl,
                                                    const CompletionRequest& request);
// Dotted path (object keys / array indices) into a JSON document.
const nlohmann::json* json_path(const nlohmann::json& doc, const std::string& path);

}  // namespace framecl
