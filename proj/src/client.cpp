#ifdef FRAMECL_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "framecl/client.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "framecl/dataset.hpp"
#include "framecl/hash.hpp"
#include "framecl/parser.hpp"
#include "framecl/wire.hpp"

namespace framecl {

using nlohmann::ordered_json;

namespace {

std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

std::string sanitize_component(std::string_view s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')
               ? c
               : '_';
  return out.empty() ? std::string("_") : out;
}

}  // namespace

std::string cache_key(const CompletionRequest& request) {
  std::string material;
  material += request.model_id;
  material += '\x1f';
  material += format_temperature(request.temperature);
  material += '\x1f';
  material += request.system_prompt;
  material += '\x1f';
  material += request.user_input;
  return sha256_hex(material);
}

std::filesystem::path ResponseCache::entry_path(const CompletionRequest& request) const {
  return dir_ / sanitize_component(request.model_id) / (cache_key(request) + ".json");
}

std::optional<CompletionResponse> ResponseCache::lookup(const CompletionRequest& request) const {
  if (!enabled()) return std::nullopt;
  std::lock_guard lock(*mutex_);
  auto path = entry_path(request);
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(is, nullptr, false);
  if (j.is_discarded() || j.value("schema", "") != kCacheSchema) return std::nullopt;
  CompletionResponse resp;
  resp.text = j.at("response").at("text").get<std::string>();
  if (j["response"].contains("meta"))
    for (const auto& [k, v] : j["response"]["meta"].items())
      resp.provider_meta[k] = v.get<std::string>();
  resp.cached = true;
  return resp;
}

void ResponseCache::store(const CompletionRequest& request,
                          const CompletionResponse& response) const {
  if (!enabled()) return;
  std::lock_guard lock(*mutex_);
  auto path = entry_path(request);
  std::filesystem::create_directories(path.parent_path());
  ordered_json j;
  j["schema"] = kCacheSchema;
  j["request"] = {{"model_id", request.model_id},
                  {"temperature", request.temperature},
                  {"system_prompt", request.system_prompt},
                  {"user_input", request.user_input}};
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : response.provider_meta) meta[k] = v;
  j["response"] = {{"text", response.text}, {"meta", std::move(meta)}};
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    os << j.dump() << "\n";
  }
  std::filesystem::rename(tmp, path);
}

LlmClient::LlmClient(ResponseCache cache, RetryPolicy retry)
    : cache_(std::move(cache)), retry_(std::move(retry)), rng_state_(retry_.jitter_seed) {
  if (!retry_.sleep)
    retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (retry_.max_attempts == 0) retry_.max_attempts = 1;
}

CompletionResponse LlmClient::complete(Provider& provider, const CompletionRequest& request) {
  if (auto hit = cache_.lookup(request)) return *hit;
  for (std::size_t attempt = 1;; ++attempt) {
    try {
      auto start = std::chrono::steady_clock::now();
      CompletionResponse resp = provider.call(request);
      auto elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      resp.provider_meta["attempts"] = std::to_string(attempt);
      resp.provider_meta["latency_ms"] = std::to_string(elapsed.count());
      resp.cached = false;
      cache_.store(request, resp);
      return resp;
    } catch (const Error& e) {
      const bool retryable =
          e.code() == ErrorCode::RateLimited || e.code() == ErrorCode::TransportError;
      if (!retryable || attempt >= retry_.max_attempts) throw;
      auto delay = retry_.base_delay * (1 << (attempt - 1));
      std::chrono::milliseconds jitter{0};
      {
        std::lock_guard lock(rng_mutex_);
        SplitMix64 rng(rng_state_);
        rng_state_ = rng.next();
        if (retry_.base_delay.count() > 0)
          jitter = std::chrono::milliseconds(
              rng.bounded(static_cast<std::uint64_t>(retry_.base_delay.count())));
      }
      retry_.sleep(delay + jitter);
    }
  }
}

// ---------------------------------------------------------------------------
// Mock provider

namespace {

double unit_draw(SplitMix64& rng) {
  return static_cast<double>(rng.next() >> 11) * (1.0 / 9007199254740992.0);
}

// Serialization-order core arguments with their spans; index-aligned with
// the payload's "arguments" array.
std::vector<std::pair<std::string, Span>> ordered_core_args(const FrameStore& store,
                                                            const AnnotatedExample& ex,
                                                            bool core_only) {
  const Frame& frame = store.frame(ex.frame_name);
  std::vector<const Argument*> args;
  for (const auto& a : ex.arguments) {
    const FrameElement* fe = frame.find_element(a.fe_name);
    if (core_only && (!fe || fe->coreness != Coreness::Core)) continue;
    args.push_back(&a);
  }
  std::stable_sort(args.begin(), args.end(), [&](const Argument* a, const Argument* b) {
    return frame.element_index(a->fe_name) < frame.element_index(b->fe_name);
  });
  std::vector<std::pair<std::string, Span>> out;
  for (const Argument* a : args) out.emplace_back(a->fe_name, a->span);
  return out;
}

bool is_word_char(char c) { return !std::isspace(static_cast<unsigned char>(c)); }

// Extends a span by one word to the left, or to the right when already at
// the sentence start. Returns nullopt when the span covers the sentence.
std::optional<Span> shift_one_word(std::string_view sentence, Span span) {
  if (span.start > 0) {
    std::size_t i = span.start;
    while (i > 0 && !is_word_char(sentence[i - 1])) --i;
    while (i > 0 && is_word_char(sentence[i - 1])) --i;
    if (i < span.start) return Span{i, span.end};
  }
  if (span.end < sentence.size()) {
    std::size_t i = span.end;
    while (i < sentence.size() && !is_word_char(sentence[i])) ++i;
    while (i < sentence.size() && is_word_char(sentence[i])) ++i;
    if (i > span.end) return Span{span.start, i};
  }
  return std::nullopt;
}

std::vector<std::string> sentence_words(std::string_view sentence) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && !is_word_char(sentence[i])) ++i;
    std::size_t start = i;
    while (i < sentence.size() && is_word_char(sentence[i])) ++i;
    if (i > start) words.emplace_back(sentence.substr(start, i - start));
  }
  return words;
}

// First sentence word that is not string-equal to any needle already in the
// payload, so the added item is guaranteed to change the prediction set.
std::optional<std::string> pick_spurious_word(std::string_view sentence,
                                              const ordered_json& payload) {
  std::set<std::string> used;
  for (const auto& entry : payload) {
    if (entry.contains("target") && entry["target"].is_string())
      used.insert(entry["target"].get<std::string>());
    if (entry.contains("arguments"))
      for (const auto& a : entry["arguments"])
        if (a.contains("text") && a["text"].is_string())
          used.insert(a["text"].get<std::string>());
  }
  for (const auto& w : sentence_words(sentence))
    if (!used.count(w)) return w;
  return std::nullopt;
}

}  // namespace

MockProvider::MockProvider(FrameStore store, MockMode mode, std::string model_id, bool core_only)
    : store_(std::move(store)),
      mode_(mode),
      model_id_(std::move(model_id)),
      core_only_(core_only) {}

CompletionResponse MockProvider::call(const CompletionRequest& request) {
  calls_.fetch_add(1);
  if (mode_.kind == MockMode::Kind::FixedText)
    return {mode_.text, {{"provider", "mock"}}, false};

  const auto parsed = wire::split_input(request.user_input);
  const AnnotatedExample* ex = store_.find_by_sentence(parsed.sentence);
  if (!ex)
    throw Error(ErrorCode::UnknownSentence,
                "mock provider knows no example with sentence: " + parsed.sentence);
  const TaskKind task =
      request.task ? *request.task : (parsed.pairs_json ? TaskKind::FSRL : TaskKind::FI);

  // Gold wire payload for the request.
  ordered_json payload;
  std::vector<FrameTargetPair> expected_pairs;
  if (task == TaskKind::FSRL) {
    payload = ordered_json::array();
    nlohmann::json pairs = nlohmann::json::array();
    if (parsed.pairs_json) {
      pairs = nlohmann::json::parse(*parsed.pairs_json, nullptr, false);
      if (pairs.is_discarded() || !pairs.is_array()) pairs = nlohmann::json::array();
    }
    std::map<std::string, std::size_t> cursors;
    for (const auto& p : pairs) {
      if (!p.is_object() || !p.contains("frame") || !p.contains("target")) continue;
      const std::string frame = p["frame"].get<std::string>();
      const std::string target = p["target"].get<std::string>();
      auto span = ground_span(ex->sentence, target, cursors.count(target) ? cursors[target] : 0);
      if (span) cursors[target] = span->end;
      expected_pairs.push_back({frame, span.value_or(Span{0, 0}), target});
      ordered_json entry = wire::pair_entry(frame, target);
      if (frame == ex->frame_name && target == ex->target_text()) {
        entry["arguments"] =
            wire::gold_payload(store_, *ex, TaskKind::FSRL, core_only_)[0]["arguments"];
      } else {
        entry["arguments"] = ordered_json::array();
      }
      payload.push_back(std::move(entry));
    }
  } else {
    payload = wire::gold_payload(store_, *ex, task, core_only_);
  }

  PerturbationRecord record;
  record.example_id = ex->id;
  record.task = task;
  record.kind = "none";

  if (mode_.kind == MockMode::Kind::Corrupt) {
    SplitMix64 rng(mix_seed(mode_.seed, fnv1a(ex->id)));
    if (unit_draw(rng) < mode_.rate) perturb(payload, task, *ex, rng, record);
  }

  const std::string text = payload.dump();

  // Realized predictions, exactly as the pipeline will see them.
  ParseOutcome outcome =
      parse_prediction(task, text, ex->sentence, store_, expected_pairs, core_only_);
  if (task == TaskKind::FI) {
    record.gold_pairs.push_back({ex->id, ex->frame_name, ex->target});
    for (const auto& inst : outcome.instances)
      record.pred_pairs.push_back({ex->id, inst.pair.frame_name, inst.pair.target});
  }
  record.gold_items = items_from_gold(store_, *ex, core_only_);
  record.pred_items = items_from_instances(ex->id, outcome.instances);
  {
    std::lock_guard lock(log_mutex_);
    log_.push_back(std::move(record));
  }
  return {text, {{"provider", "mock"}, {"model", model_id_}}, false};
}

void MockProvider::perturb(ordered_json& payload, TaskKind task, const AnnotatedExample& ex,
                           SplitMix64& rng, PerturbationRecord& record) {
  if (payload.empty()) return;  // nothing to corrupt (FSRL with no pairs)

  // The entry describing the gold instance; FSRL payloads may list other
  // pairs around it.
  std::size_t entry_idx = 0;
  if (task == TaskKind::FSRL) {
    for (std::size_t i = 0; i < payload.size(); ++i) {
      if (payload[i].value("frame", "") == ex.frame_name &&
          payload[i].value("target", "") == std::string(ex.target_text())) {
        entry_idx = i;
        break;
      }
    }
  }
  ordered_json& entry = payload[entry_idx];
  const std::size_t n_args =
      entry.contains("arguments") && entry["arguments"].is_array() ? entry["arguments"].size() : 0;
  auto core_args = ordered_core_args(store_, ex, core_only_);

  std::vector<std::string> kinds;
  if (task == TaskKind::FI) {
    kinds = {"swap_frame", "shift_boundary", "add_spurious"};
  } else if (task == TaskKind::FSP) {
    kinds = {"swap_frame", "shift_boundary", "add_spurious"};
    if (n_args > 0) kinds.push_back("drop_argument");
  } else {  // FSRL keeps the echoed pairs aligned, so only argument edits
    kinds = {"add_spurious"};
    if (n_args > 0) {
      kinds.push_back("drop_argument");
      kinds.push_back("shift_boundary");
    }
  }
  std::string kind = kinds[rng.bounded(kinds.size())];

  auto add_spurious = [&]() -> bool {
    auto word = pick_spurious_word(ex.sentence, payload);
    if (!word) return false;
    if (task == TaskKind::FI) {
      payload.push_back(wire::pair_entry(ex.frame_name, *word));
      record.detail = "added pair with target '" + *word + "'";
    } else {
      const auto core = store_.core_elements(ex.frame_name);
      if (core.empty()) return false;
      if (!entry.contains("arguments")) entry["arguments"] = ordered_json::array();
      entry["arguments"].push_back({{"role", core.front().name}, {"text", *word}});
      record.detail = "added argument " + core.front().name + "='" + *word + "'";
    }
    return true;
  };

  if (kind == "swap_frame") {
    const auto& frames = store_.frames();
    std::size_t cur = 0;
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (frames[i].name == ex.frame_name) cur = i;
    const std::string swapped = frames[(cur + 1) % frames.size()].name;
    if (swapped == ex.frame_name) kind = "add_spurious";  // single-frame store
    else {
      entry["frame"] = swapped;
      record.detail = "frame swapped to " + swapped;
    }
  }
  if (kind == "shift_boundary") {
    // Candidate spans: the target (FI/FSP) and the serialized arguments
    // (FSP/FSRL), by payload position.
    std::vector<std::pair<int, Span>> candidates;  // (-1 = target, k = arg k)
    if (task != TaskKind::FSRL) candidates.push_back({-1, ex.target});
    if (task != TaskKind::FI)
      for (std::size_t k = 0; k < std::min(n_args, core_args.size()); ++k)
        candidates.push_back({static_cast<int>(k), core_args[k].second});
    std::optional<Span> shifted;
    int which = 0;
    while (!candidates.empty()) {
      std::size_t pick = rng.bounded(candidates.size());
      shifted = shift_one_word(ex.sentence, candidates[pick].second);
      which = candidates[pick].first;
      if (shifted) break;
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (!shifted) kind = "add_spurious";
    else {
      const std::string new_text(shifted->slice(ex.sentence));
      if (which < 0) {
        entry["target"] = new_text;
        record.detail = "target boundary shifted to '" + new_text + "'";
      } else {
        entry["arguments"][static_cast<std::size_t>(which)]["text"] = new_text;
        record.detail = "argument boundary shifted to '" + new_text + "'";
      }
    }
  }
  if (kind == "drop_argument") {
    std::size_t k = rng.bounded(n_args);
    record.detail = "dropped argument " + entry["arguments"][k].value("role", "?");
    entry["arguments"].erase(k);
  }
  if (kind == "add_spurious") {
    if (!add_spurious()) {
      record.kind = "none";  // sentence exhausted; leave the item untouched
      return;
    }
  }
  record.kind = kind;
  record.perturbed = true;
}

std::vector<PerturbationRecord> MockProvider::perturbation_log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

ProviderHandle mock_provider(FrameStore store, MockMode mode, std::string model_id,
                             bool core_only) {
  return std::make_shared<MockProvider>(std::move(store), mode, std::move(model_id), core_only);
}

// ---------------------------------------------------------------------------
// HTTP provider

ordered_json instantiate_request_template(const ordered_json& tmpl,
                                          const CompletionRequest& request) {
  const std::map<std::string, std::string> text_values = {
      {"{{model_id}}", request.model_id},
      {"{{system_prompt}}", request.system_prompt},
      {"{{user_input}}", request.user_input},
      {"{{temperature}}", format_temperature(request.temperature)},
      {"{{max_output}}", std::to_string(request.max_output)},
  };
  std::function<ordered_json(const ordered_json&)> walk = [&](const ordered_json& node) {
    if (node.is_string()) {
      const std::string s = node.get<std::string>();
      if (s == "{{temperature}}") return ordered_json(request.temperature);
      if (s == "{{max_output}}") return ordered_json(request.max_output);
      auto it = text_values.find(s);
      if (it != text_values.end()) return ordered_json(it->second);
      std::string out = s;
      for (const auto& [ph, value] : text_values) {
        std::size_t pos = 0;
        while ((pos = out.find(ph, pos)) != std::string::npos) {
          out.replace(pos, ph.size(), value);
          pos += value.size();
        }
      }
      return ordered_json(out);
    }
    if (node.is_object()) {
      ordered_json out = ordered_json::object();
      for (const auto& [k, v] : node.items()) out[k] = walk(v);
      return out;
    }
    if (node.is_array()) {
      ordered_json out = ordered_json::array();
      for (const auto& v : node) out.push_back(walk(v));
      return out;
    }
    return node;
  };
  return walk(tmpl);
}

const nlohmann::json* json_path(const nlohmann::json& doc, const std::string& path) {
  const nlohmann::json* cur = &doc;
  std::size_t pos = 0;
  while (pos <= path.size() && cur) {
    std::size_t dot = path.find('.', pos);
    const std::string key =
        path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (cur->is_object()) {
      auto it = cur->find(key);
      cur = it == cur->end() ? nullptr : &*it;
    } else if (cur->is_array() && !key.empty() &&
               key.find_first_not_of("0123456789") == std::string::npos) {
      std::size_t idx = std::stoul(key);
      cur = idx < cur->size() ? &(*cur)[idx] : nullptr;
    } else {
      cur = nullptr;
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

namespace {

ordered_json default_chat_template() {
  return ordered_json{
      {"model", "{{model_id}}"},
      {"temperature", "{{temperature}}"},
      {"max_tokens", "{{max_output}}"},
      {"messages",
       ordered_json::array({ordered_json{{"role", "system"}, {"content", "{{system_prompt}}"}},
                            ordered_json{{"role", "user"}, {"content", "{{user_input}}"}}})},
  };
}

}  // namespace

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.request_template.is_null()) config_.request_template = default_chat_template();
  if (config_.response_path.empty()) config_.response_path = "choices.0.message.content";
}

CompletionResponse HttpProvider::call(const CompletionRequest& request) {
  // scheme://host[:port] and endpoint path
  auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::ConfigError, "base_url must include a scheme: " + config_.base_url);
  auto path_start = config_.base_url.find('/', scheme_end + 3);
  const std::string host = config_.base_url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : config_.base_url.substr(path_start);

  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    const char* key = std::getenv(config_.auth_env.c_str());
    if (!key || !*key)
      throw Error(ErrorCode::AuthError,
                  "environment variable " + config_.auth_env + " is not set");
    headers.emplace(config_.auth_header, config_.auth_prefix + key);
  }
  for (const auto& [k, v] : config_.extra_headers) headers.emplace(k, v);

  if (config_.rate_limit_per_min > 0) {
    std::lock_guard lock(rate_mutex_);
    const auto interval =
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(60.0 / config_.rate_limit_per_min));
    const auto now = std::chrono::steady_clock::now();
    if (last_call_.time_since_epoch().count() != 0 && now - last_call_ < interval)
      std::this_thread::sleep_for(interval - (now - last_call_));
    last_call_ = std::chrono::steady_clock::now();
  }

  const std::string body = instantiate_request_template(config_.request_template, request).dump();

  httplib::Client client(host);
  client.set_connection_timeout(static_cast<time_t>(config_.timeout_s));
  client.set_read_timeout(static_cast<time_t>(config_.timeout_s));
  client.set_write_timeout(static_cast<time_t>(config_.timeout_s));

  auto result = client.Post(path, headers, body, "application/json");
  if (!result)
    throw Error(ErrorCode::TransportError,
                config_.model_id + ": " + httplib::to_string(result.error()));
  const int status = result->status;
  if (status == 401 || status == 403)
    throw Error(ErrorCode::AuthError, config_.model_id + ": HTTP " + std::to_string(status));
  if (status == 429)
    throw Error(ErrorCode::RateLimited, config_.model_id + ": HTTP 429");
  if (status == 400)
    throw Error(ErrorCode::ProviderRefusal, config_.model_id + ": HTTP 400: " + result->body);
  if (status != 200)
    throw Error(ErrorCode::TransportError,
                config_.model_id + ": HTTP " + std::to_string(status) + ": " + result->body);

  nlohmann::json doc = nlohmann::json::parse(result->body, nullptr, false);
  if (doc.is_discarded())
    throw Error(ErrorCode::TransportError, config_.model_id + ": response is not JSON");
  const nlohmann::json* text = json_path(doc, config_.response_path);
  if (!text || !text->is_string())
    throw Error(ErrorCode::TransportError,
                config_.model_id + ": no string at response path " + config_.response_path);

  CompletionResponse resp;
  resp.text = text->get<std::string>();
  resp.provider_meta["http_status"] = std::to_string(status);
  if (!config_.usage_path.empty()) {
    if (const nlohmann::json* usage = json_path(doc, config_.usage_path)) {
      if (usage->is_object())
        for (const auto& [k, v] : usage->items())
          resp.provider_meta["usage." + k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return resp;
}

}  // namespace framecl
