#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <doctest.h>

#include <atomic>
#include <thread>

#include "framecl/client.hpp"
#include "framecl/parser.hpp"
#include "framecl/wire.hpp"
#include "helpers.hpp"

using namespace framecl;
using testing::fixture_store;

namespace {

CompletionRequest request_for(const AnnotatedExample& ex, TaskKind task,
                              const std::string& model = "mock") {
  CompletionRequest req;
  req.system_prompt = "prompt";
  req.user_input = wire::task_input(fixture_store(), ex, task);
  req.model_id = model;
  req.task = task;
  return req;
}

// Fails with a transient error a fixed number of times, then succeeds.
class FlakyProvider : public Provider {
 public:
  FlakyProvider(std::string model, std::size_t failures, ErrorCode code)
      : model_(std::move(model)), failures_(failures), code_(code) {}
  const std::string& model_id() const override { return model_; }
  CompletionResponse call(const CompletionRequest&) override {
    ++calls_;
    if (calls_ <= failures_) throw Error(code_, "transient");
    return {"[]", {}, false};
  }
  std::size_t calls() const { return calls_; }

 private:
  std::string model_;
  std::size_t failures_;
  ErrorCode code_;
  std::size_t calls_ = 0;
};

}  // namespace

TEST_SUITE("client") {

TEST_CASE("cache keys are content-addressed on every request byte") {
  CompletionRequest a;
  a.model_id = "m";
  a.system_prompt = "sys";
  a.user_input = "user";
  CompletionRequest b = a;
  CHECK(cache_key(a) == cache_key(b));
  b.user_input = "user!";
  CHECK(cache_key(a) != cache_key(b));
  b = a;
  b.system_prompt = "sys ";
  CHECK(cache_key(a) != cache_key(b));
  b = a;
  b.model_id = "m2";
  CHECK(cache_key(a) != cache_key(b));
  b = a;
  b.temperature = 0.02;
  CHECK(cache_key(a) != cache_key(b));
}

TEST_CASE("the same request is served from cache with identical text") {
  testing::TempDir tmp("cache");
  LlmClient client{ResponseCache(tmp.path())};
  MockProvider mock(fixture_store(), MockMode::echo_gold());
  const auto& ex = fixture_store().examples().front();
  auto req = request_for(ex, TaskKind::FI);

  CompletionResponse first = client.complete(mock, req);
  CHECK(!first.cached);
  CompletionResponse second = client.complete(mock, req);
  CHECK(second.cached);
  CHECK(second.text == first.text);
  CHECK(mock.upstream_calls() == 1);
}

TEST_CASE("echo-gold serializes the gold annotations for each task") {
  MockProvider mock(fixture_store(), MockMode::echo_gold());
  const auto& ex = fixture_store().example("805001");
  for (TaskKind task : {TaskKind::FI, TaskKind::FSP, TaskKind::FSRL}) {
    auto resp = mock.call(request_for(ex, task));
    CHECK(resp.text == wire::gold_payload_text(fixture_store(), ex, task));
  }
}

TEST_CASE("echo-gold rejects sentences absent from the store") {
  MockProvider mock(fixture_store(), MockMode::echo_gold());
  CompletionRequest req;
  req.user_input = "A sentence nobody annotated.";
  req.model_id = "mock";
  req.task = TaskKind::FI;
  try {
    (void)mock.call(req);
    FAIL("expected UnknownSentence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownSentence);
  }
}

TEST_CASE("fixed-text mode returns its text verbatim") {
  MockProvider mock(fixture_store(), MockMode::fixed_text("I cannot help with that."));
  CompletionRequest req;
  req.user_input = "anything";
  req.model_id = "mock";
  CHECK(mock.call(req).text == "I cannot help with that.");
}

TEST_CASE("corrupt at rate zero is echo-gold") {
  MockProvider echo(fixture_store(), MockMode::echo_gold());
  MockProvider corrupt(fixture_store(), MockMode::corrupt(0.0, 123));
  for (const auto& ex : fixture_store().examples()) {
    auto req = request_for(ex, TaskKind::FSP);
    CHECK(corrupt.call(req).text == echo.call(req).text);
  }
  for (const auto& rec : corrupt.perturbation_log()) CHECK(!rec.perturbed);
}

TEST_CASE("corrupt at rate one perturbs every item visibly") {
  MockProvider echo(fixture_store(), MockMode::echo_gold());
  MockProvider corrupt(fixture_store(), MockMode::corrupt(1.0, 1));
  for (TaskKind task : {TaskKind::FI, TaskKind::FSP, TaskKind::FSRL}) {
    for (const auto& ex : fixture_store().examples()) {
      auto req = request_for(ex, task);
      CHECK(corrupt.call(req).text != echo.call(req).text);
    }
  }
  std::size_t perturbed = 0;
  for (const auto& rec : corrupt.perturbation_log()) {
    if (!rec.perturbed) continue;
    ++perturbed;
    // The realized prediction differs from gold in at least one unit.
    if (rec.task == TaskKind::FI) {
      CHECK((rec.pred_pairs.size() != rec.gold_pairs.size() ||
             !std::equal(rec.gold_pairs.begin(), rec.gold_pairs.end(), rec.pred_pairs.begin(),
                         [](const PairItem& a, const PairItem& b) {
                           return a.frame_name == b.frame_name && a.target == b.target;
                         })));
    } else {
      std::vector<LabeledItem> g = rec.gold_items, p = rec.pred_items;
      std::sort(g.begin(), g.end());
      std::sort(p.begin(), p.end());
      CHECK(g != p);
    }
  }
  CHECK(perturbed == 3 * fixture_store().examples().size());
}

TEST_CASE("corrupt draws depend on the example, not on call order") {
  MockProvider a(fixture_store(), MockMode::corrupt(0.5, 99));
  MockProvider b(fixture_store(), MockMode::corrupt(0.5, 99));
  const auto& examples = fixture_store().examples();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto fwd = a.call(request_for(examples[i], TaskKind::FSP));
    auto rev = b.call(request_for(examples[examples.size() - 1 - i], TaskKind::FSP));
    (void)fwd;
    (void)rev;
  }
  std::map<std::string, std::string> texts;
  MockProvider c(fixture_store(), MockMode::corrupt(0.5, 99));
  for (const auto& ex : examples) texts[ex.id] = c.call(request_for(ex, TaskKind::FSP)).text;
  MockProvider d(fixture_store(), MockMode::corrupt(0.5, 99));
  for (auto it = examples.rbegin(); it != examples.rend(); ++it)
    CHECK(d.call(request_for(*it, TaskKind::FSP)).text == texts[it->id]);
}

TEST_CASE("retries are bounded with exponential backoff and jitter") {
  std::vector<std::chrono::milliseconds> sleeps;
  RetryPolicy policy;
  policy.max_attempts = 3;
  policy.base_delay = std::chrono::milliseconds(100);
  policy.jitter_seed = 7;
  policy.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };

  SUBCASE("success after transient failures records the attempt count") {
    LlmClient client{ResponseCache{}, policy};
    FlakyProvider flaky("m", 2, ErrorCode::TransportError);
    CompletionRequest req;
    req.model_id = "m";
    auto resp = client.complete(flaky, req);
    CHECK(resp.provider_meta.at("attempts") == "3");
    CHECK(flaky.calls() == 3);
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[0] >= std::chrono::milliseconds(100));
    CHECK(sleeps[0] < std::chrono::milliseconds(200));
    CHECK(sleeps[1] >= std::chrono::milliseconds(200));
    CHECK(sleeps[1] < std::chrono::milliseconds(300));
  }
  SUBCASE("exhausting the budget rethrows the transient error") {
    LlmClient client{ResponseCache{}, policy};
    FlakyProvider flaky("m", 99, ErrorCode::RateLimited);
    CompletionRequest req;
    req.model_id = "m";
    try {
      (void)client.complete(flaky, req);
      FAIL("expected RateLimited");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RateLimited);
    }
    CHECK(flaky.calls() == 3);
  }
  SUBCASE("auth errors do not retry") {
    LlmClient client{ResponseCache{}, policy};
    FlakyProvider flaky("m", 99, ErrorCode::AuthError);
    CompletionRequest req;
    req.model_id = "m";
    CHECK_THROWS_AS((void)client.complete(flaky, req), Error);
    CHECK(flaky.calls() == 1);
  }
}

TEST_CASE("request templates substitute typed and embedded placeholders") {
  CompletionRequest req;
  req.model_id = "model-x";
  req.system_prompt = "SYS";
  req.user_input = "USER";
  req.max_output = 512;
  // default temperature
  nlohmann::ordered_json tmpl{
      {"model", "{{model_id}}"},
      {"temperature", "{{temperature}}"},
      {"max_tokens", "{{max_output}}"},
      {"prompt", "sys={{system_prompt}} user={{user_input}}"},
  };
  auto body = instantiate_request_template(tmpl, req);
  CHECK(body["model"] == "model-x");
  CHECK(body["temperature"].is_number());
  CHECK(body["temperature"].get<double>() == 0.01);
  CHECK(body["max_tokens"].get<std::size_t>() == 512);
  CHECK(body["prompt"] == "sys=SYS user=USER");
}

TEST_CASE("json paths walk objects and array indices") {
  nlohmann::json doc = nlohmann::json::parse(
      R"({"choices":[{"message":{"content":"hello"}}],"usage":{"total_tokens":7}})");
  const nlohmann::json* v = json_path(doc, "choices.0.message.content");
  REQUIRE(v);
  CHECK(*v == "hello");
  CHECK(json_path(doc, "choices.1.message") == nullptr);
  CHECK(json_path(doc, "usage.total_tokens")->get<int>() == 7);
}

TEST_CASE("the http provider speaks both chat-API shapes against a local server") {
  httplib::Server server;
  std::atomic<int> chat_hits{0};
  nlohmann::json last_chat_body;
  std::string last_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++chat_hits;
    last_chat_body = nlohmann::json::parse(req.body);
    last_auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"content":"chat-reply"}}],"usage":{"total_tokens":9}})",
                    "application/json");
  });
  server.Post("/v1/messages", [&](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    res.set_content(R"({"content":[{"text":"messages-reply"}]})", "application/json");
  });
  std::atomic<int> flaky_hits{0};
  server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
    if (++flaky_hits < 3) {
      res.status = 500;
      res.set_content("boom", "text/plain");
    } else {
      res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})", "application/json");
    }
  });
  server.Post("/limited", [&](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  server.Post("/refuses", [&](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  server.Post("/locked", [&](const httplib::Request&, httplib::Response& res) { res.status = 401; });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  setenv("FRAMECL_TEST_KEY", "sekrit", 1);

  SUBCASE("chat/completions shape with bearer auth and usage capture") {
    HttpProviderConfig config;
    config.model_id = "chat-model";
    config.base_url = base + "/v1/chat/completions";
    config.auth_env = "FRAMECL_TEST_KEY";
    config.usage_path = "usage";
    HttpProvider provider(config);
    CompletionRequest req;
    req.model_id = "chat-model";
    req.system_prompt = "SYS";
    req.user_input = "USER";
    auto resp = provider.call(req);
    CHECK(resp.text == "chat-reply");
    CHECK(resp.provider_meta.at("usage.total_tokens") == "9");
    CHECK(last_auth == "Bearer sekrit");
    CHECK(last_chat_body["model"] == "chat-model");
    CHECK(last_chat_body["temperature"].get<double>() == 0.01);
    REQUIRE(last_chat_body["messages"].size() == 2);
    CHECK(last_chat_body["messages"][0]["role"] == "system");
    CHECK(last_chat_body["messages"][0]["content"] == "SYS");
    CHECK(last_chat_body["messages"][1]["role"] == "user");
    CHECK(last_chat_body["messages"][1]["content"] == "USER");
  }

  SUBCASE("messages shape via a declarative template") {
    HttpProviderConfig config;
    config.model_id = "msg-model";
    config.base_url = base + "/v1/messages";
    config.auth_env = "FRAMECL_TEST_KEY";
    config.auth_header = "x-api-key";
    config.auth_prefix = "";
    config.request_template = nlohmann::ordered_json{
        {"model", "{{model_id}}"},
        {"max_tokens", "{{max_output}}"},
        {"temperature", "{{temperature}}"},
        {"system", "{{system_prompt}}"},
        {"messages",
         nlohmann::ordered_json::array(
             {nlohmann::ordered_json{{"role", "user"}, {"content", "{{user_input}}"}}})},
    };
    config.response_path = "content.0.text";
    HttpProvider provider(config);
    CompletionRequest req;
    req.model_id = "msg-model";
    auto resp = provider.call(req);
    CHECK(resp.text == "messages-reply");
  }

  SUBCASE("transient server errors retry and then succeed") {
    HttpProviderConfig config;
    config.model_id = "flaky-model";
    config.base_url = base + "/flaky";
    HttpProvider provider(config);
    RetryPolicy policy;
    policy.max_attempts = 3;
    policy.base_delay = std::chrono::milliseconds(1);
    policy.sleep = [](std::chrono::milliseconds) {};
    LlmClient client{ResponseCache{}, policy};
    CompletionRequest req;
    req.model_id = "flaky-model";
    auto resp = client.complete(provider, req);
    CHECK(resp.text == "ok");
    CHECK(resp.provider_meta.at("attempts") == "3");
  }

  SUBCASE("status codes map to the provider error taxonomy") {
    auto expect_code = [&](const std::string& path, ErrorCode want) {
      HttpProviderConfig config;
      config.model_id = "status-model";
      config.base_url = base + path;
      HttpProvider provider(config);
      CompletionRequest req;
      req.model_id = "status-model";
      try {
        (void)provider.call(req);
        FAIL("expected an error for ", path);
      } catch (const Error& e) {
        CHECK(e.code() == want);
      }
    };
    expect_code("/limited", ErrorCode::RateLimited);
    expect_code("/refuses", ErrorCode::ProviderRefusal);
    expect_code("/locked", ErrorCode::AuthError);
  }

  SUBCASE("a missing credential environment variable is an auth error") {
    HttpProviderConfig config;
    config.model_id = "chat-model";
    config.base_url = base + "/v1/chat/completions";
    config.auth_env = "FRAMECL_NO_SUCH_KEY";
    HttpProvider provider(config);
    CompletionRequest req;
    req.model_id = "chat-model";
    try {
      (void)provider.call(req);
      FAIL("expected AuthError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AuthError);
    }
  }

  server.stop();
  server_thread.join();
}

}  // TEST_SUITE
