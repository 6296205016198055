#include <catch2/catch_amalgamated.hpp>

#include "troupe/http_provider.hpp"
#include "troupe/provider.hpp"

using namespace troupe;

namespace {

// Fails with a configurable error class for the first N calls, then succeeds.
class FlakyProvider : public Provider {
public:
    FlakyProvider(int failures, std::string code) : failures_(failures), code_(std::move(code)) {}

    Result<CompletionResponse> complete(const CompletionRequest&) override {
        ++calls;
        if (calls <= failures_) return Error{code_, "induced failure " + std::to_string(calls)};
        CompletionResponse r;
        r.text = "ok";
        r.backend_id = "flaky";
        return r;
    }

    int calls = 0;

private:
    int failures_;
    std::string code_;
};

const auto no_sleep = [](std::chrono::milliseconds) {};

}  // namespace

TEST_CASE("requests default to temperature zero") {
    CompletionRequest request;
    CHECK(request.temperature == 0.0);
    auto payload = build_chat_payload(request, "some-model");
    CHECK(payload["temperature"].get<double>() == 0.0);
}

TEST_CASE("the chat payload carries model, messages, and optional fields") {
    CompletionRequest request;
    request.user_text = "hello";
    request.max_tokens = 256;
    auto payload = build_chat_payload(request, "m1");
    CHECK(payload["model"] == "m1");
    REQUIRE(payload["messages"].size() == 1);
    CHECK(payload["messages"][0]["role"] == "user");
    CHECK(payload["messages"][0]["content"] == "hello");
    CHECK(payload["max_tokens"] == 256);

    request.system_text = "sys";
    payload = build_chat_payload(request, "m1");
    REQUIRE(payload["messages"].size() == 2);
    CHECK(payload["messages"][0]["role"] == "system");
}

TEST_CASE("a primed scripted backend echoes its script") {
    ScriptedProvider provider(std::vector<std::string>{"hello"});
    auto response = provider.complete({});
    REQUIRE(response.ok());
    CHECK(response.value().text == "hello");
    CHECK(response.value().backend_id == "scripted");
}

TEST_CASE("a scripted backend exhausts after its last entry") {
    ScriptedProvider provider(std::vector<std::string>{"a", "b"});
    REQUIRE(provider.complete({}).ok());
    REQUIRE(provider.complete({}).ok());
    auto third = provider.complete({});
    REQUIRE_FALSE(third.ok());
    CHECK(third.error().code == "script-exhausted");
}

TEST_CASE("an empty script exhausts immediately") {
    ScriptedProvider provider;
    auto r = provider.lookup(0, {});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == "script-exhausted");
}

TEST_CASE("matching fingerprints replay without divergence") {
    CompletionRequest request;
    request.user_text = "the planner prompt";
    ScriptedProvider provider({ScriptEntry{"reply", fingerprint_of(request), {}}});
    auto response = provider.complete(request);
    REQUIRE(response.ok());
    CHECK(response.value().text == "reply");
}

TEST_CASE("an altered prompt diverges on user_text") {
    CompletionRequest recorded;
    recorded.user_text = "the planner prompt";
    ScriptedProvider provider({ScriptEntry{"reply", fingerprint_of(recorded), {}}});

    CompletionRequest altered = recorded;
    altered.user_text = "the planner prompt, edited";
    auto response = provider.complete(altered);
    REQUIRE_FALSE(response.ok());
    CHECK(response.error().code == "replay-divergence");
    CHECK(response.error().message.find("user_text") != std::string::npos);
}

TEST_CASE("temperature drift is named as the diverging field") {
    CompletionRequest recorded;
    recorded.user_text = "prompt";
    ScriptedProvider provider({ScriptEntry{"reply", fingerprint_of(recorded), {}}});
    CompletionRequest altered = recorded;
    altered.temperature = 0.7;
    auto response = provider.complete(altered);
    REQUIRE_FALSE(response.ok());
    CHECK(response.error().message.find("temperature") != std::string::npos);
}

TEST_CASE("retry succeeds after transient transport failures") {
    FlakyProvider provider(2, "transport");
    RetryPolicy policy;
    policy.max_attempts = 3;
    policy.initial_backoff = std::chrono::milliseconds(0);
    auto response = complete_with_retry(provider, {}, policy, no_sleep);
    REQUIRE(response.ok());
    CHECK(provider.calls == 3);
}

TEST_CASE("a single attempt against a failing backend is transport") {
    FlakyProvider provider(99, "transport");
    RetryPolicy policy;
    policy.max_attempts = 1;
    auto response = complete_with_retry(provider, {}, policy, no_sleep);
    REQUIRE_FALSE(response.ok());
    CHECK(response.error().code == "transport");
    CHECK(provider.calls == 1);
}

TEST_CASE("backend rejections are never retried") {
    FlakyProvider provider(99, "backend-rejection");
    RetryPolicy policy;
    policy.max_attempts = 5;
    auto response = complete_with_retry(provider, {}, policy, no_sleep);
    REQUIRE_FALSE(response.ok());
    CHECK(response.error().code == "backend-rejection");
    CHECK(provider.calls == 1);
}

TEST_CASE("script exhaustion is never retried") {
    ScriptedProvider provider;
    RetryPolicy policy;
    policy.max_attempts = 5;
    auto response = complete_with_retry(provider, {}, policy, no_sleep);
    REQUIRE_FALSE(response.ok());
    CHECK(response.error().code == "script-exhausted");
    CHECK(provider.calls_made() == 1);
}

TEST_CASE("scripted responses are identical across runs for the same sequence") {
    auto run_once = [] {
        ScriptedProvider provider(std::vector<std::string>{"r1", "r2", "r3"});
        std::string all;
        for (int i = 0; i < 3; ++i) all += provider.complete({}).value().text;
        return all;
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("script files load text and fingerprints") {
    auto path = std::string("/tmp/troupe_test_script.jsonl");
    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({"text": "one"})" << "\n";
        out << R"({"text": "two", "fingerprint": "aa:bb:cc"})" << "\n";
    }
    auto entries = load_script_file(path);
    REQUIRE(entries.ok());
    REQUIRE(entries.value().size() == 2);
    CHECK(entries.value()[0].text == "one");
    CHECK(entries.value()[1].fingerprint == "aa:bb:cc");

    {
        std::ofstream out(path, std::ios::trunc);
        out << "not json\n";
    }
    auto bad = load_script_file(path);
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().code == "script-io");
}
