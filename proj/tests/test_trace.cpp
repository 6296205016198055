#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "troupe/trace.hpp"

using namespace troupe;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("three traced calls produce three prompt and three completion events") {
    TraceWriter trace;
    auto inner = std::make_unique<ScriptedProvider>(std::vector<std::string>{"a", "b", "c"});
    TracingProvider provider(std::move(inner), trace);
    for (int i = 0; i < 3; ++i) {
        CompletionRequest request;
        request.user_text = "prompt " + std::to_string(i);
        REQUIRE(provider.complete(request).ok());
    }
    int prompts = 0, completions = 0;
    for (const auto& e : trace.events()) {
        if (e.kind == EventKind::Prompt) ++prompts;
        if (e.kind == EventKind::Completion) ++completions;
        CHECK(e.phase == Phase::Drafting);
    }
    CHECK(prompts == 3);
    CHECK(completions == 3);
}

TEST_CASE("provider failures emit an error event paired to the prompt") {
    TraceWriter trace;
    TracingProvider provider(std::make_unique<ScriptedProvider>(), trace);
    auto response = provider.complete({});
    REQUIRE_FALSE(response.ok());
    REQUIRE(trace.events().size() == 2);
    CHECK(trace.events()[0].kind == EventKind::Prompt);
    CHECK(trace.events()[1].kind == EventKind::Error);
    CHECK(trace.events()[0].corr == trace.events()[1].corr);
}

TEST_CASE("seq numbers are gapless from one") {
    TraceWriter trace;
    for (int i = 0; i < 5; ++i) trace.record_transition("tick", {{"i", i}});
    for (size_t i = 0; i < trace.events().size(); ++i)
        CHECK(trace.events()[i].seq == static_cast<int>(i) + 1);
}

TEST_CASE("a sink on an unwritable path raises trace-io at the first event") {
    REQUIRE_THROWS_AS(TraceWriter("/nonexistent-dir/trace.jsonl"), TraceIoError);
}

TEST_CASE("a recorded file round-trips through load_run") {
    auto path = temp_path("troupe_trace_roundtrip.jsonl");
    {
        TraceWriter trace(path);
        trace.record_transition("start", {{"x", 1}});
        CompletionRequest request;
        request.user_text = "p";
        trace.record_prompt(trace.next_corr(), request);
        CompletionResponse response;
        response.text = "r";
        trace.record_completion(1, response);
    }
    auto events = load_run(path);
    REQUIRE(events.ok());
    REQUIRE(events.value().size() == 3);
    CHECK(events.value()[0].kind == EventKind::Transition);
    CHECK(events.value()[1].fingerprint.size() > 0);
    CHECK(events.value()[2].payload["text"] == "r");
}

TEST_CASE("a deleted line is a corrupt trace at the seq gap") {
    auto path = temp_path("troupe_trace_gap.jsonl");
    {
        TraceWriter trace(path);
        for (int i = 0; i < 6; ++i) trace.record_transition("tick");
    }
    std::vector<std::string> lines;
    {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    lines.erase(lines.begin() + 4);  // drop seq 5
    {
        std::ofstream out(path, std::ios::trunc);
        for (const auto& l : lines) out << l << "\n";
    }
    auto events = load_run(path);
    REQUIRE_FALSE(events.ok());
    CHECK(events.error().code == "corrupt-trace");
    CHECK(events.error().message.find("5") != std::string::npos);
}

TEST_CASE("an empty file is a valid empty run") {
    auto path = temp_path("troupe_trace_empty.jsonl");
    { std::ofstream out(path, std::ios::trunc); }
    auto events = load_run(path);
    REQUIRE(events.ok());
    CHECK(events.value().empty());
}

TEST_CASE("unpaired prompts are corrupt") {
    auto path = temp_path("troupe_trace_unpaired.jsonl");
    {
        TraceWriter trace(path);
        CompletionRequest request;
        trace.record_prompt(trace.next_corr(), request);
    }
    auto events = load_run(path);
    REQUIRE_FALSE(events.ok());
    CHECK(events.error().code == "corrupt-trace");
}

TEST_CASE("replay scripts carry recorded completions and prompt fingerprints") {
    TraceWriter trace;
    auto inner = std::make_unique<ScriptedProvider>(std::vector<std::string>{"one", "two"});
    TracingProvider provider(std::move(inner), trace);
    CompletionRequest r1, r2;
    r1.user_text = "first";
    r2.user_text = "second";
    REQUIRE(provider.complete(r1).ok());
    REQUIRE(provider.complete(r2).ok());

    auto script = replay_script(trace.events());
    REQUIRE(script.size() == 2);
    CHECK(script[0].text == "one");
    CHECK(script[0].fingerprint == fingerprint_of(r1));
    CHECK(script[1].fingerprint == fingerprint_of(r2));

    // identical re-issue replays cleanly
    auto replay = replay_backend(trace.events());
    CHECK(replay->complete(r1).ok());
    CHECK(replay->complete(r2).ok());

    // altered second request diverges
    auto replay2 = replay_backend(trace.events());
    REQUIRE(replay2->complete(r1).ok());
    r2.user_text = "second, edited";
    auto diverged = replay2->complete(r2);
    REQUIRE_FALSE(diverged.ok());
    CHECK(diverged.error().code == "replay-divergence");
}

TEST_CASE("a drafting-only script exhausts on extra calls") {
    TraceWriter trace;
    TracingProvider provider(std::make_unique<ScriptedProvider>(std::vector<std::string>{"only"}),
                             trace);
    REQUIRE(provider.complete({}).ok());
    auto replay = replay_backend(trace.events());
    REQUIRE(replay->complete({}).ok());
    auto second = replay->complete({});
    REQUIRE_FALSE(second.ok());
    CHECK(second.error().code == "script-exhausted");
}

TEST_CASE("trace comparison ignores timestamps but not payloads") {
    TraceWriter a, b;
    a.record_transition("x", {{"v", 1}});
    b.record_transition("x", {{"v", 1}});
    // force differing timestamps
    auto events_a = a.events();
    auto events_b = b.events();
    events_b[0].ts = "1999-01-01T00:00:00.000Z";
    CHECK(compare_traces(events_a, events_b).equal);

    events_b[0].payload["data"]["v"] = 2;
    CHECK_FALSE(compare_traces(events_a, events_b).equal);
}

TEST_CASE("stats count events per phase") {
    TraceWriter trace;
    trace.set_phase(Phase::Drafting);
    trace.record_transition("a");
    CompletionRequest request;
    trace.record_prompt(trace.next_corr(), request);
    trace.record_completion(1, {});
    trace.set_phase(Phase::Execution);
    trace.record_tool("Write File", false, "wrote x");
    auto stats = trace_stats(trace.events());
    CHECK(stats["drafting"]["prompt"] == 1);
    CHECK(stats["drafting"]["completion"] == 1);
    CHECK(stats["execution"]["tool"] == 1);
    CHECK(stats["total"] == 4);
}
