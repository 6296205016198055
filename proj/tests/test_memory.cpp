#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "troupe/memory.hpp"

using namespace troupe;

namespace {

RefinementAction make_action(const std::string& agent, int iteration,
                             const std::string& thought = "t", const std::string& plan = "p",
                             const std::string& observation = "o") {
    RefinementAction a;
    a.iteration = iteration;
    a.agent = agent;
    a.thought = thought;
    a.plan = plan;
    a.observation = observation;
    a.tool_used = "Write File";
    return a;
}

StepResult make_result(int index, const std::string& agent, const std::string& final_output,
                       StepResultStatus status = StepResultStatus::Completed) {
    StepResult r;
    r.step_index = index;
    r.agents = {agent};
    r.step_text = "step " + std::to_string(index);
    r.final_output = final_output;
    r.status = status;
    return r;
}

}  // namespace

TEST_CASE("one action appends exactly three short-term entries") {
    MemoryStore store;
    store.append_short_term("A", 1, make_action("A", 1));
    REQUIRE(store.entries().size() == 3);
    CHECK(store.entries()[0].kind == MemoryKind::Thought);
    CHECK(store.entries()[1].kind == MemoryKind::Plan);
    CHECK(store.entries()[2].kind == MemoryKind::Observation);
}

TEST_CASE("empty thoughts are still recorded") {
    MemoryStore store;
    store.append_short_term("A", 1, make_action("A", 1, ""));
    REQUIRE(store.entries().size() == 3);
    CHECK(store.entries()[0].text.empty());
}

TEST_CASE("five actions give fifteen entries with strictly increasing seq") {
    MemoryStore store;
    for (int i = 1; i <= 5; ++i) store.append_short_term("A", 1, make_action("A", i));
    REQUIRE(store.entries().size() == 15);
    for (size_t i = 1; i < store.entries().size(); ++i)
        CHECK(store.entries()[i].seq > store.entries()[i - 1].seq);
}

TEST_CASE("completed steps commit one task record carrying the final output") {
    MemoryStore store;
    auto entry = store.commit_long_term(make_result(2, "A", "the verbatim final output"));
    REQUIRE(entry.ok());
    CHECK(entry.value().scope == MemoryScope::LongTerm);
    CHECK(entry.value().kind == MemoryKind::TaskRecord);
    CHECK(entry.value().text.find("the verbatim final output") != std::string::npos);
    CHECK(store.entries().size() == 1);
}

TEST_CASE("failed steps never reach long-term memory") {
    MemoryStore store;
    auto entry = store.commit_long_term(make_result(1, "A", "x", StepResultStatus::Failed));
    REQUIRE_FALSE(entry.ok());
    CHECK(entry.error().code == "commit-failed-step");
    CHECK(store.entries().empty());
}

TEST_CASE("forced-final steps commit with the forced flag") {
    MemoryStore store;
    auto entry = store.commit_long_term(make_result(1, "A", "digest",
                                                    StepResultStatus::ForcedFinal));
    REQUIRE(entry.ok());
    CHECK(entry.value().forced);
}

TEST_CASE("empty stores assemble an empty bundle") {
    MemoryStore store;
    auto bundle = store.assemble_dynamic_context("A", "step", 1000);
    CHECK(bundle.entries.empty());
    CHECK(bundle.rendered.empty());
    CHECK(bundle.budget_used == 0);
}

TEST_CASE("a tight budget keeps the newest summary over an older raw entry") {
    MemoryStore store;
    // older large observation (~25 tokens), newer small summary (~5 tokens)
    store.append_short_term("A", 1,
                            make_action("A", 1, "", "",
                                        std::string(100, 'x')));  // obs est 25
    store.append_summary("A", 1, std::string(20, 's'));           // est 5
    auto bundle = store.assemble_dynamic_context("A", "step", 10);
    REQUIRE(bundle.entries.size() == 1);
    CHECK(bundle.entries[0].kind == MemoryKind::Summary);
    CHECK(bundle.budget_used <= 10);
}

TEST_CASE("a generous budget keeps task records and own summaries in seq order") {
    MemoryStore store;
    store.commit_long_term(make_result(1, "A", "r1"));
    store.append_summary("A", 1, "s1");
    store.commit_long_term(make_result(2, "B", "r2"));
    store.append_summary("B", 2, "hidden from A");
    auto bundle = store.assemble_dynamic_context("A", "step", 100000);
    REQUIRE(bundle.entries.size() == 3);  // two task records + A's own summary
    CHECK(bundle.entries[0].kind == MemoryKind::TaskRecord);
    CHECK(bundle.entries[1].kind == MemoryKind::Summary);
    CHECK(bundle.entries[2].kind == MemoryKind::TaskRecord);
    for (size_t i = 1; i < bundle.entries.size(); ++i)
        CHECK(bundle.entries[i].seq > bundle.entries[i - 1].seq);
}

TEST_CASE("other agents' thoughts and plans are never shared") {
    MemoryStore store;
    store.append_short_term("B", 1, make_action("B", 1, "private thought", "private plan",
                                                "observation B"));
    auto bundle = store.assemble_dynamic_context("A", "step", 100000);
    CHECK(bundle.entries.empty());

    // even the requesting agent's raw thoughts and plans stay out of bundles
    store.append_short_term("A", 2, make_action("A", 1, "own thought", "own plan", "own obs"));
    bundle = store.assemble_dynamic_context("A", "step", 100000);
    REQUIRE(bundle.entries.size() == 1);
    CHECK(bundle.entries[0].kind == MemoryKind::Observation);
}

TEST_CASE("budget zero trims everything") {
    std::vector<MemoryEntry> entries(3);
    for (int i = 0; i < 3; ++i) {
        entries[static_cast<size_t>(i)].text = "some text";
        entries[static_cast<size_t>(i)].seq = i + 1;
    }
    CHECK(trim_to_budget(entries, 0).empty());
}

TEST_CASE("trim is the identity when everything fits") {
    std::vector<MemoryEntry> entries(3);
    for (int i = 0; i < 3; ++i) {
        entries[static_cast<size_t>(i)].text = "abc";
        entries[static_cast<size_t>(i)].seq = i + 1;
    }
    auto kept = trim_to_budget(entries, 1000);
    REQUIRE(kept.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(kept[static_cast<size_t>(i)].seq == i + 1);
}

TEST_CASE("summaries outrank raw thoughts under pressure") {
    std::vector<MemoryEntry> entries;
    for (int i = 0; i < 4; ++i) {
        MemoryEntry e;
        e.seq = i + 1;
        e.kind = i % 2 == 0 ? MemoryKind::Summary : MemoryKind::Thought;
        e.text = std::string(40, 'x');  // est 10 each
        entries.push_back(e);
    }
    auto kept = trim_to_budget(entries, 20);  // room for two
    REQUIRE(kept.size() == 2);
    for (const auto& e : kept) CHECK(e.kind == MemoryKind::Summary);
}

TEST_CASE("assembly is deterministic and budget-safe over random stores") {
    std::mt19937 rng(5);
    for (int round = 0; round < 120; ++round) {
        MemoryStore store;
        int ops = static_cast<int>(rng() % 20);
        for (int i = 0; i < ops; ++i) {
            switch (rng() % 3) {
                case 0:
                    store.append_short_term(rng() % 2 ? "A" : "B", static_cast<int>(i),
                                            make_action("x", 1, "t", "p",
                                                        std::string(rng() % 60, 'o')));
                    break;
                case 1:
                    store.append_summary(rng() % 2 ? "A" : "B", static_cast<int>(i),
                                         std::string(rng() % 40, 's'));
                    break;
                default:
                    store.commit_long_term(make_result(static_cast<int>(i), "A",
                                                       std::string(rng() % 80, 'r')));
            }
        }
        long budget = static_cast<long>(rng() % 64);
        auto once = store.assemble_dynamic_context("A", "step", budget);
        auto twice = store.assemble_dynamic_context("A", "step", budget);
        CHECK(once.budget_used <= budget);
        CHECK(once.rendered == twice.rendered);
        CHECK(once.budget_used == twice.budget_used);

        long total = 0;
        for (const auto& e : once.entries) total += estimate_tokens(e.text);
        CHECK(total == once.budget_used);
    }
}

TEST_CASE("append-only: existing entries never change") {
    MemoryStore store;
    store.append_summary("A", 1, "first");
    auto before = store.entries()[0];
    store.append_summary("A", 2, "second");
    store.commit_long_term(make_result(1, "A", "r"));
    CHECK(store.entries()[0].text == before.text);
    CHECK(store.entries()[0].seq == before.seq);
    CHECK(store.entries().size() == 3);
}
