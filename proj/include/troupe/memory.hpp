#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "troupe/core.hpp"
#include "troupe/result.hpp"
#include "troupe/text.hpp"

namespace troupe {

// ---------------------------------------------------------------------------
// Tiered run memory: per-agent short-term records, run-level long-term task
// records, and budgeted on-demand assembly of both ("dynamic memory" is a
// query over the stores, not a third store).
// ---------------------------------------------------------------------------

enum class MemoryScope { ShortTerm, LongTerm };
enum class MemoryKind { Thought, Plan, Observation, Summary, TaskRecord };

inline const char* memory_kind_name(MemoryKind k) {
    switch (k) {
        case MemoryKind::Thought: return "thought";
        case MemoryKind::Plan: return "plan";
        case MemoryKind::Observation: return "observation";
        case MemoryKind::Summary: return "summary";
        case MemoryKind::TaskRecord: return "task-record";
    }
    return "unknown";
}

struct MemoryEntry {
    MemoryScope scope = MemoryScope::ShortTerm;
    std::string agent;  // empty = run scope
    int step_index = 0;
    MemoryKind kind = MemoryKind::Observation;
    std::string text;
    long seq = 0;  // strictly increasing per store
    bool forced = false;
};

// characters / 4, rounded up. A backend-agnostic estimate, not a tokenizer.
inline long estimate_tokens(std::string_view s) {
    return static_cast<long>((s.size() + 3) / 4);
}

// Assembly priority rank; lower outranks higher. Within a rank, newer (higher
// seq) outranks older. Raw thoughts and plans rank last: they are private
// working state and only trimming ever sees them.
inline int memory_priority_rank(const MemoryEntry& e) {
    if (e.scope == MemoryScope::LongTerm && e.kind == MemoryKind::TaskRecord) return 0;
    switch (e.kind) {
        case MemoryKind::Summary: return 1;
        case MemoryKind::Observation: return 2;
        case MemoryKind::Plan: return 3;
        case MemoryKind::Thought: return 4;
        case MemoryKind::TaskRecord: return 0;
    }
    return 4;
}

// True when a should be dropped before b.
inline bool memory_weaker(const MemoryEntry& a, const MemoryEntry& b) {
    int ra = memory_priority_rank(a), rb = memory_priority_rank(b);
    if (ra != rb) return ra > rb;
    return a.seq < b.seq;
}

// Drops lowest-priority entries until the estimated size fits the budget.
// Never splits an entry; kept entries stay in their input order.
inline std::vector<MemoryEntry> trim_to_budget(std::vector<MemoryEntry> entries, long budget) {
    long total = 0;
    for (const auto& e : entries) total += estimate_tokens(e.text);
    while (total > budget && !entries.empty()) {
        size_t weakest = 0;
        for (size_t i = 1; i < entries.size(); ++i)
            if (memory_weaker(entries[i], entries[weakest])) weakest = i;
        total -= estimate_tokens(entries[weakest].text);
        entries.erase(entries.begin() + static_cast<long>(weakest));
    }
    return entries;
}

struct ContextBundle {
    std::vector<MemoryEntry> entries;  // seq order
    std::string rendered;              // entry texts joined with '\n'
    long budget_used = 0;
};

// Append-only within a run; single writer.
class MemoryStore {
public:
    const std::vector<MemoryEntry>& entries() const { return entries_; }

    // Records one refinement action as three consecutive short-term entries
    // (thought, plan, observation). Empty texts are recorded as such.
    void append_short_term(const std::string& agent, int step_index,
                           const RefinementAction& action) {
        push(MemoryScope::ShortTerm, agent, step_index, MemoryKind::Thought, action.thought);
        push(MemoryScope::ShortTerm, agent, step_index, MemoryKind::Plan, action.plan);
        push(MemoryScope::ShortTerm, agent, step_index, MemoryKind::Observation,
             action.observation);
    }

    // The step's own final summary, kept per agent in short-term memory.
    void append_summary(const std::string& agent, int step_index, const std::string& summary) {
        push(MemoryScope::ShortTerm, agent, step_index, MemoryKind::Summary, summary);
    }

    // One task-record per completed step: what ran, who ran it, and the final
    // output (which is the step's own summary).
    Result<MemoryEntry> commit_long_term(const StepResult& result) {
        if (result.status == StepResultStatus::Failed)
            return Error{"commit-failed-step",
                         "failed steps are not recorded in long-term memory"};
        std::string body = "Step " + std::to_string(result.step_index) + " (" +
                           text::join(result.agents, ", ") + "): " + result.step_text +
                           "\nResult: " + result.final_output;
        MemoryEntry e;
        e.scope = MemoryScope::LongTerm;
        e.agent = "";
        e.step_index = result.step_index;
        e.kind = MemoryKind::TaskRecord;
        e.text = std::move(body);
        e.forced = result.status == StepResultStatus::ForcedFinal;
        e.seq = ++seq_;
        entries_.push_back(e);
        return entries_.back();
    }

    // Budgeted context assembly for one agent: long-term task records, the
    // agent's own summaries, then its raw observations; trimmed to budget and
    // rendered in seq order. Pure in (stores, agent, budget).
    ContextBundle assemble_dynamic_context(const std::string& requesting_agent,
                                           const std::string& /*step_text*/, long budget) const {
        std::vector<MemoryEntry> candidates;
        for (const auto& e : entries_) {
            if (e.scope == MemoryScope::LongTerm && e.kind == MemoryKind::TaskRecord) {
                candidates.push_back(e);
            } else if (e.scope == MemoryScope::ShortTerm && e.agent == requesting_agent &&
                       (e.kind == MemoryKind::Summary || e.kind == MemoryKind::Observation)) {
                candidates.push_back(e);
            }
        }
        auto kept = trim_to_budget(std::move(candidates), budget);
        std::sort(kept.begin(), kept.end(),
                  [](const MemoryEntry& a, const MemoryEntry& b) { return a.seq < b.seq; });
        ContextBundle bundle;
        std::vector<std::string> texts;
        for (const auto& e : kept) {
            bundle.budget_used += estimate_tokens(e.text);
            texts.push_back(e.text);
        }
        bundle.entries = std::move(kept);
        bundle.rendered = text::join(texts, "\n");
        return bundle;
    }

    // Long-term digest for the action observer, which can see everything.
    std::string long_term_digest(long budget) const {
        return assemble_dynamic_context("", "", budget).rendered;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : entries_) {
            nlohmann::ordered_json j;
            j["seq"] = e.seq;
            j["scope"] = e.scope == MemoryScope::ShortTerm ? "short-term" : "long-term";
            j["agent"] = e.agent;
            j["step"] = e.step_index;
            j["kind"] = memory_kind_name(e.kind);
            j["forced"] = e.forced;
            j["text"] = e.text;
            arr.push_back(std::move(j));
        }
        return arr;
    }

private:
    void push(MemoryScope scope, const std::string& agent, int step_index, MemoryKind kind,
              const std::string& body) {
        MemoryEntry e;
        e.scope = scope;
        e.agent = agent;
        e.step_index = step_index;
        e.kind = kind;
        e.text = body;
        e.seq = ++seq_;
        entries_.push_back(std::move(e));
    }

    std::vector<MemoryEntry> entries_;
    long seq_ = 0;
};

}  // namespace troupe
