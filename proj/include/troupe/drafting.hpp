#pragma once

#include <optional>
#include <string>
#include <vector>

#include "troupe/calls.hpp"
#include "troupe/core.hpp"
#include "troupe/prompts.hpp"
#include "troupe/provider.hpp"
#include "troupe/toolkit.hpp"
#include "troupe/trace.hpp"

namespace troupe {

// ---------------------------------------------------------------------------
// Drafting stage: the planner proposes a team draft, the agent observer and
// plan observer critique it, the planner revises; the loop ends when both
// observers say "No Suggestions" in the same round or the round cap is hit.
// ---------------------------------------------------------------------------

enum class DraftingOutcome { InProgress, Converged, CapReached, Failed };

inline const char* drafting_outcome_name(DraftingOutcome o) {
    switch (o) {
        case DraftingOutcome::InProgress: return "in-progress";
        case DraftingOutcome::Converged: return "converged";
        case DraftingOutcome::CapReached: return "cap-reached";
        case DraftingOutcome::Failed: return "failed";
    }
    return "unknown";
}

struct DraftingConfig {
    int round_cap = 3;        // the drafting discussion bound
    int reprompt_budget = 2;  // extra attempts per model call on parse failure
    std::string existing_roles_text = "None";  // serialized role library
    double temperature = 0.0;
    std::optional<int> max_tokens;
};

struct DraftingState {
    Task task;
    std::optional<TeamDraft> draft;
    int round = 0;
    Transcript history;
    int round_cap = 3;
    DraftingOutcome outcome = DraftingOutcome::InProgress;
};

struct DraftingResult {
    TeamDraft team;
    DraftingState state;
};

struct CritiquePair {
    Critique agent_critique;
    Critique plan_critique;

    bool both_clean() const { return agent_critique.clean() && plan_critique.clean(); }
};

// Code-level pre-check on raw planner output, ahead of any LLM critique:
// extract role blobs per section, parse the plan list, and validate the
// assembled draft. Rejections enumerate violation codes so the caller can
// reprompt deterministically.
inline Result<TeamDraft> structural_gate(const std::string& raw_planner_output,
                                         const ToolRegistry& registry) {
    static const std::vector<std::string> sections = {
        "Thought",        "Selected Roles", "Selected Roles List", "Created Roles",
        "Created Roles List", "Execution Plan", "Anything UNCLEAR"};

    TeamDraft draft;
    std::string problems;

    auto selected = find_first_section(raw_planner_output,
                                       {"Selected Roles List", "Selected Roles"}, sections);
    auto created = find_first_section(raw_planner_output,
                                      {"Created Roles List", "Created Roles"}, sections);

    auto collect = [&](const std::string& body, AgentOrigin origin,
                       std::vector<AgentSpec>& into) {
        auto scan = scan_role_blobs(body, origin);
        for (auto& spec : scan.specs) into.push_back(std::move(spec));
        for (const auto& issue : scan.issues)
            problems += "- malformed-blob: missing keys [" +
                        text::join(issue.missing_keys, ", ") + "]\n";
    };

    if (selected || created) {
        if (selected) collect(*selected, AgentOrigin::SelectedExisting, draft.selected_roles);
        if (created) collect(*created, AgentOrigin::NewlyCreated, draft.created_roles);
    } else {
        collect(raw_planner_output, AgentOrigin::NewlyCreated, draft.created_roles);
    }
    if (draft.selected_roles.empty() && draft.created_roles.empty() && problems.empty())
        problems += "- no-blobs-found: output no expert role JSON blobs\n";

    auto plan_body = find_section(raw_planner_output, "Execution Plan", sections);
    auto steps = parse_plan_steps(plan_body ? *plan_body : raw_planner_output);
    if (!steps.ok()) {
        problems += "- " + steps.error().code + ": " + steps.error().message + "\n";
    } else {
        draft.plan.steps = steps.value();
        draft.plan.reset_status();
    }

    if (problems.empty()) {
        auto report = validate_team(draft, registry.name_set());
        if (!report.empty()) problems += report_to_string(report);
    }
    if (!problems.empty())
        return Error{"structural-reject", "the draft violates structural requirements:\n" +
                                              problems};
    return draft;
}

namespace detail {

inline std::string roles_outline(const TeamDraft& draft) {
    std::string out;
    for (const auto* role : draft.all_roles())
        out += "- " + role->name + ": " + role->description + "\n";
    return out.empty() ? "None" : out;
}

inline std::string roles_blob_list(const std::vector<AgentSpec>& roles) {
    if (roles.empty()) return "None";
    std::string out;
    for (const auto& role : roles) out += role_to_json(role).dump(2) + "\n";
    return out;
}

}  // namespace detail

// Runs both observers over the draft: agent observer first, then plan
// observer. Exactly two logical model calls; both critiques are appended to
// the history.
inline Result<CritiquePair> critique_round(const TeamDraft& draft, const Task& task,
                                           DraftingState& state, const DraftingConfig& config,
                                           Provider& provider, TraceWriter& trace,
                                           const ToolRegistry& registry,
                                           const TemplateStore& templates) {
    auto run_observer = [&](PromptKind kind, const Bindings& bindings,
                            const std::string& speaker) -> Result<Critique> {
        auto rendered = render_prompt(kind, bindings, templates);
        if (!rendered.ok()) return rendered.error();
        CompletionRequest request;
        request.user_text = rendered.value();
        request.temperature = config.temperature;
        request.max_tokens = config.max_tokens;
        request.tag = std::string(prompt_kind_name(kind)) + ":round" +
                      std::to_string(state.round);
        return call_and_parse<Critique>(
            provider, trace, request,
            [](const std::string& body) { return parse_critique(body); }, "parse_critique",
            config.reprompt_budget, &state.history, speaker);
    };

    Bindings agent_bindings = {
        {"question", task.text},
        {"existing_roles", config.existing_roles_text},
        {"selected_roles", detail::roles_blob_list(draft.selected_roles)},
        {"created_roles", detail::roles_blob_list(draft.created_roles)},
        {"history", render_transcript(state.history)},
        {"tools", registry.names_csv()},
        {"format_example", templates.format_example_for(PromptKind::AgentObserver)},
    };
    auto agent_critique = run_observer(PromptKind::AgentObserver, agent_bindings,
                                       "Agent Observer");
    if (!agent_critique.ok()) return agent_critique.error();

    Bindings plan_bindings = {
        {"context", task.text},
        {"roles", detail::roles_outline(draft)},
        {"plan", render_plan(draft.plan)},
        {"history", render_transcript(state.history)},
        {"format_example", templates.format_example_for(PromptKind::PlanObserver)},
    };
    auto plan_critique = run_observer(PromptKind::PlanObserver, plan_bindings, "Plan Observer");
    if (!plan_critique.ok()) return plan_critique.error();

    trace.record_transition("critique-round",
                            {{"round", state.round},
                             {"agent_clean", agent_critique.value().clean()},
                             {"plan_clean", plan_critique.value().clean()}});
    return CritiquePair{agent_critique.value(), plan_critique.value()};
}

// Full drafting loop. Terminates within round_cap rounds of one planner call
// plus two observer calls (plus the bounded reprompt budget). On cap-reached
// — or on a reprompt budget exhausted after a valid draft already exists —
// the last structurally valid draft is returned.
inline Result<DraftingResult> run_drafting(const Task& task, const DraftingConfig& config,
                                           Provider& provider, TraceWriter& trace,
                                           const ToolRegistry& registry,
                                           const TemplateStore& templates) {
    trace.set_phase(Phase::Drafting);
    DraftingState state;
    state.task = task;
    state.round_cap = config.round_cap;

    std::optional<TeamDraft> last_valid;
    std::string suggestions = "None";

    auto finish_capped = [&]() -> Result<DraftingResult> {
        state.outcome = DraftingOutcome::CapReached;
        state.draft = *last_valid;
        trace.record_transition("drafting-outcome", {{"outcome", "cap-reached"},
                                                     {"rounds", state.round}});
        return DraftingResult{*last_valid, state};
    };

    for (int round = 1; round <= config.round_cap; ++round) {
        state.round = round;
        trace.record_transition("drafting-round", {{"round", round}});

        Bindings planner_bindings = {
            {"context", task.text},
            {"existing_roles", config.existing_roles_text},
            {"history", render_transcript(state.history)},
            {"tools", registry.names_csv()},
            {"format_example", templates.format_example_for(PromptKind::Planner)},
            {"suggestions", suggestions},
        };
        auto rendered = render_prompt(PromptKind::Planner, planner_bindings, templates);
        if (!rendered.ok()) return rendered.error();
        CompletionRequest request;
        request.user_text = rendered.value();
        request.temperature = config.temperature;
        request.max_tokens = config.max_tokens;
        request.tag = "planner:round" + std::to_string(round);

        auto draft = call_and_parse<TeamDraft>(
            provider, trace, request,
            [&](const std::string& body) { return structural_gate(body, registry); },
            "structural_gate", config.reprompt_budget, &state.history, "Planner");
        if (!draft.ok()) {
            if (draft.error().code == "structural-reject" && last_valid) return finish_capped();
            if (draft.error().code == "structural-reject")
                return Error{"drafting-failed", draft.error().message};
            return draft.error();  // provider errors propagate
        }

        TeamDraft team = std::move(draft).take();
        team.revision = round - 1;
        state.draft = team;
        last_valid = team;
        trace.record_transition("draft-accepted",
                                {{"round", round},
                                 {"roles", static_cast<int>(team.all_roles().size())},
                                 {"steps", static_cast<int>(team.plan.steps.size())}});

        auto critiques = critique_round(team, task, state, config, provider, trace, registry,
                                        templates);
        if (!critiques.ok()) {
            auto code = critiques.error().code;
            bool parse_class = code.rfind("missing-suggestions-section", 0) == 0;
            if (parse_class && last_valid) return finish_capped();
            if (parse_class) return Error{"drafting-failed", critiques.error().message};
            return critiques.error();
        }

        if (critiques.value().both_clean()) {
            state.outcome = DraftingOutcome::Converged;
            trace.record_transition("drafting-outcome",
                                    {{"outcome", "converged"}, {"rounds", round}});
            return DraftingResult{team, state};
        }

        suggestions = "Agent Observer:\n" + critiques.value().agent_critique.body +
                      "\n\nPlan Observer:\n" + critiques.value().plan_critique.body;
    }

    if (last_valid) return finish_capped();
    state.outcome = DraftingOutcome::Failed;
    return Error{"drafting-failed", "no structurally valid draft within the round cap"};
}

}  // namespace troupe
