#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "troupe/text.hpp"

namespace troupe {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class AgentOrigin { SelectedExisting, NewlyCreated };

// A generated expert role. `prompt` is the rendered role prompt, `description`
// its expertise domain, `toolset` the tool names it may use, `suggestions`
// its execution advice.
struct AgentSpec {
    std::string name;
    std::string description;
    std::string prompt;
    std::vector<std::string> toolset;
    std::string suggestions;
    AgentOrigin origin = AgentOrigin::NewlyCreated;
};

enum class StepStatus { Pending, InProgress, Done };

struct PlanStep {
    int index = 0;  // 1-based
    std::vector<std::string> assigned_agents;
    std::string description;
    std::string expected_output;
    std::string required_inputs;
    std::string raw_text;  // full list-item text as parsed, when available
    bool synthesized = false;
};

struct ExecutionPlan {
    std::vector<PlanStep> steps;
    std::vector<StepStatus> status;  // parallel to steps; engine bookkeeping only

    void reset_status() { status.assign(steps.size(), StepStatus::Pending); }
};

struct Task {
    std::string id;
    std::string text;
};

struct TeamDraft {
    std::vector<AgentSpec> selected_roles;
    std::vector<AgentSpec> created_roles;
    ExecutionPlan plan;
    int revision = 0;

    std::vector<const AgentSpec*> all_roles() const {
        std::vector<const AgentSpec*> out;
        for (const auto& r : selected_roles) out.push_back(&r);
        for (const auto& r : created_roles) out.push_back(&r);
        return out;
    }

    const AgentSpec* find_role(std::string_view name) const {
        for (const auto* r : all_roles())
            if (text::iequals(r->name, name)) return r;
        return nullptr;
    }
};

// One self-refinement iteration: a thought, the local plan for the current
// step, and the observed outcome of the chosen tool.
struct RefinementAction {
    int iteration = 1;  // 1-based; bounded by the refinement cap
    std::string agent;
    std::string thought;
    std::string plan;         // the CurrentStep text
    std::string observation;  // tool output, or the final summary
    std::string tool_used;
    bool is_final = false;
};

enum class StepResultStatus { Completed, ForcedFinal, Failed };

inline const char* step_result_status_name(StepResultStatus s) {
    switch (s) {
        case StepResultStatus::Completed: return "completed";
        case StepResultStatus::ForcedFinal: return "forced-final";
        case StepResultStatus::Failed: return "failed";
    }
    return "unknown";
}

struct StepResult {
    int step_index = 0;
    std::vector<std::string> agents;
    std::string step_text;
    std::vector<RefinementAction> actions;
    std::string final_output;
    StepResultStatus status = StepResultStatus::Failed;
};

enum class CritiqueVerdict { NoSuggestions, HasSuggestions };

// The sentinel an observer must emit verbatim in its Suggestions section to
// signal approval.
inline constexpr const char* kNoSuggestionsSentinel = "No Suggestions";

struct Critique {
    std::string body;  // full Suggestions section text
    CritiqueVerdict verdict = CritiqueVerdict::HasSuggestions;

    bool clean() const { return verdict == CritiqueVerdict::NoSuggestions; }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// One violated invariant. `code` is machine-readable and may embed a detail
// after a colon (e.g. "unknown-tool:Google Search"). `step_index` is the
// 1-based plan step when the violation is about a step, else 0.
struct Violation {
    std::string code;
    std::string subject;  // role name or step text the violation is about
    int step_index = 0;
};

using ValidationReport = std::vector<Violation>;

inline bool report_has(const ValidationReport& report, std::string_view code) {
    for (const auto& v : report)
        if (v.code == code) return true;
    return false;
}

inline bool report_has_prefix(const ValidationReport& report, std::string_view prefix) {
    for (const auto& v : report)
        if (v.code.rfind(prefix, 0) == 0) return true;
    return false;
}

inline std::string report_to_string(const ValidationReport& report) {
    std::string out;
    for (const auto& v : report) {
        out += "- " + v.code;
        if (!v.subject.empty()) out += " (" + v.subject + ")";
        if (v.step_index > 0) out += " at step " + std::to_string(v.step_index);
        out += "\n";
    }
    return out;
}

// A role qualifies as the language-expert summarizer when its name or
// description contains the token "language expert" (case-insensitive).
inline bool is_language_expert(const AgentSpec& spec) {
    return text::icontains(spec.name, "language expert") ||
           text::icontains(spec.description, "language expert");
}

// The final plan step must carry the summary marker: its text, reconstructed
// as "agents: description", starts with "language expert:" (case-insensitive).
inline bool final_step_has_language_expert_marker(const PlanStep& step) {
    std::string agents = text::join(step.assigned_agents, ", ");
    std::string reconstructed = agents.empty() ? step.description : agents + ": " + step.description;
    return text::istarts_with(reconstructed, "language expert:") ||
           text::istarts_with(text::trim(step.description), "language expert:");
}

// Checks one AgentSpec against its invariants. Total: violations are data,
// not failures. Name uniqueness is a team-level concern (validate_team).
inline ValidationReport validate_agent_spec(const AgentSpec& spec,
                                            const std::set<std::string>& registered_tools) {
    ValidationReport report;
    if (text::trim(spec.name).empty()) report.push_back({"empty-name", spec.name});
    for (const auto& tool : spec.toolset) {
        bool known = false;
        for (const auto& reg : registered_tools)
            if (text::iequals(text::trim(tool), reg)) known = true;
        if (!known) report.push_back({"unknown-tool:" + tool, spec.name});
    }
    if (text::trim(spec.prompt).empty()) {
        report.push_back({"empty-prompt", spec.name});
    } else {
        // Per the role-prompt format "You are [description], named [name]".
        if (!text::trim(spec.name).empty() &&
            spec.prompt.find(spec.name) == std::string::npos)
            report.push_back({"prompt-missing-name", spec.name});
        if (!spec.description.empty() &&
            spec.prompt.find(spec.description) == std::string::npos)
            report.push_back({"prompt-missing-description", spec.name});
    }
    return report;
}

// Checks plan-level invariants against the team: agents resolve, indices are
// contiguous from 1, and the final step carries the language-expert marker.
inline ValidationReport validate_plan(const ExecutionPlan& plan, const TeamDraft& team) {
    ValidationReport report;
    if (plan.steps.empty()) {
        report.push_back({"empty-plan", ""});
        return report;
    }
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& step = plan.steps[i];
        int expected = static_cast<int>(i) + 1;
        if (step.index != expected) {
            report.push_back({"non-contiguous-steps",
                              "expected index " + std::to_string(expected) + ", found " +
                                  std::to_string(step.index),
                              step.index});
        }
        if (step.assigned_agents.empty())
            report.push_back({"no-assigned-agents", step.description, step.index});
        for (const auto& name : step.assigned_agents) {
            if (!team.find_role(name))
                report.push_back({"unknown-agent", name, step.index});
        }
    }
    if (!final_step_has_language_expert_marker(plan.steps.back()))
        report.push_back({"final-step-not-language-expert", plan.steps.back().description,
                          plan.steps.back().index});
    return report;
}

// Aggregates per-role checks, team-level checks (duplicate names, exactly one
// language expert), and plan validation.
inline ValidationReport validate_team(const TeamDraft& draft,
                                      const std::set<std::string>& registered_tools) {
    ValidationReport report;
    auto roles = draft.all_roles();

    std::set<std::string> seen;
    for (const auto* role : roles) {
        auto key = text::to_lower(text::trimmed(role->name));
        if (!key.empty() && !seen.insert(key).second)
            report.push_back({"duplicate-name", role->name});
    }

    int experts = 0;
    for (const auto* role : roles)
        if (is_language_expert(*role)) ++experts;
    if (experts == 0) report.push_back({"missing-language-expert", ""});
    if (experts > 1) report.push_back({"multiple-language-experts", ""});

    for (const auto* role : roles) {
        auto sub = validate_agent_spec(*role, registered_tools);
        report.insert(report.end(), sub.begin(), sub.end());
    }

    auto plan_report = validate_plan(draft.plan, draft);
    report.insert(report.end(), plan_report.begin(), plan_report.end());
    return report;
}

// ---------------------------------------------------------------------------
// Canonical serialized form
// ---------------------------------------------------------------------------
// Role blobs use the wire keys the prompts round-trip: name, description,
// tools, suggestions, prompt. Plans serialize as a numbered-step array.

inline ordered_json role_to_json(const AgentSpec& spec) {
    ordered_json j;
    j["name"] = spec.name;
    j["description"] = spec.description;
    j["tools"] = spec.toolset;
    j["suggestions"] = spec.suggestions;
    j["prompt"] = spec.prompt;
    return j;
}

inline ordered_json step_to_json(const PlanStep& step) {
    ordered_json j;
    j["index"] = step.index;
    j["agents"] = step.assigned_agents;
    j["description"] = step.description;
    j["expected_output"] = step.expected_output;
    j["required_inputs"] = step.required_inputs;
    return j;
}

inline ordered_json plan_to_json(const ExecutionPlan& plan) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : plan.steps) arr.push_back(step_to_json(s));
    return arr;
}

inline ordered_json team_to_json(const TeamDraft& draft) {
    ordered_json j;
    ordered_json sel = ordered_json::array();
    for (const auto& r : draft.selected_roles) sel.push_back(role_to_json(r));
    ordered_json cre = ordered_json::array();
    for (const auto& r : draft.created_roles) cre.push_back(role_to_json(r));
    j["selected_roles"] = sel;
    j["created_roles"] = cre;
    j["plan"] = plan_to_json(draft.plan);
    return j;
}

inline AgentSpec role_from_json(const json& j, AgentOrigin origin = AgentOrigin::NewlyCreated) {
    AgentSpec spec;
    spec.origin = origin;
    spec.name = j.value("name", "");
    spec.description = j.value("description", "");
    spec.suggestions = j.value("suggestions", "");
    spec.prompt = j.value("prompt", "");
    if (j.contains("tools")) {
        const auto& tools = j.at("tools");
        if (tools.is_array()) {
            for (const auto& t : tools)
                if (t.is_string()) spec.toolset.push_back(t.get<std::string>());
        } else if (tools.is_string() && !tools.get<std::string>().empty()) {
            spec.toolset.push_back(tools.get<std::string>());
        }
    }
    return spec;
}

inline PlanStep step_from_json(const json& j) {
    PlanStep step;
    step.index = j.value("index", 0);
    if (j.contains("agents"))
        for (const auto& a : j.at("agents"))
            if (a.is_string()) step.assigned_agents.push_back(a.get<std::string>());
    step.description = j.value("description", "");
    step.expected_output = j.value("expected_output", "");
    step.required_inputs = j.value("required_inputs", "");
    return step;
}

inline TeamDraft team_from_json(const json& j) {
    TeamDraft draft;
    if (j.contains("selected_roles"))
        for (const auto& r : j.at("selected_roles"))
            draft.selected_roles.push_back(role_from_json(r, AgentOrigin::SelectedExisting));
    if (j.contains("created_roles"))
        for (const auto& r : j.at("created_roles"))
            draft.created_roles.push_back(role_from_json(r, AgentOrigin::NewlyCreated));
    if (j.contains("plan"))
        for (const auto& s : j.at("plan")) draft.plan.steps.push_back(step_from_json(s));
    draft.plan.reset_status();
    return draft;
}

// Renders a step back to its numbered-list line form.
inline std::string render_step_line(const PlanStep& step) {
    std::string line = std::to_string(step.index) + ". ";
    if (!step.assigned_agents.empty()) line += text::join(step.assigned_agents, ", ") + ": ";
    line += step.description;
    if (!step.expected_output.empty()) line += " Expected output: " + step.expected_output;
    if (!step.required_inputs.empty()) line += " Input: " + step.required_inputs;
    return line;
}

inline std::string render_plan(const ExecutionPlan& plan) {
    std::string out;
    for (const auto& s : plan.steps) out += render_step_line(s) + "\n";
    return out;
}

}  // namespace troupe
