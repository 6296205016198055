#pragma once

#include <optional>
#include <string>
#include <vector>

#include "troupe/calls.hpp"
#include "troupe/core.hpp"
#include "troupe/memory.hpp"
#include "troupe/prompts.hpp"
#include "troupe/provider.hpp"
#include "troupe/toolkit.hpp"
#include "troupe/trace.hpp"

namespace troupe {

// ---------------------------------------------------------------------------
// Execution stage: the action observer selects and dispatches steps; single
// agents run the self-refinement loop, multi-agent steps run collaborative
// refinement; results accumulate in memory until the plan completes.
// Strictly sequential within a run (vertical communication).
// ---------------------------------------------------------------------------

enum class ExecutionOutcome { InProgress, Done, Failed };

inline const char* execution_outcome_name(ExecutionOutcome o) {
    switch (o) {
        case ExecutionOutcome::InProgress: return "in-progress";
        case ExecutionOutcome::Done: return "done";
        case ExecutionOutcome::Failed: return "failed";
    }
    return "unknown";
}

struct ExecutionConfig {
    int refinement_cap = 5;    // self-refinement iterations per step
    int collab_max_rounds = 5; // collaborative refinement rounds per step
    int reprompt_budget = 2;
    bool forced_final = true;  // cap exhaustion yields a digest, not a failure
    int synthesized_step_bound = 2;  // observer-invented verification steps per run
    long memory_budget = 6000;
    double temperature = 0.0;
    std::optional<int> max_tokens;
};

struct ExecutionEnv {
    Provider& provider;
    TraceWriter& trace;
    const ToolRegistry& registry;
    const TemplateStore& templates;
    MemoryStore& memory;
    Workspace& workspace;
};

struct ExecutionState {
    ExecutionPlan plan;
    std::vector<StepResult> results;
    std::string history_digest;
    ExecutionOutcome outcome = ExecutionOutcome::InProgress;
    int synthesized_count = 0;
};

struct StepSelection {
    std::vector<std::string> agent_names;
    std::string step_text;
    std::string relevant_history;
    int step_index = 0;
    bool synthesized = false;
};

inline bool is_provider_error(const std::string& code) {
    return code == "transport" || code == "backend-rejection" || code == "script-exhausted" ||
           code == "replay-divergence";
}

namespace detail {

inline std::string norm_match(std::string_view s) { return text::collapse_ws(text::to_lower(s)); }

inline bool agents_equal(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!text::iequals(text::trim(a[i]), text::trim(b[i]))) return false;
    return true;
}

// Whether the observer's NextStep names an unfinished plan step. Compared
// after case folding and whitespace collapsing; falls back to an echoed step
// number plus matching agents.
inline bool selection_matches_step(const NextStepParse& parsed, const PlanStep& step) {
    std::string sel_full =
        norm_match(text::join(parsed.agent_names, ", ") + ": " + parsed.step_text);
    std::string sel_text = norm_match(parsed.step_text);

    std::string cand_desc = norm_match(step.description);
    std::string cand_full = norm_match(text::join(step.assigned_agents, ", ") + ": " +
                                       step.description +
                                       (step.expected_output.empty()
                                            ? ""
                                            : " Expected output: " + step.expected_output) +
                                       (step.required_inputs.empty()
                                            ? ""
                                            : " Input: " + step.required_inputs));
    if (sel_full == cand_full || sel_text == cand_desc) return true;
    if (!step.raw_text.empty()) {
        int number = 0;
        std::string rest;
        std::string raw = step.raw_text;
        if (match_numbered_item(raw, number, rest)) raw = rest;
        if (sel_full == norm_match(raw) || sel_text == norm_match(raw)) return true;
    }
    if (sel_text.size() >= 16 &&
        (cand_desc.find(sel_text) != std::string::npos ||
         sel_text.find(cand_desc) != std::string::npos))
        return true;
    if (parsed.step_index_hint == step.index &&
        agents_equal(parsed.agent_names, step.assigned_agents))
        return true;
    return false;
}

inline std::string render_actions(const std::vector<RefinementAction>& actions) {
    if (actions.empty()) return "None";
    std::string out;
    for (const auto& a : actions) {
        out += "## Iteration " + std::to_string(a.iteration) + " (" + a.agent + ")\n";
        if (!a.thought.empty()) out += "Thought: " + a.thought + "\n";
        out += "CurrentStep: " + a.plan + "\n";
        out += "Action: " + a.tool_used + "\n";
        out += "Observation: " + a.observation + "\n\n";
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

// The tool list an agent may act with: its toolset (canonical casing) plus
// the terminal Final Output, which every agent uses to end its step.
inline std::string agent_tools_csv(const AgentSpec& agent, const ToolRegistry& registry) {
    std::vector<std::string> names;
    bool has_final = false;
    for (const auto& raw : agent.toolset) {
        const ToolDef* def = registry.find(raw);
        std::string canonical = def ? def->name : text::trimmed(raw);
        if (text::iequals(canonical, kFinalOutputTool)) has_final = true;
        names.push_back(canonical);
    }
    if (!has_final) names.emplace_back(kFinalOutputTool);
    return text::join(names, ", ");
}

struct TurnOutcome {
    RefinementAction action;
    bool terminal = false;
    std::string final_text;
};

// One refinement turn: render the agent prompt, parse the action sections,
// execute the tool, and feed everything into short-term memory. Tool failures
// come back as observations so the next turn can self-correct.
inline Result<TurnOutcome> run_turn(const AgentSpec& agent, const std::string& step_text,
                                    int step_index, int iteration,
                                    const std::vector<RefinementAction>& prior,
                                    const std::string& tag, const ExecutionConfig& config,
                                    ExecutionEnv& env) {
    auto bundle = env.memory.assemble_dynamic_context(agent.name, step_text,
                                                      config.memory_budget);
    Bindings bindings = {
        {"role", agent.prompt},
        {"context", step_text},
        {"suggestions", agent.suggestions.empty() ? "None" : agent.suggestions},
        {"previous", bundle.rendered.empty() ? "None" : bundle.rendered},
        {"completed_steps", render_actions(prior)},
        {"tool", agent_tools_csv(agent, env.registry)},
        {"format_example", env.templates.format_example_for(PromptKind::CustomAgent)},
    };
    auto rendered = render_prompt(PromptKind::CustomAgent, bindings, env.templates);
    if (!rendered.ok()) return rendered.error();

    CompletionRequest request;
    request.user_text = rendered.value();
    request.temperature = config.temperature;
    request.max_tokens = config.max_tokens;
    request.tag = tag;
    auto parsed = call_and_parse<AgentActionParse>(
        env.provider, env.trace, request,
        [](const std::string& body) { return parse_agent_action(body); }, "parse_agent_action",
        config.reprompt_budget);
    if (!parsed.ok()) return parsed.error();
    const auto& act = parsed.value();

    auto execution = env.registry.execute(act.action, act.action_input, env.workspace);
    env.trace.record_tool(act.action, execution.terminal, execution.observation);

    TurnOutcome outcome;
    outcome.action.iteration = iteration;
    outcome.action.agent = agent.name;
    outcome.action.thought = act.thought;
    outcome.action.plan = act.current_step;
    outcome.action.observation = execution.observation;
    const ToolDef* def = env.registry.find(act.action);
    outcome.action.tool_used = def ? def->name : act.action;
    outcome.action.is_final = execution.terminal;
    outcome.terminal = execution.terminal;
    if (execution.terminal) outcome.final_text = act.action_input;

    env.memory.append_short_term(agent.name, step_index, outcome.action);
    return outcome;
}

inline std::string observations_digest(const std::vector<RefinementAction>& actions) {
    std::vector<std::string> parts;
    for (const auto& a : actions) parts.push_back(a.observation);
    return text::join(parts, "\n");
}

}  // namespace detail

// Bounded loop of thought, plan, execution, and feedback for one agent on one
// step. Stops at the first Final Output; at cap exhaustion the forced-final
// policy turns the observations into a digest result so downstream steps
// still receive inputs.
inline Result<StepResult> self_refine(const AgentSpec& agent, const std::string& step_text,
                                      int step_index, const ExecutionConfig& config,
                                      ExecutionEnv& env) {
    StepResult result;
    result.step_index = step_index;
    result.agents = {agent.name};
    result.step_text = step_text;
    for (int iteration = 1; iteration <= config.refinement_cap; ++iteration) {
        std::string tag = "custom-agent:step" + std::to_string(step_index) + ":iter" +
                          std::to_string(iteration);
        auto turn = detail::run_turn(agent, step_text, step_index, iteration, result.actions,
                                     tag, config, env);
        if (!turn.ok()) return turn.error();
        result.actions.push_back(turn.value().action);
        if (turn.value().terminal) {
            result.final_output = turn.value().final_text;
            result.status = StepResultStatus::Completed;
            return result;
        }
    }
    if (!config.forced_final)
        return Error{"refinement-failed", "no Final Output within " +
                                              std::to_string(config.refinement_cap) +
                                              " iterations at step " +
                                              std::to_string(step_index)};
    result.final_output = detail::observations_digest(result.actions);
    result.status = StepResultStatus::ForcedFinal;
    env.trace.record_transition("forced-final", {{"step", step_index},
                                                 {"iterations", config.refinement_cap}});
    return result;
}

// Fixed-order turn-taking over the assigned agents; each turn sees the
// concatenated prior utterances. A turn whose action is Final Output is the
// consensus and ends the step immediately; no turns run after it.
inline Result<StepResult> collaborative_refine(const std::vector<const AgentSpec*>& agents,
                                               const std::string& step_text, int step_index,
                                               const ExecutionConfig& config,
                                               ExecutionEnv& env) {
    StepResult result;
    result.step_index = step_index;
    result.step_text = step_text;
    for (const auto* a : agents) result.agents.push_back(a->name);

    int turn_number = 0;
    for (int round = 1; round <= config.collab_max_rounds; ++round) {
        for (const auto* agent : agents) {
            ++turn_number;
            std::string tag = "custom-agent:step" + std::to_string(step_index) + ":turn" +
                              std::to_string(turn_number);
            auto turn = detail::run_turn(*agent, step_text, step_index, round, result.actions,
                                         tag, config, env);
            if (!turn.ok()) return turn.error();
            result.actions.push_back(turn.value().action);
            if (turn.value().terminal) {
                result.final_output = turn.value().final_text;
                result.status = StepResultStatus::Completed;
                return result;
            }
        }
    }
    if (!config.forced_final)
        return Error{"refinement-failed", "no consensus within " +
                                              std::to_string(config.collab_max_rounds) +
                                              " rounds at step " + std::to_string(step_index)};
    result.final_output = detail::observations_digest(result.actions);
    result.status = StepResultStatus::ForcedFinal;
    env.trace.record_transition("forced-final", {{"step", step_index},
                                                 {"rounds", config.collab_max_rounds}});
    return result;
}

// Renders the action-observer prompt over the unfinished steps and the
// long-term digest, parses the NextStep, and either matches an unfinished
// plan step or registers a synthesized verification step (bounded per run;
// past the bound the first unfinished step is taken instead).
inline Result<StepSelection> select_next_step(ExecutionState& state, const TeamDraft& team,
                                              const Task& task, const ExecutionConfig& config,
                                              ExecutionEnv& env) {
    std::string states_text;
    for (size_t i = 0; i < state.plan.steps.size(); ++i) {
        if (state.plan.status[i] == StepStatus::Done) continue;
        states_text += render_step_line(state.plan.steps[i]) + "\n";
    }
    state.history_digest = env.memory.long_term_digest(config.memory_budget);

    std::string roles_text;
    for (const auto* role : team.all_roles())
        roles_text += "- " + role->name + ": " + role->description + "\n";

    Bindings bindings = {
        {"task", task.text},
        {"roles", roles_text.empty() ? "None" : roles_text},
        {"history", state.history_digest.empty() ? "None" : state.history_digest},
        {"states", states_text.empty() ? "None" : states_text},
        {"format_example", env.templates.format_example_for(PromptKind::ActionObserver)},
    };
    auto rendered = render_prompt(PromptKind::ActionObserver, bindings, env.templates);
    if (!rendered.ok()) return rendered.error();

    CompletionRequest request;
    request.user_text = rendered.value();
    request.temperature = config.temperature;
    request.max_tokens = config.max_tokens;
    request.tag = "action-observer";
    auto parsed = call_and_parse<NextStepParse>(
        env.provider, env.trace, request,
        [&](const std::string& body) -> Result<NextStepParse> {
            auto p = parse_next_step(body);
            if (!p.ok()) return p;
            for (const auto& name : p.value().agent_names)
                if (!team.find_role(name))
                    return Error{"unknown-agent", name + " is not a team role"};
            return p;
        },
        "parse_next_step", config.reprompt_budget);
    if (!parsed.ok()) return parsed.error();
    const auto& next = parsed.value();

    StepSelection selection;
    selection.agent_names = next.agent_names;
    selection.step_text = next.step_text;
    selection.relevant_history = next.relevant_history;

    for (size_t i = 0; i < state.plan.steps.size(); ++i) {
        if (state.plan.status[i] == StepStatus::Done) continue;
        if (detail::selection_matches_step(next, state.plan.steps[i])) {
            state.plan.status[i] = StepStatus::InProgress;
            selection.step_index = state.plan.steps[i].index;
            env.trace.record_transition("step-selected", {{"step", selection.step_index},
                                                          {"synthesized", false}});
            return selection;
        }
    }

    if (state.synthesized_count < config.synthesized_step_bound) {
        PlanStep step;
        step.index = static_cast<int>(state.plan.steps.size()) + 1;
        step.assigned_agents = next.agent_names;
        step.description = next.step_text;
        step.synthesized = true;
        state.plan.steps.push_back(step);
        state.plan.status.push_back(StepStatus::InProgress);
        ++state.synthesized_count;
        selection.step_index = step.index;
        selection.synthesized = true;
        env.trace.record_transition("step-selected", {{"step", selection.step_index},
                                                      {"synthesized", true}});
        return selection;
    }

    // Synthesis bound exhausted: take the first unfinished step in plan order
    // so the run still terminates.
    for (size_t i = 0; i < state.plan.steps.size(); ++i) {
        if (state.plan.status[i] == StepStatus::Done) continue;
        const auto& step = state.plan.steps[i];
        state.plan.status[i] = StepStatus::InProgress;
        selection.agent_names = step.assigned_agents;
        selection.step_text = step.description;
        selection.step_index = step.index;
        env.trace.record_transition("step-selected", {{"step", selection.step_index},
                                                      {"synthesized", false},
                                                      {"fallback", true}});
        return selection;
    }
    return Error{"execution-failed", "no unfinished steps to select"};
}

// Routes a selection: one agent runs self-refinement, several run
// collaborative refinement. Completed results are committed to long-term
// memory (exactly one task record) and summarized per agent.
inline Result<StepResult> dispatch_step(const StepSelection& selection, const TeamDraft& team,
                                        const ExecutionConfig& config, ExecutionEnv& env) {
    std::vector<const AgentSpec*> agents;
    for (const auto& name : selection.agent_names) {
        const AgentSpec* role = team.find_role(name);
        if (!role) return Error{"unknown-agent", name + " is not a team role"};
        agents.push_back(role);
    }
    if (agents.empty()) return Error{"unknown-agent", "selection names no agents"};

    Result<StepResult> result =
        agents.size() == 1
            ? self_refine(*agents[0], selection.step_text, selection.step_index, config, env)
            : collaborative_refine(agents, selection.step_text, selection.step_index, config,
                                   env);
    if (!result.ok()) return result;

    auto& step_result = result.value();
    if (step_result.status != StepResultStatus::Failed) {
        auto committed = env.memory.commit_long_term(step_result);
        if (!committed.ok()) return committed.error();
        for (const auto* agent : agents)
            env.memory.append_summary(agent->name, step_result.step_index,
                                      step_result.final_output);
    }
    env.trace.record_transition(
        "step-result", {{"step", step_result.step_index},
                        {"status", step_result_status_name(step_result.status)},
                        {"actions", static_cast<int>(step_result.actions.size())}});
    return result;
}

struct ExecutionRun {
    std::string final_answer;
    ExecutionState state;
};

// Full execution loop: select, dispatch, record, until no step is unfinished.
// The final answer is the language-expert step's final output — the last step
// of the original plan (synthesized steps carry higher indices).
inline Result<ExecutionRun> run_execution(const TeamDraft& team, const ExecutionPlan& plan,
                                          const Task& task, const ExecutionConfig& config,
                                          ExecutionEnv& env) {
    env.trace.set_phase(Phase::Execution);
    ExecutionState state;
    state.plan = plan;
    if (state.plan.status.size() != state.plan.steps.size()) state.plan.reset_status();
    const int final_original_index = static_cast<int>(state.plan.steps.size());
    env.trace.record_transition("execution-start", {{"steps", final_original_index}});

    auto has_unfinished = [&] {
        for (auto s : state.plan.status)
            if (s != StepStatus::Done) return true;
        return false;
    };

    while (has_unfinished()) {
        auto selection = select_next_step(state, team, task, config, env);
        if (!selection.ok()) {
            if (is_provider_error(selection.error().code)) return selection.error();
            return Error{"execution-failed", selection.error().to_string()};
        }
        auto result = dispatch_step(selection.value(), team, config, env);
        if (!result.ok()) {
            if (is_provider_error(result.error().code)) return result.error();
            return Error{"execution-failed",
                         "step " + std::to_string(selection.value().step_index) + ": " +
                             result.error().to_string()};
        }
        state.plan.status[static_cast<size_t>(selection.value().step_index - 1)] =
            StepStatus::Done;
        state.results.push_back(result.value());
    }

    state.outcome = ExecutionOutcome::Done;
    ExecutionRun run;
    for (const auto& r : state.results)
        if (r.step_index == final_original_index) run.final_answer = r.final_output;
    env.trace.record_transition("memory-snapshot", {{"entries", env.memory.to_json()}});
    env.trace.record_transition("execution-outcome",
                                {{"outcome", "done"},
                                 {"steps_completed", static_cast<int>(state.results.size())}});
    run.state = std::move(state);
    return run;
}

}  // namespace troupe
