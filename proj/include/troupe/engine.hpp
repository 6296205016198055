#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "troupe/drafting.hpp"
#include "troupe/eval.hpp"
#include "troupe/execution.hpp"
#include "troupe/http_provider.hpp"
#include "troupe/memory.hpp"
#include "troupe/prompts.hpp"
#include "troupe/provider.hpp"
#include "troupe/toolkit.hpp"
#include "troupe/trace.hpp"

namespace troupe {

enum class BackendKind { Http, Scripted, Replay };

inline const char* backend_kind_name(BackendKind b) {
    switch (b) {
        case BackendKind::Http: return "http";
        case BackendKind::Scripted: return "scripted";
        case BackendKind::Replay: return "replay";
    }
    return "unknown";
}

// One run's configuration. The protocol defaults — temperature 0, three
// drafting rounds, refinement and collaboration caps of five — are the
// published operating point and are what an unconfigured run uses.
struct RunConfig {
    BackendKind backend = BackendKind::Http;
    std::string model = "gpt-4";
    double temperature = 0.0;
    int drafting_rounds = 3;
    int refinement_cap = 5;
    int collab_rounds = 5;
    int reprompt_budget = 2;
    bool forced_final = true;
    int synthesized_step_bound = 2;
    long budget = 6000;  // estimated-token budget for dynamic memory
    std::optional<int> max_tokens;

    std::string workspace = "workspace";
    std::string trace = "trace.jsonl";
    std::string script;        // scripted backend: script file; replay: trace file
    std::string role_library;  // optional serialized role-library file
    std::string prompt_dir;    // optional template override directory

    std::string base_url = "https://api.openai.com";
    std::string chat_path = "/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    int http_timeout_s = 120;
    int retry_attempts = 3;
    int retry_backoff_ms = 1000;
    std::vector<std::string> extra_tools;
};

inline Status validate_config(const RunConfig& cfg) {
    if (cfg.drafting_rounds < 1) return Error{"bad-config", "drafting_rounds must be >= 1"};
    if (cfg.refinement_cap < 1) return Error{"bad-config", "refinement_cap must be >= 1"};
    if (cfg.collab_rounds < 1) return Error{"bad-config", "collab_rounds must be >= 1"};
    if (cfg.reprompt_budget < 0) return Error{"bad-config", "reprompt_budget must be >= 0"};
    if (cfg.budget < 1) return Error{"bad-config", "budget must be >= 1"};
    if (cfg.temperature < 0.0 || cfg.temperature > 1.0)
        return Error{"bad-config", "temperature must be in [0,1]"};
    return ok_status();
}

// ---------------------------------------------------------------------------
// Config file: plain "key = value" lines, '#' comments. Flags override file
// values; file values override defaults.
// ---------------------------------------------------------------------------

inline Result<std::map<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Error{"bad-config", "cannot open config file: " + path};
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            return Error{"bad-config",
                         path + ":" + std::to_string(lineno) + ": expected key = value"};
        out[text::trimmed(t.substr(0, eq))] = text::trimmed(t.substr(eq + 1));
    }
    return out;
}

inline Status apply_config_values(RunConfig& cfg,
                                  const std::map<std::string, std::string>& values) {
    auto to_int = [](const std::string& v, int& out) {
        try {
            out = std::stoi(v);
            return true;
        } catch (...) {
            return false;
        }
    };
    for (const auto& [key, value] : values) {
        bool ok = true;
        int n = 0;
        if (key == "backend") {
            if (value == "http")
                cfg.backend = BackendKind::Http;
            else if (value == "scripted")
                cfg.backend = BackendKind::Scripted;
            else if (value == "replay")
                cfg.backend = BackendKind::Replay;
            else
                ok = false;
        } else if (key == "model") {
            cfg.model = value;
        } else if (key == "temperature") {
            try {
                cfg.temperature = std::stod(value);
            } catch (...) {
                ok = false;
            }
        } else if (key == "drafting_rounds") {
            ok = to_int(value, cfg.drafting_rounds);
        } else if (key == "refinement_cap") {
            ok = to_int(value, cfg.refinement_cap);
        } else if (key == "collab_rounds") {
            ok = to_int(value, cfg.collab_rounds);
        } else if (key == "reprompt_budget") {
            ok = to_int(value, cfg.reprompt_budget);
        } else if (key == "forced_final") {
            cfg.forced_final = value == "true" || value == "1" || value == "on";
        } else if (key == "synthesized_step_bound") {
            ok = to_int(value, cfg.synthesized_step_bound);
        } else if (key == "budget") {
            ok = to_int(value, n);
            if (ok) cfg.budget = n;
        } else if (key == "max_tokens") {
            ok = to_int(value, n);
            if (ok) cfg.max_tokens = n;
        } else if (key == "workspace") {
            cfg.workspace = value;
        } else if (key == "trace") {
            cfg.trace = value;
        } else if (key == "script") {
            cfg.script = value;
        } else if (key == "role_library") {
            cfg.role_library = value;
        } else if (key == "prompt_dir") {
            cfg.prompt_dir = value;
        } else if (key == "base_url") {
            cfg.base_url = value;
        } else if (key == "chat_path") {
            cfg.chat_path = value;
        } else if (key == "api_key_env") {
            cfg.api_key_env = value;
        } else if (key == "http_timeout_s") {
            ok = to_int(value, cfg.http_timeout_s);
        } else if (key == "retry_attempts") {
            ok = to_int(value, cfg.retry_attempts);
        } else if (key == "retry_backoff_ms") {
            ok = to_int(value, cfg.retry_backoff_ms);
        } else if (key == "extra_tools") {
            cfg.extra_tools = text::split_csv(value);
        } else {
            return Error{"bad-config", "unknown config key: " + key};
        }
        if (!ok) return Error{"bad-config", "bad value for " + key + ": " + value};
    }
    return ok_status();
}

// The protocol parameters recorded into the trace for reproducibility.
// Environment paths and backend identity are deliberately excluded: replay
// equality is over protocol behavior, not filesystem locations.
inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["model"] = cfg.model;
    j["temperature"] = cfg.temperature;
    j["drafting_rounds"] = cfg.drafting_rounds;
    j["refinement_cap"] = cfg.refinement_cap;
    j["collab_rounds"] = cfg.collab_rounds;
    j["reprompt_budget"] = cfg.reprompt_budget;
    j["forced_final"] = cfg.forced_final;
    j["synthesized_step_bound"] = cfg.synthesized_step_bound;
    j["budget"] = cfg.budget;
    if (cfg.max_tokens) j["max_tokens"] = *cfg.max_tokens;
    return j;
}

inline void config_from_json(const nlohmann::json& j, RunConfig& cfg) {
    cfg.model = j.value("model", cfg.model);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.drafting_rounds = j.value("drafting_rounds", cfg.drafting_rounds);
    cfg.refinement_cap = j.value("refinement_cap", cfg.refinement_cap);
    cfg.collab_rounds = j.value("collab_rounds", cfg.collab_rounds);
    cfg.reprompt_budget = j.value("reprompt_budget", cfg.reprompt_budget);
    cfg.forced_final = j.value("forced_final", cfg.forced_final);
    cfg.synthesized_step_bound = j.value("synthesized_step_bound", cfg.synthesized_step_bound);
    cfg.budget = j.value("budget", cfg.budget);
    if (j.contains("max_tokens")) cfg.max_tokens = j["max_tokens"].get<int>();
}

// ---------------------------------------------------------------------------
// Pipeline assembly
// ---------------------------------------------------------------------------

inline Result<std::unique_ptr<Provider>> make_base_provider(const RunConfig& cfg) {
    switch (cfg.backend) {
        case BackendKind::Http: {
            HttpProviderConfig http;
            http.base_url = cfg.base_url;
            http.chat_path = cfg.chat_path;
            http.model = cfg.model;
            http.timeout_seconds = cfg.http_timeout_s;
            if (const char* key = std::getenv(cfg.api_key_env.c_str())) http.api_key = key;
            RetryPolicy policy;
            policy.max_attempts = cfg.retry_attempts;
            policy.initial_backoff = std::chrono::milliseconds(cfg.retry_backoff_ms);
            return std::unique_ptr<Provider>(std::make_unique<RetryingProvider>(
                std::make_unique<HttpProvider>(http), policy));
        }
        case BackendKind::Scripted: {
            auto script = load_script_file(cfg.script);
            if (!script.ok()) return script.error();
            return std::unique_ptr<Provider>(
                std::make_unique<ScriptedProvider>(std::move(script).take()));
        }
        case BackendKind::Replay: {
            auto events = load_run(cfg.script);
            if (!events.ok()) return events.error();
            return std::unique_ptr<Provider>(replay_backend(events.value()));
        }
    }
    return Error{"bad-config", "unknown backend"};
}

inline Result<ToolRegistry> make_registry(const RunConfig& cfg) {
    ToolRegistry registry = default_toolkit();
    for (const auto& name : cfg.extra_tools) {
        auto added = register_echo_tool(registry, name);
        if (!added.ok()) return added.error();
    }
    return registry;
}

inline Result<TemplateStore> make_templates(const RunConfig& cfg) {
    if (cfg.prompt_dir.empty()) return TemplateStore::builtin();
    return TemplateStore::from_dir(cfg.prompt_dir);
}

inline std::string read_role_library(const RunConfig& cfg) {
    if (cfg.role_library.empty()) return "None";
    std::ifstream in(cfg.role_library, std::ios::binary);
    if (!in) return "None";
    std::ostringstream buf;
    buf << in.rdbuf();
    auto body = buf.str();
    return text::trim(body).empty() ? "None" : body;
}

struct RunOutcome {
    std::string final_answer;
    DraftingOutcome drafting_outcome = DraftingOutcome::Failed;
    std::vector<std::string> files_written;
    std::string trace_path;
    size_t model_calls = 0;
};

// Full pipeline over an injected backend: record config and task, draft the
// team, execute the plan, record the answer and the workspace manifest.
inline Result<RunOutcome> run_task_with_provider(const RunConfig& cfg, const Task& task,
                                                 std::unique_ptr<Provider> base) {
    auto config_ok = validate_config(cfg);
    if (!config_ok.ok()) return config_ok.error();
    auto registry = make_registry(cfg);
    if (!registry.ok()) return registry.error();
    auto templates = make_templates(cfg);
    if (!templates.ok()) return templates.error();

    TraceWriter trace(cfg.trace);
    TracingProvider provider(std::move(base), trace);
    Workspace workspace(cfg.workspace.empty() ? "workspace" : cfg.workspace);
    MemoryStore memory;

    trace.set_phase(Phase::Drafting);
    trace.record_transition("run-config", config_to_json(cfg));
    trace.record_transition("task", {{"id", task.id}, {"text", task.text}});

    DraftingConfig drafting_config;
    drafting_config.round_cap = cfg.drafting_rounds;
    drafting_config.reprompt_budget = cfg.reprompt_budget;
    drafting_config.existing_roles_text = read_role_library(cfg);
    drafting_config.temperature = cfg.temperature;
    drafting_config.max_tokens = cfg.max_tokens;

    auto drafted = run_drafting(task, drafting_config, provider, trace, registry.value(),
                                templates.value());
    if (!drafted.ok()) {
        trace.record_error(0, drafted.error(), "drafting");
        return drafted.error();
    }

    ExecutionConfig execution_config;
    execution_config.refinement_cap = cfg.refinement_cap;
    execution_config.collab_max_rounds = cfg.collab_rounds;
    execution_config.reprompt_budget = cfg.reprompt_budget;
    execution_config.forced_final = cfg.forced_final;
    execution_config.synthesized_step_bound = cfg.synthesized_step_bound;
    execution_config.memory_budget = cfg.budget;
    execution_config.temperature = cfg.temperature;
    execution_config.max_tokens = cfg.max_tokens;

    ExecutionEnv env{provider, trace, registry.value(), templates.value(), memory, workspace};
    auto executed = run_execution(drafted.value().team, drafted.value().team.plan, task,
                                  execution_config, env);
    if (!executed.ok()) {
        trace.record_error(0, executed.error(), "execution");
        return executed.error();
    }

    trace.record_transition("final-answer", {{"text", executed.value().final_answer}});
    trace.record_transition("files-manifest", {{"files", workspace.files_written()}});

    RunOutcome outcome;
    outcome.final_answer = executed.value().final_answer;
    outcome.drafting_outcome = drafted.value().state.outcome;
    outcome.files_written = workspace.files_written();
    outcome.trace_path = cfg.trace;
    for (const auto& e : trace.events())
        if (e.kind == EventKind::Prompt) ++outcome.model_calls;
    return outcome;
}

inline Result<RunOutcome> run_task(const RunConfig& cfg, const Task& task) {
    auto base = make_base_provider(cfg);
    if (!base.ok()) return base.error();
    return run_task_with_provider(cfg, task, std::move(base).take());
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayOutcome {
    bool identical = false;
    std::string recorded_answer;
    std::string new_answer;
    std::string diff;  // first difference, empty when identical
    std::string new_trace_path;
};

inline std::optional<nlohmann::json> find_transition(const std::vector<TraceEvent>& events,
                                                     const std::string& name) {
    for (const auto& e : events) {
        if (e.kind != EventKind::Transition) continue;
        if (e.payload.value("name", "") == name && e.payload.contains("data"))
            return e.payload["data"];
    }
    return std::nullopt;
}

// Re-executes a recorded run against its own completions and compares: the
// final answer must be byte-identical and the new trace equal to the recorded
// one modulo timestamps.
inline Result<ReplayOutcome> replay_run(const std::string& trace_path,
                                        const std::string& new_trace_path,
                                        const std::string& workspace_path) {
    auto events = load_run(trace_path);
    if (!events.ok()) return events.error();

    auto recorded_config = find_transition(events.value(), "run-config");
    if (!recorded_config) return Error{"corrupt-trace", "trace has no run-config event"};
    auto task_data = find_transition(events.value(), "task");
    if (!task_data) return Error{"corrupt-trace", "trace has no task event"};
    auto answer_data = find_transition(events.value(), "final-answer");
    if (!answer_data) return Error{"corrupt-trace", "trace records no final answer"};

    RunConfig cfg;
    config_from_json(*recorded_config, cfg);
    cfg.backend = BackendKind::Scripted;
    cfg.trace = new_trace_path;
    cfg.workspace = workspace_path;

    Task task;
    task.id = task_data->value("id", "");
    task.text = task_data->value("text", "");

    auto provider = std::make_unique<ScriptedProvider>(replay_script(events.value()));
    auto outcome = run_task_with_provider(cfg, task, std::move(provider));
    if (!outcome.ok()) return outcome.error();

    auto new_events = load_run(new_trace_path);
    if (!new_events.ok()) return new_events.error();

    ReplayOutcome result;
    result.recorded_answer = answer_data->value("text", "");
    result.new_answer = outcome.value().final_answer;
    result.new_trace_path = new_trace_path;
    auto diff = compare_traces(events.value(), new_events.value());
    result.identical = diff.equal && result.recorded_answer == result.new_answer;
    if (!diff.equal)
        result.diff = diff.description;
    else if (result.recorded_answer != result.new_answer)
        result.diff = "final answer differs";
    return result;
}

}  // namespace troupe
