// Operator entry point: run a task end-to-end, replay a recorded trace,
// evaluate a trivia benchmark, lint a saved team draft, and inspect traces.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "troupe/engine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEngineError = 1;
constexpr int kExitUsage = 2;

int fail(const troupe::Error& error, const std::string& trace_path = "") {
    std::cerr << "error: " << error.to_string() << "\n";
    if (!trace_path.empty()) std::cerr << "trace: " << trace_path << "\n";
    return kExitEngineError;
}

struct CommonFlags {
    std::string config_file;
    std::optional<std::string> backend;
    std::optional<std::string> model;
    std::optional<std::string> base_url;
    std::optional<std::string> script;
    std::optional<std::string> workspace;
    std::optional<std::string> trace;
    std::optional<std::string> role_library;
    std::optional<std::string> prompt_dir;
    std::optional<double> temperature;
    std::optional<int> drafting_rounds;
    std::optional<int> refinement_cap;
    std::optional<int> collab_rounds;
    std::optional<int> budget;
    std::optional<int> max_tokens;
    std::optional<bool> forced_final;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "config file (key = value lines)");
    cmd->add_option("--backend", flags.backend, "http | scripted | replay");
    cmd->add_option("--model", flags.model, "model identifier sent to the backend");
    cmd->add_option("--base-url", flags.base_url, "OpenAI-compatible endpoint base URL");
    cmd->add_option("--script", flags.script, "scripted backend: JSONL script file");
    cmd->add_option("--workspace", flags.workspace, "workspace root for tool effects");
    cmd->add_option("--trace", flags.trace, "trace output path (JSON Lines)");
    cmd->add_option("--role-library", flags.role_library, "optional role library file");
    cmd->add_option("--prompt-dir", flags.prompt_dir, "template override directory");
    cmd->add_option("--temperature", flags.temperature, "sampling temperature (default 0)");
    cmd->add_option("--rounds", flags.drafting_rounds, "drafting round cap (default 3)");
    cmd->add_option("--refine-cap", flags.refinement_cap, "self-refinement cap (default 5)");
    cmd->add_option("--collab-rounds", flags.collab_rounds,
                    "collaborative refinement rounds (default 5)");
    cmd->add_option("--budget", flags.budget, "dynamic memory token budget (default 6000)");
    cmd->add_option("--max-tokens", flags.max_tokens, "completion max_tokens");
    cmd->add_option("--forced-final", flags.forced_final,
                    "digest instead of failing at cap exhaustion (default true)");
}

// flags > config file > defaults
troupe::Result<troupe::RunConfig> resolve_config(const CommonFlags& flags) {
    troupe::RunConfig cfg;
    if (!flags.config_file.empty()) {
        auto values = troupe::parse_config_file(flags.config_file);
        if (!values.ok()) return values.error();
        auto applied = troupe::apply_config_values(cfg, values.value());
        if (!applied.ok()) return applied.error();
    }
    if (flags.backend) {
        std::map<std::string, std::string> one{{"backend", *flags.backend}};
        auto applied = troupe::apply_config_values(cfg, one);
        if (!applied.ok()) return applied.error();
    }
    if (flags.model) cfg.model = *flags.model;
    if (flags.base_url) cfg.base_url = *flags.base_url;
    if (flags.script) cfg.script = *flags.script;
    if (flags.workspace) cfg.workspace = *flags.workspace;
    if (flags.trace) cfg.trace = *flags.trace;
    if (flags.role_library) cfg.role_library = *flags.role_library;
    if (flags.prompt_dir) cfg.prompt_dir = *flags.prompt_dir;
    if (flags.temperature) cfg.temperature = *flags.temperature;
    if (flags.drafting_rounds) cfg.drafting_rounds = *flags.drafting_rounds;
    if (flags.refinement_cap) cfg.refinement_cap = *flags.refinement_cap;
    if (flags.collab_rounds) cfg.collab_rounds = *flags.collab_rounds;
    if (flags.budget) cfg.budget = *flags.budget;
    if (flags.max_tokens) cfg.max_tokens = *flags.max_tokens;
    if (flags.forced_final) cfg.forced_final = *flags.forced_final;
    auto valid = troupe::validate_config(cfg);
    if (!valid.ok()) return valid.error();
    return cfg;
}

int cmd_run(const CommonFlags& flags, const std::string& task_text,
            const std::string& task_file) {
    auto cfg = resolve_config(flags);
    if (!cfg.ok()) return fail(cfg.error());

    troupe::Task task;
    task.id = "cli";
    if (!task_file.empty()) {
        std::ifstream in(task_file, std::ios::binary);
        if (!in) return fail({"bad-task", "cannot open task file: " + task_file});
        std::ostringstream buf;
        buf << in.rdbuf();
        task.text = buf.str();
    } else {
        task.text = task_text;
    }
    if (troupe::text::trim(task.text).empty())
        return fail({"bad-task", "task text is empty"});

    auto outcome = troupe::run_task(cfg.value(), task);
    if (!outcome.ok()) return fail(outcome.error(), cfg.value().trace);

    std::cout << outcome.value().final_answer << "\n";
    std::cerr << "drafting: " << troupe::drafting_outcome_name(outcome.value().drafting_outcome)
              << ", model calls: " << outcome.value().model_calls
              << ", trace: " << outcome.value().trace_path << "\n";
    if (!outcome.value().files_written.empty()) {
        std::cerr << "workspace files:";
        for (const auto& f : outcome.value().files_written) std::cerr << " " << f;
        std::cerr << "\n";
    }
    return kExitOk;
}

int cmd_replay(const std::string& trace_path, std::string new_trace, std::string workspace) {
    if (new_trace.empty()) new_trace = trace_path + ".replay.jsonl";
    if (workspace.empty()) workspace = trace_path + ".replay.workspace";
    auto outcome = troupe::replay_run(trace_path, new_trace, workspace);
    if (!outcome.ok()) return fail(outcome.error(), trace_path);
    std::cout << "identical: " << (outcome.value().identical ? "true" : "false") << "\n";
    if (!outcome.value().identical) {
        std::cerr << outcome.value().diff << "\n";
        return kExitEngineError;
    }
    return kExitOk;
}

int cmd_eval(const CommonFlags& flags, const std::string& benchmark_path, int expected_n,
             const std::string& out_path, const std::string& baseline_path,
             const std::string& method, int parallel) {
    auto cfg = resolve_config(flags);
    if (!cfg.ok()) return fail(cfg.error());

    auto tasks = troupe::load_benchmark(benchmark_path);
    if (!tasks.ok()) return fail(tasks.error());
    std::vector<troupe::TriviaTask> selected;
    for (const auto& t : tasks.value())
        if (expected_n == 0 || t.n() == expected_n) selected.push_back(t);
    if (selected.empty())
        return fail({"bad-benchmark", "no tasks with n = " + std::to_string(expected_n)});

    const auto base_cfg = cfg.value();
    auto run_one = [&base_cfg](const troupe::Task& task, int index)
        -> troupe::Result<std::string> {
        troupe::RunConfig task_cfg = base_cfg;
        auto suffix = ".task-" + std::to_string(index);
        if (!task_cfg.trace.empty()) task_cfg.trace += suffix + ".jsonl";
        task_cfg.workspace =
            (std::filesystem::path(task_cfg.workspace) / ("task-" + std::to_string(index)))
                .string();
        auto outcome = troupe::run_task(task_cfg, task);
        if (!outcome.ok()) return outcome.error();
        return outcome.value().final_answer;
    };

    troupe::EvalReport report;
    if (parallel <= 1) {
        int counter = 0;
        report = troupe::run_benchmark(
            selected, [&](const troupe::Task& task, const troupe::TriviaTask&) {
                return run_one(task, ++counter);
            });
    } else {
        // Fan out complete engine runs; scoring stays sequential.
        std::vector<std::future<troupe::Result<std::string>>> futures;
        futures.reserve(selected.size());
        for (size_t i = 0; i < selected.size(); ++i) {
            troupe::Task task;
            task.id = "trivia-" + std::to_string(i + 1);
            task.text = troupe::trivia_task_text(selected[i]);
            futures.push_back(std::async(std::launch::async, run_one, task,
                                         static_cast<int>(i) + 1));
            if (futures.size() % static_cast<size_t>(parallel) == 0)
                for (auto& f : futures)
                    if (f.valid()) f.wait();
        }
        size_t next = 0;
        report = troupe::run_benchmark(
            selected, [&](const troupe::Task&, const troupe::TriviaTask&) {
                return futures[next++].get();
            });
    }

    std::string baseline_name;
    double baseline_pct = 0.0;
    if (!baseline_path.empty()) {
        std::ifstream in(baseline_path);
        if (!in) return fail({"bad-baseline", "cannot open baseline report: " + baseline_path});
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded())
            return fail({"bad-baseline", "baseline report is not JSON: " + baseline_path});
        baseline_name = j.value("method", "baseline");
        baseline_pct = j.value("mean_score_pct", 0.0);
    }

    auto report_json = troupe::eval_report_to_json(report, method);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out << report_json.dump(2) << "\n";
        if (!out) return fail({"report-io", "cannot write report: " + out_path});
    }
    std::cout << troupe::render_eval_table(report, method, baseline_name, baseline_pct);
    std::cout << "question-level: " << report.question_level_pct << "%\n";
    if (!out_path.empty()) std::cout << "report: " << out_path << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& draft_path, const std::string& extra_tools) {
    std::ifstream in(draft_path, std::ios::binary);
    if (!in) return fail({"bad-draft", "cannot open draft file: " + draft_path});
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) return fail({"bad-draft", "draft file is not JSON: " + draft_path});

    auto draft = troupe::team_from_json(j);
    auto registry = troupe::default_toolkit();
    for (const auto& name : troupe::text::split_csv(extra_tools))
        troupe::register_echo_tool(registry, name);
    auto report = troupe::validate_team(draft, registry.name_set());
    if (report.empty()) {
        std::cout << "ok: draft passes validation\n";
        return kExitOk;
    }
    std::cout << troupe::report_to_string(report);
    return kExitEngineError;
}

int cmd_trace(const std::string& trace_path, bool stats) {
    auto events = troupe::load_run(trace_path);
    if (!events.ok()) return fail(events.error(), trace_path);
    if (stats) {
        std::cout << troupe::trace_stats(events.value()).dump(2) << "\n";
    } else {
        for (const auto& e : events.value()) std::cout << troupe::event_to_json(e).dump() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic multi-agent task engine"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string task_text, task_file;
    auto* run = app.add_subcommand("run", "run a task end-to-end");
    run->add_option("--task", task_text, "task text");
    run->add_option("--task-file", task_file, "file containing the task text");
    add_common_flags(run, run_flags);

    std::string replay_trace, replay_new_trace, replay_workspace;
    auto* replay = app.add_subcommand("replay", "re-execute a recorded trace and compare");
    replay->add_option("--trace", replay_trace, "recorded trace file")->required();
    replay->add_option("--new-trace", replay_new_trace, "path for the replay trace");
    replay->add_option("--workspace", replay_workspace, "workspace for the replay run");

    CommonFlags eval_flags;
    std::string benchmark_path, eval_out, eval_baseline, eval_method = "engine";
    int eval_n = 0, eval_parallel = 1;
    auto* eval = app.add_subcommand("eval", "run a trivia benchmark");
    eval->add_option("--benchmark", benchmark_path, "benchmark file (JSON Lines)")->required();
    eval->add_option("--n", eval_n, "only evaluate tasks with this many questions (5 or 10)");
    eval->add_option("--out", eval_out, "write the JSON report here");
    eval->add_option("--baseline", eval_baseline, "previous report JSON for the delta column");
    eval->add_option("--method", eval_method, "method label for the report");
    eval->add_option("--parallel", eval_parallel, "engine runs in flight (default 1)");
    add_common_flags(eval, eval_flags);

    std::string draft_path, validate_tools;
    auto* validate = app.add_subcommand("validate", "lint a serialized team draft");
    validate->add_option("--draft", draft_path, "team draft JSON file")->required();
    validate->add_option("--tools", validate_tools, "extra registered tool names (csv)");

    std::string trace_path;
    bool trace_stats_flag = false;
    auto* trace = app.add_subcommand("trace", "inspect a trace file");
    trace->add_option("--trace", trace_path, "trace file")->required();
    trace->add_flag("--stats", trace_stats_flag, "print per-phase call counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags, task_text, task_file);
        if (replay->parsed()) return cmd_replay(replay_trace, replay_new_trace, replay_workspace);
        if (eval->parsed())
            return cmd_eval(eval_flags, benchmark_path, eval_n, eval_out, eval_baseline,
                            eval_method, eval_parallel);
        if (validate->parsed()) return cmd_validate(draft_path, validate_tools);
        if (trace->parsed()) return cmd_trace(trace_path, trace_stats_flag);
    } catch (const troupe::TraceIoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEngineError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEngineError;
    }
    return kExitUsage;
}
