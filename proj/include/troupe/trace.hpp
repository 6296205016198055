#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "troupe/provider.hpp"
#include "troupe/result.hpp"

namespace troupe {

enum class Phase { Drafting, Execution, Eval };
enum class EventKind { Prompt, Completion, Parse, Tool, Transition, Error };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Drafting: return "drafting";
        case Phase::Execution: return "execution";
        case Phase::Eval: return "eval";
    }
    return "unknown";
}

inline const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::Prompt: return "prompt";
        case EventKind::Completion: return "completion";
        case EventKind::Parse: return "parse";
        case EventKind::Tool: return "tool";
        case EventKind::Transition: return "transition";
        case EventKind::Error: return "error";
    }
    return "unknown";
}

// One append-only record: a prompt, completion, parse outcome, tool call,
// state transition, or error. The unit of record/replay.
struct TraceEvent {
    int seq = 0;  // gapless from 1, assigned by the writer
    std::string ts;
    Phase phase = Phase::Drafting;
    EventKind kind = EventKind::Transition;
    int corr = 0;             // correlates a prompt with its completion/error
    std::string fingerprint;  // request fingerprint, on prompt events
    nlohmann::ordered_json payload;
};

// Serialized line form, stable key order for diff-ability.
inline nlohmann::ordered_json event_to_json(const TraceEvent& e) {
    nlohmann::ordered_json j;
    j["seq"] = e.seq;
    j["ts"] = e.ts;
    j["phase"] = phase_name(e.phase);
    j["kind"] = kind_name(e.kind);
    if (e.corr > 0) j["corr"] = e.corr;
    if (!e.fingerprint.empty()) j["fingerprint"] = e.fingerprint;
    j["payload"] = e.payload;
    return j;
}

// Trace writes are a correctness feature; failure to append aborts the run.
class TraceIoError : public std::runtime_error {
public:
    explicit TraceIoError(const std::string& what) : std::runtime_error("trace-io: " + what) {}
};

inline std::string iso8601_now() {
    using namespace std::chrono;
    auto now = system_clock::now();
    auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
    std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &t);
#else
    gmtime_r(&t, &tm);
#endif
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms.count()));
    return buf;
}

// Append-only JSON Lines sink with write-ahead discipline: record() flushes
// and verifies the write before returning. An empty path keeps events in
// memory only (tests); events are retained in memory in both modes.
class TraceWriter {
public:
    TraceWriter() = default;

    explicit TraceWriter(const std::string& path) : path_(path) {
        if (path_.empty()) return;
        out_.open(path_, std::ios::binary | std::ios::trunc);
        if (!out_) throw TraceIoError("cannot open trace file for writing: " + path_);
    }

    void set_phase(Phase phase) { phase_ = phase; }
    Phase phase() const { return phase_; }

    int next_corr() { return ++corr_counter_; }

    const std::vector<TraceEvent>& events() const { return events_; }
    const std::string& path() const { return path_; }

    void record(TraceEvent event) {
        event.seq = static_cast<int>(events_.size()) + 1;
        event.ts = iso8601_now();
        if (!path_.empty()) {
            out_ << event_to_json(event).dump() << "\n";
            out_.flush();
            if (!out_) throw TraceIoError("append failed at seq " + std::to_string(event.seq) +
                                          ": " + path_);
        }
        events_.push_back(std::move(event));
    }

    // --- typed recorders ---

    void record_prompt(int corr, const CompletionRequest& req) {
        TraceEvent e;
        e.phase = phase_;
        e.kind = EventKind::Prompt;
        e.corr = corr;
        e.fingerprint = fingerprint_of(req);
        e.payload["tag"] = req.tag;
        e.payload["system_text"] = req.system_text;
        e.payload["user_text"] = req.user_text;
        e.payload["temperature"] = req.temperature;
        if (req.max_tokens) e.payload["max_tokens"] = *req.max_tokens;
        record(std::move(e));
    }

    void record_completion(int corr, const CompletionResponse& resp) {
        TraceEvent e;
        e.phase = phase_;
        e.kind = EventKind::Completion;
        e.corr = corr;
        e.payload["text"] = resp.text;
        if (resp.usage.prompt_tokens >= 0) e.payload["prompt_tokens"] = resp.usage.prompt_tokens;
        if (resp.usage.completion_tokens >= 0)
            e.payload["completion_tokens"] = resp.usage.completion_tokens;
        record(std::move(e));
    }

    void record_error(int corr, const Error& err, const std::string& at) {
        TraceEvent e;
        e.phase = phase_;
        e.kind = EventKind::Error;
        e.corr = corr;
        e.payload["at"] = at;
        e.payload["code"] = err.code;
        e.payload["message"] = err.message;
        record(std::move(e));
    }

    void record_parse(const std::string& parser, bool ok, const std::string& error_code = "") {
        TraceEvent e;
        e.phase = phase_;
        e.kind = EventKind::Parse;
        e.payload["parser"] = parser;
        e.payload["ok"] = ok;
        if (!ok) e.payload["error"] = error_code;
        record(std::move(e));
    }

    void record_tool(const std::string& tool, bool terminal, const std::string& observation) {
        TraceEvent e;
        e.phase = phase_;
        e.kind = EventKind::Tool;
        e.payload["tool"] = tool;
        e.payload["terminal"] = terminal;
        e.payload["observation"] = observation;
        record(std::move(e));
    }

    void record_transition(const std::string& name, nlohmann::ordered_json data = {}) {
        TraceEvent e;
        e.phase = phase_;
        e.kind = EventKind::Transition;
        e.payload["name"] = name;
        if (!data.is_null()) e.payload["data"] = std::move(data);
        record(std::move(e));
    }

private:
    std::string path_;
    std::ofstream out_;
    std::vector<TraceEvent> events_;
    Phase phase_ = Phase::Drafting;
    int corr_counter_ = 0;
};

// ---------------------------------------------------------------------------
// Loading and replay
// ---------------------------------------------------------------------------

inline Result<Phase> phase_from_name(const std::string& s) {
    if (s == "drafting") return Phase::Drafting;
    if (s == "execution") return Phase::Execution;
    if (s == "eval") return Phase::Eval;
    return Error{"corrupt-trace", "unknown phase: " + s};
}

inline Result<EventKind> kind_from_name(const std::string& s) {
    if (s == "prompt") return EventKind::Prompt;
    if (s == "completion") return EventKind::Completion;
    if (s == "parse") return EventKind::Parse;
    if (s == "tool") return EventKind::Tool;
    if (s == "transition") return EventKind::Transition;
    if (s == "error") return EventKind::Error;
    return Error{"corrupt-trace", "unknown kind: " + s};
}

// Loads a trace, verifying gapless seq numbering and prompt/completion
// correlation pairing. An empty file is a valid empty run.
inline Result<std::vector<TraceEvent>> load_run(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return Error{"corrupt-trace", "cannot open trace: " + path};
    std::vector<TraceEvent> events;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            return Error{"corrupt-trace", path + ":" + std::to_string(lineno) + ": not an event"};
        TraceEvent e;
        e.seq = j.value("seq", 0);
        e.ts = j.value("ts", "");
        auto phase = phase_from_name(j.value("phase", ""));
        if (!phase.ok()) return phase.error();
        e.phase = phase.value();
        auto kind = kind_from_name(j.value("kind", ""));
        if (!kind.ok()) return kind.error();
        e.kind = kind.value();
        e.corr = j.value("corr", 0);
        e.fingerprint = j.value("fingerprint", "");
        if (j.contains("payload")) e.payload = j["payload"];
        int expected = static_cast<int>(events.size()) + 1;
        if (e.seq != expected)
            return Error{"corrupt-trace", path + ": seq gap at " + std::to_string(expected) +
                                              " (found " + std::to_string(e.seq) + ")"};
        events.push_back(std::move(e));
    }

    std::map<int, int> prompts, closures;
    for (const auto& e : events) {
        if (e.kind == EventKind::Prompt && e.corr > 0) prompts[e.corr]++;
        if ((e.kind == EventKind::Completion || e.kind == EventKind::Error) && e.corr > 0)
            closures[e.corr]++;
    }
    for (const auto& [corr, n] : prompts) {
        if (n != 1 || closures[corr] != 1)
            return Error{"corrupt-trace",
                         path + ": unpaired prompt/completion at corr " + std::to_string(corr)};
    }
    return events;
}

// Turns a recorded trace into a script: recorded completions in order, each
// carrying the fingerprint of its recorded prompt so replay detects drift.
inline std::vector<ScriptEntry> replay_script(const std::vector<TraceEvent>& events) {
    std::map<int, std::string> prompt_fp;
    std::vector<ScriptEntry> script;
    for (const auto& e : events) {
        if (e.kind == EventKind::Prompt) prompt_fp[e.corr] = e.fingerprint;
        if (e.kind == EventKind::Completion) {
            ScriptEntry entry;
            entry.text = e.payload.value("text", "");
            entry.fingerprint = prompt_fp.count(e.corr) ? prompt_fp[e.corr] : "";
            entry.usage.prompt_tokens = e.payload.value("prompt_tokens", -1);
            entry.usage.completion_tokens = e.payload.value("completion_tokens", -1);
            script.push_back(std::move(entry));
        }
    }
    return script;
}

inline std::unique_ptr<ScriptedProvider> replay_backend(const std::vector<TraceEvent>& events) {
    return std::make_unique<ScriptedProvider>(replay_script(events));
}

// ---------------------------------------------------------------------------
// Comparison and stats
// ---------------------------------------------------------------------------

// Timestamps are excluded from replay-equality comparison.
inline nlohmann::ordered_json event_without_ts(const TraceEvent& e) {
    auto j = event_to_json(e);
    j.erase("ts");
    return j;
}

struct TraceDiff {
    bool equal = true;
    std::string description;
};

inline TraceDiff compare_traces(const std::vector<TraceEvent>& a,
                                const std::vector<TraceEvent>& b) {
    size_t n = a.size() < b.size() ? a.size() : b.size();
    for (size_t i = 0; i < n; ++i) {
        auto ja = event_without_ts(a[i]).dump();
        auto jb = event_without_ts(b[i]).dump();
        if (ja != jb)
            return {false, "event " + std::to_string(i + 1) + " differs:\n  a: " + ja +
                               "\n  b: " + jb};
    }
    if (a.size() != b.size())
        return {false, "length mismatch: " + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size())};
    return {true, ""};
}

// Per-phase, per-kind event counts.
inline nlohmann::ordered_json trace_stats(const std::vector<TraceEvent>& events) {
    nlohmann::ordered_json stats;
    for (const char* phase : {"drafting", "execution", "eval"}) {
        nlohmann::ordered_json row;
        for (const char* kind : {"prompt", "completion", "parse", "tool", "transition", "error"})
            row[kind] = 0;
        stats[phase] = row;
    }
    for (const auto& e : events) {
        auto& cell = stats[phase_name(e.phase)][kind_name(e.kind)];
        cell = cell.get<int>() + 1;
    }
    stats["total"] = events.size();
    return stats;
}

// ---------------------------------------------------------------------------
// Tracing decorator
// ---------------------------------------------------------------------------

// Wraps a backend so every logical call emits exactly one prompt event and
// one completion-or-error event. Retry wrapping goes inside this decorator
// so attempts collapse into a single traced call.
class TracingProvider : public Provider {
public:
    TracingProvider(std::unique_ptr<Provider> inner, TraceWriter& trace)
        : inner_(std::move(inner)), trace_(trace) {}

    Result<CompletionResponse> complete(const CompletionRequest& request) override {
        int corr = trace_.next_corr();
        trace_.record_prompt(corr, request);
        auto result = inner_->complete(request);
        if (result.ok())
            trace_.record_completion(corr, result.value());
        else
            trace_.record_error(corr, result.error(), "completion");
        return result;
    }

    Provider& inner() { return *inner_; }

private:
    std::unique_ptr<Provider> inner_;
    TraceWriter& trace_;
};

// Retry decorator; retries only transport errors per the policy.
class RetryingProvider : public Provider {
public:
    RetryingProvider(std::unique_ptr<Provider> inner, RetryPolicy policy)
        : inner_(std::move(inner)), policy_(policy) {}

    Result<CompletionResponse> complete(const CompletionRequest& request) override {
        return complete_with_retry(*inner_, request, policy_);
    }

private:
    std::unique_ptr<Provider> inner_;
    RetryPolicy policy_;
};

}  // namespace troupe
