#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "troupe/result.hpp"
#include "troupe/text.hpp"

namespace troupe {

// One model call. Temperature defaults to 0; the engine never overrides it
// unless configured to.
struct CompletionRequest {
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    std::string tag;  // protocol phase label for tracing ("planner", ...)
};

struct TokenUsage {
    int prompt_tokens = -1;  // -1 = unknown
    int completion_tokens = -1;
};

struct CompletionResponse {
    std::string text;  // backend text verbatim, untrimmed
    TokenUsage usage;
    std::string backend_id;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual Result<CompletionResponse> complete(const CompletionRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Request fingerprints
// ---------------------------------------------------------------------------
// hash(system_text) : hash(user_text) : hash(temperature). Component-wise so
// a replay divergence can name the first differing field.

inline std::string format_temperature(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", t);
    return buf;
}

inline std::string fingerprint_of(const CompletionRequest& req) {
    return text::fnv1a64_hex(req.system_text) + ":" + text::fnv1a64_hex(req.user_text) + ":" +
           text::fnv1a64_hex(format_temperature(req.temperature));
}

// Names the first differing fingerprint component, or empty when equal.
inline std::string fingerprint_divergence_field(const std::string& expected,
                                                const std::string& actual) {
    auto split3 = [](const std::string& fp) {
        std::vector<std::string> parts;
        size_t start = 0;
        for (int i = 0; i < 2; ++i) {
            size_t colon = fp.find(':', start);
            if (colon == std::string::npos) break;
            parts.push_back(fp.substr(start, colon - start));
            start = colon + 1;
        }
        parts.push_back(fp.substr(start));
        return parts;
    };
    auto e = split3(expected), a = split3(actual);
    static const char* fields[] = {"system_text", "user_text", "temperature"};
    for (size_t i = 0; i < 3; ++i) {
        std::string ev = i < e.size() ? e[i] : "";
        std::string av = i < a.size() ? a[i] : "";
        if (ev != av) return fields[i];
    }
    return "";
}

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

struct ScriptEntry {
    std::string text;
    std::string fingerprint;  // empty = no divergence check for this call
    TokenUsage usage;
};

// Deterministic backend serving prepared responses by call sequence. When an
// entry carries a fingerprint (a replayed trace does), the incoming request
// must match it or the call fails with replay-divergence.
class ScriptedProvider : public Provider {
public:
    ScriptedProvider() = default;
    explicit ScriptedProvider(std::vector<ScriptEntry> script) : script_(std::move(script)) {}
    explicit ScriptedProvider(const std::vector<std::string>& texts) {
        for (const auto& t : texts) script_.push_back({t, "", {}});
    }

    Result<CompletionResponse> complete(const CompletionRequest& request) override {
        return lookup(next_index_++, request);
    }

    // Serves the response at call_index (0-based), checking any recorded
    // request fingerprint.
    Result<CompletionResponse> lookup(size_t call_index, const CompletionRequest& request) {
        if (call_index >= script_.size()) {
            return Error{"script-exhausted",
                         "scripted backend has no response for call " +
                             std::to_string(call_index + 1) + " (script length " +
                             std::to_string(script_.size()) + ", tag '" + request.tag + "')"};
        }
        const auto& entry = script_[call_index];
        if (!entry.fingerprint.empty()) {
            auto actual = fingerprint_of(request);
            if (actual != entry.fingerprint) {
                auto field = fingerprint_divergence_field(entry.fingerprint, actual);
                return Error{"replay-divergence",
                             "call " + std::to_string(call_index + 1) +
                                 " diverges from the recorded request in field '" + field + "'"};
            }
        }
        CompletionResponse resp;
        resp.text = entry.text;
        resp.usage = entry.usage;
        resp.backend_id = "scripted";
        return resp;
    }

    size_t calls_made() const { return next_index_; }
    size_t size() const { return script_.size(); }

private:
    std::vector<ScriptEntry> script_;
    size_t next_index_ = 0;
};

// Script file: JSON Lines, one response object per line:
//   {"text": "...", "fingerprint": "optional"}
inline Result<std::vector<ScriptEntry>> load_script_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return Error{"script-io", "cannot open script file: " + path};
    std::vector<ScriptEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
            return Error{"script-io",
                         path + ":" + std::to_string(lineno) + ": not a script entry object"};
        }
        ScriptEntry e;
        e.text = j["text"].get<std::string>();
        e.fingerprint = j.value("fingerprint", "");
        entries.push_back(std::move(e));
    }
    return entries;
}

// ---------------------------------------------------------------------------
// Retry
// ---------------------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};  // doubles per attempt
};

// Retries only transport failures. Backend rejections, script exhaustion and
// replay divergence are never retried. `sleeper` is injectable for tests.
inline Result<CompletionResponse> complete_with_retry(
    Provider& provider, const CompletionRequest& request, const RetryPolicy& policy,
    const std::function<void(std::chrono::milliseconds)>& sleeper = nullptr) {
    auto backoff = policy.initial_backoff;
    int attempts = policy.max_attempts < 1 ? 1 : policy.max_attempts;
    for (int attempt = 1;; ++attempt) {
        auto result = provider.complete(request);
        if (result.ok()) return result;
        if (result.error().code != "transport" || attempt >= attempts) return result;
        if (sleeper)
            sleeper(backoff);
        else
            std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

}  // namespace troupe
