#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "troupe/provider.hpp"
#include "troupe/result.hpp"
#include "troupe/trace.hpp"

namespace troupe {

using Transcript = std::vector<std::pair<std::string, std::string>>;  // (speaker, text)

inline std::string render_transcript(const Transcript& history) {
    if (history.empty()) return "None";
    std::string out;
    for (const auto& [speaker, body] : history) {
        out += "## " + speaker + "\n" + body + "\n\n";
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

// One logical model call with a bounded reprompt budget: on parse failure the
// request is reissued with the parse error appended, deterministically, up to
// `reprompt_budget` extra attempts. Parsers never auto-correct; this is the
// recovery point. Provider errors propagate untouched.
template <typename T>
Result<T> call_and_parse(Provider& provider, TraceWriter& trace, const CompletionRequest& request,
                         const std::function<Result<T>(const std::string&)>& parse,
                         const std::string& parser_name, int reprompt_budget,
                         Transcript* history = nullptr, const std::string& speaker = "") {
    CompletionRequest attempt_request = request;
    Error last_error{"internal", "no attempt made"};
    for (int attempt = 0; attempt <= reprompt_budget; ++attempt) {
        auto response = provider.complete(attempt_request);
        if (!response.ok()) return response.error();
        const std::string& body = response.value().text;
        if (history) history->emplace_back(speaker.empty() ? request.tag : speaker, body);
        auto parsed = parse(body);
        if (parsed.ok()) {
            trace.record_parse(parser_name, true);
            return parsed;
        }
        last_error = parsed.error();
        trace.record_parse(parser_name, false, last_error.code);
        attempt_request = request;
        attempt_request.user_text +=
            "\n\n# Previous Response Rejected\n"
            "Your previous response could not be processed:\n" +
            last_error.to_string() + "\nRegenerate your full output in the required format.";
        attempt_request.tag = request.tag + ":reprompt" + std::to_string(attempt + 1);
    }
    return last_error;
}

}  // namespace troupe
