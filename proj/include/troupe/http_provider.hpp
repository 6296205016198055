#pragma once

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "troupe/provider.hpp"
#include "troupe/result.hpp"

namespace troupe {

struct HttpProviderConfig {
    std::string base_url = "https://api.openai.com";
    std::string chat_path = "/v1/chat/completions";
    std::string model;
    std::string api_key;  // sent as a bearer token when non-empty
    int timeout_seconds = 120;
};

// OpenAI-compatible chat-completions request body. The rendered template is
// the user message; the system message is included only when non-empty.
inline nlohmann::ordered_json build_chat_payload(const CompletionRequest& request,
                                                 const std::string& model) {
    nlohmann::ordered_json payload;
    payload["model"] = model;
    nlohmann::ordered_json messages = nlohmann::ordered_json::array();
    if (!request.system_text.empty())
        messages.push_back({{"role", "system"}, {"content", request.system_text}});
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    payload["messages"] = std::move(messages);
    payload["temperature"] = request.temperature;
    if (request.max_tokens) payload["max_tokens"] = *request.max_tokens;
    return payload;
}

class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}

    Result<CompletionResponse> complete(const CompletionRequest& request) override {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (config_.base_url.rfind("https://", 0) == 0)
            return Error{"transport",
                         "built without TLS support; use an http:// endpoint"};
#endif
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_write_timeout(config_.timeout_seconds, 0);

        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto body = build_chat_payload(request, config_.model).dump();
        auto res = client.Post(config_.chat_path, headers, body, "application/json");
        if (!res)
            return Error{"transport", "request failed: " + httplib::to_string(res.error())};
        if (res->status < 200 || res->status >= 300)
            return Error{"backend-rejection",
                         "HTTP " + std::to_string(res->status) + ": " + res->body};

        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded())
            return Error{"backend-rejection", "response body is not JSON: " + res->body};
        if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
            parsed["choices"].empty())
            return Error{"backend-rejection", "response carries no choices: " + res->body};
        const auto& message = parsed["choices"][0];

        CompletionResponse response;
        if (message.contains("message") && message["message"].contains("content") &&
            message["message"]["content"].is_string())
            response.text = message["message"]["content"].get<std::string>();
        if (parsed.contains("usage")) {
            response.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", -1);
            response.usage.completion_tokens = parsed["usage"].value("completion_tokens", -1);
        }
        response.backend_id = "http:" + config_.model;
        return response;
    }

private:
    HttpProviderConfig config_;
};

}  // namespace troupe
