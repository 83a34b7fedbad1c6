// SPDX-License-Identifier: Apache-2.0
#include "mnemo/provider/remote.hpp"

#include "mnemo/core/error.hpp"

#include <httplib.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <thread>

namespace mnemo {
namespace {

nlohmann::json post_with_retries(const RemoteConfig& config, const Endpoint& endpoint, const std::string& path,
                                 const nlohmann::json& body) {
    httplib::Client client(endpoint.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (const char* token = std::getenv(config.api_key_env.c_str()); token != nullptr && *token != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const auto payload = body.dump();
    std::string last_error;
    auto backoff = config.initial_backoff;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            spdlog::warn("remote provider retry {}/{} after: {}", attempt, config.max_retries, last_error);
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        auto result = client.Post(endpoint.prefix + path, headers, payload, "application/json");
        if (!result) {
            last_error = fmt::format("transport error: {}", httplib::to_string(result.error()));
            continue;
        }
        if (result->status == 429 || result->status >= 500) {
            last_error = fmt::format("HTTP {}", result->status);
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            fail(ErrorCode::provider_unavailable,
                 fmt::format("backend rejected request with HTTP {}: {}", result->status, result->body));
        }
        try {
            return nlohmann::json::parse(result->body);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::provider_protocol, fmt::format("backend returned invalid JSON: {}", e.what()));
        }
    }
    fail(ErrorCode::provider_unavailable,
         fmt::format("backend unavailable after {} attempts: {}", config.max_retries + 1, last_error));
}

}  // namespace

Endpoint parse_endpoint(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    require(scheme_end != std::string::npos, ErrorCode::invalid_input,
            fmt::format("base URL '{}' lacks a scheme", base_url));
    const auto path_start = base_url.find('/', scheme_end + 3);
    Endpoint endpoint;
    endpoint.origin = base_url.substr(0, path_start);
    endpoint.prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!endpoint.prefix.empty() && endpoint.prefix.back() == '/') endpoint.prefix.pop_back();
    return endpoint;
}

RemoteChatProvider::RemoteChatProvider(RemoteConfig config)
    : config_(std::move(config)), endpoint_(parse_endpoint(config_.base_url)) {}

nlohmann::json RemoteChatProvider::request_body(const ChatRequest& request) const {
    nlohmann::json body = {{"model", config_.model}, {"temperature", request.temperature}};
    auto messages = nlohmann::json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.text}});
    }
    body["messages"] = std::move(messages);
    if (!request.tools.empty()) {
        auto tools = nlohmann::json::array();
        for (const auto& tool : request.tools) {
            tools.push_back({{"type", "function"},
                             {"function",
                              {{"name", tool.name}, {"description", tool.description}, {"parameters", tool.parameters}}}});
        }
        body["tools"] = std::move(tools);
    }
    return body;
}

ChatResponse RemoteChatProvider::parse_completion(const nlohmann::json& payload) {
    try {
        const auto& message = payload.at("choices").at(0).at("message");
        ChatResponse response;
        if (auto it = message.find("content"); it != message.end() && it->is_string()) {
            response.text = it->get<std::string>();
        }
        if (auto it = message.find("tool_calls"); it != message.end() && it->is_array()) {
            for (const auto& call : *it) {
                const auto& function = call.at("function");
                const auto& raw = function.at("arguments");
                auto arguments = raw.is_string() ? nlohmann::json::parse(raw.get<std::string>()) : raw;
                response.tool_calls.push_back(ToolCall{function.at("name").get<std::string>(), std::move(arguments)});
            }
        }
        return response;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::provider_protocol, fmt::format("malformed chat completion payload: {}", e.what()));
    }
}

ChatResponse RemoteChatProvider::complete(const ChatRequest& request) {
    return parse_completion(post_with_retries(config_, endpoint_, "/chat/completions", request_body(request)));
}

RemoteEmbedder::RemoteEmbedder(RemoteConfig config)
    : config_(std::move(config)), endpoint_(parse_endpoint(config_.base_url)) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) {
    const nlohmann::json body = {{"model", config_.embedding_model}, {"input", texts}};
    const auto payload = post_with_retries(config_, endpoint_, "/embeddings", body);
    try {
        std::vector<EmbeddingVector> out(texts.size());
        for (const auto& item : payload.at("data")) {
            const auto index = item.value("index", std::size_t{0});
            require(index < out.size(), ErrorCode::provider_protocol, "embedding index out of range");
            out[index] = EmbeddingVector(item.at("embedding").get<std::vector<double>>());
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::provider_protocol, fmt::format("malformed embeddings payload: {}", e.what()));
    }
}

}  // namespace mnemo
