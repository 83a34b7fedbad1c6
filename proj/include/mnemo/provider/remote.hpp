// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/provider/chat.hpp"
#include "mnemo/provider/embedding.hpp"

#include <chrono>
#include <string>

namespace mnemo {

/// Settings for an OpenAI-compatible chat-completions / embeddings endpoint.
struct RemoteConfig {
    /// Scheme, host, optional port and path prefix, e.g. "https://api.openai.com/v1".
    std::string base_url = "https://api.openai.com/v1";
    /// Name of the environment variable holding the bearer token.
    std::string api_key_env = "OPENAI_API_KEY";
    std::string model = "gpt-4o-mini";
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dimension = 1536;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::milliseconds timeout{30000};
};

/// Splits a base URL into the origin httplib connects to and the path prefix.
struct Endpoint {
    std::string origin;
    std::string prefix;
};
Endpoint parse_endpoint(const std::string& base_url);

/// Retries transport failures, 429 and 5xx with exponential backoff; any
/// other non-2xx status fails immediately with provider_unavailable.
class RemoteChatProvider final : public ChatProvider {
public:
    explicit RemoteChatProvider(RemoteConfig config);

    /// The JSON body sent for a request. Message text is passed through unchanged.
    nlohmann::json request_body(const ChatRequest& request) const;
    static ChatResponse parse_completion(const nlohmann::json& payload);

private:
    ChatResponse complete(const ChatRequest& request) override;

    RemoteConfig config_;
    Endpoint endpoint_;
};

class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteConfig config);

    std::size_t dimension() const override { return config_.embedding_dimension; }
    std::string id() const override { return "remote-" + config_.embedding_model; }

private:
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

    RemoteConfig config_;
    Endpoint endpoint_;
};

}  // namespace mnemo
