// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/engine/runtime.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace mnemo {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Worker threads for request handling.
    std::size_t threads = 8;
    ProviderSettings provider;
    EmbedderSettings embedder;
    EngineConfig engine;
    /// Static bearer token; requests without it get 401 (except /health).
    std::optional<std::string> token;
    std::string tokenizer = "whitespace";
    std::optional<std::filesystem::path> vocabulary;
    std::optional<std::filesystem::path> prompt_dir;
    /// Used by graph_triplet searches that do not pass a threshold.
    double triplet_threshold = 0.3;
    bool log_requests = true;
};

/// File keys: host, port, threads, provider{}, embedder{}, engine{}, token,
/// tokenizer, vocabulary, prompt_dir, triplet_threshold, log_requests.
ServiceConfig service_config_from_json(const nlohmann::json& json);

/// Reads the optional config file, then applies environment overrides:
///   MNEMO_HOST, MNEMO_PORT, MNEMO_DATA_DIR, MNEMO_PROVIDER, MNEMO_PROVIDER_SCRIPT,
///   MNEMO_EMBEDDER, MNEMO_NODE_THRESHOLD, MNEMO_RELATION_THRESHOLD,
///   MNEMO_GRAPH, MNEMO_API_TOKEN, MNEMO_TOKENIZER, MNEMO_VOCAB, MNEMO_DEADLINE_MS
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env);

}  // namespace mnemo
