// SPDX-License-Identifier: Apache-2.0
#include "mnemo/engine/runtime.hpp"

#include "mnemo/core/error.hpp"
#include "mnemo/provider/scripted.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <set>

namespace mnemo {
namespace {

void reject_unknown(const nlohmann::json& json, const std::set<std::string>& known, std::string_view section) {
    require(json.is_object(), ErrorCode::invalid_input, fmt::format("{} settings must be an object", section));
    for (const auto& [key, value] : json.items()) {
        require(known.count(key) == 1, ErrorCode::invalid_input, fmt::format("unknown {} setting '{}'", section, key));
    }
}

template <typename T>
void read(const nlohmann::json& json, const char* key, T& target) {
    auto it = json.find(key);
    if (it == json.end() || it->is_null()) return;
    try {
        target = it->get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::invalid_input, fmt::format("setting '{}' has the wrong type", key));
    }
}

void read_remote(const nlohmann::json& json, RemoteConfig& remote) {
    read(json, "base_url", remote.base_url);
    read(json, "api_key_env", remote.api_key_env);
    read(json, "model", remote.model);
    read(json, "embedding_model", remote.embedding_model);
    read(json, "max_retries", remote.max_retries);
    if (auto it = json.find("timeout_ms"); it != json.end()) remote.timeout = std::chrono::milliseconds(it->get<long>());
    if (auto it = json.find("initial_backoff_ms"); it != json.end()) {
        remote.initial_backoff = std::chrono::milliseconds(it->get<long>());
    }
}

}  // namespace

std::shared_ptr<ChatProvider> make_provider(const ProviderSettings& settings) {
    if (settings.backend == "scripted") {
        require(settings.script.has_value(), ErrorCode::invalid_input, "the scripted provider needs a script file");
        return ScriptedProvider::load(*settings.script, settings.strict);
    }
    if (settings.backend == "remote") return std::make_shared<RemoteChatProvider>(settings.remote);
    fail(ErrorCode::invalid_input, fmt::format("unknown provider backend '{}'", settings.backend));
}

std::shared_ptr<Embedder> make_embedder(const EmbedderSettings& settings) {
    if (settings.backend == "hash") return std::make_shared<HashEmbedder>(settings.dimension);
    if (settings.backend == "remote") {
        auto remote = settings.remote;
        remote.embedding_dimension = settings.dimension;
        return std::make_shared<RemoteEmbedder>(remote);
    }
    fail(ErrorCode::invalid_input, fmt::format("unknown embedder backend '{}'", settings.backend));
}

EngineConfig engine_config_from_json(const nlohmann::json& json, EngineConfig base) {
    reject_unknown(json,
                   {"recency_window", "similar_memories", "summary_refresh_every", "async_summary", "graph_enabled",
                    "node_threshold", "relation_threshold", "node_budget", "attribution", "session_reset",
                    "stamp_facts", "id_seed", "data_dir", "fsync", "snapshot_every", "deadline_ms"},
                   "engine");
    read(json, "recency_window", base.recency_window);
    read(json, "similar_memories", base.similar_memories);
    read(json, "summary_refresh_every", base.summary_refresh_every);
    read(json, "async_summary", base.async_summary);
    read(json, "graph_enabled", base.graph_enabled);
    read(json, "node_threshold", base.graph.node_threshold);
    read(json, "relation_threshold", base.graph.relation_threshold);
    read(json, "node_budget", base.graph.node_budget);
    read(json, "session_reset", base.session_reset);
    read(json, "stamp_facts", base.stamp_facts);
    read(json, "fsync", base.fsync);
    read(json, "snapshot_every", base.snapshot_every);
    if (auto it = json.find("attribution"); it != json.end()) {
        auto attribution = parse_attribution(it->get<std::string>());
        require(attribution.has_value(), ErrorCode::invalid_input, "attribution must be per_speaker or shared");
        base.attribution = *attribution;
    }
    if (auto it = json.find("id_seed"); it != json.end() && !it->is_null()) base.id_seed = it->get<std::uint64_t>();
    if (auto it = json.find("data_dir"); it != json.end() && !it->is_null()) {
        base.data_dir = std::filesystem::path(it->get<std::string>());
    }
    if (auto it = json.find("deadline_ms"); it != json.end()) base.deadline = std::chrono::milliseconds(it->get<long>());
    require(base.graph.node_threshold >= -1.0 && base.graph.node_threshold <= 1.0, ErrorCode::invalid_input,
            "node_threshold must lie in [-1, 1]");
    require(base.graph.relation_threshold >= -1.0 && base.graph.relation_threshold <= 1.0, ErrorCode::invalid_input,
            "relation_threshold must lie in [-1, 1]");
    return base;
}

ProviderSettings provider_settings_from_json(const nlohmann::json& json, ProviderSettings base) {
    reject_unknown(json,
                   {"backend", "script", "strict", "base_url", "api_key_env", "model", "embedding_model",
                    "max_retries", "timeout_ms", "initial_backoff_ms"},
                   "provider");
    read(json, "backend", base.backend);
    if (auto it = json.find("script"); it != json.end() && !it->is_null()) {
        base.script = std::filesystem::path(it->get<std::string>());
    }
    read(json, "strict", base.strict);
    read_remote(json, base.remote);
    return base;
}

EmbedderSettings embedder_settings_from_json(const nlohmann::json& json, EmbedderSettings base) {
    reject_unknown(json,
                   {"backend", "dimension", "base_url", "api_key_env", "model", "embedding_model", "max_retries",
                    "timeout_ms", "initial_backoff_ms"},
                   "embedder");
    read(json, "backend", base.backend);
    read(json, "dimension", base.dimension);
    read_remote(json, base.remote);
    return base;
}

EnvLookup process_environment() {
    return [](const char* name) -> std::optional<std::string> {
        const char* value = std::getenv(name);
        if (value == nullptr) return std::nullopt;
        return std::string(value);
    };
}

}  // namespace mnemo
