// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/engine/engine.hpp"
#include "mnemo/provider/remote.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace mnemo {

struct ProviderSettings {
    /// "scripted" or "remote".
    std::string backend = "scripted";
    std::optional<std::filesystem::path> script;
    bool strict = true;
    RemoteConfig remote;
};

struct EmbedderSettings {
    /// "hash" or "remote".
    std::string backend = "hash";
    std::size_t dimension = HashEmbedder::default_dimension;
    RemoteConfig remote;
};

std::shared_ptr<ChatProvider> make_provider(const ProviderSettings& settings);
std::shared_ptr<Embedder> make_embedder(const EmbedderSettings& settings);

/// Reads the keys present in `json` over `base`:
/// recency_window, similar_memories, summary_refresh_every, async_summary,
/// graph_enabled, node_threshold, relation_threshold, node_budget,
/// attribution, session_reset, stamp_facts, id_seed, data_dir, fsync,
/// snapshot_every, deadline_ms. Unknown keys are rejected.
EngineConfig engine_config_from_json(const nlohmann::json& json, EngineConfig base = {});
ProviderSettings provider_settings_from_json(const nlohmann::json& json, ProviderSettings base = {});
EmbedderSettings embedder_settings_from_json(const nlohmann::json& json, EmbedderSettings base = {});

/// Environment lookup, injectable for tests.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup process_environment();

}  // namespace mnemo
