// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/graph/graph.hpp"
#include "mnemo/pipeline/conversation.hpp"
#include "mnemo/pipeline/memory_space.hpp"

#include <string>
#include <vector>

namespace mnemo {

/// Everything one namespace owns: dense memories and the graph.
struct NamespaceState {
    NamespaceState(const std::string& ns, std::size_t dimension) : memories(ns, dimension), graph(ns, dimension) {}

    MemorySpace memories;
    GraphState graph;
    std::uint64_t sequence = 0;

    const std::string& ns() const noexcept { return memories.ns; }
};

/// Routes memory events to the fact store and graph events to the graph.
void apply_event(NamespaceState& state, const EventRecord& event);
void apply_event(ConversationState& state, const EventRecord& event);

nlohmann::ordered_json to_json(const NamespaceState& state);
NamespaceState namespace_state_from_json(const nlohmann::json& json, std::size_t dimension);

/// Hex SHA-256 of the canonical JSON rendering.
std::string sha256_hex(std::string_view data);
std::string state_digest(const NamespaceState& state);
std::string state_digest(const ConversationState& state);

/// ADD/UPDATE/DELETE lineage of one memory from raw events, in sequence
/// order. Empty when the id never appears.
std::vector<LineageEntry> memory_lineage(const std::vector<EventRecord>& events, std::string_view memory_id);

}  // namespace mnemo
