// SPDX-License-Identifier: Apache-2.0
#include "mnemo/store/state.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

namespace mnemo {

void apply_event(NamespaceState& state, const EventRecord& event) {
    switch (event.kind) {
        case EventKind::memory_add:
        case EventKind::memory_update:
        case EventKind::memory_delete:
            apply_memory_event(state.memories, event);
            break;
        case EventKind::node_add:
        case EventKind::edge_add:
        case EventKind::edge_invalidate:
            apply_graph_event(state.graph, event);
            break;
        default:
            fail(ErrorCode::integrity, fmt::format("event kind {} does not belong in a namespace log", to_string(event.kind)));
    }
    if (event.sequence != 0) state.sequence = event.sequence;
}

void apply_event(ConversationState& state, const EventRecord& event) {
    apply_conversation_event(state, event);
}

nlohmann::ordered_json to_json(const NamespaceState& state) {
    nlohmann::ordered_json json;
    json["namespace"] = state.ns();
    json["sequence"] = state.sequence;
    json["memories"] = to_json(state.memories);
    json["graph"] = to_json(state.graph);
    return json;
}

NamespaceState namespace_state_from_json(const nlohmann::json& json, std::size_t dimension) {
    NamespaceState state(json.at("namespace").get<std::string>(), dimension);
    state.sequence = json.at("sequence").get<std::uint64_t>();
    state.memories = memory_space_from_json(json.at("memories"), dimension);
    state.graph = graph_state_from_json(json.at("graph"), dimension);
    return state;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    require(EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) == 1, ErrorCode::io,
            "sha256 failed");
    std::string out;
    for (unsigned int i = 0; i < length; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

std::string state_digest(const NamespaceState& state) {
    return sha256_hex(to_json(state).dump());
}

std::string state_digest(const ConversationState& state) {
    return sha256_hex(to_json(state).dump());
}

std::vector<LineageEntry> memory_lineage(const std::vector<EventRecord>& events, std::string_view memory_id) {
    std::vector<LineageEntry> lineage;
    for (const auto& event : events) {
        MemoryOp op;
        switch (event.kind) {
            case EventKind::memory_add: op = MemoryOp::add; break;
            case EventKind::memory_update: op = MemoryOp::update; break;
            case EventKind::memory_delete: op = MemoryOp::remove; break;
            default: continue;
        }
        if (event.body.at("id").get<std::string>() != memory_id) continue;
        const auto& text = op == MemoryOp::remove ? event.body.at("prior_text") : event.body.at("text");
        lineage.push_back(LineageEntry{op, text.get<std::string>(), event.at});
    }
    return lineage;
}

}  // namespace mnemo
