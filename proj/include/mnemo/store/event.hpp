// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/core/time.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

enum class EventKind {
    memory_add,
    memory_update,
    memory_delete,
    node_add,
    edge_add,
    edge_invalidate,
    summary_set,
    message_append,
};

std::string_view to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view name);

/// One durable state transition. `sequence` is assigned when the event is
/// appended to its log; `commit` marks the last event of an atomic batch.
struct EventRecord {
    std::uint64_t sequence = 0;
    Instant at;
    EventKind kind = EventKind::memory_add;
    nlohmann::ordered_json body = nlohmann::ordered_json::object();
    bool commit = false;
};

/// {"seq":..,"at":..,"kind":..,"body":{..},"commit":..} with keys in that order.
nlohmann::ordered_json to_json(const EventRecord& event);
EventRecord event_from_json(const nlohmann::ordered_json& json);

using EventBatch = std::vector<EventRecord>;

nlohmann::ordered_json embedding_to_json(std::span<const double> values);

}  // namespace mnemo
