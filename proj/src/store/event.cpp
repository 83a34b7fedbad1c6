// SPDX-License-Identifier: Apache-2.0
#include "mnemo/store/event.hpp"

#include "mnemo/core/error.hpp"

#include <array>
#include <utility>

namespace mnemo {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kKinds{{
    {EventKind::memory_add, "memory_add"},
    {EventKind::memory_update, "memory_update"},
    {EventKind::memory_delete, "memory_delete"},
    {EventKind::node_add, "node_add"},
    {EventKind::edge_add, "edge_add"},
    {EventKind::edge_invalidate, "edge_invalidate"},
    {EventKind::summary_set, "summary_set"},
    {EventKind::message_append, "message_append"},
}};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    for (const auto& [k, name] : kKinds) {
        if (k == kind) return name;
    }
    return "unknown";
}

EventKind parse_event_kind(std::string_view name) {
    for (const auto& [k, known] : kKinds) {
        if (known == name) return k;
    }
    fail(ErrorCode::integrity, "unknown event kind '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const EventRecord& event) {
    nlohmann::ordered_json json;
    json["seq"] = event.sequence;
    json["at"] = format_instant(event.at);
    json["kind"] = to_string(event.kind);
    json["body"] = event.body;
    json["commit"] = event.commit;
    return json;
}

EventRecord event_from_json(const nlohmann::ordered_json& json) {
    try {
        EventRecord event;
        event.sequence = json.at("seq").get<std::uint64_t>();
        event.at = parse_instant(json.at("at").get<std::string>());
        event.kind = parse_event_kind(json.at("kind").get<std::string>());
        event.body = json.at("body");
        event.commit = json.value("commit", false);
        return event;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::integrity, std::string("malformed event record: ") + e.what());
    } catch (const Error& e) {
        fail(ErrorCode::integrity, std::string("malformed event record: ") + e.what());
    }
}

nlohmann::ordered_json embedding_to_json(std::span<const double> values) {
    auto array = nlohmann::ordered_json::array();
    for (double v : values) array.push_back(v);
    return array;
}

}  // namespace mnemo
