// SPDX-License-Identifier: Apache-2.0
#include "mnemo/pipeline/memory_space.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace mnemo {
namespace {

EmbeddingVector embedding_from(const nlohmann::ordered_json& json) {
    return EmbeddingVector(json.get<std::vector<double>>());
}

nlohmann::ordered_json record_to_json(const MemoryRecord& record) {
    nlohmann::ordered_json json;
    json["id"] = record.id;
    json["text"] = record.text;
    json["ordinal"] = record.ordinal;
    json["created_at"] = format_instant(record.created_at);
    json["updated_at"] = format_instant(record.updated_at);
    json["last_op"] = to_string(record.last_op);
    auto history = nlohmann::ordered_json::array();
    for (const auto& change : record.history) {
        nlohmann::ordered_json entry;
        entry["op"] = to_string(change.op);
        entry["prior_text"] = change.prior_text;
        entry["at"] = format_instant(change.at);
        history.push_back(std::move(entry));
    }
    json["history"] = std::move(history);
    json["embedding"] = embedding_to_json(record.embedding.values());
    return json;
}

}  // namespace

const MemoryRecord* MemorySpace::find(std::string_view id) const {
    auto it = records.find(std::string(id));
    return it == records.end() ? nullptr : it->second.get();
}

std::vector<MemoryRecord> MemorySpace::all() const {
    std::vector<MemoryRecord> out;
    out.reserve(records.size());
    for (const auto& [id, record] : records) out.push_back(*record);
    std::sort(out.begin(), out.end(), [](const MemoryRecord& a, const MemoryRecord& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.ordinal < b.ordinal;
    });
    return out;
}

EventRecord memory_add_event(const std::string& id, const std::string& text, const EmbeddingVector& embedding,
                             Instant at) {
    EventRecord event;
    event.at = at;
    event.kind = EventKind::memory_add;
    event.body["id"] = id;
    event.body["text"] = text;
    event.body["embedding"] = embedding_to_json(embedding.values());
    return event;
}

EventRecord memory_update_event(const std::string& id, const std::string& text, const std::string& prior_text,
                                const EmbeddingVector& embedding, Instant at) {
    EventRecord event;
    event.at = at;
    event.kind = EventKind::memory_update;
    event.body["id"] = id;
    event.body["text"] = text;
    event.body["prior_text"] = prior_text;
    event.body["embedding"] = embedding_to_json(embedding.values());
    return event;
}

EventRecord memory_delete_event(const std::string& id, const std::string& prior_text, DeleteOrigin origin,
                                Instant at) {
    EventRecord event;
    event.at = at;
    event.kind = EventKind::memory_delete;
    event.body["id"] = id;
    event.body["prior_text"] = prior_text;
    event.body["origin"] = origin == DeleteOrigin::pipeline ? "pipeline" : "external";
    return event;
}

void apply_memory_event(MemorySpace& space, const EventRecord& event) {
    const auto id = event.body.at("id").get<std::string>();
    switch (event.kind) {
        case EventKind::memory_add: {
            require(space.records.count(id) == 0, ErrorCode::integrity, fmt::format("memory {} added twice", id));
            auto record = std::make_shared<MemoryRecord>();
            record->id = id;
            record->text = event.body.at("text").get<std::string>();
            record->embedding = embedding_from(event.body.at("embedding"));
            record->ns = space.ns;
            record->created_at = event.at;
            record->updated_at = event.at;
            record->last_op = MemoryOp::add;
            record->ordinal = space.next_ordinal++;
            space.index.upsert(IndexEntry{id, record->embedding, space.ns, id});
            space.records.emplace(id, std::move(record));
            return;
        }
        case EventKind::memory_update: {
            auto it = space.records.find(id);
            require(it != space.records.end(), ErrorCode::integrity, fmt::format("update of unknown memory {}", id));
            auto record = std::make_shared<MemoryRecord>(*it->second);
            record->history.push_back(RecordChange{MemoryOp::update, record->text, event.at});
            record->text = event.body.at("text").get<std::string>();
            record->embedding = embedding_from(event.body.at("embedding"));
            record->updated_at = event.at;
            record->last_op = MemoryOp::update;
            space.index.upsert(IndexEntry{id, record->embedding, space.ns, id});
            it->second = std::move(record);
            return;
        }
        case EventKind::memory_delete: {
            require(space.records.erase(id) == 1, ErrorCode::integrity, fmt::format("delete of unknown memory {}", id));
            space.index.remove(id, space.ns);
            return;
        }
        default:
            fail(ErrorCode::integrity, fmt::format("event kind {} does not apply to memories", to_string(event.kind)));
    }
}

nlohmann::ordered_json to_json(const MemorySpace& space) {
    nlohmann::ordered_json json;
    json["namespace"] = space.ns;
    json["next_ordinal"] = space.next_ordinal;
    std::vector<const MemoryRecord*> ordered;
    for (const auto& [id, record] : space.records) ordered.push_back(record.get());
    std::sort(ordered.begin(), ordered.end(),
              [](const MemoryRecord* a, const MemoryRecord* b) { return a->ordinal < b->ordinal; });
    auto records = nlohmann::ordered_json::array();
    for (const auto* record : ordered) records.push_back(record_to_json(*record));
    json["records"] = std::move(records);
    return json;
}

MemorySpace memory_space_from_json(const nlohmann::json& json, std::size_t dimension) {
    MemorySpace space(json.at("namespace").get<std::string>(), dimension);
    space.next_ordinal = json.at("next_ordinal").get<std::uint64_t>();
    for (const auto& item : json.at("records")) {
        auto record = std::make_shared<MemoryRecord>();
        record->id = item.at("id").get<std::string>();
        record->text = item.at("text").get<std::string>();
        record->ordinal = item.at("ordinal").get<std::uint64_t>();
        record->created_at = parse_instant(item.at("created_at").get<std::string>());
        record->updated_at = parse_instant(item.at("updated_at").get<std::string>());
        record->last_op = parse_memory_op(item.at("last_op").get<std::string>()).value_or(MemoryOp::add);
        for (const auto& change : item.at("history")) {
            record->history.push_back(RecordChange{parse_memory_op(change.at("op").get<std::string>()).value_or(MemoryOp::update),
                                                   change.at("prior_text").get<std::string>(),
                                                   parse_instant(change.at("at").get<std::string>())});
        }
        record->embedding = EmbeddingVector(item.at("embedding").get<std::vector<double>>());
        record->ns = space.ns;
        space.index.upsert(IndexEntry{record->id, record->embedding, space.ns, record->id});
        space.records.emplace(record->id, std::move(record));
    }
    return space;
}

}  // namespace mnemo
