// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/index/vector_index.hpp"
#include "mnemo/pipeline/types.hpp"
#include "mnemo/store/event.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mnemo {

/// The fact store of one namespace together with its similarity index.
/// Mutated only through apply_memory_event, so live execution and log
/// replay share one definition of every transition.
struct MemorySpace {
    MemorySpace(std::string ns, std::size_t dimension) : ns(std::move(ns)), index(dimension) {}

    std::string ns;
    std::map<std::string, std::shared_ptr<const MemoryRecord>> records;
    VectorIndex index;
    std::uint64_t next_ordinal = 1;

    const MemoryRecord* find(std::string_view id) const;
    /// Records ordered by creation.
    std::vector<MemoryRecord> all() const;
};

enum class DeleteOrigin { pipeline, external };

EventRecord memory_add_event(const std::string& id, const std::string& text, const EmbeddingVector& embedding,
                             Instant at);
EventRecord memory_update_event(const std::string& id, const std::string& text, const std::string& prior_text,
                                const EmbeddingVector& embedding, Instant at);
EventRecord memory_delete_event(const std::string& id, const std::string& prior_text, DeleteOrigin origin,
                                Instant at);

/// Throws Error(integrity) for events that do not fit the current state
/// (duplicate add, update/delete of an unknown id).
void apply_memory_event(MemorySpace& space, const EventRecord& event);

nlohmann::ordered_json to_json(const MemorySpace& space);
MemorySpace memory_space_from_json(const nlohmann::json& json, std::size_t dimension);

}  // namespace mnemo
