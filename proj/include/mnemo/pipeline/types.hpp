// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/core/time.hpp"
#include "mnemo/provider/embedding.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mnemo {

/// One timestamped conversational turn.
struct Message {
    std::string speaker;
    std::string text;
    /// Original ISO-8601 text, preserved verbatim in prompts.
    std::string timestamp;
    Instant at;
    /// Dialogue session the turn belongs to; only consulted when the
    /// recency window is configured not to span sessions.
    int session = 0;

    /// Validates non-empty text and an offset-qualified timestamp.
    static Message make(std::string speaker, std::string text, std::string timestamp, int session = 0);

    friend bool operator==(const Message& a, const Message& b) {
        return a.speaker == b.speaker && a.text == b.text && a.timestamp == b.timestamp && a.session == b.session;
    }
};

/// "[2023-05-08T13:56:00Z] Caroline: Hey Mel!"
std::string render_message(const Message& message);

enum class MemoryOp { add, update, remove, noop };

/// "ADD", "UPDATE", "DELETE", "NOOP"
std::string_view to_string(MemoryOp op) noexcept;
std::optional<MemoryOp> parse_memory_op(std::string_view name) noexcept;

struct CandidateFact {
    std::string text;
    /// Message ids ("<conversation>:<index>") of the pair the fact came from.
    std::pair<std::string, std::string> source_pair;
    Instant extracted_at;
};

struct RecordChange {
    MemoryOp op = MemoryOp::update;
    std::string prior_text;
    Instant at;
};

/// One stored natural-language fact.
struct MemoryRecord {
    std::string id;
    std::string text;
    EmbeddingVector embedding;
    std::string ns;
    Instant created_at;
    Instant updated_at;
    MemoryOp last_op = MemoryOp::add;
    std::vector<RecordChange> history;
    /// Creation rank within the namespace; orders get_all and index rebuilds.
    std::uint64_t ordinal = 0;
};

/// The operation selected for a candidate fact.
struct ToolDecision {
    MemoryOp op = MemoryOp::noop;
    std::optional<std::string> target_id;
    std::optional<std::string> new_text;
};

/// What happened to one extracted fact.
struct AuditEntry {
    CandidateFact fact;
    ToolDecision decision;
    std::string ns;
    /// Created, updated or deleted record.
    std::optional<std::string> memory_id;
    /// Set when the provider's decision failed validation and was downgraded to NOOP.
    std::optional<std::string> rejection;
};

/// Full change lineage of a record, reconstructed from the event log.
struct LineageEntry {
    MemoryOp op = MemoryOp::add;
    std::string text;
    Instant at;
};

}  // namespace mnemo
