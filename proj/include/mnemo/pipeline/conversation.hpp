// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/pipeline/types.hpp"
#include "mnemo/store/event.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mnemo {

inline constexpr std::string_view kEmptySummary = "(no summary yet)";

/// Per-conversation context for extraction: the running summary and the
/// committed message history the recency window is cut from.
struct ConversationState {
    std::string id;
    /// Empty until the first summary refresh; possibly stale.
    std::string summary;
    std::vector<Message> messages;
    /// Unpaired message waiting for its partner.
    std::optional<Message> pending;
    std::size_t pair_count = 0;

    std::size_t message_count() const noexcept { return messages.size(); }

    /// The last `window` committed messages, oldest first. With a session,
    /// only the trailing run of messages from that session qualifies.
    std::vector<Message> recent(std::size_t window, std::optional<int> session = std::nullopt) const;

    std::string message_id(std::size_t index) const;
};

EventRecord message_append_event(const Message& message, Instant at, bool buffered, bool pair_end);
EventRecord summary_set_event(const std::string& summary, Instant at);

void apply_conversation_event(ConversationState& state, const EventRecord& event);

nlohmann::ordered_json message_to_json(const Message& message);
Message message_from_json(const nlohmann::json& json);

nlohmann::ordered_json to_json(const ConversationState& state);
ConversationState conversation_from_json(const nlohmann::json& json);

}  // namespace mnemo
