// SPDX-License-Identifier: Apache-2.0
#include "mnemo/pipeline/conversation.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

namespace mnemo {

std::vector<Message> ConversationState::recent(std::size_t window, std::optional<int> session) const {
    std::size_t begin = messages.size();
    while (begin > 0 && messages.size() - begin < window) {
        if (session && messages[begin - 1].session != *session) break;
        --begin;
    }
    return {messages.begin() + static_cast<std::ptrdiff_t>(begin), messages.end()};
}

std::string ConversationState::message_id(std::size_t index) const {
    return fmt::format("{}:{}", id, index);
}

nlohmann::ordered_json message_to_json(const Message& message) {
    nlohmann::ordered_json json;
    json["speaker"] = message.speaker;
    json["text"] = message.text;
    json["timestamp"] = message.timestamp;
    json["session"] = message.session;
    return json;
}

Message message_from_json(const nlohmann::json& json) {
    return Message::make(json.at("speaker").get<std::string>(), json.at("text").get<std::string>(),
                         json.at("timestamp").get<std::string>(), json.value("session", 0));
}

EventRecord message_append_event(const Message& message, Instant at, bool buffered, bool pair_end) {
    EventRecord event;
    event.at = at;
    event.kind = EventKind::message_append;
    event.body = message_to_json(message);
    event.body["buffered"] = buffered;
    event.body["pair_end"] = pair_end;
    return event;
}

EventRecord summary_set_event(const std::string& summary, Instant at) {
    EventRecord event;
    event.at = at;
    event.kind = EventKind::summary_set;
    event.body["summary"] = summary;
    return event;
}

void apply_conversation_event(ConversationState& state, const EventRecord& event) {
    switch (event.kind) {
        case EventKind::message_append: {
            auto message = message_from_json(nlohmann::json(event.body));
            if (event.body.value("buffered", false)) {
                state.pending = std::move(message);
                return;
            }
            if (state.pending && *state.pending == message) state.pending.reset();
            state.messages.push_back(std::move(message));
            if (event.body.value("pair_end", false)) ++state.pair_count;
            return;
        }
        case EventKind::summary_set:
            state.summary = event.body.at("summary").get<std::string>();
            return;
        default:
            fail(ErrorCode::integrity,
                 fmt::format("event kind {} does not apply to a conversation", to_string(event.kind)));
    }
}

nlohmann::ordered_json to_json(const ConversationState& state) {
    nlohmann::ordered_json json;
    json["id"] = state.id;
    json["summary"] = state.summary;
    auto messages = nlohmann::ordered_json::array();
    for (const auto& message : state.messages) messages.push_back(message_to_json(message));
    json["messages"] = std::move(messages);
    json["pending"] = state.pending ? message_to_json(*state.pending) : nlohmann::ordered_json(nullptr);
    json["pair_count"] = state.pair_count;
    return json;
}

ConversationState conversation_from_json(const nlohmann::json& json) {
    ConversationState state;
    state.id = json.at("id").get<std::string>();
    state.summary = json.at("summary").get<std::string>();
    for (const auto& message : json.at("messages")) state.messages.push_back(message_from_json(message));
    if (const auto& pending = json.at("pending"); !pending.is_null()) state.pending = message_from_json(pending);
    state.pair_count = json.at("pair_count").get<std::size_t>();
    return state;
}

}  // namespace mnemo
