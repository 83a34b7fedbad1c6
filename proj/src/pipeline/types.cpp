// SPDX-License-Identifier: Apache-2.0
#include "mnemo/pipeline/types.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

namespace mnemo {

Message Message::make(std::string speaker, std::string text, std::string timestamp, int session) {
    require(text.find_first_not_of(" \t\r\n") != std::string::npos, ErrorCode::invalid_input,
            "message text must not be empty");
    Message message;
    message.at = parse_instant(timestamp);
    message.speaker = std::move(speaker);
    message.text = std::move(text);
    message.timestamp = std::move(timestamp);
    message.session = session;
    return message;
}

std::string render_message(const Message& message) {
    return fmt::format("[{}] {}: {}", message.timestamp, message.speaker, message.text);
}

std::string_view to_string(MemoryOp op) noexcept {
    switch (op) {
        case MemoryOp::add: return "ADD";
        case MemoryOp::update: return "UPDATE";
        case MemoryOp::remove: return "DELETE";
        case MemoryOp::noop: return "NOOP";
    }
    return "NOOP";
}

std::optional<MemoryOp> parse_memory_op(std::string_view name) noexcept {
    if (name == "ADD") return MemoryOp::add;
    if (name == "UPDATE") return MemoryOp::update;
    if (name == "DELETE") return MemoryOp::remove;
    if (name == "NOOP") return MemoryOp::noop;
    return std::nullopt;
}

}  // namespace mnemo
