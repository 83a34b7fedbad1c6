// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

enum class Role { system, user, assistant };

std::string_view to_string(Role role) noexcept;

struct ChatMessage {
    Role role = Role::user;
    std::string text;
};

/// A callable operation the model may select, with a JSON-schema argument contract.
struct ToolSpec {
    std::string name;
    std::string description;
    nlohmann::json parameters = nlohmann::json::object();
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::vector<ToolSpec> tools;
    double temperature = 0.0;
    /// Short tag naming the pipeline step ("extract_facts", "update_memory", ...).
    /// Carried for logging and script matching; not sent to remote backends.
    std::string purpose;

    /// Throws Error(invalid_input) when messages are empty or temperature < 0.
    void validate() const;
    const ToolSpec* find_tool(std::string_view name) const;
};

struct ToolCall {
    std::string name;
    nlohmann::json arguments = nlohmann::json::object();
};

struct ChatResponse {
    std::optional<std::string> text;
    std::vector<ToolCall> tool_calls;

    bool has_tool_calls() const noexcept { return !tool_calls.empty(); }
};

/// Plain-text rendering of a request used for script matching:
///   purpose: <purpose>
///   [system] ...
///   [user] ...
///   tools: A, B
std::string serialize_for_matching(const ChatRequest& request);

/// Validates `value` against the subset of JSON Schema used by tool
/// declarations (type or a list of types, properties, required, items,
/// minItems, enum, additionalProperties=false). Returns a description of the first
/// violation, or nullopt when valid.
std::optional<std::string> validate_schema(const nlohmann::json& schema, const nlohmann::json& value);

/// Chat-completion backend with tool calling.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    /// Validates the request, delegates to the backend, then checks the
    /// response: it must carry text or tool calls, and every tool call must
    /// name a declared tool with arguments matching its schema
    /// (provider_protocol otherwise).
    ChatResponse chat(const ChatRequest& request);

private:
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

}  // namespace mnemo
