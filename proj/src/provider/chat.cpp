// SPDX-License-Identifier: Apache-2.0
#include "mnemo/provider/chat.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace mnemo {
namespace {

bool type_matches(std::string_view type, const nlohmann::json& value) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") {
        return value.is_number_integer() ||
               (value.is_number_float() && std::floor(value.get<double>()) == value.get<double>());
    }
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return true;
}

std::optional<std::string> validate_at(const nlohmann::json& schema, const nlohmann::json& value,
                                       const std::string& path) {
    if (!schema.is_object()) return std::nullopt;

    if (auto it = schema.find("type"); it != schema.end() && (it->is_string() || it->is_array())) {
        const auto types = it->is_string() ? nlohmann::json::array({*it}) : *it;
        bool matched = false;
        for (const auto& type : types) matched = matched || (type.is_string() && type_matches(type.get<std::string>(), value));
        if (!matched) return fmt::format("{}: expected {}", path.empty() ? "/" : path, it->dump());
    }
    if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
        bool found = false;
        for (const auto& option : *it) found = found || option == value;
        if (!found) return fmt::format("{}: value not in enum", path.empty() ? "/" : path);
    }
    if (value.is_object()) {
        if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
            for (const auto& key : *it) {
                if (key.is_string() && !value.contains(key.get<std::string>())) {
                    return fmt::format("{}/{}: required property missing", path, key.get<std::string>());
                }
            }
        }
        const auto props = schema.find("properties");
        const bool closed = schema.value("additionalProperties", true) == false;
        for (const auto& [key, child] : value.items()) {
            if (props != schema.end() && props->contains(key)) {
                if (auto err = validate_at((*props)[key], child, path + "/" + key)) return err;
            } else if (closed) {
                return fmt::format("{}/{}: unexpected property", path, key);
            }
        }
    }
    if (value.is_array()) {
        if (auto it = schema.find("minItems"); it != schema.end() && it->is_number_integer()) {
            const auto minimum = it->get<std::int64_t>();
            if (static_cast<std::int64_t>(value.size()) < minimum) {
                return fmt::format("{}: fewer than {} items", path.empty() ? "/" : path, minimum);
            }
        }
        if (auto it = schema.find("items"); it != schema.end()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (auto err = validate_at(*it, value[i], fmt::format("{}/{}", path, i))) return err;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

void ChatRequest::validate() const {
    require(!messages.empty(), ErrorCode::invalid_input, "chat request has no messages");
    require(temperature >= 0.0, ErrorCode::invalid_input, "chat temperature must be >= 0");
}

const ToolSpec* ChatRequest::find_tool(std::string_view name) const {
    for (const auto& tool : tools) {
        if (tool.name == name) return &tool;
    }
    return nullptr;
}

std::string serialize_for_matching(const ChatRequest& request) {
    std::string out = fmt::format("purpose: {}\n", request.purpose);
    for (const auto& message : request.messages) {
        out += fmt::format("[{}] {}\n", to_string(message.role), message.text);
    }
    if (!request.tools.empty()) {
        out += "tools:";
        for (std::size_t i = 0; i < request.tools.size(); ++i) {
            out += (i == 0 ? " " : ", ") + request.tools[i].name;
        }
        out += "\n";
    }
    return out;
}

std::optional<std::string> validate_schema(const nlohmann::json& schema, const nlohmann::json& value) {
    return validate_at(schema, value, "");
}

ChatResponse ChatProvider::chat(const ChatRequest& request) {
    request.validate();
    auto response = complete(request);

    if (!response.text && response.tool_calls.empty()) {
        fail(ErrorCode::provider_protocol, "chat response carries neither text nor tool calls");
    }
    for (const auto& call : response.tool_calls) {
        const auto* tool = request.find_tool(call.name);
        if (tool == nullptr) {
            fail(ErrorCode::provider_protocol, fmt::format("tool call names undeclared operation '{}'", call.name));
        }
        if (auto err = validate_schema(tool->parameters, call.arguments)) {
            fail(ErrorCode::provider_protocol,
                 fmt::format("arguments for '{}' violate schema: {}", call.name, *err));
        }
    }
    return response;
}

}  // namespace mnemo
