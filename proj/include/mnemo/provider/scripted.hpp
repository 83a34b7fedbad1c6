// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/provider/chat.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace mnemo {

/// One canned answer. An entry matches when every `contains` substring and
/// the optional regex occur in serialize_for_matching(request). `times`
/// bounds how often the entry may answer (unbounded when absent).
struct ScriptEntry {
    std::vector<std::string> contains;
    std::optional<std::string> pattern;
    std::optional<int> times;
    ChatResponse response;
};

/// Offline chat backend answering from an ordered script. The first live
/// matching entry answers. Strict scripts raise script_miss when nothing
/// matches; lenient scripts fall back to a default response.
class ScriptedProvider final : public ChatProvider {
public:
    explicit ScriptedProvider(std::vector<ScriptEntry> entries, bool strict = true,
                              ChatResponse fallback = ChatResponse{std::string("[]"), {}});

    /// Accepts either a JSON array of {match, response} entries or an object
    /// {"strict": bool, "entries": [...], "fallback": response}.
    ///   match:    "substring" | {"contains": str|[str], "regex": str, "times": int}
    ///   response: {"text": str|json, "tool_calls": [{"name": str, "arguments": {}}]}
    static std::shared_ptr<ScriptedProvider> from_json(const nlohmann::json& script, bool strict = true);
    static std::shared_ptr<ScriptedProvider> load(const std::filesystem::path& path, bool strict = true);

    std::size_t call_count() const;
    std::vector<std::string> transcript() const;

private:
    ChatResponse complete(const ChatRequest& request) override;

    struct Compiled {
        ScriptEntry entry;
        std::optional<std::regex> regex;
        int used = 0;
    };

    mutable std::mutex mutex_;
    std::vector<Compiled> entries_;
    bool strict_;
    ChatResponse fallback_;
    std::vector<std::string> transcript_;
};

/// Test double that answers through a callback.
class CallbackProvider final : public ChatProvider {
public:
    using Handler = std::function<ChatResponse(const ChatRequest&)>;

    explicit CallbackProvider(Handler handler) : handler_(std::move(handler)) {}

private:
    ChatResponse complete(const ChatRequest& request) override { return handler_(request); }

    Handler handler_;
};

ChatResponse response_from_json(const nlohmann::json& body);
nlohmann::json response_to_json(const ChatResponse& response);

}  // namespace mnemo
