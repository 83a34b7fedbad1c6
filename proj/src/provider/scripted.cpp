// SPDX-License-Identifier: Apache-2.0
#include "mnemo/provider/scripted.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <fstream>

namespace mnemo {
namespace {

ScriptEntry entry_from_json(const nlohmann::json& item) {
    require(item.is_object() && item.contains("match") && item.contains("response"), ErrorCode::invalid_input,
            "script entries need 'match' and 'response'");
    ScriptEntry entry;
    const auto& match = item["match"];
    if (match.is_string()) {
        entry.contains.push_back(match.get<std::string>());
    } else if (match.is_object()) {
        if (auto it = match.find("contains"); it != match.end()) {
            if (it->is_string()) {
                entry.contains.push_back(it->get<std::string>());
            } else {
                entry.contains = it->get<std::vector<std::string>>();
            }
        }
        if (auto it = match.find("regex"); it != match.end()) entry.pattern = it->get<std::string>();
        if (auto it = match.find("times"); it != match.end()) entry.times = it->get<int>();
    } else {
        fail(ErrorCode::invalid_input, "script 'match' must be a string or object");
    }
    entry.response = response_from_json(item["response"]);
    return entry;
}

}  // namespace

ChatResponse response_from_json(const nlohmann::json& body) {
    require(body.is_object(), ErrorCode::invalid_input, "script response must be an object");
    ChatResponse response;
    if (auto it = body.find("text"); it != body.end() && !it->is_null()) {
        response.text = it->is_string() ? it->get<std::string>() : it->dump();
    }
    if (auto it = body.find("tool_calls"); it != body.end()) {
        for (const auto& call : *it) {
            response.tool_calls.push_back(
                ToolCall{call.at("name").get<std::string>(), call.value("arguments", nlohmann::json::object())});
        }
    }
    return response;
}

nlohmann::json response_to_json(const ChatResponse& response) {
    nlohmann::json body = nlohmann::json::object();
    if (response.text) body["text"] = *response.text;
    if (!response.tool_calls.empty()) {
        auto calls = nlohmann::json::array();
        for (const auto& call : response.tool_calls) calls.push_back({{"name", call.name}, {"arguments", call.arguments}});
        body["tool_calls"] = std::move(calls);
    }
    return body;
}

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries, bool strict, ChatResponse fallback)
    : strict_(strict), fallback_(std::move(fallback)) {
    entries_.reserve(entries.size());
    for (auto& entry : entries) {
        Compiled compiled{std::move(entry), std::nullopt, 0};
        if (compiled.entry.pattern) {
            try {
                compiled.regex.emplace(*compiled.entry.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                fail(ErrorCode::invalid_input, fmt::format("bad script regex '{}': {}", *compiled.entry.pattern, e.what()));
            }
        }
        entries_.push_back(std::move(compiled));
    }
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_json(const nlohmann::json& script, bool strict) {
    std::vector<ScriptEntry> entries;
    ChatResponse fallback{std::string("[]"), {}};
    const nlohmann::json* items = &script;
    if (script.is_object()) {
        strict = script.value("strict", strict);
        if (auto it = script.find("fallback"); it != script.end()) fallback = response_from_json(*it);
        items = &script.at("entries");
    }
    require(items->is_array(), ErrorCode::invalid_input, "script must be a JSON array of entries");
    for (const auto& item : *items) entries.push_back(entry_from_json(item));
    return std::make_shared<ScriptedProvider>(std::move(entries), strict, std::move(fallback));
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::load(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, fmt::format("cannot open script file {}", path.string()));
    try {
        return from_json(nlohmann::json::parse(in), strict);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::invalid_input, fmt::format("script file {}: {}", path.string(), e.what()));
    }
}

std::size_t ScriptedProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return transcript_.size();
}

std::vector<std::string> ScriptedProvider::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

ChatResponse ScriptedProvider::complete(const ChatRequest& request) {
    const auto serialized = serialize_for_matching(request);
    std::lock_guard lock(mutex_);
    transcript_.push_back(serialized);
    for (auto& compiled : entries_) {
        const auto& entry = compiled.entry;
        if (entry.times && compiled.used >= *entry.times) continue;
        bool matched = true;
        for (const auto& needle : entry.contains) {
            if (serialized.find(needle) == std::string::npos) {
                matched = false;
                break;
            }
        }
        if (matched && compiled.regex) matched = std::regex_search(serialized, *compiled.regex);
        if (matched) {
            ++compiled.used;
            return entry.response;
        }
    }
    if (strict_) {
        fail(ErrorCode::script_miss, fmt::format("no script entry matches request '{}'", request.purpose));
    }
    spdlog::debug("script fall-through for purpose '{}'", request.purpose);
    return fallback_;
}

}  // namespace mnemo
