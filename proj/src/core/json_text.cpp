// SPDX-License-Identifier: Apache-2.0
#include "mnemo/core/json_text.hpp"

namespace mnemo {
namespace {

std::optional<nlohmann::json> try_parse(std::string_view text) {
    auto parsed = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

std::string_view unfence(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return text;
    auto body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return text;
    ++body_start;
    const auto close = text.find("```", body_start);
    if (close == std::string_view::npos) return text.substr(body_start);
    return text.substr(body_start, close - body_start);
}

}  // namespace

std::optional<nlohmann::json> parse_json_payload(std::string_view text) {
    if (auto parsed = try_parse(text)) return parsed;
    const auto body = unfence(text);
    if (auto parsed = try_parse(body)) return parsed;
    for (const auto& [open, close] : {std::pair{'{', '}'}, std::pair{'[', ']'}}) {
        const auto first = body.find(open);
        const auto last = body.rfind(close);
        if (first != std::string_view::npos && last != std::string_view::npos && last > first) {
            if (auto parsed = try_parse(body.substr(first, last - first + 1))) return parsed;
        }
    }
    return std::nullopt;
}

}  // namespace mnemo
