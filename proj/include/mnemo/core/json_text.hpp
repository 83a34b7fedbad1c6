// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string_view>

namespace mnemo {

/// Extracts a JSON value from model output: accepts bare JSON, JSON inside a
/// ``` fence, or the outermost {...} / [...] span embedded in prose.
std::optional<nlohmann::json> parse_json_payload(std::string_view text);

}  // namespace mnemo
