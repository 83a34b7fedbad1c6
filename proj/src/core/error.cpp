// SPDX-License-Identifier: Apache-2.0
#include "mnemo/core/error.hpp"

namespace mnemo {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid_input";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::provider_unavailable: return "provider_unavailable";
        case ErrorCode::provider_protocol: return "provider_protocol";
        case ErrorCode::script_miss: return "script_miss";
        case ErrorCode::extraction_parse: return "extraction_parse";
        case ErrorCode::judge_parse: return "judge_parse";
        case ErrorCode::integrity: return "integrity";
        case ErrorCode::unsupported_version: return "unsupported_version";
        case ErrorCode::config_mismatch: return "config_mismatch";
        case ErrorCode::conflict: return "conflict";
        case ErrorCode::deadline_exceeded: return "deadline_exceeded";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

}  // namespace mnemo
