// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mnemo {

enum class ErrorCode {
    invalid_input,
    not_found,
    provider_unavailable,
    provider_protocol,
    script_miss,
    extraction_parse,
    judge_parse,
    integrity,
    unsupported_version,
    config_mismatch,
    conflict,
    deadline_exceeded,
    io,
};

/// Machine-readable name used in logs and API error bodies.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace mnemo
