// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <string>
#include <string_view>

namespace mnemo {

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// Parses an ISO-8601 timestamp that carries an explicit offset
/// ("2023-05-08T13:56:00Z", "2023-05-08 13:56:00.250+02:00").
/// Throws Error(invalid_input) on anything else.
Instant parse_instant(std::string_view text);

/// Canonical UTC rendering with millisecond precision, e.g. "2023-05-08T11:56:00.250Z".
std::string format_instant(Instant instant);

class Clock {
public:
    virtual ~Clock() = default;
    virtual Instant now() = 0;
};

class SystemClock final : public Clock {
public:
    Instant now() override;
};

/// Deterministic clock for tests and replays: every reading advances by `step`.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Instant start, std::chrono::milliseconds step = std::chrono::milliseconds{1})
        : ticks_(start.time_since_epoch().count()), step_(step.count()) {}

    Instant now() override {
        return Instant{std::chrono::milliseconds{ticks_.fetch_add(step_)}};
    }

    void advance(std::chrono::milliseconds delta) { ticks_.fetch_add(delta.count()); }

private:
    std::atomic<std::int64_t> ticks_;
    std::int64_t step_;
};

}  // namespace mnemo
