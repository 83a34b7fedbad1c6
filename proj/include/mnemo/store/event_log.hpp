// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/store/event.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace mnemo {

struct EventLogOptions {
    /// fsync after every append; disable for benchmark ingestion.
    bool fsync = true;
    /// Runs after each durable append of a persistent log, before append returns.
    std::function<void(const std::filesystem::path&)> after_append;
};

/// Append-only line-delimited event file with gapless sequences.
///
/// Batches are atomic: the last event of a batch carries commit=true and
/// recovery discards any trailing events after the last commit marker, as
/// well as a torn final line.
class EventLog {
public:
    /// Opens (creating if needed) the log at `path`. Recovered committed
    /// events are returned through `recovered` when given. Throws
    /// Error(integrity) on a sequence gap or a corrupt line before the tail.
    static EventLog open(const std::filesystem::path& path, EventLogOptions options = {},
                         std::vector<EventRecord>* recovered = nullptr);
    /// Volatile log that keeps events in memory.
    static EventLog in_memory();

    EventLog(EventLog&&) noexcept;
    EventLog& operator=(EventLog&&) noexcept;
    ~EventLog();

    /// Assigns sequences to events carrying 0, checks the rest equal
    /// last+1, marks the final event as the commit point and writes the
    /// batch with one write. On failure the file is cut back to its prior
    /// length and Error(io) is thrown; on a bad sequence Error(integrity).
    void append(EventBatch& batch);

    std::uint64_t last_sequence() const noexcept { return last_sequence_; }
    bool persistent() const noexcept { return fd_ >= 0; }
    const std::filesystem::path& path() const noexcept { return path_; }

    /// Every committed event, re-read from disk for persistent logs.
    std::vector<EventRecord> read_all() const;

private:
    EventLog() = default;

    int fd_ = -1;
    std::filesystem::path path_;
    EventLogOptions options_;
    std::uint64_t last_sequence_ = 0;
    std::uint64_t size_ = 0;
    std::vector<EventRecord> memory_;
};

/// Parses log text. Returns the committed events and the byte length they
/// occupy. Throws Error(integrity) on gaps or corruption before the tail.
struct ParsedLog {
    std::vector<EventRecord> events;
    std::size_t committed_bytes = 0;
};
ParsedLog parse_event_log(std::string_view text);

}  // namespace mnemo
