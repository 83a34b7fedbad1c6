// SPDX-License-Identifier: Apache-2.0
#include "mnemo/store/event_log.hpp"

#include "mnemo/core/error.hpp"

#include <fcntl.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mnemo {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

[[noreturn]] void io_failure(const std::string& what, const std::filesystem::path& path) {
    fail(ErrorCode::io, fmt::format("{} {}: {}", what, path.string(), std::strerror(errno)));
}

}  // namespace

ParsedLog parse_event_log(std::string_view text) {
    ParsedLog parsed;
    std::vector<EventRecord> pending;
    std::size_t offset = 0;
    std::uint64_t expected = 1;
    while (offset < text.size()) {
        const auto end = text.find('\n', offset);
        if (end == std::string_view::npos) break;  // torn final line
        const auto line = text.substr(offset, end - offset);
        const bool last_line = end + 1 == text.size();
        EventRecord event;
        try {
            event = event_from_json(nlohmann::ordered_json::parse(line));
        } catch (const std::exception& error) {
            if (last_line) break;
            fail(ErrorCode::integrity, fmt::format("corrupt event at byte {}: {}", offset, error.what()));
        }
        require(event.sequence == expected, ErrorCode::integrity,
                fmt::format("event sequence {} where {} was expected", event.sequence, expected));
        ++expected;
        offset = end + 1;
        const bool commit = event.commit;
        pending.push_back(std::move(event));
        if (commit) {
            for (auto& committed : pending) parsed.events.push_back(std::move(committed));
            pending.clear();
            parsed.committed_bytes = offset;
        }
    }
    return parsed;
}

EventLog EventLog::open(const std::filesystem::path& path, EventLogOptions options,
                        std::vector<EventRecord>* recovered) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::io, fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));

    const auto text = read_file(path);
    auto parsed = parse_event_log(text);

    EventLog log;
    log.path_ = path;
    log.options_ = options;
    log.fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (log.fd_ < 0) io_failure("cannot open", path);
    if (parsed.committed_bytes < text.size()) {
        spdlog::warn("{}: discarding {} bytes of uncommitted tail", path.string(), text.size() - parsed.committed_bytes);
        if (::ftruncate(log.fd_, static_cast<off_t>(parsed.committed_bytes)) != 0) io_failure("cannot truncate", path);
    }
    log.size_ = parsed.committed_bytes;
    log.last_sequence_ = parsed.events.empty() ? 0 : parsed.events.back().sequence;
    if (recovered != nullptr) *recovered = std::move(parsed.events);
    return log;
}

EventLog EventLog::in_memory() {
    return EventLog();
}

EventLog::EventLog(EventLog&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      path_(std::move(other.path_)),
      options_(other.options_),
      last_sequence_(other.last_sequence_),
      size_(other.size_),
      memory_(std::move(other.memory_)) {}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(other.fd_, -1);
        path_ = std::move(other.path_);
        options_ = other.options_;
        last_sequence_ = other.last_sequence_;
        size_ = other.size_;
        memory_ = std::move(other.memory_);
    }
    return *this;
}

EventLog::~EventLog() {
    if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(EventBatch& batch) {
    if (batch.empty()) return;
    auto next = last_sequence_ + 1;
    for (auto& event : batch) {
        if (event.sequence == 0) event.sequence = next;
        require(event.sequence == next, ErrorCode::integrity,
                fmt::format("event sequence {} where {} was expected", event.sequence, next));
        event.commit = false;
        ++next;
    }
    batch.back().commit = true;

    if (fd_ < 0) {
        memory_.insert(memory_.end(), batch.begin(), batch.end());
        last_sequence_ = batch.back().sequence;
        return;
    }

    std::string payload;
    for (const auto& event : batch) {
        payload += to_json(event).dump();
        payload += '\n';
    }
    std::size_t written = 0;
    while (written < payload.size()) {
        const auto n = ::write(fd_, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int saved = errno;
            if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0) spdlog::error("cannot roll back {}", path_.string());
            errno = saved;
            io_failure("cannot append to", path_);
        }
        written += static_cast<std::size_t>(n);
    }
    if (options_.fsync && ::fsync(fd_) != 0) {
        const int saved = errno;
        if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0) spdlog::error("cannot roll back {}", path_.string());
        errno = saved;
        io_failure("cannot sync", path_);
    }
    size_ += payload.size();
    last_sequence_ = batch.back().sequence;
    if (options_.after_append) options_.after_append(path_);
}

std::vector<EventRecord> EventLog::read_all() const {
    if (fd_ < 0) return memory_;
    auto parsed = parse_event_log(read_file(path_));
    return std::move(parsed.events);
}

}  // namespace mnemo
