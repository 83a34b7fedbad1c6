// SPDX-License-Identifier: Apache-2.0
#include "mnemo/service/metrics.hpp"

#include <fmt/format.h>

namespace mnemo {

void Metrics::observe(const std::string& route, int status, double seconds) {
    std::lock_guard lock(mutex_);
    ++requests_[{route, status}];
    auto& histogram = latency_[route];
    for (std::size_t i = 0; i < kBuckets.size(); ++i) {
        if (seconds <= kBuckets[i]) ++histogram.buckets[i];
    }
    ++histogram.count;
    histogram.sum += seconds;
}

void Metrics::count_search(const std::string& mode) {
    std::lock_guard lock(mutex_);
    ++searches_[mode];
}

void Metrics::count_decision(const std::string& op) {
    std::lock_guard lock(mutex_);
    ++decisions_[op];
}

std::uint64_t Metrics::requests(const std::string& route) const {
    std::lock_guard lock(mutex_);
    std::uint64_t total = 0;
    for (const auto& [key, count] : requests_) {
        if (key.first == route) total += count;
    }
    return total;
}

std::uint64_t Metrics::searches() const {
    std::lock_guard lock(mutex_);
    std::uint64_t total = 0;
    for (const auto& [mode, count] : searches_) total += count;
    return total;
}

std::string Metrics::render() const {
    std::lock_guard lock(mutex_);
    std::string out;
    out += "# HELP mnemo_http_requests_total HTTP requests by route and status.\n";
    out += "# TYPE mnemo_http_requests_total counter\n";
    for (const auto& [key, count] : requests_) {
        out += fmt::format("mnemo_http_requests_total{{route=\"{}\",status=\"{}\"}} {}\n", key.first, key.second, count);
    }
    out += "# HELP mnemo_search_requests_total Searches by mode.\n";
    out += "# TYPE mnemo_search_requests_total counter\n";
    std::uint64_t total = 0;
    for (const auto& [mode, count] : searches_) {
        out += fmt::format("mnemo_search_requests_total{{mode=\"{}\"}} {}\n", mode, count);
        total += count;
    }
    out += fmt::format("mnemo_search_requests_total {}\n", total);
    out += "# HELP mnemo_memory_decisions_total Executed memory operations.\n";
    out += "# TYPE mnemo_memory_decisions_total counter\n";
    for (const auto& [op, count] : decisions_) {
        out += fmt::format("mnemo_memory_decisions_total{{op=\"{}\"}} {}\n", op, count);
    }
    out += "# HELP mnemo_http_request_duration_seconds Request latency.\n";
    out += "# TYPE mnemo_http_request_duration_seconds histogram\n";
    for (const auto& [route, histogram] : latency_) {
        for (std::size_t i = 0; i < kBuckets.size(); ++i) {
            out += fmt::format("mnemo_http_request_duration_seconds_bucket{{route=\"{}\",le=\"{}\"}} {}\n", route,
                               kBuckets[i], histogram.buckets[i]);
        }
        out += fmt::format("mnemo_http_request_duration_seconds_bucket{{route=\"{}\",le=\"+Inf\"}} {}\n", route,
                           histogram.count);
        out += fmt::format("mnemo_http_request_duration_seconds_sum{{route=\"{}\"}} {}\n", route, histogram.sum);
        out += fmt::format("mnemo_http_request_duration_seconds_count{{route=\"{}\"}} {}\n", route, histogram.count);
    }
    return out;
}

}  // namespace mnemo
