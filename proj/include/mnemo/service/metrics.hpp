// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace mnemo {

/// Request counters and latency histograms in the Prometheus text format.
class Metrics {
public:
    static constexpr std::array<double, 12> kBuckets{0.001, 0.0025, 0.005, 0.01, 0.025, 0.05,
                                                     0.1,   0.25,   0.5,   1.0,  2.5,   5.0};

    void observe(const std::string& route, int status, double seconds);
    void count_search(const std::string& mode);
    void count_decision(const std::string& op);

    std::uint64_t requests(const std::string& route) const;
    std::uint64_t searches() const;
    std::string render() const;

private:
    struct Histogram {
        std::array<std::uint64_t, kBuckets.size()> buckets{};
        std::uint64_t count = 0;
        double sum = 0.0;
    };

    mutable std::mutex mutex_;
    std::map<std::pair<std::string, int>, std::uint64_t> requests_;
    std::map<std::string, Histogram> latency_;
    std::map<std::string, std::uint64_t> searches_;
    std::map<std::string, std::uint64_t> decisions_;
};

}  // namespace mnemo
