// SPDX-License-Identifier: Apache-2.0
#include "mnemo/core/ids.hpp"

#include <fmt/format.h>

namespace mnemo {

RandomIdGenerator::RandomIdGenerator() {
    std::random_device device;
    std::seed_seq seq{device(), device(), device(), device()};
    rng_.seed(seq);
}

std::string RandomIdGenerator::next() {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    {
        std::lock_guard lock(mutex_);
        hi = rng_();
        lo = rng_();
    }
    hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32, (hi >> 16) & 0xffff, hi & 0xffff,
                       lo >> 48, lo & 0xffffffffffffULL);
}

std::string CounterIdGenerator::next() {
    std::uint64_t n = 0;
    {
        std::lock_guard lock(mutex_);
        n = ++counter_;
    }
    return fmt::format("{:08x}-0000-4000-8000-{:012x}", seed_ & 0xffffffffULL, n & 0xffffffffffffULL);
}

}  // namespace mnemo
