// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <string>

namespace mnemo {

/// Source of record identifiers. Implementations are thread-safe.
class IdGenerator {
public:
    virtual ~IdGenerator() = default;
    virtual std::string next() = 0;
};

/// Random RFC 4122 version-4 identifiers.
class RandomIdGenerator final : public IdGenerator {
public:
    RandomIdGenerator();
    std::string next() override;

private:
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

/// Reproducible UUID-shaped identifiers: the first group carries the seed,
/// the last group a counter starting at 1.
///   seed 42 -> 0000002a-0000-4000-8000-000000000001, ...-000000000002, ...
class CounterIdGenerator final : public IdGenerator {
public:
    explicit CounterIdGenerator(std::uint64_t seed) : seed_(seed) {}
    std::string next() override;

private:
    std::mutex mutex_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace mnemo
