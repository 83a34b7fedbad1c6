// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/provider/embedding.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mnemo {

/// Cosine similarity clamped to [-1, 1]. Throws Error(invalid_input) on
/// dimension mismatch or an all-zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct IndexEntry {
    std::string id;
    EmbeddingVector vector;
    std::string ns;
    /// Opaque reference back to the owning record.
    std::string payload;
};

struct ScoredHit {
    std::string id;
    double score = 0.0;
    std::string payload;
};

/// Exact in-memory cosine index partitioned by namespace.
///
/// Hits are ordered by score descending, then by first insertion (an id
/// keeps its insertion rank across re-upserts), then by id. Copies are
/// cheap: namespaces are shared until one side writes to them.
class VectorIndex {
public:
    explicit VectorIndex(std::size_t dimension);

    std::size_t dimension() const noexcept { return dimension_; }

    void upsert(IndexEntry entry);
    bool remove(std::string_view id, std::string_view ns);

    /// Requires k >= 1.
    std::vector<ScoredHit> top_k(const EmbeddingVector& query, std::size_t k, std::string_view ns) const;
    /// Every entry scoring >= min_score, in top_k order.
    std::vector<ScoredHit> scan(const EmbeddingVector& query, std::string_view ns, double min_score) const;

    bool contains(std::string_view id, std::string_view ns) const;
    std::size_t size() const noexcept;
    std::size_t size(std::string_view ns) const;
    /// Ids in insertion order.
    std::vector<std::string> ids(std::string_view ns) const;

private:
    struct Slot {
        IndexEntry entry;
        std::uint64_t inserted = 0;
    };
    struct Space {
        std::vector<Slot> slots;
        std::unordered_map<std::string, std::size_t> position;
    };

    const Space* find(std::string_view ns) const;
    Space& writable(std::string_view ns);
    std::vector<ScoredHit> ranked(const EmbeddingVector& query, std::string_view ns, std::size_t limit,
                                  double min_score) const;

    std::size_t dimension_;
    std::uint64_t next_insert_ = 0;
    std::map<std::string, std::shared_ptr<Space>, std::less<>> spaces_;
};

/// Thread-safe wrapper: readers work on the snapshot current at call entry,
/// writers are serialized and publish a new snapshot atomically.
class ConcurrentVectorIndex {
public:
    explicit ConcurrentVectorIndex(std::size_t dimension);

    void upsert(IndexEntry entry);
    bool remove(std::string_view id, std::string_view ns);
    std::vector<ScoredHit> top_k(const EmbeddingVector& query, std::size_t k, std::string_view ns) const;
    std::shared_ptr<const VectorIndex> snapshot() const;

private:
    mutable std::mutex publish_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const VectorIndex> current_;
};

}  // namespace mnemo
