// SPDX-License-Identifier: Apache-2.0
#include "mnemo/index/vector_index.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace mnemo {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    require(a.dimension() == b.dimension(), ErrorCode::invalid_input,
            fmt::format("cosine of vectors with dimensions {} and {}", a.dimension(), b.dimension()));
    const auto x = a.values();
    const auto y = b.values();
    double dot = 0.0;
    double nx = 0.0;
    double ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    require(nx > 0.0 && ny > 0.0, ErrorCode::invalid_input, "cosine of an all-zero vector");
    return std::clamp(dot / (std::sqrt(nx) * std::sqrt(ny)), -1.0, 1.0);
}

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
    require(dimension > 0, ErrorCode::invalid_input, "index dimension must be positive");
}

const VectorIndex::Space* VectorIndex::find(std::string_view ns) const {
    auto it = spaces_.find(ns);
    return it == spaces_.end() ? nullptr : it->second.get();
}

VectorIndex::Space& VectorIndex::writable(std::string_view ns) {
    auto it = spaces_.find(ns);
    if (it == spaces_.end()) {
        it = spaces_.emplace(std::string(ns), std::make_shared<Space>()).first;
    } else if (it->second.use_count() > 1) {
        it->second = std::make_shared<Space>(*it->second);
    }
    return *it->second;
}

void VectorIndex::upsert(IndexEntry entry) {
    require(entry.vector.dimension() == dimension_, ErrorCode::invalid_input,
            fmt::format("vector dimension {} does not match index dimension {}", entry.vector.dimension(), dimension_));
    require(entry.vector.norm() > 0.0, ErrorCode::invalid_input, "cannot index an all-zero vector");
    auto& space = writable(entry.ns);
    if (auto it = space.position.find(entry.id); it != space.position.end()) {
        space.slots[it->second].entry = std::move(entry);
        return;
    }
    space.position.emplace(entry.id, space.slots.size());
    space.slots.push_back(Slot{std::move(entry), next_insert_++});
}

bool VectorIndex::remove(std::string_view id, std::string_view ns) {
    const auto* existing = find(ns);
    if (existing == nullptr || existing->position.find(std::string(id)) == existing->position.end()) return false;
    auto& space = writable(ns);
    const auto it = space.position.find(std::string(id));
    const auto index = it->second;
    space.position.erase(it);
    if (index + 1 != space.slots.size()) {
        space.slots[index] = std::move(space.slots.back());
        space.position[space.slots[index].entry.id] = index;
    }
    space.slots.pop_back();
    return true;
}

std::vector<ScoredHit> VectorIndex::ranked(const EmbeddingVector& query, std::string_view ns, std::size_t limit,
                                           double min_score) const {
    require(query.dimension() == dimension_, ErrorCode::invalid_input,
            fmt::format("query dimension {} does not match index dimension {}", query.dimension(), dimension_));
    require(query.norm() > 0.0, ErrorCode::invalid_input, "query vector is all-zero");
    const auto* space = find(ns);
    if (space == nullptr) return {};

    struct Scored {
        double score;
        const Slot* slot;
    };
    std::vector<Scored> scored;
    scored.reserve(space->slots.size());
    for (const auto& slot : space->slots) {
        const double score = cosine(query, slot.entry.vector);
        if (score >= min_score) scored.push_back({score, &slot});
    }
    const auto before = [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.slot->inserted != b.slot->inserted) return a.slot->inserted < b.slot->inserted;
        return a.slot->entry.id < b.slot->entry.id;
    };
    const auto count = std::min(limit, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count), scored.end(), before);

    std::vector<ScoredHit> hits;
    hits.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        hits.push_back({scored[i].slot->entry.id, scored[i].score, scored[i].slot->entry.payload});
    }
    return hits;
}

std::vector<ScoredHit> VectorIndex::top_k(const EmbeddingVector& query, std::size_t k, std::string_view ns) const {
    require(k >= 1, ErrorCode::invalid_input, "top_k requires k >= 1");
    return ranked(query, ns, k, -2.0);
}

std::vector<ScoredHit> VectorIndex::scan(const EmbeddingVector& query, std::string_view ns, double min_score) const {
    return ranked(query, ns, static_cast<std::size_t>(-1), min_score);
}

bool VectorIndex::contains(std::string_view id, std::string_view ns) const {
    const auto* space = find(ns);
    return space != nullptr && space->position.count(std::string(id)) > 0;
}

std::size_t VectorIndex::size() const noexcept {
    std::size_t total = 0;
    for (const auto& [ns, space] : spaces_) total += space->slots.size();
    return total;
}

std::size_t VectorIndex::size(std::string_view ns) const {
    const auto* space = find(ns);
    return space == nullptr ? 0 : space->slots.size();
}

std::vector<std::string> VectorIndex::ids(std::string_view ns) const {
    const auto* space = find(ns);
    if (space == nullptr) return {};
    std::vector<const Slot*> ordered;
    ordered.reserve(space->slots.size());
    for (const auto& slot : space->slots) ordered.push_back(&slot);
    std::sort(ordered.begin(), ordered.end(), [](const Slot* a, const Slot* b) { return a->inserted < b->inserted; });
    std::vector<std::string> out;
    out.reserve(ordered.size());
    for (const auto* slot : ordered) out.push_back(slot->entry.id);
    return out;
}

ConcurrentVectorIndex::ConcurrentVectorIndex(std::size_t dimension)
    : current_(std::make_shared<const VectorIndex>(dimension)) {}

std::shared_ptr<const VectorIndex> ConcurrentVectorIndex::snapshot() const {
    std::lock_guard lock(publish_mutex_);
    return current_;
}

void ConcurrentVectorIndex::upsert(IndexEntry entry) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<VectorIndex>(*snapshot());
    next->upsert(std::move(entry));
    std::lock_guard lock(publish_mutex_);
    current_ = std::move(next);
}

bool ConcurrentVectorIndex::remove(std::string_view id, std::string_view ns) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<VectorIndex>(*snapshot());
    const bool removed = next->remove(id, ns);
    if (removed) {
        std::lock_guard lock(publish_mutex_);
        current_ = std::move(next);
    }
    return removed;
}

std::vector<ScoredHit> ConcurrentVectorIndex::top_k(const EmbeddingVector& query, std::size_t k,
                                                    std::string_view ns) const {
    return snapshot()->top_k(query, k, ns);
}

}  // namespace mnemo
