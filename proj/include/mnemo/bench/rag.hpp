// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/bench/dataset.hpp"
#include "mnemo/index/vector_index.hpp"
#include "mnemo/provider/embedding.hpp"

#include <string>
#include <vector>

namespace mnemo {

/// Comparison baseline: the raw conversation cut into fixed-size chunks of
/// rendered messages, retrieved by cosine similarity. Untuned.
class ChunkRetriever {
public:
    ChunkRetriever(Embedder& embedder, std::size_t chunk_words);

    /// Replaces the indexed chunks with those of `conversation`.
    void build(const DatasetConversation& conversation);
    std::vector<std::string> retrieve(std::string_view query, std::size_t k) const;

    const std::vector<std::string>& chunks() const noexcept { return chunks_; }

private:
    Embedder& embedder_;
    std::size_t chunk_words_;
    std::vector<std::string> chunks_;
    VectorIndex index_;
};

}  // namespace mnemo
