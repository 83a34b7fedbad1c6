// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/rag.hpp"

#include "mnemo/bench/tokenizer.hpp"
#include "mnemo/core/error.hpp"

namespace mnemo {

ChunkRetriever::ChunkRetriever(Embedder& embedder, std::size_t chunk_words)
    : embedder_(embedder), chunk_words_(chunk_words), index_(embedder.dimension()) {
    require(chunk_words >= 1, ErrorCode::invalid_input, "chunk size must be at least one word");
}

void ChunkRetriever::build(const DatasetConversation& conversation) {
    chunks_.clear();
    index_ = VectorIndex(embedder_.dimension());
    const WhitespaceTokenizer words;
    std::string current;
    std::size_t current_words = 0;
    auto close = [&] {
        if (current.empty()) return;
        chunks_.push_back(std::move(current));
        current.clear();
        current_words = 0;
    };
    for (const auto& session : conversation.sessions) {
        for (const auto& message : session.messages) {
            const auto line = render_message(message);
            const auto n = words.count(line);
            if (current_words > 0 && current_words + n > chunk_words_) close();
            if (!current.empty()) current += '\n';
            current += line;
            current_words += n;
        }
    }
    close();
    if (chunks_.empty()) return;
    const auto embeddings = embedder_.embed(chunks_);
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        index_.upsert(IndexEntry{std::to_string(i), embeddings[i], "chunks", std::to_string(i)});
    }
}

std::vector<std::string> ChunkRetriever::retrieve(std::string_view query, std::size_t k) const {
    if (chunks_.empty()) return {};
    std::vector<std::string> out;
    for (const auto& hit : index_.top_k(embedder_.embed_one(query), k, "chunks")) {
        out.push_back(chunks_[std::stoul(hit.payload)]);
    }
    return out;
}

}  // namespace mnemo
