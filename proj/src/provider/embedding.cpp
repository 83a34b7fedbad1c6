// SPDX-License-Identifier: Apache-2.0
#include "mnemo/provider/embedding.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mnemo {
namespace {

bool token_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n\f\v");
    return text.substr(first, last - first + 1);
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) {
    require(!values.empty(), ErrorCode::invalid_input, "embedding must not be empty");
    require(std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }),
            ErrorCode::invalid_input, "embedding values must be finite");
    values_ = std::make_shared<const std::vector<double>>(std::move(values));
}

std::span<const double> EmbeddingVector::values() const noexcept {
    if (!values_) return {};
    return {values_->data(), values_->size()};
}

double EmbeddingVector::norm() const noexcept {
    double sum = 0.0;
    for (double v : values()) sum += v * v;
    return std::sqrt(sum);
}

bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) noexcept {
    const auto x = a.values();
    const auto y = b.values();
    return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

std::vector<std::string> hash_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (token_char(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dimension) {
    require(dimension >= 8, ErrorCode::invalid_input, "hash embedding dimension must be >= 8");
    auto tokens = hash_tokens(text);
    // Punctuation-only text still needs a stable, non-zero vector.
    if (tokens.empty()) tokens.emplace_back(trim(text));

    std::vector<double> buckets(dimension, 0.0);
    for (const auto& token : tokens) buckets[fnv1a(token) % dimension] += 1.0;

    double sum = 0.0;
    for (double v : buckets) sum += v * v;
    const double norm = std::sqrt(sum);
    for (double& v : buckets) v /= norm;
    return EmbeddingVector(std::move(buckets));
}

std::vector<EmbeddingVector> Embedder::embed(const std::vector<std::string>& texts) {
    require(!texts.empty(), ErrorCode::invalid_input, "embed requires at least one text");
    for (const auto& text : texts) {
        require(!trim(text).empty(), ErrorCode::invalid_input, "cannot embed blank text");
    }
    auto vectors = embed_batch(texts);
    if (vectors.size() != texts.size()) {
        fail(ErrorCode::provider_protocol,
             fmt::format("embedder returned {} vectors for {} texts", vectors.size(), texts.size()));
    }
    for (const auto& v : vectors) {
        if (v.dimension() != dimension()) {
            fail(ErrorCode::provider_protocol,
                 fmt::format("embedder returned dimension {}, expected {}", v.dimension(), dimension()));
        }
    }
    return vectors;
}

EmbeddingVector Embedder::embed_one(std::string_view text) {
    return embed({std::string(text)}).front();
}

HashEmbedder::HashEmbedder(std::size_t dimension) : dimension_(dimension) {
    require(dimension >= 8, ErrorCode::invalid_input, "hash embedding dimension must be >= 8");
}

std::string HashEmbedder::id() const {
    return fmt::format("hash-fnv1a-{}", dimension_);
}

std::vector<EmbeddingVector> HashEmbedder::embed_batch(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(hash_embed(text, dimension_));
    return out;
}

}  // namespace mnemo
