// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

/// Immutable dense vector. Copies share storage, so records and index
/// entries can be duplicated freely during copy-on-write updates.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    /// Throws Error(invalid_input) when empty or any value is non-finite.
    explicit EmbeddingVector(std::vector<double> values);

    std::span<const double> values() const noexcept;
    std::size_t dimension() const noexcept { return values_ ? values_->size() : 0; }
    bool empty() const noexcept { return dimension() == 0; }
    double norm() const noexcept;

    friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) noexcept;

private:
    std::shared_ptr<const std::vector<double>> values_;
};

/// Token-hash bag embedding: lowercased alphanumeric tokens are hashed into
/// `dimension` buckets and the counts are L2-normalized. Pure function of its inputs.
/// Requires dimension >= 8.
EmbeddingVector hash_embed(std::string_view text, std::size_t dimension);

/// Splits text into the lowercased tokens hash_embed counts.
std::vector<std::string> hash_tokens(std::string_view text);

class Embedder {
public:
    virtual ~Embedder() = default;

    /// Embeds each text. Empty input lists and blank texts are rejected with
    /// Error(invalid_input); malformed backend output raises provider_protocol.
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);
    EmbeddingVector embed_one(std::string_view text);

    virtual std::size_t dimension() const = 0;
    /// Stable name recorded in snapshot fingerprints.
    virtual std::string id() const = 0;

private:
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
};

class HashEmbedder final : public Embedder {
public:
    static constexpr std::size_t default_dimension = 256;

    explicit HashEmbedder(std::size_t dimension = default_dimension);

    std::size_t dimension() const override { return dimension_; }
    std::string id() const override;

private:
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

    std::size_t dimension_;
};

}  // namespace mnemo
