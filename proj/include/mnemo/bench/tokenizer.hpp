// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mnemo {

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    /// Registered name recorded in reports ("whitespace", "cl100k_base").
    virtual std::string id() const = 0;
    virtual std::size_t count(std::string_view text) const = 0;
};

/// Approximate counter: whitespace-separated words.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string id() const override { return "whitespace"; }
    std::size_t count(std::string_view text) const override;
};

/// Byte-level BPE compatible with the cl100k_base encoding (ordinary text,
/// no special tokens). Needs the external vocabulary file: one
/// "<base64 token> <rank>" pair per line.
class BpeTokenizer final : public Tokenizer {
public:
    static BpeTokenizer load(const std::filesystem::path& vocabulary, std::string id = "cl100k_base");

    std::string id() const override { return id_; }
    std::size_t count(std::string_view text) const override;
    std::vector<int> encode(std::string_view text) const;

private:
    BpeTokenizer() = default;
    void merge(std::string_view piece, std::vector<int>& out) const;

    std::string id_;
    std::unordered_map<std::string, int> ranks_;
};

/// Splits text the way the cl100k pattern does before BPE.
std::vector<std::string_view> pretokenize_cl100k(std::string_view text);

/// "whitespace", or "cl100k_base" with a vocabulary path. Throws
/// Error(invalid_input) for unknown ids or a missing vocabulary.
std::shared_ptr<Tokenizer> make_tokenizer(std::string_view id, const std::filesystem::path& vocabulary = {});

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer);

}  // namespace mnemo
