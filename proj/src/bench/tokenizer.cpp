// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/tokenizer.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <climits>
#include <fstream>

namespace mnemo {
namespace {

struct CodeRange {
    char32_t lo;
    char32_t hi;
};

#include "unicode_tables.inc"

template <std::size_t N>
bool in_table(const CodeRange (&table)[N], char32_t cp) {
    auto it = std::upper_bound(std::begin(table), std::end(table), cp,
                               [](char32_t value, const CodeRange& range) { return value < range.lo; });
    if (it == std::begin(table)) return false;
    --it;
    return cp <= it->hi;
}

bool is_letter(char32_t cp) { return in_table(kLetterRanges, cp); }
bool is_number(char32_t cp) { return in_table(kNumberRanges, cp); }
bool is_space(char32_t cp) { return in_table(kSpaceRanges, cp); }
bool is_newline(char32_t cp) { return cp == U'\r' || cp == U'\n'; }

/// Decoded code points with their byte offsets; invalid bytes decode to
/// U+FFFD one byte at a time so offsets still cover the input.
struct Decoded {
    std::vector<char32_t> cps;
    std::vector<std::size_t> offsets;  // size cps + 1
};

Decoded decode(std::string_view text) {
    Decoded out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        char32_t cp = 0xFFFD;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 >> 5) == 0x6) {
            len = 2;
        } else if ((b0 >> 4) == 0xE) {
            len = 3;
        } else if ((b0 >> 3) == 0x1E) {
            len = 4;
        }
        if (len > 1) {
            bool ok = i + len <= text.size();
            char32_t value = b0 & (0xFF >> (len + 1));
            for (std::size_t k = 1; ok && k < len; ++k) {
                const auto b = static_cast<unsigned char>(text[i + k]);
                if ((b >> 6) != 0x2) ok = false;
                value = (value << 6) | (b & 0x3F);
            }
            if (ok) {
                cp = value;
            } else {
                len = 1;
            }
        }
        out.cps.push_back(cp);
        out.offsets.push_back(i);
        i += len;
    }
    out.offsets.push_back(text.size());
    return out;
}

/// Length in code points of the match at `i`, following the alternatives of
///   's|'t|'re|'ve|'m|'ll|'d  (case-insensitive)
///   [^\r\n\p{L}\p{N}]?\p{L}+
///   \p{N}{1,3}
///    ?[^\s\p{L}\p{N}]+[\r\n]*
///   \s*[\r\n]
///   \s+(?!\S)
///   \s+
std::size_t match_at(const std::vector<char32_t>& cps, std::size_t i) {
    const auto n = cps.size();
    auto lower = [&](std::size_t k) -> char32_t {
        if (k >= n) return 0;
        const auto c = cps[k];
        return c >= U'A' && c <= U'Z' ? c + 32 : c;
    };
    if (cps[i] == U'\'') {
        const auto a = lower(i + 1);
        const auto b = lower(i + 2);
        if (a == U's' || a == U'd' || a == U'm' || a == U't') return 2;
        if ((a == U'l' && b == U'l') || (a == U'v' && b == U'e') || (a == U'r' && b == U'e')) return 3;
    }
    {
        std::size_t k = i;
        const auto c = cps[k];
        if (!is_newline(c) && !is_letter(c) && !is_number(c)) ++k;
        std::size_t end = k;
        while (end < n && is_letter(cps[end])) ++end;
        if (end > k) return end - i;
    }
    if (is_number(cps[i])) {
        std::size_t end = i;
        while (end < n && end - i < 3 && is_number(cps[end])) ++end;
        return end - i;
    }
    {
        auto punct = [&](std::size_t k) { return k < n && !is_space(cps[k]) && !is_letter(cps[k]) && !is_number(cps[k]); };
        std::size_t k = i;
        if (cps[k] == U' ' && punct(k + 1)) ++k;
        if (punct(k)) {
            while (punct(k)) ++k;
            while (k < n && is_newline(cps[k])) ++k;
            return k - i;
        }
    }
    std::size_t run = i;
    while (run < n && is_space(cps[run])) ++run;
    if (run > i) {
        for (std::size_t p = run; p > i; --p) {
            if (is_newline(cps[p - 1])) return p - i;
        }
        if (run == n) return run - i;
        if (run - 1 > i) return run - 1 - i;
        return run - i;
    }
    return 1;
}

std::string base64_decode(std::string_view text) {
    std::string out((text.size() / 4) * 3 + 3, '\0');
    const int length = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                       reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    require(length >= 0, ErrorCode::invalid_input, "vocabulary contains invalid base64");
    std::size_t padding = 0;
    if (!text.empty() && text.back() == '=') ++padding;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
    out.resize(static_cast<std::size_t>(length) - padding);
    return out;
}

}  // namespace

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

std::vector<std::string_view> pretokenize_cl100k(std::string_view text) {
    const auto decoded = decode(text);
    std::vector<std::string_view> pieces;
    std::size_t i = 0;
    while (i < decoded.cps.size()) {
        const auto length = match_at(decoded.cps, i);
        const auto begin = decoded.offsets[i];
        const auto end = decoded.offsets[i + length];
        pieces.push_back(text.substr(begin, end - begin));
        i += length;
    }
    return pieces;
}

BpeTokenizer BpeTokenizer::load(const std::filesystem::path& vocabulary, std::string id) {
    std::ifstream in(vocabulary);
    require(static_cast<bool>(in), ErrorCode::invalid_input,
            fmt::format("cannot read tokenizer vocabulary {}", vocabulary.string()));
    BpeTokenizer tokenizer;
    tokenizer.id_ = std::move(id);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto space = line.find(' ');
        require(space != std::string::npos, ErrorCode::invalid_input,
                fmt::format("{}:{}: expected '<base64> <rank>'", vocabulary.string(), line_number));
        tokenizer.ranks_.emplace(base64_decode(std::string_view(line).substr(0, space)),
                                 std::stoi(line.substr(space + 1)));
    }
    require(!tokenizer.ranks_.empty(), ErrorCode::invalid_input,
            fmt::format("tokenizer vocabulary {} is empty", vocabulary.string()));
    return tokenizer;
}

void BpeTokenizer::merge(std::string_view piece, std::vector<int>& out) const {
    if (auto it = ranks_.find(std::string(piece)); it != ranks_.end()) {
        out.push_back(it->second);
        return;
    }
    // Boundaries between parts; start from single bytes and merge the
    // adjacent pair with the lowest rank until none is in the vocabulary.
    std::vector<std::size_t> bounds(piece.size() + 1);
    for (std::size_t i = 0; i <= piece.size(); ++i) bounds[i] = i;
    auto rank_of = [&](std::size_t i) {
        if (i + 2 >= bounds.size()) return INT_MAX;
        auto it = ranks_.find(std::string(piece.substr(bounds[i], bounds[i + 2] - bounds[i])));
        return it == ranks_.end() ? INT_MAX : it->second;
    };
    std::vector<int> ranks(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) ranks[i] = rank_of(i);
    for (;;) {
        int best = INT_MAX;
        std::size_t at = 0;
        for (std::size_t i = 0; i + 2 < bounds.size(); ++i) {
            if (ranks[i] < best) {
                best = ranks[i];
                at = i;
            }
        }
        if (best == INT_MAX) break;
        bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(at) + 1);
        ranks.erase(ranks.begin() + static_cast<std::ptrdiff_t>(at) + 1);
        ranks[at] = rank_of(at);
        if (at > 0) ranks[at - 1] = rank_of(at - 1);
    }
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        auto it = ranks_.find(std::string(piece.substr(bounds[i], bounds[i + 1] - bounds[i])));
        require(it != ranks_.end(), ErrorCode::invalid_input, "vocabulary lacks a single-byte token");
        out.push_back(it->second);
    }
}

std::vector<int> BpeTokenizer::encode(std::string_view text) const {
    std::vector<int> out;
    for (const auto piece : pretokenize_cl100k(text)) merge(piece, out);
    return out;
}

std::size_t BpeTokenizer::count(std::string_view text) const {
    return encode(text).size();
}

std::shared_ptr<Tokenizer> make_tokenizer(std::string_view id, const std::filesystem::path& vocabulary) {
    if (id == "whitespace") return std::make_shared<WhitespaceTokenizer>();
    if (id == "cl100k_base") {
        require(!vocabulary.empty(), ErrorCode::invalid_input, "the cl100k_base tokenizer needs a vocabulary file");
        return std::make_shared<BpeTokenizer>(BpeTokenizer::load(vocabulary, "cl100k_base"));
    }
    fail(ErrorCode::invalid_input, fmt::format("unknown tokenizer '{}'", id));
}

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer) {
    if (text.empty()) return 0;
    return tokenizer.count(text);
}

}  // namespace mnemo
