// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/scoring.hpp"

#include "mnemo/core/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace mnemo {
namespace {

std::map<std::string, int> multiset(const std::vector<std::string>& tokens) {
    std::map<std::string, int> counts;
    for (const auto& token : tokens) ++counts[token];
    return counts;
}

std::size_t overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto ca = multiset(a);
    const auto cb = multiset(b);
    std::size_t common = 0;
    for (const auto& [token, count] : ca) {
        auto it = cb.find(token);
        if (it != cb.end()) common += static_cast<std::size_t>(std::min(count, it->second));
    }
    return common;
}

}  // namespace

std::vector<std::string> normalize_answer(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80 && std::isspace(u)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else if (u < 0x80 && std::ispunct(u)) {
            continue;
        } else {
            current += static_cast<char>(u < 0x80 ? std::tolower(u) : u);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double score_f1(std::string_view gold, std::string_view generated) {
    const auto g = normalize_answer(gold);
    const auto p = normalize_answer(generated);
    if (g.empty() || p.empty()) return g.empty() && p.empty() ? 1.0 : 0.0;
    const auto common = overlap(g, p);
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(p.size());
    const double recall = static_cast<double>(common) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

double score_bleu1(std::string_view gold, std::string_view generated) {
    const auto r = normalize_answer(gold);
    const auto c = normalize_answer(generated);
    if (r.empty() || c.empty()) return r.empty() && c.empty() ? 1.0 : 0.0;
    const double precision = static_cast<double>(overlap(r, c)) / static_cast<double>(c.size());
    const double penalty =
        c.size() < r.size() ? std::exp(1.0 - static_cast<double>(r.size()) / static_cast<double>(c.size())) : 1.0;
    return precision * penalty;
}

double percentile(std::span<const double> samples, double q) {
    require(!samples.empty(), ErrorCode::invalid_input, "percentile of an empty sample");
    require(q > 0.0 && q < 100.0, ErrorCode::invalid_input, "percentile rank must lie in (0, 100)");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

double mean(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    // shifted by the first sample: identical samples average to themselves exactly
    const double origin = samples.front();
    double offset = 0.0;
    for (double x : samples) offset += x - origin;
    return origin + offset / static_cast<double>(samples.size());
}

double sample_std(std::span<const double> samples) {
    if (samples.size() < 2) return 0.0;
    const double m = mean(samples);
    double sum = 0.0;
    for (double x : samples) sum += (x - m) * (x - m);
    return std::sqrt(sum / static_cast<double>(samples.size() - 1));
}

}  // namespace mnemo
