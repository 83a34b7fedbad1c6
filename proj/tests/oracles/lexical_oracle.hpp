// SPDX-License-Identifier: Apache-2.0
// Brute-force F1 / BLEU-1: tokens are matched pairwise by marking used
// gold tokens instead of counting through maps.
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace oracle {

inline std::vector<std::string> tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
            continue;
        }
        const bool punct = (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
        if (punct) continue;
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        cur.push_back(static_cast<char>(c));
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::size_t overlap(const std::vector<std::string>& gold, const std::vector<std::string>& gen) {
    std::vector<bool> used(gold.size(), false);
    std::size_t hits = 0;
    for (const auto& g : gen) {
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (!used[i] && gold[i] == g) {
                used[i] = true;
                ++hits;
                break;
            }
        }
    }
    return hits;
}

inline double f1(const std::string& gold_text, const std::string& gen_text) {
    const auto gold = tokens(gold_text);
    const auto gen = tokens(gen_text);
    if (gold.empty() && gen.empty()) return 1.0;
    if (gold.empty() || gen.empty()) return 0.0;
    const double hits = static_cast<double>(overlap(gold, gen));
    if (hits == 0) return 0.0;
    const double p = hits / gen.size();
    const double r = hits / gold.size();
    return 2 * p * r / (p + r);
}

inline double bleu1(const std::string& gold_text, const std::string& gen_text) {
    const auto gold = tokens(gold_text);
    const auto gen = tokens(gen_text);
    if (gen.empty()) return gold.empty() ? 1.0 : 0.0;
    const double c = static_cast<double>(gen.size());
    const double r = static_cast<double>(gold.size());
    const double precision = static_cast<double>(overlap(gold, gen)) / c;
    const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    return precision * bp;
}

}  // namespace oracle
