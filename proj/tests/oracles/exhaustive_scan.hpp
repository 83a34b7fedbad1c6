// SPDX-License-Identifier: Apache-2.0
// Brute-force ranking used to check the vector index and triplet retrieval.
// Written against raw double arrays so it shares no code with the index.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace oracle {

struct Item {
    std::string id;
    std::vector<double> v;
    std::size_t rank = 0;  // insertion position
};

inline double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::min(1.0, std::max(-1.0, c));
}

/// Score descending, then earlier insertion, then id.
inline std::vector<std::string> ranked(const std::vector<Item>& items, const std::vector<double>& q, std::size_t k,
                                       double min_score = -2.0) {
    std::vector<std::pair<double, const Item*>> scored;
    for (const auto& item : items) {
        const double s = cos_sim(item.v, q);
        if (s >= min_score) scored.push_back({s, &item});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        if (x.second->rank != y.second->rank) return x.second->rank < y.second->rank;
        return x.second->id < y.second->id;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second->id);
    return out;
}

}  // namespace oracle
