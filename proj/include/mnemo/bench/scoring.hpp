// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

/// Lowercase, drop ASCII punctuation, split on whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

/// Token-multiset F1 in [0, 1]. Two empty answers score 1.
double score_f1(std::string_view gold, std::string_view generated);

/// Clipped unigram precision times the brevity penalty exp(1 - r/c) for c < r.
double score_bleu1(std::string_view gold, std::string_view generated);

/// Nearest-rank percentile: the ceil(q/100 * n)-th smallest sample.
/// Requires non-empty samples and 0 < q < 100.
double percentile(std::span<const double> samples, double q);

double mean(std::span<const double> samples);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two samples.
double sample_std(std::span<const double> samples);

}  // namespace mnemo
