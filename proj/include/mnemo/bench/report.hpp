// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/bench/harness.hpp"

#include <filesystem>
#include <optional>

namespace mnemo {

inline constexpr std::string_view kReportSchema = "mnemo-bench-report/1";

struct LatencyStats {
    std::optional<double> p50_seconds;
    std::optional<double> p95_seconds;
    std::size_t sample_count = 0;
};

struct CategoryStats {
    std::size_t questions = 0;
    std::size_t failed = 0;
    double f1 = 0.0;
    double bleu1 = 0.0;
    /// Mean J over repeats and its sample standard deviation.
    double j = 0.0;
    double j_std = 0.0;
};

struct BenchReport {
    std::string mode;
    std::size_t k = 0;
    std::string tokenizer;
    std::size_t repeats = 0;
    std::string vary;
    std::size_t questions = 0;
    std::size_t failed = 0;
    std::size_t judge_parse_errors = 0;
    LatencyStats search;
    LatencyStats total;
    double context_tokens_mean = 0.0;
    std::vector<std::size_t> context_tokens;
    double f1 = 0.0;
    double bleu1 = 0.0;
    double j = 0.0;
    double j_std = 0.0;
    /// J of each repeat.
    std::vector<double> j_runs;
    std::map<QuestionCategory, CategoryStats> categories;
};

/// Aggregates per-question results. Failed questions are counted but left
/// out of latency, token and score means; a judge answer that could not be
/// parsed is left out of that repeat's J denominator.
BenchReport build_report(const RunResults& results);

nlohmann::ordered_json to_json(const BenchReport& report);
/// Aligned text tables: the latency/token/J summary, then per-category scores.
std::string render_report_table(const BenchReport& report);

/// Writes results.json, report.json and report.txt under `run_dir`.
void write_run(const std::filesystem::path& run_dir, const RunResults& results);
/// Rebuilds the report from <run_dir>/results.json, rewriting report.json
/// and report.txt. Returns the report.
BenchReport report_run(const std::filesystem::path& run_dir);

}  // namespace mnemo
