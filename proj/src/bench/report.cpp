// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/report.hpp"

#include "mnemo/bench/scoring.hpp"
#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace mnemo {
namespace {

LatencyStats latency(const std::vector<double>& samples) {
    LatencyStats stats;
    stats.sample_count = samples.size();
    if (!samples.empty()) {
        stats.p50_seconds = percentile(samples, 50);
        stats.p95_seconds = percentile(samples, 95);
    }
    return stats;
}

nlohmann::ordered_json latency_json(const LatencyStats& stats) {
    nlohmann::ordered_json json;
    json["p50_seconds"] = stats.p50_seconds ? nlohmann::ordered_json(*stats.p50_seconds) : nlohmann::ordered_json(nullptr);
    json["p95_seconds"] = stats.p95_seconds ? nlohmann::ordered_json(*stats.p95_seconds) : nlohmann::ordered_json(nullptr);
    json["sample_count"] = stats.sample_count;
    return json;
}

/// J per repeat over a subset of questions.
std::vector<double> j_per_repeat(const std::vector<const QuestionResult*>& questions, std::size_t repeats) {
    std::vector<double> runs;
    for (std::size_t r = 0; r < repeats; ++r) {
        std::size_t correct = 0;
        std::size_t judged = 0;
        for (const auto* q : questions) {
            if (q->failed || r >= q->repeats.size() || !q->repeats[r].label) continue;
            ++judged;
            correct += *q->repeats[r].label == JudgeLabel::correct ? 1 : 0;
        }
        if (judged > 0) runs.push_back(static_cast<double>(correct) / static_cast<double>(judged));
    }
    return runs;
}

std::string seconds(const std::optional<double>& value) {
    return value ? fmt::format("{:.3f}", *value) : std::string("-");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io, fmt::format("cannot write {}", path.string()));
    out << text;
    require(static_cast<bool>(out), ErrorCode::io, fmt::format("cannot write {}", path.string()));
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string line;
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            if (i > 0) line += " | ";
            line += i == 0 ? fmt::format("{:<{}}", rows[r][i], widths[i]) : fmt::format("{:>{}}", rows[r][i], widths[i]);
        }
        out += line + "\n";
        if (r == 0) {
            std::string rule;
            for (std::size_t i = 0; i < widths.size(); ++i) {
                if (i > 0) rule += "-+-";
                rule += std::string(widths[i], '-');
            }
            out += rule + "\n";
        }
    }
    return out;
}

}  // namespace

BenchReport build_report(const RunResults& results) {
    BenchReport report;
    report.mode = results.mode;
    report.k = results.k;
    report.tokenizer = results.tokenizer;
    report.repeats = results.repeats;
    report.vary = results.vary;
    report.questions = results.questions.size();

    std::vector<double> search;
    std::vector<double> total;
    std::vector<double> tokens;
    std::vector<double> f1;
    std::vector<double> bleu1;
    std::vector<const QuestionResult*> all;
    std::map<QuestionCategory, std::vector<const QuestionResult*>> by_category;
    for (auto category : kQuestionCategories) by_category[category];

    for (const auto& q : results.questions) {
        all.push_back(&q);
        by_category[q.category].push_back(&q);
        if (q.failed) {
            ++report.failed;
            continue;
        }
        for (const auto& r : q.repeats) report.judge_parse_errors += r.label ? 0 : 1;
        search.push_back(q.search_seconds);
        total.push_back(q.total_seconds);
        tokens.push_back(static_cast<double>(q.context_tokens));
        report.context_tokens.push_back(q.context_tokens);
        f1.push_back(q.f1);
        bleu1.push_back(q.bleu1);
    }
    report.search = latency(search);
    report.total = latency(total);
    report.context_tokens_mean = mean(tokens);
    report.f1 = mean(f1);
    report.bleu1 = mean(bleu1);
    report.j_runs = j_per_repeat(all, results.repeats);
    report.j = mean(report.j_runs);
    report.j_std = sample_std(report.j_runs);

    for (const auto& [category, questions] : by_category) {
        CategoryStats stats;
        stats.questions = questions.size();
        std::vector<double> cf1;
        std::vector<double> cbleu;
        for (const auto* q : questions) {
            if (q->failed) {
                ++stats.failed;
                continue;
            }
            cf1.push_back(q->f1);
            cbleu.push_back(q->bleu1);
        }
        stats.f1 = mean(cf1);
        stats.bleu1 = mean(cbleu);
        const auto runs = j_per_repeat(questions, results.repeats);
        stats.j = mean(runs);
        stats.j_std = sample_std(runs);
        report.categories[category] = stats;
    }
    return report;
}

nlohmann::ordered_json to_json(const BenchReport& report) {
    nlohmann::ordered_json json;
    json["schema"] = kReportSchema;
    json["mode"] = report.mode;
    json["k"] = report.k;
    json["tokenizer"] = report.tokenizer;
    json["repeats"] = report.repeats;
    json["vary"] = report.vary;
    json["questions"] = report.questions;
    json["failed"] = report.failed;
    json["judge_parse_errors"] = report.judge_parse_errors;
    json["search_latency"] = latency_json(report.search);
    json["total_latency"] = latency_json(report.total);
    nlohmann::ordered_json tokens;
    tokens["tokenizer"] = report.tokenizer;
    tokens["mean"] = report.context_tokens_mean;
    tokens["per_query"] = report.context_tokens;
    json["context_tokens"] = std::move(tokens);
    nlohmann::ordered_json j;
    j["mean"] = report.j;
    j["std"] = report.j_std;
    j["runs"] = report.j_runs;
    json["j"] = std::move(j);
    json["f1"] = report.f1;
    json["bleu1"] = report.bleu1;
    nlohmann::ordered_json categories;
    for (auto category : kQuestionCategories) {
        const auto& stats = report.categories.at(category);
        nlohmann::ordered_json item;
        item["questions"] = stats.questions;
        item["failed"] = stats.failed;
        item["f1"] = stats.f1;
        item["bleu1"] = stats.bleu1;
        item["j"] = stats.j;
        item["j_std"] = stats.j_std;
        categories[std::string(to_string(category))] = std::move(item);
    }
    json["categories"] = std::move(categories);
    return json;
}

std::string render_report_table(const BenchReport& report) {
    std::string out = fmt::format("mode={} k={} tokenizer={} repeats={} vary={} questions={} failed={} "
                                  "judge_parse_errors={}\n\n",
                                  report.mode, report.k, report.tokenizer, report.repeats, report.vary,
                                  report.questions, report.failed, report.judge_parse_errors);
    out += table({{"Method", "Search p50 (s)", "Search p95 (s)", "Total p50 (s)", "Total p95 (s)", "Memory tokens",
                   "Overall J"},
                  {report.mode, seconds(report.search.p50_seconds), seconds(report.search.p95_seconds),
                   seconds(report.total.p50_seconds), seconds(report.total.p95_seconds),
                   fmt::format("{:.1f}", report.context_tokens_mean),
                   fmt::format("{:.3f} ± {:.3f}", report.j, report.j_std)}});
    out += "\n";
    std::vector<std::vector<std::string>> rows{{"Category", "N", "F1", "B1", "J"}};
    for (auto category : kQuestionCategories) {
        const auto& stats = report.categories.at(category);
        rows.push_back({std::string(to_string(category)), std::to_string(stats.questions),
                        fmt::format("{:.3f}", stats.f1), fmt::format("{:.3f}", stats.bleu1),
                        fmt::format("{:.3f} ± {:.3f}", stats.j, stats.j_std)});
    }
    rows.push_back({"overall", std::to_string(report.questions), fmt::format("{:.3f}", report.f1),
                    fmt::format("{:.3f}", report.bleu1), fmt::format("{:.3f} ± {:.3f}", report.j, report.j_std)});
    out += table(rows);
    return out;
}

void write_run(const std::filesystem::path& run_dir, const RunResults& results) {
    std::filesystem::create_directories(run_dir);
    write_text(run_dir / "results.json", to_json(results).dump(2) + "\n");
    const auto report = build_report(results);
    write_text(run_dir / "report.json", to_json(report).dump(2) + "\n");
    write_text(run_dir / "report.txt", render_report_table(report));
}

BenchReport report_run(const std::filesystem::path& run_dir) {
    std::ifstream in(run_dir / "results.json", std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::invalid_input,
            fmt::format("{} has no results.json", run_dir.string()));
    std::ostringstream text;
    text << in.rdbuf();
    nlohmann::json json;
    try {
        json = nlohmann::json::parse(text.str());
    } catch (const nlohmann::json::exception& error) {
        fail(ErrorCode::invalid_input, fmt::format("{}: {}", (run_dir / "results.json").string(), error.what()));
    }
    const auto results = run_results_from_json(json);
    const auto report = build_report(results);
    write_text(run_dir / "report.json", to_json(report).dump(2) + "\n");
    write_text(run_dir / "report.txt", render_report_table(report));
    return report;
}

}  // namespace mnemo
