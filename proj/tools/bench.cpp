// SPDX-License-Identifier: Apache-2.0
// mnemo-bench: replay a dataset, answer and judge its questions, report.
#include "mnemo/bench/harness.hpp"
#include "mnemo/bench/report.hpp"
#include "mnemo/core/error.hpp"
#include "mnemo/engine/runtime.hpp"
#include "mnemo/provider/scripted.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

namespace {

using namespace mnemo;

struct Common {
    std::filesystem::path dataset;
    std::string mode = "dense";
    std::string provider = "scripted";
    std::string provider_script;
    std::string embedder = "hash";
    std::size_t dimension = HashEmbedder::default_dimension;
    std::string engine_config;
    std::string data_dir;
    std::uint64_t seed = 1;
    bool session_reset = false;
    bool stamp_facts = true;
    std::string clock = "replay";
};

struct RunArgs {
    std::size_t k = 10;
    std::string judge = "scripted";
    std::string judge_script;
    std::string answer_script;
    std::size_t repeats = 1;
    bool vary_answerer = false;
    std::string tokenizer = "whitespace";
    std::string vocab;
    std::string out = "bench-run";
    double triplet_threshold = 0.3;
    std::size_t workers = 1;
    bool reuse = false;
};

void add_common(CLI::App& command, Common& common) {
    command.add_option("dataset", common.dataset, "Dataset JSON file")->required()->check(CLI::ExistingFile);
    command.add_option("--mode", common.mode, "dense or graph")->check(CLI::IsMember({"dense", "graph"}));
    command.add_option("--provider", common.provider, "Chat backend for the memory pipeline")
        ->check(CLI::IsMember({"scripted", "remote"}));
    command.add_option("--provider-script", common.provider_script, "Script file for the scripted provider");
    command.add_option("--embedder", common.embedder, "hash or remote")->check(CLI::IsMember({"hash", "remote"}));
    command.add_option("--dimension", common.dimension, "Embedding dimension");
    command.add_option("--config", common.engine_config, "JSON file with engine settings");
    command.add_option("--data-dir", common.data_dir, "Persistent store directory (in-memory when absent)");
    command.add_option("--seed", common.seed, "Seed for counter-based memory ids");
    command.add_flag("--session-reset,!--no-session-reset", common.session_reset,
                     "Keep the recency window within one session");
    command.add_flag("--stamp-facts,!--no-stamp-facts", common.stamp_facts,
                     "Prefix stored facts with the pair timestamp");
    command.add_option("--clock", common.clock,
                       "replay: store times start at the first message and tick 1 ms per reading; system: wall clock")
        ->check(CLI::IsMember({"replay", "system"}));
}

std::shared_ptr<ChatProvider> chat_backend(const std::string& backend, const std::string& script, const char* what) {
    ProviderSettings settings;
    settings.backend = backend;
    if (backend == "scripted") {
        require(!script.empty(), ErrorCode::invalid_input, fmt::format("the scripted {} needs a script file", what));
        settings.script = script;
    }
    return make_provider(settings);
}

std::unique_ptr<Engine> build_engine(const Common& common, const ConversationDataset& dataset) {
    EngineConfig config;
    if (!common.engine_config.empty()) {
        std::ifstream in(common.engine_config);
        require(in.good(), ErrorCode::io, fmt::format("cannot open {}", common.engine_config));
        config = engine_config_from_json(nlohmann::json::parse(in));
    }
    config.graph_enabled = config.graph_enabled || common.mode == "graph";
    config.session_reset = common.session_reset;
    config.stamp_facts = common.stamp_facts;
    config.async_summary = false;
    config.id_seed = common.seed;
    if (!common.data_dir.empty()) config.data_dir = std::filesystem::path(common.data_dir);

    EngineServices services;
    services.provider = chat_backend(common.provider, common.provider_script, "provider");
    EmbedderSettings embedder;
    embedder.backend = common.embedder;
    embedder.dimension = common.dimension;
    services.embedder = make_embedder(embedder);
    if (common.clock == "replay") services.clock = std::make_shared<ManualClock>(dataset_start(dataset));
    return std::make_unique<Engine>(config, std::move(services));
}

int do_ingest(const Common& common) {
    const auto dataset = load_dataset(common.dataset);
    auto engine = build_engine(common, dataset);
    const auto report = replay_ingest(dataset, *engine, *parse_answer_mode(common.mode));
    if (!common.data_dir.empty()) engine->snapshot_all();
    auto json = to_json(report);
    json["store_digest"] = engine->store_digest();
    std::cout << json.dump(2) << "\n";
    return 0;
}

int do_run(const Common& common, const RunArgs& args) {
    const auto dataset = load_dataset(common.dataset);
    auto engine = build_engine(common, dataset);
    const auto mode = *parse_answer_mode(common.mode);
    if (!args.reuse) {
        const auto ingestion = replay_ingest(dataset, *engine, mode);
        spdlog::info("ingested {} conversations in {:.3f} s", ingestion.conversations.size(), ingestion.wall_seconds);
    }
    auto answerer = args.answer_script.empty() ? chat_backend(common.provider, common.provider_script, "answerer")
                                               : chat_backend("scripted", args.answer_script, "answerer");
    auto judge = chat_backend(args.judge, args.judge_script, "judge");
    auto tokenizer = make_tokenizer(args.tokenizer, args.vocab);

    BenchOptions options;
    options.mode = mode;
    options.k = args.k;
    options.repeats = args.repeats;
    options.vary_answerer = args.vary_answerer;
    options.triplet_threshold = args.triplet_threshold;
    options.workers = args.workers;
    const auto results = run_questions(*engine, *answerer, *judge, *tokenizer, dataset, options);
    write_run(args.out, results);
    std::cout << render_report_table(build_report(results));
    std::cout << "store digest: " << engine->store_digest() << "\n";
    return 0;
}

int do_report(const std::filesystem::path& run_dir, bool as_json) {
    const auto report = report_run(run_dir);
    if (as_json) {
        std::cout << to_json(report).dump(2) << "\n";
    } else {
        std::cout << render_report_table(report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mnemo benchmark harness"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    Common ingest_common;
    auto* ingest = app.add_subcommand("ingest", "Replay a dataset into the engine and print the ingestion report");
    add_common(*ingest, ingest_common);

    Common run_common;
    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Ingest, answer, judge and write <out>/results.json and report files");
    add_common(*run, run_common);
    run->add_option("--k", run_args.k, "Memories retrieved per speaker")->check(CLI::PositiveNumber);
    run->add_option("--judge", run_args.judge, "scripted or remote")->check(CLI::IsMember({"scripted", "remote"}));
    run->add_option("--judge-script", run_args.judge_script, "Script file for the scripted judge");
    run->add_option("--answer-script", run_args.answer_script, "Separate script for the answerer");
    run->add_option("--repeats", run_args.repeats, "Independent judge runs")->check(CLI::PositiveNumber);
    run->add_flag("--vary-answerer", run_args.vary_answerer, "Regenerate answers on every repeat");
    run->add_option("--tokenizer", run_args.tokenizer, "whitespace or cl100k_base");
    run->add_option("--vocab", run_args.vocab, "cl100k_base vocabulary file");
    run->add_option("--out", run_args.out, "Run directory");
    run->add_option("--triplet-threshold", run_args.triplet_threshold, "Graph relation threshold")
        ->check(CLI::Range(-1.0, 1.0));
    run->add_option("--workers", run_args.workers, "Concurrent questions")->check(CLI::PositiveNumber);
    run->add_flag("--reuse", run_args.reuse, "Skip ingestion and use the store in --data-dir as is");

    std::string run_dir;
    bool report_json = false;
    auto* report = app.add_subcommand("report", "Rebuild and print the report of a run directory");
    report->add_option("run_dir", run_dir, "Directory written by 'run'")->required()->check(CLI::ExistingDirectory);
    report->add_flag("--json", report_json, "Print report.json instead of the table");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
    try {
        if (ingest->parsed()) return do_ingest(ingest_common);
        if (run->parsed()) return do_run(run_common, run_args);
        return do_report(run_dir, report_json);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
