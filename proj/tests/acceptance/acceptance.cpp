// SPDX-License-Identifier: Apache-2.0
// Acceptance checks AC1..AC9. One PASS/FAIL line each; exit status 1 when any fails.
// usage: mnemo_acceptance [path/to/mnemo-bench]
#include "mnemo/bench/harness.hpp"
#include "mnemo/bench/report.hpp"
#include "mnemo/bench/scoring.hpp"
#include "mnemo/bench/tokenizer.hpp"
#include "mnemo/store/state.hpp"
#include "oracles/exhaustive_scan.hpp"
#include "oracles/lexical_oracle.hpp"
#include "support/fake_model.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

using namespace mnemo;
using namespace mnemo::testing;
using Steady = std::chrono::steady_clock;

namespace {

const std::filesystem::path kFixtures = MNEMO_FIXTURE_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Steady::time_point start) {
    return std::chrono::duration<double>(Steady::now() - start).count();
}

std::vector<double> raw(const EmbeddingVector& v) { return {v.values().begin(), v.values().end()}; }

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

const std::vector<std::string> kWords{"pizza",  "hiking", "paris", "guitar", "sister", "dog",    "cat",
                                      "coffee", "tennis", "books", "rain",   "garden", "office", "beach",
                                      "piano",  "train",  "movie", "yoga",   "lake",   "bread"};

std::string random_phrase(std::mt19937_64& rng, int min_words, int max_words) {
    const int n = min_words + static_cast<int>(rng() % (max_words - min_words + 1));
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += kWords[rng() % kWords.size()];
    }
    return out;
}

// ---------------------------------------------------------------- AC1

class SequentialIds final : public IdGenerator {
public:
    std::string next() override { return fmt::format("m{:04d}", ++n_); }

private:
    int n_ = 0;
};

// What the update phase must do to a fact store, written without the engine:
// top-s by cosine over live memories (ties by creation), then apply the chosen op.
struct ReferenceStore {
    struct Memory {
        std::string id;
        std::string text;
        Instant created;
        Instant updated;
        std::size_t rank = 0;
        std::vector<std::pair<std::string, Instant>> priors;
    };
    struct Step {
        MemoryOp op;
        std::string text;
        Instant at;
    };

    std::size_t dimension;
    std::vector<Memory> live;
    std::map<std::string, std::vector<Step>> lineage;
    int counter = 0;

    std::vector<std::string> presented(const std::string& fact, std::size_t s) const {
        std::vector<oracle::Item> items;
        for (const auto& m : live) items.push_back({m.id, raw(hash_embed(m.text, dimension)), m.rank});
        return oracle::ranked(items, raw(hash_embed(fact, dimension)), s);
    }
    Memory* find(const std::string& id) {
        for (auto& m : live) {
            if (m.id == id) return &m;
        }
        return nullptr;
    }
    void add(const std::string& text, Instant at) {
        const auto id = fmt::format("m{:04d}", ++counter);
        live.push_back({id, text, at, at, static_cast<std::size_t>(counter), {}});
        lineage[id].push_back({MemoryOp::add, text, at});
    }
    void update(const std::string& id, const std::string& text, Instant at) {
        auto* m = find(id);
        m->priors.push_back({m->text, at});
        m->text = text;
        m->updated = at;
        lineage[id].push_back({MemoryOp::update, text, at});
    }
    void remove(const std::string& id, Instant at) {
        auto* m = find(id);
        lineage[id].push_back({MemoryOp::remove, m->text, at});
        live.erase(live.begin() + (m - live.data()));
    }
};

// Returns the number of mismatches.
int conformance_scenario(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t dimension = 64;
    const std::size_t s = 2 + rng() % 9;
    const int fact_total = 5 + static_cast<int>(rng() % 26);  // <= 30

    std::vector<std::vector<std::string>> pairs;
    for (int made = 0; made < fact_total;) {
        const int n = std::min(fact_total - made, 1 + static_cast<int>(rng() % 3));
        std::vector<std::string> facts;
        for (int i = 0; i < n; ++i, ++made) facts.push_back(fmt::format("{} f{}", random_phrase(rng, 1, 3), made));
        pairs.push_back(std::move(facts));
    }

    FakeModel model;
    ReferenceStore ref{dimension, {}, {}, 0};
    int mismatches = 0;
    std::size_t pair_index = 0;
    Instant now = ts("2024-01-01T00:00:00Z");

    model.facts = [&](const std::string&, const std::string&) { return pairs[pair_index]; };
    model.decide = [&](const UpdateView& view) -> ChatResponse {
        const auto expected = ref.presented(view.fact, s);
        std::vector<std::string> shown;
        for (const auto& c : view.candidates) shown.push_back(c.id);
        if (shown != expected) {
            ++mismatches;
            std::cerr << fmt::format("  AC1 seed {}: presented [{}] expected [{}]\n", seed, fmt::join(shown, ","),
                                     fmt::join(expected, ","));
        }
        auto pick = [&] { return expected[rng() % expected.size()]; };
        const double r = unit(rng);
        if (r < 0.35) {
            // sometimes duplicate a live text so the index sees exact ties
            auto text = !ref.live.empty() && unit(rng) < 0.15 ? ref.live[rng() % ref.live.size()].text : view.fact;
            ref.add(text, now);
            return add_op(text);
        }
        if (r < 0.6 && !expected.empty()) {
            const auto target = pick();
            const auto text = view.fact + " revised";
            ref.update(target, text, now);
            return update_op(target, text);
        }
        if (r < 0.8 && !expected.empty()) {
            const auto target = pick();
            ref.remove(target, now);
            return delete_op(target);
        }
        if (r < 0.9) return noop_op();
        // malformed choices must degrade to NOOP
        switch (rng() % 3) {
            case 0: return add_op("   ");
            case 1: {
                for (const auto& m : ref.live) {
                    if (std::find(expected.begin(), expected.end(), m.id) == expected.end()) return update_op(m.id, "x");
                }
                return update_op("ghost", "x");
            }
            default: return delete_op("ghost");
        }
    };

    auto config = test_config();
    config.attribution = Attribution::shared;
    config.similar_memories = s;
    config.summary_refresh_every = 0;
    EngineServices services;
    services.provider = model.provider();
    services.embedder = std::make_shared<HashEmbedder>(dimension);
    auto clock = std::make_shared<ManualClock>(now, std::chrono::milliseconds{0});
    services.clock = clock;
    services.ids = std::make_shared<SequentialIds>();
    Engine engine(config, std::move(services));

    for (pair_index = 0; pair_index < pairs.size(); ++pair_index) {
        clock->advance(std::chrono::minutes{1});
        now += std::chrono::minutes{1};
        const auto stamp = format_instant(now);
        engine.ingest(IngestRequest{"conv", {},
                                    {msg("Alice", fmt::format("turn {} a", pair_index), stamp),
                                     msg("Bob", fmt::format("turn {} b", pair_index), stamp)}});
    }

    const auto records = engine.get_all("conv");
    if (records.size() != ref.live.size()) {
        std::cerr << fmt::format("  AC1 seed {}: {} live records, expected {}\n", seed, records.size(), ref.live.size());
        return mismatches + 1;
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& got = records[i];
        const auto& want = ref.live[i];
        bool same = got.id == want.id && got.text == want.text && got.created_at == want.created &&
                    got.updated_at == want.updated && got.history.size() == want.priors.size();
        for (std::size_t h = 0; same && h < got.history.size(); ++h) {
            same = got.history[h].prior_text == want.priors[h].first && got.history[h].at == want.priors[h].second;
        }
        if (!same) {
            ++mismatches;
            std::cerr << fmt::format("  AC1 seed {}: record {} '{}' expected {} '{}'\n", seed, got.id, got.text, want.id,
                                     want.text);
        }
    }
    for (const auto& [id, steps] : ref.lineage) {
        const auto history = engine.history(id);
        bool same = history.size() == steps.size();
        for (std::size_t h = 0; same && h < steps.size(); ++h) {
            same = history[h].op == steps[h].op && history[h].text == steps[h].text && history[h].at == steps[h].at;
        }
        if (!same) {
            ++mismatches;
            std::cerr << fmt::format("  AC1 seed {}: lineage of {} differs\n", seed, id);
        }
    }
    return mismatches;
}

Verdict ac1() {
    const auto start = Steady::now();
    int mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) mismatches += conformance_scenario(seed);
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 10.0,
            fmt::format("50 scenarios, {} mismatches, {:.2f} s (limit 10 s)", mismatches, elapsed)};
}

// ---------------------------------------------------------------- AC2

Verdict ac2() {
    const auto start = Steady::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    const std::size_t dimension = 64;
    auto unit_vector = [&] {
        std::vector<double> v(dimension);
        double norm = 0;
        for (auto& x : v) {
            x = gauss(rng);
            norm += x * x;
        }
        for (auto& x : v) x /= std::sqrt(norm);
        return v;
    };

    VectorIndex index(dimension);
    std::vector<oracle::Item> items;
    for (std::size_t i = 0; i < 10000; ++i) {
        // every 50th vector repeats an earlier one, so equal scores occur
        auto v = i % 50 == 49 ? items[rng() % items.size()].v : unit_vector();
        const auto id = fmt::format("v{:05d}", (i * 7919) % 10000);  // ids not in insertion order
        index.upsert({id, EmbeddingVector(v), "ns", id});
        items.push_back({id, std::move(v), i});
    }
    int mismatches = 0;
    for (int q = 0; q < 100; ++q) {
        const auto query = q % 10 == 0 ? items[rng() % items.size()].v : unit_vector();
        for (const std::size_t k : {1, 5, 10}) {
            std::vector<std::string> got;
            for (const auto& hit : index.top_k(EmbeddingVector(query), k, "ns")) got.push_back(hit.id);
            if (got != oracle::ranked(items, query, k)) ++mismatches;
        }
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 30.0,
            fmt::format("10000 vectors x 100 queries x k{{1,5,10}}, {} mismatches, {:.2f} s (limit 30 s)", mismatches,
                        elapsed)};
}

// ---------------------------------------------------------------- AC3

Verdict ac3() {
    FakeModel model;
    model.entities = [](const std::string& text) {
        std::vector<ExtractedEntity> out{{"alice", "Person"}};
        if (text.find("San Francisco") != std::string::npos) out.push_back({"San_Francisco", "City"});
        if (text.find("New York") != std::string::npos) out.push_back({"New_York", "City"});
        return out;
    };
    model.relations = [](const std::string& text) {
        if (text.find("San Francisco") != std::string::npos) return std::vector<TripletCandidate>{{"alice", "lives_in", "San_Francisco"}};
        if (text.find("New York") != std::string::npos) return std::vector<TripletCandidate>{{"alice", "lives_in", "New_York"}};
        return std::vector<TripletCandidate>{};
    };
    auto config = test_config();
    config.graph_enabled = true;
    auto engine = make_engine(model, config);
    const std::map<std::string, std::string> users{{"Alice", "alice"}, {"Bob", "bob"}};
    engine->ingest({"c", users, {msg("Alice", "I live in San Francisco", "2024-03-01T10:00:00Z"),
                                 msg("Bob", "Nice city", "2024-03-01T10:01:00Z")}});
    engine->ingest({"c", users, {msg("Alice", "I just moved to New York", "2024-06-01T10:00:00Z"),
                                 msg("Bob", "Big move", "2024-06-01T10:01:00Z")}});

    std::vector<std::string> problems;
    const auto state = engine->namespace_state("alice");
    const auto& graph = state->graph;
    if (graph.edges.size() != 2) problems.push_back(fmt::format("{} edges", graph.edges.size()));
    const GraphEdge* old_edge = nullptr;
    const GraphEdge* new_edge = nullptr;
    for (const auto& [id, edge] : graph.edges) {
        const auto* destination = graph.find_node(edge->destination);
        if (destination && destination->name == "San_Francisco") old_edge = edge.get();
        if (destination && destination->name == "New_York") new_edge = edge.get();
    }
    if (!old_edge || !new_edge) {
        problems.push_back("missing SF or NY edge");
    } else {
        if (!old_edge->invalid || !old_edge->invalidated_at || *old_edge->invalidated_at < old_edge->created_at) {
            problems.push_back("SF edge not invalidated correctly");
        }
        if (new_edge->invalid) problems.push_back("NY edge invalid");
        const auto subgraph = engine->graph_entity_search("Where does alice live?", "alice");
        bool saw_new = false;
        for (const auto& edge : subgraph.edges) {
            if (edge.id == old_edge->id) problems.push_back("entity-centric search returned the invalid edge");
            saw_new = saw_new || edge.id == new_edge->id;
        }
        if (!saw_new) problems.push_back("entity-centric search missed the NY edge");
        const auto triplets = engine->graph_triplet_search("alice lives in", "alice", -1.0);
        if (triplets.size() != 1 || triplets[0].edge.id != new_edge->id) {
            problems.push_back(fmt::format("triplet search returned {} edges", triplets.size()));
        }
    }
    return {problems.empty(), problems.empty() ? "2 edges, SF invalid (invalidated_at >= created_at), both retrieval modes skip it"
                                               : fmt::format("{}", fmt::join(problems, "; "))};
}

// ---------------------------------------------------------------- AC4

Verdict ac4() {
    std::mt19937_64 rng(404);
    const std::size_t dimension = 128;
    HashEmbedder embedder(dimension);
    GraphState graph("g", dimension);
    const Instant t0 = ts("2024-01-01T00:00:00Z");
    const std::vector<std::string> relations{"likes", "lives_in", "works_at", "visited", "owns", "knows"};

    std::vector<std::string> node_ids;
    for (std::size_t i = 0; i < 30; ++i) {
        GraphNode node;
        node.id = fmt::format("n{:02d}", i);
        node.name = fmt::format("{}_{}", kWords[i % kWords.size()], i);
        node.label = "Thing";
        node.embedding = embedder.embed_one(node.name);
        node.created_at = t0;
        node.ns = "g";
        apply_graph_event(graph, node_add_event(node));
        node_ids.push_back(node.id);
    }
    std::vector<std::string> edge_ids;
    for (std::size_t i = 0; i < 200; ++i) {
        GraphEdge edge;
        // ids deliberately out of creation order
        edge.id = fmt::format("e{:03d}", (i * 37) % 200);
        edge.source = node_ids[rng() % node_ids.size()];
        edge.destination = node_ids[rng() % node_ids.size()];
        edge.relation = relations[rng() % relations.size()];
        edge.created_at = t0 + std::chrono::seconds(i);
        edge.provenance = {"c:0", "c:1"};
        edge.embedding = embedder.embed_one(graph.edge_text(edge));
        edge.relation_embedding = embedder.embed_one(edge.relation);
        apply_graph_event(graph, edge_add_event(edge));
        edge_ids.push_back(edge.id);
    }
    for (std::size_t i = 0; i < 25; ++i) {
        const auto& id = edge_ids[rng() % edge_ids.size()];
        if (!graph.find_edge(id)->invalid) apply_graph_event(graph, edge_invalidate_event(id, t0 + std::chrono::hours(1)));
    }

    int mismatches = 0;
    int checks = 0;
    for (int q = 0; q < 25; ++q) {
        const auto query = random_phrase(rng, 1, 4) + " " + relations[rng() % relations.size()];
        const auto qv = raw(embedder.embed_one(query));
        for (const double threshold : {-1.0, 0.0, 0.1, 0.25, 0.5}) {
            struct Row {
                double score;
                std::size_t order;
                std::string id;
            };
            std::vector<Row> rows;
            for (std::size_t order = 0; order < graph.edge_order.size(); ++order) {
                const auto* edge = graph.find_edge(graph.edge_order[order]);
                if (edge->invalid) continue;
                const double score = oracle::cos_sim(raw(edge->embedding), qv);
                if (score >= threshold) rows.push_back({score, order, edge->id});
            }
            std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.order != b.order) return a.order < b.order;
                return a.id < b.id;
            });
            const auto got = retrieve_semantic_triplets(embedder, graph, query, threshold);
            ++checks;
            bool same = got.size() == rows.size();
            for (std::size_t i = 0; same && i < rows.size(); ++i) {
                same = got[i].edge.id == rows[i].id && std::abs(got[i].score - rows[i].score) < 1e-12;
            }
            if (!same) ++mismatches;
        }
    }
    return {mismatches == 0, fmt::format("200 edges ({} valid), {} query/threshold checks, {} mismatches",
                                         graph.valid_edge_count(), checks, mismatches)};
}

// ---------------------------------------------------------------- AC5

struct GoldenRun {
    std::string digest;
    BenchReport report;
    RunResults results;
    std::size_t pairs = 0;
};

GoldenRun golden_run() {
    const auto dir = kFixtures / "golden";
    const auto dataset = load_dataset(dir / "dataset.json");
    EngineConfig config;
    config.async_summary = false;
    config.id_seed = 1;
    config.fsync = false;
    config.stamp_facts = true;
    EngineServices services;
    services.provider = ScriptedProvider::load(dir / "ingest_script.json");
    services.embedder = std::make_shared<HashEmbedder>();
    services.clock = std::make_shared<ManualClock>(dataset_start(dataset));
    Engine engine(config, std::move(services));

    GoldenRun run;
    for (const auto& item : replay_ingest(dataset, engine, AnswerMode::dense).conversations) run.pairs += item.pairs;
    auto answerer = ScriptedProvider::load(dir / "answer_script.json");
    auto judge = ScriptedProvider::load(dir / "judge_script.json");
    WhitespaceTokenizer tokenizer;
    BenchOptions options;
    options.repeats = 3;
    run.results = run_questions(engine, *answerer, *judge, tokenizer, dataset, options);
    run.report = build_report(run.results);
    run.digest = engine.store_digest();
    return run;
}

Verdict ac5() {
    const auto first = golden_run();
    const auto second = golden_run();
    auto pinned = slurp(kFixtures / "golden" / "expected_store_digest.txt");
    while (!pinned.empty() && std::isspace(static_cast<unsigned char>(pinned.back()))) pinned.pop_back();

    std::vector<std::string> problems;
    if (first.pairs != 12) problems.push_back(fmt::format("{} pairs ingested", first.pairs));
    if (first.digest != second.digest) problems.push_back("digest differs between runs");
    if (first.digest != pinned) problems.push_back(fmt::format("digest {} != golden {}", first.digest, pinned));
    if (first.report.questions != 10 || first.report.failed != 0) {
        problems.push_back(fmt::format("{} questions, {} failed", first.report.questions, first.report.failed));
    }
    if (std::abs(first.report.j - 7.0 / 10.0) > 1e-12 || first.report.j_std != 0.0) {
        problems.push_back(fmt::format("J = {} ± {}", first.report.j, first.report.j_std));
    }
    std::size_t ordered = 0;
    for (const auto& q : first.results.questions) ordered += q.search_seconds <= q.total_seconds ? 1 : 0;
    if (ordered != first.results.questions.size()) problems.push_back("search latency above total latency");
    return {problems.empty(),
            problems.empty() ? fmt::format("12 pairs, digest {}..., J = {:.3f} ± {:.3f}, search <= total for {}/{}",
                                           first.digest.substr(0, 12), first.report.j, first.report.j_std, ordered,
                                           first.results.questions.size())
                             : fmt::format("{}", fmt::join(problems, "; "))};
}

// ---------------------------------------------------------------- AC6

Verdict ac6() {
    struct Fixture {
        const char* gold;
        const char* generated;
        double f1;
        double bleu1;
    };
    const std::vector<Fixture> fixtures{
        {"a shell necklace", "a necklace", 0.8, std::exp(1.0 - 3.0 / 2.0)},
        {"A shell necklace", "a shell necklace.", 1.0, 1.0},
        {"7 May 2023", "May 7, 2023", 1.0, 1.0},
        {"New York", "Boston", 0.0, 0.0},
        {"pottery", "the pottery class", 0.5, 1.0 / 3.0},
        {"", "", 1.0, 1.0},
        {"something", "", 0.0, 0.0},
    };
    int failures = 0;
    for (const auto& f : fixtures) {
        if (std::abs(score_f1(f.gold, f.generated) - f.f1) > 1e-9) ++failures;
        if (std::abs(score_bleu1(f.gold, f.generated) - f.bleu1) > 1e-9) ++failures;
    }
    std::mt19937_64 rng(6);
    const std::vector<std::string> vocab{"The", "a", "red,", "Red", "car!", "boat", "May", "7", "2023", "it's", "its"};
    int randomized = 0;
    for (int i = 0; i < 20; ++i) {
        auto sentence = [&] {
            std::string out;
            for (int n = 1 + static_cast<int>(rng() % 8); n > 0; --n) out += vocab[rng() % vocab.size()] + " ";
            return out;
        };
        const auto gold = sentence();
        const auto generated = sentence();
        if (std::abs(score_f1(gold, generated) - oracle::f1(gold, generated)) > 1e-12) ++randomized;
        if (std::abs(score_bleu1(gold, generated) - oracle::bleu1(gold, generated)) > 1e-12) ++randomized;
    }
    return {failures == 0 && randomized == 0,
            fmt::format("{} fixtures ({} failures incl. F1 0.8 case), 20 randomized cases ({} mismatches)",
                        fixtures.size(), failures, randomized)};
}

// ---------------------------------------------------------------- AC7

const std::map<std::string, std::string> kPeople{{"Alice", "alice"}, {"Bob", "bob"}};
const std::vector<std::string> kCities{"Paris", "Lisbon", "Oslo", "Kyoto"};

void crash_model(FakeModel& model) {
    model.facts = [](const std::string& pair, const std::string& ns) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos < pair.size()) {
            auto end = pair.find('\n', pos);
            if (end == std::string::npos) end = pair.size();
            auto line = pair.substr(pos, end - pos);
            pos = end + 1;
            const auto close = line.find("] ");
            if (close != std::string::npos && line.compare(close + 2, ns.size(), ns == "alice" ? "Alice" : "Bob") == 0) {
                out.push_back(line.substr(close + 2));
            }
        }
        return out;
    };
    model.decide = [](const UpdateView& view) {
        if (view.candidates.empty()) return add_op(view.fact);
        const auto& top = view.candidates.front();
        if (view.fact.find("forget") != std::string::npos) return delete_op(top.id);
        if (view.fact.find("live in") != std::string::npos && top.text.find("live in") != std::string::npos) {
            return update_op(top.id, view.fact);
        }
        if (view.fact == top.text) return noop_op();
        return add_op(view.fact);
    };
    model.entities = [](const std::string& text) {
        std::vector<ExtractedEntity> out{{"alice", "Person"}};
        for (const auto& city : kCities) {
            if (text.find(city) != std::string::npos) out.push_back({city, "City"});
        }
        return out;
    };
    model.relations = [](const std::string& text) {
        std::vector<TripletCandidate> out;
        for (const auto& city : kCities) {
            if (text.find("live in " + city) != std::string::npos) out.push_back({"alice", "lives_in", city});
        }
        return out;
    };
    model.summarize = [](const std::string& conversation) { return fmt::format("{} chars so far", conversation.size()); };
}

EngineConfig crash_config(const std::filesystem::path& dir) {
    auto config = test_config();
    config.data_dir = dir;
    config.graph_enabled = true;
    config.snapshot_every = 5;
    config.summary_refresh_every = 3;
    return config;
}

std::unique_ptr<Engine> crash_engine(FakeModel& model, const std::filesystem::path& dir,
                                     std::function<void(const std::filesystem::path&)> hook = {}) {
    EngineServices services;
    services.provider = model.provider();
    services.embedder = std::make_shared<HashEmbedder>(64);
    services.clock = std::make_shared<ManualClock>(ts("2024-01-01T00:00:00Z"));
    services.after_append = std::move(hook);
    return std::make_unique<Engine>(crash_config(dir), std::move(services));
}

void crash_workload(Engine& engine) {
    const char* alice[] = {"I live in Paris", "I like green tea", "I live in Lisbon", "please forget the tea",
                           "I like green tea", "I live in Oslo", "I play chess", "I live in Kyoto", "I like jazz"};
    int minute = 0;
    auto stamp = [&] { return fmt::format("2024-03-01T10:{:02d}:00Z", minute++); };
    for (std::size_t i = 0; i < std::size(alice); ++i) {
        engine.ingest({"chat", kPeople, {msg("Alice", alice[i], stamp()), msg("Bob", fmt::format("Bob heard {}", i), stamp())}});
    }
    engine.ingest({"chat", kPeople, {msg("Alice", "I live in Paris again", stamp())}});  // left buffered
}

struct Component {
    std::string name;
    bool conversation = false;
};

std::string component_digest(const Engine& engine, const Component& c) {
    if (c.conversation) {
        auto state = engine.conversation_state(c.name);
        if (state) return state_digest(*state);
        ConversationState empty;
        empty.id = c.name;
        return state_digest(empty);
    }
    auto state = engine.namespace_state(c.name);
    return state ? state_digest(*state) : state_digest(NamespaceState(c.name, 64));
}

Verdict ac7() {
    TempDir scratch;
    FakeModel clean_model;
    crash_model(clean_model);

    // Clean run: the published state of a log just before its (j+1)-th append is
    // its state after j appends.
    const auto clean_dir = scratch.path() / "clean";
    const StoreLayout layout(clean_dir);
    const std::vector<Component> components{{"alice", false}, {"bob", false}, {"chat", true}};
    std::map<std::filesystem::path, std::size_t> by_path;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto dir = components[i].conversation ? layout.conversation_dir(components[i].name)
                                                    : layout.namespace_dir(components[i].name);
        by_path[(dir / "events.jsonl").lexically_normal()] = i;
    }
    std::vector<std::vector<std::string>> digests(components.size());
    std::vector<std::vector<std::uintmax_t>> sizes(components.size(), std::vector<std::uintmax_t>{0});
    std::vector<std::size_t> order;  // component of each global append
    Engine* live = nullptr;
    {
        auto engine = crash_engine(clean_model, clean_dir, [&](const std::filesystem::path& path) {
            const auto c = by_path.at(path.lexically_normal());
            digests[c].push_back(component_digest(*live, components[c]));
            sizes[c].push_back(std::filesystem::file_size(path));
            order.push_back(c);
        });
        live = engine.get();
        crash_workload(*engine);
        for (std::size_t c = 0; c < components.size(); ++c) digests[c].push_back(component_digest(*engine, components[c]));
    }
    const std::size_t total = order.size();

    std::mt19937_64 rng(77);
    int mismatches = 0;
    int torn_cuts = 0;
    for (int cut = 0; cut < 100; ++cut) {
        const std::size_t k = 1 + rng() % total;
        const bool torn = rng() % 2 == 0;
        const auto dir = scratch.path() / fmt::format("cut{}", cut);

        const pid_t child = ::fork();
        if (child == 0) {
            FakeModel model;
            crash_model(model);
            std::size_t appends = 0;
            auto engine = crash_engine(model, dir, [&](const std::filesystem::path&) {
                if (++appends == k) ::kill(::getpid(), SIGKILL);
            });
            crash_workload(*engine);
            ::_exit(3);
        }
        int status = 0;
        ::waitpid(child, &status, 0);
        if (!WIFSIGNALED(status) || WTERMSIG(status) != SIGKILL) {
            ++mismatches;
            std::cerr << fmt::format("  AC7 cut {}: child was not killed at append {}\n", cut, k);
            continue;
        }

        std::vector<std::size_t> survived(components.size(), 0);
        for (std::size_t i = 0; i < k; ++i) ++survived[order[i]];
        if (torn) {
            // the last batch only partly reached the disk
            const auto c = order[k - 1];
            const auto low = sizes[c][survived[c] - 1];
            const auto high = sizes[c][survived[c]];
            const auto keep = low + rng() % (high - low);
            const auto& comp = components[c];
            const auto file = (comp.conversation ? StoreLayout(dir).conversation_dir(comp.name)
                                                 : StoreLayout(dir).namespace_dir(comp.name)) /
                              "events.jsonl";
            std::filesystem::resize_file(file, keep);
            --survived[c];
            ++torn_cuts;
        }

        FakeModel model;
        crash_model(model);
        auto recovered = crash_engine(model, dir);
        for (std::size_t c = 0; c < components.size(); ++c) {
            if (component_digest(*recovered, components[c]) != digests[c][survived[c]]) {
                ++mismatches;
                std::cerr << fmt::format("  AC7 cut {} (append {}{}): {} differs after {} appends\n", cut, k,
                                         torn ? ", torn" : "", components[c].name, survived[c]);
            }
        }
        std::filesystem::remove_all(dir);
    }
    return {mismatches == 0, fmt::format("100 cut points over {} appends ({} torn tails), {} mismatches", total,
                                         torn_cuts, mismatches)};
}

// ---------------------------------------------------------------- AC8

Verdict ac8() {
    std::mt19937_64 rng(8);
    FakeModel model;
    std::vector<std::vector<std::string>> batches;
    for (int p = 0; p < 100; ++p) {
        std::vector<std::string> facts;
        for (int i = 0; i < 50; ++i) facts.push_back(fmt::format("{} note {}", random_phrase(rng, 3, 8), p * 50 + i));
        batches.push_back(std::move(facts));
    }
    std::size_t batch = 0;
    model.facts = [&](const std::string&, const std::string&) { return batches[batch]; };
    auto config = test_config();
    config.attribution = Attribution::shared;
    config.summary_refresh_every = 0;
    EngineServices services;
    services.provider = model.provider();
    services.embedder = std::make_shared<HashEmbedder>();
    services.clock = std::make_shared<ManualClock>(ts("2024-01-01T00:00:00Z"));
    Engine engine(config, std::move(services));
    for (batch = 0; batch < batches.size(); ++batch) {
        const auto stamp = fmt::format("2024-01-01T{:02d}:{:02d}:00Z", batch / 60, batch % 60);
        engine.ingest({"perf", {}, {msg("A", fmt::format("a{}", batch), stamp), msg("B", fmt::format("b{}", batch), stamp)}});
    }
    const auto stored = engine.get_all("perf").size();

    std::vector<double> latencies;
    for (int q = 0; q < 300; ++q) {
        const auto query = random_phrase(rng, 2, 6);
        const auto start = Steady::now();
        const auto hits = engine.search(query, 10, "perf");
        latencies.push_back(seconds_since(start));
        if (hits.empty()) return {false, "search returned nothing"};
    }
    const double p95 = percentile(latencies, 95);
    return {stored == 5000 && p95 < 0.020,
            fmt::format("{} memories, dense search p50 {:.2f} ms, p95 {:.2f} ms (limit 20 ms)", stored,
                        percentile(latencies, 50) * 1000, p95 * 1000)};
}

// ---------------------------------------------------------------- AC9

std::pair<int, std::string> run_command(const std::string& command) {
    std::string output;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) return {-1, {}};
    char buffer[4096];
    while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) output.append(buffer, n);
    const int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

Verdict ac9(const std::string& bench) {
    if (bench.empty() || !std::filesystem::exists(bench)) return {false, "mnemo-bench binary not given or missing"};
    TempDir scratch;
    const auto golden = kFixtures / "golden";
    const auto run_dir = scratch.path() / "run";
    const auto run = run_command(fmt::format(
        "'{}' run '{}' --provider-script '{}' --answer-script '{}' --judge-script '{}' --repeats 3 --out '{}' 2>/dev/null",
        bench, (golden / "dataset.json").string(), (golden / "ingest_script.json").string(),
        (golden / "answer_script.json").string(), (golden / "judge_script.json").string(), run_dir.string()));
    if (run.first != 0) return {false, fmt::format("bench run exited {}", run.first)};
    const auto json_out = run_command(fmt::format("'{}' report '{}' --json", bench, run_dir.string()));
    const auto table_out = run_command(fmt::format("'{}' report '{}'", bench, run_dir.string()));
    if (json_out.first != 0 || table_out.first != 0) return {false, "bench report failed"};

    std::vector<std::string> problems;
    const auto schema = nlohmann::json::parse(slurp(kFixtures / "report_schema.json"));
    const auto report = nlohmann::json::parse(json_out.second, nullptr, false);
    if (report.is_discarded()) {
        problems.push_back("report --json is not JSON");
    } else if (auto error = validate_schema(schema, report)) {
        problems.push_back("schema: " + *error);
    } else if (report.at("j").at("runs").size() != 3) {
        problems.push_back("expected one J per repeat");
    }
    for (const char* column : {"Search p50 (s)", "Search p95 (s)", "Total p50 (s)", "Total p95 (s)", "Memory tokens",
                               "Overall J", "0.700 ± 0.000", "single_hop", "multi_hop", "temporal", "open_domain"}) {
        if (table_out.second.find(column) == std::string::npos) problems.push_back(fmt::format("table lacks '{}'", column));
    }
    if (run.second.find(slurp(golden / "expected_store_digest.txt").substr(0, 64)) == std::string::npos) {
        problems.push_back("CLI store digest differs from the golden digest");
    }
    return {problems.empty(), problems.empty() ? "report.json matches the golden schema; table has all latency, token, J and category columns"
                                               : fmt::format("{}", fmt::join(problems, "; "))};
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::err);
    const std::string bench = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"AC1 update-phase conformance", ac1},
        {"AC2 vector index vs exhaustive scan", ac2},
        {"AC3 graph invalidation", ac3},
        {"AC4 triplet retrieval vs brute force", ac4},
        {"AC5 end-to-end golden", ac5},
        {"AC6 scoring", ac6},
        {"AC7 crash recovery", ac7},
        {"AC8 dense search latency", ac8},
        {"AC9 report shape", [&] { return ac9(bench); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict verdict;
        try {
            verdict = check();
        } catch (const std::exception& e) {
            verdict = {false, fmt::format("threw: {}", e.what())};
        }
        failed += verdict.pass ? 0 : 1;
        std::cout << fmt::format("{} {}: {}", verdict.pass ? "PASS" : "FAIL", name, verdict.detail) << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
