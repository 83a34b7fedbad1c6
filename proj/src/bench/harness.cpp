// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/harness.hpp"

#include "mnemo/bench/scoring.hpp"
#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

namespace mnemo {
namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point start) {
    return std::chrono::duration<double>(SteadyClock::now() - start).count();
}

std::vector<std::string> relations_for(Engine& engine, const std::string& ns, std::string_view question,
                                       const BenchOptions& options) {
    const auto state = engine.namespace_state(ns);
    if (!state || state->graph.edges.empty()) return {};
    std::vector<std::string> lines;
    std::set<std::string> seen;
    auto add = [&](const GraphEdge& edge) {
        if (lines.size() >= options.k || !seen.insert(edge.id).second) return;
        lines.push_back(state->graph.edge_text(edge));
    };
    for (const auto& edge : engine.graph_entity_search(question, ns).edges) add(edge);
    for (const auto& scored : engine.graph_triplet_search(question, ns, options.triplet_threshold)) add(scored.edge);
    return lines;
}

}  // namespace

nlohmann::ordered_json to_json(const IngestionReport& report) {
    nlohmann::ordered_json json;
    json["mode"] = report.mode;
    json["wall_seconds"] = report.wall_seconds;
    auto conversations = nlohmann::ordered_json::array();
    for (const auto& conversation : report.conversations) {
        nlohmann::ordered_json item;
        item["id"] = conversation.id;
        item["pairs"] = conversation.pairs;
        item["memories"] = conversation.memories;
        item["edges"] = conversation.edges;
        item["wall_seconds"] = conversation.wall_seconds;
        conversations.push_back(std::move(item));
    }
    json["conversations"] = std::move(conversations);
    return json;
}

IngestionReport replay_ingest(const ConversationDataset& dataset, Engine& engine, AnswerMode mode) {
    require(mode == AnswerMode::dense || engine.config().graph_enabled, ErrorCode::invalid_input,
            "graph mode needs an engine with the graph enabled");
    IngestionReport report;
    report.mode = std::string(to_string(mode));
    const auto run_start = SteadyClock::now();
    for (const auto& conversation : dataset.conversations) {
        const auto start = SteadyClock::now();
        ConversationIngestion item;
        item.id = conversation.id;
        const auto users = conversation.users();
        for (std::size_t s = 0; s < conversation.sessions.size(); ++s) {
            const auto& session = conversation.sessions[s];
            const bool last = s + 1 == conversation.sessions.size();
            IngestRequest request{conversation.id, users, session.messages, engine.config().session_reset || last};
            if (request.messages.empty()) {
                if (!request.flush) continue;
                if (auto outcome = engine.flush(conversation.id, users)) ++item.pairs;
                continue;
            }
            item.pairs += engine.ingest(request).pairs.size();
        }
        engine.wait_idle();
        for (const auto& [speaker, user] : users) {
            item.memories[user] = engine.get_all(user).size();
            if (const auto state = engine.namespace_state(user)) item.edges += state->graph.valid_edge_count();
        }
        item.wall_seconds = seconds_since(start);
        report.conversations.push_back(std::move(item));
    }
    report.wall_seconds = seconds_since(run_start);
    return report;
}

AnswerOutcome answer_question(Engine& engine, ChatProvider& answerer, const Tokenizer& tokenizer,
                              const DatasetConversation& conversation, std::string_view question,
                              const BenchOptions& options) {
    AnswerOutcome outcome;
    const auto total_start = SteadyClock::now();
    const auto search_start = SteadyClock::now();
    auto& context = outcome.context;
    context.speaker_1 = conversation.speakers[0];
    context.speaker_2 = conversation.speakers[1];
    const auto user_1 = conversation.user_id(conversation.speakers[0]);
    const auto user_2 = conversation.user_id(conversation.speakers[1]);
    for (const auto& hit : engine.search(question, options.k, user_1)) context.speaker_1_memories.push_back(hit.text);
    for (const auto& hit : engine.search(question, options.k, user_2)) context.speaker_2_memories.push_back(hit.text);
    if (options.mode == AnswerMode::graph) {
        context.speaker_1_relations = relations_for(engine, user_1, question, options);
        context.speaker_2_relations = relations_for(engine, user_2, question, options);
    }
    outcome.search_seconds = seconds_since(search_start);

    ChatRequest request;
    request.purpose = "answer";
    request.messages.push_back({Role::user, render_answer_prompt(options.mode, context, question)});
    const auto response = answerer.chat(request);
    outcome.answer = response.text.value_or("");
    const auto first = outcome.answer.find_first_not_of(" \t\r\n");
    outcome.answer = first == std::string::npos
                         ? std::string()
                         : outcome.answer.substr(first, outcome.answer.find_last_not_of(" \t\r\n") - first + 1);
    outcome.total_seconds = seconds_since(total_start);
    outcome.context_tokens = count_tokens(context.combined(), tokenizer);
    return outcome;
}

RunResults run_questions(Engine& engine, ChatProvider& answerer, ChatProvider& judge_provider,
                         const Tokenizer& tokenizer, const ConversationDataset& dataset, const BenchOptions& options) {
    require(options.k >= 1, ErrorCode::invalid_input, "k must be at least 1");
    require(options.repeats >= 1, ErrorCode::invalid_input, "repeats must be at least 1");
    RunResults results;
    results.mode = std::string(to_string(options.mode));
    results.k = options.k;
    results.repeats = options.repeats;
    results.vary = options.vary_answerer ? "answer_and_judge" : "judge";
    results.tokenizer = tokenizer.id();

    struct Job {
        const DatasetConversation* conversation;
        const QuestionAnswer* qa;
    };
    std::vector<Job> jobs;
    for (const auto& conversation : dataset.conversations) {
        for (const auto& qa : conversation.qa) jobs.push_back({&conversation, &qa});
    }
    results.questions.resize(jobs.size());

    auto evaluate = [&](std::size_t index) {
        const auto& job = jobs[index];
        auto& result = results.questions[index];
        result.conversation_id = job.conversation->id;
        result.question = job.qa->question;
        result.gold_answer = job.qa->gold_answer;
        result.category = job.qa->category;
        double f1_sum = 0.0;
        double bleu_sum = 0.0;
        for (std::size_t repeat = 0; repeat < options.repeats; ++repeat) {
            RepeatOutcome outcome;
            if (repeat == 0 || options.vary_answerer) {
                try {
                    const auto answer =
                        answer_question(engine, answerer, tokenizer, *job.conversation, job.qa->question, options);
                    if (repeat == 0) {
                        result.answer = answer.answer;
                        result.search_seconds = answer.search_seconds;
                        result.total_seconds = answer.total_seconds;
                        result.context_tokens = answer.context_tokens;
                        result.memories_retrieved =
                            answer.context.speaker_1_memories.size() + answer.context.speaker_2_memories.size();
                    }
                    outcome.answer = answer.answer;
                } catch (const std::exception& error) {
                    spdlog::warn("question '{}' failed: {}", job.qa->question, error.what());
                    result.failed = true;
                    result.error = error.what();
                    result.repeats.clear();
                    return;
                }
            } else {
                outcome.answer = result.answer;
            }
            f1_sum += score_f1(job.qa->gold_answer, outcome.answer);
            bleu_sum += score_bleu1(job.qa->gold_answer, outcome.answer);
            try {
                outcome.label = judge(judge_provider, job.qa->question, job.qa->gold_answer, outcome.answer).label;
            } catch (const Error& error) {
                outcome.judge_error = error.what();
                spdlog::warn("judge failed for '{}': {}", job.qa->question, error.what());
            }
            result.repeats.push_back(std::move(outcome));
        }
        result.f1 = f1_sum / static_cast<double>(options.repeats);
        result.bleu1 = bleu_sum / static_cast<double>(options.repeats);
    };

    const auto workers = std::max<std::size_t>(1, std::min(options.workers, jobs.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) evaluate(i);
            });
        }
        for (auto& thread : pool) thread.join();
    }
    return results;
}

nlohmann::ordered_json to_json(const RunResults& results) {
    nlohmann::ordered_json json;
    json["mode"] = results.mode;
    json["k"] = results.k;
    json["repeats"] = results.repeats;
    json["vary"] = results.vary;
    json["tokenizer"] = results.tokenizer;
    auto questions = nlohmann::ordered_json::array();
    for (const auto& q : results.questions) {
        nlohmann::ordered_json item;
        item["conversation_id"] = q.conversation_id;
        item["question"] = q.question;
        item["gold_answer"] = q.gold_answer;
        item["category"] = to_string(q.category);
        item["answer"] = q.answer;
        item["failed"] = q.failed;
        item["error"] = q.error;
        item["search_seconds"] = q.search_seconds;
        item["total_seconds"] = q.total_seconds;
        item["context_tokens"] = q.context_tokens;
        item["memories_retrieved"] = q.memories_retrieved;
        item["f1"] = q.f1;
        item["bleu1"] = q.bleu1;
        auto repeats = nlohmann::ordered_json::array();
        for (const auto& r : q.repeats) {
            nlohmann::ordered_json entry;
            entry["answer"] = r.answer;
            entry["label"] = r.label ? nlohmann::ordered_json(to_string(*r.label)) : nlohmann::ordered_json(nullptr);
            entry["judge_error"] = r.judge_error;
            repeats.push_back(std::move(entry));
        }
        item["repeats"] = std::move(repeats);
        questions.push_back(std::move(item));
    }
    json["questions"] = std::move(questions);
    return json;
}

RunResults run_results_from_json(const nlohmann::json& json) {
    RunResults results;
    try {
        results.mode = json.at("mode").get<std::string>();
        results.k = json.at("k").get<std::size_t>();
        results.repeats = json.at("repeats").get<std::size_t>();
        results.vary = json.at("vary").get<std::string>();
        results.tokenizer = json.at("tokenizer").get<std::string>();
        for (const auto& item : json.at("questions")) {
            QuestionResult q;
            q.conversation_id = item.at("conversation_id").get<std::string>();
            q.question = item.at("question").get<std::string>();
            q.gold_answer = item.at("gold_answer").get<std::string>();
            const auto category = parse_question_category(item.at("category").get<std::string>());
            require(category.has_value(), ErrorCode::invalid_input, "results contain an unknown category");
            q.category = *category;
            q.answer = item.at("answer").get<std::string>();
            q.failed = item.at("failed").get<bool>();
            q.error = item.at("error").get<std::string>();
            q.search_seconds = item.at("search_seconds").get<double>();
            q.total_seconds = item.at("total_seconds").get<double>();
            q.context_tokens = item.at("context_tokens").get<std::size_t>();
            q.memories_retrieved = item.at("memories_retrieved").get<std::size_t>();
            q.f1 = item.at("f1").get<double>();
            q.bleu1 = item.at("bleu1").get<double>();
            for (const auto& entry : item.at("repeats")) {
                RepeatOutcome r;
                r.answer = entry.at("answer").get<std::string>();
                if (!entry.at("label").is_null()) {
                    r.label = entry.at("label").get<std::string>() == "CORRECT" ? JudgeLabel::correct : JudgeLabel::wrong;
                }
                r.judge_error = entry.at("judge_error").get<std::string>();
                q.repeats.push_back(std::move(r));
            }
            results.questions.push_back(std::move(q));
        }
    } catch (const nlohmann::json::exception& error) {
        fail(ErrorCode::invalid_input, fmt::format("malformed run results: {}", error.what()));
    }
    return results;
}

}  // namespace mnemo
