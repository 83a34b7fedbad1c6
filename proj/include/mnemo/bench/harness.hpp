// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/bench/dataset.hpp"
#include "mnemo/bench/judge.hpp"
#include "mnemo/bench/tokenizer.hpp"
#include "mnemo/engine/engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mnemo {

struct ConversationIngestion {
    std::string id;
    std::size_t pairs = 0;
    std::map<std::string, std::size_t> memories;  // user id -> count
    std::size_t edges = 0;
    double wall_seconds = 0.0;
};

struct IngestionReport {
    std::string mode;
    std::vector<ConversationIngestion> conversations;
    double wall_seconds = 0.0;
};

nlohmann::ordered_json to_json(const IngestionReport& report);

/// Ingests every session pairwise in order. The buffered odd message of a
/// session is flushed at the session end when the engine resets the
/// recency window per session, and always at the end of a conversation.
/// Graph mode requires an engine with the graph enabled.
IngestionReport replay_ingest(const ConversationDataset& dataset, Engine& engine, AnswerMode mode);

struct BenchOptions {
    AnswerMode mode = AnswerMode::dense;
    std::size_t k = 10;
    std::size_t repeats = 1;
    /// Regenerate the answer on every repeat instead of only re-judging it.
    bool vary_answerer = false;
    /// Semantic-triplet threshold for graph-mode relations.
    double triplet_threshold = 0.3;
    std::size_t workers = 1;
};

struct RepeatOutcome {
    std::string answer;
    /// Empty when the judge output could not be parsed.
    std::optional<JudgeLabel> label;
    std::string judge_error;
};

struct QuestionResult {
    std::string conversation_id;
    std::string question;
    std::string gold_answer;
    QuestionCategory category = QuestionCategory::single_hop;
    std::string answer;
    bool failed = false;
    std::string error;
    double search_seconds = 0.0;
    double total_seconds = 0.0;
    std::size_t context_tokens = 0;
    std::size_t memories_retrieved = 0;
    double f1 = 0.0;
    double bleu1 = 0.0;
    std::vector<RepeatOutcome> repeats;
};

struct RunResults {
    std::string mode;
    std::size_t k = 0;
    std::size_t repeats = 0;
    std::string vary;
    std::string tokenizer;
    std::vector<QuestionResult> questions;
};

nlohmann::ordered_json to_json(const RunResults& results);
RunResults run_results_from_json(const nlohmann::json& json);

struct AnswerOutcome {
    std::string answer;
    AnswerContext context;
    double search_seconds = 0.0;
    double total_seconds = 0.0;
    std::size_t context_tokens = 0;
};

/// Searches both speakers' namespaces (k hits each; graph mode adds their
/// relations), renders the answer template and asks `answerer`.
AnswerOutcome answer_question(Engine& engine, ChatProvider& answerer, const Tokenizer& tokenizer,
                              const DatasetConversation& conversation, std::string_view question,
                              const BenchOptions& options);

/// Answers and judges every question. A failed answer marks the question
/// failed and the run continues.
RunResults run_questions(Engine& engine, ChatProvider& answerer, ChatProvider& judge_provider,
                         const Tokenizer& tokenizer, const ConversationDataset& dataset, const BenchOptions& options);

}  // namespace mnemo
