// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/pipeline/types.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mnemo {

enum class QuestionCategory { single_hop, multi_hop, temporal, open_domain };

inline constexpr std::array<QuestionCategory, 4> kQuestionCategories{
    QuestionCategory::single_hop, QuestionCategory::multi_hop, QuestionCategory::temporal,
    QuestionCategory::open_domain};

std::string_view to_string(QuestionCategory category) noexcept;
std::optional<QuestionCategory> parse_question_category(std::string_view name) noexcept;

struct QuestionAnswer {
    std::string question;
    std::string gold_answer;
    QuestionCategory category = QuestionCategory::single_hop;
};

struct Session {
    std::vector<Message> messages;
};

struct DatasetConversation {
    std::string id;
    std::array<std::string, 2> speakers;
    std::vector<Session> sessions;
    std::vector<QuestionAnswer> qa;
    /// Adversarial questions present in the file and left out of evaluation.
    std::size_t skipped_questions = 0;

    std::string user_id(const std::string& speaker) const { return id + ":" + speaker; }
    std::map<std::string, std::string> users() const;
};

struct ConversationDataset {
    std::vector<DatasetConversation> conversations;
    std::size_t question_count() const;
};

/// Parses a dataset document. Syntax errors report "line L, column C";
/// schema errors report the JSON path ("$.conversations[0].qa[2].category").
/// Throws Error(invalid_input).
ConversationDataset parse_dataset(std::string_view text);
ConversationDataset load_dataset(const std::filesystem::path& path);

/// Earliest message time in the dataset; epoch when it has no messages.
Instant dataset_start(const ConversationDataset& dataset);

}  // namespace mnemo
