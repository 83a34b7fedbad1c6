// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/dataset.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace mnemo {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    fail(ErrorCode::invalid_input, fmt::format("dataset {}: {}", path, what));
}

const json& field(const json& object, const std::string& path, const char* name) {
    auto it = object.find(name);
    if (it == object.end()) schema_error(path, fmt::format("missing field '{}'", name));
    return *it;
}

std::string string_at(const json& value, const std::string& path) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number()) return value.dump();
    schema_error(path, "expected a string");
}

const json& array_at(const json& object, const std::string& path, const char* name) {
    const auto& value = field(object, path, name);
    if (!value.is_array()) schema_error(path + "." + name, "expected an array");
    return value;
}

/// Numeric codes follow the LOCOMO convention; 5 is adversarial.
std::optional<QuestionCategory> category_at(const json& value, const std::string& path, bool& adversarial) {
    adversarial = false;
    if (value.is_number_integer()) {
        switch (value.get<int>()) {
            case 1: return QuestionCategory::multi_hop;
            case 2: return QuestionCategory::temporal;
            case 3: return QuestionCategory::open_domain;
            case 4: return QuestionCategory::single_hop;
            case 5: adversarial = true; return std::nullopt;
            default: break;
        }
        schema_error(path, fmt::format("unknown category {}", value.dump()));
    }
    const auto name = string_at(value, path);
    if (name == "adversarial") {
        adversarial = true;
        return std::nullopt;
    }
    auto category = parse_question_category(name);
    if (!category) {
        schema_error(path, fmt::format("unknown category '{}' (expected single_hop, multi_hop, temporal, open_domain "
                                       "or adversarial)",
                                       name));
    }
    return category;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

std::string_view to_string(QuestionCategory category) noexcept {
    switch (category) {
        case QuestionCategory::single_hop: return "single_hop";
        case QuestionCategory::multi_hop: return "multi_hop";
        case QuestionCategory::temporal: return "temporal";
        case QuestionCategory::open_domain: return "open_domain";
    }
    return "single_hop";
}

std::optional<QuestionCategory> parse_question_category(std::string_view name) noexcept {
    for (auto category : kQuestionCategories) {
        if (to_string(category) == name) return category;
    }
    return std::nullopt;
}

std::map<std::string, std::string> DatasetConversation::users() const {
    return {{speakers[0], user_id(speakers[0])}, {speakers[1], user_id(speakers[1])}};
}

std::size_t ConversationDataset::question_count() const {
    std::size_t count = 0;
    for (const auto& conversation : conversations) count += conversation.qa.size();
    return count;
}

ConversationDataset parse_dataset(std::string_view text) {
    json document;
    try {
        document = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& error) {
        const auto [line, column] = line_column(text, error.byte == 0 ? 0 : error.byte - 1);
        fail(ErrorCode::invalid_input, fmt::format("dataset syntax error at line {}, column {}: {}", line, column,
                                                   error.what()));
    }
    if (!document.is_object()) schema_error("$", "expected an object");

    ConversationDataset dataset;
    const auto& conversations = array_at(document, "$", "conversations");
    for (std::size_t c = 0; c < conversations.size(); ++c) {
        const auto path = fmt::format("$.conversations[{}]", c);
        const auto& item = conversations[c];
        if (!item.is_object()) schema_error(path, "expected an object");
        DatasetConversation conversation;
        conversation.id = string_at(field(item, path, "id"), path + ".id");
        if (conversation.id.empty()) schema_error(path + ".id", "must not be empty");

        const auto& speakers = array_at(item, path, "speakers");
        if (speakers.size() != 2) schema_error(path + ".speakers", "expected exactly two speakers");
        for (std::size_t s = 0; s < 2; ++s) {
            conversation.speakers[s] = string_at(speakers[s], fmt::format("{}.speakers[{}]", path, s));
        }
        if (conversation.speakers[0] == conversation.speakers[1]) schema_error(path + ".speakers", "speakers must differ");

        const auto& sessions = array_at(item, path, "sessions");
        for (std::size_t s = 0; s < sessions.size(); ++s) {
            const auto session_path = fmt::format("{}.sessions[{}]", path, s);
            const auto& session_item = sessions[s];
            const json* messages = &session_item;
            std::optional<std::string> session_time;
            if (session_item.is_object()) {
                messages = &array_at(session_item, session_path, "messages");
                if (auto it = session_item.find("timestamp"); it != session_item.end()) {
                    session_time = string_at(*it, session_path + ".timestamp");
                }
            } else if (!session_item.is_array()) {
                schema_error(session_path, "expected an object with 'messages' or an array of messages");
            }
            Session session;
            for (std::size_t m = 0; m < messages->size(); ++m) {
                const auto message_path = fmt::format("{}.messages[{}]", session_path, m);
                const auto& message = (*messages)[m];
                if (!message.is_object()) schema_error(message_path, "expected an object");
                auto speaker = string_at(field(message, message_path, "speaker"), message_path + ".speaker");
                if (speaker != conversation.speakers[0] && speaker != conversation.speakers[1]) {
                    schema_error(message_path + ".speaker", fmt::format("'{}' is not one of the speakers", speaker));
                }
                auto text_value = string_at(field(message, message_path, "text"), message_path + ".text");
                std::string timestamp;
                if (auto it = message.find("timestamp"); it != message.end()) {
                    timestamp = string_at(*it, message_path + ".timestamp");
                } else if (session_time) {
                    timestamp = *session_time;
                } else {
                    schema_error(message_path, "missing field 'timestamp'");
                }
                try {
                    session.messages.push_back(
                        Message::make(std::move(speaker), std::move(text_value), timestamp, static_cast<int>(s)));
                } catch (const Error& error) {
                    schema_error(message_path, error.what());
                }
            }
            conversation.sessions.push_back(std::move(session));
        }

        if (auto qa = item.find("qa"); qa != item.end()) {
            if (!qa->is_array()) schema_error(path + ".qa", "expected an array");
            for (std::size_t q = 0; q < qa->size(); ++q) {
                const auto qa_path = fmt::format("{}.qa[{}]", path, q);
                const auto& entry = (*qa)[q];
                if (!entry.is_object()) schema_error(qa_path, "expected an object");
                bool adversarial = false;
                const auto category = category_at(field(entry, qa_path, "category"), qa_path + ".category", adversarial);
                if (adversarial) {
                    ++conversation.skipped_questions;
                    continue;
                }
                QuestionAnswer answer;
                answer.question = string_at(field(entry, qa_path, "question"), qa_path + ".question");
                const auto gold = entry.contains("gold_answer") ? entry.at("gold_answer") : field(entry, qa_path, "answer");
                answer.gold_answer = string_at(gold, qa_path + ".answer");
                answer.category = *category;
                conversation.qa.push_back(std::move(answer));
            }
        }
        dataset.conversations.push_back(std::move(conversation));
    }
    return dataset;
}

ConversationDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::invalid_input, fmt::format("cannot read dataset {}", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_dataset(text.str());
    } catch (const Error& error) {
        fail(error.code(), fmt::format("{}: {}", path.string(), error.what()));
    }
}

Instant dataset_start(const ConversationDataset& dataset) {
    std::optional<Instant> start;
    for (const auto& conversation : dataset.conversations) {
        for (const auto& session : conversation.sessions) {
            for (const auto& message : session.messages) {
                if (!start || message.at < *start) start = message.at;
            }
        }
    }
    return start.value_or(Instant{});
}

}  // namespace mnemo
