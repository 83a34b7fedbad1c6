// SPDX-License-Identifier: Apache-2.0
#include "mnemo/bench/judge.hpp"

#include "mnemo/core/error.hpp"
#include "mnemo/core/json_text.hpp"
#include "mnemo/pipeline/prompts.hpp"

#include <fmt/format.h>

#include <cctype>

namespace mnemo {
namespace {

std::optional<JudgeLabel> label_from(const nlohmann::json& json) {
    if (!json.is_object()) return std::nullopt;
    auto it = json.find("label");
    if (it == json.end() || !it->is_string()) return std::nullopt;
    auto value = it->get<std::string>();
    for (auto& c : value) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto first = value.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return std::nullopt;
    value = value.substr(first, value.find_last_not_of(" \t\r\n") - first + 1);
    if (value == "CORRECT") return JudgeLabel::correct;
    if (value == "WRONG") return JudgeLabel::wrong;
    return std::nullopt;
}

}  // namespace

std::string_view to_string(JudgeLabel label) noexcept {
    return label == JudgeLabel::correct ? "CORRECT" : "WRONG";
}

std::string render_judge_prompt(std::string_view question, std::string_view gold, std::string_view generated) {
    return render_template(embedded_asset("judge"),
                           {{"question", question}, {"gold_answer", gold}, {"generated_answer", generated}});
}

JudgeVerdict parse_judge_verdict(const ChatResponse& response) {
    JudgeVerdict verdict;
    verdict.rationale = response.text.value_or("");
    for (const auto& call : response.tool_calls) {
        if (auto label = label_from(call.arguments)) {
            verdict.label = *label;
            return verdict;
        }
    }
    if (auto parsed = parse_json_payload(verdict.rationale)) {
        if (auto label = label_from(*parsed)) {
            verdict.label = *label;
            return verdict;
        }
    }
    fail(ErrorCode::judge_parse, fmt::format("judge output carries no {{\"label\": CORRECT|WRONG}} object: {}",
                                             verdict.rationale.substr(0, 200)));
}

JudgeVerdict judge(ChatProvider& provider, std::string_view question, std::string_view gold,
                   std::string_view generated) {
    ChatRequest request;
    request.purpose = "judge";
    request.messages.push_back({Role::user, render_judge_prompt(question, gold, generated)});
    return parse_judge_verdict(provider.chat(request));
}

std::string_view to_string(AnswerMode mode) noexcept {
    return mode == AnswerMode::dense ? "dense" : "graph";
}

std::optional<AnswerMode> parse_answer_mode(std::string_view name) noexcept {
    if (name == "dense") return AnswerMode::dense;
    if (name == "graph") return AnswerMode::graph;
    return std::nullopt;
}

std::string render_context_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& line : lines) {
        if (!out.empty()) out += '\n';
        out += line;
    }
    return out;
}

std::string AnswerContext::combined() const {
    std::vector<std::string> lines;
    for (const auto* group : {&speaker_1_memories, &speaker_2_memories, &speaker_1_relations, &speaker_2_relations}) {
        lines.insert(lines.end(), group->begin(), group->end());
    }
    return render_context_lines(lines);
}

std::string answer_template(AnswerMode mode) {
    return embedded_asset("answer_header") +
           embedded_asset(mode == AnswerMode::dense ? "answer_dense_body" : "answer_graph_body");
}

std::string render_answer_prompt(AnswerMode mode, const AnswerContext& context, std::string_view question) {
    const auto memories_1 = render_context_lines(context.speaker_1_memories);
    const auto memories_2 = render_context_lines(context.speaker_2_memories);
    const auto relations_1 = render_context_lines(context.speaker_1_relations);
    const auto relations_2 = render_context_lines(context.speaker_2_relations);
    return render_template(answer_template(mode), {{"speaker_1_user_id", context.speaker_1},
                                                   {"speaker_1_memories", memories_1},
                                                   {"speaker_2_user_id", context.speaker_2},
                                                   {"speaker_2_memories", memories_2},
                                                   {"speaker_1_graph_memories", relations_1},
                                                   {"speaker_2_graph_memories", relations_2},
                                                   {"question", question}});
}

}  // namespace mnemo
