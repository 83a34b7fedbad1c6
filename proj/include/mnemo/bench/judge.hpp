// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/provider/chat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mnemo {

enum class JudgeLabel { correct, wrong };

std::string_view to_string(JudgeLabel label) noexcept;

struct JudgeVerdict {
    JudgeLabel label = JudgeLabel::wrong;
    std::string rationale;
};

std::string render_judge_prompt(std::string_view question, std::string_view gold, std::string_view generated);

/// Reads {"label": "CORRECT"|"WRONG"} from the response (text or tool
/// arguments). Anything else throws Error(judge_parse).
JudgeVerdict parse_judge_verdict(const ChatResponse& response);

JudgeVerdict judge(ChatProvider& provider, std::string_view question, std::string_view gold,
                   std::string_view generated);

enum class AnswerMode { dense, graph };

std::string_view to_string(AnswerMode mode) noexcept;
std::optional<AnswerMode> parse_answer_mode(std::string_view name) noexcept;

/// Retrieved material for one question, per speaker.
struct AnswerContext {
    std::string speaker_1;
    std::string speaker_2;
    std::vector<std::string> speaker_1_memories;
    std::vector<std::string> speaker_2_memories;
    std::vector<std::string> speaker_1_relations;
    std::vector<std::string> speaker_2_relations;

    /// Every retrieved line, memories then relations, one per line. This is
    /// the text whose tokens are reported as context tokens.
    std::string combined() const;
};

/// One line per item.
std::string render_context_lines(const std::vector<std::string>& lines);

/// The answer template (memories per speaker; graph mode adds relations).
std::string answer_template(AnswerMode mode);
std::string render_answer_prompt(AnswerMode mode, const AnswerContext& context, std::string_view question);

}  // namespace mnemo
