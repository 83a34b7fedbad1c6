// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/pipeline/conversation.hpp"
#include "mnemo/pipeline/prompts.hpp"
#include "mnemo/pipeline/types.hpp"
#include "mnemo/provider/chat.hpp"

#include <string>
#include <vector>

namespace mnemo {

/// Extraction input: running summary, recent context, and the new pair,
/// rendered into one prompt in that order.
struct ExtractionPrompt {
    std::string summary;
    std::vector<Message> recent;
    Message previous;
    Message current;
    std::string rendered;
};

struct ExtractionWindow {
    std::size_t recent_messages = 10;
    /// Restrict the window to the current pair's session.
    bool session_scoped = false;
};

ExtractionPrompt build_extraction_prompt(const ConversationState& state, const Message& previous,
                                         const Message& current, const ExtractionWindow& window,
                                         const PromptTemplates& templates, std::string_view ns);

ChatRequest fact_extraction_request(const ExtractionPrompt& prompt);

/// Accepts {"facts": [...]}, a bare JSON array of strings, or a tool call
/// carrying {"facts": [...]}. Blank entries are dropped and exact duplicates
/// removed, keeping first occurrences. Throws Error(extraction_parse).
std::vector<std::string> parse_fact_list(const ChatResponse& response);

std::vector<CandidateFact> extract_facts(ChatProvider& provider, const ExtractionPrompt& prompt,
                                         const std::pair<std::string, std::string>& source_pair,
                                         Instant extracted_at);

/// Request that regenerates a conversation summary from its full history.
ChatRequest summary_request(const ConversationState& state, const PromptTemplates& templates);

}  // namespace mnemo
