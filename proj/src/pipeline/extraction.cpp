// SPDX-License-Identifier: Apache-2.0
#include "mnemo/pipeline/extraction.hpp"

#include "mnemo/core/error.hpp"
#include "mnemo/core/json_text.hpp"

#include <unordered_set>

namespace mnemo {
namespace {

std::string render_lines(const std::vector<Message>& messages) {
    if (messages.empty()) return "(none)";
    std::string out;
    for (const auto& message : messages) {
        if (!out.empty()) out += '\n';
        out += render_message(message);
    }
    return out;
}

std::vector<std::string> facts_from_json(const nlohmann::json& json) {
    const nlohmann::json* list = &json;
    if (json.is_object()) {
        auto it = json.find("facts");
        if (it == json.end()) fail(ErrorCode::extraction_parse, "extraction output lacks a 'facts' list");
        list = &*it;
    }
    if (!list->is_array()) fail(ErrorCode::extraction_parse, "extraction output is not a list of facts");
    std::vector<std::string> facts;
    for (const auto& item : *list) {
        if (!item.is_string()) fail(ErrorCode::extraction_parse, "extraction output contains a non-string fact");
        facts.push_back(item.get<std::string>());
    }
    return facts;
}

std::string trimmed(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

}  // namespace

ExtractionPrompt build_extraction_prompt(const ConversationState& state, const Message& previous,
                                         const Message& current, const ExtractionWindow& window,
                                         const PromptTemplates& templates, std::string_view ns) {
    ExtractionPrompt prompt;
    prompt.summary = state.summary;
    const std::optional<int> session = window.session_scoped ? std::optional<int>(current.session) : std::nullopt;
    prompt.recent = state.recent(window.recent_messages, session);
    // A buffered or overlapping first message is part of the pair, not the context.
    if (!prompt.recent.empty() && prompt.recent.back() == previous) prompt.recent.pop_back();
    prompt.previous = previous;
    prompt.current = current;

    const auto summary = prompt.summary.empty() ? std::string(kEmptySummary) : prompt.summary;
    const auto recent = render_lines(prompt.recent);
    const auto pair = render_message(previous) + "\n" + render_message(current);
    prompt.rendered = render_template(templates.extraction,
                                      {{"namespace", ns}, {"summary", summary}, {"recent", recent}, {"pair", pair}});
    return prompt;
}

ChatRequest fact_extraction_request(const ExtractionPrompt& prompt) {
    ChatRequest request;
    request.purpose = "extract_facts";
    request.messages.push_back({Role::user, prompt.rendered});
    return request;
}

std::vector<std::string> parse_fact_list(const ChatResponse& response) {
    std::vector<std::string> raw;
    if (!response.tool_calls.empty()) {
        raw = facts_from_json(response.tool_calls.front().arguments);
    } else {
        const auto parsed = parse_json_payload(response.text.value_or(""));
        if (!parsed) fail(ErrorCode::extraction_parse, "extraction output is not JSON");
        raw = facts_from_json(*parsed);
    }
    std::vector<std::string> facts;
    std::unordered_set<std::string> seen;
    for (auto& fact : raw) {
        auto text = trimmed(fact);
        if (text.empty() || !seen.insert(text).second) continue;
        facts.push_back(std::move(text));
    }
    return facts;
}

std::vector<CandidateFact> extract_facts(ChatProvider& provider, const ExtractionPrompt& prompt,
                                         const std::pair<std::string, std::string>& source_pair,
                                         Instant extracted_at) {
    const auto response = provider.chat(fact_extraction_request(prompt));
    std::vector<CandidateFact> facts;
    for (auto& text : parse_fact_list(response)) {
        facts.push_back(CandidateFact{std::move(text), source_pair, extracted_at});
    }
    return facts;
}

ChatRequest summary_request(const ConversationState& state, const PromptTemplates& templates) {
    std::string conversation;
    for (const auto& message : state.messages) {
        if (!conversation.empty()) conversation += '\n';
        conversation += render_message(message);
    }
    const auto previous = state.summary.empty() ? std::string(kEmptySummary) : state.summary;
    ChatRequest request;
    request.purpose = "summarize";
    request.messages.push_back(
        {Role::user, render_template(templates.summary, {{"summary", previous}, {"conversation", conversation}})});
    return request;
}

}  // namespace mnemo
