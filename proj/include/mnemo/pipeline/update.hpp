// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/core/ids.hpp"
#include "mnemo/core/time.hpp"
#include "mnemo/pipeline/memory_space.hpp"
#include "mnemo/pipeline/prompts.hpp"
#include "mnemo/provider/chat.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mnemo {

/// An existing memory shown to the model next to a candidate fact.
struct UpdateCandidate {
    std::string id;
    double score = 0.0;
    std::string text;
};

/// ADD{text}, UPDATE{id,text}, DELETE{id}, NOOP{}.
const std::vector<ToolSpec>& memory_operation_tools();

ChatRequest update_request(const CandidateFact& fact, std::span<const UpdateCandidate> candidates,
                           const PromptTemplates& templates, std::string_view ns);

struct ValidatedDecision {
    ToolDecision decision;
    /// Why the provider's choice was downgraded to NOOP, if it was.
    std::optional<std::string> rejection;
};

/// Turns the provider's tool call into a decision. A missing tool call, a
/// blank text, or a target outside `candidates` yields NOOP with a rejection.
ValidatedDecision validate_decision(const ChatResponse& response, std::span<const UpdateCandidate> candidates);

/// Prefixes "(<timestamp>) " unless the text already starts with a
/// parenthesized date.
std::string stamp_fact(std::string_view text, std::string_view timestamp);

/// Executes the update phase for one namespace. Every mutation is recorded
/// as an event in `events` and applied to `space` through apply_memory_event.
class MemoryWriter {
public:
    struct Context {
        ChatProvider& provider;
        Embedder& embedder;
        Clock& clock;
        const PromptTemplates& templates;
        std::function<std::string()> next_id;
        std::size_t similar_memories = 10;
    };

    MemoryWriter(Context context, MemorySpace& space, EventBatch& events)
        : context_(std::move(context)), space_(space), events_(events) {}

    /// Top-s memories most similar to `text`.
    std::vector<UpdateCandidate> similar(std::string_view text) const;

    /// Retrieves similar memories, asks the provider for one of the four
    /// operations and executes it. `stamp` (a message timestamp) is prefixed
    /// to stored text when non-empty.
    AuditEntry classify_and_execute(const CandidateFact& fact, std::string_view stamp = {});

    std::string add(const std::string& text);
    void update(const std::string& id, const std::string& text);
    void remove(const std::string& id, DeleteOrigin origin);

private:
    void record(EventRecord event);

    Context context_;
    MemorySpace& space_;
    EventBatch& events_;
};

}  // namespace mnemo
