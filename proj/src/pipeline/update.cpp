// SPDX-License-Identifier: Apache-2.0
#include "mnemo/pipeline/update.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cctype>

namespace mnemo {
namespace {

nlohmann::json object_schema(std::initializer_list<const char*> required) {
    nlohmann::json properties = nlohmann::json::object();
    for (const char* name : required) properties[name] = {{"type", "string"}};
    return {{"type", "object"}, {"properties", properties}, {"required", nlohmann::json(std::vector<std::string>(required.begin(), required.end()))}};
}

bool blank(const std::string& text) {
    return text.find_first_not_of(" \t\r\n") == std::string::npos;
}

bool presented(std::span<const UpdateCandidate> candidates, const std::string& id) {
    for (const auto& candidate : candidates) {
        if (candidate.id == id) return true;
    }
    return false;
}

}  // namespace

const std::vector<ToolSpec>& memory_operation_tools() {
    static const std::vector<ToolSpec> tools{
        {"ADD", "Store the candidate fact as a new memory.", object_schema({"text"})},
        {"UPDATE", "Replace an existing memory with richer text that merges in the candidate fact.",
         object_schema({"id", "text"})},
        {"DELETE", "Remove an existing memory that the candidate fact contradicts.", object_schema({"id"})},
        {"NOOP", "Leave memory unchanged.", {{"type", "object"}, {"properties", nlohmann::json::object()}}},
    };
    return tools;
}

ChatRequest update_request(const CandidateFact& fact, std::span<const UpdateCandidate> candidates,
                           const PromptTemplates& templates, std::string_view ns) {
    std::string listing;
    for (const auto& candidate : candidates) {
        if (!listing.empty()) listing += '\n';
        listing += fmt::format(R"({{"id": {}, "similarity": {:.4f}, "text": {}}})", nlohmann::json(candidate.id).dump(),
                               candidate.score, nlohmann::json(candidate.text).dump());
    }
    if (listing.empty()) listing = "(none)";

    ChatRequest request;
    request.purpose = "update_memory";
    request.messages.push_back(
        {Role::user, render_template(templates.update, {{"namespace", ns}, {"fact", fact.text}, {"candidates", listing}})});
    request.tools = memory_operation_tools();
    return request;
}

ValidatedDecision validate_decision(const ChatResponse& response, std::span<const UpdateCandidate> candidates) {
    ValidatedDecision result;
    if (response.tool_calls.empty()) {
        result.rejection = "provider returned no tool call";
        return result;
    }
    if (response.tool_calls.size() > 1) {
        spdlog::warn("update provider returned {} tool calls; executing the first", response.tool_calls.size());
    }
    const auto& call = response.tool_calls.front();
    const auto op = parse_memory_op(call.name);
    if (!op) {
        result.rejection = fmt::format("unknown operation '{}'", call.name);
        return result;
    }
    ToolDecision decision;
    decision.op = *op;
    if (*op == MemoryOp::add || *op == MemoryOp::update) {
        decision.new_text = call.arguments.value("text", std::string());
        if (blank(*decision.new_text)) {
            result.rejection = fmt::format("{} without text", call.name);
            return result;
        }
    }
    if (*op == MemoryOp::update || *op == MemoryOp::remove) {
        decision.target_id = call.arguments.value("id", std::string());
        if (!presented(candidates, *decision.target_id)) {
            result.rejection = fmt::format("{} targets '{}', which was not among the presented memories", call.name,
                                           *decision.target_id);
            return result;
        }
    }
    result.decision = std::move(decision);
    return result;
}

std::string stamp_fact(std::string_view text, std::string_view timestamp) {
    if (timestamp.empty()) return std::string(text);
    if (text.size() > 1 && text[0] == '(' && std::isdigit(static_cast<unsigned char>(text[1]))) return std::string(text);
    return fmt::format("({}) {}", timestamp, text);
}

std::vector<UpdateCandidate> MemoryWriter::similar(std::string_view text) const {
    if (space_.records.empty() || context_.similar_memories == 0) return {};
    const auto query = context_.embedder.embed_one(text);
    std::vector<UpdateCandidate> out;
    for (auto& hit : space_.index.top_k(query, context_.similar_memories, space_.ns)) {
        const auto* record = space_.find(hit.payload);
        if (record != nullptr) out.push_back({record->id, hit.score, record->text});
    }
    return out;
}

AuditEntry MemoryWriter::classify_and_execute(const CandidateFact& fact, std::string_view stamp) {
    const auto candidates = similar(fact.text);
    const auto response = context_.provider.chat(update_request(fact, candidates, context_.templates, space_.ns));
    auto validated = validate_decision(response, candidates);

    AuditEntry audit{fact, validated.decision, space_.ns, std::nullopt, validated.rejection};
    if (validated.rejection) {
        spdlog::warn("memory decision for '{}' treated as NOOP: {}", fact.text, *validated.rejection);
        return audit;
    }
    auto& decision = audit.decision;
    switch (decision.op) {
        case MemoryOp::add:
            decision.new_text = stamp_fact(*decision.new_text, stamp);
            audit.memory_id = add(*decision.new_text);
            break;
        case MemoryOp::update:
            decision.new_text = stamp_fact(*decision.new_text, stamp);
            update(*decision.target_id, *decision.new_text);
            audit.memory_id = decision.target_id;
            break;
        case MemoryOp::remove:
            remove(*decision.target_id, DeleteOrigin::pipeline);
            audit.memory_id = decision.target_id;
            break;
        case MemoryOp::noop:
            break;
    }
    return audit;
}

void MemoryWriter::record(EventRecord event) {
    apply_memory_event(space_, event);
    events_.push_back(std::move(event));
}

std::string MemoryWriter::add(const std::string& text) {
    auto id = context_.next_id();
    record(memory_add_event(id, text, context_.embedder.embed_one(text), context_.clock.now()));
    return id;
}

void MemoryWriter::update(const std::string& id, const std::string& text) {
    const auto* existing = space_.find(id);
    require(existing != nullptr, ErrorCode::not_found, fmt::format("memory {} not found", id));
    record(memory_update_event(id, text, existing->text, context_.embedder.embed_one(text), context_.clock.now()));
}

void MemoryWriter::remove(const std::string& id, DeleteOrigin origin) {
    const auto* existing = space_.find(id);
    require(existing != nullptr, ErrorCode::not_found, fmt::format("memory {} not found", id));
    record(memory_delete_event(id, existing->text, origin, context_.clock.now()));
}

}  // namespace mnemo
