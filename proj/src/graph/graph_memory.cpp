// SPDX-License-Identifier: Apache-2.0
#include "mnemo/graph/graph_memory.hpp"

#include "mnemo/core/error.hpp"
#include "mnemo/core/json_text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>

namespace mnemo {
namespace {

std::string trimmed(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

nlohmann::json string_object(std::initializer_list<const char*> fields) {
    nlohmann::json properties = nlohmann::json::object();
    for (const char* field : fields) properties[field] = {{"type", "string"}};
    return {{"type", "object"},
            {"properties", properties},
            {"required", std::vector<std::string>(fields.begin(), fields.end())}};
}

/// Arguments of the first call to `tool`, or the text body parsed as JSON.
nlohmann::json structured_output(const ChatResponse& response, std::string_view tool, std::string_view what) {
    for (const auto& call : response.tool_calls) {
        if (call.name == tool) return call.arguments;
    }
    if (auto parsed = parse_json_payload(response.text.value_or(""))) return *parsed;
    fail(ErrorCode::extraction_parse, fmt::format("{} output is not structured JSON", what));
}

const nlohmann::json& list_field(const nlohmann::json& json, const char* field, std::string_view what) {
    if (json.is_array()) return json;
    if (json.is_object()) {
        auto it = json.find(field);
        if (it != json.end() && it->is_array()) return *it;
    }
    fail(ErrorCode::extraction_parse, fmt::format("{} output lacks a '{}' list", what, field));
}

std::string string_field(const nlohmann::json& item, std::initializer_list<const char*> names) {
    for (const char* name : names) {
        auto it = item.find(name);
        if (it != item.end() && it->is_string()) return trimmed(it->get<std::string>());
    }
    return {};
}

const ExtractedEntity* find_entity(const std::vector<ExtractedEntity>& entities, std::string_view name) {
    const auto folded = fold_case(name);
    for (const auto& entity : entities) {
        if (fold_case(entity.name) == folded) return &entity;
    }
    return nullptr;
}

}  // namespace

const ToolSpec& entity_tool() {
    static const ToolSpec tool{
        "extract_entities",
        "Report the entities mentioned in the text with their semantic types.",
        {{"type", "object"},
         {"properties", {{"entities", {{"type", "array"}, {"items", string_object({"entity", "entity_type"})}}}}},
         {"required", {"entities"}}}};
    return tool;
}

const ToolSpec& relation_tool() {
    static const ToolSpec tool{
        "establish_relations",
        "Report relationships between the listed entities as source, relation, destination triplets.",
        {{"type", "object"},
         {"properties",
          {{"relations", {{"type", "array"}, {"items", string_object({"source", "relation", "destination"})}}}}},
         {"required", {"relations"}}}};
    return tool;
}

const ToolSpec& invalidation_tool() {
    static const ToolSpec tool{
        "invalidate_relations",
        "Mark the listed existing relationships as obsolete.",
        {{"type", "object"},
         {"properties", {{"ids", {{"type", "array"}, {"items", {{"type", "string"}}}}}}},
         {"required", {"ids"}}}};
    return tool;
}

std::vector<ExtractedEntity> extract_entities(ChatProvider& provider, const PromptTemplates& templates,
                                              std::string_view text, std::string_view ns, std::string_view purpose) {
    require(!trimmed(text).empty(), ErrorCode::invalid_input, "entity extraction needs non-empty text");
    ChatRequest request;
    request.purpose = std::string(purpose);
    request.messages.push_back({Role::user, render_template(templates.entities, {{"namespace", ns}, {"text", text}})});
    request.tools = {entity_tool()};
    const auto output = structured_output(provider.chat(request), entity_tool().name, "entity extraction");

    std::vector<ExtractedEntity> entities;
    std::set<std::string> seen;
    for (const auto& item : list_field(output, "entities", "entity extraction")) {
        if (!item.is_object()) fail(ErrorCode::extraction_parse, "entity entry is not an object");
        ExtractedEntity entity{string_field(item, {"entity", "name"}), string_field(item, {"entity_type", "label", "type"})};
        if (entity.name.empty()) continue;
        if (entity.label.empty()) entity.label = "Entity";
        if (!seen.insert(fold_case(entity.name)).second) continue;
        entities.push_back(std::move(entity));
    }
    return entities;
}

std::vector<TripletCandidate> generate_relationships(ChatProvider& provider, const PromptTemplates& templates,
                                                     const std::vector<ExtractedEntity>& entities,
                                                     std::string_view text) {
    if (entities.empty()) return {};
    std::string listing;
    for (const auto& entity : entities) listing += fmt::format("- {} ({})\n", entity.name, entity.label);
    ChatRequest request;
    request.purpose = "establish_relations";
    request.messages.push_back(
        {Role::user, render_template(templates.relations, {{"entities", listing}, {"text", text}})});
    request.tools = {relation_tool()};
    const auto output = structured_output(provider.chat(request), relation_tool().name, "relation extraction");

    std::vector<TripletCandidate> triplets;
    for (const auto& item : list_field(output, "relations", "relation extraction")) {
        if (!item.is_object()) fail(ErrorCode::extraction_parse, "relation entry is not an object");
        TripletCandidate triplet{string_field(item, {"source"}), normalize_relation(string_field(item, {"relation"})),
                                 string_field(item, {"destination"})};
        const auto* source = find_entity(entities, triplet.source);
        const auto* destination = find_entity(entities, triplet.destination);
        if (source == nullptr || destination == nullptr) {
            spdlog::warn("dropping triplet ({}, {}, {}): endpoint is not an extracted entity", triplet.source,
                         triplet.relation, triplet.destination);
            continue;
        }
        if (source == destination) {
            spdlog::warn("dropping self-loop ({}, {}, {})", triplet.source, triplet.relation, triplet.destination);
            continue;
        }
        if (triplet.relation.empty()) {
            spdlog::warn("dropping triplet between {} and {} without a relation", triplet.source, triplet.destination);
            continue;
        }
        triplet.source = source->name;
        triplet.destination = destination->name;
        triplets.push_back(std::move(triplet));
    }
    return triplets;
}

const GraphNode* match_node(const GraphState& graph, std::string_view name, const EmbeddingVector& embedding,
                            double threshold) {
    if (const auto* exact = graph.find_by_name(name)) return exact;
    if (graph.nodes.empty()) return nullptr;
    const auto hits = graph.node_index.top_k(embedding, 1, graph.ns);
    if (hits.empty() || hits.front().score < threshold) return nullptr;
    return graph.find_node(hits.front().payload);
}

std::vector<const GraphEdge*> detect_conflicts(const GraphState& graph, const std::string& source,
                                               const std::string& relation, const std::string& destination,
                                               const EmbeddingVector& relation_embedding, double threshold) {
    std::vector<const GraphEdge*> conflicts;
    for (const auto& id : graph.edge_order) {
        const auto* edge = graph.find_edge(id);
        if (edge->invalid || edge->source != source || edge->destination == destination) continue;
        if (edge->relation == relation || cosine(edge->relation_embedding, relation_embedding) >= threshold) {
            conflicts.push_back(edge);
        }
    }
    return conflicts;
}

std::vector<std::string> resolve_updates(ChatProvider& provider, const PromptTemplates& templates,
                                         const GraphState& graph, const std::string& candidate_text,
                                         const std::vector<const GraphEdge*>& conflicts) {
    if (conflicts.empty()) return {};
    std::string listing;
    std::set<std::string> presented;
    for (const auto* edge : conflicts) {
        listing += fmt::format("{}: {}\n", edge->id, graph.edge_text(*edge));
        presented.insert(edge->id);
    }
    ChatRequest request;
    request.purpose = "resolve_conflicts";
    request.messages.push_back(
        {Role::user, render_template(templates.resolver, {{"candidate", candidate_text}, {"conflicts", listing}})});
    request.tools = {invalidation_tool()};
    const auto response = provider.chat(request);

    std::vector<std::string> ids;
    try {
        const auto output = structured_output(response, invalidation_tool().name, "update resolver");
        for (const auto& id : list_field(output, "ids", "update resolver")) {
            if (!id.is_string()) fail(ErrorCode::extraction_parse, "update resolver returned a non-string id");
            ids.push_back(id.get<std::string>());
        }
    } catch (const Error& error) {
        spdlog::warn("update resolver output rejected: {}", error.what());
        return {};
    }
    std::vector<std::string> unique;
    for (auto& id : ids) {
        if (presented.count(id) == 0) {
            spdlog::warn("update resolver named edge '{}', which was not presented as a conflict; ignoring its answer",
                         id);
            return {};
        }
        if (std::find(unique.begin(), unique.end(), id) == unique.end()) unique.push_back(std::move(id));
    }
    return unique;
}

void GraphWriter::record(EventRecord event) {
    apply_graph_event(graph_, event);
    events_.push_back(std::move(event));
}

std::pair<std::string, bool> GraphWriter::resolve_node(const ExtractedEntity& entity) {
    require(!trimmed(entity.name).empty(), ErrorCode::invalid_input, "entity name is empty");
    const auto embedding = context_.embedder.embed_one(entity.name);
    if (const auto* node = match_node(graph_, entity.name, embedding, context_.settings.node_threshold)) {
        if (!entity.label.empty() && entity.label != node->label) {
            spdlog::info("entity '{}' proposed as {} but node '{}' keeps label {}", entity.name, entity.label,
                         node->name, node->label);
        }
        return {node->id, false};
    }
    GraphNode node;
    node.id = context_.next_id();
    node.name = trimmed(entity.name);
    node.label = entity.label.empty() ? "Entity" : entity.label;
    node.embedding = embedding;
    node.created_at = context_.clock.now();
    node.ns = graph_.ns;
    auto id = node.id;
    record(node_add_event(node));
    return {id, true};
}

UpsertResult GraphWriter::upsert_triplet(const TripletCandidate& candidate,
                                         const std::vector<ExtractedEntity>& entities,
                                         const std::vector<std::string>& provenance) {
    UpsertResult result;
    const auto relation = normalize_relation(candidate.relation);
    if (relation.empty() || fold_case(trimmed(candidate.source)) == fold_case(trimmed(candidate.destination))) {
        result.rejection = "invalid triplet";
        return result;
    }
    auto label_of = [&](const std::string& name) {
        const auto* entity = find_entity(entities, name);
        return entity != nullptr ? entity->label : std::string("Entity");
    };
    const auto [source, source_created] = resolve_node({candidate.source, label_of(candidate.source)});
    const auto [destination, destination_created] =
        resolve_node({candidate.destination, label_of(candidate.destination)});
    result.nodes_created = (source_created ? 1 : 0) + (destination_created ? 1 : 0);
    if (source == destination) {
        spdlog::warn("triplet ({}, {}, {}) resolves to a self-loop; skipped", candidate.source, relation,
                     candidate.destination);
        result.rejection = "self-loop after node resolution";
        return result;
    }

    for (const auto& id : graph_.edge_order) {
        const auto* edge = graph_.find_edge(id);
        if (!edge->invalid && edge->source == source && edge->destination == destination && edge->relation == relation) {
            result.edge = *edge;
            result.suppressed = true;
            return result;
        }
    }

    GraphEdge edge;
    edge.id = context_.next_id();
    edge.source = source;
    edge.relation = relation;
    edge.destination = destination;
    edge.provenance = provenance;
    const auto text = fmt::format("{} {} {}", graph_.find_node(source)->name, relation,
                                  graph_.find_node(destination)->name);
    auto embeddings = context_.embedder.embed({text, relation});
    edge.embedding = embeddings[0];
    edge.relation_embedding = embeddings[1];

    const auto conflicts = detect_conflicts(graph_, source, relation, destination, edge.relation_embedding,
                                            context_.settings.relation_threshold);
    result.invalidated = resolve_updates(context_.provider, context_.templates, graph_, text, conflicts);
    const auto now = context_.clock.now();
    for (const auto& id : result.invalidated) record(edge_invalidate_event(id, now));

    edge.created_at = context_.clock.now();
    record(edge_add_event(edge));
    result.edge = *graph_.find_edge(edge.id);
    result.created = true;
    return result;
}

std::vector<UpsertResult> GraphWriter::ingest(std::string_view text, const std::vector<std::string>& provenance) {
    const auto entities = extract_entities(context_.provider, context_.templates, text, graph_.ns);
    std::vector<UpsertResult> results;
    for (const auto& triplet : generate_relationships(context_.provider, context_.templates, entities, text)) {
        results.push_back(upsert_triplet(triplet, entities, provenance));
    }
    return results;
}

Subgraph retrieve_entity_centric(ChatProvider& provider, Embedder& embedder, const PromptTemplates& templates,
                                 const GraphState& graph, std::string_view query, const GraphSettings& settings) {
    require(!trimmed(query).empty(), ErrorCode::invalid_input, "query is empty");
    Subgraph subgraph;
    if (graph.nodes.empty()) return subgraph;
    const auto entities = extract_entities(provider, templates, query, graph.ns, "query_entities");
    if (entities.empty()) return subgraph;

    std::vector<std::string> names;
    for (const auto& entity : entities) names.push_back(entity.name);
    const auto embeddings = embedder.embed(names);
    std::vector<std::string> included;
    auto include = [&](const std::string& id) {
        if (std::find(included.begin(), included.end(), id) != included.end()) return true;
        if (included.size() >= settings.node_budget) return false;
        included.push_back(id);
        return true;
    };
    std::vector<std::string> anchors;
    for (std::size_t i = 0; i < entities.size(); ++i) {
        const auto* node = match_node(graph, entities[i].name, embeddings[i], settings.node_threshold);
        if (node != nullptr && include(node->id) &&
            std::find(anchors.begin(), anchors.end(), node->id) == anchors.end()) {
            anchors.push_back(node->id);
        }
    }
    std::set<std::string> taken;
    for (const auto& anchor : anchors) {
        for (const auto& id : graph.edge_order) {
            const auto* edge = graph.find_edge(id);
            if (edge->invalid || taken.count(id) != 0) continue;
            if (edge->source != anchor && edge->destination != anchor) continue;
            const auto& other = edge->source == anchor ? edge->destination : edge->source;
            if (!include(other)) continue;
            taken.insert(id);
            subgraph.edges.push_back(*edge);
        }
    }
    for (const auto& id : included) subgraph.nodes.push_back(*graph.find_node(id));
    return subgraph;
}

std::vector<ScoredEdge> retrieve_semantic_triplets(Embedder& embedder, const GraphState& graph,
                                                   std::string_view query, double threshold) {
    require(threshold >= -1.0 && threshold <= 1.0, ErrorCode::invalid_input, "threshold must lie in [-1, 1]");
    require(!trimmed(query).empty(), ErrorCode::invalid_input, "query is empty");
    if (graph.edge_index.size(graph.ns) == 0) return {};
    const auto embedding = embedder.embed_one(query);
    std::vector<ScoredEdge> out;
    for (const auto& hit : graph.edge_index.scan(embedding, graph.ns, threshold)) {
        out.push_back(ScoredEdge{*graph.find_edge(hit.payload), hit.score});
    }
    return out;
}

std::string render_relations(const GraphState& graph, const std::vector<GraphEdge>& edges) {
    std::string out;
    for (const auto& edge : edges) {
        if (!out.empty()) out += '\n';
        out += graph.edge_text(edge);
    }
    return out;
}

}  // namespace mnemo
