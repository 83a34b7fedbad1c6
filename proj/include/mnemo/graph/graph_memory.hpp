// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/graph/graph.hpp"
#include "mnemo/pipeline/prompts.hpp"
#include "mnemo/provider/chat.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mnemo {

struct ExtractedEntity {
    std::string name;
    std::string label;
};

struct TripletCandidate {
    std::string source;
    std::string relation;
    std::string destination;
};

struct GraphSettings {
    double node_threshold = 0.9;
    double relation_threshold = 0.9;
    std::size_t node_budget = 50;
};

const ToolSpec& entity_tool();
const ToolSpec& relation_tool();
const ToolSpec& invalidation_tool();

/// Entities named in `text`, case-insensitively deduplicated (first label wins).
/// `purpose` distinguishes ingestion ("extract_entities") from query parsing
/// ("query_entities"). Throws Error(extraction_parse).
std::vector<ExtractedEntity> extract_entities(ChatProvider& provider, const PromptTemplates& templates,
                                              std::string_view text, std::string_view ns,
                                              std::string_view purpose = "extract_entities");

/// Triplets between the given entities. Relations are normalized; triplets
/// with an endpoint outside `entities` or a self-loop are dropped.
std::vector<TripletCandidate> generate_relationships(ChatProvider& provider, const PromptTemplates& templates,
                                                     const std::vector<ExtractedEntity>& entities,
                                                     std::string_view text);

/// Existing node for `name`: exact case-insensitive match, else the most
/// similar node with cosine >= threshold.
const GraphNode* match_node(const GraphState& graph, std::string_view name, const EmbeddingVector& embedding,
                            double threshold);

/// Valid edges leaving `source` towards a node other than `destination`
/// whose relation equals `relation` or whose relation embedding scores
/// >= threshold against `relation_embedding`. Creation order.
std::vector<const GraphEdge*> detect_conflicts(const GraphState& graph, const std::string& source,
                                               const std::string& relation, const std::string& destination,
                                               const EmbeddingVector& relation_embedding, double threshold);

/// Ids the resolver marks obsolete. No provider call for an empty list.
/// An answer naming an id outside `conflicts` is logged and yields {}.
std::vector<std::string> resolve_updates(ChatProvider& provider, const PromptTemplates& templates,
                                         const GraphState& graph, const std::string& candidate_text,
                                         const std::vector<const GraphEdge*>& conflicts);

struct UpsertResult {
    /// The stored edge, or the existing duplicate when suppressed.
    std::optional<GraphEdge> edge;
    bool created = false;
    bool suppressed = false;
    std::size_t nodes_created = 0;
    std::vector<std::string> invalidated;
    std::optional<std::string> rejection;
};

/// Mutates one staged GraphState, recording every change in `events`.
class GraphWriter {
public:
    struct Context {
        ChatProvider& provider;
        Embedder& embedder;
        Clock& clock;
        const PromptTemplates& templates;
        std::function<std::string()> next_id;
        GraphSettings settings;
    };

    GraphWriter(Context context, GraphState& graph, EventBatch& events)
        : context_(std::move(context)), graph_(graph), events_(events) {}

    /// (node id, created)
    std::pair<std::string, bool> resolve_node(const ExtractedEntity& entity);
    UpsertResult upsert_triplet(const TripletCandidate& candidate, const std::vector<ExtractedEntity>& entities,
                                const std::vector<std::string>& provenance);
    /// Full ingestion path for one text: entities, relations, upserts.
    std::vector<UpsertResult> ingest(std::string_view text, const std::vector<std::string>& provenance);

private:
    void record(EventRecord event);

    Context context_;
    GraphState& graph_;
    EventBatch& events_;
};

struct Subgraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    bool empty() const noexcept { return nodes.empty() && edges.empty(); }
};

struct ScoredEdge {
    GraphEdge edge;
    double score = 0.0;
};

/// Anchors from the query's entities plus their valid incident edges (both
/// directions) and the far endpoints, within the node budget.
Subgraph retrieve_entity_centric(ChatProvider& provider, Embedder& embedder, const PromptTemplates& templates,
                                 const GraphState& graph, std::string_view query, const GraphSettings& settings);

/// Valid edges whose text embedding scores >= threshold against the query,
/// highest first. Requires threshold in [-1, 1].
std::vector<ScoredEdge> retrieve_semantic_triplets(Embedder& embedder, const GraphState& graph,
                                                   std::string_view query, double threshold);

/// "name -- relation --> name" lines for answer prompts.
std::string render_relations(const GraphState& graph, const std::vector<GraphEdge>& edges);

}  // namespace mnemo
