// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/core/time.hpp"
#include "mnemo/index/vector_index.hpp"
#include "mnemo/store/event.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mnemo {

struct GraphNode {
    std::string id;
    std::string name;
    std::string label;
    EmbeddingVector embedding;
    Instant created_at;
    std::string ns;
};

struct GraphEdge {
    std::string id;
    std::string source;
    std::string relation;
    std::string destination;
    Instant created_at;
    bool invalid = false;
    std::optional<Instant> invalidated_at;
    std::vector<std::string> provenance;
    /// Embedding of "source relation destination".
    EmbeddingVector embedding;
    /// Embedding of the relation label alone, used for conflict detection.
    EmbeddingVector relation_embedding;
};

/// Directed labeled graph of one namespace. Edges are never removed;
/// invalidation flips a flag and drops the edge from `edge_index`.
struct GraphState {
    GraphState(std::string ns, std::size_t dimension) : ns(std::move(ns)), node_index(dimension), edge_index(dimension) {}

    std::string ns;
    std::map<std::string, std::shared_ptr<const GraphNode>> nodes;
    std::map<std::string, std::shared_ptr<const GraphEdge>> edges;
    std::vector<std::string> node_order;
    std::vector<std::string> edge_order;
    /// Lowercased name -> node id.
    std::map<std::string, std::string> by_name;
    VectorIndex node_index;
    /// Valid edges only.
    VectorIndex edge_index;

    const GraphNode* find_node(std::string_view id) const;
    const GraphEdge* find_edge(std::string_view id) const;
    const GraphNode* find_by_name(std::string_view name) const;
    std::size_t valid_edge_count() const;
    /// "source relation destination" with node names.
    std::string edge_text(const GraphEdge& edge) const;
};

std::string normalize_relation(std::string_view relation);
std::string fold_case(std::string_view text);

EventRecord node_add_event(const GraphNode& node);
EventRecord edge_add_event(const GraphEdge& edge);
EventRecord edge_invalidate_event(const std::string& id, Instant at);

/// Throws Error(integrity) when the event does not fit the graph.
void apply_graph_event(GraphState& graph, const EventRecord& event);

nlohmann::ordered_json to_json(const GraphState& graph);
GraphState graph_state_from_json(const nlohmann::json& json, std::size_t dimension);

/// One JSON object per line: nodes first, then edges, in creation order.
std::string export_jsonl(const GraphState& graph);
/// Graphviz dump; invalid edges are dashed.
std::string export_dot(const GraphState& graph);

}  // namespace mnemo
