// SPDX-License-Identifier: Apache-2.0
#include "mnemo/graph/graph.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <cctype>

namespace mnemo {
namespace {

EmbeddingVector embedding_from(const nlohmann::json& json) {
    return EmbeddingVector(json.get<std::vector<double>>());
}

nlohmann::ordered_json node_json(const GraphNode& node, bool with_embedding) {
    nlohmann::ordered_json json;
    json["type"] = "node";
    json["id"] = node.id;
    json["name"] = node.name;
    json["label"] = node.label;
    json["created_at"] = format_instant(node.created_at);
    if (with_embedding) json["embedding"] = embedding_to_json(node.embedding.values());
    return json;
}

nlohmann::ordered_json edge_json(const GraphEdge& edge, bool with_embedding) {
    nlohmann::ordered_json json;
    json["type"] = "edge";
    json["id"] = edge.id;
    json["source"] = edge.source;
    json["relation"] = edge.relation;
    json["destination"] = edge.destination;
    json["created_at"] = format_instant(edge.created_at);
    json["invalid"] = edge.invalid;
    json["invalidated_at"] = edge.invalidated_at ? nlohmann::ordered_json(format_instant(*edge.invalidated_at))
                                                 : nlohmann::ordered_json(nullptr);
    json["provenance"] = edge.provenance;
    if (with_embedding) {
        json["embedding"] = embedding_to_json(edge.embedding.values());
        json["relation_embedding"] = embedding_to_json(edge.relation_embedding.values());
    }
    return json;
}

std::string dot_quote(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

void insert_node(GraphState& graph, std::shared_ptr<GraphNode> node) {
    require(graph.nodes.count(node->id) == 0, ErrorCode::integrity, fmt::format("node {} added twice", node->id));
    graph.node_index.upsert(IndexEntry{node->id, node->embedding, graph.ns, node->id});
    graph.by_name.emplace(fold_case(node->name), node->id);
    graph.node_order.push_back(node->id);
    graph.nodes.emplace(node->id, std::move(node));
}

void insert_edge(GraphState& graph, std::shared_ptr<GraphEdge> edge) {
    require(graph.edges.count(edge->id) == 0, ErrorCode::integrity, fmt::format("edge {} added twice", edge->id));
    require(graph.nodes.count(edge->source) == 1 && graph.nodes.count(edge->destination) == 1, ErrorCode::integrity,
            fmt::format("edge {} references a missing node", edge->id));
    if (!edge->invalid) graph.edge_index.upsert(IndexEntry{edge->id, edge->embedding, graph.ns, edge->id});
    graph.edge_order.push_back(edge->id);
    graph.edges.emplace(edge->id, std::move(edge));
}

}  // namespace

const GraphNode* GraphState::find_node(std::string_view id) const {
    auto it = nodes.find(std::string(id));
    return it == nodes.end() ? nullptr : it->second.get();
}

const GraphEdge* GraphState::find_edge(std::string_view id) const {
    auto it = edges.find(std::string(id));
    return it == edges.end() ? nullptr : it->second.get();
}

const GraphNode* GraphState::find_by_name(std::string_view name) const {
    auto it = by_name.find(fold_case(name));
    return it == by_name.end() ? nullptr : find_node(it->second);
}

std::size_t GraphState::valid_edge_count() const {
    std::size_t count = 0;
    for (const auto& [id, edge] : edges) count += edge->invalid ? 0 : 1;
    return count;
}

std::string GraphState::edge_text(const GraphEdge& edge) const {
    const auto* source = find_node(edge.source);
    const auto* destination = find_node(edge.destination);
    return fmt::format("{} {} {}", source ? source->name : edge.source, edge.relation,
                       destination ? destination->name : edge.destination);
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string normalize_relation(std::string_view relation) {
    std::string out;
    bool pending_break = false;
    char previous = 0;
    for (char c : relation) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            const bool camel_break = std::isupper(u) && (std::islower(static_cast<unsigned char>(previous)) ||
                                                         std::isdigit(static_cast<unsigned char>(previous)));
            if (!out.empty() && (pending_break || camel_break)) out += '_';
            out += static_cast<char>(std::tolower(u));
            pending_break = false;
        } else {
            pending_break = true;
        }
        previous = c;
    }
    return out;
}

EventRecord node_add_event(const GraphNode& node) {
    EventRecord event;
    event.at = node.created_at;
    event.kind = EventKind::node_add;
    event.body["id"] = node.id;
    event.body["name"] = node.name;
    event.body["label"] = node.label;
    event.body["embedding"] = embedding_to_json(node.embedding.values());
    return event;
}

EventRecord edge_add_event(const GraphEdge& edge) {
    EventRecord event;
    event.at = edge.created_at;
    event.kind = EventKind::edge_add;
    event.body["id"] = edge.id;
    event.body["source"] = edge.source;
    event.body["relation"] = edge.relation;
    event.body["destination"] = edge.destination;
    event.body["provenance"] = edge.provenance;
    event.body["embedding"] = embedding_to_json(edge.embedding.values());
    event.body["relation_embedding"] = embedding_to_json(edge.relation_embedding.values());
    return event;
}

EventRecord edge_invalidate_event(const std::string& id, Instant at) {
    EventRecord event;
    event.at = at;
    event.kind = EventKind::edge_invalidate;
    event.body["id"] = id;
    return event;
}

void apply_graph_event(GraphState& graph, const EventRecord& event) {
    const auto& body = event.body;
    switch (event.kind) {
        case EventKind::node_add: {
            auto node = std::make_shared<GraphNode>();
            node->id = body.at("id").get<std::string>();
            node->name = body.at("name").get<std::string>();
            node->label = body.at("label").get<std::string>();
            node->embedding = embedding_from(body.at("embedding"));
            node->created_at = event.at;
            node->ns = graph.ns;
            insert_node(graph, std::move(node));
            return;
        }
        case EventKind::edge_add: {
            auto edge = std::make_shared<GraphEdge>();
            edge->id = body.at("id").get<std::string>();
            edge->source = body.at("source").get<std::string>();
            edge->relation = body.at("relation").get<std::string>();
            edge->destination = body.at("destination").get<std::string>();
            edge->provenance = body.at("provenance").get<std::vector<std::string>>();
            edge->embedding = embedding_from(body.at("embedding"));
            edge->relation_embedding = embedding_from(body.at("relation_embedding"));
            edge->created_at = event.at;
            insert_edge(graph, std::move(edge));
            return;
        }
        case EventKind::edge_invalidate: {
            const auto id = body.at("id").get<std::string>();
            auto it = graph.edges.find(id);
            require(it != graph.edges.end(), ErrorCode::integrity, fmt::format("invalidation of unknown edge {}", id));
            require(!it->second->invalid, ErrorCode::integrity, fmt::format("edge {} invalidated twice", id));
            auto edge = std::make_shared<GraphEdge>(*it->second);
            edge->invalid = true;
            edge->invalidated_at = std::max(event.at, edge->created_at);
            graph.edge_index.remove(id, graph.ns);
            it->second = std::move(edge);
            return;
        }
        default:
            fail(ErrorCode::integrity, fmt::format("event kind {} does not apply to the graph", to_string(event.kind)));
    }
}

nlohmann::ordered_json to_json(const GraphState& graph) {
    nlohmann::ordered_json json;
    json["namespace"] = graph.ns;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& id : graph.node_order) nodes.push_back(node_json(*graph.find_node(id), true));
    auto edges = nlohmann::ordered_json::array();
    for (const auto& id : graph.edge_order) edges.push_back(edge_json(*graph.find_edge(id), true));
    json["nodes"] = std::move(nodes);
    json["edges"] = std::move(edges);
    return json;
}

GraphState graph_state_from_json(const nlohmann::json& json, std::size_t dimension) {
    GraphState graph(json.at("namespace").get<std::string>(), dimension);
    for (const auto& item : json.at("nodes")) {
        auto node = std::make_shared<GraphNode>();
        node->id = item.at("id").get<std::string>();
        node->name = item.at("name").get<std::string>();
        node->label = item.at("label").get<std::string>();
        node->created_at = parse_instant(item.at("created_at").get<std::string>());
        node->embedding = embedding_from(item.at("embedding"));
        node->ns = graph.ns;
        insert_node(graph, std::move(node));
    }
    for (const auto& item : json.at("edges")) {
        auto edge = std::make_shared<GraphEdge>();
        edge->id = item.at("id").get<std::string>();
        edge->source = item.at("source").get<std::string>();
        edge->relation = item.at("relation").get<std::string>();
        edge->destination = item.at("destination").get<std::string>();
        edge->created_at = parse_instant(item.at("created_at").get<std::string>());
        edge->invalid = item.at("invalid").get<bool>();
        if (!item.at("invalidated_at").is_null()) {
            edge->invalidated_at = parse_instant(item.at("invalidated_at").get<std::string>());
        }
        edge->provenance = item.at("provenance").get<std::vector<std::string>>();
        edge->embedding = embedding_from(item.at("embedding"));
        edge->relation_embedding = embedding_from(item.at("relation_embedding"));
        insert_edge(graph, std::move(edge));
    }
    return graph;
}

std::string export_jsonl(const GraphState& graph) {
    std::string out;
    for (const auto& id : graph.node_order) {
        auto json = node_json(*graph.find_node(id), false);
        json["namespace"] = graph.ns;
        out += json.dump() + "\n";
    }
    for (const auto& id : graph.edge_order) {
        auto json = edge_json(*graph.find_edge(id), false);
        json["namespace"] = graph.ns;
        out += json.dump() + "\n";
    }
    return out;
}

std::string export_dot(const GraphState& graph) {
    std::string out = fmt::format("digraph {} {{\n", dot_quote(graph.ns));
    for (const auto& id : graph.node_order) {
        const auto& node = *graph.find_node(id);
        out += fmt::format("  {} [label={}];\n", dot_quote(node.id), dot_quote(node.name + " (" + node.label + ")"));
    }
    for (const auto& id : graph.edge_order) {
        const auto& edge = *graph.find_edge(id);
        out += fmt::format("  {} -> {} [label={}{}];\n", dot_quote(edge.source), dot_quote(edge.destination),
                           dot_quote(edge.relation), edge.invalid ? ", style=dashed" : "");
    }
    return out + "}\n";
}

}  // namespace mnemo
