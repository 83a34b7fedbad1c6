// SPDX-License-Identifier: Apache-2.0
#include "mnemo/service/service.hpp"

#include "mnemo/bench/judge.hpp"
#include "mnemo/core/error.hpp"
#include "mnemo/pipeline/conversation.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <random>

namespace mnemo {
namespace {

using SteadyClock = std::chrono::steady_clock;

nlohmann::json parse_body(const httplib::Request& request) {
    require(!request.body.empty(), ErrorCode::invalid_input, "request body is empty");
    auto body = nlohmann::json::parse(request.body, nullptr, false);
    require(!body.is_discarded(), ErrorCode::invalid_input, "request body is not valid JSON");
    require(body.is_object(), ErrorCode::invalid_input, "request body must be a JSON object");
    return body;
}

std::string required_string(const nlohmann::json& body, const char* key) {
    auto it = body.find(key);
    require(it != body.end() && it->is_string(), ErrorCode::invalid_input, fmt::format("'{}' must be a string", key));
    auto value = it->get<std::string>();
    require(value.find_first_not_of(" \t\r\n") != std::string::npos, ErrorCode::invalid_input,
            fmt::format("'{}' must not be blank", key));
    return value;
}

std::string required_param(const httplib::Request& request, const char* key) {
    require(request.has_param(key), ErrorCode::invalid_input, fmt::format("query parameter '{}' is required", key));
    auto value = request.get_param_value(key);
    require(!value.empty(), ErrorCode::invalid_input, fmt::format("query parameter '{}' must not be empty", key));
    return value;
}

Reply error_reply(int status, std::string_view code, std::string_view message, const std::string& request_id) {
    Reply reply;
    reply.status = status;
    reply.body["code"] = code;
    reply.body["message"] = message;
    reply.body["request_id"] = request_id;
    return reply;
}

std::map<std::string, std::string> parse_users(const nlohmann::json& body, const std::vector<Message>& messages) {
    std::map<std::string, std::string> users;
    if (auto it = body.find("user_ids"); it != body.end()) {
        require(it->is_object(), ErrorCode::invalid_input, "'user_ids' must map speaker names to user ids");
        for (const auto& [speaker, user] : it->items()) {
            require(user.is_string() && !user.get<std::string>().empty(), ErrorCode::invalid_input,
                    fmt::format("user id for speaker '{}' must be a non-empty string", speaker));
            users[speaker] = user.get<std::string>();
        }
    }
    if (auto it = body.find("user_id"); it != body.end()) {
        require(users.empty(), ErrorCode::invalid_input, "pass either 'user_id' or 'user_ids', not both");
        const auto user = required_string(body, "user_id");
        for (const auto& message : messages) users[message.speaker] = user;
    }
    return users;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_input: return 400;
        case ErrorCode::not_found: return 404;
        case ErrorCode::conflict: return 409;
        case ErrorCode::provider_unavailable:
        case ErrorCode::provider_protocol:
        case ErrorCode::script_miss:
        case ErrorCode::extraction_parse:
        case ErrorCode::judge_parse: return 502;
        case ErrorCode::deadline_exceeded: return 504;
        case ErrorCode::integrity:
        case ErrorCode::unsupported_version:
        case ErrorCode::config_mismatch:
        case ErrorCode::io: return 500;
    }
    return 500;
}

nlohmann::ordered_json memory_to_json(const MemoryRecord& record) {
    nlohmann::ordered_json json;
    json["id"] = record.id;
    json["text"] = record.text;
    json["namespace"] = record.ns;
    json["created_at"] = format_instant(record.created_at);
    json["updated_at"] = format_instant(record.updated_at);
    json["last_op"] = to_string(record.last_op);
    return json;
}

nlohmann::ordered_json hit_to_json(const SearchHit& hit) {
    nlohmann::ordered_json json;
    json["id"] = hit.id;
    json["text"] = hit.text;
    json["score"] = hit.score;
    json["created_at"] = format_instant(hit.created_at);
    json["updated_at"] = format_instant(hit.updated_at);
    return json;
}

nlohmann::ordered_json edge_to_json(const GraphState& graph, const GraphEdge& edge) {
    const auto* source = graph.find_node(edge.source);
    const auto* destination = graph.find_node(edge.destination);
    nlohmann::ordered_json json;
    json["id"] = edge.id;
    json["source"] = edge.source;
    json["source_name"] = source ? source->name : std::string();
    json["relation"] = edge.relation;
    json["destination"] = edge.destination;
    json["destination_name"] = destination ? destination->name : std::string();
    json["created_at"] = format_instant(edge.created_at);
    json["valid"] = !edge.invalid;
    if (edge.invalidated_at) json["invalidated_at"] = format_instant(*edge.invalidated_at);
    json["provenance"] = edge.provenance;
    return json;
}

nlohmann::ordered_json audit_to_json(const AuditEntry& entry) {
    nlohmann::ordered_json json;
    json["namespace"] = entry.ns;
    json["fact"] = entry.fact.text;
    json["op"] = to_string(entry.decision.op);
    if (entry.memory_id) json["memory_id"] = *entry.memory_id;
    if (entry.decision.target_id) json["target_id"] = *entry.decision.target_id;
    if (entry.decision.new_text) json["text"] = *entry.decision.new_text;
    json["source_pair"] = {entry.fact.source_pair.first, entry.fact.source_pair.second};
    if (entry.rejection) json["rejection"] = *entry.rejection;
    return json;
}

MemoryService::MemoryService(ServiceConfig config, std::shared_ptr<Engine> engine,
                             std::shared_ptr<Tokenizer> tokenizer, std::shared_ptr<spdlog::logger> logger)
    : config_(std::move(config)),
      engine_(std::move(engine)),
      tokenizer_(std::move(tokenizer)),
      logger_(std::move(logger)),
      server_(std::make_unique<httplib::Server>()) {
    require(engine_ != nullptr && tokenizer_ != nullptr, ErrorCode::invalid_input, "service needs an engine and a tokenizer");
    if (!logger_) {
        if (config_.log_requests) {
            logger_ = std::make_shared<spdlog::logger>("mnemo.service", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        } else {
            logger_ = std::make_shared<spdlog::logger>("mnemo.service");
        }
        logger_->set_pattern("%v");
    }
    std::random_device device;
    instance_ = fmt::format("{:08x}", device());
    const auto threads = config_.threads;
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    server_->set_payload_max_length(std::size_t{64} << 20);
    routes();
}

MemoryService::~MemoryService() { stop(); }

std::unique_ptr<MemoryService> MemoryService::create(const ServiceConfig& config) {
    EngineServices services;
    services.provider = make_provider(config.provider);
    services.embedder = make_embedder(config.embedder);
    if (config.prompt_dir) services.templates = PromptTemplates::load(*config.prompt_dir);
    auto tokenizer = make_tokenizer(config.tokenizer, config.vocabulary.value_or(std::filesystem::path()));
    auto engine = std::make_shared<Engine>(config.engine, std::move(services));
    return std::make_unique<MemoryService>(config, std::move(engine), std::move(tokenizer));
}

int MemoryService::bind() {
    if (config_.port == 0) {
        const int port = server_->bind_to_any_port(config_.host);
        require(port > 0, ErrorCode::io, fmt::format("cannot bind {}", config_.host));
        return port;
    }
    require(server_->bind_to_port(config_.host, config_.port), ErrorCode::io,
            fmt::format("cannot bind {}:{}", config_.host, config_.port));
    return config_.port;
}

void MemoryService::serve() { server_->listen_after_bind(); }

void MemoryService::stop() {
    if (server_) server_->stop();
}

bool MemoryService::running() const { return server_->is_running(); }

std::string MemoryService::next_request_id() {
    return fmt::format("req-{}-{:06d}", instance_, ++request_counter_);
}

void MemoryService::add(const char* method, const std::string& pattern, const std::string& route, Handler handler) {
    auto wrapped = [this, route, handler = std::move(handler)](const httplib::Request& request,
                                                              httplib::Response& response) {
        const auto start = SteadyClock::now();
        std::string request_id = request.get_header_value("X-Request-Id");
        if (request_id.empty() || request_id.size() > 128) request_id = next_request_id();
        Reply reply;
        std::string error_code;
        try {
            if (config_.token && route != "health" &&
                request.get_header_value("Authorization") != "Bearer " + *config_.token) {
                reply = error_reply(401, "unauthorized", "missing or wrong bearer token", request_id);
            } else {
                reply = handler(request, request_id);
            }
        } catch (const Error& e) {
            reply = error_reply(http_status(e.code()), to_string(e.code()), e.what(), request_id);
        } catch (const nlohmann::json::exception& e) {
            reply = error_reply(400, to_string(ErrorCode::invalid_input), e.what(), request_id);
        } catch (const std::exception& e) {
            reply = error_reply(500, "internal", e.what(), request_id);
        }
        if (reply.status >= 400) error_code = reply.body.value("code", "");

        response.status = reply.status;
        response.set_header("X-Request-Id", request_id);
        for (const auto& [name, value] : reply.headers) response.set_header(name, value);
        if (reply.content_type == "application/json") {
            response.set_content(reply.body.dump() + "\n", "application/json");
        } else {
            response.set_content(reply.text, reply.content_type);
        }

        const double seconds = std::chrono::duration<double>(SteadyClock::now() - start).count();
        metrics_.observe(route, reply.status, seconds);
        nlohmann::ordered_json line;
        line["ts"] = format_instant(SystemClock().now());
        line["level"] = reply.status >= 500 ? "error" : reply.status >= 400 ? "warn" : "info";
        line["request_id"] = request_id;
        line["method"] = request.method;
        line["path"] = request.path;
        line["route"] = route;
        line["status"] = reply.status;
        line["latency_ms"] = seconds * 1000.0;
        if (!error_code.empty()) line["error"] = error_code;
        logger_->info(line.dump());
    };
    const std::string verb(method);
    if (verb == "GET") {
        server_->Get(pattern, wrapped);
    } else if (verb == "POST") {
        server_->Post(pattern, wrapped);
    } else if (verb == "DELETE") {
        server_->Delete(pattern, wrapped);
    }
}

void MemoryService::routes() {
    add("POST", "/v1/memories", "ingest", [this](const auto& request, const auto&) { return ingest(request); });
    add("POST", "/v1/memories/search", "search", [this](const auto& request, const auto&) { return search(request); });
    add("GET", "/v1/memories", "list", [this](const auto& request, const auto&) { return list(request); });
    add("GET", R"(/v1/memories/([^/]+)/history)", "history",
        [this](const auto& request, const auto&) { return history(request.matches[1]); });
    add("GET", R"(/v1/memories/([^/]+))", "get", [this](const auto& request, const auto&) { return get(request.matches[1]); });
    add("DELETE", R"(/v1/memories/([^/]+))", "delete",
        [this](const auto& request, const auto&) { return remove(request.matches[1]); });
    add("GET", "/v1/graph/export", "graph_export", [this](const auto& request, const auto&) { return graph_export(request); });
    add("GET", "/health", "health", [this](const auto&, const auto&) { return health(); });
    add("GET", "/metrics", "metrics", [this](const auto&, const auto&) {
        Reply reply;
        reply.content_type = "text/plain; version=0.0.4";
        reply.text = metrics_.render();
        return reply;
    });

    // Unmatched routes and methods; handlers already wrote their own bodies.
    server_->set_error_handler([this](const httplib::Request& request, httplib::Response& response) {
        if (!response.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        const auto request_id = next_request_id();
        const auto code = response.status == 404 ? "route_not_found" : "http_error";
        const auto reply = error_reply(response.status, code, fmt::format("{} {}", request.method, request.path), request_id);
        response.set_header("X-Request-Id", request_id);
        response.set_content(reply.body.dump() + "\n", "application/json");
        metrics_.observe("unmatched", response.status, 0.0);
        return httplib::Server::HandlerResponse::Handled;
    });
}

Reply MemoryService::ingest(const httplib::Request& request) {
    const auto body = parse_body(request);
    IngestRequest ingest;
    ingest.conversation_id = required_string(body, "conversation_id");
    auto messages = body.find("messages");
    require(messages != body.end() && messages->is_array(), ErrorCode::invalid_input, "'messages' must be an array");
    require(!messages->empty(), ErrorCode::invalid_input, "'messages' must not be empty");
    for (std::size_t i = 0; i < messages->size(); ++i) {
        const auto& item = (*messages)[i];
        try {
            require(item.is_object(), ErrorCode::invalid_input, "not an object");
            ingest.messages.push_back(message_from_json(item));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::invalid_input, fmt::format("messages[{}]: {}", i, e.what()));
        } catch (const Error& e) {
            fail(ErrorCode::invalid_input, fmt::format("messages[{}]: {}", i, e.what()));
        }
    }
    ingest.users = parse_users(body, ingest.messages);
    if (auto it = body.find("flush"); it != body.end()) {
        require(it->is_boolean(), ErrorCode::invalid_input, "'flush' must be a boolean");
        ingest.flush = it->get<bool>();
    }

    const auto result = engine_->ingest(ingest, IngestOptions{true});

    Reply reply;
    reply.body["conversation_id"] = ingest.conversation_id;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& pair : result.pairs) {
        nlohmann::ordered_json item;
        item["messages"] = {pair.previous_id, pair.current_id};
        item["namespaces"] = pair.namespaces;
        auto decisions = nlohmann::ordered_json::array();
        for (const auto& entry : pair.audit) {
            decisions.push_back(audit_to_json(entry));
            metrics_.count_decision(std::string(to_string(entry.decision.op)));
        }
        item["decisions"] = std::move(decisions);
        item["edges_added"] = pair.edges_added;
        item["edges_invalidated"] = pair.edges_invalidated;
        pairs.push_back(std::move(item));
    }
    reply.body["pairs"] = std::move(pairs);
    reply.body["buffered"] = result.buffered;
    return reply;
}

Reply MemoryService::search(const httplib::Request& request) {
    const auto body = parse_body(request);
    const auto query = required_string(body, "query");
    std::string ns;
    if (body.contains("namespace")) {
        ns = required_string(body, "namespace");
    } else {
        ns = required_string(body, "user_id");
    }
    std::string mode = "dense";
    if (auto it = body.find("mode"); it != body.end()) {
        require(it->is_string(), ErrorCode::invalid_input, "'mode' must be a string");
        mode = it->get<std::string>();
    }
    require(mode == "dense" || mode == "graph_entity" || mode == "graph_triplet", ErrorCode::invalid_input,
            fmt::format("unknown search mode '{}'; expected dense, graph_entity or graph_triplet", mode));
    std::int64_t k = 10;
    if (auto it = body.find("k"); it != body.end()) {
        require(it->is_number_integer(), ErrorCode::invalid_input, "'k' must be an integer");
        k = it->get<std::int64_t>();
    }
    require(k >= 1, ErrorCode::invalid_input, "'k' must be at least 1");
    double threshold = config_.triplet_threshold;
    if (auto it = body.find("threshold"); it != body.end()) {
        require(it->is_number(), ErrorCode::invalid_input, "'threshold' must be a number");
        threshold = it->get<double>();
    }
    if (mode != "dense") {
        require(engine_->config().graph_enabled, ErrorCode::invalid_input, "graph memory is disabled on this server");
    }

    Reply reply;
    reply.body["mode"] = mode;
    reply.body["namespace"] = ns;
    reply.body["query"] = query;
    std::string context;
    const auto start = SteadyClock::now();
    if (mode == "dense") {
        const auto hits = engine_->search(query, static_cast<std::size_t>(k), ns);
        auto items = nlohmann::ordered_json::array();
        std::vector<std::string> lines;
        for (const auto& hit : hits) {
            items.push_back(hit_to_json(hit));
            lines.push_back(hit.text);
        }
        context = render_context_lines(lines);
        reply.body["k"] = k;
        reply.body["hits"] = std::move(items);
    } else if (mode == "graph_entity") {
        const auto subgraph = engine_->graph_entity_search(query, ns);
        const auto state = engine_->namespace_state(ns);
        auto nodes = nlohmann::ordered_json::array();
        for (const auto& node : subgraph.nodes) {
            nodes.push_back({{"id", node.id}, {"name", node.name}, {"label", node.label}});
        }
        auto edges = nlohmann::ordered_json::array();
        if (state) {
            for (const auto& edge : subgraph.edges) edges.push_back(edge_to_json(state->graph, edge));
            context = render_relations(state->graph, subgraph.edges);
        }
        reply.body["nodes"] = std::move(nodes);
        reply.body["edges"] = std::move(edges);
    } else {
        require(threshold >= -1.0 && threshold <= 1.0, ErrorCode::invalid_input, "'threshold' must lie in [-1, 1]");
        const auto scored = engine_->graph_triplet_search(query, ns, threshold);
        const auto state = engine_->namespace_state(ns);
        auto edges = nlohmann::ordered_json::array();
        if (state) {
            std::vector<GraphEdge> plain;
            for (const auto& item : scored) {
                auto json = edge_to_json(state->graph, item.edge);
                json["score"] = item.score;
                edges.push_back(std::move(json));
                plain.push_back(item.edge);
            }
            context = render_relations(state->graph, plain);
        }
        reply.body["threshold"] = threshold;
        reply.body["edges"] = std::move(edges);
    }
    const double latency_ms = std::chrono::duration<double, std::milli>(SteadyClock::now() - start).count();
    metrics_.count_search(mode);
    reply.body["context"] = context;
    reply.body["context_tokens"] = count_tokens(context, *tokenizer_);
    reply.body["tokenizer"] = tokenizer_->id();
    reply.headers.emplace_back("X-Latency-Ms", fmt::format("{:.3f}", latency_ms));
    return reply;
}

Reply MemoryService::list(const httplib::Request& request) {
    const auto user = required_param(request, "user_id");
    Reply reply;
    reply.body["user_id"] = user;
    auto memories = nlohmann::ordered_json::array();
    for (const auto& record : engine_->get_all(user)) memories.push_back(memory_to_json(record));
    reply.body["memories"] = std::move(memories);
    return reply;
}

Reply MemoryService::get(const std::string& id) {
    const auto record = engine_->get(id);
    require(record.has_value(), ErrorCode::not_found, fmt::format("no memory with id '{}'", id));
    Reply reply;
    reply.body = memory_to_json(*record);
    return reply;
}

Reply MemoryService::remove(const std::string& id) {
    engine_->remove(id);
    Reply reply;
    reply.body["id"] = id;
    reply.body["deleted"] = true;
    return reply;
}

Reply MemoryService::history(const std::string& id) {
    Reply reply;
    reply.body["id"] = id;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& entry : engine_->history(id)) {
        entries.push_back({{"op", to_string(entry.op)}, {"text", entry.text}, {"at", format_instant(entry.at)}});
    }
    reply.body["history"] = std::move(entries);
    return reply;
}

Reply MemoryService::graph_export(const httplib::Request& request) {
    const auto ns = required_param(request, "namespace");
    const auto format = request.has_param("format") ? request.get_param_value("format") : std::string("jsonl");
    require(format == "jsonl" || format == "dot", ErrorCode::invalid_input,
            fmt::format("unknown export format '{}'; expected jsonl or dot", format));
    const auto state = engine_->namespace_state(ns);
    require(state != nullptr, ErrorCode::not_found, fmt::format("no namespace '{}'", ns));
    Reply reply;
    if (format == "jsonl") {
        reply.content_type = "application/x-ndjson";
        reply.text = export_jsonl(state->graph);
    } else {
        reply.content_type = "text/vnd.graphviz";
        reply.text = export_dot(state->graph);
    }
    return reply;
}

Reply MemoryService::health() {
    Reply reply;
    reply.body["status"] = "ok";
    reply.body["graph_enabled"] = engine_->config().graph_enabled;
    reply.body["persistent"] = engine_->config().data_dir.has_value();
    reply.body["tokenizer"] = tokenizer_->id();
    return reply;
}

}  // namespace mnemo
