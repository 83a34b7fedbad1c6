// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/bench/tokenizer.hpp"
#include "mnemo/core/error.hpp"
#include "mnemo/engine/engine.hpp"
#include "mnemo/service/config.hpp"
#include "mnemo/service/metrics.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace httplib {
class Server;
struct Request;
}  // namespace httplib

namespace spdlog {
class logger;
}

namespace mnemo {

/// What a route handler produces. Non-JSON bodies set `content_type`.
struct Reply {
    int status = 200;
    nlohmann::ordered_json body;
    std::string text;
    std::string content_type = "application/json";
    std::vector<std::pair<std::string, std::string>> headers;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code) noexcept;

/// The /v1 JSON API over one engine.
///
///   POST   /v1/memories                ingest messages
///   POST   /v1/memories/search         dense | graph_entity | graph_triplet
///   GET    /v1/memories?user_id=       all memories of a namespace
///   GET    /v1/memories/{id}           one memory
///   DELETE /v1/memories/{id}           external delete
///   GET    /v1/memories/{id}/history   change lineage
///   GET    /v1/graph/export?namespace=&format=jsonl|dot
///   GET    /health, GET /metrics
///
/// Every response carries X-Request-Id; search responses also carry
/// X-Latency-Ms. Errors use {"error": {"code", "message", "request_id"}}.
class MemoryService {
public:
    MemoryService(ServiceConfig config, std::shared_ptr<Engine> engine, std::shared_ptr<Tokenizer> tokenizer,
                  std::shared_ptr<spdlog::logger> logger = nullptr);
    ~MemoryService();

    /// Builds providers, embedder, tokenizer and engine from the config.
    static std::unique_ptr<MemoryService> create(const ServiceConfig& config);

    /// Binds to config.port (0 picks a free port) and returns the bound port.
    int bind();
    /// Serves until stop(); call after bind().
    void serve();
    void stop();
    bool running() const;

    Engine& engine() noexcept { return *engine_; }
    const Metrics& metrics() const noexcept { return metrics_; }
    const Tokenizer& tokenizer() const noexcept { return *tokenizer_; }

private:
    using Handler = std::function<Reply(const httplib::Request&, const std::string& request_id)>;

    void routes();
    void add(const char* method, const std::string& pattern, const std::string& route, Handler handler);
    std::string next_request_id();

    Reply ingest(const httplib::Request& request);
    Reply search(const httplib::Request& request);
    Reply list(const httplib::Request& request);
    Reply get(const std::string& id);
    Reply remove(const std::string& id);
    Reply history(const std::string& id);
    Reply graph_export(const httplib::Request& request);
    Reply health();

    ServiceConfig config_;
    std::shared_ptr<Engine> engine_;
    std::shared_ptr<Tokenizer> tokenizer_;
    std::shared_ptr<spdlog::logger> logger_;
    std::unique_ptr<httplib::Server> server_;
    Metrics metrics_;
    std::atomic<std::uint64_t> request_counter_{0};
    std::string instance_;
};

nlohmann::ordered_json memory_to_json(const MemoryRecord& record);
nlohmann::ordered_json hit_to_json(const SearchHit& hit);
nlohmann::ordered_json edge_to_json(const GraphState& graph, const GraphEdge& edge);
nlohmann::ordered_json audit_to_json(const AuditEntry& entry);

}  // namespace mnemo
