// SPDX-License-Identifier: Apache-2.0
#include "mnemo/service/service.hpp"
#include "support/fake_model.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

using namespace mnemo;
using namespace mnemo::testing;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    void start(EngineConfig engine_config = test_config(), std::optional<std::string> token = std::nullopt) {
        ServiceConfig config;
        config.port = 0;
        config.threads = 4;
        config.log_requests = false;
        config.token = std::move(token);
        config.triplet_threshold = -1.0;
        engine_ = std::shared_ptr<Engine>(make_engine(model_, engine_config).release());
        service_ = std::make_unique<MemoryService>(config, engine_, std::make_shared<WhitespaceTokenizer>());
        port_ = service_->bind();
        thread_ = std::thread([this] { service_->serve(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void TearDown() override {
        if (service_) service_->stop();
        if (thread_.joinable()) thread_.join();
    }

    httplib::Result post(const std::string& path, const nlohmann::json& body) {
        return client_->Post(path, body.dump(), "application/json");
    }

    static nlohmann::json body(const httplib::Result& result) { return nlohmann::json::parse(result->body); }

    static nlohmann::json exchange(const std::string& conversation = "c1") {
        return {{"conversation_id", conversation},
                {"user_ids", {{"Alice", "alice"}, {"Bob", "bob"}}},
                {"messages",
                 {{{"speaker", "Alice"}, {"text", "I am vegetarian"}, {"timestamp", "2024-03-01T10:00:00Z"}},
                  {{"speaker", "Bob"}, {"text", "I avoid dairy"}, {"timestamp", "2024-03-01T10:01:00Z"}}}}};
    }

    void echo_facts() {
        model_.facts = [](const std::string&, const std::string& ns) {
            if (ns == "alice") return std::vector<std::string>{"Is vegetarian"};
            if (ns == "bob") return std::vector<std::string>{"Avoids dairy"};
            return std::vector<std::string>{};
        };
    }

    FakeModel model_;
    std::shared_ptr<Engine> engine_;
    std::unique_ptr<MemoryService> service_;
    std::unique_ptr<httplib::Client> client_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace

TEST_F(ServiceTest, HealthOnFreshBoot) {
    start();
    auto result = client_->Get("/health");
    ASSERT_TRUE(result);
    EXPECT_EQ(result->status, 200);
    EXPECT_EQ(body(result)["status"], "ok");
    EXPECT_FALSE(result->get_header_value("X-Request-Id").empty());
}

TEST_F(ServiceTest, IngestReturnsAuditTrail) {
    echo_facts();
    start();
    auto result = post("/v1/memories", exchange());
    ASSERT_TRUE(result);
    ASSERT_EQ(result->status, 200) << result->body;
    const auto json = body(result);
    ASSERT_EQ(json["pairs"].size(), 1u);
    const auto& decisions = json["pairs"][0]["decisions"];
    ASSERT_EQ(decisions.size(), 2u);
    EXPECT_EQ(decisions[0]["op"], "ADD");
    EXPECT_EQ(decisions[1]["op"], "ADD");
    EXPECT_FALSE(json["buffered"].get<bool>());
}

TEST_F(ServiceTest, ValidationErrorsAre400WithApiError) {
    start();
    auto empty = exchange();
    empty["messages"] = nlohmann::json::array();
    auto result = post("/v1/memories", empty);
    ASSERT_TRUE(result);
    EXPECT_EQ(result->status, 400);
    const auto json = body(result);
    EXPECT_EQ(json["code"], "invalid_input");
    EXPECT_EQ(json["request_id"], result->get_header_value("X-Request-Id"));

    result = client_->Post("/v1/memories", "{not json", "application/json");
    EXPECT_EQ(result->status, 400);

    auto bad_time = exchange();
    bad_time["messages"][0]["timestamp"] = "yesterday";
    EXPECT_EQ(post("/v1/memories", bad_time)->status, 400);
}

TEST_F(ServiceTest, ProviderFailureIs502AndCommitsNothing) {
    echo_facts();
    model_.failing.insert("update_memory");
    start();
    const auto before = engine_->digest();
    auto result = post("/v1/memories", exchange());
    ASSERT_TRUE(result);
    EXPECT_EQ(result->status, 502);
    EXPECT_EQ(engine_->digest(), before);
}

TEST_F(ServiceTest, SearchModesAndErrors) {
    echo_facts();
    start();
    post("/v1/memories", exchange());
    auto result = post("/v1/memories/search", {{"query", "vegetarian"}, {"namespace", "alice"}, {"k", 5}});
    ASSERT_EQ(result->status, 200) << result->body;
    auto json = body(result);
    ASSERT_EQ(json["hits"].size(), 1u);
    EXPECT_EQ(json["hits"][0]["text"], "Is vegetarian");
    EXPECT_FALSE(result->get_header_value("X-Latency-Ms").empty());
    EXPECT_EQ(json["context_tokens"].get<std::size_t>(),
              count_tokens(json["context"].get<std::string>(), WhitespaceTokenizer()));

    EXPECT_EQ(post("/v1/memories/search", {{"query", "x"}, {"namespace", "alice"}, {"mode", "fuzzy"}})->status, 400);
    EXPECT_EQ(post("/v1/memories/search", {{"query", "x"}, {"namespace", "alice"}, {"k", 0}})->status, 400);

    auto empty = post("/v1/memories/search", {{"query", "x"}, {"namespace", "nobody"}});
    EXPECT_EQ(empty->status, 200);
    EXPECT_TRUE(body(empty)["hits"].empty());
    EXPECT_EQ(body(empty)["context_tokens"], 0);
}

TEST_F(ServiceTest, IdenticalSearchesAreByteIdentical) {
    echo_facts();
    start();
    post("/v1/memories", exchange());
    const nlohmann::json query{{"query", "dairy"}, {"namespace", "bob"}, {"k", 3}};
    auto first = post("/v1/memories/search", query);
    auto second = post("/v1/memories/search", query);
    EXPECT_EQ(first->body, second->body);
    EXPECT_EQ(client_->Get("/v1/memories?user_id=bob")->body, client_->Get("/v1/memories?user_id=bob")->body);
}

TEST_F(ServiceTest, GetDeleteHistory) {
    echo_facts();
    start();
    post("/v1/memories", exchange());
    auto list = body(client_->Get("/v1/memories?user_id=alice"));
    ASSERT_EQ(list["memories"].size(), 1u);
    const std::string id = list["memories"][0]["id"];
    EXPECT_EQ(client_->Get("/v1/memories/" + id)->status, 200);
    EXPECT_EQ(client_->Delete("/v1/memories/" + id)->status, 200);
    EXPECT_EQ(client_->Get("/v1/memories/" + id)->status, 404);
    EXPECT_EQ(client_->Delete("/v1/memories/" + id)->status, 404);
    auto history = body(client_->Get("/v1/memories/" + id + "/history"));
    ASSERT_EQ(history["history"].size(), 2u);
    EXPECT_EQ(history["history"][1]["op"], "DELETE");
    EXPECT_EQ(client_->Get("/v1/memories/unknown/history")->status, 404);
    EXPECT_EQ(client_->Get("/v1/memories")->status, 400);
}

TEST_F(ServiceTest, MetricsCountSearches) {
    start();
    const int n = 7;
    for (int i = 0; i < n; ++i) post("/v1/memories/search", {{"query", "q"}, {"namespace", "alice"}});
    auto metrics = client_->Get("/metrics");
    ASSERT_EQ(metrics->status, 200);
    EXPECT_NE(metrics->body.find("mnemo_search_requests_total " + std::to_string(n) + "\n"), std::string::npos)
        << metrics->body;
    EXPECT_NE(metrics->body.find("mnemo_http_request_duration_seconds_count{route=\"search\"} 7"), std::string::npos);
    EXPECT_EQ(service_->metrics().searches(), static_cast<std::uint64_t>(n));
}

TEST_F(ServiceTest, BearerTokenGuardsEverythingButHealth) {
    start(test_config(), "s3cret");
    EXPECT_EQ(client_->Get("/health")->status, 200);
    auto denied = client_->Get("/v1/memories?user_id=a");
    EXPECT_EQ(denied->status, 401);
    EXPECT_EQ(body(denied)["code"], "unauthorized");
    httplib::Headers headers{{"Authorization", "Bearer s3cret"}};
    EXPECT_EQ(client_->Get("/v1/memories?user_id=a", headers)->status, 200);
}

TEST_F(ServiceTest, UnknownRouteGetsApiError) {
    start();
    auto result = client_->Get("/v2/nothing");
    EXPECT_EQ(result->status, 404);
    EXPECT_FALSE(body(result)["request_id"].get<std::string>().empty());
}

TEST_F(ServiceTest, GraphSearchAndExport) {
    model_.entities = [](const std::string& text) {
        std::vector<ExtractedEntity> out{{"alice", "Person"}};
        if (text.find("Paris") != std::string::npos) out.push_back({"Paris", "City"});
        return out;
    };
    model_.relations = [](const std::string& text) {
        if (text.find("Paris") != std::string::npos) return std::vector<TripletCandidate>{{"alice", "lives_in", "Paris"}};
        return std::vector<TripletCandidate>{};
    };
    auto config = test_config();
    config.graph_enabled = true;
    start(config);
    auto ingest = exchange();
    ingest["messages"][0]["text"] = "I live in Paris";
    ASSERT_EQ(post("/v1/memories", ingest)->status, 200);

    auto triplets = post("/v1/memories/search", {{"query", "where"}, {"namespace", "alice"}, {"mode", "graph_triplet"}});
    ASSERT_EQ(triplets->status, 200) << triplets->body;
    auto json = body(triplets);
    ASSERT_EQ(json["edges"].size(), 1u);  // threshold -1: every valid edge
    EXPECT_EQ(json["edges"][0]["relation"], "lives_in");

    auto entity = post("/v1/memories/search", {{"query", "alice"}, {"namespace", "alice"}, {"mode", "graph_entity"}});
    ASSERT_EQ(entity->status, 200) << entity->body;
    EXPECT_EQ(body(entity)["edges"].size(), 1u);

    auto jsonl = client_->Get("/v1/graph/export?namespace=alice&format=jsonl");
    ASSERT_EQ(jsonl->status, 200);
    EXPECT_NE(jsonl->body.find("lives_in"), std::string::npos);
    auto dot = client_->Get("/v1/graph/export?namespace=alice&format=dot");
    EXPECT_EQ(dot->body.rfind("digraph", 0), 0u);
    EXPECT_EQ(client_->Get("/v1/graph/export?namespace=nobody")->status, 404);
    EXPECT_EQ(client_->Get("/v1/graph/export?namespace=alice&format=xml")->status, 400);
}

TEST(ServiceStatus, ErrorCodeMapping) {
    EXPECT_EQ(http_status(ErrorCode::invalid_input), 400);
    EXPECT_EQ(http_status(ErrorCode::not_found), 404);
    EXPECT_EQ(http_status(ErrorCode::conflict), 409);
    EXPECT_EQ(http_status(ErrorCode::provider_unavailable), 502);
    EXPECT_EQ(http_status(ErrorCode::deadline_exceeded), 504);
    EXPECT_EQ(http_status(ErrorCode::io), 500);
}

TEST(ServiceConfigTest, EnvironmentOverridesFile) {
    TempDir dir;
    const auto file = dir.path() / "config.json";
    std::ofstream(file) << R"({"port": 9000, "engine": {"graph_enabled": false, "node_threshold": 0.8},
                               "provider": {"backend": "scripted", "script": "/tmp/s.json"}})";
    std::map<std::string, std::string> env{{"MNEMO_PORT", "9100"}, {"MNEMO_GRAPH", "true"},
                                           {"MNEMO_NODE_THRESHOLD", "0.75"}, {"MNEMO_DATA_DIR", "/var/mnemo"}};
    const auto config = load_service_config(file, [&](const char* name) -> std::optional<std::string> {
        auto it = env.find(name);
        if (it == env.end()) return std::nullopt;
        return it->second;
    });
    EXPECT_EQ(config.port, 9100);
    EXPECT_TRUE(config.engine.graph_enabled);
    EXPECT_DOUBLE_EQ(config.engine.graph.node_threshold, 0.75);
    EXPECT_EQ(config.engine.data_dir, std::filesystem::path("/var/mnemo"));
    EXPECT_EQ(config.provider.script, std::filesystem::path("/tmp/s.json"));
}

TEST(ServiceConfigTest, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(service_config_from_json({{"prot", 1}}), Error);
    EXPECT_THROW(service_config_from_json({{"engine", {{"node_threshold", 2.0}}}}), Error);
    auto none = [](const char*) -> std::optional<std::string> { return std::nullopt; };
    auto bad_port = [](const char* name) -> std::optional<std::string> {
        if (std::string(name) == "MNEMO_PORT") return "eighty";
        return std::nullopt;
    };
    EXPECT_NO_THROW(load_service_config(std::nullopt, none));
    EXPECT_THROW(load_service_config(std::nullopt, bad_port), Error);
}
