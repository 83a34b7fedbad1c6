// SPDX-License-Identifier: Apache-2.0
#include "mnemo/service/config.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

namespace mnemo {
namespace {

template <typename T>
T parse_number(const std::string& text, const char* name) {
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_floating_point_v<T>) {
            value = static_cast<T>(std::stod(text, &used));
        } else {
            value = static_cast<T>(std::stoll(text, &used));
        }
        if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::invalid_input, fmt::format("{} is not a number: '{}'", name, text));
}

bool parse_flag(const std::string& text, const char* name) {
    if (text == "1" || text == "true" || text == "on") return true;
    if (text == "0" || text == "false" || text == "off") return false;
    fail(ErrorCode::invalid_input, fmt::format("{} must be true or false, got '{}'", name, text));
}

}  // namespace

ServiceConfig service_config_from_json(const nlohmann::json& json) {
    require(json.is_object(), ErrorCode::invalid_input, "service config must be a JSON object");
    static const std::set<std::string> known{"host",     "port",      "threads",    "provider",          "embedder",
                                             "engine",   "token",     "tokenizer",  "vocabulary",        "prompt_dir",
                                             "triplet_threshold", "log_requests"};
    for (const auto& [key, value] : json.items()) {
        require(known.count(key) == 1, ErrorCode::invalid_input, fmt::format("unknown service setting '{}'", key));
    }
    ServiceConfig config;
    try {
        config.host = json.value("host", config.host);
        config.port = json.value("port", config.port);
        config.threads = json.value("threads", config.threads);
        config.tokenizer = json.value("tokenizer", config.tokenizer);
        config.triplet_threshold = json.value("triplet_threshold", config.triplet_threshold);
        config.log_requests = json.value("log_requests", config.log_requests);
        if (auto it = json.find("token"); it != json.end() && !it->is_null()) config.token = it->get<std::string>();
        if (auto it = json.find("vocabulary"); it != json.end() && !it->is_null()) {
            config.vocabulary = std::filesystem::path(it->get<std::string>());
        }
        if (auto it = json.find("prompt_dir"); it != json.end() && !it->is_null()) {
            config.prompt_dir = std::filesystem::path(it->get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::invalid_input, fmt::format("service config: {}", e.what()));
    }
    if (auto it = json.find("provider"); it != json.end()) config.provider = provider_settings_from_json(*it);
    if (auto it = json.find("embedder"); it != json.end()) config.embedder = embedder_settings_from_json(*it);
    if (auto it = json.find("engine"); it != json.end()) config.engine = engine_config_from_json(*it);
    return config;
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
    ServiceConfig config;
    if (file) {
        std::ifstream in(*file);
        require(in.good(), ErrorCode::io, fmt::format("cannot open config file {}", file->string()));
        nlohmann::json json;
        try {
            json = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorCode::invalid_input, fmt::format("config file {}: {}", file->string(), e.what()));
        }
        config = service_config_from_json(json);
    }
    if (auto v = env("MNEMO_HOST")) config.host = *v;
    if (auto v = env("MNEMO_PORT")) config.port = parse_number<int>(*v, "MNEMO_PORT");
    if (auto v = env("MNEMO_DATA_DIR")) config.engine.data_dir = std::filesystem::path(*v);
    if (auto v = env("MNEMO_PROVIDER")) config.provider.backend = *v;
    if (auto v = env("MNEMO_PROVIDER_SCRIPT")) config.provider.script = std::filesystem::path(*v);
    if (auto v = env("MNEMO_EMBEDDER")) config.embedder.backend = *v;
    if (auto v = env("MNEMO_NODE_THRESHOLD")) {
        config.engine.graph.node_threshold = parse_number<double>(*v, "MNEMO_NODE_THRESHOLD");
    }
    if (auto v = env("MNEMO_RELATION_THRESHOLD")) {
        config.engine.graph.relation_threshold = parse_number<double>(*v, "MNEMO_RELATION_THRESHOLD");
    }
    if (auto v = env("MNEMO_GRAPH")) config.engine.graph_enabled = parse_flag(*v, "MNEMO_GRAPH");
    if (auto v = env("MNEMO_API_TOKEN"); v && !v->empty()) config.token = *v;
    if (auto v = env("MNEMO_TOKENIZER")) config.tokenizer = *v;
    if (auto v = env("MNEMO_VOCAB")) config.vocabulary = std::filesystem::path(*v);
    if (auto v = env("MNEMO_DEADLINE_MS")) {
        config.engine.deadline = std::chrono::milliseconds(parse_number<long>(*v, "MNEMO_DEADLINE_MS"));
    }
    require(config.port >= 0 && config.port <= 65535, ErrorCode::invalid_input, "port out of range");
    require(config.threads >= 1, ErrorCode::invalid_input, "threads must be at least 1");
    require(config.triplet_threshold >= -1.0 && config.triplet_threshold <= 1.0, ErrorCode::invalid_input,
            "triplet_threshold must lie in [-1, 1]");
    for (const double t : {config.engine.graph.node_threshold, config.engine.graph.relation_threshold}) {
        require(t >= -1.0 && t <= 1.0, ErrorCode::invalid_input, "graph thresholds must lie in [-1, 1]");
    }
    return config;
}

}  // namespace mnemo
