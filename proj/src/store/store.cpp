// SPDX-License-Identifier: Apache-2.0
#include "mnemo/store/store.hpp"

#include "mnemo/core/error.hpp"

#include <fcntl.h>
#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mnemo {
namespace {

constexpr std::string_view kConversations = "_conversations";

std::string decode_path_component(std::string_view name) {
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
        if (name[i] == '%' && i + 2 < name.size()) {
            out += static_cast<char>(std::stoi(std::string(name.substr(i + 1, 2)), nullptr, 16));
            i += 2;
        } else {
            out += name[i];
        }
    }
    return out;
}

std::vector<std::string> list_dirs(const std::filesystem::path& root) {
    std::vector<std::string> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const auto name = entry.path().filename().string();
        if (name.empty() || name[0] == '_' || name[0] == '.') continue;
        out.push_back(decode_path_component(name));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_snapshot(const Snapshot& snapshot, const ConfigFingerprint& fingerprint, std::uint64_t last_sequence,
                    const std::filesystem::path& dir) {
    if (!(snapshot.fingerprint == fingerprint)) {
        fail(ErrorCode::config_mismatch,
             fmt::format("snapshot in {} was taken with configuration {} but the runtime configuration is {}",
                         dir.string(), to_json(snapshot.fingerprint).dump(), to_json(fingerprint).dump()));
    }
    require(snapshot.covering_sequence <= last_sequence, ErrorCode::integrity,
            fmt::format("snapshot in {} covers sequence {} beyond the log end {}", dir.string(),
                        snapshot.covering_sequence, last_sequence));
}

template <typename State>
std::size_t replay(State& state, const std::vector<EventRecord>& events, std::uint64_t after) {
    std::size_t count = 0;
    auto expected = after + 1;
    for (const auto& event : events) {
        if (event.sequence <= after) continue;
        require(event.sequence == expected, ErrorCode::integrity,
                fmt::format("event sequence {} where {} was expected", event.sequence, expected));
        apply_event(state, event);
        ++expected;
        ++count;
    }
    return count;
}

}  // namespace

nlohmann::ordered_json to_json(const ConfigFingerprint& fingerprint) {
    nlohmann::ordered_json json;
    json["recency_window"] = fingerprint.recency_window;
    json["similar_memories"] = fingerprint.similar_memories;
    json["node_threshold"] = fingerprint.node_threshold;
    json["relation_threshold"] = fingerprint.relation_threshold;
    json["embedding_dimension"] = fingerprint.embedding_dimension;
    json["embedder"] = fingerprint.embedder;
    return json;
}

ConfigFingerprint fingerprint_from_json(const nlohmann::json& json) {
    ConfigFingerprint fingerprint;
    fingerprint.recency_window = json.at("recency_window").get<std::size_t>();
    fingerprint.similar_memories = json.at("similar_memories").get<std::size_t>();
    fingerprint.node_threshold = json.at("node_threshold").get<double>();
    fingerprint.relation_threshold = json.at("relation_threshold").get<double>();
    fingerprint.embedding_dimension = json.at("embedding_dimension").get<std::size_t>();
    fingerprint.embedder = json.at("embedder").get<std::string>();
    return fingerprint;
}

nlohmann::ordered_json to_json(const Snapshot& snapshot) {
    nlohmann::ordered_json json;
    json["schema_version"] = snapshot.schema_version;
    json["fingerprint"] = to_json(snapshot.fingerprint);
    json["covering_sequence"] = snapshot.covering_sequence;
    json["state"] = snapshot.state;
    return json;
}

Snapshot snapshot_from_json(const nlohmann::json& json) {
    Snapshot snapshot;
    try {
        snapshot.schema_version = json.at("schema_version").get<int>();
    } catch (const nlohmann::json::exception& error) {
        fail(ErrorCode::integrity, fmt::format("snapshot lacks a schema version: {}", error.what()));
    }
    if (snapshot.schema_version != kSnapshotSchemaVersion) {
        fail(ErrorCode::unsupported_version, fmt::format("snapshot schema version {} is not supported (expected {})",
                                                         snapshot.schema_version, kSnapshotSchemaVersion));
    }
    try {
        snapshot.fingerprint = fingerprint_from_json(json.at("fingerprint"));
        snapshot.covering_sequence = json.at("covering_sequence").get<std::uint64_t>();
        snapshot.state = json.at("state");
    } catch (const nlohmann::json::exception& error) {
        fail(ErrorCode::integrity, fmt::format("malformed snapshot: {}", error.what()));
    }
    return snapshot;
}

std::string encode_path_component(std::string_view name) {
    require(!name.empty(), ErrorCode::invalid_input, "namespace must not be empty");
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const auto c = static_cast<unsigned char>(name[i]);
        const bool plain = std::isalnum(c) || c == '-' || ((c == '_' || c == '.') && i > 0);
        if (plain) {
            out += static_cast<char>(c);
        } else {
            out += fmt::format("%{:02X}", c);
        }
    }
    return out;
}

std::filesystem::path StoreLayout::namespace_dir(std::string_view ns) const {
    return root_ / encode_path_component(ns);
}

std::filesystem::path StoreLayout::conversation_dir(std::string_view conversation) const {
    return root_ / std::string(kConversations) / encode_path_component(conversation);
}

std::vector<std::string> StoreLayout::namespaces() const {
    return list_dirs(root_);
}

std::vector<std::string> StoreLayout::conversations() const {
    return list_dirs(root_ / std::string(kConversations));
}

std::filesystem::path write_snapshot(const std::filesystem::path& dir, const Snapshot& snapshot) {
    const auto snapshots = dir / "snapshots";
    std::filesystem::create_directories(snapshots);
    const auto target = snapshots / fmt::format("{:020}.json", snapshot.covering_sequence);
    const auto temp = snapshots / fmt::format(".{:020}.json.tmp", snapshot.covering_sequence);
    const auto payload = to_json(snapshot).dump() + "\n";
    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::io, fmt::format("cannot write {}: {}", temp.string(), std::strerror(errno)));
    std::size_t written = 0;
    while (written < payload.size()) {
        const auto n = ::write(fd, payload.data() + written, payload.size() - written);
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) {
            ::close(fd);
            fail(ErrorCode::io, fmt::format("cannot write {}: {}", temp.string(), std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    std::filesystem::rename(temp, target);
    return target;
}

std::optional<Snapshot> latest_snapshot(const std::filesystem::path& dir) {
    const auto snapshots = dir / "snapshots";
    std::error_code ec;
    if (!std::filesystem::is_directory(snapshots, ec)) return std::nullopt;
    std::optional<std::filesystem::path> newest;
    for (const auto& entry : std::filesystem::directory_iterator(snapshots)) {
        const auto name = entry.path().filename().string();
        if (name.empty() || name[0] == '.' || entry.path().extension() != ".json") continue;
        if (!newest || name > newest->filename().string()) newest = entry.path();
    }
    if (!newest) return std::nullopt;
    std::ifstream in(*newest, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    nlohmann::json json;
    try {
        json = nlohmann::json::parse(text.str());
    } catch (const nlohmann::json::exception& error) {
        fail(ErrorCode::integrity, fmt::format("corrupt snapshot {}: {}", newest->string(), error.what()));
    }
    return snapshot_from_json(json);
}

NamespaceState restore_namespace(const Snapshot& snapshot, const std::vector<EventRecord>& events,
                                 std::size_t dimension) {
    auto state = namespace_state_from_json(snapshot.state, dimension);
    replay(state, events, snapshot.covering_sequence);
    return state;
}

Recovered<NamespaceState> recover_namespace(const std::filesystem::path& dir, const std::string& ns,
                                            const ConfigFingerprint& fingerprint, EventLogOptions options) {
    std::vector<EventRecord> events;
    auto log = EventLog::open(dir / "events.jsonl", options, &events);
    auto snapshot = latest_snapshot(dir);
    if (snapshot) {
        check_snapshot(*snapshot, fingerprint, log.last_sequence(), dir);
        auto state = namespace_state_from_json(snapshot->state, fingerprint.embedding_dimension);
        require(state.ns() == ns, ErrorCode::integrity, fmt::format("snapshot in {} belongs to {}", dir.string(), state.ns()));
        const auto replayed = replay(state, events, snapshot->covering_sequence);
        return {std::move(state), std::move(log), replayed, true};
    }
    NamespaceState state(ns, fingerprint.embedding_dimension);
    const auto replayed = replay(state, events, 0);
    return {std::move(state), std::move(log), replayed, false};
}

Recovered<ConversationState> recover_conversation(const std::filesystem::path& dir, const std::string& id,
                                                  const ConfigFingerprint& fingerprint, EventLogOptions options) {
    std::vector<EventRecord> events;
    auto log = EventLog::open(dir / "events.jsonl", options, &events);
    auto snapshot = latest_snapshot(dir);
    ConversationState state;
    state.id = id;
    std::uint64_t after = 0;
    if (snapshot) {
        check_snapshot(*snapshot, fingerprint, log.last_sequence(), dir);
        state = conversation_from_json(snapshot->state);
        after = snapshot->covering_sequence;
    }
    const auto replayed = replay(state, events, after);
    return {std::move(state), std::move(log), replayed, snapshot.has_value()};
}

}  // namespace mnemo
