// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/store/event_log.hpp"
#include "mnemo/store/state.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace mnemo {

inline constexpr int kSnapshotSchemaVersion = 1;

/// Settings whose drift would silently change stored state.
struct ConfigFingerprint {
    std::size_t recency_window = 10;
    std::size_t similar_memories = 10;
    double node_threshold = 0.9;
    double relation_threshold = 0.9;
    std::size_t embedding_dimension = 0;
    std::string embedder;

    friend bool operator==(const ConfigFingerprint&, const ConfigFingerprint&) = default;
};

nlohmann::ordered_json to_json(const ConfigFingerprint& fingerprint);
ConfigFingerprint fingerprint_from_json(const nlohmann::json& json);

struct Snapshot {
    int schema_version = kSnapshotSchemaVersion;
    ConfigFingerprint fingerprint;
    std::uint64_t covering_sequence = 0;
    nlohmann::ordered_json state;
};

nlohmann::ordered_json to_json(const Snapshot& snapshot);
/// Throws Error(unsupported_version) for another schema version.
Snapshot snapshot_from_json(const nlohmann::json& json);

/// Escapes a namespace into one path component. Names starting with '_'
/// or '.' are escaped so they cannot collide with reserved directories.
std::string encode_path_component(std::string_view name);

/// On-disk layout:
///   <root>/<namespace>/events.jsonl
///   <root>/<namespace>/snapshots/<seq>.json
///   <root>/_conversations/<conversation>/...
class StoreLayout {
public:
    explicit StoreLayout(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path namespace_dir(std::string_view ns) const;
    std::filesystem::path conversation_dir(std::string_view conversation) const;
    /// Decoded namespace names that have a directory.
    std::vector<std::string> namespaces() const;
    std::vector<std::string> conversations() const;

private:
    std::filesystem::path root_;
};

/// Writes <dir>/snapshots/<covering>.json atomically (temp file + rename).
std::filesystem::path write_snapshot(const std::filesystem::path& dir, const Snapshot& snapshot);
/// Newest snapshot in <dir>/snapshots, if any.
std::optional<Snapshot> latest_snapshot(const std::filesystem::path& dir);

template <typename State>
struct Recovered {
    State state;
    EventLog log;
    std::size_t replayed = 0;
    bool from_snapshot = false;
};

/// Opens the namespace log under `dir`, restores the newest snapshot (its
/// fingerprint must equal `fingerprint`, else Error(config_mismatch)) and
/// replays the events it does not cover.
Recovered<NamespaceState> recover_namespace(const std::filesystem::path& dir, const std::string& ns,
                                            const ConfigFingerprint& fingerprint, EventLogOptions options = {});
Recovered<ConversationState> recover_conversation(const std::filesystem::path& dir, const std::string& id,
                                                  const ConfigFingerprint& fingerprint, EventLogOptions options = {});

/// Restores state from a snapshot plus the events after it. Any event
/// whose sequence does not continue the snapshot is an integrity error and
/// nothing is returned.
NamespaceState restore_namespace(const Snapshot& snapshot, const std::vector<EventRecord>& events,
                                 std::size_t dimension);

}  // namespace mnemo
