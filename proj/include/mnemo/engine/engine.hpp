// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mnemo/core/ids.hpp"
#include "mnemo/core/time.hpp"
#include "mnemo/graph/graph_memory.hpp"
#include "mnemo/pipeline/extraction.hpp"
#include "mnemo/pipeline/update.hpp"
#include "mnemo/store/store.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace mnemo {

enum class Attribution {
    /// Facts go to the namespaces (user ids) of the pair's speakers.
    per_speaker,
    /// Everything goes to one namespace named after the conversation.
    shared,
};

std::string_view to_string(Attribution attribution) noexcept;
std::optional<Attribution> parse_attribution(std::string_view name) noexcept;

struct EngineConfig {
    std::size_t recency_window = 10;
    std::size_t similar_memories = 10;
    /// Refresh the summary after every this many pairs (0 disables).
    std::size_t summary_refresh_every = 5;
    bool async_summary = true;
    bool graph_enabled = false;
    GraphSettings graph;
    Attribution attribution = Attribution::per_speaker;
    /// Keep the recency window within the current session.
    bool session_reset = false;
    /// Prefix stored facts with the timestamp of the pair they came from.
    bool stamp_facts = false;
    /// Counter-based ids when set, random UUIDs otherwise.
    std::optional<std::uint64_t> id_seed;
    std::optional<std::filesystem::path> data_dir;
    bool fsync = true;
    /// Write a namespace snapshot after this many new events (0 = on demand only).
    std::size_t snapshot_every = 0;
    /// Upper bound on provider time per ingestion request (0 = none).
    std::chrono::milliseconds deadline{0};
};

struct EngineServices {
    std::shared_ptr<ChatProvider> provider;
    std::shared_ptr<Embedder> embedder;
    /// Defaults to `provider`.
    std::shared_ptr<ChatProvider> summary_provider;
    /// Defaults to the system clock.
    std::shared_ptr<Clock> clock;
    /// Defaults to one derived from EngineConfig::id_seed.
    std::shared_ptr<IdGenerator> ids;
    PromptTemplates templates = PromptTemplates::defaults();
    /// Crash-test hook, see EventLogOptions::after_append.
    std::function<void(const std::filesystem::path&)> after_append;
};

struct IngestRequest {
    std::string conversation_id;
    /// speaker name -> user id (namespace).
    std::map<std::string, std::string> users;
    std::vector<Message> messages;
    /// Pair a trailing unpaired message with the last committed one instead of buffering it.
    bool flush = false;
};

struct PairOutcome {
    std::string previous_id;
    std::string current_id;
    std::vector<std::string> namespaces;
    std::vector<AuditEntry> audit;
    std::size_t edges_added = 0;
    std::size_t edges_invalidated = 0;
};

struct IngestResult {
    std::vector<PairOutcome> pairs;
    /// A message was left waiting for its partner.
    bool buffered = false;
};

struct SearchHit {
    std::string id;
    std::string text;
    double score = 0.0;
    Instant created_at;
    Instant updated_at;
};

struct IngestOptions {
    /// Throw Error(conflict) instead of waiting when another writer holds the conversation.
    bool fail_if_busy = false;
};

class Engine {
public:
    Engine(EngineConfig config, EngineServices services);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const EngineConfig& config() const noexcept { return config_; }
    ConfigFingerprint fingerprint() const;
    Embedder& embedder() const noexcept { return *services_.embedder; }
    ChatProvider& provider() const noexcept { return *services_.provider; }
    const PromptTemplates& templates() const noexcept { return services_.templates; }

    /// Pairs consecutive messages (continuing a buffered one) and ingests
    /// each pair atomically.
    IngestResult ingest(const IngestRequest& request, IngestOptions options = {});
    /// One pair of new messages.
    PairOutcome ingest_pair(const std::string& conversation_id, const std::map<std::string, std::string>& users,
                            const Message& previous, const Message& current, IngestOptions options = {});
    /// Ingests a buffered message paired with the last committed one. No-op
    /// without a buffered message or without a committed partner.
    std::optional<PairOutcome> flush(const std::string& conversation_id,
                                     const std::map<std::string, std::string>& users, IngestOptions options = {});

    /// Requires k >= 1. Unknown namespaces yield no hits.
    std::vector<SearchHit> search(std::string_view query, std::size_t k, const std::string& ns) const;
    std::vector<MemoryRecord> get_all(const std::string& ns) const;
    std::optional<MemoryRecord> get(const std::string& id) const;
    /// External delete through the update executor. Throws Error(not_found).
    void remove(const std::string& id);
    /// Throws Error(not_found) for ids never written.
    std::vector<LineageEntry> history(const std::string& id) const;

    Subgraph graph_entity_search(std::string_view query, const std::string& ns) const;
    std::vector<ScoredEdge> graph_triplet_search(std::string_view query, const std::string& ns,
                                                 double threshold) const;

    /// Snapshot reads; null when absent.
    std::shared_ptr<const NamespaceState> namespace_state(const std::string& ns) const;
    std::shared_ptr<const ConversationState> conversation_state(const std::string& id) const;
    std::vector<std::string> namespaces() const;
    std::vector<std::string> conversations() const;

    /// Regenerates the summary now, on the calling thread.
    void refresh_summary(const std::string& conversation_id);
    /// Blocks until queued summary refreshes have finished.
    void wait_idle();

    /// Writes snapshots of every namespace and conversation (persistent engines only).
    void snapshot_all();
    /// SHA-256 over the digests of every namespace with content, in name order.
    std::string store_digest() const;
    /// store_digest() plus every conversation's state.
    std::string digest() const;

private:
    struct NamespaceSlot {
        std::mutex write;
        mutable std::mutex publish;
        std::shared_ptr<const NamespaceState> state;
        std::unique_ptr<EventLog> log;
        std::size_t events_since_snapshot = 0;
        std::shared_ptr<const NamespaceState> load() const;
        void store(std::shared_ptr<const NamespaceState> next);
    };
    struct ConversationSlot {
        std::mutex write;
        mutable std::mutex publish;
        std::shared_ptr<const ConversationState> state;
        std::unique_ptr<EventLog> log;
        std::shared_ptr<const ConversationState> load() const;
        void store(std::shared_ptr<const ConversationState> next);
    };

    class Deadline;

    void recover();
    EventLogOptions log_options() const { return {config_.fsync, services_.after_append}; }
    std::shared_ptr<NamespaceSlot> namespace_slot(const std::string& ns, bool create) const;
    std::shared_ptr<ConversationSlot> conversation_slot(const std::string& id, bool create) const;
    std::vector<std::string> target_namespaces(const std::string& conversation_id,
                                               const std::map<std::string, std::string>& users,
                                               const Message& previous, const Message& current) const;
    std::unique_lock<std::mutex> lock_conversation(ConversationSlot& slot, const std::string& id,
                                                   IngestOptions options) const;
    PairOutcome run_pair(const std::string& conversation_id, ConversationSlot& conversation,
                         const std::map<std::string, std::string>& users, const Message& previous,
                         const Message& current, bool previous_committed);
    void commit_namespace(NamespaceSlot& slot, std::shared_ptr<NamespaceState> staged, EventBatch& events);
    void buffer_message(ConversationSlot& slot, const Message& message);
    void after_pair(const std::string& conversation_id, std::size_t pair_count);
    std::string next_id();
    void remember_ids(const std::string& ns, const EventBatch& events);
    void summary_worker();

    EngineConfig config_;
    EngineServices services_;

    mutable std::mutex registry_mutex_;
    mutable std::map<std::string, std::shared_ptr<NamespaceSlot>> namespaces_;
    mutable std::map<std::string, std::shared_ptr<ConversationSlot>> conversations_;

    mutable std::mutex id_mutex_;
    std::set<std::string> issued_;
    std::map<std::string, std::string> memory_namespace_;

    std::mutex summary_mutex_;
    std::condition_variable summary_cv_;
    std::condition_variable idle_cv_;
    std::deque<std::string> summary_queue_;
    bool summary_busy_ = false;
    bool stopping_ = false;
    std::thread summary_thread_;
};

}  // namespace mnemo
