// SPDX-License-Identifier: Apache-2.0
#include "mnemo/engine/engine.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>

namespace mnemo {

std::string_view to_string(Attribution attribution) noexcept {
    return attribution == Attribution::per_speaker ? "per_speaker" : "shared";
}

std::optional<Attribution> parse_attribution(std::string_view name) noexcept {
    if (name == "per_speaker") return Attribution::per_speaker;
    if (name == "shared") return Attribution::shared;
    return std::nullopt;
}

/// Provider view that refuses to start or finish a call past the request deadline.
class Engine::Deadline final : public ChatProvider {
public:
    Deadline(ChatProvider& inner, std::chrono::milliseconds budget) : inner_(inner) {
        if (budget.count() > 0) until_ = std::chrono::steady_clock::now() + budget;
    }

private:
    ChatResponse complete(const ChatRequest& request) override {
        check(request);
        auto response = inner_.chat(request);
        check(request);
        return response;
    }

    void check(const ChatRequest& request) const {
        if (until_ && std::chrono::steady_clock::now() > *until_) {
            fail(ErrorCode::deadline_exceeded, fmt::format("request deadline passed during {}", request.purpose));
        }
    }

    ChatProvider& inner_;
    std::optional<std::chrono::steady_clock::time_point> until_;
};

std::shared_ptr<const NamespaceState> Engine::NamespaceSlot::load() const {
    std::lock_guard lock(publish);
    return state;
}

void Engine::NamespaceSlot::store(std::shared_ptr<const NamespaceState> next) {
    std::lock_guard lock(publish);
    state = std::move(next);
}

std::shared_ptr<const ConversationState> Engine::ConversationSlot::load() const {
    std::lock_guard lock(publish);
    return state;
}

void Engine::ConversationSlot::store(std::shared_ptr<const ConversationState> next) {
    std::lock_guard lock(publish);
    state = std::move(next);
}

Engine::Engine(EngineConfig config, EngineServices services) : config_(std::move(config)), services_(std::move(services)) {
    require(services_.provider != nullptr, ErrorCode::invalid_input, "engine needs a chat provider");
    require(services_.embedder != nullptr, ErrorCode::invalid_input, "engine needs an embedder");
    require(config_.recency_window >= 2, ErrorCode::invalid_input, "recency window must be at least 2");
    require(config_.similar_memories >= 1, ErrorCode::invalid_input, "similar_memories must be at least 1");
    if (!services_.summary_provider) services_.summary_provider = services_.provider;
    if (!services_.clock) services_.clock = std::make_shared<SystemClock>();
    if (!services_.ids) {
        if (config_.id_seed) {
            services_.ids = std::make_shared<CounterIdGenerator>(*config_.id_seed);
        } else {
            services_.ids = std::make_shared<RandomIdGenerator>();
        }
    }
    recover();
    if (config_.async_summary) summary_thread_ = std::thread([this] { summary_worker(); });
}

Engine::~Engine() {
    {
        std::lock_guard lock(summary_mutex_);
        stopping_ = true;
    }
    summary_cv_.notify_all();
    if (summary_thread_.joinable()) summary_thread_.join();
}

ConfigFingerprint Engine::fingerprint() const {
    ConfigFingerprint fingerprint;
    fingerprint.recency_window = config_.recency_window;
    fingerprint.similar_memories = config_.similar_memories;
    fingerprint.node_threshold = config_.graph.node_threshold;
    fingerprint.relation_threshold = config_.graph.relation_threshold;
    fingerprint.embedding_dimension = services_.embedder->dimension();
    fingerprint.embedder = services_.embedder->id();
    return fingerprint;
}

void Engine::recover() {
    if (!config_.data_dir) return;
    const StoreLayout layout(*config_.data_dir);
    const auto print = fingerprint();
    const auto options = log_options();
    for (const auto& ns : layout.namespaces()) {
        auto recovered = recover_namespace(layout.namespace_dir(ns), ns, print, options);
        auto slot = std::make_shared<NamespaceSlot>();
        slot->log = std::make_unique<EventLog>(std::move(recovered.log));
        slot->state = std::make_shared<const NamespaceState>(std::move(recovered.state));
        remember_ids(ns, slot->log->read_all());
        namespaces_.emplace(ns, std::move(slot));
        spdlog::info("recovered namespace {} ({} events replayed{})", ns, recovered.replayed,
                     recovered.from_snapshot ? " after snapshot" : "");
    }
    for (const auto& id : layout.conversations()) {
        auto recovered = recover_conversation(layout.conversation_dir(id), id, print, options);
        auto slot = std::make_shared<ConversationSlot>();
        slot->log = std::make_unique<EventLog>(std::move(recovered.log));
        slot->state = std::make_shared<const ConversationState>(std::move(recovered.state));
        conversations_.emplace(id, std::move(slot));
    }
}

std::shared_ptr<Engine::NamespaceSlot> Engine::namespace_slot(const std::string& ns, bool create) const {
    std::lock_guard lock(registry_mutex_);
    auto it = namespaces_.find(ns);
    if (it != namespaces_.end()) return it->second;
    if (!create) return nullptr;
    require(!ns.empty(), ErrorCode::invalid_input, "namespace must not be empty");
    auto slot = std::make_shared<NamespaceSlot>();
    if (config_.data_dir) {
        auto recovered = recover_namespace(StoreLayout(*config_.data_dir).namespace_dir(ns), ns, fingerprint(),
                                           log_options());
        slot->log = std::make_unique<EventLog>(std::move(recovered.log));
        slot->state = std::make_shared<const NamespaceState>(std::move(recovered.state));
    } else {
        slot->log = std::make_unique<EventLog>(EventLog::in_memory());
        slot->state = std::make_shared<const NamespaceState>(ns, services_.embedder->dimension());
    }
    namespaces_.emplace(ns, slot);
    return slot;
}

std::shared_ptr<Engine::ConversationSlot> Engine::conversation_slot(const std::string& id, bool create) const {
    std::lock_guard lock(registry_mutex_);
    auto it = conversations_.find(id);
    if (it != conversations_.end()) return it->second;
    if (!create) return nullptr;
    require(!id.empty(), ErrorCode::invalid_input, "conversation_id must not be empty");
    auto slot = std::make_shared<ConversationSlot>();
    if (config_.data_dir) {
        auto recovered = recover_conversation(StoreLayout(*config_.data_dir).conversation_dir(id), id, fingerprint(),
                                              log_options());
        slot->log = std::make_unique<EventLog>(std::move(recovered.log));
        slot->state = std::make_shared<const ConversationState>(std::move(recovered.state));
    } else {
        auto state = std::make_shared<ConversationState>();
        state->id = id;
        slot->log = std::make_unique<EventLog>(EventLog::in_memory());
        slot->state = std::move(state);
    }
    conversations_.emplace(id, slot);
    return slot;
}

std::vector<std::string> Engine::target_namespaces(const std::string& conversation_id,
                                                   const std::map<std::string, std::string>& users,
                                                   const Message& previous, const Message& current) const {
    std::set<std::string> targets;
    if (config_.attribution == Attribution::per_speaker && !users.empty()) {
        for (const auto* message : {&previous, &current}) {
            auto it = users.find(message->speaker);
            if (it != users.end()) targets.insert(it->second);
        }
        if (targets.empty()) {
            for (const auto& [speaker, user] : users) targets.insert(user);
        }
    } else {
        targets.insert(conversation_id);
    }
    return {targets.begin(), targets.end()};
}

std::unique_lock<std::mutex> Engine::lock_conversation(ConversationSlot& slot, const std::string& id,
                                                       IngestOptions options) const {
    if (!options.fail_if_busy) return std::unique_lock(slot.write);
    std::unique_lock lock(slot.write, std::try_to_lock);
    if (!lock.owns_lock()) fail(ErrorCode::conflict, fmt::format("conversation {} is being written by another request", id));
    return lock;
}

std::string Engine::next_id() {
    std::lock_guard lock(id_mutex_);
    for (;;) {
        auto id = services_.ids->next();
        if (issued_.insert(id).second) return id;
    }
}

void Engine::remember_ids(const std::string& ns, const EventBatch& events) {
    std::lock_guard lock(id_mutex_);
    for (const auto& event : events) {
        if (event.kind != EventKind::memory_add && event.kind != EventKind::node_add && event.kind != EventKind::edge_add) {
            continue;
        }
        const auto id = event.body.at("id").get<std::string>();
        issued_.insert(id);
        if (event.kind == EventKind::memory_add) memory_namespace_[id] = ns;
    }
}

void Engine::commit_namespace(NamespaceSlot& slot, std::shared_ptr<NamespaceState> staged, EventBatch& events) {
    if (events.empty()) return;
    slot.log->append(events);
    staged->sequence = slot.log->last_sequence();
    remember_ids(staged->ns(), events);
    slot.events_since_snapshot += events.size();
    const bool snapshot_due = config_.snapshot_every > 0 && config_.data_dir &&
                              slot.events_since_snapshot >= config_.snapshot_every;
    if (snapshot_due) {
        write_snapshot(StoreLayout(*config_.data_dir).namespace_dir(staged->ns()),
                       Snapshot{kSnapshotSchemaVersion, fingerprint(), staged->sequence, to_json(*staged)});
        slot.events_since_snapshot = 0;
    }
    slot.store(std::move(staged));
}

PairOutcome Engine::run_pair(const std::string& conversation_id, ConversationSlot& conversation,
                             const std::map<std::string, std::string>& users, const Message& previous,
                             const Message& current, bool previous_committed) {
    const auto conversation_state = conversation.load();
    const auto base = conversation_state->messages.size();

    PairOutcome outcome;
    outcome.previous_id = conversation_state->message_id(previous_committed ? base - 1 : base);
    outcome.current_id = conversation_state->message_id(previous_committed ? base : base + 1);
    outcome.namespaces = target_namespaces(conversation_id, users, previous, current);

    std::vector<std::shared_ptr<NamespaceSlot>> slots;
    std::vector<std::unique_lock<std::mutex>> locks;
    for (const auto& ns : outcome.namespaces) {
        slots.push_back(namespace_slot(ns, true));
        locks.emplace_back(slots.back()->write);
    }

    Deadline provider(*services_.provider, config_.deadline);
    const ExtractionWindow window{config_.recency_window, config_.session_reset};
    const auto stamp = config_.stamp_facts ? current.timestamp : std::string();
    const auto pair_text = render_message(previous) + "\n" + render_message(current);

    std::vector<std::shared_ptr<NamespaceState>> staged;
    std::vector<EventBatch> batches(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const auto& ns = outcome.namespaces[i];
        staged.push_back(std::make_shared<NamespaceState>(*slots[i]->load()));
        auto& state = *staged.back();
        const auto prompt =
            build_extraction_prompt(*conversation_state, previous, current, window, services_.templates, ns);
        const auto facts = extract_facts(provider, prompt, {outcome.previous_id, outcome.current_id},
                                         services_.clock->now());
        MemoryWriter writer({provider, *services_.embedder, *services_.clock, services_.templates,
                             [this] { return next_id(); }, config_.similar_memories},
                            state.memories, batches[i]);
        for (const auto& fact : facts) outcome.audit.push_back(writer.classify_and_execute(fact, stamp));

        if (config_.graph_enabled) {
            GraphWriter graph({provider, *services_.embedder, *services_.clock, services_.templates,
                               [this] { return next_id(); }, config_.graph},
                              state.graph, batches[i]);
            for (const auto& result : graph.ingest(pair_text, {outcome.previous_id, outcome.current_id})) {
                outcome.edges_added += result.created ? 1 : 0;
                outcome.edges_invalidated += result.invalidated.size();
            }
        }
    }

    for (std::size_t i = 0; i < slots.size(); ++i) commit_namespace(*slots[i], staged[i], batches[i]);

    auto next_conversation = std::make_shared<ConversationState>(*conversation_state);
    EventBatch conversation_events;
    const auto now = services_.clock->now();
    if (!previous_committed) conversation_events.push_back(message_append_event(previous, now, false, false));
    conversation_events.push_back(message_append_event(current, now, false, true));
    for (const auto& event : conversation_events) apply_event(*next_conversation, event);
    conversation.log->append(conversation_events);
    conversation.store(std::move(next_conversation));
    return outcome;
}

void Engine::buffer_message(ConversationSlot& slot, const Message& message) {
    auto next = std::make_shared<ConversationState>(*slot.load());
    EventBatch events{message_append_event(message, services_.clock->now(), true, false)};
    apply_event(*next, events.front());
    slot.log->append(events);
    slot.store(std::move(next));
}

namespace {

void check_order(const ConversationState& state, const std::vector<Message>& messages) {
    std::optional<Instant> last;
    if (state.pending) {
        last = state.pending->at;
    } else if (!state.messages.empty()) {
        last = state.messages.back().at;
    }
    for (const auto& message : messages) {
        require(!message.text.empty(), ErrorCode::invalid_input, "message text must not be empty");
        if (last) {
            require(message.at >= *last, ErrorCode::invalid_input,
                    fmt::format("message at {} precedes the previous message at {}", message.timestamp,
                                format_instant(*last)));
        }
        last = message.at;
    }
}

}  // namespace

IngestResult Engine::ingest(const IngestRequest& request, IngestOptions options) {
    require(!request.conversation_id.empty(), ErrorCode::invalid_input, "conversation_id must not be empty");
    require(!request.messages.empty() || request.flush, ErrorCode::invalid_input, "messages must not be empty");
    auto slot = conversation_slot(request.conversation_id, true);
    IngestResult result;
    std::vector<std::size_t> pair_counts;
    {
        auto lock = lock_conversation(*slot, request.conversation_id, options);
        check_order(*slot->load(), request.messages);

        std::size_t i = 0;
        auto pending = slot->load()->pending;
        while (i < request.messages.size()) {
            if (pending) {
                result.pairs.push_back(run_pair(request.conversation_id, *slot, request.users, *pending,
                                                request.messages[i], false));
                pending.reset();
                i += 1;
            } else if (i + 1 < request.messages.size()) {
                result.pairs.push_back(run_pair(request.conversation_id, *slot, request.users, request.messages[i],
                                                request.messages[i + 1], false));
                i += 2;
            } else {
                buffer_message(*slot, request.messages[i]);
                pending = request.messages[i];
                i += 1;
                break;
            }
            pair_counts.push_back(slot->load()->pair_count);
        }
        const auto state = slot->load();
        if (request.flush && state->pending && !state->messages.empty()) {
            result.pairs.push_back(run_pair(request.conversation_id, *slot, request.users, state->messages.back(),
                                            *state->pending, true));
            pair_counts.push_back(slot->load()->pair_count);
        }
        result.buffered = slot->load()->pending.has_value();
    }
    for (auto count : pair_counts) after_pair(request.conversation_id, count);
    return result;
}

PairOutcome Engine::ingest_pair(const std::string& conversation_id, const std::map<std::string, std::string>& users,
                                const Message& previous, const Message& current, IngestOptions options) {
    auto slot = conversation_slot(conversation_id, true);
    PairOutcome outcome;
    std::size_t count = 0;
    {
        auto lock = lock_conversation(*slot, conversation_id, options);
        const auto state = slot->load();
        std::optional<Instant> last;
        if (!state->messages.empty()) last = state->messages.back().at;
        require(!last || previous.at >= *last, ErrorCode::invalid_input, "pair precedes the conversation history");
        require(current.at >= previous.at, ErrorCode::invalid_input, "pair timestamps are out of order");
        outcome = run_pair(conversation_id, *slot, users, previous, current, false);
        count = slot->load()->pair_count;
    }
    after_pair(conversation_id, count);
    return outcome;
}

std::optional<PairOutcome> Engine::flush(const std::string& conversation_id,
                                         const std::map<std::string, std::string>& users, IngestOptions options) {
    auto slot = conversation_slot(conversation_id, false);
    if (!slot) return std::nullopt;
    std::optional<PairOutcome> outcome;
    std::size_t count = 0;
    {
        auto lock = lock_conversation(*slot, conversation_id, options);
        const auto state = slot->load();
        if (!state->pending) return std::nullopt;
        if (state->messages.empty()) {
            spdlog::info("conversation {} holds a single message; nothing to pair it with yet", conversation_id);
            return std::nullopt;
        }
        outcome = run_pair(conversation_id, *slot, users, state->messages.back(), *state->pending, true);
        count = slot->load()->pair_count;
    }
    after_pair(conversation_id, count);
    return outcome;
}

void Engine::after_pair(const std::string& conversation_id, std::size_t pair_count) {
    if (config_.summary_refresh_every == 0 || pair_count == 0 || pair_count % config_.summary_refresh_every != 0) {
        return;
    }
    if (!config_.async_summary) {
        refresh_summary(conversation_id);
        return;
    }
    {
        std::lock_guard lock(summary_mutex_);
        if (std::find(summary_queue_.begin(), summary_queue_.end(), conversation_id) == summary_queue_.end()) {
            summary_queue_.push_back(conversation_id);
        }
    }
    summary_cv_.notify_one();
}

void Engine::refresh_summary(const std::string& conversation_id) {
    auto slot = conversation_slot(conversation_id, false);
    require(slot != nullptr, ErrorCode::not_found, fmt::format("conversation {} not found", conversation_id));
    const auto snapshot = slot->load();
    std::string summary;
    if (snapshot->messages.empty()) {
        summary = std::string(kEmptySummary);
    } else {
        try {
            const auto response = services_.summary_provider->chat(summary_request(*snapshot, services_.templates));
            summary = response.text.value_or("");
            const auto first = summary.find_first_not_of(" \t\r\n");
            const auto last = summary.find_last_not_of(" \t\r\n");
            summary = first == std::string::npos ? std::string() : summary.substr(first, last - first + 1);
        } catch (const std::exception& error) {
            spdlog::warn("summary refresh for {} failed, keeping the previous summary: {}", conversation_id,
                         error.what());
            return;
        }
        if (summary.empty()) {
            spdlog::warn("summary refresh for {} returned no text, keeping the previous summary", conversation_id);
            return;
        }
    }
    std::lock_guard lock(slot->write);
    auto next = std::make_shared<ConversationState>(*slot->load());
    EventBatch events{summary_set_event(summary, services_.clock->now())};
    apply_event(*next, events.front());
    slot->log->append(events);
    slot->store(std::move(next));
}

void Engine::summary_worker() {
    std::unique_lock lock(summary_mutex_);
    for (;;) {
        summary_cv_.wait(lock, [this] { return stopping_ || !summary_queue_.empty(); });
        if (summary_queue_.empty()) return;
        auto id = std::move(summary_queue_.front());
        summary_queue_.pop_front();
        summary_busy_ = true;
        lock.unlock();
        try {
            refresh_summary(id);
        } catch (const std::exception& error) {
            spdlog::warn("summary refresh for {} failed: {}", id, error.what());
        }
        lock.lock();
        summary_busy_ = false;
        idle_cv_.notify_all();
    }
}

void Engine::wait_idle() {
    std::unique_lock lock(summary_mutex_);
    idle_cv_.wait(lock, [this] { return summary_queue_.empty() && !summary_busy_; });
}

std::vector<SearchHit> Engine::search(std::string_view query, std::size_t k, const std::string& ns) const {
    require(k >= 1, ErrorCode::invalid_input, "k must be at least 1");
    require(query.find_first_not_of(" \t\r\n") != std::string_view::npos, ErrorCode::invalid_input,
            "query must not be empty");
    const auto state = namespace_state(ns);
    if (!state || state->memories.records.empty()) return {};
    const auto embedding = services_.embedder->embed_one(query);
    std::vector<SearchHit> hits;
    for (const auto& hit : state->memories.index.top_k(embedding, k, ns)) {
        const auto* record = state->memories.find(hit.payload);
        if (record == nullptr) continue;
        hits.push_back(SearchHit{record->id, record->text, hit.score, record->created_at, record->updated_at});
    }
    return hits;
}

std::vector<MemoryRecord> Engine::get_all(const std::string& ns) const {
    const auto state = namespace_state(ns);
    return state ? state->memories.all() : std::vector<MemoryRecord>{};
}

std::optional<MemoryRecord> Engine::get(const std::string& id) const {
    std::string ns;
    {
        std::lock_guard lock(id_mutex_);
        auto it = memory_namespace_.find(id);
        if (it == memory_namespace_.end()) return std::nullopt;
        ns = it->second;
    }
    const auto state = namespace_state(ns);
    const auto* record = state ? state->memories.find(id) : nullptr;
    if (record == nullptr) return std::nullopt;
    return *record;
}

void Engine::remove(const std::string& id) {
    std::string ns;
    {
        std::lock_guard lock(id_mutex_);
        auto it = memory_namespace_.find(id);
        require(it != memory_namespace_.end(), ErrorCode::not_found, fmt::format("memory {} not found", id));
        ns = it->second;
    }
    auto slot = namespace_slot(ns, false);
    require(slot != nullptr, ErrorCode::not_found, fmt::format("memory {} not found", id));
    std::lock_guard lock(slot->write);
    auto staged = std::make_shared<NamespaceState>(*slot->load());
    require(staged->memories.find(id) != nullptr, ErrorCode::not_found, fmt::format("memory {} not found", id));
    EventBatch events;
    MemoryWriter writer({*services_.provider, *services_.embedder, *services_.clock, services_.templates,
                         [this] { return next_id(); }, config_.similar_memories},
                        staged->memories, events);
    writer.remove(id, DeleteOrigin::external);
    commit_namespace(*slot, std::move(staged), events);
}

std::vector<LineageEntry> Engine::history(const std::string& id) const {
    std::string ns;
    {
        std::lock_guard lock(id_mutex_);
        auto it = memory_namespace_.find(id);
        require(it != memory_namespace_.end(), ErrorCode::not_found, fmt::format("memory {} not found", id));
        ns = it->second;
    }
    auto slot = namespace_slot(ns, false);
    require(slot != nullptr, ErrorCode::not_found, fmt::format("memory {} not found", id));
    std::vector<EventRecord> events;
    {
        std::lock_guard lock(slot->write);
        events = slot->log->read_all();
    }
    auto lineage = memory_lineage(events, id);
    require(!lineage.empty(), ErrorCode::not_found, fmt::format("memory {} not found", id));
    return lineage;
}

Subgraph Engine::graph_entity_search(std::string_view query, const std::string& ns) const {
    const auto state = namespace_state(ns);
    if (!state) return {};
    return retrieve_entity_centric(*services_.provider, *services_.embedder, services_.templates, state->graph, query,
                                   config_.graph);
}

std::vector<ScoredEdge> Engine::graph_triplet_search(std::string_view query, const std::string& ns,
                                                     double threshold) const {
    require(threshold >= -1.0 && threshold <= 1.0, ErrorCode::invalid_input, "threshold must lie in [-1, 1]");
    const auto state = namespace_state(ns);
    if (!state) return {};
    return retrieve_semantic_triplets(*services_.embedder, state->graph, query, threshold);
}

std::shared_ptr<const NamespaceState> Engine::namespace_state(const std::string& ns) const {
    auto slot = namespace_slot(ns, false);
    return slot ? slot->load() : nullptr;
}

std::shared_ptr<const ConversationState> Engine::conversation_state(const std::string& id) const {
    auto slot = conversation_slot(id, false);
    return slot ? slot->load() : nullptr;
}

std::vector<std::string> Engine::namespaces() const {
    std::lock_guard lock(registry_mutex_);
    std::vector<std::string> out;
    for (const auto& [name, slot] : namespaces_) out.push_back(name);
    return out;
}

std::vector<std::string> Engine::conversations() const {
    std::lock_guard lock(registry_mutex_);
    std::vector<std::string> out;
    for (const auto& [name, slot] : conversations_) out.push_back(name);
    return out;
}

void Engine::snapshot_all() {
    require(config_.data_dir.has_value(), ErrorCode::invalid_input, "snapshots need a data directory");
    const StoreLayout layout(*config_.data_dir);
    for (const auto& ns : namespaces()) {
        auto slot = namespace_slot(ns, false);
        std::lock_guard lock(slot->write);
        const auto state = slot->load();
        write_snapshot(layout.namespace_dir(ns),
                       Snapshot{kSnapshotSchemaVersion, fingerprint(), slot->log->last_sequence(), to_json(*state)});
        slot->events_since_snapshot = 0;
    }
    for (const auto& id : conversations()) {
        auto slot = conversation_slot(id, false);
        std::lock_guard lock(slot->write);
        const auto state = slot->load();
        write_snapshot(layout.conversation_dir(id),
                       Snapshot{kSnapshotSchemaVersion, fingerprint(), slot->log->last_sequence(), to_json(*state)});
    }
}

std::string Engine::store_digest() const {
    std::string combined;
    for (const auto& ns : namespaces()) {
        const auto state = namespace_state(ns);
        if (state->memories.records.empty() && state->graph.nodes.empty() && state->sequence == 0) continue;
        combined += fmt::format("namespace {} {}\n", ns, state_digest(*state));
    }
    return sha256_hex(combined);
}

std::string Engine::digest() const {
    std::string combined = store_digest() + "\n";
    for (const auto& id : conversations()) {
        const auto state = conversation_state(id);
        // a request that failed before committing leaves an empty slot behind
        if (state->messages.empty() && !state->pending && state->summary.empty()) continue;
        combined += fmt::format("conversation {} {}\n", id, state_digest(*state));
    }
    return sha256_hex(combined);
}

}  // namespace mnemo
