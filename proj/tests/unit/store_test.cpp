// SPDX-License-Identifier: Apache-2.0
#include "mnemo/store/store.hpp"
#include "support/fake_model.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace mnemo;
using namespace mnemo::testing;

namespace {

EventRecord add(const std::string& id, const std::string& text) {
    return memory_add_event(id, text, hash_embed(text, 16), ts("2024-01-01T00:00:00Z"));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_raw(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::io;
}

}  // namespace

TEST(EventLogTest, AssignsSequencesAndCommitMarkers) {
    auto log = EventLog::in_memory();
    EventBatch batch{add("a", "x"), add("b", "y")};
    log.append(batch);
    EXPECT_EQ(batch[0].sequence, 1u);
    EXPECT_EQ(batch[1].sequence, 2u);
    EXPECT_FALSE(batch[0].commit);
    EXPECT_TRUE(batch[1].commit);
    EventBatch bad{add("c", "z")};
    bad[0].sequence = 9;
    EXPECT_EQ(code_of([&] { log.append(bad); }), ErrorCode::integrity);
    EXPECT_EQ(log.read_all().size(), 2u);
}

TEST(EventLogTest, ReopenRecoversCommittedEvents) {
    TempDir dir;
    const auto path = dir.path() / "events.jsonl";
    {
        auto log = EventLog::open(path, EventLogOptions{.fsync = false});
        EventBatch one{add("a", "x")};
        EventBatch two{add("b", "y"), add("c", "z")};
        log.append(one);
        log.append(two);
    }
    std::vector<EventRecord> recovered;
    auto log = EventLog::open(path, EventLogOptions{.fsync = false}, &recovered);
    ASSERT_EQ(recovered.size(), 3u);
    EXPECT_EQ(log.last_sequence(), 3u);
}

TEST(EventLogTest, UncommittedAndTornTailsAreTruncated) {
    TempDir dir;
    const auto path = dir.path() / "events.jsonl";
    {
        auto log = EventLog::open(path, EventLogOptions{.fsync = false});
        EventBatch one{add("a", "x")};
        log.append(one);
    }
    const auto committed = slurp(path);
    // an uncommitted event followed by half a line
    auto pending = add("b", "y");
    pending.sequence = 2;
    write_raw(path, committed + to_json(pending).dump() + "\n" + "{\"seq\":3,\"at");
    std::vector<EventRecord> recovered;
    auto log = EventLog::open(path, EventLogOptions{.fsync = false}, &recovered);
    EXPECT_EQ(recovered.size(), 1u);
    EXPECT_EQ(slurp(path), committed);
    EventBatch next{add("c", "z")};
    log.append(next);
    EXPECT_EQ(next[0].sequence, 2u);
}

TEST(EventLogTest, CorruptionBeforeTailIsIntegrityError) {
    const auto line = [](std::uint64_t seq, bool commit) {
        auto event = add("id" + std::to_string(seq), "t");
        event.sequence = seq;
        event.commit = commit;
        return to_json(event).dump() + "\n";
    };
    EXPECT_EQ(parse_event_log(line(1, true) + line(2, true)).events.size(), 2u);
    EXPECT_EQ(code_of([&] { parse_event_log(line(1, true) + "garbage\n" + line(2, true)); }), ErrorCode::integrity);
    EXPECT_EQ(code_of([&] { parse_event_log(line(1, true) + line(3, true)); }), ErrorCode::integrity);
    const auto torn = parse_event_log(line(1, true) + "{\"seq\"");
    EXPECT_EQ(torn.events.size(), 1u);
    EXPECT_EQ(torn.committed_bytes, line(1, true).size());
}

TEST(Layout, EncodesNamespaces) {
    EXPECT_EQ(encode_path_component("alice"), "alice");
    EXPECT_EQ(encode_path_component("a/b"), "a%2Fb");
    EXPECT_EQ(encode_path_component("_conversations"), "%5Fconversations");
    EXPECT_EQ(encode_path_component(".."), "%2E.");
    TempDir dir;
    StoreLayout layout(dir.path());
    std::filesystem::create_directories(layout.namespace_dir("x/y"));
    std::filesystem::create_directories(layout.conversation_dir("c1"));
    EXPECT_EQ(layout.namespaces(), (std::vector<std::string>{"x/y"}));
    EXPECT_EQ(layout.conversations(), (std::vector<std::string>{"c1"}));
}

TEST(Snapshots, VersionAndFingerprintChecks) {
    Snapshot snapshot;
    snapshot.fingerprint.embedding_dimension = 16;
    snapshot.fingerprint.embedder = "hash-16";
    snapshot.state = {{"x", 1}};
    auto json = to_json(snapshot);
    EXPECT_EQ(snapshot_from_json(json).fingerprint, snapshot.fingerprint);
    json["schema_version"] = 99;
    EXPECT_EQ(code_of([&] { snapshot_from_json(json); }), ErrorCode::unsupported_version);
}

TEST(Snapshots, LatestWinsAndRecoveryReplaysTail) {
    TempDir dir;
    ConfigFingerprint fingerprint;
    fingerprint.embedding_dimension = 16;
    fingerprint.embedder = HashEmbedder(16).id();
    NamespaceState state("alice", 16);
    {
        auto recovered = recover_namespace(dir.path(), "alice", fingerprint, EventLogOptions{.fsync = false});
        EventBatch batch{add("a", "x"), add("b", "y")};
        recovered.log.append(batch);
        for (const auto& event : batch) apply_event(state, event);
        state.sequence = 2;
        Snapshot snapshot;
        snapshot.fingerprint = fingerprint;
        snapshot.covering_sequence = 2;
        snapshot.state = to_json(state);
        write_snapshot(dir.path(), snapshot);
        EventBatch more{add("c", "z")};
        recovered.log.append(more);
        apply_event(state, more[0]);
        state.sequence = 3;
    }
    auto recovered = recover_namespace(dir.path(), "alice", fingerprint, EventLogOptions{.fsync = false});
    EXPECT_TRUE(recovered.from_snapshot);
    EXPECT_EQ(recovered.replayed, 1u);
    EXPECT_EQ(state_digest(recovered.state), state_digest(state));

    auto other = fingerprint;
    other.similar_memories = 4;
    EXPECT_EQ(code_of([&] { recover_namespace(dir.path(), "alice", other, EventLogOptions{.fsync = false}); }), ErrorCode::config_mismatch);
}

TEST(Snapshots, SnapshotBeyondLogIsIntegrityError) {
    TempDir dir;
    ConfigFingerprint fingerprint;
    fingerprint.embedding_dimension = 16;
    Snapshot snapshot;
    snapshot.fingerprint = fingerprint;
    snapshot.covering_sequence = 5;
    snapshot.state = to_json(NamespaceState("alice", 16));
    write_snapshot(dir.path(), snapshot);
    EXPECT_EQ(code_of([&] { recover_namespace(dir.path(), "alice", fingerprint, EventLogOptions{.fsync = false}); }), ErrorCode::integrity);
}

TEST(Lineage, FollowsOneId) {
    std::vector<EventRecord> events{add("a", "x"), add("b", "y"),
                                    memory_update_event("a", "x2", "x", hash_embed("x2", 16), ts("2024-01-02T00:00:00Z")),
                                    memory_delete_event("a", "x2", DeleteOrigin::external, ts("2024-01-03T00:00:00Z"))};
    const auto lineage = memory_lineage(events, "a");
    ASSERT_EQ(lineage.size(), 3u);
    EXPECT_EQ(lineage[1].text, "x2");
    EXPECT_EQ(lineage[2].op, MemoryOp::remove);
    EXPECT_TRUE(memory_lineage(events, "zzz").empty());
}

TEST(Digest, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
