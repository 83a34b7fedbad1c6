// SPDX-License-Identifier: Apache-2.0
#include "mnemo/core/error.hpp"
#include "mnemo/index/vector_index.hpp"
#include "oracles/exhaustive_scan.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace mnemo;

namespace {

EmbeddingVector vec(std::vector<double> values) { return EmbeddingVector(std::move(values)); }

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal;
    std::vector<double> v(dim);
    double norm = 0;
    for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    for (auto& x : v) x /= std::sqrt(norm);
    return v;
}

std::vector<std::string> ids_of(const std::vector<ScoredHit>& hits) {
    std::vector<std::string> out;
    for (const auto& hit : hits) out.push_back(hit.id);
    return out;
}

}  // namespace

TEST(Cosine, Basics) {
    EXPECT_DOUBLE_EQ(cosine(vec({1, 0}), vec({1, 0})), 1.0);
    EXPECT_DOUBLE_EQ(cosine(vec({1, 0}), vec({-1, 0})), -1.0);
    EXPECT_NEAR(cosine(vec({1, 0}), vec({0, 3})), 0.0, 1e-15);
    EXPECT_THROW(cosine(vec({1, 0}), vec({1, 0, 0})), Error);
    EXPECT_THROW(cosine(vec({0, 0}), vec({1, 0})), Error);
}

TEST(VectorIndexTest, TiesBreakByInsertionThenId) {
    VectorIndex index(2);
    index.upsert({"b", vec({1, 0}), "ns", ""});
    index.upsert({"a", vec({2, 0}), "ns", ""});  // same direction, later
    index.upsert({"c", vec({0, 1}), "ns", ""});
    EXPECT_EQ(ids_of(index.top_k(vec({1, 0}), 3, "ns")), (std::vector<std::string>{"b", "a", "c"}));
    // re-upsert keeps the original rank
    index.upsert({"b", vec({1, 0}), "ns", "p"});
    EXPECT_EQ(ids_of(index.top_k(vec({1, 0}), 2, "ns")), (std::vector<std::string>{"b", "a"}));
    EXPECT_EQ(index.top_k(vec({1, 0}), 1, "ns")[0].payload, "p");
}

TEST(VectorIndexTest, NamespacesAreIsolated) {
    VectorIndex index(2);
    index.upsert({"x", vec({1, 0}), "one", ""});
    index.upsert({"y", vec({1, 0}), "two", ""});
    EXPECT_EQ(ids_of(index.top_k(vec({1, 0}), 5, "one")), (std::vector<std::string>{"x"}));
    EXPECT_TRUE(index.top_k(vec({1, 0}), 5, "three").empty());
    EXPECT_EQ(index.size(), 2u);
    EXPECT_EQ(index.size("two"), 1u);
}

TEST(VectorIndexTest, RemoveAndValidation) {
    VectorIndex index(2);
    index.upsert({"x", vec({1, 0}), "ns", ""});
    EXPECT_TRUE(index.remove("x", "ns"));
    EXPECT_FALSE(index.remove("x", "ns"));
    EXPECT_FALSE(index.contains("x", "ns"));
    EXPECT_THROW(index.top_k(vec({1, 0}), 0, "ns"), Error);
    EXPECT_THROW(index.upsert({"z", vec({1, 0, 0}), "ns", ""}), Error);
    EXPECT_THROW(index.top_k(vec({1, 0, 0}), 1, "ns"), Error);
}

TEST(VectorIndexTest, CopiesDoNotShareWrites) {
    VectorIndex index(2);
    index.upsert({"x", vec({1, 0}), "ns", ""});
    VectorIndex copy = index;
    copy.upsert({"y", vec({0, 1}), "ns", ""});
    copy.remove("x", "ns");
    EXPECT_EQ(index.ids("ns"), (std::vector<std::string>{"x"}));
    EXPECT_EQ(copy.ids("ns"), (std::vector<std::string>{"y"}));
}

TEST(VectorIndexTest, ScanHonorsThreshold) {
    VectorIndex index(2);
    index.upsert({"x", vec({1, 0}), "ns", ""});
    index.upsert({"y", vec({1, 1}), "ns", ""});
    index.upsert({"z", vec({-1, 0}), "ns", ""});
    EXPECT_EQ(ids_of(index.scan(vec({1, 0}), "ns", 0.5)), (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(index.scan(vec({1, 0}), "ns", -1.0).size(), 3u);
}

TEST(VectorIndexTest, MatchesExhaustiveScanOnRandomData) {
    std::mt19937_64 rng(1234);
    const std::size_t dim = 16;
    VectorIndex index(dim);
    std::vector<oracle::Item> items;
    for (std::size_t i = 0; i < 500; ++i) {
        auto v = random_unit(rng, dim);
        const auto id = "m" + std::to_string(i);
        index.upsert({id, EmbeddingVector(v), "ns", ""});
        items.push_back({id, v, i});
    }
    for (int q = 0; q < 30; ++q) {
        const auto query = random_unit(rng, dim);
        for (const std::size_t k : {1u, 5u, 10u}) {
            EXPECT_EQ(ids_of(index.top_k(EmbeddingVector(query), k, "ns")), oracle::ranked(items, query, k));
        }
    }
}

TEST(ConcurrentIndex, ReadersSeeConsistentSnapshots) {
    ConcurrentVectorIndex index(2);
    std::atomic<bool> done{false};
    std::thread writer([&] {
        for (int i = 0; i < 200; ++i) index.upsert({"id" + std::to_string(i), vec({1, double(i)}), "ns", ""});
        done = true;
    });
    std::size_t last = 0;
    while (!done) {
        const auto snapshot = index.snapshot();
        const auto size = snapshot->size("ns");
        EXPECT_GE(size, last);
        last = size;
    }
    writer.join();
    EXPECT_EQ(index.snapshot()->size("ns"), 200u);
}
