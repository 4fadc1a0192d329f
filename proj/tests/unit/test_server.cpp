#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "pqe/baselines.hpp"
#include "pqe/server.hpp"

namespace {

using namespace pqe;

struct Rig {
    explicit Rig(ServerStrategy strategy = ServerStrategy::eager, std::uint32_t chop = 16)
        : server(skiplist, elim, ServerConfig{strategy, chop}) {}

    void seed_parallel(std::initializer_list<Key> keys) {
        LevelGenerator levels(3);
        for (Key k : keys) ASSERT_TRUE(skiplist.add_par(k, 0, levels));
    }

    DualSkiplist skiplist{4};
    EliminationArray elim{4};
    Server server;
};

constexpr std::uint32_t kStamp = 0x01000001;

TEST(ServeEager, RemoveRequestAnsweredWithMinimum) {
    Rig r;
    r.seed_parallel({4});
    r.elim.store(2, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
    const auto stats = r.server.serve_once();
    EXPECT_EQ(stats.removes_served, 1u);
    EXPECT_EQ(r.elim.load(2), (SlotWord{4, 0}));
    EXPECT_TRUE(r.skiplist.live_keys().empty());
}

TEST(ServeEager, PostedAddInsertedThenTaken) {
    Rig r;
    AuditLog audit;
    r.server.set_audit(&audit);
    r.elim.store(1, {}, SlotWord{6, kStamp}, nullptr);
    const auto stats = r.server.serve_once();
    EXPECT_EQ(stats.adds_served, 1u);
    EXPECT_EQ(r.elim.load(1), (SlotWord{opcode::kTaken, 0}));
    EXPECT_EQ(r.skiplist.live_keys(), (std::vector<Key>{6}));
    ASSERT_EQ(audit.transitions.size(), 2u);
    EXPECT_TRUE(audit.transitions[0].to.is_in_progress());
    EXPECT_TRUE(audit.transitions[1].to.is_taken());
}

TEST(ServeEager, EmptyQueueRepliesMaxInt) {
    Rig r;
    r.elim.store(0, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
    r.server.serve_once();
    EXPECT_EQ(r.elim.load(0), (SlotWord{kMaxInt, 0}));
}

TEST(ServeEager, SkipsResponsesAndTakenSlots) {
    Rig r;
    r.elim.store(0, {}, SlotWord{9, 0}, nullptr);
    r.elim.store(1, {}, SlotWord{opcode::kTaken, 0}, nullptr);
    const auto stats = r.server.serve_once();
    EXPECT_TRUE(stats.idle());
    EXPECT_EQ(r.elim.load(0), (SlotWord{9, 0}));
    EXPECT_EQ(r.elim.load(1), (SlotWord{opcode::kTaken, 0}));
}

TEST(ServePolicy, ChopsAfterIdleScans) {
    Rig r(ServerStrategy::eager, 16);
    r.seed_parallel({4, 5, 6});
    r.elim.store(0, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
    r.server.serve_once();  // moves a head, answers 4
    r.elim.store(0, {}, SlotWord{}, nullptr);
    ASSERT_TRUE(r.skiplist.has_seq_part());
    for (int i = 0; i < 15; ++i) EXPECT_FALSE(r.server.serve_once().chopped) << i;
    EXPECT_TRUE(r.server.serve_once().chopped);
    EXPECT_FALSE(r.skiplist.has_seq_part());
    EXPECT_EQ(r.skiplist.chop_heads(), 1u);
    EXPECT_EQ(r.skiplist.live_keys(), (std::vector<Key>{5, 6}));
}

TEST(ServeLazy, RepliesBeforeRemoving) {
    Rig r(ServerStrategy::lazy);
    r.seed_parallel({4, 9});
    AuditLog audit;
    r.server.set_audit(&audit);
    r.elim.store(0, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
    r.server.serve_once();
    EXPECT_EQ(r.elim.load(0), (SlotWord{4, 0}));
    EXPECT_EQ(r.skiplist.live_keys(), (std::vector<Key>{9}));
    // The reply replaced the request directly, with no INPROG step.
    ASSERT_EQ(audit.transitions.size(), 1u);
    EXPECT_TRUE(audit.transitions[0].from.is_remove_request());
    EXPECT_TRUE(audit.transitions[0].to.is_response());
}

TEST(ServeLazy, SmallerAddLowersMinimumFirst) {
    Rig r(ServerStrategy::lazy);
    r.seed_parallel({5, 8});
    ASSERT_TRUE(r.skiplist.move_head());
    ASSERT_EQ(r.skiplist.min_value(), 5u);
    r.elim.store(3, {}, SlotWord{4, kStamp}, nullptr);
    r.server.serve_once();
    EXPECT_EQ(r.skiplist.min_value(), 4u);
    EXPECT_EQ(r.elim.load(3), (SlotWord{opcode::kTaken, 0}));
    EXPECT_EQ(r.skiplist.live_keys(), (std::vector<Key>{4, 5, 8}));
}

TEST(ServeLazy, EmptyFallsBackToEager) {
    Rig r(ServerStrategy::lazy);
    r.elim.store(0, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
    r.server.serve_once();
    EXPECT_EQ(r.elim.load(0), (SlotWord{kMaxInt, 0}));
}

/// Drives one client script directly through the array, one request at a
/// time, and records what the client would see.
std::vector<Key> run_script(ServerStrategy strategy, std::uint64_t seed, int ops) {
    Rig r(strategy, 4);
    std::mt19937_64 rng(seed);
    std::vector<Key> seen;
    for (int i = 0; i < ops; ++i) {
        if (rng() % 2 == 0) {
            r.elim.store(0, {}, SlotWord{static_cast<Key>(rng() % 64 + 4), kStamp}, nullptr);
            r.server.serve_once();
        } else {
            r.elim.store(0, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
            r.server.serve_once();
            seen.push_back(r.elim.load(0).value);
        }
        r.elim.store(0, {}, SlotWord{}, nullptr);
        // Idle scans between requests so chops interleave with the script.
        if (rng() % 8 == 0) r.server.serve_once();
    }
    return seen;
}

std::vector<Key> run_oracle(std::uint64_t seed, int ops) {
    LockedHeap heap;
    std::mt19937_64 rng(seed);
    std::vector<Key> seen;
    for (int i = 0; i < ops; ++i) {
        if (rng() % 2 == 0) {
            heap.add(static_cast<Key>(rng() % 64 + 4));
        } else {
            seen.push_back(heap.remove_min().value_or(kMaxInt));
        }
        (void)(rng() % 8);
    }
    return seen;
}

TEST(ServerStrategies, EagerAndLazyAgreeWithHeap) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto oracle = run_oracle(seed, 4000);
        EXPECT_EQ(run_script(ServerStrategy::eager, seed, 4000), oracle) << "seed " << seed;
        EXPECT_EQ(run_script(ServerStrategy::lazy, seed, 4000), oracle) << "seed " << seed;
    }
}

TEST(ServerLifecycle, StartStopQuiescent) {
    Rig r;
    r.server.start();
    EXPECT_TRUE(r.server.running());
    r.server.stop();
    EXPECT_FALSE(r.server.running());
    EXPECT_TRUE(r.elim.at_rest());
}

TEST(ServerLifecycle, DoubleStartAndStrayStopRejected) {
    Rig r;
    EXPECT_THROW(r.server.stop(), std::logic_error);
    r.server.start();
    EXPECT_THROW(r.server.start(), std::logic_error);
    r.server.stop();
    EXPECT_THROW(r.server.stop(), std::logic_error);
}

TEST(ServerLifecycle, StopAnswersPendingRequest) {
    Rig r;
    r.seed_parallel({12});
    r.server.start();
    r.elim.store(3, {}, SlotWord{opcode::kRemReq, kStamp}, nullptr);
    r.server.stop();
    EXPECT_EQ(r.elim.load(3), (SlotWord{12, 0}));
}

}  // namespace
