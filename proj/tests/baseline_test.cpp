#include <random>

#include <gtest/gtest.h>

#include "ovsf/baseline.hpp"
#include "ovsf/run.hpp"
#include "ovsf/workloads.hpp"
#include "support.hpp"

using namespace ovsf;
using ovsf::testing::id_at;
using ovsf::testing::layout;
using ovsf::testing::sit;

TEST(Baseline, InsertIntoEmpty) {
    auto step = baseline_insert(Situation(3), 0);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0");
    EXPECT_TRUE(step->log.moved.empty());
}

TEST(Baseline, InsertAtEndOfRun) {
    auto step = baseline_insert(sit(3, "1@0 2@2"), 1);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0 2@2 2@4");
    EXPECT_TRUE(step->log.moved.empty());
}

TEST(Baseline, InsertPushesEveryBiggerRun) {
    auto s = sit(4, "1@0 1@1 2@2 4@4");
    const PebbleId two = id_at(s, 2);
    const PebbleId four = id_at(s, 4);
    auto step = baseline_insert(s, 0);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0 1@1 1@2 2@4 4@8");
    ASSERT_EQ(step->log.moved.size(), 2u);
    EXPECT_EQ(step->log.moved[0], (Move{two, Place{1, 2}, Place{1, 4}}));
    EXPECT_EQ(step->log.moved[1], (Move{four, Place{2, 4}, Place{2, 8}}));
    EXPECT_EQ(step->log.placed->to, (Place{0, 2}));
}

TEST(Baseline, PaddingCanBlockAnInsertThatFitsInBandwidth) {
    auto s = sit(3, "1@0 1@1 2@2 4@4");
    const Situation before = s;
    auto log = baseline_insert_in_place(s, 0);
    ASSERT_FALSE(log);
    EXPECT_EQ(s, before);
    EXPECT_EQ(baseline_insert(sit(3, "4@0 4@4"), 0).error().code, ErrorCode::insufficient_bandwidth);
}

TEST(Baseline, DeletePullsRunsBack) {
    auto s = sit(4, "1@0 1@1 1@2 2@4 4@8");
    auto step = baseline_delete(s, 0);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0 1@1 2@2 4@4");
    EXPECT_EQ(step->log.moved.size(), 2u);
    EXPECT_EQ(step->log.removed->place(), (Place{0, 2}));
}

TEST(Baseline, DeleteOnlyPebble) {
    auto step = baseline_delete(sit(3, "8@0"), 3);
    ASSERT_TRUE(step);
    EXPECT_TRUE(step->situation.empty());
    EXPECT_TRUE(step->log.moved.empty());
}

TEST(Baseline, Errors) {
    EXPECT_EQ(baseline_delete(sit(3, "1@0"), 1).error().code, ErrorCode::no_such_level);
    EXPECT_EQ(baseline_insert(sit(3, "2@0 1@2"), 0).error().code, ErrorCode::invalid_situation);
    EXPECT_EQ(baseline_delete(sit(3, "2@0 1@2"), 0).error().code, ErrorCode::invalid_situation);
    EXPECT_EQ(baseline_insert(Situation(3), 4).error().code, ErrorCode::level_out_of_range);
}

TEST(Baseline, DeleteByIdRelabels) {
    Situation s = sit(3, "1@0 1@1 2@2");
    const PebbleId first = id_at(s, 0);
    auto log = baseline_apply_in_place(s, Request::remove_id(first));
    ASSERT_TRUE(log);
    EXPECT_EQ(layout(s), "1@0 2@2");
    EXPECT_EQ(s.find(first), nullptr);
}

TEST(Baseline, StaysSortedCompactUnderRandomRequests) {
    for (Level n : {2, 3, 5, 8}) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(n));
        Situation s(n);
        for (int k = 0; k < 3000; ++k) {
            const Situation before = s;
            const bool insert = s.empty() || rng() % 2 == 0;
            const Level l = static_cast<Level>(rng() % static_cast<std::uint64_t>(n + 1));
            auto log = insert ? baseline_insert_in_place(s, l) : baseline_delete_in_place(s, l);
            if (!log) {
                ASSERT_EQ(s, before) << log.error().message;
                continue;
            }
            ASSERT_TRUE(is_sorted_compact(s)) << layout(s);
            ASSERT_LE(log->moved.size(), static_cast<std::size_t>(n));
            ASSERT_EQ(s.size(), before.size() + (insert ? 1 : 0) - (insert ? 0 : 1));
        }
    }
}

TEST(Baseline, CascadeCostGrowsWithHeight) {
    double previous = -1.0;
    for (Level n = 2; n <= 8; ++n) {
        auto r = replay<BaselineAllocator>(gen_cascade_trace(n, 2000));
        ASSERT_FALSE(r.failure) << r.failure->what;
        EXPECT_GT(r.stats.mean_moves(), previous) << "n=" << n;
        previous = r.stats.mean_moves();
    }
}
