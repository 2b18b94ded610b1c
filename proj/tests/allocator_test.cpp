#include <gtest/gtest.h>

#include "ovsf/allocator.hpp"
#include "ovsf/properties.hpp"
#include "ovsf/run.hpp"
#include "ovsf/workloads.hpp"
#include "support.hpp"

using namespace ovsf;
using ovsf::testing::id_at;
using ovsf::testing::layout;
using ovsf::testing::sit;

namespace {

Situation replay_paper(Level n, const std::vector<Request>& requests, const AllocatorOptions& options = {}) {
    Situation s(n);
    for (const auto& r : requests) {
        auto log = apply_in_place(s, r, options);
        EXPECT_TRUE(log.has_value()) << (log ? "" : log.error().message);
    }
    return s;
}

std::vector<Request> inserts(std::initializer_list<Level> levels) {
    std::vector<Request> out;
    for (Level l : levels) out.push_back(Request::insert(l));
    return out;
}

}  // namespace

TEST(Insert, IntoEmptyGoesToZero) {
    auto step = insert(Situation(3), 1);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "2@0");
    EXPECT_TRUE(step->log.moved.empty());
    EXPECT_EQ(step->log.insert_case, InsertCase::no_left_neighbor);
    EXPECT_EQ(step->log.placed->to, (Place{1, 0}));
}

TEST(Insert, LeftNeighborBlackPlacesDirectly) {
    auto step = insert(sit(3, "1@0"), 1);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0 2@2");
    EXPECT_EQ(step->log.insert_case, InsertCase::left_black);
    EXPECT_TRUE(step->log.moved.empty());
}

TEST(Insert, SmallerLeftOfWhitePlacesDirectly) {
    // C = 2@0 is smaller than the request, so A goes on the free place after the white B.
    auto step = insert(sit(4, "2@0 1@2"), 2);
    ASSERT_TRUE(step);
    EXPECT_EQ(step->log.insert_case, InsertCase::white_small_left);
    EXPECT_EQ(layout(step->situation), "2@0 1@2 4@4");
    EXPECT_TRUE(step->log.moved.empty());
}

TEST(Insert, EqualNeighborRotates) {
    auto s = sit(4, "4@0 1@4");
    const PebbleId b = id_at(s, 4);
    auto step = insert(s, 2);
    ASSERT_TRUE(step);
    EXPECT_EQ(step->log.insert_case, InsertCase::rotation);
    EXPECT_EQ(layout(step->situation), "4@0 4@4 1@8");
    ASSERT_EQ(step->log.moved.size(), 1u);
    EXPECT_EQ(step->log.moved[0], (Move{b, Place{0, 4}, Place{0, 8}}));
    EXPECT_EQ(step->log.placed->to, (Place{2, 4}));
}

TEST(Insert, BlackClosingPebbleTakesOriginalPlaceOfWhite) {
    auto s = sit(5, "4@0 4@4 8@8 1@16");
    const PebbleId b = id_at(s, 16);
    const PebbleId d = id_at(s, 8);
    auto step = insert(s, 2);
    ASSERT_TRUE(step);
    EXPECT_EQ(step->log.insert_case, InsertCase::shuffle_black_close);
    EXPECT_EQ(layout(step->situation), "4@0 4@4 4@8 1@12 8@16");
    ASSERT_EQ(step->log.moved.size(), 2u);
    EXPECT_EQ(step->log.moved[0], (Move{b, Place{0, 16}, Place{0, 12}}));
    EXPECT_EQ(step->log.moved[1], (Move{d, Place{3, 8}, Place{3, 16}}));
    EXPECT_TRUE(is_valid(step->situation));
}

TEST(Insert, WhiteClosingPebbleShufflesFour) {
    auto s = replay_paper(4, inserts({1, 0, 2, 1}));
    auto step = insert(s, 1);
    ASSERT_TRUE(step);
    EXPECT_EQ(step->log.insert_case, InsertCase::shuffle_white_close);
    EXPECT_LE(step->log.moved.size(), 3u);
    EXPECT_TRUE(is_valid(step->situation)) << layout(step->situation);
}

TEST(Insert, BiggerWhiteIsRenamed) {
    // B = 2@4 is bigger than the request, so the two swap roles before the closing step.
    auto s = sit(3, "4@0 2@4");
    auto step = insert(s, 0);
    ASSERT_TRUE(step);
    EXPECT_TRUE(step->log.renamed);
    EXPECT_TRUE(is_valid(step->situation)) << layout(step->situation);
    EXPECT_EQ(step->situation.size(), 3u);

    AllocatorOptions broken;
    broken.skip_insert_rename = true;
    Situation copy = s;
    auto mutated = insert_in_place(copy, 0, broken);
    EXPECT_TRUE(!mutated || !is_valid(copy));
}

TEST(Insert, InsufficientBandwidthLeavesSituationUntouched) {
    auto s = sit(3, "4@0 2@4");
    const Situation before = s;
    auto log = insert_in_place(s, 2);
    ASSERT_FALSE(log);
    EXPECT_EQ(log.error().code, ErrorCode::insufficient_bandwidth);
    EXPECT_EQ(s, before);
}

TEST(Insert, RejectsInvalidInputAndBadLevel) {
    auto bad = insert(sit(3, "1@1"), 0);
    ASSERT_FALSE(bad);
    EXPECT_EQ(bad.error().code, ErrorCode::invalid_situation);
    auto high = insert(Situation(3), 4);
    ASSERT_FALSE(high);
    EXPECT_EQ(high.error().code, ErrorCode::level_out_of_range);
}

TEST(Delete, GapThatDoesNotFitStops) {
    auto step = delete_last(sit(2, "1@0 1@1 2@2"), 0);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0 2@2");
    EXPECT_TRUE(step->log.moved.empty());
    EXPECT_EQ(step->log.iterations, 0u);
    EXPECT_EQ(step->log.exit, DeleteExit::does_not_fit);
    EXPECT_EQ(step->log.removed->start, 1u);
}

TEST(Delete, PullsRightmostSmallestIntoGap) {
    auto s = sit(3, "1@0 2@2 2@4");
    const PebbleId x = id_at(s, 4);
    auto step = delete_last(s, 0);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "2@0 2@2");
    ASSERT_EQ(step->log.moved.size(), 1u);
    EXPECT_EQ(step->log.moved[0], (Move{x, Place{1, 4}, Place{1, 0}}));
    EXPECT_EQ(step->log.iterations, 1u);
    EXPECT_EQ(step->log.exit, DeleteExit::no_pebbles_right);
}

TEST(Delete, LastPebble) {
    auto step = delete_last(sit(2, "4@0"), 2);
    ASSERT_TRUE(step);
    EXPECT_TRUE(step->situation.empty());
    EXPECT_TRUE(step->log.moved.empty());
    EXPECT_EQ(step->log.iterations, 0u);
}

TEST(Delete, SwapWithWhiteLeftNeighbor) {
    auto s = replay_paper(4, inserts({1, 0, 2, 1}));
    auto step = delete_last(s, 2);
    ASSERT_TRUE(step);
    ASSERT_FALSE(step->log.steps.empty());
    bool swapped = false;
    for (const auto& st : step->log.steps) swapped = swapped || st.swapped;
    EXPECT_TRUE(swapped);
    EXPECT_TRUE(is_valid(step->situation));

    AllocatorOptions broken;
    broken.skip_delete_swap = true;
    auto mutated = delete_last(s, 2, broken);
    ASSERT_TRUE(mutated);
    auto v = validate(mutated->situation);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].kind, ViolationKind::p3);
}

TEST(Delete, Errors) {
    auto s = sit(3, "1@0");
    const Situation before = s;
    auto none = delete_last_in_place(s, 1);
    ASSERT_FALSE(none);
    EXPECT_EQ(none.error().code, ErrorCode::no_such_level);
    EXPECT_EQ(s, before);
    EXPECT_EQ(delete_last(sit(3, "1@1"), 0).error().code, ErrorCode::invalid_situation);
    EXPECT_EQ(delete_last(s, 9).error().code, ErrorCode::level_out_of_range);
}

TEST(DeleteById, LastOfLevelIsPlainDelete) {
    auto s = sit(3, "1@0 1@1 2@2");
    auto by_id = delete_by_id(s, id_at(s, 1));
    auto by_level = delete_last(s, 0);
    ASSERT_TRUE(by_id && by_level);
    EXPECT_EQ(by_id->situation, by_level->situation);
    EXPECT_FALSE(by_id->log.relabel);
    EXPECT_EQ(by_id->log.kind, RequestKind::delete_id);
}

TEST(DeleteById, OtherPebbleIsRelabeled) {
    auto s = sit(3, "1@0 1@1 2@2");
    const PebbleId a = id_at(s, 0);
    const PebbleId b = id_at(s, 1);
    auto step = delete_by_id(s, a);
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0 2@2");
    EXPECT_EQ(step->situation.find(a), nullptr);
    ASSERT_NE(step->situation.find(b), nullptr);
    EXPECT_EQ(step->situation.find(b)->start, 0u);
    EXPECT_TRUE(step->situation.same_layout(delete_by_id(s, b)->situation));
    EXPECT_TRUE(step->log.moved.empty());
    ASSERT_TRUE(step->log.relabel);

    AllocatorOptions counting;
    counting.count_relabel = true;
    auto counted = delete_by_id(s, a, counting);
    ASSERT_TRUE(counted);
    ASSERT_EQ(counted->log.cost(), 1u);
    EXPECT_EQ(counted->log.moved[0], (Move{b, Place{0, 1}, Place{0, 0}}));
}

TEST(DeleteById, UnknownOrDeletedId) {
    auto s = sit(3, "1@0 2@2");
    const PebbleId a = id_at(s, 0);
    auto gone = delete_by_id(s, a);
    ASSERT_TRUE(gone);
    auto again = delete_by_id(gone->situation, a);
    ASSERT_FALSE(again);
    EXPECT_EQ(again.error().code, ErrorCode::unknown_id);
}

TEST(Apply, DispatchAndErrors) {
    auto step = apply(Situation(2), Request::insert(0));
    ASSERT_TRUE(step);
    EXPECT_EQ(layout(step->situation), "1@0");
    auto s = sit(2, "1@0");
    const Situation before = s;
    auto bad = apply_in_place(s, Request::remove(1));
    ASSERT_FALSE(bad);
    EXPECT_EQ(s, before);
}

TEST(Apply, FoldEqualsStepwise) {
    const Trace t = gen_random_trace(5, 300, 7, 0.6);
    PaperAllocator alloc(5);
    Situation s(5);
    for (const auto& r : t.requests) {
        auto a = alloc.apply(r);
        auto b = apply(s, r);
        ASSERT_TRUE(a && b);
        EXPECT_EQ(*a, b->log);
        s = b->situation;
        ASSERT_EQ(alloc.situation(), s);
    }
}

TEST(Ids, SequentialPerInsert) {
    PaperAllocator alloc(4);
    for (std::uint64_t k = 1; k <= 5; ++k) {
        auto log = alloc.apply(Request::insert(0));
        ASSERT_TRUE(log);
        EXPECT_EQ(to_underlying(log->placed->id), k);
    }
    ASSERT_TRUE(alloc.apply(Request::remove(0)));
    EXPECT_EQ(to_underlying(alloc.apply(Request::insert(1))->placed->id), 6u);
}

// Randomized closure: every request on every trace keeps the situation valid, inserts move at
// most three pebbles, direct placements move none, and the delete gap only moves right.
class Closure : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(Closure, RandomTraces) {
    const auto [n, ratio] = GetParam();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Trace t = gen_random_trace(n, 400, seed, ratio);
        Situation s(n);
        for (std::size_t k = 0; k < t.requests.size(); ++k) {
            const Request& r = t.requests[k];
            std::vector<Position> gaps;
            Expected<MoveLog> log =
                r.kind == RequestKind::insert
                    ? insert_in_place(s, r.level)
                    : delete_last_observed(s, r.level, {}, [&](const Situation&, Position i, Level) { gaps.push_back(i); });
            ASSERT_TRUE(log) << log.error().message;
            ASSERT_TRUE(oracle::valid(s)) << "seed " << seed << " request " << k + 1 << ": " << layout(s);
            if (r.kind == RequestKind::insert) {
                ASSERT_LE(log->moved.size(), 3u);
                ASSERT_EQ(log->iterations, 0u);
                if (log->insert_case == InsertCase::no_left_neighbor || log->insert_case == InsertCase::left_black) {
                    ASSERT_TRUE(log->moved.empty());
                }
            } else {
                for (std::size_t g = 1; g < gaps.size(); ++g) ASSERT_LT(gaps[g - 1], gaps[g]);
                ASSERT_EQ(gaps.size(), log->iterations + 1);
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Heights, Closure,
                         ::testing::Combine(::testing::Values(2, 3, 5, 7), ::testing::Values(0.4, 0.6, 0.8)));

TEST(Determinism, SameInputSameLog) {
    const Trace t = gen_random_trace(6, 500, 3, 0.6);
    RunOptions o;
    o.keep_log = true;
    auto a = replay<PaperAllocator>(t, o);
    auto b = replay<PaperAllocator>(t, o);
    ASSERT_EQ(a.logs.size(), b.logs.size());
    for (std::size_t k = 0; k < a.logs.size(); ++k) EXPECT_EQ(a.logs[k], b.logs[k]);
    EXPECT_EQ(a.final_situation, b.final_situation);
}
