#include <gtest/gtest.h>

#include "ovsf/allocator.hpp"
#include "ovsf/coins.hpp"
#include "ovsf/run.hpp"
#include "ovsf/workloads.hpp"
#include "support.hpp"

using namespace ovsf;
using ovsf::testing::sit;

TEST(RequiredCoins, Values) {
    EXPECT_EQ(required_coins(2, 4), 1u);
    EXPECT_EQ(required_coins(1, 4), 0u);
    EXPECT_EQ(required_coins(4, 4), 2u);
    EXPECT_EQ(required_coins(8, 1), 16u);
}

TEST(CoinDemands, SmallestPebbleToTheRight) {
    auto d = coin_demands(sit(3, "1@0 2@2 2@4"));
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].place, (Place{0, 1}));
    ASSERT_TRUE(d[0].smallest_right);
    EXPECT_EQ(*d[0].smallest_right, 1);
    EXPECT_EQ(d[0].required, 1u);
    EXPECT_EQ(d[1].place, (Place{1, 6}));
    EXPECT_FALSE(d[1].smallest_right);
    EXPECT_EQ(d[1].required, 0u);
}

TEST(Audit, Examples) {
    CoinLedger ledger;
    auto empty = audit(Situation(3), ledger);
    ASSERT_TRUE(empty);
    EXPECT_TRUE(empty->empty());

    const auto s = sit(2, "1@0 2@2");
    auto missing = audit(s, ledger);
    ASSERT_TRUE(missing);
    ASSERT_EQ(missing->size(), 1u);
    EXPECT_EQ((*missing)[0].kind, ViolationKind::p4);
    EXPECT_EQ((*missing)[0].place, (Place{0, 1}));

    ledger.deposit(Place{0, 1}, 1);
    auto paid = audit(s, ledger);
    ASSERT_TRUE(paid);
    EXPECT_TRUE(paid->empty());
    EXPECT_EQ(ledger.balance(), 1u);
    EXPECT_EQ(ledger.injected_total(), 1u);

    auto bad = audit(sit(2, "1@1"), ledger);
    ASSERT_FALSE(bad);
    EXPECT_EQ(bad.error().code, ErrorCode::invalid_situation);
}

TEST(Settle, InsertIntoEmptyCostsNothing) {
    Situation s(3);
    CoinLedger ledger;
    auto log = insert_in_place(s, 1);
    ASSERT_TRUE(log);
    auto st = ledger.settle(s, *log);
    EXPECT_EQ(st.injected, 0u);
    EXPECT_EQ(st.consumed, 0u);
    EXPECT_EQ(st.balance, 0u);
    EXPECT_TRUE(st.clean());
    EXPECT_EQ(st.line(), "iters=0 injected=0 consumed=0 balance=0 p4=ok");
}

TEST(Settle, RotationNeedsNoCoins) {
    auto s = sit(4, "4@0 1@4");
    CoinLedger ledger;
    auto log = insert_in_place(s, 2);
    ASSERT_TRUE(log);
    auto st = ledger.settle(s, *log);
    // Free after: 1@9 2@10 4@12, smallest right of none of them.
    EXPECT_EQ(st.injected, 0u);
    EXPECT_TRUE(st.p4_ok);
}

TEST(Settle, UncoveredPlaceGetsFreshCoin) {
    auto s = sit(2, "1@0 1@1 2@2");
    CoinLedger ledger;
    auto log = delete_last_in_place(s, 0);
    ASSERT_TRUE(log);
    auto st = ledger.settle(s, *log);
    EXPECT_EQ(st.iterations, 0u);
    EXPECT_EQ(st.injected, 1u);
    EXPECT_EQ(st.consumed, 0u);
    EXPECT_EQ(st.charged_new_place, 1u);
    EXPECT_EQ(st.charged_other, 0u);
    EXPECT_EQ(ledger.coins_on(Place{0, 1}), 1u);
    EXPECT_EQ(st.line(), "iters=0 injected=1 consumed=0 balance=1 p4=ok");
}

TEST(Settle, LoopIterationConsumesACoin) {
    auto s = sit(3, "1@0 2@2 2@4");
    CoinLedger ledger;
    auto log = delete_last_in_place(s, 0);
    ASSERT_TRUE(log);
    ASSERT_EQ(log->iterations, 1u);
    auto st = ledger.settle(s, *log);
    EXPECT_EQ(st.consumed, 1u);
    EXPECT_EQ(st.consumed_fresh, 1u);
    EXPECT_EQ(st.injected, 1u);
    EXPECT_EQ(st.balance, 0u);
    EXPECT_TRUE(st.p4_ok);
}

TEST(Settle, CoveredCoinsAreRecycled) {
    auto s = sit(2, "1@0 1@1 2@2");
    CoinLedger ledger;
    auto del = delete_last_in_place(s, 0);
    ASSERT_TRUE(del);
    ledger.settle(s, *del);
    ASSERT_EQ(ledger.balance(), 1u);
    // Covering 1@1 releases its coin; nothing needs it, so it waits in the pool.
    auto ins = insert_in_place(s, 0);
    ASSERT_TRUE(ins);
    auto st = ledger.settle(s, *ins);
    EXPECT_EQ(st.released, 1u);
    EXPECT_EQ(st.injected, 0u);
    EXPECT_EQ(ledger.pool(), 1u);
    EXPECT_EQ(st.balance, 1u);
}

TEST(Settle, BudgetIsReportedNotEnforced) {
    auto s = sit(2, "1@0 1@1 2@2");
    CoinLedger ledger(CoinOptions{0, 0});
    auto log = delete_last_in_place(s, 0);
    ASSERT_TRUE(log);
    auto st = ledger.settle(s, *log);
    EXPECT_TRUE(st.p4_ok);
    EXPECT_FALSE(st.within_budget);
    EXPECT_FALSE(st.clean());
}

class Ledger : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(Ledger, ConservationAndBudgetOnRandomTraces) {
    const auto [height, ratio] = GetParam();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Trace t = gen_random_trace(static_cast<Level>(height), 2000, seed, ratio);
        PaperAllocator alloc(t.height);
        CoinLedger ledger(CoinOptions{8, 8});
        std::uint64_t injected = 0;
        std::uint64_t consumed = 0;
        for (std::size_t k = 0; k < t.requests.size(); ++k) {
            auto log = alloc.apply(t.requests[k]);
            ASSERT_TRUE(log) << log.error().message;
            auto st = ledger.settle(alloc.situation(), *log);
            injected += st.injected;
            consumed += st.consumed;
            ASSERT_TRUE(st.p4_ok) << "seed " << seed << " request " << k + 1;
            ASSERT_TRUE(st.within_budget) << st.line();
            ASSERT_EQ(st.charged_other, 0u) << "seed " << seed << " request " << k + 1;
            ASSERT_EQ(st.consumed, log->iterations);
            ASSERT_EQ(st.consumed, st.consumed_fresh + st.consumed_uncovered + st.consumed_pool);
            ASSERT_EQ(injected - consumed, ledger.balance());
            ASSERT_EQ(st.balance, ledger.balance());
            auto a = audit(alloc.situation(), ledger);
            ASSERT_TRUE(a);
            ASSERT_TRUE(a->empty()) << (*a)[0].describe();
        }
        EXPECT_EQ(ledger.injected_total(), injected);
        EXPECT_EQ(ledger.consumed_total(), consumed);
    }
}

INSTANTIATE_TEST_SUITE_P(Heights, Ledger,
                         ::testing::Combine(::testing::Values(2, 4, 6, 9), ::testing::Values(0.5, 0.7, 0.9)));

TEST(Replay, AuditedRunReportsCoinTotals) {
    const Trace t = gen_random_trace(6, 3000, 7, 0.6);
    RunOptions options;
    options.keep_log = true;
    auto r = replay<PaperAllocator>(t, options);
    ASSERT_FALSE(r.failure) << r.failure->what;
    ASSERT_EQ(r.settlements.size(), t.requests.size());
    EXPECT_EQ(r.stats.coins_injected - r.stats.coins_consumed, r.stats.coin_balance);
    EXPECT_EQ(r.stats.p4_failures, 0u);
    std::uint64_t max_injected = 0;
    for (const auto& s : r.settlements) max_injected = std::max(max_injected, s.injected);
    EXPECT_EQ(max_injected, r.stats.max_coins_injected_per_request);
}
