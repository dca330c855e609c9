#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"
#include "tipsim/stats.hpp"

using namespace tipsim;
using namespace tipsim::stats;
using tipsim::test::make_block;
using tipsim::test::make_genesis;

TEST(TimeWeightedMean, Constant) {
    const std::vector<SeriesPoint> s{{0.0, 2.0}};
    EXPECT_DOUBLE_EQ(time_weighted_mean(s, 0.0, 10.0), 2.0);
}

TEST(TimeWeightedMean, SymmetricStep) {
    const std::vector<SeriesPoint> s{{0.0, 1.0}, {5.0, 3.0}};
    EXPECT_DOUBLE_EQ(time_weighted_mean(s, 0.0, 10.0), 2.0);
    EXPECT_DOUBLE_EQ(time_weighted_mean(s, 4.0, 6.0), 2.0);
    EXPECT_DOUBLE_EQ(time_weighted_mean(s, 6.0, 8.0), 3.0);
}

TEST(TimeWeightedMean, Errors) {
    const std::vector<SeriesPoint> s{{1.0, 1.0}};
    EXPECT_THROW(time_weighted_mean(s, 2.0, 2.0), std::domain_error);
    EXPECT_THROW(time_weighted_mean(s, 0.0, 2.0), std::domain_error);
    EXPECT_THROW(time_weighted_mean({}, 0.0, 2.0), std::domain_error);
}

// Fine midpoint Riemann sum (step 1e-4) of the step function as an
// independent oracle. Change times sit on a 1e-3 grid so the sum is exact up
// to rounding.
TEST(TimeWeightedMean, MatchesRiemannSumOnRandomSeries) {
    std::mt19937 gen(31);
    std::uniform_int_distribution<int> gap(10, 500);  // in 1e-3 units
    std::uniform_int_distribution<int> level(0, 50);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<SeriesPoint> s;
        long ticks = 0;
        while (ticks < 10000) {
            s.push_back({ticks * 1e-3, static_cast<double>(level(gen))});
            ticks += gap(gen);
        }
        const double t0 = 1.234, t1 = 9.876;
        const double dt = 1e-4;
        const long steps = std::lround((t1 - t0) / dt);
        double area = 0.0;
        std::size_t idx = 0;
        for (long i = 0; i < steps; ++i) {
            const double x = t0 + (static_cast<double>(i) + 0.5) * dt;
            while (idx + 1 < s.size() && s[idx + 1].time <= x) ++idx;
            area += s[idx].value * dt;
        }
        const double riemann = area / (t1 - t0);
        EXPECT_NEAR(time_weighted_mean(s, t0, t1), riemann, 1e-6) << "trial " << trial;
    }
}

TEST(Quantile, LinearInterpolation) {
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile({4, 3, 2, 1}, 0.75), 3.25);
    EXPECT_DOUBLE_EQ(quantile({5}, 0.3), 5.0);
    EXPECT_DOUBLE_EQ(quantile({1, 3}, 0.5), 2.0);
    EXPECT_THROW(quantile({}, 0.5), std::domain_error);
}

TEST(Quantile, OrderedLevels) {
    std::mt19937 gen(3);
    std::vector<double> v(1001);
    for (auto& x : v) x = std::uniform_real_distribution<double>(0, 1)(gen);
    EXPECT_LE(quantile(v, 0.25), quantile(v, 0.5));
    EXPECT_LE(quantile(v, 0.5), quantile(v, 0.75));
}

TEST(LinearSlope, ExactLine) {
    std::vector<SeriesPoint> s;
    for (int i = 0; i < 10; ++i) s.push_back({double(i), 3.0 * i + 1.0});
    EXPECT_NEAR(linear_slope(s), 3.0, 1e-12);
    EXPECT_EQ(linear_slope(std::vector<SeriesPoint>{{1.0, 2.0}}), 0.0);
}

TEST(ClassifyTips, LoneInsertionIsHidden) {
    DagStore store;
    TipPool pool;
    insert_block(store, pool, make_genesis());
    advance_time(store, pool, 0.0);
    advance_time(store, pool, 2.0);
    insert_block(store, pool, make_block(1, 2.0, {0}));
    const auto c = classify_tips(store, pool, 2.0);
    // Genesis is visible and approved by the hidden block.
    EXPECT_EQ(c.hidden, 1u);
    EXPECT_EQ(c.real, 0u);
    EXPECT_EQ(c.false_tips, 1u);
}

TEST(ClassifyTips, ReferencedTipIsFalseUntilReferrerVisible) {
    DagStore store;
    TipPool pool;
    insert_block(store, pool, make_genesis());
    advance_time(store, pool, 0.0);
    advance_time(store, pool, 0.1);
    insert_block(store, pool, make_block(1, 0.1, {0}));  // A, visible at 1.1
    advance_time(store, pool, 4.5);
    insert_block(store, pool, make_block(2, 4.5, {1}));  // B issued t - h/2
    advance_time(store, pool, 5.0);
    const auto c = classify_tips(store, pool, 5.0);
    EXPECT_EQ(c.hidden, 1u);
    EXPECT_EQ(c.real, 0u);
    EXPECT_EQ(c.false_tips, 1u);
    EXPECT_EQ(c.total(), pool.occupancy());
    EXPECT_EQ(c.hidden + c.real, pool.tip_count());
    EXPECT_THROW(classify_tips(store, pool, 4.0), std::invalid_argument);
}

TEST(Aggregate, SingleRun) {
    RunStats r;
    r.mean_tip_pool = 7.0;
    const auto a = aggregate(std::vector<RunStats>{r});
    EXPECT_EQ(a.runs, 1u);
    EXPECT_DOUBLE_EQ(a.mean_tip_pool.mean, 7.0);
    EXPECT_DOUBLE_EQ(a.mean_tip_pool.stddev, 0.0);
    EXPECT_DOUBLE_EQ(a.mean_tip_pool.std_error, 0.0);
}

TEST(Aggregate, SampleStddev) {
    std::vector<RunStats> runs(4);
    for (int i = 0; i < 4; ++i) runs[i].mean_tip_pool = i + 1.0;
    const auto a = aggregate(runs);
    EXPECT_DOUBLE_EQ(a.mean_tip_pool.mean, 2.5);
    EXPECT_NEAR(a.mean_tip_pool.stddev, 1.2909944487358056, 1e-12);
    EXPECT_NEAR(a.mean_tip_pool.std_error, 1.2909944487358056 / 2.0, 1e-12);
}

TEST(Aggregate, PermutationInvariant) {
    std::mt19937 gen(8);
    std::vector<RunStats> runs(17);
    for (auto& r : runs) {
        r.mean_tip_pool = std::uniform_real_distribution<double>(100, 300)(gen);
        r.orphanage_rate = std::uniform_real_distribution<double>(0, 0.1)(gen);
    }
    const auto a = aggregate(runs);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(runs.begin(), runs.end(), gen);
        const auto b = aggregate(runs);
        EXPECT_EQ(a.mean_tip_pool.mean, b.mean_tip_pool.mean);
        EXPECT_EQ(a.mean_tip_pool.stddev, b.mean_tip_pool.stddev);
        EXPECT_EQ(a.orphanage_rate.mean, b.orphanage_rate.mean);
        EXPECT_EQ(a.orphanage_rate.std_error, b.orphanage_rate.std_error);
    }
}

TEST(Aggregate, RejectsMixedConfigsAndEmpty) {
    std::vector<RunStats> runs(2);
    runs[1].config.k = 3;
    EXPECT_THROW(aggregate(runs), std::invalid_argument);
    EXPECT_THROW(aggregate(std::vector<RunStats>{}), std::invalid_argument);
    runs[1].config.k = runs[0].config.k;
    runs[1].config.seed = 99;  // seeds may differ
    EXPECT_NO_THROW(aggregate(runs));
}

TEST(OrphanageRate, UndefinedWithoutEligibleOrExpiration) {
    SimResult r;
    r.config.delta = 100.0;
    EXPECT_FALSE(orphanage_rate(r).rate);
    r.honest_issued = 10;
    r.honest_expired = 2;
    EXPECT_DOUBLE_EQ(*orphanage_rate(r).rate, 0.2);
    r.config.delta = std::nullopt;
    EXPECT_FALSE(orphanage_rate(r).rate);
}

TEST(FutureCone, ExpiredChainIsOrphaned) {
    DagStore store;
    TipPool pool(5.0);
    insert_block(store, pool, make_genesis());
    advance_time(store, pool, 0.5);
    insert_block(store, pool, make_block(1, 0.5, {0}));  // A
    advance_time(store, pool, 2.0);
    insert_block(store, pool, make_block(2, 2.0, {1}));  // B, expires at 8
    advance_time(store, pool, 20.0);
    EXPECT_EQ(*store.at(2).removal_cause, RemovalCause::Expired);
    const auto fc = future_cone_orphanage(store, pool, 20.0, 1.0);
    EXPECT_EQ(fc.eligible, 2u);
    EXPECT_EQ(fc.orphaned, 2u);
    EXPECT_DOUBLE_EQ(*fc.rate, 1.0);
    const auto ex = expiration_orphanage(store, 0.0, 20.0);
    EXPECT_EQ(ex.eligible, 2u);
    EXPECT_EQ(ex.orphaned, 1u);
}

TEST(FutureCone, LiveDescendantKeepsConeAlive) {
    DagStore store;
    TipPool pool(5.0);
    insert_block(store, pool, make_genesis());
    advance_time(store, pool, 0.5);
    insert_block(store, pool, make_block(1, 0.5, {0}));
    advance_time(store, pool, 2.0);
    insert_block(store, pool, make_block(2, 2.0, {1}));
    advance_time(store, pool, 19.5);
    insert_block(store, pool, make_block(3, 19.5, {0}, Issuer::Adversary));
    // Nothing references 1 or 2 besides each other; 3 only reaches genesis.
    auto fc = future_cone_orphanage(store, pool, 19.5, 1.0);
    EXPECT_EQ(fc.orphaned, 2u);

    DagStore s2;
    TipPool p2(5.0);
    insert_block(s2, p2, make_genesis());
    advance_time(s2, p2, 0.5);
    insert_block(s2, p2, make_block(1, 0.5, {0}));
    advance_time(s2, p2, 2.0);
    insert_block(s2, p2, make_block(2, 2.0, {1}));
    advance_time(s2, p2, 4.0);
    insert_block(s2, p2, make_block(3, 4.0, {2}));  // still a tip at t_end
    advance_time(s2, p2, 6.0);
    fc = future_cone_orphanage(s2, p2, 6.0, 1.0);
    EXPECT_EQ(fc.eligible, 3u);
    EXPECT_EQ(fc.orphaned, 0u);
}

TEST(FutureCone, NoEligibleIsUndefined) {
    DagStore store;
    TipPool pool(5.0);
    insert_block(store, pool, make_genesis());
    advance_time(store, pool, 1.0);
    EXPECT_FALSE(future_cone_orphanage(store, pool, 1.0, 3.0).rate);
}
