#include <gtest/gtest.h>

#include <cmath>

#include "tipsim/engine.hpp"
#include "tipsim/stats.hpp"

using namespace tipsim;

namespace {

SimConfig small_config(double mu, int k, std::optional<double> delta, std::uint64_t blocks,
                       std::uint64_t seed = 1) {
    SimConfig c;
    c.mu = mu;
    c.k = k;
    c.delta = delta;
    c.total_blocks = blocks;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(SimConfig, Validation) {
    EXPECT_NO_THROW(validate(SimConfig{}));
    auto c = SimConfig{};
    c.k = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SimConfig{};
    c.mu = -0.1;
    EXPECT_THROW(validate(c), ConfigError);
    c = SimConfig{};
    c.lambda = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SimConfig{};
    c.delta = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SimConfig{};
    c.total_blocks = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SimConfig{};
    c.warmup_fraction = 1.0;
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_THROW(run(c), ConfigError);
}

TEST(SimConfig, DefaultsMatchReferenceParameters) {
    const SimConfig c;
    EXPECT_EQ(c.lambda, 100.0);
    EXPECT_EQ(c.h, 1.0);
    ASSERT_TRUE(c.delta);
    EXPECT_EQ(*c.delta, 100.0);
    EXPECT_EQ(c.total_blocks, 300000u);
    EXPECT_EQ(c.warmup_fraction, 0.2);
}

TEST(Engine, DeterministicGivenSeed) {
    auto c = small_config(0.7, 3, 50.0, 20000, 42);
    c.record_series = true;
    const auto a = run(c);
    const auto b = run(c);
    EXPECT_EQ(a.mean_tip_pool, b.mean_tip_pool);
    EXPECT_EQ(a.honest_issued, b.honest_issued);
    EXPECT_EQ(a.honest_expired, b.honest_expired);
    EXPECT_EQ(a.adversary_issued, b.adversary_issued);
    ASSERT_EQ(a.series.size(), b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        ASSERT_EQ(a.series[i].time, b.series[i].time);
        ASSERT_EQ(a.series[i].value, b.series[i].value);
    }
    c.seed = 43;
    EXPECT_NE(run(c).mean_tip_pool, a.mean_tip_pool);
}

TEST(Engine, PureSpamEveryBlockStaysATip) {
    auto c = small_config(0.0, 2, std::nullopt, 1000);
    c.keep_store = true;
    const auto r = run(c);
    EXPECT_EQ(r.honest_expired, 0u);
    EXPECT_EQ(r.honest_issued_total, 0u);
    EXPECT_EQ(r.final_pool->occupancy(), r.final_store->size());
    EXPECT_EQ(r.final_pool->tip_count(), r.final_store->size());
    EXPECT_EQ(r.final_pool->referenced_removals(), 0u);
}

TEST(Engine, HonestNoExpirationRemovesEverythingButTipsByReference) {
    auto c = small_config(1.0, 2, std::nullopt, 20000);
    c.keep_store = true;
    const auto r = run(c);
    const auto& store = *r.final_store;
    const auto& pool = *r.final_pool;
    for (const Block& b : store.blocks()) {
        if (b.is_removed()) {
            EXPECT_EQ(*b.removal_cause, RemovalCause::Referenced);
        } else {
            EXPECT_TRUE(pool.is_visible(b.id) || b.visible_at > pool.now()) << b.id;
        }
    }
    EXPECT_EQ(pool.expired_removals(), 0u);
}

TEST(Engine, ConservationAndWindowCapAtEveryEvent) {
    const auto c = small_config(0.45, 2, 10.0, 30000, 9);
    Simulation sim(c);
    const double horizon = c.h + *c.delta;
    std::size_t window_start = 0;  // first block issued within the horizon
    while (!sim.done()) {
        sim.step();
        const auto& store = sim.store();
        const auto& pool = sim.pool();
        ASSERT_EQ(store.size(),
                  pool.occupancy() + pool.referenced_removals() + pool.expired_removals());
        while (store.blocks()[window_start].issued_at < sim.now() - horizon) ++window_start;
        const std::size_t recent = store.size() - window_start;
        ASSERT_LE(pool.tip_count(), recent);
        ASSERT_LE(pool.occupancy(), recent);
    }
}

TEST(Engine, ParentsRespectAgeBoundAndVisibility) {
    for (double mu : {0.3, 0.6, 0.99}) {
        auto c = small_config(mu, 2, 5.0, 30000, 17);
        c.keep_store = true;
        const auto r = run(c);
        ASSERT_EQ(r.empty_pool_events, 0u);
        const auto& store = *r.final_store;
        for (const Block& b : store.blocks()) {
            ASSERT_TRUE(parents_within_age(store, b, *c.delta + c.h)) << b.id;
            for (BlockId p : b.parents) ASSERT_LT(p, b.id);
            if (b.issuer != Issuer::Honest) continue;
            for (BlockId p : b.parents) {
                const Block& parent = store.at(p);
                // Selected from the visible pool at issuance time.
                ASSERT_LE(parent.visible_at, b.issued_at);
                ASSERT_TRUE(!parent.removed_at || *parent.removed_at > b.issued_at);
            }
        }
    }
}

TEST(Engine, AdversaryBlockAddsExactlyOneTip) {
    const auto c = small_config(0.6, 2, 50.0, 5000, 3);
    Simulation sim(c);
    int adversary_blocks = 0;
    while (!sim.done()) {
        const std::size_t before_tips = sim.pool().tip_count();
        const std::size_t before_occ = sim.pool().occupancy();
        std::size_t removed_unapproved = 0;
        const BlockId id = sim.step();
        // step() also advanced the clock; undo that part of the change.
        std::size_t removed_total = sim.last_removals().size();
        for (const auto& r : sim.last_removals()) {
            if (r.cause == RemovalCause::Expired && !sim.store().at(r.id).approved_at) {
                ++removed_unapproved;
            }
        }
        if (sim.store().at(id).issuer != Issuer::Adversary) continue;
        ++adversary_blocks;
        EXPECT_EQ(sim.pool().tip_count() + removed_unapproved, before_tips + 1);
        EXPECT_EQ(sim.pool().occupancy() + removed_total, before_occ + 1);
    }
    EXPECT_GT(adversary_blocks, 1500);
}

TEST(Engine, InterArrivalTimesAreExponential) {
    auto c = small_config(1.0, 2, std::nullopt, 50000, 77);
    c.keep_store = true;
    const auto r = run(c);
    const auto blocks = r.final_store->blocks();
    double sum = 0.0, sum_sq = 0.0;
    const std::size_t n = blocks.size() - 1;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        const double gap = blocks[i].issued_at - blocks[i - 1].issued_at;
        ASSERT_GT(gap, 0.0);
        sum += gap;
        sum_sq += gap * gap;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    const double expected = 1.0 / c.lambda;
    EXPECT_LT(std::abs(mean - expected), 3.0 * expected / std::sqrt(double(n)));
    EXPECT_NEAR(var / (expected * expected), 1.0, 0.05);
}

TEST(Engine, StableRegimeHasNoDrift) {
    const auto r = run(small_config(1.0, 2, std::nullopt, 100000, 5));
    const double window = r.t_end - r.warmup_end;
    EXPECT_LT(std::abs(r.growth_slope) * window, 0.05 * r.mean_tip_pool);
    EXPECT_NEAR(r.mean_tip_pool / 200.0, 1.0, 0.05);
}

TEST(Engine, UnstableRegimeGrowsAtDriftRate) {
    const auto r = run(small_config(0.3, 2, std::nullopt, 100000, 6));
    const double expected = 100.0 * (1.0 - 0.3 * 2);
    EXPECT_GT(r.growth_slope, 0.0);
    EXPECT_NEAR(r.growth_slope / expected, 1.0, 0.25);
}

TEST(Engine, LittlesLawOnStationaryRun) {
    const auto r = run(small_config(1.0, 2, std::nullopt, 50000, 12));
    EXPECT_NEAR(r.config.lambda * r.mean_tip_time / r.mean_tip_pool, 1.0, 0.03);
    // Occupancy also counts false tips, about lambda*h more.
    EXPECT_NEAR(r.mean_occupancy - r.mean_tip_pool, 100.0, 10.0);
}

TEST(Engine, PartitionMatchesCountersAtEverySample) {
    const auto c = small_config(0.7, 2, 20.0, 20000, 21);
    Simulation sim(c);
    while (!sim.done()) {
        sim.step();
        const auto cls = stats::classify_tips(sim.store(), sim.pool(), sim.now());
        ASSERT_EQ(cls.total(), sim.pool().occupancy());
        ASSERT_EQ(cls.hidden + cls.real, sim.pool().tip_count());
    }
}

TEST(Engine, QuantilesAreOrdered) {
    const auto r = run(small_config(0.8, 2, 100.0, 20000, 2));
    EXPECT_LE(r.q25, r.median);
    EXPECT_LE(r.median, r.q75);
    EXPECT_LE(r.honest_expired, r.honest_issued);
}

TEST(Engine, CensoredOrphanageExcludesUndecidedBlocks) {
    auto c = small_config(0.5, 2, 10.0, 20000, 8);
    c.keep_store = true;
    const auto r = run(c);
    const double censor_end = r.t_end - (c.h + *c.delta);
    std::uint64_t eligible = 0;
    for (const Block& b : r.final_store->blocks()) {
        if (b.issuer != Issuer::Honest || b.issued_at < r.warmup_end || b.issued_at > censor_end) {
            continue;
        }
        ++eligible;
        ASSERT_TRUE(b.is_removed() || b.approved_at) << "undecided block " << b.id;
    }
    EXPECT_EQ(eligible, r.honest_issued);
    EXPECT_GT(r.honest_expired, 0u);
}

TEST(RunReplicated, DistinctSeedsAndOrderedResults) {
    auto c = small_config(1.0, 2, 100.0, 5000, 100);
    const auto rs = run_replicated(c, 3, 2);
    ASSERT_EQ(rs.size(), 3u);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_EQ(rs[i].config.seed, derive_seed(100, i));
        SimConfig single = c;
        single.seed = derive_seed(100, i);
        EXPECT_EQ(run(single).mean_tip_pool, rs[i].mean_tip_pool);
    }
    EXPECT_NE(rs[0].mean_tip_pool, rs[1].mean_tip_pool);
    EXPECT_THROW(run_replicated(c, 0), ConfigError);
}

TEST(RunReplicated, WorkerCountDoesNotChangeAggregates) {
    auto c = small_config(0.6, 2, 50.0, 5000, 55);
    auto collect = [&](unsigned workers) {
        std::vector<stats::RunStats> s;
        for (const auto& r : run_replicated(c, 6, workers)) s.push_back(stats::run_stats(r));
        return stats::aggregate(s);
    };
    const auto a = collect(1);
    const auto b = collect(4);
    EXPECT_EQ(a.mean_tip_pool.mean, b.mean_tip_pool.mean);
    EXPECT_EQ(a.mean_tip_pool.stddev, b.mean_tip_pool.stddev);
    EXPECT_EQ(a.orphanage_rate.mean, b.orphanage_rate.mean);
    EXPECT_EQ(a.q75.mean, b.q75.mean);
}

TEST(DeriveSeed, FixedMixing) {
    EXPECT_EQ(derive_seed(0, 0), splitmix64(0x9E3779B97F4A7C15ULL));
    EXPECT_NE(derive_seed(1, 0), derive_seed(0, 1));
    // splitmix64 reference output for input 0.
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}
