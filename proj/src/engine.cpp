#include "tipsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "tipsim/stats.hpp"

namespace tipsim {

void validate(const SimConfig& c) {
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw ConfigError("lambda must be positive");
    if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ConfigError("h must be positive");
    if (c.delta && !(*c.delta > 0.0)) throw ConfigError("delta must be positive or disabled");
    if (!(c.mu >= 0.0 && c.mu <= 1.0)) throw ConfigError("mu must be in [0, 1]");
    if (c.k < 1) throw ConfigError("k must be >= 1");
    if (c.total_blocks < 1) throw ConfigError("total_blocks must be >= 1");
    if (c.total_blocks >= 0xFFFFFFFFULL) throw ConfigError("total_blocks exceeds the id range");
    if (!(c.warmup_fraction >= 0.0 && c.warmup_fraction < 1.0)) {
        throw ConfigError("warmup_fraction must be in [0, 1)");
    }
    if (!(c.tau_factor >= 0.0)) throw ConfigError("tau_factor must be non-negative");
}

Simulation::Simulation(SimConfig config)
    : config_((validate(config), config)),
      rng_(config_.seed),
      store_(std::make_shared<DagStore>()),
      pool_(std::make_shared<TipPool>(config_.delta)) {
    store_->reserve(config_.total_blocks + 1);
    Block genesis;
    genesis.id = kGenesisId;
    genesis.issuer = Issuer::Genesis;
    pool_->insert(*store_, std::move(genesis));
    pool_->advance(*store_, 0.0, removals_);
    record(0.0);
}

void Simulation::record(double time) {
    record(time, static_cast<double>(pool_->tip_count()), static_cast<double>(pool_->occupancy()));
}

void Simulation::record(double time, double tips, double occupancy) {
    const auto push = [time](std::vector<SeriesPoint>& s, double value) {
        if (!s.empty() && s.back().time == time) {
            s.back().value = value;
        } else if (s.empty() || s.back().value != value) {
            s.push_back({time, value});
        }
    };
    push(series_, tips);
    push(occupancy_series_, occupancy);
}

BlockId Simulation::step() {
    const double t = now_ + rng_.exponential(config_.lambda);
    removals_.clear();
    pool_->advance(*store_, t, removals_);
    // Replay the removals to get the counts at each removal instant.
    double tips = series_.back().value;
    double occupancy = occupancy_series_.back().value;
    for (const auto& r : removals_) {
        occupancy -= 1.0;
        if (r.cause == RemovalCause::Expired && !store_->at(r.id).approved_at) tips -= 1.0;
        record(r.time, tips, occupancy);
    }
    now_ = t;
    arrivals_.push_back({t, static_cast<double>(pool_->tip_count())});

    Block block;
    block.id = store_->next_id();
    block.issued_at = t;
    block.visible_at = t + config_.h;
    if (rng_.bernoulli(config_.mu)) {
        block.issuer = Issuer::Honest;
        if (pool_->visible().empty()) {
            ++empty_pool_events_;
            block.parents = select_recent(*store_, config_.k);
        } else {
            block.parents = select_honest(pool_->visible(), config_.k, rng_);
        }
    } else {
        block.issuer = Issuer::Adversary;
        std::optional<double> max_age;
        if (config_.delta) max_age = *config_.delta + config_.h;
        block.parents = select_adversary(adversary_, *store_, config_.k, t, max_age);
        adversary_.last_own_block = block.id;
    }
    const BlockId id = block.id;
    pool_->insert(*store_, std::move(block));
    record(t);
    ++issued_;
    return id;
}

SimResult Simulation::finish() {
    while (!done()) step();

    SimResult r;
    r.config = config_;
    r.t_end = now_;
    r.warmup_end = config_.warmup_fraction * now_;
    r.empty_pool_events = empty_pool_events_;

    const double t0 = r.warmup_end;
    const double t1 = r.t_end;
    if (t1 > t0) {
        r.mean_tip_pool = stats::time_weighted_mean(series_, t0, t1);
        r.mean_occupancy = stats::time_weighted_mean(occupancy_series_, t0, t1);
    } else {
        r.mean_tip_pool = series_.back().value;
        r.mean_occupancy = occupancy_series_.back().value;
    }

    auto first = std::lower_bound(arrivals_.begin(), arrivals_.end(), t0,
                                  [](const SeriesPoint& p, double t) { return p.time < t; });
    std::span<const SeriesPoint> window(first, arrivals_.end());
    if (window.empty()) window = std::span<const SeriesPoint>(arrivals_).last(1);
    std::vector<double> values;
    values.reserve(window.size());
    for (const auto& s : window) values.push_back(s.value);
    r.q25 = stats::quantile(values, 0.25);
    r.median = stats::quantile(values, 0.5);
    r.q75 = stats::quantile(values, 0.75);
    r.growth_slope = stats::linear_slope(window);

    const DagStore& store = *store_;
    const double censor_end = config_.delta ? t1 - (config_.h + *config_.delta) : t1;
    const auto orphan = stats::expiration_orphanage(store, t0, censor_end);
    r.honest_issued = orphan.eligible;
    r.honest_expired = orphan.orphaned;

    double tip_time_sum = 0.0;
    for (const Block& b : store.blocks()) {
        if (b.issuer == Issuer::Honest) {
            ++r.honest_issued_total;
            if (b.removal_cause == RemovalCause::Expired && !b.approved_at) ++r.honest_expired_total;
        }
        if (b.issued_at < t0 || b.issuer == Issuer::Genesis) continue;
        if (b.issuer == Issuer::Adversary) ++r.adversary_issued;
        if (b.approved_at) {
            tip_time_sum += *b.approved_at - b.issued_at;
        } else if (b.removal_cause == RemovalCause::Expired) {
            tip_time_sum += *b.removed_at - b.issued_at;
        } else {
            continue;
        }
        ++r.tip_time_samples;
    }
    if (r.tip_time_samples > 0) r.mean_tip_time = tip_time_sum / static_cast<double>(r.tip_time_samples);

    if (config_.delta) {
        r.future_cone = stats::future_cone_orphanage(store, *pool_, t1,
                                                     config_.tau_factor * *config_.delta, t0);
    }

    if (config_.record_series) {
        r.series = series_;
        r.arrivals = arrivals_;
    }
    if (config_.keep_store) {
        r.final_store = store_;
        r.final_pool = pool_;
    }
    return r;
}

SimResult run(const SimConfig& config) {
    Simulation sim(config);
    return sim.finish();
}

std::vector<SimResult> run_replicated(const SimConfig& config, int runs, unsigned workers) {
    if (runs < 1) throw ConfigError("runs must be >= 1");
    validate(config);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(runs));

    std::vector<SimResult> results(static_cast<std::size_t>(runs));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < runs; i = next++) {
            try {
                SimConfig c = config;
                c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
                results[static_cast<std::size_t>(i)] = run(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace tipsim
