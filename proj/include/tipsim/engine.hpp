#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tipsim/dag_store.hpp"
#include "tipsim/rng.hpp"
#include "tipsim/selection.hpp"
#include "tipsim/tip_pool.hpp"

namespace tipsim {

/// One simulation run. Times are in units of the network delay h.
struct SimConfig {
    double lambda = 100.0;               // blocks per unit time
    double h = 1.0;                      // visibility delay
    std::optional<double> delta = 100.0; // expiration window; nullopt disables
    double mu = 1.0;                     // honest fraction
    int k = 2;                           // references per block
    std::uint64_t total_blocks = 300000;
    double warmup_fraction = 0.2;
    std::uint64_t seed = 0;
    double tau_factor = 3.0;             // future-cone cutoff, in units of delta
    bool record_series = false;
    bool keep_store = false;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws ConfigError on the first violated invariant.
void validate(const SimConfig& config);

/// Value of a piecewise-constant series from `time` until the next point.
struct SeriesPoint {
    double time = 0.0;
    double value = 0.0;
};

struct FateEstimate {
    std::optional<double> rate;  // nullopt when nothing is eligible
    std::uint64_t eligible = 0;
    std::uint64_t orphaned = 0;
};

struct SimResult {
    SimConfig config;
    double t_end = 0.0;
    double warmup_end = 0.0;

    // L(t) over [warmup_end, t_end].
    double mean_tip_pool = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double growth_slope = 0.0;  // OLS slope of per-arrival L samples, tips per unit time
    double mean_occupancy = 0.0;  // |visible| + |hidden|

    // Honest blocks issued in [warmup_end, t_end - (h + delta)] and how many of
    // them were expiration orphaned. Without expiration the window ends at t_end.
    std::uint64_t honest_issued = 0;
    std::uint64_t honest_expired = 0;
    std::uint64_t adversary_issued = 0;  // post-warmup
    std::uint64_t honest_issued_total = 0;
    std::uint64_t honest_expired_total = 0;  // whole run, uncensored
    std::uint64_t empty_pool_events = 0;

    // Mean tip time of post-warmup blocks whose fate is decided (Little's law).
    double mean_tip_time = 0.0;
    std::uint64_t tip_time_samples = 0;

    FateEstimate future_cone;  // only with expiration

    std::vector<SeriesPoint> series;    // L(t) step series, if record_series
    std::vector<SeriesPoint> arrivals;  // per-arrival L samples, if record_series
    std::shared_ptr<const DagStore> final_store;  // if keep_store
    std::shared_ptr<const TipPool> final_pool;    // if keep_store
};

/// Event loop of one run: Poisson arrivals at rate lambda, Bernoulli(mu)
/// issuer, parents from the visible pool (honest) or the own chain
/// (adversary). Can be stepped for inspection.
class Simulation {
public:
    explicit Simulation(SimConfig config);

    bool done() const { return issued_ >= config_.total_blocks; }
    std::uint64_t issued() const { return issued_; }

    /// Draws the next arrival, advances the pool to it, selects parents and
    /// inserts the block. Returns the new block id.
    BlockId step();

    /// Steps until done and computes the result.
    SimResult finish();

    const SimConfig& config() const { return config_; }
    const DagStore& store() const { return *store_; }
    const TipPool& pool() const { return *pool_; }
    double now() const { return now_; }
    std::uint64_t empty_pool_events() const { return empty_pool_events_; }
    std::span<const Removal> last_removals() const { return removals_; }

private:
    void record(double time);
    void record(double time, double tips, double occupancy);

    SimConfig config_;
    Rng rng_;
    std::shared_ptr<DagStore> store_;
    std::shared_ptr<TipPool> pool_;
    AdversaryState adversary_;
    double now_ = 0.0;
    std::uint64_t issued_ = 0;
    std::uint64_t empty_pool_events_ = 0;
    std::vector<Removal> removals_;
    std::vector<SeriesPoint> series_;
    std::vector<SeriesPoint> occupancy_series_;
    std::vector<SeriesPoint> arrivals_;
};

SimResult run(const SimConfig& config);

/// Runs replications with seeds derive_seed(config.seed, i). The returned
/// list is indexed by replication regardless of scheduling. `workers` == 0
/// uses the hardware concurrency.
std::vector<SimResult> run_replicated(const SimConfig& config, int runs, unsigned workers = 0);

}  // namespace tipsim
