#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tipsim/analytic.hpp"
#include "tipsim/engine.hpp"
#include "tipsim/stats.hpp"

namespace tipsim {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "a:b:step" inclusive grid; the endpoint is kept when it lies within
/// step/1e6 of a grid point. Values are rounded to 12 decimals.
std::vector<double> parse_grid(std::string_view text);

/// Comma-separated integers.
std::vector<int> parse_int_list(std::string_view text);

/// "none" disables expiration; otherwise a positive real.
std::optional<double> parse_delta(std::string_view text);

std::string format_delta(const std::optional<double>& delta);

struct SweepSpec {
    std::vector<double> mu_values;
    std::vector<int> k_values;
    std::optional<double> delta = 100.0;
    double lambda = 100.0;
    double h = 1.0;
    int runs = 10;
    std::uint64_t total_blocks = 100000;
    std::uint64_t seed = 0;
    double warmup_fraction = 0.2;
    double tau_factor = 3.0;
    unsigned workers = 0;
};

void validate(const SweepSpec& spec);

struct SweepRow {
    double mu = 0.0;
    int k = 0;
    SimConfig config;  // seed is the cell seed
    int runs = 0;
    stats::AggregateStats sim;
    analytic::AnalyticPrediction theory;

    /// Stationary mean is meaningful unless the regime diverges (mu*k <= 1
    /// without expiration).
    bool has_stationary_mean() const;
};

/// Cell (mu, k) uses seed derive_seed(spec.seed, cell index) where cells are
/// ordered by (k, mu).
SimConfig cell_config(const SweepSpec& spec, double mu, int k, std::size_t cell_index);

/// Runs every cell; rows are ordered by (k, mu).
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kSweepCsvHeader =
    "mu,k,lambda,h,delta,runs,blocks,mean_tip_pool,stderr_tip_pool,q25,q75,growth_slope,"
    "orphanage_rate,orphanage_stderr,analytic_pool_noexp,analytic_l0_exp,analytic_pool_exp,"
    "analytic_orphanage,analytic_orphanage_noexp_l0,stability";

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct Tolerances {
    double pool_relative = 0.10;
    double orphanage_factor = 2.0;
    // Orphanage is only compared when the analytic rate times the number of
    // eligible blocks reaches this many expected events.
    double min_expected_orphans = 10.0;
};

struct CellVerdict {
    double mu = 0.0;
    int k = 0;
    std::optional<double> pool_error;       // relative error, when compared
    std::optional<double> orphanage_ratio;  // simulated / analytic, when compared
    bool pool_checked = false;
    bool orphanage_checked = false;
    bool pass = true;
    std::string note;
};

std::vector<CellVerdict> validate_sweep(std::span<const SweepRow> rows, const Tolerances& tol);

}  // namespace tipsim
