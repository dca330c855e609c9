#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tipsim/dag_store.hpp"
#include "tipsim/engine.hpp"
#include "tipsim/tip_pool.hpp"

namespace tipsim::stats {

/// Integral of a step series over [t0, t1] divided by t1 - t0. The series
/// must start at or before t0; the last value extends to t1.
double time_weighted_mean(std::span<const SeriesPoint> series, double t0, double t1);

/// Quantile with linear interpolation between order statistics
/// (position q * (n - 1) in the sorted sample). Throws on an empty sample.
double quantile(std::vector<double> values, double q);

/// Ordinary least-squares slope of value against time; 0 for fewer than two
/// distinct times.
double linear_slope(std::span<const SeriesPoint> samples);

struct TipClasses {
    std::size_t hidden = 0;      // issued within the last h, not yet visible
    std::size_t real = 0;        // visible and not approved by any block
    std::size_t false_tips = 0;  // visible but approved by a still-hidden block
    std::size_t total() const { return hidden + real + false_tips; }
};

/// Partition of the pool occupancy at time t by scanning the pool.
/// Requires the pool to be advanced to t.
TipClasses classify_tips(const DagStore& store, const TipPool& pool, double t);

/// Honest blocks issued in [window_start, window_end] that expired without
/// ever being approved.
FateEstimate expiration_orphanage(const DagStore& store, double window_start, double window_end);

/// Rate from a run's censored counters; undefined without expiration or
/// without eligible blocks.
FateEstimate orphanage_rate(const SimResult& result);

/// Honest blocks issued in [window_start, t_end - tau] that are not in the
/// past cone of the current tips or of any block issued in (t_end - tau,
/// t_end]. A lower bound on the true future-cone orphanage.
FateEstimate future_cone_orphanage(const DagStore& store, const TipPool& pool, double t_end,
                                   double tau, double window_start = 0.0);

/// Per-run metrics that get aggregated across replications.
struct RunStats {
    SimConfig config;
    double mean_tip_pool = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double growth_slope = 0.0;
    std::optional<double> orphanage_rate;
    std::optional<double> future_cone_rate;
    std::uint64_t honest_eligible = 0;
};

RunStats run_stats(const SimResult& result);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;     // n - 1 denominator; 0 for a single value
    double std_error = 0.0;  // stddev / sqrt(n)
    std::size_t count = 0;
};

/// Order-independent: values are sorted before summation.
MetricSummary summarize(std::span<const double> values);

struct AggregateStats {
    std::size_t runs = 0;
    MetricSummary mean_tip_pool;
    MetricSummary q25;
    MetricSummary q75;
    MetricSummary growth_slope;
    MetricSummary orphanage_rate;    // over runs where it is defined
    MetricSummary future_cone_rate;  // over runs where it is defined
    std::uint64_t honest_eligible = 0;
};

/// Throws std::invalid_argument on an empty list or when runs differ in
/// anything but the seed.
AggregateStats aggregate(std::span<const RunStats> runs);

}  // namespace tipsim::stats
