#include "tipsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tipsim::stats {

double time_weighted_mean(std::span<const SeriesPoint> series, double t0, double t1) {
    if (!(t1 > t0)) throw std::domain_error("time_weighted_mean: empty window");
    if (series.empty() || series.front().time > t0) {
        throw std::domain_error("time_weighted_mean: series does not cover the window");
    }
    // Last point at or before t0.
    auto it = std::upper_bound(series.begin(), series.end(), t0,
                               [](double t, const SeriesPoint& p) { return t < p.time; });
    --it;
    double area = 0.0;
    double cursor = t0;
    double value = it->value;
    for (++it; it != series.end() && it->time < t1; ++it) {
        area += value * (it->time - cursor);
        cursor = it->time;
        value = it->value;
    }
    area += value * (t1 - cursor);
    return area / (t1 - t0);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::domain_error("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double linear_slope(std::span<const SeriesPoint> samples) {
    if (samples.size() < 2) return 0.0;
    const double n = static_cast<double>(samples.size());
    double mean_t = 0.0;
    double mean_v = 0.0;
    for (const auto& s : samples) {
        mean_t += s.time;
        mean_v += s.value;
    }
    mean_t /= n;
    mean_v /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double dt = s.time - mean_t;
        sxx += dt * dt;
        sxy += dt * (s.value - mean_v);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

TipClasses classify_tips(const DagStore& store, const TipPool& pool, double t) {
    if (pool.now() != t) throw std::invalid_argument("classify_tips: pool is not at time t");
    TipClasses out;
    out.hidden = pool.hidden_count();
    for (BlockId id : pool.visible()) {
        if (store.at(id).approved_at) {
            ++out.false_tips;
        } else {
            ++out.real;
        }
    }
    return out;
}

FateEstimate expiration_orphanage(const DagStore& store, double window_start, double window_end) {
    FateEstimate out;
    for (const Block& b : store.blocks()) {
        if (b.issuer != Issuer::Honest) continue;
        if (b.issued_at < window_start || b.issued_at > window_end) continue;
        ++out.eligible;
        if (b.removal_cause == RemovalCause::Expired && !b.approved_at) ++out.orphaned;
    }
    if (out.eligible > 0) {
        out.rate = static_cast<double>(out.orphaned) / static_cast<double>(out.eligible);
    }
    return out;
}

FateEstimate orphanage_rate(const SimResult& result) {
    FateEstimate out;
    out.eligible = result.honest_issued;
    out.orphaned = result.honest_expired;
    if (result.config.delta && out.eligible > 0) {
        out.rate = static_cast<double>(out.orphaned) / static_cast<double>(out.eligible);
    }
    return out;
}

FateEstimate future_cone_orphanage(const DagStore& store, const TipPool& pool, double t_end,
                                   double tau, double window_start) {
    const double cutoff = t_end - tau;
    std::vector<BlockId> roots(pool.visible().begin(), pool.visible().end());
    for (BlockId id : pool.hidden_blocks()) roots.push_back(id);
    // Blocks are in issuance order, so the recent ones form a suffix.
    for (std::size_t i = store.size(); i-- > 0;) {
        if (store.blocks()[i].issued_at <= cutoff) break;
        roots.push_back(static_cast<BlockId>(i));
    }
    const auto reached = ancestor_mask(store, roots);

    FateEstimate out;
    for (const Block& b : store.blocks()) {
        if (b.issued_at > cutoff) break;
        if (b.issuer != Issuer::Honest || b.issued_at < window_start) continue;
        ++out.eligible;
        if (!reached[b.id]) ++out.orphaned;
    }
    if (out.eligible > 0) {
        out.rate = static_cast<double>(out.orphaned) / static_cast<double>(out.eligible);
    }
    return out;
}

RunStats run_stats(const SimResult& result) {
    RunStats s;
    s.config = result.config;
    s.mean_tip_pool = result.mean_tip_pool;
    s.q25 = result.q25;
    s.q75 = result.q75;
    s.growth_slope = result.growth_slope;
    s.orphanage_rate = orphanage_rate(result).rate;
    s.future_cone_rate = result.future_cone.rate;
    s.honest_eligible = result.honest_issued;
    return s;
}

MetricSummary summarize(std::span<const double> values) {
    MetricSummary m;
    m.count = values.size();
    if (values.empty()) return m;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    m.mean = sum / static_cast<double>(m.count);
    if (m.count > 1) {
        std::vector<double> sq;
        sq.reserve(sorted.size());
        for (double v : sorted) sq.push_back((v - m.mean) * (v - m.mean));
        std::sort(sq.begin(), sq.end());
        double ss = 0.0;
        for (double v : sq) ss += v;
        m.stddev = std::sqrt(ss / static_cast<double>(m.count - 1));
        m.std_error = m.stddev / std::sqrt(static_cast<double>(m.count));
    }
    return m;
}

namespace {

bool same_experiment(const SimConfig& a, const SimConfig& b) {
    return a.lambda == b.lambda && a.h == b.h && a.delta == b.delta && a.mu == b.mu && a.k == b.k &&
           a.total_blocks == b.total_blocks && a.warmup_fraction == b.warmup_fraction &&
           a.tau_factor == b.tau_factor;
}

}  // namespace

AggregateStats aggregate(std::span<const RunStats> runs) {
    if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
    for (const auto& r : runs) {
        if (!same_experiment(r.config, runs.front().config)) {
            throw std::invalid_argument("aggregate: runs come from different configurations");
        }
    }
    std::vector<double> mean, q25, q75, slope, orphan, cone;
    AggregateStats out;
    out.runs = runs.size();
    for (const auto& r : runs) {
        mean.push_back(r.mean_tip_pool);
        q25.push_back(r.q25);
        q75.push_back(r.q75);
        slope.push_back(r.growth_slope);
        if (r.orphanage_rate) orphan.push_back(*r.orphanage_rate);
        if (r.future_cone_rate) cone.push_back(*r.future_cone_rate);
        out.honest_eligible += r.honest_eligible;
    }
    out.mean_tip_pool = summarize(mean);
    out.q25 = summarize(q25);
    out.q75 = summarize(q75);
    out.growth_slope = summarize(slope);
    out.orphanage_rate = summarize(orphan);
    out.future_cone_rate = summarize(cone);
    return out;
}

}  // namespace tipsim::stats
