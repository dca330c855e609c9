#include "tipsim/experiment.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "tipsim/format.hpp"
#include "tipsim/rng.hpp"

namespace tipsim {

namespace {

double parse_real(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw UsageError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be a:b:step, got '" + std::string(text) + "'");
    const double a = parse_real(parts[0], "grid start");
    const double b = parse_real(parts[1], "grid end");
    const double step = parse_real(parts[2], "grid step");
    if (!(step > 0.0)) throw UsageError("grid step must be positive");
    if (b < a) throw UsageError("grid end must not be below its start");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-6)) + 1;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = a + static_cast<double>(i) * step;
        out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    for (auto part : split(text, ',')) {
        int value = 0;
        const char* end = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(part.data(), end, value);
        if (part.empty() || ec != std::errc{} || ptr != end) {
            throw UsageError("invalid integer list entry '" + std::string(part) + "'");
        }
        out.push_back(value);
    }
    return out;
}

std::optional<double> parse_delta(std::string_view text) {
    if (text == "none") return std::nullopt;
    const double d = parse_real(text, "delta");
    if (!(d > 0.0)) throw UsageError("delta must be positive or 'none'");
    return d;
}

std::string format_delta(const std::optional<double>& delta) {
    return delta ? format_number(*delta) : std::string("none");
}

void validate(const SweepSpec& spec) {
    if (spec.mu_values.empty()) throw UsageError("mu grid is empty");
    if (spec.k_values.empty()) throw UsageError("k list is empty");
    for (double mu : spec.mu_values) {
        if (!(mu >= 0.0 && mu <= 1.0)) throw UsageError("mu must be in [0, 1]");
    }
    for (int k : spec.k_values) {
        if (k < 1) throw UsageError("k must be >= 1");
    }
    if (spec.runs < 1) throw UsageError("runs must be >= 1");
    SimConfig probe = cell_config(spec, spec.mu_values.front(), spec.k_values.front(), 0);
    try {
        validate(probe);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

bool SweepRow::has_stationary_mean() const {
    return config.delta.has_value() || theory.stability == analytic::Stability::Stable;
}

SimConfig cell_config(const SweepSpec& spec, double mu, int k, std::size_t cell_index) {
    SimConfig c;
    c.lambda = spec.lambda;
    c.h = spec.h;
    c.delta = spec.delta;
    c.mu = mu;
    c.k = k;
    c.total_blocks = spec.total_blocks;
    c.warmup_fraction = spec.warmup_fraction;
    c.tau_factor = spec.tau_factor;
    c.seed = derive_seed(spec.seed, cell_index);
    return c;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    validate(spec);
    std::vector<SweepRow> rows;
    std::size_t cell = 0;
    for (int k : spec.k_values) {
        for (double mu : spec.mu_values) {
            SweepRow row;
            row.mu = mu;
            row.k = k;
            row.runs = spec.runs;
            row.config = cell_config(spec, mu, k, cell++);
            const auto results = run_replicated(row.config, spec.runs, spec.workers);
            std::vector<stats::RunStats> per_run;
            per_run.reserve(results.size());
            for (const auto& r : results) per_run.push_back(stats::run_stats(r));
            row.sim = stats::aggregate(per_run);
            row.theory = analytic::predict({mu, k, spec.h, spec.lambda, spec.delta});
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << kSweepCsvHeader << '\n';
    for (const auto& row : rows) {
        const auto& c = row.config;
        const auto& th = row.theory;
        const bool stationary = row.has_stationary_mean();
        const bool orphan = c.delta && row.sim.orphanage_rate.count > 0;
        const auto opt = [](bool on, double v) { return on ? format_number(v) : std::string{}; };
        out << format_number(row.mu) << ',' << row.k << ',' << format_number(c.lambda) << ','
            << format_number(c.h) << ',' << format_delta(c.delta) << ',' << row.runs << ','
            << c.total_blocks << ',' << opt(stationary, row.sim.mean_tip_pool.mean) << ','
            << opt(stationary, row.sim.mean_tip_pool.std_error) << ','
            << opt(stationary, row.sim.q25.mean) << ',' << opt(stationary, row.sim.q75.mean) << ','
            << format_number(row.sim.growth_slope.mean) << ','
            << opt(orphan, row.sim.orphanage_rate.mean) << ','
            << opt(orphan, row.sim.orphanage_rate.std_error) << ','
            << format_optional(th.tip_pool_no_expiration) << ',' << format_optional(th.l0_per_lambda)
            << ',' << format_optional(th.tip_pool_size) << ','
            << format_optional(th.expiration_probability) << ','
            << format_optional(th.expiration_probability_no_expiration_l0) << ','
            << analytic::to_string(th.stability) << '\n';
    }
}

std::vector<CellVerdict> validate_sweep(std::span<const SweepRow> rows, const Tolerances& tol) {
    std::vector<CellVerdict> out;
    for (const auto& row : rows) {
        CellVerdict v;
        v.mu = row.mu;
        v.k = row.k;
        const auto& th = row.theory;
        const std::optional<double> expected_pool =
            row.config.delta ? th.tip_pool_size : th.tip_pool_no_expiration;
        if (expected_pool) {
            v.pool_checked = true;
            v.pool_error = std::abs(row.sim.mean_tip_pool.mean - *expected_pool) / *expected_pool;
            if (!(*v.pool_error <= tol.pool_relative)) {
                v.pass = false;
                v.note += "pool size off by " + format_number(*v.pool_error * 100.0) + "%; ";
            }
        } else {
            v.note += "pool size not compared (unstable without expiration); ";
        }
        if (row.config.delta && th.expiration_probability) {
            const double expected_events =
                *th.expiration_probability * static_cast<double>(row.sim.honest_eligible);
            if (expected_events >= tol.min_expected_orphans && row.sim.orphanage_rate.count > 0) {
                v.orphanage_checked = true;
                v.orphanage_ratio = row.sim.orphanage_rate.mean / *th.expiration_probability;
                const double r = *v.orphanage_ratio;
                if (!(r > 0.0 && std::abs(std::log(r)) <= std::log(tol.orphanage_factor))) {
                    v.pass = false;
                    v.note += "orphanage ratio " + format_number(r) + "; ";
                }
            } else {
                v.note += "orphanage not compared (too few expected events); ";
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace tipsim
