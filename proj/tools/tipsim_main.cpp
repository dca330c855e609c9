// tipsim: tip-pool simulator and analytic model for DAG-based ledgers.
//
//   tipsim simulate --mu 1 --k 2 --delta none --blocks 100000 --runs 10 --seed 7
//   tipsim sweep --mu-grid 0:1:0.05 --k-list 2,4,8 --delta 100 --out fig3.csv
//   tipsim analytic --mu 1 --k 2 --h 1 --delta 100
//   tipsim validate --mu-grid 0.6:1:0.2 --k 2 --delta 100
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tipsim/analytic.hpp"
#include "tipsim/engine.hpp"
#include "tipsim/experiment.hpp"
#include "tipsim/format.hpp"
#include "tipsim/stats.hpp"

using namespace tipsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::optional<std::string> mu;  // single value or comma list
    std::optional<std::string> mu_grid;
    std::optional<int> k;
    std::optional<std::string> k_list;
    double lambda = 100.0;
    double h = 1.0;
    std::string delta = "100";
    std::uint64_t blocks = 100000;
    int runs = 10;
    std::optional<std::uint64_t> seed;
    double warmup = 0.2;
    double tau_factor = 3.0;
    unsigned workers = 0;
    bool paper_scale = false;
    std::string out;
    std::string dump_dag;
    double tol_pool = 0.10;
    double tol_orphan = 2.0;
    bool default_grid = false;  // mu 0:1:0.05 and k 1..8 when not given
};

void add_regime_options(CLI::App& cmd, Options& o) {
    cmd.set_help_flag("--help", "Print this help message and exit");
    cmd.add_option("--mu", o.mu, "Honest fraction (single value or comma list)");
    cmd.add_option("--mu-grid", o.mu_grid, "Honest fraction grid a:b:step");
    cmd.add_option("--k", o.k, "References per block");
    cmd.add_option("--k-list", o.k_list, "Comma-separated list of k");
    cmd.add_option("--lambda", o.lambda, "Blocks per unit h")->capture_default_str();
    cmd.add_option("--h", o.h, "Network delay")->capture_default_str();
    cmd.add_option("--delta", o.delta, "Expiration window in units of h, or 'none'")
        ->capture_default_str();
}

void add_run_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--blocks", o.blocks, "Blocks per run")->capture_default_str();
    cmd.add_option("--runs", o.runs, "Replications per cell")->capture_default_str();
    cmd.add_option("--seed", o.seed, "Base seed (generated and printed when absent)");
    cmd.add_option("--warmup", o.warmup, "Discarded fraction of simulated time")
        ->capture_default_str();
    cmd.add_option("--tau-factor", o.tau_factor, "Future-cone cutoff in units of delta")
        ->capture_default_str();
    cmd.add_option("--workers", o.workers, "Worker threads (0 = hardware)")->capture_default_str();
    cmd.add_flag("--paper-scale", o.paper_scale, "100 runs of 300000 blocks");
}

std::vector<double> mu_values(const Options& o) {
    if (o.mu && o.mu_grid) throw UsageError("use either --mu or --mu-grid");
    if (o.mu_grid) return parse_grid(*o.mu_grid);
    if (!o.mu) {
        if (o.default_grid) return parse_grid("0:1:0.05");
        throw UsageError("--mu or --mu-grid is required");
    }
    std::vector<double> out;
    std::stringstream ss(*o.mu);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto g = parse_grid(item + ":" + item + ":1");
        out.push_back(g.front());
    }
    for (double mu : out) {
        if (!(mu >= 0.0 && mu <= 1.0)) throw UsageError("mu must be in [0, 1]");
    }
    return out;
}

std::vector<int> k_values(const Options& o) {
    if (o.k && o.k_list) throw UsageError("use either --k or --k-list");
    std::vector<int> out;
    if (o.k_list) {
        out = parse_int_list(*o.k_list);
    } else if (o.k) {
        out = {*o.k};
    } else if (o.default_grid) {
        out = {1, 2, 3, 4, 5, 6, 7, 8};
    } else {
        throw UsageError("--k or --k-list is required");
    }
    for (int k : out) {
        if (k < 1) throw UsageError("k must be ≥ 1");
    }
    return out;
}

std::uint64_t resolve_seed(const Options& o) {
    if (o.seed) return *o.seed;
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "generated seed: " << seed << "\n";
    return seed;
}

SweepSpec make_spec(const Options& o) {
    SweepSpec spec;
    spec.mu_values = mu_values(o);
    spec.k_values = k_values(o);
    spec.delta = parse_delta(o.delta);
    spec.lambda = o.lambda;
    spec.h = o.h;
    spec.runs = o.paper_scale ? 100 : o.runs;
    spec.total_blocks = o.paper_scale ? 300000 : o.blocks;
    spec.warmup_fraction = o.warmup;
    spec.tau_factor = o.tau_factor;
    spec.workers = o.workers;
    validate(spec);
    spec.seed = resolve_seed(o);
    return spec;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.imbue(std::locale::classic());
    return out;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

int cmd_simulate(const Options& o) {
    SweepSpec spec = make_spec(o);
    if (spec.mu_values.size() != 1 || spec.k_values.size() != 1) {
        throw UsageError("simulate takes a single --mu and --k");
    }
    SimConfig config = cell_config(spec, spec.mu_values[0], spec.k_values[0], 0);
    config.seed = spec.seed;
    config.record_series = !o.out.empty();
    config.keep_store = !o.dump_dag.empty();

    const auto results = run_replicated(config, spec.runs, spec.workers);
    std::vector<stats::RunStats> per_run;
    double little_lhs = 0.0;
    std::uint64_t empty_events = 0;
    for (const auto& r : results) {
        per_run.push_back(stats::run_stats(r));
        little_lhs += config.lambda * r.mean_tip_time;
        empty_events += r.empty_pool_events;
    }
    little_lhs /= static_cast<double>(results.size());
    const auto agg = stats::aggregate(per_run);
    const analytic::RegimeParams params{config.mu, config.k, config.h, config.lambda, config.delta};
    const auto theory = analytic::predict(params);
    const bool stationary = config.delta || theory.stability == analytic::Stability::Stable;

    std::cout << "config: mu=" << format_number(config.mu) << " k=" << config.k
              << " lambda=" << format_number(config.lambda) << " h=" << format_number(config.h)
              << " delta=" << format_delta(config.delta) << " blocks=" << config.total_blocks
              << " runs=" << spec.runs << " seed=" << spec.seed
              << " warmup=" << format_number(config.warmup_fraction) << "\n";
    std::cout << "stability: " << analytic::to_string(theory.stability)
              << " (drift bound per block " << format_number(theory.drift_lower_bound) << ")\n";
    if (stationary) {
        std::cout << "mean tip pool: " << format_number(agg.mean_tip_pool.mean) << " (stderr "
                  << format_number(agg.mean_tip_pool.std_error) << ", q25 "
                  << format_number(agg.q25.mean) << ", q75 " << format_number(agg.q75.mean) << ")\n";
        std::cout << "little's law: lambda * mean tip time = " << format_number(little_lhs) << "\n";
    } else {
        std::cout << "mean tip pool: none (diverging regime)\n";
    }
    std::cout << "growth slope: " << format_number(agg.growth_slope.mean) << " tips per unit h\n";
    if (config.delta) {
        std::cout << "orphanage rate: "
                  << (agg.orphanage_rate.count ? format_number(agg.orphanage_rate.mean) : "undefined")
                  << " (stderr " << format_number(agg.orphanage_rate.std_error) << ", eligible "
                  << agg.honest_eligible << ")\n";
        std::cout << "future-cone orphanage (lower bound): "
                  << (agg.future_cone_rate.count ? format_number(agg.future_cone_rate.mean)
                                                 : "undefined")
                  << "\n";
    }
    std::cout << "empty-pool events: " << empty_events << "\n";
    std::cout << "analytic: pool w/o expiration " << opt_str(theory.tip_pool_no_expiration)
              << ", L0 with expiration " << opt_str(theory.l0_per_lambda) << ", pool with expiration "
              << opt_str(theory.tip_pool_size) << ", orphanage "
              << opt_str(theory.expiration_probability) << "\n";

    if (!o.out.empty()) {
        auto out = open_output(o.out);
        out << "run,time,tip_pool\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            for (const auto& s : results[i].arrivals) {
                out << i << ',' << format_number(s.time) << ',' << format_number(s.value) << '\n';
            }
        }
    }
    if (!o.dump_dag.empty()) {
        auto out = open_output(o.dump_dag);
        write_dag_csv(out, *results.front().final_store);
    }
    return kExitOk;
}

int cmd_sweep(const Options& o) {
    const SweepSpec spec = make_spec(o);
    if (o.out.empty()) throw UsageError("sweep requires --out");
    const auto rows = run_sweep(spec);
    auto out = open_output(o.out);
    write_sweep_csv(out, rows);
    if (!out) throw std::runtime_error("failed writing '" + o.out + "'");
    std::cout << "wrote " << rows.size() << " rows to " << o.out << " (seed " << spec.seed << ")\n";
    return kExitOk;
}

int cmd_analytic(const Options& o) {
    const auto mus = mu_values(o);
    const auto ks = k_values(o);
    const auto delta = parse_delta(o.delta);
    std::cout << std::left << std::setw(8) << "mu" << std::setw(4) << "k" << std::setw(10)
              << "stability" << std::setw(22) << "drift" << std::setw(14) << "L0_noexp"
              << std::setw(14) << "pool_noexp" << std::setw(24) << "L0_exp" << std::setw(24)
              << "pool_exp" << std::setw(24) << "orphanage" << std::setw(24) << "bound"
              << "orphanage_noexp_L0\n";
    for (int k : ks) {
        for (double mu : mus) {
            analytic::RegimeParams p{mu, k, o.h, o.lambda, delta};
            try {
                analytic::validate(p);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto th = analytic::predict(p);
            std::cout << std::setw(8) << format_number(mu) << std::setw(4) << k << std::setw(10)
                      << analytic::to_string(th.stability) << std::setw(22)
                      << format_number(th.drift_lower_bound) << std::setw(14)
                      << opt_str(th.l0_no_expiration) << std::setw(14)
                      << opt_str(th.tip_pool_no_expiration) << std::setw(24)
                      << opt_str(th.l0_per_lambda) << std::setw(24) << opt_str(th.tip_pool_size)
                      << std::setw(24) << opt_str(th.expiration_probability) << std::setw(24)
                      << opt_str(th.expiration_upper_bound)
                      << opt_str(th.expiration_probability_no_expiration_l0) << "\n";
        }
    }
    return kExitOk;
}

int cmd_validate(const Options& o) {
    const SweepSpec spec = make_spec(o);
    Tolerances tol;
    tol.pool_relative = o.tol_pool;
    tol.orphanage_factor = o.tol_orphan;
    if (!(tol.pool_relative >= 0.0)) throw UsageError("--tol-pool must be non-negative");
    if (!(tol.orphanage_factor >= 1.0)) throw UsageError("--tol-orphan must be >= 1");
    const auto rows = run_sweep(spec);
    if (!o.out.empty()) {
        auto out = open_output(o.out);
        write_sweep_csv(out, rows);
    }
    const auto verdicts = validate_sweep(rows, tol);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        const auto& row = rows[i];
        std::cout << (v.pass ? "PASS" : "FAIL") << "  mu=" << format_number(v.mu) << " k=" << v.k
                  << " sim_pool=" << format_number(row.sim.mean_tip_pool.mean)
                  << " pool_err=" << opt_str(v.pool_error)
                  << " orphan_ratio=" << opt_str(v.orphanage_ratio);
        if (!v.note.empty()) std::cout << "  [" << v.note << "]";
        std::cout << "\n";
        if (!v.pass) ++failures;
    }
    if (failures > 0) {
        std::cout << failures << " of " << verdicts.size() << " cells failed\n";
        return kExitFailure;
    }
    std::cout << "all " << verdicts.size() << " cells passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tip-pool simulator and analytic model for DAG-based ledgers"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Run one replicated experiment");
    add_regime_options(*simulate, o);
    add_run_options(*simulate, o);
    simulate->add_option("--out", o.out, "Per-arrival series CSV");
    simulate->add_option("--dump-dag", o.dump_dag, "DAG dump of the first run");

    auto* sweep = app.add_subcommand("sweep", "Run a (mu, k) grid and write the sweep CSV");
    add_regime_options(*sweep, o);
    add_run_options(*sweep, o);
    sweep->add_option("--out", o.out, "Sweep CSV path")->required();

    auto* analytic_cmd = app.add_subcommand("analytic", "Print analytic predictions");
    add_regime_options(*analytic_cmd, o);

    auto* validate_cmd = app.add_subcommand("validate", "Compare simulation against theory");
    add_regime_options(*validate_cmd, o);
    add_run_options(*validate_cmd, o);
    validate_cmd->add_option("--out", o.out, "Optional sweep CSV path");
    validate_cmd->add_option("--tol-pool", o.tol_pool, "Relative pool-size tolerance")
        ->capture_default_str();
    validate_cmd->add_option("--tol-orphan", o.tol_orphan, "Orphanage ratio tolerance factor")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        o.default_grid = !simulate->parsed();
        if (simulate->parsed()) return cmd_simulate(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (analytic_cmd->parsed()) return cmd_analytic(o);
        if (validate_cmd->parsed()) return cmd_validate(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
