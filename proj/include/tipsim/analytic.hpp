#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

namespace tipsim::analytic {

/// Parameters of the asymptotic tip-pool model. `delta` is the expiration
/// window in the same unit as `h`; nullopt disables expiration.
struct RegimeParams {
    double mu = 1.0;
    int k = 2;
    double h = 1.0;
    double lambda = 100.0;
    std::optional<double> delta;
};

/// Throws std::invalid_argument when a field is outside its domain.
void validate(const RegimeParams& params);

enum class Stability { Stable, Unstable };

std::string_view to_string(Stability stability);

struct StabilityReport {
    Stability stability = Stability::Unstable;
    double drift_lower_bound = 0.0;  // 1 - mu*k, per block
};

/// Stable iff mu*k > 1. The drift bound is the lower bound on the expected
/// per-block change of the tip count.
StabilityReport classify_stability(const RegimeParams& params);

/// Stationary tip-pool size without expiration, mu*k/(mu*k-1) * lambda * h.
/// nullopt when mu*k <= 1 (no stationary size exists).
std::optional<double> tip_pool_no_expiration(const RegimeParams& params);

/// L0 per unit rate without expiration, mu*k*h/(mu*k-1); nullopt when unstable.
std::optional<double> l0_no_expiration(const RegimeParams& params);

/// L * (mu*k - 1 + exp(-delta*mu*k/L)) - mu*k*h. Root of this is L0.
double l0_residual(const RegimeParams& params, double l0);

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root L0 of L = mu*k*h / (mu*k - 1 + exp(-delta*mu*k/L)) with expiration
/// window delta, by bisection on an expanding bracket. Exact h + delta for
/// mu == 0. Requires an enabled, finite delta.
double solve_l0(const RegimeParams& params);

struct ExpirationEstimate {
    double probability = 1.0;
    std::optional<double> upper_bound;  // only when mu*k > 1
};

/// Asymptotic probability that a block expires, exp(-delta*mu*k/L0), and the
/// bound exp(-delta*(mu*k-1)/h).
ExpirationEstimate expiration_probability(const RegimeParams& params);

/// exp(-delta*mu*k/L0) with the no-expiration L0 plugged in. An unstable
/// regime has no finite L0 and yields 1.
double expiration_probability_no_expiration_l0(const RegimeParams& params);

/// Probability that a fixed tip is chosen by one block among `tips`
/// candidates with k uniform draws: 1 - (1 - 1/tips)^k. Requires tips >= 1.
double selection_probability(double tips, int k);

struct AnalyticPrediction {
    Stability stability = Stability::Unstable;
    double drift_lower_bound = 0.0;
    std::optional<double> l0_no_expiration;
    std::optional<double> tip_pool_no_expiration;
    std::optional<double> l0_per_lambda;   // with expiration
    std::optional<double> tip_pool_size;   // l0_per_lambda * lambda
    std::optional<double> expiration_probability;
    std::optional<double> expiration_upper_bound;
    std::optional<double> expiration_probability_no_expiration_l0;
};

AnalyticPrediction predict(const RegimeParams& params);

}  // namespace tipsim::analytic
