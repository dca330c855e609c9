#include "tipsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tipsim::analytic {

void validate(const RegimeParams& p) {
    if (!(p.mu >= 0.0 && p.mu <= 1.0)) throw std::invalid_argument("mu must be in [0, 1]");
    if (p.k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(p.h > 0.0) || !std::isfinite(p.h)) throw std::invalid_argument("h must be positive");
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) {
        throw std::invalid_argument("lambda must be positive");
    }
    if (p.delta && !(*p.delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

std::string_view to_string(Stability stability) {
    return stability == Stability::Stable ? "Stable" : "Unstable";
}

StabilityReport classify_stability(const RegimeParams& p) {
    validate(p);
    const double muk = p.mu * p.k;
    return {muk > 1.0 ? Stability::Stable : Stability::Unstable, 1.0 - muk};
}

std::optional<double> l0_no_expiration(const RegimeParams& p) {
    validate(p);
    const double muk = p.mu * p.k;
    if (!(muk > 1.0)) return std::nullopt;
    return muk * p.h / (muk - 1.0);
}

std::optional<double> tip_pool_no_expiration(const RegimeParams& p) {
    auto l0 = l0_no_expiration(p);
    if (!l0) return std::nullopt;
    return *l0 * p.lambda;
}

double l0_residual(const RegimeParams& p, double l0) {
    const double muk = p.mu * p.k;
    return l0 * (muk - 1.0 + std::exp(-*p.delta * muk / l0)) - muk * p.h;
}

double solve_l0(const RegimeParams& p) {
    validate(p);
    if (!p.delta || !std::isfinite(*p.delta)) {
        throw std::invalid_argument("solve_l0 requires a finite expiration window");
    }
    const double delta = *p.delta;
    if (p.mu == 0.0) return p.h + delta;

    const double muk = p.mu * p.k;
    const auto f = [&](double l) { return l0_residual(p, l); };

    double lo = p.h * 1e-6;
    double hi = 2.0 * (p.h + delta);
    if (muk != 1.0) hi = std::max(hi, 4.0 * p.h * muk / std::abs(muk - 1.0));

    double f_lo = f(lo);
    while (f_lo >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw NumericError("solve_l0: no lower bracket");
        f_lo = f(lo);
    }
    double f_hi = f(hi);
    while (f_hi <= 0.0) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericError("solve_l0: no upper bracket");
        f_hi = f(hi);
    }

    // Bisect until the bracket no longer shrinks.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = f(mid);
        if (!std::isfinite(f_mid)) {
            throw NumericError("solve_l0: non-finite residual at L=" + std::to_string(mid));
        }
        if (f_mid == 0.0) return mid;
        if (f_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    if (!std::isfinite(root)) throw NumericError("solve_l0: non-finite root");
    return root;
}

ExpirationEstimate expiration_probability(const RegimeParams& p) {
    const double l0 = solve_l0(p);
    const double muk = p.mu * p.k;
    ExpirationEstimate est;
    est.probability = std::exp(-*p.delta * muk / l0);
    if (muk > 1.0) est.upper_bound = std::exp(-*p.delta * (muk - 1.0) / p.h);
    return est;
}

double expiration_probability_no_expiration_l0(const RegimeParams& p) {
    if (!p.delta) throw std::invalid_argument("expiration probability requires delta");
    auto l0 = l0_no_expiration(p);
    if (!l0) return 1.0;
    return std::exp(-*p.delta * p.mu * p.k / *l0);
}

double selection_probability(double tips, int k) {
    if (!(tips >= 1.0)) throw std::domain_error("selection_probability requires at least one tip");
    if (k < 1) throw std::domain_error("k must be >= 1");
    return 1.0 - std::pow(1.0 - 1.0 / tips, k);
}

AnalyticPrediction predict(const RegimeParams& p) {
    AnalyticPrediction out;
    const auto stab = classify_stability(p);
    out.stability = stab.stability;
    out.drift_lower_bound = stab.drift_lower_bound;
    out.l0_no_expiration = l0_no_expiration(p);
    out.tip_pool_no_expiration = tip_pool_no_expiration(p);
    if (p.delta) {
        const double l0 = solve_l0(p);
        out.l0_per_lambda = l0;
        out.tip_pool_size = l0 * p.lambda;
        const auto exp_est = expiration_probability(p);
        out.expiration_probability = exp_est.probability;
        out.expiration_upper_bound = exp_est.upper_bound;
        out.expiration_probability_no_expiration_l0 = expiration_probability_no_expiration_l0(p);
    }
    return out;
}

}  // namespace tipsim::analytic
