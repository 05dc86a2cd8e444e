#pragma once

// Closed-form utility moments for additive (Gumbel marginals) and
// multiplicative (reversed Weibull marginals) models, plus the conditional
// moments of reference-route utilities.

#include "gmev/error.hpp"
#include "gmev/generating.hpp"
#include "gmev/network.hpp"
#include "gmev/vectors.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace gmev {

struct moment_report {
    vector mean;
    vector variance;
    std::optional<double> expected_max;  // absent for reference-route models
};

namespace detail {

inline vector unit_values(const generating_function& g, Eigen::Index n) {
    vector g1(n);
    for (Eigen::Index r = 0; r < n; ++r) g1[r] = unit_value(g, r, n);
    return g1;
}

// Gamma(1 + 2/mu) - Gamma(1 + 1/mu)^2
inline double weibull_spread(double mu) {
    const double g1 = std::tgamma(1.0 + 1.0 / mu);
    return std::tgamma(1.0 + 2.0 / mu) - g1 * g1;
}

}  // namespace detail

/// Mean V_r + (ln G(1_r) + gamma)/mu, constant variance pi^2/(6 mu^2),
/// expected maximum (ln G(e^V) + gamma)/mu.
inline moment_report additive_moments(const generating_function& g, const vector& v) {
    const double mu = scale(g);
    const auto n = v.size();
    const vector g1 = detail::unit_values(g, n);
    moment_report rep;
    rep.mean = (v.array() + (g1.array().log() + std::numbers::egamma) / mu).matrix();
    rep.variance = vector::Constant(n, std::numbers::pi * std::numbers::pi / (6.0 * mu * mu));
    rep.expected_max = (log_eval(g, v) + std::numbers::egamma) / mu;
    return rep;
}

/// Mean V_r Gamma(1+1/mu) / G(1_r)^{1/mu}, variance quadratic in V_r,
/// expected maximum -G(-1/V)^{-1/mu} Gamma(1+1/mu).
inline moment_report multiplicative_moments(const generating_function& g, const vector& v) {
    const double mu = scale(g);
    const vector lz = log_multiplicative_vector(v);  // validates V < 0
    const auto n = v.size();
    const vector g1 = detail::unit_values(g, n);
    const double gamma1 = std::tgamma(1.0 + 1.0 / mu);
    const double spread = detail::weibull_spread(mu);
    moment_report rep;
    rep.mean = (v.array() * gamma1 / g1.array().pow(1.0 / mu)).matrix();
    rep.variance = (v.array().square() * spread / g1.array().pow(2.0 / mu)).matrix();
    rep.expected_max = -std::exp(-log_eval(g, lz) / mu) * gamma1;
    return rep;
}

/// Moments of reference-route utilities given reference `ref`. For p != ref the
/// non-overlapping part (which carries c) uses p's error term and the shared
/// part uses the reference's.
inline moment_report md_conditional_moments(const generating_function& g, const route_set& rs, const utility_spec& u,
                                            std::size_t ref) {
    const double mu = scale(g);
    (void)log_md_vector(rs, u, ref);  // degenerate pairs and sign checks
    const auto n = static_cast<Eigen::Index>(rs.size());
    const vector g1 = detail::unit_values(g, n);
    const double gamma1 = std::tgamma(1.0 + 1.0 / mu);
    const double spread = detail::weibull_spread(mu);
    const auto r = static_cast<Eigen::Index>(ref);
    moment_report rep{vector(n), vector(n), std::nullopt};
    for (Eigen::Index p = 0; p < n; ++p) {
        if (p == r) {
            const double vr = u.c - rs.route_cost(ref);
            if (!(vr < 0.0)) throw domain_error("reference route utility must be negative");
            rep.mean[p] = vr * gamma1 / std::pow(g1[r], 1.0 / mu);
            rep.variance[p] = vr * vr * spread / std::pow(g1[r], 2.0 / mu);
            continue;
        }
        const double own = u.c - rs.nonoverlap_cost(static_cast<std::size_t>(p), ref);
        const double shared = -rs.overlap_cost(static_cast<std::size_t>(p), ref);
        rep.mean[p] = (own / std::pow(g1[p], 1.0 / mu) + shared / std::pow(g1[r], 1.0 / mu)) * gamma1;
        rep.variance[p] = (own * own / std::pow(g1[p], 2.0 / mu) + shared * shared / std::pow(g1[r], 2.0 / mu)) * spread;
    }
    return rep;
}

/// Draws independent marginal utilities of multinomial models: Gumbel with
/// location V and scale 1/mu (additive) or V times a Weibull(mu) error
/// (multiplicative). `unit_value` is G(1_r), which is 1 for MN.
class marginal_sampler {
public:
    explicit marginal_sampler(double mu, double unit_value = 1.0) : mu_(mu), log_g1_(std::log(unit_value)) {
        if (!(mu > 0.0)) throw domain_error("scale mu must be positive");
        if (!(unit_value > 0.0)) throw domain_error("G(1_r) must be positive");
    }

    template <class Rng>
    double additive(double v, Rng& rng) const {
        return v + (log_g1_ - std::log(-std::log(uniform(rng)))) / mu_;
    }

    /// Multiplicative error: P(eps >= s) = exp(-G(1_r) s^mu).
    template <class Rng>
    double multiplicative_error(Rng& rng) const {
        return std::exp((std::log(-std::log(uniform(rng))) - log_g1_) / mu_);
    }

    template <class Rng>
    double multiplicative(double v, Rng& rng) const {
        return v * multiplicative_error(rng);
    }

private:
    template <class Rng>
    static double uniform(Rng& rng) {
        // open interval (0, 1)
        std::uniform_real_distribution<double> d(std::numeric_limits<double>::min(), 1.0);
        double x;
        do x = d(rng);
        while (x >= 1.0);
        return x;
    }

    double mu_;
    double log_g1_;
};

}  // namespace gmev
