#pragma once

// Single-OD stochastic user equilibrium for any GMEV model: route flows
// proportional to the model's choice probabilities under flow-dependent costs.

#include "gmev/error.hpp"
#include "gmev/model.hpp"
#include "gmev/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

namespace gmev {

struct constant_cost {
    double t0 = 1.0;
};

struct affine_cost {
    double t0 = 1.0;
    double slope = 0.0;  // per unit flow
};

/// t0 * (1 + a (x / capacity)^b)
struct bpr_cost {
    double t0 = 1.0;
    double capacity = 1.0;
    double a = 0.15;
    double b = 4.0;
};

using link_cost_function = std::variant<constant_cost, affine_cost, bpr_cost>;

inline double link_time(const link_cost_function& fn, double flow) {
    return std::visit(
        [flow](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, constant_cost>) return f.t0;
            else if constexpr (std::is_same_v<T, affine_cost>) return f.t0 + f.slope * flow;
            else return f.t0 * (1.0 + f.a * std::pow(std::max(flow, 0.0) / f.capacity, f.b));
        },
        fn);
}

inline void validate(const link_cost_function& fn) {
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if (!(f.t0 > 0.0) || !std::isfinite(f.t0)) throw input_error("link cost t0 must be positive");
            if constexpr (std::is_same_v<T, affine_cost>) {
                if (!(f.slope >= 0.0)) throw input_error("affine link cost slope must be nonnegative");
            } else if constexpr (std::is_same_v<T, bpr_cost>) {
                if (!(f.capacity > 0.0)) throw input_error("BPR capacity must be positive");
                if (!(f.a >= 0.0) || !(f.b >= 0.0)) throw input_error("BPR a and b must be nonnegative");
            }
        },
        fn);
}

enum class step_rule { msa, self_regulated };

struct sue_config {
    int max_iterations = 5000;
    double gap_tolerance = 1e-6;
    double residual_tolerance = 1e-6;  // max_r |f_r/D - P_r(f)|
    step_rule step = step_rule::msa;
};

struct sue_problem {
    route_set network;  // topology; link costs are replaced by cost functions
    double demand = 1.0;
    std::vector<link_cost_function> costs;  // one per link, in network link order
    model_spec model;
    sue_config config{};
};

struct gap_report {
    double value = 0.0;
    bool absolute = false;  // denominator was zero, value is the unnormalized gap
};

struct sue_solution {
    vector flows;
    vector costs;  // generalized stochastic costs
    double gap = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool experimental = false;  // MD with a mixture policy
    std::vector<double> gap_history;
};

inline void validate(const sue_problem& p) {
    if (!(p.demand > 0.0) || !std::isfinite(p.demand)) throw input_error("demand must be positive");
    if (p.costs.size() != p.network.link_count())
        throw input_error("need one cost function per link (" + std::to_string(p.network.link_count()) + ")");
    for (const auto& c : p.costs) validate(c);
    if (p.config.max_iterations < 1) throw input_error("max_iterations must be positive");
}

inline bool is_experimental(const model_spec& m) {
    return m.vector == vector_family::multiplicative_delta && !std::holds_alternative<fixed_policy>(m.policy);
}

/// Route set with link costs evaluated at the link flows implied by route flows f.
inline route_set loaded_network(const sue_problem& p, const vector& f) {
    const auto& rs = p.network;
    vector x = vector::Zero(static_cast<Eigen::Index>(rs.link_count()));
    for (std::size_t r = 0; r < rs.size(); ++r)
        for (auto l : rs.route_links(r)) x[static_cast<Eigen::Index>(l)] += f[static_cast<Eigen::Index>(r)];
    vector t(x.size());
    for (Eigen::Index l = 0; l < x.size(); ++l) t[l] = link_time(p.costs[static_cast<std::size_t>(l)], x[l]);
    return rs.with_link_costs(t);
}

namespace detail {

// log(y_r G_r(y)) on a loaded network; ln P_r for MD mixtures, which have no
// single (y, G) pair.
inline vector log_attraction(const route_set& rs, const model_spec& m) {
    if (is_experimental(m)) return log_model_probabilities(rs, m);
    const utility_spec u{m.c};
    if (m.vector == vector_family::multiplicative_delta) {
        const auto ref = rs.route_index(std::get<fixed_policy>(m.policy).ref);
        return log_weights(build_reference_functions(rs, m)(ref), log_md_vector(rs, u, ref));
    }
    return log_weights(build_function(rs, m), log_generating_vector(vector_kind_of(m), rs, u));
}

inline void check_flows(const sue_problem& p, const vector& f) {
    if (static_cast<std::size_t>(f.size()) != p.network.size()) throw input_error("flow vector has wrong dimension");
    for (Eigen::Index r = 0; r < f.size(); ++r)
        if (!(f[r] > 0.0) || !std::isfinite(f[r])) throw domain_error("route flows must be strictly positive");
}

}  // namespace detail

/// c_r = ln f_r - ln(y_r G_r(y)), y rebuilt from flow-dependent costs.
inline vector generalized_cost(const sue_problem& p, const vector& f) {
    detail::check_flows(p, f);
    return (f.array().log() - detail::log_attraction(loaded_network(p, f), p.model).array()).matrix();
}

inline gap_report duality_gap_of(const vector& f, const vector& c) {
    const double cmin = c.minCoeff();
    const double excess = (f.array() * (c.array() - cmin)).sum();
    const double denom = std::abs(f.sum() * cmin);
    if (!(denom > 0.0)) return {excess, true};
    return {excess / denom, false};
}

/// Normalized excess cost sum f_r (c_r - min c) / |sum f_r min c|.
inline gap_report duality_gap(const sue_problem& p, const vector& f) { return duality_gap_of(f, generalized_cost(p, f)); }

/// Successive averages on f <- f + step (D P(f) - f), starting from D P(free flow).
/// Stops once both the gap and max_r |f_r/D - P_r(f)| are within tolerance.
/// On hitting the cap the lowest-gap iterate is returned, flagged unconverged.
inline sue_solution solve_sue(const sue_problem& p) {
    validate(p);
    const auto& cfg = p.config;
    const double d = p.demand;

    sue_solution best;
    best.gap = std::numeric_limits<double>::infinity();
    best.experimental = is_experimental(p.model);

    vector f = d * model_probabilities(p.network, p.model);
    double sra_beta = 1.0, last_norm = std::numeric_limits<double>::infinity();
    std::vector<double> history;

    for (int k = 0;; ++k) {
        const route_set loaded = loaded_network(p, f);
        const vector la = detail::log_attraction(loaded, p.model);
        const vector prob = detail::softmax(la);
        const vector cost = (f.array().log() - la.array()).matrix();
        const gap_report gap = duality_gap_of(f, cost);
        const double residual = (f / d - prob).cwiseAbs().maxCoeff();
        history.push_back(gap.value);

        if (gap.value < best.gap) {
            best.flows = f;
            best.costs = cost;
            best.gap = gap.value;
            best.residual = residual;
            best.iterations = k;
        }
        if (gap.value <= cfg.gap_tolerance && residual <= cfg.residual_tolerance) {
            best.flows = f;
            best.costs = cost;
            best.gap = gap.value;
            best.residual = residual;
            best.iterations = k;
            best.converged = true;
            break;
        }
        if (k >= cfg.max_iterations) break;

        const vector direction = d * prob - f;
        double step = 1.0 / (k + 1.0);
        if (cfg.step == step_rule::self_regulated) {
            const double norm = direction.norm();
            sra_beta += norm >= last_norm ? 1.5 : 0.3;
            last_norm = norm;
            step = 1.0 / sra_beta;
        }
        f += step * direction;
        f *= d / f.sum();
    }
    best.gap_history = std::move(history);
    return best;
}

}  // namespace gmev
