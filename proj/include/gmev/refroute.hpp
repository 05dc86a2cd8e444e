#pragma once

// Reference-route (M-Delta) models: conditional probabilities given a
// reference route, reference-route distributions, and the final mixture.

#include "gmev/error.hpp"
#include "gmev/generating.hpp"
#include "gmev/linalg.hpp"
#include "gmev/network.hpp"
#include "gmev/vectors.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace gmev {

/// Every route is the reference with probability 1/|R|.
struct equal_policy {};

/// Reference probabilities equal choice probabilities: the stationary
/// distribution of the conditional matrix.
struct markov_policy {
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// A single known reference route.
struct fixed_policy {
    std::string ref;
};

using reference_policy = std::variant<equal_policy, markov_policy, fixed_policy>;

/// Supplies the generating function to use for a given reference route.
using function_for_reference = std::function<generating_function(std::size_t)>;

inline vector conditional_probabilities(const generating_function& g, const route_set& rs, const utility_spec& u,
                                        std::size_t ref) {
    return choice_probabilities_log(g, log_md_vector(rs, u, ref));
}

inline vector conditional_probabilities(const generating_function& g, const route_set& rs, const utility_spec& u,
                                        std::string_view ref) {
    return conditional_probabilities(g, rs, u, rs.route_index(ref));
}

/// Row r holds the choice probabilities conditional on reference route r.
inline matrix conditional_matrix(const function_for_reference& g_for, const route_set& rs, const utility_spec& u) {
    const auto n = static_cast<Eigen::Index>(rs.size());
    matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        m.row(r) = conditional_probabilities(g_for(static_cast<std::size_t>(r)), rs, u, static_cast<std::size_t>(r)).transpose();
    return m;
}

inline matrix conditional_matrix(const generating_function& g, const route_set& rs, const utility_spec& u) {
    return conditional_matrix([&](std::size_t) { return g; }, rs, u);
}

struct stationary_result {
    vector distribution;
    int iterations = 0;
    double residual = 0.0;
};

/// Power iteration pi <- pi M until ||pi M - pi||_inf <= tolerance.
inline stationary_result stationary_distribution(const matrix& m, double tolerance, int max_iterations,
                                                 std::optional<vector> start = std::nullopt) {
    if (m.rows() != m.cols() || m.rows() == 0) throw input_error("conditional matrix must be square and nonempty");
    if (!(tolerance > 0.0) || max_iterations < 1) throw input_error("markov policy needs tolerance > 0 and max_iterations >= 1");
    vector pi = start ? *start : vector::Constant(m.rows(), 1.0 / static_cast<double>(m.rows()));
    if (pi.size() != m.rows()) throw input_error("start vector has wrong dimension");
    pi /= pi.sum();
    double residual = 0.0;
    for (int k = 1; k <= max_iterations; ++k) {
        vector next = (pi.transpose() * m).transpose();
        next /= next.sum();
        residual = (next - pi).lpNorm<Eigen::Infinity>();
        pi = std::move(next);
        if (residual <= tolerance) return {pi, k, residual};
    }
    throw convergence_error("markov reference distribution did not converge in " + std::to_string(max_iterations) +
                                " iterations",
                            residual);
}

inline vector reference_distribution(const reference_policy& policy, const matrix& m, const route_set& rs) {
    const auto n = m.rows();
    return std::visit(
        [&](const auto& p) -> vector {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, equal_policy>) {
                return vector::Constant(n, 1.0 / static_cast<double>(n));
            } else if constexpr (std::is_same_v<T, fixed_policy>) {
                vector e = vector::Zero(n);
                e[static_cast<Eigen::Index>(rs.route_index(p.ref))] = 1.0;
                return e;
            } else {
                return stationary_distribution(m, p.tolerance, p.max_iterations).distribution;
            }
        },
        policy);
}

/// Final probabilities P_p = sum_r P_p^{ref r} P^ref_r.
inline vector md_probabilities(const function_for_reference& g_for, const route_set& rs, const utility_spec& u,
                               const reference_policy& policy) {
    if (const auto* fixed = std::get_if<fixed_policy>(&policy)) {
        const auto r = rs.route_index(fixed->ref);
        return conditional_probabilities(g_for(r), rs, u, r);
    }
    const matrix m = conditional_matrix(g_for, rs, u);
    const vector ref = reference_distribution(policy, m, rs);
    vector p = (ref.transpose() * m).transpose();
    return p / p.sum();
}

inline vector md_probabilities(const generating_function& g, const route_set& rs, const utility_spec& u,
                               const reference_policy& policy) {
    return md_probabilities([&](std::size_t) { return g; }, rs, u, policy);
}

}  // namespace gmev
