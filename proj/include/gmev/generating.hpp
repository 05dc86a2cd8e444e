#pragma once

// Generating functions G for the four model families and the universal
// choice-probability formula P_r = y_r G_r(y) / sum_s y_s G_s(y).
//
// Every family is evaluated in the log domain: callers pass log z and get back
// log G(z) or the vector log(z_r G_r(z)). A zero entry of z is log z = -inf,
// which lets the same kernels evaluate G at unit vectors 1_r.

#include "gmev/error.hpp"
#include "gmev/linalg.hpp"
#include "gmev/network.hpp"

#include <cmath>
#include <map>
#include <string>
#include <type_traits>
#include <variant>

namespace gmev {

/// Multinomial: G(z) = sum_r z_r^mu.
struct mn_function {
    double mu = 1.0;
};

/// Path size: G(z) = sum_r PS_r^beta z_r^mu.
struct ps_function {
    double mu = 1.0;
    double beta = 0.0;
    vector factors;
};

/// Paired combinatorial over ordered pairs:
/// G(z) = sum_r sum_{p != r} (z_r^{mu/(1-phi)} + z_p^{mu/(1-phi)})^{1-phi}.
struct pc_function {
    double mu = 1.0;
    matrix similarity;
};

/// Link nested: G(z) = sum_l (sum_r alpha_lr z_r^{mu_l})^{mu/mu_l}.
struct ln_function {
    double mu = 1.0;
    vector nest_scales;  // one per link
    matrix inclusion;    // links x routes
};

using generating_function = std::variant<mn_function, ps_function, pc_function, ln_function>;

inline double scale(const generating_function& g) {
    return std::visit([](const auto& f) { return f.mu; }, g);
}

/// Number of routes the function is defined over, or -1 for MN (any size).
inline Eigen::Index dimension(const generating_function& g) {
    return std::visit(
        [](const auto& f) -> Eigen::Index {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, mn_function>) return -1;
            else if constexpr (std::is_same_v<T, ps_function>) return f.factors.size();
            else if constexpr (std::is_same_v<T, pc_function>) return f.similarity.rows();
            else return f.inclusion.cols();
        },
        g);
}

struct function_options {
    bool allow_nest_scale_below_mu = false;
    double similarity_clamp = default_similarity_clamp;
};

/// Checks parameter invariants; throws domain_error on violation.
inline void validate(const generating_function& g, const function_options& opt = {}) {
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if (!(f.mu > 0.0) || !std::isfinite(f.mu)) throw domain_error("scale mu must be positive");
            if constexpr (std::is_same_v<T, ps_function>) {
                if (!std::isfinite(f.beta)) throw domain_error("path-size exponent must be finite");
                for (Eigen::Index r = 0; r < f.factors.size(); ++r)
                    if (!(f.factors[r] > 0.0 && f.factors[r] <= 1.0))
                        throw domain_error("path-size factors must lie in (0, 1]");
            } else if constexpr (std::is_same_v<T, pc_function>) {
                if (f.similarity.rows() < 2 || f.similarity.rows() != f.similarity.cols())
                    throw domain_error("paired combinatorial needs a square similarity matrix over >= 2 routes");
                for (Eigen::Index r = 0; r < f.similarity.rows(); ++r)
                    for (Eigen::Index p = 0; p < f.similarity.cols(); ++p)
                        if (r != p && !(f.similarity(r, p) >= 0.0 && f.similarity(r, p) <= 1.0 - opt.similarity_clamp))
                            throw domain_error("similarity indices must lie in [0, 1 - eps]");
            } else if constexpr (std::is_same_v<T, ln_function>) {
                if (f.nest_scales.size() != f.inclusion.rows())
                    throw domain_error("one nest scale per link required");
                for (Eigen::Index l = 0; l < f.nest_scales.size(); ++l) {
                    if (!(f.nest_scales[l] > 0.0) || !std::isfinite(f.nest_scales[l]))
                        throw domain_error("nest scales must be positive");
                    if (!opt.allow_nest_scale_below_mu && f.nest_scales[l] < f.mu * (1.0 - 1e-12))
                        throw domain_error("nest scale below mu (set the override to allow)");
                }
            }
        },
        g);
}

inline generating_function make_mn(double mu) {
    generating_function g = mn_function{mu};
    validate(g);
    return g;
}

inline generating_function make_ps(const route_set& rs, double mu, double beta) {
    generating_function g = ps_function{mu, beta, path_size_factors(rs)};
    validate(g);
    return g;
}

inline generating_function make_pc(const route_set& rs, double mu, double eps = default_similarity_clamp) {
    generating_function g = pc_function{mu, similarity_matrix(rs, eps)};
    validate(g, {.similarity_clamp = eps});
    return g;
}

/// Link-nested function; links missing from `nest_scales` use mu_l = mu.
inline generating_function make_ln(const route_set& rs, double mu, const std::map<std::string, double>& nest_scales,
                                   bool allow_nest_scale_below_mu = false) {
    vector scales = vector::Constant(static_cast<Eigen::Index>(rs.link_count()), mu);
    for (const auto& [id, s] : nest_scales) scales[static_cast<Eigen::Index>(rs.link_index(id))] = s;
    generating_function g = ln_function{mu, scales, inclusion_matrix(rs)};
    validate(g, {.allow_nest_scale_below_mu = allow_nest_scale_below_mu});
    return g;
}

namespace detail {

inline void check_dimension(const generating_function& g, Eigen::Index n) {
    const auto d = dimension(g);
    if (d >= 0 && d != n) throw input_error("generating function dimension does not match vector");
    if (n == 0) throw input_error("empty generating vector");
}

inline double log_value(const mn_function& f, const vector& lz) {
    return log_sum_exp((f.mu * lz.array()).matrix());
}

inline vector log_weights(const mn_function& f, const vector& lz) {
    return (std::log(f.mu) + f.mu * lz.array()).matrix();
}

inline double log_value(const ps_function& f, const vector& lz) {
    vector t(lz.size());
    for (Eigen::Index r = 0; r < lz.size(); ++r) t[r] = f.beta * std::log(f.factors[r]) + f.mu * lz[r];
    return log_sum_exp(t);
}

inline vector log_weights(const ps_function& f, const vector& lz) {
    vector w(lz.size());
    for (Eigen::Index r = 0; r < lz.size(); ++r)
        w[r] = lz[r] == negative_infinity ? negative_infinity
                                          : std::log(f.mu) + f.beta * std::log(f.factors[r]) + f.mu * lz[r];
    return w;
}

inline double log_value(const pc_function& f, const vector& lz) {
    log_sum acc;
    const auto n = lz.size();
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index p = 0; p < n; ++p) {
            if (p == r) continue;
            const double phi = f.similarity(r, p);
            const double a = f.mu / (1.0 - phi);
            const double pair = log_add(a * lz[r], a * lz[p]);
            if (pair != negative_infinity) acc.add((1.0 - phi) * pair);
        }
    return acc.value();
}

// z_r G_r = 2 mu sum_{p != r} z_r^a (z_r^a + z_p^a)^{-phi}, a = mu / (1 - phi).
inline vector log_weights(const pc_function& f, const vector& lz) {
    const auto n = lz.size();
    vector w(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (lz[r] == negative_infinity) {
            w[r] = negative_infinity;
            continue;
        }
        log_sum acc;
        for (Eigen::Index p = 0; p < n; ++p) {
            if (p == r) continue;
            const double phi = f.similarity(r, p);
            const double a = f.mu / (1.0 - phi);
            acc.add(a * lz[r] - phi * log_add(a * lz[r], a * lz[p]));
        }
        w[r] = std::log(2.0 * f.mu) + acc.value();
    }
    return w;
}

// log S_l = log sum_r alpha_lr z_r^{mu_l}; -inf for empty nests.
inline vector log_nest_sums(const ln_function& f, const vector& lz) {
    vector s(f.inclusion.rows());
    for (Eigen::Index l = 0; l < f.inclusion.rows(); ++l) {
        log_sum acc;
        for (Eigen::Index r = 0; r < lz.size(); ++r)
            if (f.inclusion(l, r) > 0.0) acc.add(std::log(f.inclusion(l, r)) + f.nest_scales[l] * lz[r]);
        s[l] = acc.value();
    }
    return s;
}

inline double log_value(const ln_function& f, const vector& lz) {
    const vector s = log_nest_sums(f, lz);
    log_sum acc;
    for (Eigen::Index l = 0; l < s.size(); ++l)
        if (s[l] != negative_infinity) acc.add(f.mu / f.nest_scales[l] * s[l]);
    return acc.value();
}

// z_r G_r = mu sum_l alpha_lr z_r^{mu_l} S_l^{mu/mu_l - 1}.
inline vector log_weights(const ln_function& f, const vector& lz) {
    const vector s = log_nest_sums(f, lz);
    vector w(lz.size());
    for (Eigen::Index r = 0; r < lz.size(); ++r) {
        if (lz[r] == negative_infinity) {
            w[r] = negative_infinity;
            continue;
        }
        log_sum acc;
        for (Eigen::Index l = 0; l < s.size(); ++l) {
            const double a = f.inclusion(l, r);
            if (a <= 0.0) continue;
            const double ml = f.nest_scales[l];
            acc.add(std::log(a) + ml * lz[r] + (f.mu / ml - 1.0) * s[l]);
        }
        w[r] = std::log(f.mu) + acc.value();
    }
    return w;
}

inline void check_positive(const vector& z) {
    for (Eigen::Index r = 0; r < z.size(); ++r)
        if (!(z[r] > 0.0) || !std::isfinite(z[r])) throw domain_error("generating vector entries must be positive");
}

}  // namespace detail

/// log G(z) from log z. Entries may be -inf (z_r = 0).
inline double log_eval(const generating_function& g, const vector& log_z) {
    detail::check_dimension(g, log_z.size());
    return std::visit([&](const auto& f) { return detail::log_value(f, log_z); }, g);
}

/// log(z_r G_r(z)) for every r, from log z.
inline vector log_weights(const generating_function& g, const vector& log_z) {
    detail::check_dimension(g, log_z.size());
    return std::visit([&](const auto& f) { return detail::log_weights(f, log_z); }, g);
}

inline double eval_G(const generating_function& g, const vector& z) {
    detail::check_dimension(g, z.size());
    detail::check_positive(z);
    return std::exp(log_eval(g, z.array().log().matrix()));
}

/// Analytic partial derivatives G_r(z).
inline vector grad_G(const generating_function& g, const vector& z) {
    detail::check_dimension(g, z.size());
    detail::check_positive(z);
    const vector lz = z.array().log().matrix();
    return (log_weights(g, lz) - lz).array().exp().matrix();
}

/// G evaluated at the unit vector 1_r.
inline double unit_value(const generating_function& g, Eigen::Index r, Eigen::Index n) {
    vector lz = vector::Constant(n, negative_infinity);
    lz[r] = 0.0;
    return std::exp(log_eval(g, lz));
}

/// Choice probabilities from a log generating vector (the stable entry point).
inline vector choice_probabilities_log(const generating_function& g, const vector& log_y) {
    for (Eigen::Index r = 0; r < log_y.size(); ++r)
        if (!std::isfinite(log_y[r])) throw domain_error("generating vector entries must be positive and finite");
    return detail::softmax(log_weights(g, log_y));
}

inline vector choice_probabilities(const generating_function& g, const vector& y) {
    detail::check_dimension(g, y.size());
    detail::check_positive(y);
    return choice_probabilities_log(g, y.array().log().matrix());
}

}  // namespace gmev
