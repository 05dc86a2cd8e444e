#pragma once

// Generating vectors: the per-route positive vector that encodes the utility
// formula. All builders return log y so callers can stay in the log domain.

#include "gmev/error.hpp"
#include "gmev/linalg.hpp"
#include "gmev/network.hpp"

#include <cmath>
#include <string>
#include <variant>

namespace gmev {

struct additive {};
struct multiplicative {};
struct multiplicative_delta {
    std::string ref;
};
struct hybrid_additive {
    double rho = 1.0;
};
struct hybrid_multiplicative {
    double rho = 1.0;
};

using vector_kind =
    std::variant<additive, multiplicative, multiplicative_delta, hybrid_additive, hybrid_multiplicative>;

/// Systematic utility V_r = c - cost_r. The travel-cost coefficient is fixed
/// at -1; c carries every other route-invariant utility term.
struct utility_spec {
    double c = 0.0;
};

inline vector systematic_utilities(const route_set& rs, const utility_spec& u) {
    return (u.c - rs.route_costs().array()).matrix();
}

namespace detail {

inline void require_negative(const vector& v) {
    for (Eigen::Index r = 0; r < v.size(); ++r)
        if (!(v[r] < 0.0))
            throw domain_error("multiplicative utility requires V_r < 0 for every route (route " + std::to_string(r) +
                               " has V = " + std::to_string(v[r]) + ")");
}

inline void require_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw domain_error("hybrid ratio rho must be positive");
}

}  // namespace detail

/// log y^A = V.
inline vector log_additive_vector(const vector& v) { return v; }

/// log y^M = -log(-V).
inline vector log_multiplicative_vector(const vector& v) {
    detail::require_negative(v);
    return (-(-v.array()).log()).matrix();
}

/// log y = V - rho log(-V), i.e. y = e^V / (-V)^rho.
inline vector log_hybrid_additive_vector(const vector& v, double rho) {
    detail::require_negative(v);
    detail::require_rho(rho);
    return (v.array() - rho * (-v.array()).log()).matrix();
}

/// log y = V / rho - log(-V), i.e. y = e^{V/rho} / (-V).
inline vector log_hybrid_multiplicative_vector(const vector& v, double rho) {
    detail::require_negative(v);
    detail::require_rho(rho);
    return (v.array() / rho - (-v.array()).log()).matrix();
}

/// Reference-route vector: 1 for the reference, otherwise the ratio of the
/// reference's non-overlapping utility to p's non-overlapping utility. The
/// constant c belongs to each route's own part, so on positive costs the ratio
/// is (cost(ref \ p) - c) / (cost(p \ ref) - c).
inline vector log_md_vector(const route_set& rs, const utility_spec& u, std::size_t ref) {
    if (ref >= rs.size()) throw input_error("reference route index out of range");
    vector ly(static_cast<Eigen::Index>(rs.size()));
    for (std::size_t p = 0; p < rs.size(); ++p) {
        if (p == ref) {
            ly[static_cast<Eigen::Index>(p)] = 0.0;
            continue;
        }
        const double num = rs.nonoverlap_cost(ref, p) - u.c;
        const double den = rs.nonoverlap_cost(p, ref) - u.c;
        if (!(num > 0.0)) throw degenerate_pair_error(rs.routes()[ref].id, rs.routes()[p].id);
        if (!(den > 0.0)) throw degenerate_pair_error(rs.routes()[p].id, rs.routes()[ref].id);
        ly[static_cast<Eigen::Index>(p)] = std::log(num) - std::log(den);
    }
    return ly;
}

inline vector md_gen_vector(const route_set& rs, const utility_spec& u, std::size_t ref) {
    return log_md_vector(rs, u, ref).array().exp().matrix();
}

/// log y for any vector kind on a route set.
inline vector log_generating_vector(const vector_kind& kind, const route_set& rs, const utility_spec& u) {
    const vector v = systematic_utilities(rs, u);
    return std::visit(
        [&](const auto& k) -> vector {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, additive>) {
                if (u.c != 0.0) throw domain_error("additive models fix the constant c at 0");
                return log_additive_vector(v);
            } else if constexpr (std::is_same_v<T, multiplicative>) {
                return log_multiplicative_vector(v);
            } else if constexpr (std::is_same_v<T, multiplicative_delta>) {
                return log_md_vector(rs, u, rs.route_index(k.ref));
            } else if constexpr (std::is_same_v<T, hybrid_additive>) {
                return log_hybrid_additive_vector(v, k.rho);
            } else {
                return log_hybrid_multiplicative_vector(v, k.rho);
            }
        },
        kind);
}

inline vector gen_vector(const vector_kind& kind, const route_set& rs, const utility_spec& u) {
    return log_generating_vector(kind, rs, u).array().exp().matrix();
}

}  // namespace gmev
