#pragma once

// Named model instances: a generating-function family plus a vector family,
// e.g. A-MN (logit), M-PS, MD-LN, HA-PC.

#include "gmev/error.hpp"
#include "gmev/generating.hpp"
#include "gmev/network.hpp"
#include "gmev/refroute.hpp"
#include "gmev/vectors.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace gmev {

enum class function_family { mn, ps, pc, ln };
enum class vector_family { additive, multiplicative, multiplicative_delta, hybrid_additive, hybrid_multiplicative };

struct model_spec {
    function_family function = function_family::mn;
    vector_family vector = vector_family::additive;
    double mu = 1.0;
    double beta = 0.0;  // PS exponent
    double rho = 1.0;   // hybrid scale ratio
    double c = 0.0;     // utility constant (fixed at 0 for additive)
    std::map<std::string, double> nest_scales;  // LN, per link id
    reference_policy policy = equal_policy{};   // MD only
    bool reference_path_size = false;           // MD-PS: reference-specific factors
    bool allow_nest_scale_below_mu = false;
};

inline constexpr std::string_view to_string(function_family f) {
    constexpr std::array<std::string_view, 4> names{"MN", "PS", "PC", "LN"};
    return names[static_cast<std::size_t>(f)];
}

inline constexpr std::string_view to_string(vector_family v) {
    constexpr std::array<std::string_view, 5> names{"A", "M", "MD", "HA", "HM"};
    return names[static_cast<std::size_t>(v)];
}

inline function_family parse_function_family(std::string_view s) {
    for (auto f : {function_family::mn, function_family::ps, function_family::pc, function_family::ln})
        if (to_string(f) == s) return f;
    throw input_error("unknown generating function '" + std::string(s) + "' (expected MN|PS|PC|LN)");
}

inline vector_family parse_vector_family(std::string_view s) {
    for (auto v : {vector_family::additive, vector_family::multiplicative, vector_family::multiplicative_delta,
                   vector_family::hybrid_additive, vector_family::hybrid_multiplicative})
        if (to_string(v) == s) return v;
    throw input_error("unknown generating vector '" + std::string(s) + "' (expected A|M|MD|HA|HM)");
}

inline std::string model_name(const model_spec& m) {
    return std::string(to_string(m.vector)) + "-" + std::string(to_string(m.function));
}

/// Parses names like "A-MN" or "MD-PS" into a spec with default parameters.
inline model_spec parse_model_name(std::string_view name) {
    const auto dash = name.find('-');
    if (dash == std::string_view::npos) throw input_error("model name must look like A-MN, got '" + std::string(name) + "'");
    model_spec m;
    m.vector = parse_vector_family(name.substr(0, dash));
    m.function = parse_function_family(name.substr(dash + 1));
    return m;
}

inline bool is_additive(const model_spec& m) { return m.vector == vector_family::additive; }

inline bool uses_constant(const model_spec& m) { return !is_additive(m); }

inline generating_function build_function(const route_set& rs, const model_spec& m) {
    switch (m.function) {
        case function_family::mn: return make_mn(m.mu);
        case function_family::ps: return make_ps(rs, m.mu, m.beta);
        case function_family::pc: return make_pc(rs, m.mu);
        case function_family::ln: return make_ln(rs, m.mu, m.nest_scales, m.allow_nest_scale_below_mu);
    }
    throw input_error("unknown function family");
}

/// Generating function per reference route; only MD-PS with
/// reference-specific path sizes differs between references.
inline function_for_reference build_reference_functions(const route_set& rs, const model_spec& m) {
    if (m.function == function_family::ps && m.reference_path_size) {
        return [&rs, mu = m.mu, beta = m.beta](std::size_t ref) -> generating_function {
            generating_function g = ps_function{mu, beta, ref_path_size_factors(rs, ref)};
            validate(g);
            return g;
        };
    }
    auto g = build_function(rs, m);
    return [g](std::size_t) { return g; };
}

inline vector_kind vector_kind_of(const model_spec& m) {
    switch (m.vector) {
        case vector_family::additive: return additive{};
        case vector_family::multiplicative: return multiplicative{};
        case vector_family::hybrid_additive: return hybrid_additive{m.rho};
        case vector_family::hybrid_multiplicative: return hybrid_multiplicative{m.rho};
        case vector_family::multiplicative_delta:
            if (const auto* f = std::get_if<fixed_policy>(&m.policy)) return multiplicative_delta{f->ref};
            throw domain_error("reference-route vector needs a fixed reference; use model_probabilities for mixtures");
    }
    throw input_error("unknown vector family");
}

inline vector model_probabilities(const route_set& rs, const model_spec& m) {
    const utility_spec u{m.c};
    if (m.vector == vector_family::multiplicative_delta)
        return md_probabilities(build_reference_functions(rs, m), rs, u, m.policy);
    return choice_probabilities_log(build_function(rs, m), log_generating_vector(vector_kind_of(m), rs, u));
}

/// log P_r, computed without leaving the log domain where possible.
inline vector log_model_probabilities(const route_set& rs, const model_spec& m) {
    const utility_spec u{m.c};
    if (m.vector == vector_family::multiplicative_delta)
        return md_probabilities(build_reference_functions(rs, m), rs, u, m.policy).array().log().matrix();
    return detail::log_softmax(log_weights(build_function(rs, m), log_generating_vector(vector_kind_of(m), rs, u)));
}

}  // namespace gmev
