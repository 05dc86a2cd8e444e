#pragma once

// Trend check on four two-route networks: A (base), B (longer shared part),
// C1 (constant added to both own parts), C2 (own parts scaled). For A-MN,
// M-MN and MD-MN we classify how |P1 - P2| moves when switching from A.

#include "gmev/model.hpp"
#include "gmev/network.hpp"

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace gmev {

enum class trend { equal, converge, diverge };

inline constexpr std::string_view to_string(trend t) {
    switch (t) {
        case trend::equal: return "=";
        case trend::converge: return "converge";
        case trend::diverge: return "diverge";
    }
    return "?";
}

/// Two routes: own links of cost `first` and `second`, then a shared link.
inline route_set two_route_network(double first, double second, double shared) {
    return route_set({{"own1", first}, {"own2", second}, {"shared", shared}},
                     {{"r1", {"own1", "shared"}}, {"r2", {"own2", "shared"}}});
}

struct behavior_network {
    std::string name;
    route_set routes;
};

inline std::vector<behavior_network> behavior_networks() {
    return {{"A", two_route_network(1, 2, 1)},
            {"B", two_route_network(1, 2, 2)},
            {"C1", two_route_network(2, 3, 1)},
            {"C2", two_route_network(2, 4, 1)}};
}

/// A-MN, M-MN and MD-MN at mu = 1; the multiplicative ones use c = -1 (MD
/// diverges on C2 only with c != 0).
inline std::array<model_spec, 3> behavior_models() {
    model_spec a;
    model_spec m;
    m.vector = vector_family::multiplicative;
    m.c = -1.0;
    model_spec md = m;
    md.vector = vector_family::multiplicative_delta;
    return {a, m, md};
}

inline trend classify(const route_set& from, const route_set& to, const model_spec& model, double tol = 1e-10) {
    const vector p0 = model_probabilities(from, model);
    const vector p1 = model_probabilities(to, model);
    const double d0 = std::abs(p0[0] - p0[1]);
    const double d1 = std::abs(p1[0] - p1[1]);
    if (std::abs(d1 - d0) <= tol) return trend::equal;
    return d1 < d0 ? trend::converge : trend::diverge;
}

struct behavior_cell {
    std::string network;
    std::string model;
    trend expected;  // desired behaviour for the network change
    trend observed;
    trend printed;   // reference outcome for the cell
    bool desired() const { return observed == expected; }
    bool reproduces() const { return observed == printed; }
};

/// The nine cells (rows B, C1, C2 by A-MN, M-MN, MD-MN).
inline std::vector<behavior_cell> behavior_table() {
    const auto nets = behavior_networks();
    const auto models = behavior_models();
    constexpr std::array<trend, 3> expected{trend::equal, trend::converge, trend::diverge};
    constexpr std::array<std::array<trend, 3>, 3> printed{{
        {trend::equal, trend::converge, trend::equal},
        {trend::equal, trend::converge, trend::converge},
        {trend::diverge, trend::diverge, trend::diverge},
    }};
    std::vector<behavior_cell> cells;
    for (std::size_t row = 0; row < 3; ++row)
        for (std::size_t col = 0; col < 3; ++col)
            cells.push_back({nets[row + 1].name, model_name(models[col]), expected[row],
                             classify(nets[0].routes, nets[row + 1].routes, models[col]), printed[row][col]});
    return cells;
}

}  // namespace gmev
