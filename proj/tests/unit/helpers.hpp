#pragma once

#include "gmev/gmev.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing_support {

using gmev::route_set;

// links a=3, b=1, d=2, e=4; upper = a,b (4), middle = a,d (5), lower = e (4)
inline route_set simple_network() {
    return route_set({{"a", 3}, {"b", 1}, {"d", 2}, {"e", 4}},
                     {{"upper", {"a", "b"}}, {"middle", {"a", "d"}}, {"lower", {"e"}}});
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random overlapping route set with n routes. Every route owns a private link,
/// so no pair is degenerate for reference-route models.
inline route_set random_route_set(std::mt19937_64& rng, int n) {
    const int shared = uniform_int(rng, 1, 5);
    std::vector<gmev::link> links;
    for (int l = 0; l < shared; ++l) links.push_back({"s" + std::to_string(l), uniform(rng, 0.5, 5.0)});
    std::vector<gmev::route> routes;
    for (int r = 0; r < n; ++r) {
        const std::string own = "o" + std::to_string(r);
        links.push_back({own, uniform(rng, 0.5, 5.0)});
        gmev::route rt{"r" + std::to_string(r), {own}};
        for (int l = 0; l < shared; ++l)
            if (uniform(rng, 0, 1) < 0.5) rt.links.push_back("s" + std::to_string(l));
        std::shuffle(rt.links.begin(), rt.links.end(), rng);
        routes.push_back(std::move(rt));
    }
    return route_set(std::move(links), std::move(routes));
}

/// Mutually disjoint routes of 1-3 links each.
inline route_set random_disjoint_route_set(std::mt19937_64& rng, int n) {
    std::vector<gmev::link> links;
    std::vector<gmev::route> routes;
    for (int r = 0; r < n; ++r) {
        gmev::route rt{"r" + std::to_string(r), {}};
        const int k = uniform_int(rng, 1, 3);
        for (int l = 0; l < k; ++l) {
            const std::string id = "l" + std::to_string(r) + "_" + std::to_string(l);
            links.push_back({id, uniform(rng, 0.5, 5.0)});
            rt.links.push_back(id);
        }
        routes.push_back(std::move(rt));
    }
    return route_set(std::move(links), std::move(routes));
}

/// Random generating function of the given family over n routes.
inline gmev::generating_function random_function(std::mt19937_64& rng, int family, int n) {
    const double mu = uniform(rng, 0.3, 3.0);
    switch (family) {
        case 0: return gmev::mn_function{mu};
        case 1: {
            gmev::vector ps(n);
            for (int r = 0; r < n; ++r) ps[r] = uniform(rng, 0.1, 1.0);
            return gmev::ps_function{mu, uniform(rng, -2.0, 3.0), ps};
        }
        case 2: {
            gmev::matrix phi = gmev::matrix::Zero(n, n);
            for (int r = 0; r < n; ++r)
                for (int p = 0; p < r; ++p) phi(r, p) = phi(p, r) = uniform(rng, 0.0, 0.9);
            return gmev::pc_function{mu, phi};
        }
        default: {
            const auto rs = random_route_set(rng, n);
            gmev::vector scales(static_cast<Eigen::Index>(rs.link_count()));
            for (Eigen::Index l = 0; l < scales.size(); ++l) scales[l] = mu * uniform(rng, 1.0, 4.0);
            return gmev::ln_function{mu, scales, gmev::inclusion_matrix(rs)};
        }
    }
}

inline gmev::vector random_positive(std::mt19937_64& rng, int n, double lo = 0.2, double hi = 3.0) {
    gmev::vector z(n);
    for (int r = 0; r < n; ++r) z[r] = uniform(rng, lo, hi);
    return z;
}

}  // namespace testing_support
