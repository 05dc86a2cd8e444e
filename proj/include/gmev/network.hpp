#pragma once

#include "gmev/error.hpp"
#include "gmev/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gmev {

struct link {
    std::string id;
    double cost = 0.0;  // positive generalized cost
};

struct route {
    std::string id;
    std::vector<std::string> links;  // ordered link ids
};

/// Explicit route set for one OD pair. Validated on construction and immutable
/// afterwards; per-route costs and pairwise overlaps are cached.
class route_set {
public:
    route_set(std::vector<link> links, std::vector<route> routes)
        : links_(std::move(links)), routes_(std::move(routes)) {
        if (routes_.empty()) throw input_error("route set has no routes");
        for (std::size_t l = 0; l < links_.size(); ++l) {
            const auto& lk = links_[l];
            if (lk.id.empty()) throw input_error("link with empty id");
            if (!(lk.cost > 0.0) || !std::isfinite(lk.cost))
                throw input_error("link " + lk.id + ": cost must be positive and finite");
            if (!link_index_.emplace(lk.id, l).second)
                throw input_error("duplicate link id " + lk.id);
        }
        route_links_.resize(routes_.size());
        for (std::size_t r = 0; r < routes_.size(); ++r) {
            const auto& rt = routes_[r];
            if (rt.id.empty()) throw input_error("route with empty id");
            if (!route_index_.emplace(rt.id, r).second)
                throw input_error("duplicate route id " + rt.id);
            if (rt.links.empty()) throw input_error("route " + rt.id + " has no links");
            auto& idx = route_links_[r];
            for (const auto& lid : rt.links) {
                auto it = link_index_.find(lid);
                if (it == link_index_.end())
                    throw input_error("route " + rt.id + " references unknown link " + lid);
                if (std::find(idx.begin(), idx.end(), it->second) != idx.end())
                    throw input_error("route " + rt.id + " repeats link " + lid);
                idx.push_back(it->second);
            }
        }
        sorted_links_ = route_links_;
        for (auto& s : sorted_links_) std::sort(s.begin(), s.end());
        for (std::size_t r = 0; r < routes_.size(); ++r)
            for (std::size_t s = 0; s < r; ++s)
                if (sorted_links_[r] == sorted_links_[s])
                    throw input_error("routes " + routes_[s].id + " and " + routes_[r].id +
                                      " have identical link sets");

        usage_.assign(links_.size(), 0);
        for (const auto& s : sorted_links_)
            for (auto l : s) ++usage_[l];

        const auto n = static_cast<Eigen::Index>(routes_.size());
        overlap_ = matrix::Zero(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index s = 0; s <= r; ++s) {
                double shared = 0.0;
                for (auto l : sorted_links_[r])
                    if (std::binary_search(sorted_links_[s].begin(), sorted_links_[s].end(), l))
                        shared += links_[l].cost;
                overlap_(r, s) = overlap_(s, r) = shared;
            }
        }
    }

    std::size_t size() const noexcept { return routes_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }
    const std::vector<link>& links() const noexcept { return links_; }
    const std::vector<route>& routes() const noexcept { return routes_; }

    std::size_t route_index(std::string_view id) const {
        auto it = route_index_.find(std::string(id));
        if (it == route_index_.end()) throw input_error("unknown route id " + std::string(id));
        return it->second;
    }
    std::size_t link_index(std::string_view id) const {
        auto it = link_index_.find(std::string(id));
        if (it == link_index_.end()) throw input_error("unknown link id " + std::string(id));
        return it->second;
    }

    /// Link indices of route r in travel order.
    const std::vector<std::size_t>& route_links(std::size_t r) const { return route_links_.at(r); }

    bool uses(std::size_t r, std::size_t l) const {
        const auto& s = sorted_links_.at(r);
        return std::binary_search(s.begin(), s.end(), l);
    }

    /// Number of routes in this set that use link l.
    int usage(std::size_t l) const { return usage_.at(l); }

    double route_cost(std::size_t r) const { return overlap_(check(r), r); }
    double overlap_cost(std::size_t r, std::size_t s) const { return overlap_(check(r), check(s)); }

    /// Cost of the links of r that are not on s. Summed directly (not as a
    /// difference) so exact inputs give exact outputs.
    double nonoverlap_cost(std::size_t r, std::size_t s) const {
        check(r);
        check(s);
        double total = 0.0;
        for (auto l : sorted_links_[r])
            if (!uses(s, l)) total += links_[l].cost;
        return total;
    }

    vector route_costs() const { return overlap_.diagonal(); }
    const matrix& overlap_costs() const noexcept { return overlap_; }

    /// Link costs as a vector in link order.
    vector link_costs() const {
        vector c(static_cast<Eigen::Index>(links_.size()));
        for (std::size_t l = 0; l < links_.size(); ++l) c[static_cast<Eigen::Index>(l)] = links_[l].cost;
        return c;
    }

    /// Same topology with new link costs (used by flow-dependent loading).
    route_set with_link_costs(const vector& costs) const {
        if (static_cast<std::size_t>(costs.size()) != links_.size())
            throw input_error("link cost vector has wrong dimension");
        auto lk = links_;
        for (std::size_t l = 0; l < lk.size(); ++l) lk[l].cost = costs[static_cast<Eigen::Index>(l)];
        return route_set(std::move(lk), routes_);
    }

    /// True when r shares at least one link with another route.
    bool overlaps_any(std::size_t r) const {
        for (auto l : sorted_links_.at(r))
            if (usage_[l] > 1) return true;
        return false;
    }

private:
    std::size_t check(std::size_t r) const {
        if (r >= routes_.size()) throw input_error("route index out of range");
        return r;
    }

    std::vector<link> links_;
    std::vector<route> routes_;
    std::unordered_map<std::string, std::size_t> link_index_;
    std::unordered_map<std::string, std::size_t> route_index_;
    std::vector<std::vector<std::size_t>> route_links_;
    std::vector<std::vector<std::size_t>> sorted_links_;
    std::vector<int> usage_;
    matrix overlap_;  // diagonal holds route costs
};

inline double route_cost(const route_set& rs, std::string_view r) { return rs.route_cost(rs.route_index(r)); }

inline double overlap_cost(const route_set& rs, std::string_view r, std::string_view s) {
    return rs.overlap_cost(rs.route_index(r), rs.route_index(s));
}

/// Path-size factors PS_r = (sum_{l in r} cost_l / #_l) / cost_r, with #_l the
/// number of routes in the set using l.
inline vector path_size_factors(const route_set& rs) {
    vector ps(static_cast<Eigen::Index>(rs.size()));
    for (std::size_t r = 0; r < rs.size(); ++r) {
        // same summation order for both sums, so an unshared route gets exactly 1
        double shared = 0.0, total = 0.0;
        for (auto l : rs.route_links(r)) {
            shared += rs.links()[l].cost / rs.usage(l);
            total += rs.links()[l].cost;
        }
        ps[static_cast<Eigen::Index>(r)] = std::min(shared / total, 1.0);
    }
    return ps;
}

/// Reference-specific path-size factors, evaluated over each route's links
/// that are not on the reference route. PS_{ref,ref} = 1.
inline vector ref_path_size_factors(const route_set& rs, std::size_t ref) {
    vector ps(static_cast<Eigen::Index>(rs.size()));
    for (std::size_t p = 0; p < rs.size(); ++p) {
        if (p == ref) {
            ps[static_cast<Eigen::Index>(p)] = 1.0;
            continue;
        }
        double num = 0.0, den = 0.0;
        for (auto l : rs.route_links(p)) {
            if (rs.uses(ref, l)) continue;
            num += rs.links()[l].cost / rs.usage(l);
            den += rs.links()[l].cost;
        }
        if (den <= 0.0) throw degenerate_pair_error(rs.routes()[p].id, rs.routes()[ref].id);
        ps[static_cast<Eigen::Index>(p)] = num / den;
    }
    return ps;
}

inline constexpr double default_similarity_clamp = 1e-6;

/// Similarity indices phi_rp = overlap(r,p) / sqrt(cost_r cost_p), clamped to
/// at most 1 - eps. The diagonal is zero and unused.
inline matrix similarity_matrix(const route_set& rs, double eps = default_similarity_clamp) {
    if (rs.size() < 2) throw input_error("similarity matrix needs at least two routes");
    const auto n = static_cast<Eigen::Index>(rs.size());
    matrix phi = matrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index p = 0; p < r; ++p) {
            const double v = rs.overlap_cost(r, p) / std::sqrt(rs.route_cost(r) * rs.route_cost(p));
            phi(r, p) = phi(p, r) = std::min(v, 1.0 - eps);
        }
    return phi;
}

/// Inclusion coefficients alpha (links x routes): cost_l / cost_r for l on r.
inline matrix inclusion_matrix(const route_set& rs) {
    matrix alpha = matrix::Zero(static_cast<Eigen::Index>(rs.link_count()), static_cast<Eigen::Index>(rs.size()));
    for (std::size_t r = 0; r < rs.size(); ++r)
        for (auto l : rs.route_links(r))
            alpha(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) = rs.links()[l].cost / rs.route_cost(r);
    return alpha;
}

}  // namespace gmev
