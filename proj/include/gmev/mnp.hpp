#pragma once

// Multinomial probit ground truth: utilities U = V0 + beta tau + eps with
// foreseen-time standard deviations proportional to their means and overlap
// covariances, simulated by Monte Carlo.

#include "gmev/error.hpp"
#include "gmev/linalg.hpp"
#include "gmev/network.hpp"
#include "gmev/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace gmev {

enum class covariance_kind { geometric, arithmetic };

struct mnp_spec {
    vector tau_hat;        // expected foreseen travel time per route
    double theta = 0.2;    // sd(tau_r) = theta * tau_hat_r
    double sigma_eps = 10.0;
    covariance_kind kind = covariance_kind::arithmetic;
    vector v0;             // other systematic utility; empty means zeros
    double beta = -1.0;    // travel-time coefficient
};

inline vector mean_utilities(const mnp_spec& spec) {
    vector v0 = spec.v0.size() == 0 ? vector::Zero(spec.tau_hat.size()) : spec.v0;
    if (v0.size() != spec.tau_hat.size()) throw input_error("v0 and tau_hat dimensions differ");
    return v0 + spec.beta * spec.tau_hat;
}

inline void validate(const mnp_spec& spec) {
    for (Eigen::Index r = 0; r < spec.tau_hat.size(); ++r)
        if (!(spec.tau_hat[r] > 0.0)) throw domain_error("tau_hat must be positive");
    if (!(spec.theta >= 0.0) || !(spec.sigma_eps >= 0.0)) throw domain_error("theta and sigma_eps must be nonnegative");
}

/// Overlap times tau_hat_rs come from the route set's link costs, which are
/// read as travel times here. Route times are taken from spec.tau_hat.
/// Throws domain_error if the result is not positive semidefinite, unless
/// `repair` is set, in which case negative eigenvalues are clipped to 0.
inline matrix build_covariance(const route_set& rs, const mnp_spec& spec, bool repair = false) {
    validate(spec);
    const auto n = static_cast<Eigen::Index>(rs.size());
    if (spec.tau_hat.size() != n) throw input_error("tau_hat dimension does not match route count");
    const double t2 = spec.theta * spec.theta;
    matrix cov(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double tr = spec.tau_hat[r];
        cov(r, r) = t2 * tr * tr + spec.sigma_eps * spec.sigma_eps;
        for (Eigen::Index s = 0; s < r; ++s) {
            const double ts = spec.tau_hat[s];
            const double shared = rs.overlap_cost(static_cast<std::size_t>(r), static_cast<std::size_t>(s));
            const double mean_time = spec.kind == covariance_kind::geometric ? std::sqrt(tr * ts) : 0.5 * (tr + ts);
            cov(r, s) = cov(s, r) = t2 * shared * mean_time;
        }
    }
    Eigen::SelfAdjointEigenSolver<matrix> eig(cov);
    const double tol = 1e-12 * std::max(1.0, cov.diagonal().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -tol) {
        if (!repair)
            throw domain_error("covariance matrix is not positive semidefinite (min eigenvalue " +
                               std::to_string(eig.eigenvalues().minCoeff()) + ")");
        const vector clipped = eig.eigenvalues().cwiseMax(0.0);
        cov = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        cov = 0.5 * (cov + cov.transpose());
    }
    return cov;
}

/// Symmetric factor L with L L^T = cov (Cholesky, or eigen square root for
/// singular PSD matrices).
inline matrix covariance_factor(const matrix& cov) {
    if (cov.rows() != cov.cols()) throw input_error("covariance must be square");
    Eigen::LLT<matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<matrix> eig(cov);
    const double tol = 1e-12 * std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -tol) throw domain_error("covariance factorization failed: matrix is not PSD");
    return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Stream key derived from a scenario value so every x gets its own stream.
inline std::uint64_t stream_for(double x) { return detail::splitmix64(std::bit_cast<std::uint64_t>(x)); }

struct simulation_result {
    vector probabilities;
    vector standard_errors;
    std::vector<std::uint64_t> counts;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t simulation_block = 1u << 16;

/// Monte Carlo choice frequencies of argmax_r U_r with U ~ N(mean, cov).
/// Draws are split into fixed blocks, each with its own generator seeded from
/// (seed, stream, block), so results depend only on (seed, stream, n) and not
/// on the thread count.
inline simulation_result simulate_probabilities(const vector& mean, const matrix& cov, std::uint64_t n,
                                                std::uint64_t seed, std::uint64_t stream = 0, unsigned threads = 0) {
    if (n < 1) throw input_error("simulation needs n >= 1");
    const auto k = mean.size();
    if (k == 0 || cov.rows() != k || cov.cols() != k) throw input_error("mean and covariance dimensions differ");
    const matrix factor = covariance_factor(cov);
    const std::uint64_t blocks = (n + simulation_block - 1) / simulation_block;
    std::vector<std::vector<std::uint64_t>> block_counts(blocks, std::vector<std::uint64_t>(static_cast<std::size_t>(k), 0));
    const std::uint64_t base = detail::splitmix64(seed ^ detail::splitmix64(stream));

    parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
        std::mt19937_64 rng(detail::splitmix64(base + b));
        std::normal_distribution<double> normal;
        const std::uint64_t first = b * simulation_block;
        const std::uint64_t draws = std::min(simulation_block, n - first);
        vector z(k), u(k);
        auto& counts = block_counts[b];
        for (std::uint64_t i = 0; i < draws; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) z[j] = normal(rng);
            u.noalias() = mean + factor * z;
            Eigen::Index best = 0;
            for (Eigen::Index j = 1; j < k; ++j)
                if (u[j] > u[best]) best = j;
            ++counts[static_cast<std::size_t>(best)];
        }
    });

    simulation_result res;
    res.n = n;
    res.seed = seed;
    res.counts.assign(static_cast<std::size_t>(k), 0);
    for (const auto& bc : block_counts)
        for (std::size_t j = 0; j < bc.size(); ++j) res.counts[j] += bc[j];
    res.probabilities.resize(k);
    res.standard_errors.resize(k);
    const double dn = static_cast<double>(n);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double p = static_cast<double>(res.counts[static_cast<std::size_t>(j)]) / dn;
        res.probabilities[j] = p;
        res.standard_errors[j] = std::sqrt(p * (1.0 - p) / dn);
    }
    return res;
}

/// Five-link, three-route test network parameterized by x >= 0:
///   link 1: x, link 2: 1.05x + 12, link 3: 10, link 4: 0.95x + 8, link 5: x
///   upper = 1,2   middle = 1,3,5   lower = 4,5
/// Links with zero time at x = 0 get a 1e-300 placeholder time so the route
/// set invariants hold; route times and covariances are unaffected in double
/// precision.
struct example_network {
    route_set routes;
    mnp_spec spec;
};

inline constexpr double zero_time_floor = 1e-300;

inline example_network generate_example_network(double x, double theta = 0.2, double sigma_eps = 10.0,
                                                covariance_kind kind = covariance_kind::arithmetic) {
    if (!(x >= 0.0)) throw domain_error("x must be nonnegative");
    const double shared = std::max(x, zero_time_floor);
    std::vector<link> links{{"1", shared}, {"2", 1.05 * x + 12.0}, {"3", 10.0}, {"4", 0.95 * x + 8.0}, {"5", shared}};
    std::vector<route> routes{{"upper", {"1", "2"}}, {"middle", {"1", "3", "5"}}, {"lower", {"4", "5"}}};
    route_set rs(std::move(links), std::move(routes));
    mnp_spec spec;
    spec.tau_hat = vector(3);
    spec.tau_hat << 2.05 * x + 12.0, 2.0 * x + 10.0, 1.95 * x + 8.0;
    spec.theta = theta;
    spec.sigma_eps = sigma_eps;
    spec.kind = kind;
    return {std::move(rs), std::move(spec)};
}

}  // namespace gmev
