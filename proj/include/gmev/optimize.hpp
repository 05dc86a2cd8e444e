#pragma once

// Derivative-free minimization (Nelder-Mead with restarts).

#include "gmev/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gmev {

struct nelder_mead_options {
    int max_evaluations = 20000;
    double f_tolerance = 1e-12;  // relative spread of simplex values
    double x_tolerance = 1e-8;   // simplex diameter (infinity norm)
    int restarts = 3;            // fresh simplices around the incumbent
};

struct nelder_mead_result {
    vector x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f starting from x0 with initial per-coordinate steps. Non-finite
/// objective values are treated as +inf, which lets callers reject infeasible
/// points by returning infinity.
template <class F>
nelder_mead_result nelder_mead(F&& f, const vector& x0, const vector& steps, const nelder_mead_options& opt = {}) {
    const auto n = x0.size();
    nelder_mead_result out;
    out.x = x0;
    auto eval = [&](const vector& x) {
        ++out.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    out.value = eval(x0);
    if (n == 0) {
        out.converged = true;
        return out;
    }

    for (int round = 0; round <= opt.restarts; ++round) {
        std::vector<vector> pts(static_cast<std::size_t>(n + 1), out.x);
        std::vector<double> vals(static_cast<std::size_t>(n + 1), out.value);
        for (Eigen::Index i = 0; i < n; ++i) {
            pts[static_cast<std::size_t>(i + 1)][i] += steps[i];
            vals[static_cast<std::size_t>(i + 1)] = eval(pts[static_cast<std::size_t>(i + 1)]);
        }
        std::vector<std::size_t> order(pts.size());
        bool converged = false;
        while (out.evaluations < opt.max_evaluations) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
            const auto best = order.front(), worst = order.back(), second = order[order.size() - 2];
            ++out.iterations;

            double diameter = 0.0;
            for (auto i : order) diameter = std::max(diameter, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
            const double spread = std::abs(vals[worst] - vals[best]);
            const bool flat = std::isfinite(vals[worst]) && spread <= opt.f_tolerance * (std::abs(vals[best]) + 1e-300);
            if ((flat && diameter <= opt.x_tolerance) || diameter <= 1e-14) {
                converged = std::isfinite(vals[best]);
                break;
            }

            vector centroid = vector::Zero(n);
            for (auto i : order)
                if (i != worst) centroid += pts[i];
            centroid /= static_cast<double>(n);

            const vector reflected = centroid + (centroid - pts[worst]);
            const double fr = eval(reflected);
            if (fr < vals[best]) {
                const vector expanded = centroid + 2.0 * (centroid - pts[worst]);
                const double fe = eval(expanded);
                if (fe < fr) {
                    pts[worst] = expanded;
                    vals[worst] = fe;
                } else {
                    pts[worst] = reflected;
                    vals[worst] = fr;
                }
                continue;
            }
            if (fr < vals[second]) {
                pts[worst] = reflected;
                vals[worst] = fr;
                continue;
            }
            const bool outside = fr < vals[worst];
            const vector contracted =
                outside ? vector(centroid + 0.5 * (reflected - centroid)) : vector(centroid + 0.5 * (pts[worst] - centroid));
            const double fc = eval(contracted);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = contracted;
                vals[worst] = fc;
                continue;
            }
            for (auto i : order) {
                if (i == best) continue;
                pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                vals[i] = eval(pts[i]);
            }
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (vals[i] < vals[best]) best = i;
        const double previous = out.value;
        if (vals[best] <= out.value) {
            out.value = vals[best];
            out.x = pts[best];
        }
        out.converged = converged;
        if (out.evaluations >= opt.max_evaluations) {
            out.converged = false;
            break;
        }
        // Stop restarting once a fresh simplex brings no real improvement.
        if (round > 0 && previous - out.value <= opt.f_tolerance * (std::abs(out.value) + 1e-300)) break;
    }
    return out;
}

}  // namespace gmev
