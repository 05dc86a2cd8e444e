// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   gmev_acceptance [--n N] [--threads T]
//
// --n sets draws per x for the estimation criteria (default 1e6). Below 1e6
// the parameter tolerances are doubled.

#include "../unit/helpers.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>

using namespace gmev;
using namespace testing_support;

namespace {

struct outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double max_abs(const vector& a, const vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::uint64_t draws = 1000000;
unsigned threads = 0;

outcome reference_route_table() {
    outcome o;
    const auto rs = simple_network();
    const auto g = make_mn(1.0);
    const matrix m = conditional_matrix(g, rs, utility_spec{});
    matrix expected(3, 3);
    expected << 2.0 / 5, 1.0 / 5, 2.0 / 5, 8.0 / 17, 4.0 / 17, 5.0 / 17, 5.0 / 14, 4.0 / 14, 5.0 / 14;
    const double cond = (m - expected).cwiseAbs().maxCoeff();
    o.require(cond <= 1e-12, fmt("conditional rows off by %.3g", cond));
    const vector eq = md_probabilities(g, rs, utility_spec{}, equal_policy{});
    const double e = max_abs(eq, (vector(3) << 0.409, 0.240, 0.350).finished());
    o.require(e <= 5e-4, fmt("equal mixture off by %.3g", e));
    const vector mk = md_probabilities(g, rs, utility_spec{}, markov_policy{});
    const double k = max_abs(mk, (vector(3) << 0.401, 0.239, 0.359).finished());
    o.require(k <= 1e-3, fmt("markov off by %.3g", k));
    if (o.pass)
        o.detail = fmt("rows %.1e, equal %.1e", cond, e) + fmt(", markov %.1e (%.6f", k, mk[0]) +
                   fmt(", %.6f", mk[1]) + fmt(", %.6f)", mk[2]);
    return o;
}

outcome collapse_identities() {
    outcome o;
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = uniform_int(rng, 3, 8);
        const auto rs = random_route_set(rng, n);
        const double mu = uniform(rng, 0.3, 3.0);
        const double c = -uniform(rng, 0.0, 5.0);
        const utility_spec u{c};
        for (int vk = 0; vk < 2; ++vk) {
            const vector ly = vk == 0 ? log_additive_vector(systematic_utilities(rs, utility_spec{}))
                                      : log_multiplicative_vector(systematic_utilities(rs, u));
            const vector mn = choice_probabilities_log(make_mn(mu), ly);
            worst = std::max(worst, max_abs(choice_probabilities_log(make_ps(rs, mu, 0.0), ly), mn));
            const generating_function pc = pc_function{mu, matrix::Zero(n, n)};
            worst = std::max(worst, max_abs(choice_probabilities_log(pc, ly), mn));
            worst = std::max(worst, max_abs(choice_probabilities_log(make_ln(rs, mu, {}), ly), mn));
        }
        const auto disjoint = random_disjoint_route_set(rng, n);
        for (const auto& g : {make_mn(mu), make_ps(disjoint, mu, uniform(rng, -1, 2)), make_ln(disjoint, mu, {})}) {
            const vector m = choice_probabilities_log(g, log_multiplicative_vector(systematic_utilities(disjoint, u)));
            for (const reference_policy& p : {reference_policy{equal_policy{}}, reference_policy{markov_policy{}},
                                              reference_policy{fixed_policy{"r0"}}})
                worst = std::max(worst, max_abs(md_probabilities(g, disjoint, u, p), m));
        }
    }
    o.require(worst <= 1e-10, fmt("max difference %.3g", worst));
    if (o.pass) o.detail = fmt("100 route sets, max difference %.2e", worst);
    return o;
}

outcome invariance_suite() {
    outcome o;
    std::mt19937_64 rng(7);
    double translation = 0.0, scaling = 0.0, homogeneity = 0.0, euler = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = uniform_int(rng, 2, 8);
        const auto g = random_function(rng, i % 4, n);
        const double mu = scale(g);
        vector v(n);
        for (int r = 0; r < n; ++r) v[r] = -uniform(rng, 0.5, 10.0);
        const double k = uniform(rng, -20.0, 20.0);
        translation = std::max(translation, max_abs(choice_probabilities_log(g, log_additive_vector(v)),
                                                    choice_probabilities_log(g, log_additive_vector((v.array() + k).matrix()))));
        const double s = std::exp(uniform(rng, -3.0, 3.0));
        scaling = std::max(scaling, max_abs(choice_probabilities_log(g, log_multiplicative_vector(v)),
                                            choice_probabilities_log(g, log_multiplicative_vector(s * v))));
        const vector z = random_positive(rng, n);
        const double alpha = uniform(rng, 0.2, 5.0);
        const double gz = eval_G(g, z);
        homogeneity = std::max(homogeneity, std::abs(eval_G(g, alpha * z) - std::pow(alpha, mu) * gz) / (std::pow(alpha, mu) * gz));
        euler = std::max(euler, std::abs(z.dot(grad_G(g, z)) - mu * gz) / (mu * gz));
    }
    o.require(translation <= 1e-10, fmt("translation %.3g", translation));
    o.require(scaling <= 1e-10, fmt("scale %.3g", scaling));
    o.require(homogeneity <= 1e-9, fmt("homogeneity %.3g", homogeneity));
    o.require(euler <= 1e-9, fmt("euler %.3g", euler));
    if (o.pass)
        o.detail = fmt("translation %.1e, scale %.1e", translation, scaling) + fmt(", homogeneity %.1e, euler %.1e", homogeneity, euler);
    return o;
}

outcome gradient_check() {
    outcome o;
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = uniform_int(rng, 2, 7);
        const auto g = random_function(rng, i % 4, n);
        const vector z = random_positive(rng, n);
        const vector analytic = grad_G(g, z);
        for (int r = 0; r < n; ++r) {
            const double h = 1e-5 * z[r];
            vector up = z, down = z;
            up[r] += h;
            down[r] -= h;
            const double fd = (eval_G(g, up) - eval_G(g, down)) / (2 * h);
            worst = std::max(worst, std::abs(fd - analytic[r]) / std::max(std::abs(analytic[r]), 1e-300));
        }
    }
    o.require(worst <= 1e-5, fmt("relative error %.3g", worst));
    if (o.pass) o.detail = fmt("100 pairs, max relative error %.2e", worst);
    return o;
}

outcome behavior() {
    outcome o;
    int same = 0;
    for (const auto& c : behavior_table()) {
        same += c.reproduces();
        o.require(c.reproduces(), c.network + "/" + c.model + " observed " + std::string(to_string(c.observed)));
    }
    if (o.pass) o.detail = std::to_string(same) + "/9 cells match the reference table";
    return o;
}

// Shared between criteria 6 and 7.
struct study_data {
    choice_dataset first, second;
    study_result result;
};

const study_data& study() {
    static const study_data s = [] {
        study_data d{example_dataset(5, 15, draws, 1, threads), example_dataset(25, 35, draws, 1, threads), {}};
        study_config cfg;
        cfg.n = draws;
        cfg.threads = threads;
        d.result = run_study(d.first, d.second, cfg);
        return d;
    }();
    return s;
}

outcome estimates() {
    outcome o;
    const double widen = draws >= 1000000 ? 1.0 : 2.0;
    const auto& r = study().result;
    const auto check = [&](const char* label, double got, double want, double tol) {
        o.require(std::abs(got - want) <= widen * tol, std::string(label) + fmt("=%.4g", got) + fmt(" (want %.4g +- %.3g)", want, widen * tol));
    };
    const auto& a1 = r.find("A-MN", "5-15").fit;
    const auto& a2 = r.find("A-MN", "25-35").fit;
    const auto& m2 = r.find("M-MN", "25-35").fit;
    const auto& p2 = r.find("A-PS", "25-35").fit;
    check("A-MN{5..15} mu", a1.model.mu, 0.107, 0.010);
    check("A-MN{25..35} mu", a2.model.mu, 0.0699, 0.007);
    check("M-MN{25..35} mu", m2.model.mu, 5.593, 0.6);
    o.require(m2.c_pinned, fmt("M-MN{25..35} c=%.4g not at 0", m2.model.c));
    check("A-PS{25..35} beta", p2.model.beta, 0.501, 0.1);
    for (const auto* f : {&a1, &a2, &m2, &p2}) o.require(f->converged, model_name(f->model) + " did not converge");
    const std::string values = fmt("n=%.0f: mu %.4f", double(draws), a1.model.mu) + fmt(", %.4f; M-MN mu %.3f", a2.model.mu, m2.model.mu) +
                               fmt(" c=%g; A-PS beta %.3f", m2.model.c, p2.model.beta);
    o.detail = o.pass ? values : o.detail + " [" + values + "]";
    return o;
}

outcome fit_ordering() {
    outcome o;
    const auto& r = study().result;
    int comparisons = 0;
    for (const char* g : {"MN", "PS", "PC", "LN"})
        for (const char* d : {"5-15", "25-35"}) {
            const double additive = r.find(std::string("A-") + g, d).fit.log_likelihood;
            for (const char* v : {"M-", "MD-"}) {
                const std::string name = std::string(v) + g;
                const double ll = r.find(name, d).fit.log_likelihood;
                ++comparisons;
                o.require(ll >= additive, name + " on " + d + fmt(": estimation LL %.1f < A %.1f", ll, additive));
            }
        }
    for (const char* g : {"MN", "PS"})
        for (const char* d : {"5-15", "25-35"}) {
            const double a = *r.find(std::string("A-") + g, d).fit.validation_log_likelihood;
            const double md = *r.find(std::string("MD-") + g, d).fit.validation_log_likelihood;
            ++comparisons;
            o.require(md >= a, std::string("MD-") + g + " fitted on " + d + fmt(": validation LL %.1f < A %.1f", md, a));
        }
    if (o.pass) o.detail = std::to_string(comparisons) + " comparisons hold";
    return o;
}

struct running {
    double n = 0, mean = 0, m2 = 0;
    void add(double x) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double variance() const { return m2 / (n - 1); }
    double se() const { return std::sqrt(variance() / n); }
};

outcome moments() {
    outcome o;
    constexpr int mc = 1000000;
    const vector v = (vector(3) << -4.0, -5.0, -3.5).finished();
    double worst_z = 0.0;
    for (double mu : {0.5, 1.0, 2.0}) {
        const marginal_sampler sampler(mu);
        const auto add_rep = additive_moments(make_mn(mu), v);
        const auto mul_rep = multiplicative_moments(make_mn(mu), v);
        std::mt19937_64 rng(static_cast<std::uint64_t>(mu * 1000));
        for (int kind = 0; kind < 2; ++kind) {
            const auto& rep = kind == 0 ? add_rep : mul_rep;
            std::vector<running> u(3);
            std::vector<std::vector<double>> xs(3, std::vector<double>(mc));
            running mx;
            for (int i = 0; i < mc; ++i) {
                double best = -INFINITY;
                for (int r = 0; r < 3; ++r) {
                    const double x = kind == 0 ? sampler.additive(v[r], rng) : sampler.multiplicative(v[r], rng);
                    u[r].add(x);
                    xs[r][i] = x;
                    best = std::max(best, x);
                }
                mx.add(best);
            }
            const char* tag = kind == 0 ? "A" : "M";
            for (int r = 0; r < 3; ++r) {
                const double zm = std::abs(u[r].mean - rep.mean[r]) / u[r].se();
                double m4 = 0.0;
                for (double x : xs[r]) m4 += std::pow(x - u[r].mean, 4);
                m4 /= mc;
                const double s2 = u[r].variance();
                const double zv = std::abs(s2 - rep.variance[r]) / std::sqrt((m4 - s2 * s2) / mc);
                worst_z = std::max({worst_z, zm, zv});
                o.require(zm <= 3, std::string(tag) + fmt("-MN mu=%g mean z=%.2f", mu, zm));
                o.require(zv <= 3, std::string(tag) + fmt("-MN mu=%g variance z=%.2f", mu, zv));
            }
            const double zx = std::abs(mx.mean - *rep.expected_max) / mx.se();
            worst_z = std::max(worst_z, zx);
            o.require(zx <= 3, std::string(tag) + fmt("-MN mu=%g expected max z=%.2f", mu, zx));
        }
        // logsum computed directly
        double s = 0.0;
        for (int r = 0; r < 3; ++r) s += std::exp(mu * v[r]);
        const double logsum = (std::log(s) + std::numbers::egamma) / mu;
        const double diff = std::abs(*add_rep.expected_max - logsum);
        o.require(diff <= 1e-12, fmt("mu=%g logsum off by %.3g", mu, diff));
    }
    if (o.pass) o.detail = fmt("max |z| %.2f over 1e6 draws", worst_z);
    return o;
}

outcome sue() {
    outcome o;
    const auto rs = simple_network();
    std::vector<link_cost_function> costs;
    for (const auto& l : rs.links()) costs.push_back(affine_cost{l.cost, 0.01});
    model_spec m;
    m.mu = 0.5;
    const sue_problem p{rs, 100.0, costs, m};
    const auto sol = solve_sue(p);
    o.require(sol.converged, "did not converge");
    o.require(sol.iterations <= 5000, std::to_string(sol.iterations) + " iterations");
    o.require(sol.gap <= 1e-6, fmt("gap %.3g", sol.gap));
    const double residual = max_abs(sol.flows / p.demand, model_probabilities(loaded_network(p, sol.flows), m));
    o.require(residual <= 1e-6, fmt("residual %.3g", residual));
    // every interior point of a 142-step grid on the scaled simplex (9870 points)
    constexpr int steps = 142;
    double best = INFINITY;
    int points = 0;
    for (int i = 1; i < steps; ++i)
        for (int j = 1; i + j < steps; ++j) {
            const vector f = (vector(3) << i, j, steps - i - j).finished() * (p.demand / steps);
            best = std::min(best, duality_gap(p, f).value);
            ++points;
        }
    o.require(best >= sol.gap, fmt("grid point with gap %.3g", best));
    const std::string values = std::to_string(sol.iterations) + fmt(" iterations, gap %.2e, residual %.2e", sol.gap, residual) +
                               ", best of " + std::to_string(points) + fmt(" grid points %.2e", best);
    o.detail = o.pass ? values : o.detail + " [" + values + "]";
    return o;
}

outcome determinism() {
    outcome o;
    for (double x : {0.0, 12.0, 33.0}) {
        const auto one = ground_truth(x, 1000000, 42, 1);
        const auto eight = ground_truth(x, 1000000, 42, 8);
        const bool same = one.counts == eight.counts &&
                          std::memcmp(one.probabilities.data(), eight.probabilities.data(), 3 * sizeof(double)) == 0;
        o.require(same, fmt("x=%g differs", x));
    }
    if (o.pass) o.detail = "x in {0, 12, 33}, n=1e6: bit-identical";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--n") && i + 1 < argc) draws = std::stoull(argv[++i]);
        else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) threads = static_cast<unsigned>(std::stoul(argv[++i]));
        else {
            std::fprintf(stderr, "usage: %s [--n N] [--threads T]\n", argv[0]);
            return 2;
        }
    }

    struct criterion {
        const char* name;
        double budget;  // seconds; 0 = none
        std::function<outcome()> run;
    };
    const std::vector<criterion> all{
        {"reference-route table", 1.0, reference_route_table},
        {"collapse identities", 10.0, collapse_identities},
        {"invariance suite", 0.0, invariance_suite},
        {"gradient check", 0.0, gradient_check},
        {"behaviour table", 1.0, behavior},
        {"three-route estimates", 1800.0, estimates},
        {"fit ordering", 0.0, fit_ordering},
        {"moments vs Monte Carlo", 0.0, moments},
        {"SUE", 30.0, sue},
        {"MNP determinism", 0.0, determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& c = all[i];
        const auto t0 = std::chrono::steady_clock::now();
        outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // fit ordering reuses the study fitted (and timed) on the estimates line
        if (c.budget > 0.0 && secs > c.budget) o.require(false, fmt("took %.2f s", secs) + fmt(" (budget %.0f s)", c.budget));
        failed += !o.pass;
        std::printf("%s %2zu %-24s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
