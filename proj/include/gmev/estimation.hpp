#pragma once

// Maximum-likelihood estimation of GMEV models on aggregated choice counts,
// and cross-dataset validation.

#include "gmev/error.hpp"
#include "gmev/model.hpp"
#include "gmev/network.hpp"
#include "gmev/optimize.hpp"
#include "gmev/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace gmev {

/// One choice situation with observed (possibly fractional) choice counts.
struct scenario {
    double key = 0.0;
    route_set routes;
    vector counts;
};

struct choice_dataset {
    std::vector<scenario> scenarios;

    double total() const {
        double t = 0.0;
        for (const auto& s : scenarios) t += s.counts.sum();
        return t;
    }
};

inline void validate(const choice_dataset& data) {
    if (data.scenarios.empty()) throw input_error("dataset has no scenarios");
    for (const auto& s : data.scenarios) {
        if (static_cast<std::size_t>(s.counts.size()) != s.routes.size())
            throw input_error("scenario " + std::to_string(s.key) + ": one count per route required");
        for (Eigen::Index r = 0; r < s.counts.size(); ++r)
            if (!(s.counts[r] >= 0.0) || !std::isfinite(s.counts[r]))
                throw input_error("scenario " + std::to_string(s.key) + ": counts must be nonnegative");
        if (!(s.counts.sum() > 0.0)) throw input_error("scenario " + std::to_string(s.key) + ": total count must be positive");
    }
}

/// Sum over scenarios and routes of count * ln P.
inline double log_likelihood(const model_spec& model, const choice_dataset& data) {
    double ll = 0.0;
    for (const auto& s : data.scenarios) {
        const vector lp = log_model_probabilities(s.routes, model);
        for (Eigen::Index r = 0; r < lp.size(); ++r)
            if (s.counts[r] > 0.0) ll += s.counts[r] * lp[r];
    }
    return ll;
}

/// Parameters a fit can move. Unset optionals are not part of the model.
struct free_parameters {
    double mu = 1.0;
    std::optional<double> beta;
    std::optional<double> c;
    std::optional<double> rho;
    std::map<std::string, double> nest_scales;
};

struct estimation_config {
    int starts = 5;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    /// LN links with a free nest scale; empty means every link used by two or
    /// more routes in some scenario.
    std::vector<std::string> nest_links;
    double c_upper = 0.0;  // c <= c_upper for multiplicative-family models
    /// Extra starting points run after the box starts, e.g. a multiplicative
    /// model placed near the additive limit of a previous additive fit.
    std::vector<model_spec> warm_starts;
    nelder_mead_options optimizer{};
};

struct estimation_result {
    model_spec model;  // fitted
    free_parameters parameters;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    bool c_pinned = false;  // c sits on its upper bound
    std::optional<double> validation_log_likelihood;
    std::vector<double> start_log_likelihoods;
    std::optional<std::vector<double>> standard_errors;  // reserved; not computed
};

namespace detail {

inline bool is_multiplicative_family(const model_spec& m) { return !is_additive(m); }

inline bool is_hybrid(const model_spec& m) {
    return m.vector == vector_family::hybrid_additive || m.vector == vector_family::hybrid_multiplicative;
}

inline std::vector<std::string> default_nest_links(const choice_dataset& data) {
    std::set<std::string> ids;
    for (const auto& s : data.scenarios)
        for (std::size_t l = 0; l < s.routes.link_count(); ++l)
            if (s.routes.usage(l) >= 2) ids.insert(s.routes.links()[l].id);
    return {ids.begin(), ids.end()};
}

/// Maps an unconstrained vector onto model parameters:
/// [log mu, beta?, c?, log rho?, log(mu_l / mu)...].
class parameter_map {
public:
    parameter_map(const model_spec& base, const choice_dataset& data, const estimation_config& cfg)
        : base_(base), c_upper_(cfg.c_upper) {
        has_beta_ = base.function == function_family::ps;
        has_c_ = is_multiplicative_family(base);
        has_rho_ = is_hybrid(base);
        if (base.function == function_family::ln)
            nest_links_ = cfg.nest_links.empty() ? default_nest_links(data) : cfg.nest_links;
    }

    Eigen::Index size() const {
        return 1 + has_beta_ + has_c_ + has_rho_ + static_cast<Eigen::Index>(nest_links_.size());
    }

    /// Returns the model and a penalty that is positive only outside the
    /// feasible region (c above its bound, nest scale below mu).
    std::pair<model_spec, double> decode(const vector& theta) const {
        model_spec m = base_;
        double penalty = 0.0;
        Eigen::Index i = 0;
        m.mu = std::exp(theta[i++]);
        if (has_beta_) m.beta = theta[i++];
        if (has_c_) {
            const double raw = theta[i++];
            m.c = std::min(raw, c_upper_);
            if (raw > c_upper_) penalty += (raw - c_upper_) * (raw - c_upper_);
        } else {
            m.c = 0.0;
        }
        if (has_rho_) m.rho = std::exp(theta[i++]);
        m.nest_scales.clear();
        for (const auto& id : nest_links_) {
            const double log_ratio = theta[i++];
            if (log_ratio < 0.0 && !base_.allow_nest_scale_below_mu) penalty += log_ratio * log_ratio;
            m.nest_scales[id] = m.mu * std::exp(base_.allow_nest_scale_below_mu ? log_ratio : std::max(log_ratio, 0.0));
        }
        return {m, penalty};
    }

    vector encode(const model_spec& m) const {
        vector theta(size());
        Eigen::Index i = 0;
        theta[i++] = std::log(m.mu);
        if (has_beta_) theta[i++] = m.beta;
        if (has_c_) theta[i++] = m.c;
        if (has_rho_) theta[i++] = std::log(m.rho);
        for (const auto& id : nest_links_) {
            auto it = m.nest_scales.find(id);
            theta[i++] = it == m.nest_scales.end() ? 0.0 : std::log(it->second / m.mu);
        }
        return theta;
    }

    /// Start vector: index 0 is the box center, later ones uniform in the box.
    vector start(int index, std::mt19937_64& rng) const {
        const bool additive_scale = !has_c_;
        const double mu_lo = additive_scale ? 1e-3 : 0.1, mu_hi = additive_scale ? 50.0 : 200.0;
        auto pick = [&](double lo, double hi) {
            if (index == 0) return 0.5 * (lo + hi);
            return std::uniform_real_distribution<double>(lo, hi)(rng);
        };
        vector theta(size());
        Eigen::Index i = 0;
        theta[i++] = pick(std::log(mu_lo), std::log(mu_hi));
        if (has_beta_) theta[i++] = pick(-2.0, 5.0);
        if (has_c_) theta[i++] = pick(-200.0, std::min(0.0, c_upper_));
        if (has_rho_) theta[i++] = pick(std::log(0.01), std::log(100.0));
        for (std::size_t k = 0; k < nest_links_.size(); ++k) theta[i++] = pick(0.0, std::log(1e4));
        return theta;
    }

    vector steps() const {
        vector s = vector::Constant(size(), 0.5);
        if (has_beta_) s[1] = 0.25;
        if (has_c_) s[1 + has_beta_] = 10.0;
        return s;
    }

    free_parameters parameters(const model_spec& m) const {
        free_parameters p;
        p.mu = m.mu;
        if (has_beta_) p.beta = m.beta;
        if (has_c_) p.c = m.c;
        if (has_rho_) p.rho = m.rho;
        p.nest_scales = m.nest_scales;
        return p;
    }

    bool has_c() const { return has_c_; }
    double c_upper() const { return c_upper_; }

private:
    model_spec base_;
    double c_upper_;
    bool has_beta_ = false, has_c_ = false, has_rho_ = false;
    std::vector<std::string> nest_links_;
};

}  // namespace detail

/// Applies fitted parameters to a model.
inline model_spec apply(model_spec m, const free_parameters& p) {
    m.mu = p.mu;
    if (p.beta) m.beta = *p.beta;
    if (p.c) m.c = *p.c;
    if (p.rho) m.rho = *p.rho;
    if (!p.nest_scales.empty()) m.nest_scales = p.nest_scales;
    return m;
}

/// Multiplicative-family model that approximates an additive fit: with
/// V = c - cost and c -> -inf, ln(-V) ~ ln(-c) + cost/c, so mu' = mu (-c)
/// reproduces the additive probabilities up to O(cost/c).
inline model_spec additive_limit(const model_spec& additive_fit, const model_spec& target, double c) {
    if (!(c < 0.0)) throw domain_error("additive limit needs c < 0");
    model_spec m = target;
    m.c = c;
    m.mu = additive_fit.mu * -c;
    m.beta = additive_fit.beta;
    m.nest_scales = additive_fit.nest_scales;
    for (auto& [id, s] : m.nest_scales) s *= -c;
    return m;
}

/// Multi-start Nelder-Mead maximization of the log-likelihood. Starts run in
/// parallel; the best start (lowest index on ties) is reported.
inline estimation_result estimate(const model_spec& base, const choice_dataset& data, const estimation_config& cfg = {}) {
    validate(data);
    if (cfg.starts < 1) throw input_error("need at least one start");
    const detail::parameter_map map(base, data, cfg);
    const double total = data.total();

    auto objective = [&](const vector& theta) {
        try {
            auto [m, penalty] = map.decode(theta);
            return -log_likelihood(m, data) / total + penalty;
        } catch (const domain_error&) {
            return std::numeric_limits<double>::infinity();
        } catch (const convergence_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::mt19937_64 rng(cfg.seed);
    std::vector<vector> starts;
    for (int s = 0; s < cfg.starts; ++s) starts.push_back(map.start(s, rng));
    for (const auto& w : cfg.warm_starts) starts.push_back(map.encode(w));

    std::vector<nelder_mead_result> runs(starts.size());
    parallel_for(starts.size(), cfg.threads,
                 [&](std::size_t s) { runs[s] = nelder_mead(objective, starts[s], map.steps(), cfg.optimizer); });

    estimation_result res;
    std::size_t best = 0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        res.start_log_likelihoods.push_back(std::isfinite(runs[s].value) ? -runs[s].value * total
                                                                         : -std::numeric_limits<double>::infinity());
        if (runs[s].value < runs[best].value) best = s;
    }
    if (!std::isfinite(runs[best].value))
        throw domain_error("estimation failed: every start left the feasible region for " + model_name(base));

    // decode() projects onto the feasible region, so a point that ended in
    // the penalty zone is reported at its boundary value
    const model_spec fitted = map.decode(runs[best].x).first;
    res.model = fitted;
    res.parameters = map.parameters(fitted);
    res.log_likelihood = log_likelihood(fitted, data);
    res.converged = runs[best].converged;
    res.iterations = runs[best].iterations;
    res.evaluations = runs[best].evaluations;
    res.c_pinned = map.has_c() && fitted.c >= map.c_upper();
    return res;
}

/// Log-likelihood of already-fitted parameters on another dataset.
inline double validate(const model_spec& fitted, const choice_dataset& other) {
    validate(other);
    return log_likelihood(fitted, other);
}

}  // namespace gmev
