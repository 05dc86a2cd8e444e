#pragma once

// The three-route example network study: probit ground truth for x = 0..40,
// two training datasets ({5..15} and {25..35}), and the twelve A/M/MD x
// MN/PS/PC/LN models estimated on each and validated on the other.

#include "gmev/estimation.hpp"
#include "gmev/mnp.hpp"
#include "gmev/model.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gmev {

inline constexpr int study_x_min = 0;
inline constexpr int study_x_max = 40;

struct ground_truth_row {
    double x;
    simulation_result sim;
};

inline simulation_result ground_truth(double x, std::uint64_t n, std::uint64_t seed, unsigned threads = 0) {
    const auto net = generate_example_network(x);
    return simulate_probabilities(mean_utilities(net.spec), build_covariance(net.routes, net.spec), n, seed,
                                  stream_for(x), threads);
}

inline std::vector<ground_truth_row> ground_truth_curve(int x_min, int x_max, std::uint64_t n, std::uint64_t seed,
                                                        unsigned threads = 0) {
    std::vector<ground_truth_row> rows;
    for (int x = x_min; x <= x_max; ++x) rows.push_back({double(x), ground_truth(x, n, seed, threads)});
    return rows;
}

/// Simulated choice counts for every integer x in [x_min, x_max].
inline choice_dataset example_dataset(int x_min, int x_max, std::uint64_t n, std::uint64_t seed, unsigned threads = 0) {
    choice_dataset data;
    for (int x = x_min; x <= x_max; ++x) {
        const auto sim = ground_truth(x, n, seed, threads);
        vector counts(static_cast<Eigen::Index>(sim.counts.size()));
        for (std::size_t r = 0; r < sim.counts.size(); ++r) counts[static_cast<Eigen::Index>(r)] = double(sim.counts[r]);
        data.scenarios.push_back({double(x), generate_example_network(x).routes, std::move(counts)});
    }
    return data;
}

/// A, M, MD over MN, PS, PC, LN. MD-MN and MD-PS use the Markov reference
/// policy, MD-PC and MD-LN the equal policy.
inline std::vector<model_spec> study_models() {
    std::vector<model_spec> out;
    for (auto v : {vector_family::additive, vector_family::multiplicative, vector_family::multiplicative_delta})
        for (auto f : {function_family::mn, function_family::ps, function_family::pc, function_family::ln}) {
            model_spec m;
            m.vector = v;
            m.function = f;
            if (v == vector_family::multiplicative_delta)
                m.policy = (f == function_family::mn || f == function_family::ps) ? reference_policy{markov_policy{}}
                                                                                   : reference_policy{equal_policy{}};
            out.push_back(m);
        }
    return out;
}

inline const std::vector<std::string>& study_nest_links() {
    static const std::vector<std::string> links{"1", "5"};
    return links;
}

struct study_fit {
    std::string dataset;    // "5-15" or "25-35"
    estimation_result fit;  // validation_log_likelihood is on the other dataset
};

struct study_result {
    std::vector<study_fit> fits;  // model-major, then dataset

    const study_fit& find(const std::string& model, const std::string& dataset) const {
        for (const auto& f : fits)
            if (model_name(f.fit.model) == model && f.dataset == dataset) return f;
        throw input_error("no fit for " + model + " on " + dataset);
    }
};

struct study_config {
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    int starts = 5;
    unsigned threads = 0;
};

/// Fits every model on both datasets. Multiplicative-family fits get one
/// extra start near the additive limit of the matching additive fit.
inline study_result run_study(const choice_dataset& first, const choice_dataset& second, const study_config& cfg,
                              const std::vector<model_spec>& models = study_models()) {
    const std::array<const choice_dataset*, 2> sets{&first, &second};
    const std::array<std::string, 2> names{"5-15", "25-35"};
    study_result out;
    std::array<std::vector<model_spec>, 2> additive_fits;
    for (const auto& m : models) {
        for (std::size_t d = 0; d < 2; ++d) {
            estimation_config ec;
            ec.starts = cfg.starts;
            ec.seed = cfg.seed + d;
            ec.threads = cfg.threads;
            ec.nest_links = study_nest_links();
            if (!is_additive(m))
                for (const auto& a : additive_fits[d])
                    if (a.function == m.function) ec.warm_starts.push_back(additive_limit(a, m, -200.0));
            auto fit = estimate(m, *sets[d], ec);
            try {
                fit.validation_log_likelihood = validate(fit.model, *sets[1 - d]);
            } catch (const domain_error&) {
                fit.validation_log_likelihood = -std::numeric_limits<double>::infinity();
            }
            if (is_additive(m)) additive_fits[d].push_back(fit.model);
            out.fits.push_back({names[d], std::move(fit)});
        }
    }
    return out;
}

/// Fitted model probabilities for x in [x_min, x_max]; NaN where the model is
/// undefined at that x.
inline std::vector<vector> probability_curve(const model_spec& fitted, int x_min, int x_max) {
    std::vector<vector> rows;
    for (int x = x_min; x <= x_max; ++x) {
        try {
            rows.push_back(model_probabilities(generate_example_network(x).routes, fitted));
        } catch (const domain_error&) {
            rows.push_back(vector::Constant(3, std::numeric_limits<double>::quiet_NaN()));
        }
    }
    return rows;
}

}  // namespace gmev
