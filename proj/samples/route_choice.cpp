// Minimal library usage: probabilities of a few models on a small network,
// then an equilibrium under flow-dependent costs.

#include "gmev/gmev.hpp"

#include <cstdio>

int main() {
    const gmev::route_set rs({{"a", 3}, {"b", 1}, {"d", 2}, {"e", 4}},
                             {{"upper", {"a", "b"}}, {"middle", {"a", "d"}}, {"lower", {"e"}}});

    for (const char* name : {"A-MN", "M-MN", "A-PS", "M-PC"}) {
        auto m = gmev::parse_model_name(name);
        const auto p = gmev::model_probabilities(rs, m);
        std::printf("%-5s %.4f %.4f %.4f\n", name, p[0], p[1], p[2]);
    }

    gmev::model_spec md = gmev::parse_model_name("MD-MN");
    md.policy = gmev::markov_policy{};
    const auto p = gmev::model_probabilities(rs, md);
    std::printf("MD-MN %.4f %.4f %.4f  (markov reference)\n", p[0], p[1], p[2]);

    std::vector<gmev::link_cost_function> costs;
    for (const auto& l : rs.links()) costs.push_back(gmev::affine_cost{l.cost, 0.01});
    gmev::model_spec logit;
    logit.mu = 0.5;
    const auto sol = gmev::solve_sue({rs, 100.0, costs, logit});
    std::printf("SUE flows %.3f %.3f %.3f  gap %.2e after %d iterations\n", sol.flows[0], sol.flows[1], sol.flows[2],
                sol.gap, sol.iterations);
}
