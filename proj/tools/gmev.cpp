// gmev command-line front end.
//
// Exit codes: 0 ok, 2 input error, 3 domain error, 4 non-convergence.

#include "gmev/gmev.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using gmev::io::json;

enum exit_code { ok = 0, input_failure = 2, domain_failure = 3, not_converged = 4 };

struct output {
    std::string path;

    void write(const std::string& text) const {
        if (path.empty() || path == "-") std::cout << text;
        else gmev::io::write_text_file(path, text);
    }
    void write(const json& j) const { write(j.dump(2) + "\n"); }
};

void check_format(const std::string& f) {
    if (f != "json" && f != "csv") throw gmev::input_error("--format must be json or csv");
}

std::pair<int, int> parse_range(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            const int x = std::stoi(s);
            return {x, x};
        }
        const int a = std::stoi(s.substr(0, colon)), b = std::stoi(s.substr(colon + 1));
        if (a > b || a < 0) throw gmev::input_error("--x-range must be lo:hi with 0 <= lo <= hi");
        return {a, b};
    } catch (const std::logic_error&) {
        throw gmev::input_error("--x-range must look like 5:15, got '" + s + "'");
    }
}

gmev::model_spec model_arg(const std::string& arg) {
    // a file path, or a bare name such as A-MN
    if (std::filesystem::exists(arg)) return gmev::io::load_model(arg);
    if (arg.find('-') != std::string::npos && arg.find('.') == std::string::npos) return gmev::parse_model_name(arg);
    throw gmev::input_error("model spec file not found: " + arg);
}

gmev::choice_dataset dataset_arg(const std::string& path, const std::string& network) {
    if (!network.empty()) {
        const auto rs = gmev::io::load_network(network);
        return gmev::io::load_dataset(path, [&](double) { return rs; });
    }
    return gmev::io::load_dataset(path, [](double x) { return gmev::generate_example_network(x).routes; });
}

std::map<std::string, std::string> meta(std::uint64_t seed, std::uint64_t n) {
    return {{"seed", std::to_string(seed)}, {"n", std::to_string(n)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized multivariate extreme value route choice models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gmev::version));

    std::string network, model, out, format = "json";
    std::uint64_t n = 100000, seed = 1;
    unsigned threads = 0;

    // probs
    auto* probs = app.add_subcommand("probs", "Choice probabilities for one model on one network");
    probs->add_option("--network", network, "Network JSON")->required();
    probs->add_option("--model", model, "Model spec JSON or a name like A-MN")->required();
    probs->add_option("--format", format, "json or csv");
    probs->add_option("--out", out, "Output file (default stdout)");

    // moments
    std::string ref;
    auto* moments = app.add_subcommand("moments", "Utility means, variances and expected maximum");
    moments->add_option("--network", network, "Network JSON")->required();
    moments->add_option("--model", model, "Model spec JSON or a name like M-MN")->required();
    moments->add_option("--ref", ref, "Reference route for MD models (default: fixed policy ref)");
    moments->add_option("--out", out, "Output file");

    // mnp
    std::string x_range, cov = "arithmetic";
    double theta = 0.2, sigma_eps = 10.0;
    std::optional<double> x_single;
    auto* mnp = app.add_subcommand("mnp", "Probit ground-truth probabilities by Monte Carlo");
    mnp->add_option("--network", network, "Network JSON (tau = route costs); default is the example network");
    auto* x_range_opt = mnp->add_option("--x-range", x_range, "Example network x values, lo:hi")->default_val("0:40");
    mnp->add_option("--x", x_single, "Single example network x (may be fractional)")->excludes(x_range_opt);
    mnp->add_option("--n", n, "Draws per scenario");
    mnp->add_option("--seed", seed, "Random seed");
    mnp->add_option("--cov", cov, "arithmetic or geometric");
    mnp->add_option("--theta", theta, "Foreseen time coefficient of variation");
    mnp->add_option("--sigma-eps", sigma_eps, "Analyst error standard deviation");
    mnp->add_option("--threads", threads, "Worker threads (0 = all cores)");
    mnp->add_option("--format", format, "json or csv");
    mnp->add_option("--out", out, "Output file");

    // estimate
    std::string train, validation;
    int starts = 5;
    auto* estimate = app.add_subcommand("estimate", "Maximum-likelihood fit on a count dataset");
    estimate->add_option("--model", model, "Model spec JSON or name (starting structure)")->required();
    estimate->add_option("--train", train, "Training CSV scenario_key,route_id,count")->required();
    estimate->add_option("--validate", validation, "Optional validation CSV");
    estimate->add_option("--network", network, "Network JSON shared by all scenarios; default example network by x");
    estimate->add_option("--starts", starts, "Number of random starts");
    estimate->add_option("--seed", seed, "Start seed");
    estimate->add_option("--threads", threads, "Worker threads");
    estimate->add_option("--out", out, "Output file");

    // validate
    std::string data;
    auto* validate = app.add_subcommand("validate", "Log-likelihood of fitted parameters on another dataset");
    validate->add_option("--model", model, "Fitted model spec JSON")->required();
    validate->add_option("--validate", data, "Dataset CSV")->required();
    validate->add_option("--network", network, "Network JSON shared by all scenarios");
    validate->add_option("--out", out, "Output file");

    // sue
    std::string problem, gap_csv;
    auto* sue = app.add_subcommand("sue", "Stochastic user equilibrium on one OD pair");
    sue->add_option("--problem", problem, "Problem JSON")->required();
    sue->add_option("--gap-csv", gap_csv, "Write the gap trajectory here");
    sue->add_option("--out", out, "Output file");

    // three-route study
    std::string out_dir = "study";
    auto* example = app.add_subcommand("paper-example", "Run the full three-route network study");
    example->add_option("--out", out_dir, "Output directory");
    example->add_option("--n", n, "Draws per x (>= 10000)");
    example->add_option("--seed", seed, "Random seed");
    example->add_option("--starts", starts, "Random starts per fit");
    example->add_option("--threads", threads, "Worker threads");

    // behavior-check
    std::string table_format = "table";
    auto* behavior = app.add_subcommand("behavior-check", "Trend table on the A/B/C1/C2 two-route networks");
    behavior->add_option("--format", table_format, "table or csv")->check(CLI::IsMember({"table", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : input_failure;
    }

    try {
        check_format(format);
        const output dest{out};

        if (*probs) {
            const auto rs = gmev::io::load_network(network);
            const auto m = model_arg(model);
            const auto p = gmev::model_probabilities(rs, m);
            if (format == "csv") dest.write(gmev::io::probabilities_csv(rs, p));
            else dest.write(gmev::io::probabilities_json(rs, m, p));
            return ok;
        }

        if (*moments) {
            const auto rs = gmev::io::load_network(network);
            const auto m = model_arg(model);
            const auto g = gmev::build_function(rs, m);
            const gmev::utility_spec u{m.c};
            const auto v = gmev::systematic_utilities(rs, u);
            gmev::moment_report rep;
            if (m.vector == gmev::vector_family::additive) rep = gmev::additive_moments(g, v);
            else if (m.vector == gmev::vector_family::multiplicative) rep = gmev::multiplicative_moments(g, v);
            else if (m.vector == gmev::vector_family::multiplicative_delta) {
                std::string r = ref;
                if (r.empty()) {
                    const auto* f = std::get_if<gmev::fixed_policy>(&m.policy);
                    if (!f) throw gmev::input_error("MD moments need --ref or a fixed reference policy");
                    r = f->ref;
                }
                rep = gmev::md_conditional_moments(g, rs, u, rs.route_index(r));
            } else {
                throw gmev::input_error("moments are available for A, M and MD models");
            }
            dest.write(gmev::io::to_json(rs, rep));
            return ok;
        }

        if (*mnp) {
            const auto kind = cov == "arithmetic" ? gmev::covariance_kind::arithmetic
                              : cov == "geometric" ? gmev::covariance_kind::geometric
                                                   : throw gmev::input_error("--cov must be arithmetic or geometric");
            struct row { double x; std::vector<std::string> ids; gmev::simulation_result sim; };
            std::vector<row> rows;
            if (!network.empty()) {
                const auto rs = gmev::io::load_network(network);
                gmev::mnp_spec spec;
                spec.tau_hat = rs.route_costs();
                spec.theta = theta;
                spec.sigma_eps = sigma_eps;
                spec.kind = kind;
                std::vector<std::string> ids;
                for (const auto& r : rs.routes()) ids.push_back(r.id);
                rows.push_back({0.0, ids, gmev::simulate_probabilities(gmev::mean_utilities(spec),
                                                                       gmev::build_covariance(rs, spec), n, seed, 0, threads)});
            } else {
                std::vector<double> xs;
                if (x_single) {
                    if (!(*x_single >= 0.0)) throw gmev::input_error("--x must be nonnegative");
                    xs.push_back(*x_single);
                } else {
                    const auto [lo, hi] = parse_range(x_range);
                    for (int x = lo; x <= hi; ++x) xs.push_back(x);
                }
                for (double x : xs) {
                    const auto net = gmev::generate_example_network(x, theta, sigma_eps, kind);
                    std::vector<std::string> ids;
                    for (const auto& r : net.routes.routes()) ids.push_back(r.id);
                    rows.push_back({x, ids,
                                    gmev::simulate_probabilities(gmev::mean_utilities(net.spec),
                                                                 gmev::build_covariance(net.routes, net.spec), n, seed,
                                                                 gmev::stream_for(x), threads)});
                }
            }
            if (format == "csv") {
                std::string s = gmev::io::metadata_header(meta(seed, n)) + "x,route_id,probability,standard_error,count\n";
                for (const auto& r : rows)
                    for (std::size_t k = 0; k < r.ids.size(); ++k) {
                        const auto i = static_cast<Eigen::Index>(k);
                        s += gmev::io::detail::format_double(r.x) + "," + r.ids[k] + "," +
                             gmev::io::detail::format_double(r.sim.probabilities[i]) + "," +
                             gmev::io::detail::format_double(r.sim.standard_errors[i]) + "," +
                             std::to_string(r.sim.counts[k]) + "\n";
                    }
                dest.write(s);
            } else {
                json j{{"tool", std::string("gmev ") + gmev::version}, {"seed", seed}, {"n", n}, {"scenarios", json::array()}};
                for (const auto& r : rows) {
                    json routes = json::array();
                    for (std::size_t k = 0; k < r.ids.size(); ++k) {
                        const auto i = static_cast<Eigen::Index>(k);
                        routes.push_back({{"id", r.ids[k]},
                                          {"probability", r.sim.probabilities[i]},
                                          {"standard_error", r.sim.standard_errors[i]},
                                          {"count", r.sim.counts[k]}});
                    }
                    j["scenarios"].push_back({{"x", r.x}, {"routes", routes}});
                }
                dest.write(j);
            }
            return ok;
        }

        if (*estimate) {
            const auto base = model_arg(model);
            const auto train_data = dataset_arg(train, network);
            gmev::estimation_config cfg;
            cfg.starts = starts;
            cfg.seed = seed;
            cfg.threads = threads;
            auto fit = gmev::estimate(base, train_data, cfg);
            if (!validation.empty()) fit.validation_log_likelihood = gmev::validate(fit.model, dataset_arg(validation, network));
            json j = gmev::io::to_json(fit);
            j["seed"] = seed;
            j["tool"] = std::string("gmev ") + gmev::version;
            dest.write(j);
            return fit.converged ? ok : not_converged;
        }

        if (*validate) {
            const auto m = gmev::io::load_model(model);
            const double ll = gmev::validate(m, dataset_arg(data, network));
            dest.write(json{{"model", gmev::model_name(m)}, {"log_likelihood", ll}});
            return ok;
        }

        if (*sue) {
            const auto p = gmev::io::sue_problem_from_json(gmev::io::read_json_file(problem), problem);
            const auto sol = gmev::solve_sue(p);
            dest.write(gmev::io::to_json(p, sol));
            if (!gap_csv.empty()) gmev::io::write_text_file(gap_csv, gmev::io::gap_history_csv(sol));
            return sol.converged ? ok : not_converged;
        }

        if (*example) {
            if (n < 10000) throw gmev::input_error("--n must be at least 10000");
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            const auto path = [&](const std::string& f) { return (fs::path(out_dir) / f).string(); };
            const auto m = meta(seed, n);
            using gmev::io::detail::format_double;

            const auto truth = gmev::ground_truth_curve(gmev::study_x_min, gmev::study_x_max, n, seed, threads);
            std::string gt = gmev::io::metadata_header(m) + "x,upper,middle,lower,se_upper,se_middle,se_lower\n";
            for (const auto& r : truth) {
                gt += format_double(r.x);
                for (int k = 0; k < 3; ++k) gt += "," + format_double(r.sim.probabilities[k]);
                for (int k = 0; k < 3; ++k) gt += "," + format_double(r.sim.standard_errors[k]);
                gt += "\n";
            }
            gmev::io::write_text_file(path("ground_truth.csv"), gt);

            // datasets reuse the ground-truth draws (same seed and stream per x)
            const auto first = gmev::example_dataset(5, 15, n, seed, threads);
            const auto second = gmev::example_dataset(25, 35, n, seed, threads);
            gmev::io::write_text_file(path("dataset_5_15.csv"), gmev::io::dataset_csv(first, m));
            gmev::io::write_text_file(path("dataset_25_35.csv"), gmev::io::dataset_csv(second, m));

            gmev::study_config sc;
            sc.n = n;
            sc.seed = seed;
            sc.starts = starts;
            sc.threads = threads;
            const auto study = gmev::run_study(first, second, sc);

            json fits = json::array();
            std::string est = gmev::io::metadata_header(m) +
                              "model,dataset,mu,beta,c,mu_l1,mu_l5,c_pinned,log_likelihood,validation_log_likelihood,converged\n";
            std::string curves = gmev::io::metadata_header(m) + "model,dataset,x,upper,middle,lower\n";
            bool all_converged = true;
            for (const auto& f : study.fits) {
                const auto& fit = f.fit;
                all_converged = all_converged && fit.converged;
                json jf = gmev::io::to_json(fit);
                jf["dataset"] = f.dataset;
                fits.push_back(jf);
                const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
                const auto nest = [&](const std::string& id) {
                    auto it = fit.model.nest_scales.find(id);
                    return it == fit.model.nest_scales.end() ? std::string() : format_double(it->second);
                };
                est += gmev::model_name(fit.model) + "," + f.dataset + "," + format_double(fit.model.mu) + "," +
                       opt(fit.parameters.beta) + "," + opt(fit.parameters.c) + "," + nest("1") + "," + nest("5") + "," +
                       (fit.c_pinned ? "1" : "0") + "," + format_double(fit.log_likelihood) + "," +
                       opt(fit.validation_log_likelihood) + "," + (fit.converged ? "1" : "0") + "\n";
                const auto curve = gmev::probability_curve(fit.model, gmev::study_x_min, gmev::study_x_max);
                for (std::size_t i = 0; i < curve.size(); ++i) {
                    curves += gmev::model_name(fit.model) + "," + f.dataset + "," + std::to_string(gmev::study_x_min + int(i));
                    for (int k = 0; k < 3; ++k) curves += "," + format_double(curve[i][k]);
                    curves += "\n";
                }
            }
            gmev::io::write_text_file(path("estimates.csv"), est);
            gmev::io::write_text_file(path("curves.csv"), curves);
            gmev::io::write_text_file(path("estimates.json"),
                                      json{{"tool", std::string("gmev ") + gmev::version}, {"seed", seed}, {"n", n}, {"fits", fits}}.dump(2) + "\n");
            std::cout << "wrote " << out_dir << "/{ground_truth,dataset_5_15,dataset_25_35,estimates,curves}.csv and estimates.json\n";
            return all_converged ? ok : not_converged;
        }

        if (*behavior) {
            const auto cells = gmev::behavior_table();
            bool all = true;
            if (table_format == "csv") {
                std::string s = "network,model,expected,observed,desired,matches_table\n";
                for (const auto& c : cells) {
                    s += c.network + "," + c.model + "," + std::string(to_string(c.expected)) + "," +
                         std::string(to_string(c.observed)) + "," + (c.desired() ? "1" : "0") + "," +
                         (c.reproduces() ? "1" : "0") + "\n";
                    all = all && c.reproduces();
                }
                std::cout << s;
            } else {
                std::cout << "network  model   expected  observed\n";
                for (const auto& c : cells) {
                    std::printf("%-8s %-7s %-9s %-9s %s%s\n", c.network.c_str(), c.model.c_str(),
                                std::string(to_string(c.expected)).c_str(), std::string(to_string(c.observed)).c_str(),
                                c.desired() ? "✓" : "✗", c.reproduces() ? "" : "  (differs from table)");
                    all = all && c.reproduces();
                }
            }
            return all ? ok : domain_failure;
        }
    } catch (const gmev::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_failure;
    } catch (const gmev::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return domain_failure;
    } catch (const gmev::convergence_error& e) {
        std::cerr << "not converged: " << e.what() << "\n";
        return not_converged;
    }
    return ok;
}
