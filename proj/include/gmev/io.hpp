#pragma once

// JSON and CSV readers/writers for networks, model specs, datasets, SUE
// problems and results. Schema problems raise input_error with a location.

#include "gmev/error.hpp"
#include "gmev/estimation.hpp"
#include "gmev/model.hpp"
#include "gmev/moments.hpp"
#include "gmev/network.hpp"
#include "gmev/sue.hpp"
#include "gmev/version.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace gmev::io {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw input_error(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw input_error(where + ": missing \"" + key + "\"");
    return *it;
}

inline double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw input_error(where + ": expected a number");
    return j.get<double>();
}

inline std::string text(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());  // ids like 1 or "1"
    throw input_error(where + ": expected a string");
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
    auto it = j.find(key);
    return it == j.end() ? fallback : number(*it, where + "." + key);
}

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw input_error(where + ": '" + std::string(s) + "' is not a number");
    return x;
}

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << content;
    if (!out) throw input_error("write failed for " + path);
}

/// "# key: value" lines carried at the top of every emitted CSV.
inline std::string metadata_header(const std::map<std::string, std::string>& extra = {}) {
    std::string s = std::string("# tool: gmev ") + version + "\n";
    for (const auto& [k, v] : extra) s += "# " + k + ": " + v + "\n";
    return s;
}

// ---- networks -------------------------------------------------------------

inline route_set network_from_json(const json& j, const std::string& where = "network") {
    const json& jl = detail::require(j, "links", where);
    const json& jr = detail::require(j, "routes", where);
    if (!jl.is_array()) throw input_error(where + ".links: expected an array");
    if (!jr.is_array()) throw input_error(where + ".routes: expected an array");
    std::vector<link> links;
    for (std::size_t i = 0; i < jl.size(); ++i) {
        const std::string at = where + ".links[" + std::to_string(i) + "]";
        links.push_back({detail::text(detail::require(jl[i], "id", at), at + ".id"),
                         detail::number(detail::require(jl[i], "cost", at), at + ".cost")});
    }
    std::vector<route> routes;
    for (std::size_t i = 0; i < jr.size(); ++i) {
        const std::string at = where + ".routes[" + std::to_string(i) + "]";
        route r{detail::text(detail::require(jr[i], "id", at), at + ".id"), {}};
        const json& rl = detail::require(jr[i], "links", at);
        if (!rl.is_array()) throw input_error(at + ".links: expected an array");
        for (std::size_t k = 0; k < rl.size(); ++k)
            r.links.push_back(detail::text(rl[k], at + ".links[" + std::to_string(k) + "]"));
        routes.push_back(std::move(r));
    }
    try {
        return route_set(std::move(links), std::move(routes));
    } catch (const input_error& e) {
        throw input_error(where + ": " + e.what());
    }
}

inline json to_json(const route_set& rs) {
    json j;
    j["links"] = json::array();
    for (const auto& l : rs.links()) j["links"].push_back({{"id", l.id}, {"cost", l.cost}});
    j["routes"] = json::array();
    for (const auto& r : rs.routes()) j["routes"].push_back({{"id", r.id}, {"links", r.links}});
    return j;
}

inline route_set load_network(const std::string& path) { return network_from_json(read_json_file(path), path); }

// ---- models ---------------------------------------------------------------

inline reference_policy policy_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return policy_from_json(json{{"policy", j}}, where);
    const std::string name = detail::text(detail::require(j, "policy", where), where + ".policy");
    if (name == "equal") return equal_policy{};
    if (name == "markov") {
        markov_policy p;
        p.tolerance = detail::number_or(j, "tol", p.tolerance, where);
        p.max_iterations = static_cast<int>(detail::number_or(j, "max_iter", p.max_iterations, where));
        return p;
    }
    if (name == "fixed") return fixed_policy{detail::text(detail::require(j, "ref", where), where + ".ref")};
    throw input_error(where + ".policy: expected equal|markov|fixed, got '" + name + "'");
}

inline json to_json(const reference_policy& p) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, equal_policy>) return {{"policy", "equal"}};
            else if constexpr (std::is_same_v<T, markov_policy>)
                return {{"policy", "markov"}, {"tol", v.tolerance}, {"max_iter", v.max_iterations}};
            else return {{"policy", "fixed"}, {"ref", v.ref}};
        },
        p);
}

/// Either {"model": "MD-MN", ...} or {"function": "MN", "vector": "MD", ...}.
inline model_spec model_from_json(const json& j, const std::string& where = "model") {
    if (!j.is_object()) throw input_error(where + ": expected an object");
    model_spec m;
    try {
        if (j.contains("model")) {
            m = parse_model_name(detail::text(j["model"], where + ".model"));
        } else {
            m.function = parse_function_family(detail::text(detail::require(j, "function", where), where + ".function"));
            m.vector = parse_vector_family(detail::text(detail::require(j, "vector", where), where + ".vector"));
        }
    } catch (const input_error& e) {
        throw input_error(where + ": " + e.what());
    }
    m.mu = detail::number_or(j, "mu", m.mu, where);
    m.beta = detail::number_or(j, "beta", m.beta, where);
    m.rho = detail::number_or(j, "rho", m.rho, where);
    m.c = detail::number_or(j, "c", m.c, where);
    if (auto it = j.find("nest_scales"); it != j.end()) {
        if (!it->is_object()) throw input_error(where + ".nest_scales: expected an object of link id -> scale");
        for (const auto& [k, v] : it->items()) m.nest_scales[k] = detail::number(v, where + ".nest_scales." + k);
    }
    if (auto it = j.find("reference_policy"); it != j.end()) m.policy = policy_from_json(*it, where + ".reference_policy");
    if (auto it = j.find("reference_path_size"); it != j.end()) m.reference_path_size = it->get<bool>();
    if (auto it = j.find("allow_nest_scale_below_mu"); it != j.end()) m.allow_nest_scale_below_mu = it->get<bool>();
    return m;
}

inline json to_json(const model_spec& m) {
    json j{{"function", std::string(to_string(m.function))},
           {"vector", std::string(to_string(m.vector))},
           {"mu", m.mu}};
    if (m.function == function_family::ps) j["beta"] = m.beta;
    if (m.vector == vector_family::hybrid_additive || m.vector == vector_family::hybrid_multiplicative) j["rho"] = m.rho;
    if (uses_constant(m)) j["c"] = m.c;
    if (!m.nest_scales.empty()) j["nest_scales"] = m.nest_scales;
    if (m.vector == vector_family::multiplicative_delta) {
        j["reference_policy"] = to_json(m.policy);
        if (m.reference_path_size) j["reference_path_size"] = true;
    }
    if (m.allow_nest_scale_below_mu) j["allow_nest_scale_below_mu"] = true;
    return j;
}

inline model_spec load_model(const std::string& path) { return model_from_json(read_json_file(path), path); }

// ---- datasets -------------------------------------------------------------

struct count_row {
    double key;
    std::string route;
    double count;
};

/// Rows of "scenario_key,route_id,count"; '#' lines and a header are skipped.
inline std::vector<count_row> read_count_rows(std::istream& in, const std::string& where) {
    std::vector<count_row> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("scenario_key", 0) == 0) continue;
        const auto cells = detail::split(t);
        const std::string at = where + ":" + std::to_string(lineno);
        if (cells.size() != 3) throw input_error(at + ": expected 3 columns");
        rows.push_back({detail::parse_double(cells[0], at), cells[1], detail::parse_double(cells[2], at)});
    }
    return rows;
}

/// Groups rows by scenario key; `network_for(key)` supplies each route set.
template <class NetworkFor>
choice_dataset dataset_from_rows(const std::vector<count_row>& rows, NetworkFor&& network_for, const std::string& where) {
    std::map<double, std::map<std::string, double>> grouped;
    for (const auto& r : rows) {
        auto& slot = grouped[r.key][r.route];
        if (slot != 0.0) throw input_error(where + ": duplicate row for scenario " + detail::format_double(r.key) + ", route " + r.route);
        slot += r.count;
    }
    choice_dataset data;
    for (const auto& [key, counts] : grouped) {
        route_set rs = network_for(key);
        vector c = vector::Zero(static_cast<Eigen::Index>(rs.size()));
        for (const auto& [rid, n] : counts) c[static_cast<Eigen::Index>(rs.route_index(rid))] = n;
        data.scenarios.push_back({key, std::move(rs), std::move(c)});
    }
    validate(data);
    return data;
}

template <class NetworkFor>
choice_dataset load_dataset(const std::string& path, NetworkFor&& network_for) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    return dataset_from_rows(read_count_rows(in, path), std::forward<NetworkFor>(network_for), path);
}

inline std::string dataset_csv(const choice_dataset& data, const std::map<std::string, std::string>& meta = {}) {
    std::string s = metadata_header(meta) + "scenario_key,route_id,count\n";
    for (const auto& sc : data.scenarios)
        for (std::size_t r = 0; r < sc.routes.size(); ++r)
            s += detail::format_double(sc.key) + "," + sc.routes.routes()[r].id + "," +
                 detail::format_double(sc.counts[static_cast<Eigen::Index>(r)]) + "\n";
    return s;
}

// ---- results --------------------------------------------------------------

inline json probabilities_json(const route_set& rs, const model_spec& m, const vector& p) {
    json j{{"model", to_json(m)}, {"routes", json::array()}};
    for (std::size_t r = 0; r < rs.size(); ++r)
        j["routes"].push_back({{"id", rs.routes()[r].id}, {"probability", p[static_cast<Eigen::Index>(r)]}});
    return j;
}

inline std::string probabilities_csv(const route_set& rs, const vector& p, const std::map<std::string, std::string>& meta = {}) {
    std::string s = metadata_header(meta) + "route_id,probability\n";
    for (std::size_t r = 0; r < rs.size(); ++r)
        s += rs.routes()[r].id + "," + detail::format_double(p[static_cast<Eigen::Index>(r)]) + "\n";
    return s;
}

inline json to_json(const route_set& rs, const moment_report& rep) {
    json j{{"routes", json::array()}};
    for (std::size_t r = 0; r < rs.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        j["routes"].push_back({{"id", rs.routes()[r].id}, {"mean", rep.mean[i]}, {"variance", rep.variance[i]}});
    }
    if (rep.expected_max) j["expected_max"] = *rep.expected_max;
    return j;
}

inline json to_json(const estimation_result& r) {
    json j{{"model", model_name(r.model)},
           {"parameters", to_json(r.model)},
           {"log_likelihood", r.log_likelihood},
           {"converged", r.converged},
           {"iterations", r.iterations},
           {"evaluations", r.evaluations},
           {"c_pinned", r.c_pinned},
           {"start_log_likelihoods", r.start_log_likelihoods}};
    if (r.validation_log_likelihood) j["validation_log_likelihood"] = *r.validation_log_likelihood;
    return j;
}

// ---- SUE ------------------------------------------------------------------

inline link_cost_function cost_function_from_json(const json& j, const std::string& where) {
    const std::string type = detail::text(detail::require(j, "type", where), where + ".type");
    const double t0 = detail::number(detail::require(j, "t0", where), where + ".t0");
    if (type == "constant") return constant_cost{t0};
    if (type == "affine") return affine_cost{t0, detail::number(detail::require(j, "slope", where), where + ".slope")};
    if (type == "bpr")
        return bpr_cost{t0, detail::number(detail::require(j, "capacity", where), where + ".capacity"),
                        detail::number_or(j, "a", 0.15, where), detail::number_or(j, "b", 4.0, where)};
    throw input_error(where + ".type: expected constant|affine|bpr, got '" + type + "'");
}

inline json to_json(const link_cost_function& fn) {
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, constant_cost>) return {{"type", "constant"}, {"t0", f.t0}};
            else if constexpr (std::is_same_v<T, affine_cost>) return {{"type", "affine"}, {"t0", f.t0}, {"slope", f.slope}};
            else return {{"type", "bpr"}, {"t0", f.t0}, {"capacity", f.capacity}, {"a", f.a}, {"b", f.b}};
        },
        fn);
}

/// {"network": {...}, "demand": D, "cost_functions": {link id: {...}},
///  "model": {...}, "solver": {...}}. Links without a cost function keep
/// their network cost as a constant.
inline sue_problem sue_problem_from_json(const json& j, const std::string& where = "problem") {
    route_set rs = network_from_json(detail::require(j, "network", where), where + ".network");
    std::vector<link_cost_function> costs;
    for (const auto& l : rs.links()) costs.push_back(constant_cost{l.cost});
    if (auto it = j.find("cost_functions"); it != j.end()) {
        if (!it->is_object()) throw input_error(where + ".cost_functions: expected an object of link id -> function");
        for (const auto& [id, fn] : it->items()) {
            const std::string at = where + ".cost_functions." + id;
            std::size_t l;
            try {
                l = rs.link_index(id);
            } catch (const input_error& e) {
                throw input_error(at + ": " + e.what());
            }
            costs[l] = cost_function_from_json(fn, at);
        }
    }
    sue_problem p{std::move(rs), detail::number(detail::require(j, "demand", where), where + ".demand"), std::move(costs),
                  model_from_json(detail::require(j, "model", where), where + ".model")};
    if (auto it = j.find("solver"); it != j.end()) {
        const std::string at = where + ".solver";
        p.config.max_iterations = static_cast<int>(detail::number_or(*it, "max_iterations", p.config.max_iterations, at));
        p.config.gap_tolerance = detail::number_or(*it, "gap_tolerance", p.config.gap_tolerance, at);
        p.config.residual_tolerance = detail::number_or(*it, "residual_tolerance", p.config.residual_tolerance, at);
        if (auto s = it->find("step"); s != it->end()) {
            const std::string rule = detail::text(*s, at + ".step");
            if (rule == "msa") p.config.step = step_rule::msa;
            else if (rule == "self_regulated") p.config.step = step_rule::self_regulated;
            else throw input_error(at + ".step: expected msa|self_regulated");
        }
    }
    validate(p);
    return p;
}

inline json to_json(const sue_problem& p) {
    json cf = json::object();
    for (std::size_t l = 0; l < p.network.link_count(); ++l) cf[p.network.links()[l].id] = to_json(p.costs[l]);
    return {{"network", to_json(p.network)},
            {"demand", p.demand},
            {"cost_functions", cf},
            {"model", to_json(p.model)},
            {"solver",
             {{"max_iterations", p.config.max_iterations},
              {"gap_tolerance", p.config.gap_tolerance},
              {"residual_tolerance", p.config.residual_tolerance},
              {"step", p.config.step == step_rule::msa ? "msa" : "self_regulated"}}}};
}

inline json to_json(const sue_problem& p, const sue_solution& s) {
    json routes = json::array();
    for (std::size_t r = 0; r < p.network.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        routes.push_back({{"id", p.network.routes()[r].id}, {"flow", s.flows[i]}, {"cost", s.costs[i]}});
    }
    return {{"routes", routes},     {"gap", s.gap},           {"residual", s.residual},
            {"iterations", s.iterations}, {"converged", s.converged}, {"experimental", s.experimental}};
}

inline std::string gap_history_csv(const sue_solution& s, const std::map<std::string, std::string>& meta = {}) {
    std::string out = metadata_header(meta) + "iteration,gap\n";
    for (std::size_t k = 0; k < s.gap_history.size(); ++k)
        out += std::to_string(k) + "," + detail::format_double(s.gap_history[k]) + "\n";
    return out;
}

}  // namespace gmev::io
