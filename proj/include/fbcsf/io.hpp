#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbcsf/asymptotics.hpp"
#include "fbcsf/flow.hpp"
#include "fbcsf/geometry.hpp"

namespace fbcsf::io {

using json = nlohmann::json;

/// Malformed or missing configuration (as opposed to a mathematical failure).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing \"") + key + "\"");
    return get_or<T>(j, key, T{});
}

inline double positive(const json& j, const char* key, double fallback) {
    const double v = get_or<double>(j, key, fallback);
    if (!(v > 0.0)) throw ConfigError(std::string("\"") + key + "\" must be positive");
    return v;
}

/// {"kind": "disk" | "ellipse" | "fourier", "a", "b", "cos_coeffs", "sin_coeffs"}.
inline ConvexDomain domain_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("domain spec must be an object");
    const auto kind = require<std::string>(j, "kind");
    if (kind == "disk") return ConvexDomain::disk(positive(j, "a", 1.0));
    if (kind == "ellipse") return ConvexDomain::ellipse(positive(j, "a", 2.0), positive(j, "b", 1.0));
    if (kind == "fourier") {
        auto c = require<std::vector<double>>(j, "cos_coeffs");
        auto s = get_or<std::vector<double>>(j, "sin_coeffs", {});
        if (c.empty() || !(c[0] > 0.0)) throw ConfigError("cos_coeffs[0] must be a positive mean radius of curvature");
        return ConvexDomain::from_fourier(std::move(c), std::move(s));
    }
    throw ConfigError("unknown domain kind \"" + kind + "\"");
}

/// The domain may sit under "domain" or be the config itself.
inline const json& domain_section(const json& cfg) { return cfg.contains("domain") ? cfg.at("domain") : cfg; }

inline SolverConfig solver_from_json(const json& j) {
    SolverConfig c;
    const json& s = j.contains("solver") ? j.at("solver") : j;
    c.n_nodes = get_or<int>(s, "n_nodes", c.n_nodes);
    c.dt_safety = get_or<double>(s, "dt_safety", c.dt_safety);
    c.redistribution = get_or<bool>(s, "redistribution", c.redistribution);
    c.redistribution_tolerance = get_or<double>(s, "redistribution_tolerance", c.redistribution_tolerance);
    c.extinction_length = get_or<double>(s, "extinction_length", c.extinction_length);
    c.max_steps = get_or<std::int64_t>(s, "max_steps", c.max_steps);
    c.sample_interval = get_or<double>(s, "sample_interval", c.sample_interval);
    c.state_interval = get_or<double>(s, "state_interval", c.state_interval);
    c.abscissas = get_or<std::vector<double>>(s, "abscissas", c.abscissas);
    try {
        c.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("solver settings: ") + e.what());
    }
    return c;
}

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,theta_plus,theta_minus,kappa_min,kappa_max,area,dA_dt";
    for (std::size_t k = 0; k < traj.abscissas.size(); ++k) out << ",y_at_x" << k;
    out << ",barrier_margin\n";
    for (const auto& m : traj.monitors) {
        out << fmt17(m.t) << ',' << fmt17(m.theta_plus) << ',' << fmt17(m.theta_minus) << ',' << fmt17(m.kappa_min) << ','
            << fmt17(m.kappa_max) << ',' << fmt17(m.area) << ',' << fmt17(m.dA_dt);
        for (double y : m.heights) out << ',' << fmt17(y);
        out << ',' << fmt17(m.barrier_margin) << '\n';
    }
}

inline json to_json(Vec2 p) { return json::array({p.x, p.y}); }

inline json diameters_json(const ConvexDomain& d, const DiameterSearch& found) {
    json out;
    out["degenerate"] = found.degenerate;
    out["diameters"] = json::array();
    for (const auto& dia : found.diameters) {
        out["diameters"].push_back({{"omega_plus", dia.omega_plus},
                                    {"omega_minus", dia.omega_minus},
                                    {"p_plus", to_json(dia.p_plus)},
                                    {"p_minus", to_json(dia.p_minus)},
                                    {"length", dia.length},
                                    {"kappa_plus", d.kappa(dia.omega_plus)},
                                    {"kappa_minus", d.kappa(dia.omega_minus)}});
    }
    return out;
}

inline json to_json(const EstimateReport& rep) {
    json arr = json::array();
    for (const auto& r : rep.records) {
        arr.push_back({{"name", r.name},
                       {"rate", r.rate},
                       {"required_rate", r.required_rate},
                       {"constant", r.constant},
                       {"fit_residual", r.fit_residual},
                       {"pass", r.pass},
                       {"window", {r.window.begin, r.window.end}},
                       {"samples", r.samples}});
    }
    return arr;
}

inline json to_json(const Profile& p) {
    return {{"A", p.A},
            {"lambda0", p.lambda0},
            {"c", p.c},
            {"c_closed_form", p.c_closed_form},
            {"residual", p.fit_residual},
            {"window", {p.window.begin, p.window.end}},
            {"samples", p.samples}};
}

inline json to_json(const EigenPair& p) {
    return {{"mu", p.mu}, {"frequency", p.frequency}, {"a", p.a}, {"b", p.b}, {"phase", p.phase},
            {"convex", p.convex}, {"ode_residual", p.ode_residual}, {"bc_residual", p.bc_residual}};
}

inline json to_json(const EigenResult& e) {
    json out{{"kappa1", e.kappa1}, {"kappa2", e.kappa2}, {"negative", json::array()}, {"positive", json::array()}};
    for (const auto& p : e.negative) out["negative"].push_back(to_json(p));
    for (const auto& p : e.positive) out["positive"].push_back(to_json(p));
    out["convex_negative_count"] = e.convex_negative_count();
    return out;
}

inline json to_json(const UniquenessReport& u) {
    return {{"tau_star", u.tau_star}, {"distance", u.distance}, {"window", {u.window.begin, u.window.end}}};
}

inline json run_summary(const Trajectory& t) {
    return {{"rho", t.rho},
            {"lambda_rho", t.lambda_rho},
            {"xi_rho", t.xi_rho},
            {"start_time", t.start_time},
            {"extinction_time", t.extinction_time},
            {"extinction_point", to_json(t.extinction_point)},
            {"steps", t.steps},
            {"barrier_active", t.barrier_active},
            {"barrier_radius", t.barrier_radius},
            {"barrier_start", t.barrier_start}};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace fbcsf::io
