// Command-line driver: one JSON config per invocation, data-only outputs.
//
// Exit codes: 0 ok, 2 config, 3 geometry/construction, 4 solver, 5 analysis.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "fbcsf/asymptotics.hpp"
#include "fbcsf/barrier.hpp"
#include "fbcsf/flow.hpp"
#include "fbcsf/geometry.hpp"
#include "fbcsf/io.hpp"
#include "fbcsf/log.hpp"
#include "fbcsf/oval.hpp"

namespace {

using namespace fbcsf;
using io::ConfigError;
using io::json;

enum Exit { kOk = 0, kConfig = 2, kGeometry = 3, kSolver = 4, kAnalysis = 5 };

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return kConfig;
    case ErrorKind::TangentialContact:
    case ErrorKind::StepRejected:
    case ErrorKind::NonExtinction: return kSolver;
    case ErrorKind::WindowTooShort:
    case ErrorKind::NonPositiveAmplitude: return kAnalysis;
    default: return kGeometry;
    }
}

struct Options {
    std::string config;
    std::string out = ".";
    int parallel = 1;
    long seed = 0;
};

std::string out_path(const Options& o, const char* name) { return (std::filesystem::path(o.out) / name).string(); }

NormalizedDomain load_normalized(const json& cfg) { return normalize(io::domain_from_json(io::domain_section(cfg))); }

int cmd_diameters(const Options& o, const json& cfg) {
    const ConvexDomain d = io::domain_from_json(io::domain_section(cfg));
    const DiameterSearch found = find_diameters(d);
    io::write_json(out_path(o, "diameters.json"), io::diameters_json(d, found));
    std::printf("%zu diameter(s)%s\n", found.diameters.size(), found.degenerate ? " (degenerate continuum)" : "");
    return kOk;
}

int cmd_oval(const Options& o, const json& cfg) {
    const NormalizedDomain nd = load_normalized(cfg);
    const double rho = io::positive(cfg, "rho", 0.1);
    const OrthogonalOval ov = construct_orthogonal_oval(nd, rho);
    const double l0 = solve_lambda0(nd.kappa1, nd.kappa2);
    json j{{"rho", rho},
           {"lambda", ov.params.lambda},
           {"xi", ov.params.xi},
           {"t", ov.params.t},
           {"lambda0", l0},
           {"residuals", {ov.residuals[0], ov.residuals[1]}},
           {"p_right", io::to_json(ov.p_right)},
           {"p_left", io::to_json(ov.p_left)},
           {"theta_right", ov.theta_right},
           {"theta_left", ov.theta_left}};
    const int n = io::get_or<int>(cfg, "samples", 0);
    if (n > 0) {
        json pts = json::array();
        for (Vec2 p : sample_initial_curve(ov, n)) pts.push_back(io::to_json(p));
        j["curve"] = pts;
    }
    io::write_json(out_path(o, "oval.json"), j);
    std::printf("lambda_rho %.12g lambda0 %.12g xi %.12g\n", ov.params.lambda, l0, ov.params.xi);
    return kOk;
}

std::pair<double, double> curvatures(const json& cfg) {
    if (cfg.contains("kappa1") || cfg.contains("kappa2")) {
        return {io::positive(cfg, "kappa1", 1.0), io::positive(cfg, "kappa2", 1.0)};
    }
    const NormalizedDomain nd = load_normalized(cfg);
    return {nd.kappa1, nd.kappa2};
}

int cmd_lambda0(const Options& o, const json& cfg) {
    const auto [k1, k2] = curvatures(cfg);
    const Limits l = limits(k1, k2);
    const json j{{"kappa1", k1}, {"kappa2", k2}, {"lambda0", l.lambda0}, {"xi0", l.xi0}, {"sigma", l.sigma},
                 {"c", profile_coefficient(l.lambda0, k1, k2)}};
    io::write_json(out_path(o, "lambda0.json"), j);
    std::printf("lambda0 %.15g xi0 %.15g sigma %.15g\n", l.lambda0, l.xi0, l.sigma);
    return kOk;
}

int cmd_eigen(const Options& o, const json& cfg) {
    const auto [k1, k2] = curvatures(cfg);
    const int count = io::get_or<int>(cfg, "count", 5);
    if (count < 1) throw ConfigError("\"count\" must be at least 1");
    const EigenResult e = robin_eigen(k1, k2, count);
    io::write_json(out_path(o, "eigen.json"), io::to_json(e));
    std::printf("%zu negative, %d convex; lambda0^2 %.15g\n", e.negative.size(), e.convex_negative_count(),
                std::pow(solve_lambda0(k1, k2), 2));
    return kOk;
}

int cmd_flow(const Options& o, const json& cfg) {
    const NormalizedDomain nd = load_normalized(cfg);
    const double rho = io::positive(cfg, "rho", 0.1);
    const SolverConfig sc = io::solver_from_json(cfg);
    const double l0 = solve_lambda0(nd.kappa1, nd.kappa2);
    const Trajectory traj = old_but_not_ancient(nd, rho, sc);
    {
        std::ostringstream csv;
        io::write_trajectory_csv(csv, traj);
        io::write_text(out_path(o, "trajectory.csv"), csv.str());
    }
    json report;
    report["lambda0"] = l0;
    report["run"] = io::run_summary(traj);
    report["eigen"] = io::to_json(robin_eigen(nd.kappa1, nd.kappa2, 3));
    report["uniqueness"] = nullptr;
    // Analysis failures still leave the trajectory on disk.
    int code = kOk;
    double rate = kNaN, c = kNaN;
    try {
        const EstimateReport est = verify_estimates(traj, admissible_radius(nd).r, l0);
        const Profile prof = fit_profile(traj, l0, nd.kappa1, nd.kappa2);
        report["estimates"] = io::to_json(est);
        report["profile"] = io::to_json(prof);
        rate = est.find("kappa_min")->rate;
        c = prof.c;
    } catch (const Error& e) {
        log::error("%s", e.what());
        report["analysis_error"] = e.what();
        code = exit_code(e.kind());
    }
    io::write_json(out_path(o, "report.json"), report);
    std::printf("lambda0 %.6f fitted_rate %.6f profile_c %.6f\n", l0, rate, c);
    return code;
}

int cmd_sweep(const Options& o, const json& cfg) {
    const NormalizedDomain nd = load_normalized(cfg);
    const auto rhos = io::require<std::vector<double>>(cfg, "rhos");
    if (rhos.size() < 3) throw ConfigError("a sweep needs at least three rho values");
    for (std::size_t i = 1; i < rhos.size(); ++i) {
        if (!(rhos[i] < rhos[i - 1])) throw ConfigError("rho values must be strictly decreasing");
    }
    const SolverConfig sc = io::solver_from_json(cfg);
    SweepReport rep;
    try {
        rep = ancient_sweep(nd, rhos, sc, o.parallel);
    } catch (const Error& e) {
        log::error("%s", e.what());
        return e.kind() == ErrorKind::WindowTooShort ? kAnalysis : kSolver;
    }
    json table = json::array();
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        json row = io::run_summary(rep.runs[i]);
        row["pair_distance"] = i == 0 ? json(nullptr) : json(rep.pair_distances[i - 1]);
        row["max_heights"] = rep.max_heights[i];
        table.push_back(row);
    }
    const std::size_t last = rep.runs.size() - 1;
    const UniquenessReport u = uniqueness_evidence(rep.runs[last - 1], rep.runs[last], rep.window_begin, rep.window_end);
    bool monotone = true;
    for (std::size_t i = 1; i < rep.pair_distances.size(); ++i) monotone = monotone && rep.pair_distances[i] < rep.pair_distances[i - 1];
    const json j{{"window", {rep.window_begin, rep.window_end}},
                 {"probe_times", rep.probe_times},
                 {"runs", table},
                 {"pair_distances", rep.pair_distances},
                 {"monotone", monotone},
                 {"uniqueness", io::to_json(u)}};
    io::write_json(out_path(o, "sweep.json"), j);
    std::printf("pair distances:");
    for (double d : rep.pair_distances) std::printf(" %.3e", d);
    std::printf("; tau* %.3e distance %.3e\n", u.tau_star, u.distance);
    return kOk;
}

/// Exact-solution checks of the scheme and the barrier family.
int cmd_verify(const Options& o, const json& cfg) {
    const double t_end = io::positive(cfg, "t_end", 0.2);
    json circle = json::array(), reaper = json::array();
    for (int n : io::get_or<std::vector<int>>(cfg, "nodes", {100, 200, 400})) {
        circle.push_back({{"n", n}, {"error", shrinking_circle_error(n, t_end)}});
        reaper.push_back({{"n", n}, {"error", grim_reaper_error(n, t_end)}});
    }
    std::vector<double> ts, us;
    for (int j = 1; j <= 40; ++j) ts.push_back(-0.05 * j / 40.0);
    for (int j = 0; j <= 40; ++j) us.push_back(-1.0 + j / 20.0);
    const double resid = supersolution_residual(0.25, ts, us);
    io::write_json(out_path(o, "verify.json"),
                   {{"shrinking_circle", circle}, {"grim_reaper", reaper}, {"supersolution_residual_min", resid}});
    std::printf("circle %s; grim reaper %s; supersolution residual min %.3e\n", circle.dump().c_str(),
                reaper.dump().c_str(), resid);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-boundary curve shortening experiments"};
    app.require_subcommand(1);
    Options opt;
    using Handler = int (*)(const Options&, const json&);
    std::vector<std::pair<CLI::App*, Handler>> cmds;
    auto add = [&](const char* name, const char* help, Handler h) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON config file")->required();
        sub->add_option("--out", opt.out, "output directory (must exist)");
        sub->add_option("--parallel", opt.parallel, "concurrent runs in a sweep")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "reserved; all computations are deterministic");
        cmds.emplace_back(sub, h);
    };
    add("diameters", "list the diameters of a domain", cmd_diameters);
    add("oval", "construct the orthogonal oval for one rho", cmd_oval);
    add("lambda0", "solve the limiting equations for lambda0, xi0, sigma", cmd_lambda0);
    add("flow", "run one flow to extinction and analyse it", cmd_flow);
    add("sweep", "run a decreasing sequence of rho and compare", cmd_sweep);
    add("eigen", "Robin eigenpairs on [-1, 1]", cmd_eigen);
    add("verify", "exact-solution checks of the scheme", cmd_verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (!std::filesystem::is_directory(opt.out)) throw ConfigError("output directory " + opt.out + " does not exist");
        const json cfg = io::load_json(opt.config);
        for (auto& [sub, handler] : cmds) {
            if (sub->parsed()) return handler(opt, cfg);
        }
    } catch (const ConfigError& e) {
        log::error("%s", e.what());
        return kConfig;
    } catch (const Error& e) {
        log::error("%s", e.what());
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        log::error("config: %s", e.what());
        return kConfig;
    }
    return kConfig;
}
