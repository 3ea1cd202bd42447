// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Criteria 5-8 and 10 share flow runs, computed once up front.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "fbcsf/asymptotics.hpp"
#include "fbcsf/barrier.hpp"
#include "fbcsf/flow.hpp"
#include "fbcsf/geometry.hpp"
#include "fbcsf/oval.hpp"

using namespace fbcsf;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    if (!detail.empty()) detail += "; ";
    detail += ok ? "" : "FAILED ";
    detail += buf;
    pass = pass && ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const NormalizedDomain& disk() {
    static const NormalizedDomain nd = normalize(ConvexDomain::disk());
    return nd;
}

const NormalizedDomain& egg() {
    static const NormalizedDomain nd = normalize(ConvexDomain::from_fourier({1.0, 0.0, 0.2, 0.0}, {0.0, 0.0, 0.0, 0.1}));
    return nd;
}

const NormalizedDomain& ellipse() {
    static const NormalizedDomain nd = normalize(ConvexDomain::ellipse(2.0, 1.0));
    return nd;
}

/// Flow runs keyed by (domain name, rho, n), computed on first use.
const Trajectory& run(const std::string& name, double rho, int n) {
    static std::map<std::tuple<std::string, double, int>, Trajectory> cache;
    const auto key = std::make_tuple(name, rho, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SolverConfig cfg;
    cfg.n_nodes = n;
    const auto t0 = std::chrono::steady_clock::now();
    Trajectory t = old_but_not_ancient(name == "disk" ? disk() : egg(), rho, cfg);
    std::printf("  [run] %s rho=%.2f n=%d: %lld steps, start %.3f, %.1f s\n", name.c_str(), rho, n,
                static_cast<long long>(t.steps), t.start_time, seconds_since(t0));
    std::fflush(stdout);
    return cache.emplace(key, std::move(t)).first->second;
}

// 1. lambda0 solver exactness.
Outcome criterion1() {
    Outcome o;
    double worst = 0.0;
    for (double k : {0.5, 1.0, 2.0}) {
        const double l = solve_lambda0(k, k);
        worst = std::max(worst, std::abs(l * std::tanh(l) - k));
    }
    o.require(worst < 1e-10, "symmetric |l tanh l - k| = %.2e", worst);
    const double l = solve_lambda0(1.0, 0.5);
    const double res = std::abs(lambda0_residual(l, 1.0, 0.5));
    const double sigma = solve_sigma(1.0);
    o.require(res < 1e-12 && l > 1.0 && l <= sigma, "(1, 0.5): lambda0 = %.12f, residual %.2e, sigma(1) = %.12f", l, res,
              sigma);
    return o;
}

// 2. Consistency of xi0 with both end conditions.
Outcome criterion2() {
    Outcome o;
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double k1 = u(gen), k2 = u(gen);
        const double l = solve_lambda0(k1, k2);
        const double x = xi0(l, k1);
        worst = std::max({worst, std::abs(std::tanh(l * (1.0 - x)) - k1 / l), std::abs(std::tanh(l * (1.0 + x)) - k2 / l)});
    }
    o.require(worst < 1e-10, "20 random pairs, worst tanh mismatch %.2e", worst);
    return o;
}

// 3. Orthogonal oval construction.
Outcome criterion3() {
    Outcome o;
    const std::vector<double> rhos{0.2, 0.1, 0.05};
    for (const auto& [name, nd] : {std::pair<const char*, const NormalizedDomain*>{"disk", &disk()},
                                   {"ellipse", &ellipse()}, {"egg", &egg()}}) {
        const double l0 = solve_lambda0(nd->kappa1, nd->kappa2);
        const double sigma = solve_sigma(std::max(nd->kappa1, nd->kappa2));
        double res = 0.0, prev_gap = 1e300;
        bool low = true, bracket = true, monotone = true;
        std::vector<double> lam;
        for (double rho : rhos) {
            const OrthogonalOval ov = construct_orthogonal_oval(*nd, rho);
            res = std::max({res, ov.residuals[0], ov.residuals[1]});
            low = low && ov.p_right.y < rho && ov.p_left.y < rho;
            bracket = bracket && ov.params.lambda > std::max(nd->kappa1, nd->kappa2) && ov.params.lambda <= sigma * (1 + 1e-14);
            const double gap = std::abs(ov.params.lambda - l0);
            // Gaps at this size sit at rounding level; allow that much wobble.
            monotone = monotone && gap <= prev_gap + 1e-13 * l0;
            prev_gap = gap;
            lam.push_back(ov.params.lambda);
        }
        const double richardson = lam[2] + (lam[2] - lam[1]) / 3.0;
        o.require(res < 1e-8 && low && bracket && monotone && std::abs(richardson - l0) < 1e-3,
                  "%s: residual %.1e, |lambda_rho - lambda0| = %.1e, extrapolated gap %.1e", name, res, prev_gap,
                  std::abs(richardson - l0));
    }
    return o;
}

// 4. Solver validation against exact solutions.
Outcome criterion4() {
    Outcome o;
    const std::vector<int> ns{100, 200, 400};
    std::vector<double> ec, eg;
    for (int n : ns) {
        ec.push_back(shrinking_circle_error(n, 0.2));
        eg.push_back(grim_reaper_error(n, 0.3));
    }
    for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
        const double pc = std::log2(ec[i] / ec[i + 1]), pg = std::log2(eg[i] / eg[i + 1]);
        o.require(std::abs(pc - 2.0) <= 0.3, "circle order %d->%d: %.3f", ns[i], ns[i + 1], pc);
        o.require(std::abs(pg - 2.0) <= 0.3, "grim reaper order %d->%d: %.3f", ns[i], ns[i + 1], pg);
    }
    return o;
}

double area_identity_error(const Trajectory& t) {
    double worst = 0.0;
    for (const auto& m : t.monitors) {
        if (std::isnan(m.dA_dt)) continue;
        const double th = m.theta_plus + m.theta_minus;
        worst = std::max(worst, std::abs(m.dA_dt + th) / th);
    }
    return worst;
}

/// Largest relative mismatch between d theta_plus / dt and kappa kappa_Omega at the right end.
double contact_rate_error(const Trajectory& t, const NormalizedDomain& nd) {
    double worst = 0.0;
    const auto& m = t.monitors;
    for (std::size_t i = 1; i < m.size(); ++i) {
        if (m[i].t > -0.1) break;
        const double dt = m[i].t - m[i - 1].t;
        if (dt < 1e-3) continue;
        const double lhs = (m[i].theta_plus - m[i - 1].theta_plus) / dt;
        auto rate = [&](const MonitorSample& s) { return s.kappa_plus * nd.domain.kappa(kPi / 2 + s.theta_plus); };
        const double rhs = 0.5 * (rate(m[i]) + rate(m[i - 1]));
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return worst;
}

// 5. Structural flow identities on the disk.
Outcome criterion5() {
    Outcome o;
    const std::vector<int> ns{100, 200, 400};
    std::vector<double> ea, er;
    for (int n : ns) {
        ea.push_back(area_identity_error(run("disk", 0.1, n)));
        er.push_back(contact_rate_error(run("disk", 0.1, n), disk()));
    }
    o.require(ea.back() < 0.02 && ea[1] <= 0.55 * ea[0] && ea[2] <= 0.55 * ea[1],
              "area identity %.2e / %.2e / %.2e at n = 100 / 200 / 400", ea[0], ea[1], ea[2]);
    const double h = 2.0 / 399.0;
    o.require(er[2] < er[1] && er[1] < er[0] && er[2] < 10.0 * h,
              "contact angle rate mismatch %.2e / %.2e / %.2e (spacing %.1e)", er[0], er[1], er[2], h);
    const Trajectory& t = run("disk", 0.1, 400);
    double t0 = kNaN, a0 = kNaN;
    for (std::size_t i = 1; i < t.monitors.size(); ++i) {
        const auto& a = t.monitors[i - 1];
        const auto& b = t.monitors[i];
        const double fa = a.theta_plus + a.theta_minus - kPi / 2, fb = b.theta_plus + b.theta_minus - kPi / 2;
        if (fa < 0.0 && fb >= 0.0) {
            const double w = fa / (fa - fb);
            t0 = a.t + w * (b.t - a.t);
            a0 = a.area + w * (b.area - a.area);
            break;
        }
    }
    const double bound = 2.0 * disk().domain.area() / kPi;
    o.require(std::isfinite(t0) && -t0 <= 1.05 * bound && -t0 <= 2.0 * a0 / kPi * 1.05,
              "t0 = %.4f, bound %.4f (with A(t0): %.4f)", t0, bound, 2.0 * a0 / kPi);
    return o;
}

// 6. Barrier suite.
Outcome criterion6() {
    Outcome o;
    std::vector<double> ts, us;
    for (int i = 1; i <= 60; ++i) ts.push_back(-0.0625 * 4.0 * i / 60.0);
    for (int j = -20; j <= 20; ++j) us.push_back(j / 20.0);
    const double res = supersolution_residual(0.25, ts, us);
    double exact = 1e300;
    for (int i = 1; i < 100; ++i) {
        const double w = 0.5 * kPi * i / 100;
        for (double u : us) exact = std::min(exact, supersolution_residual_exact(w, u * w));
    }
    o.require(res >= -1e-6 && exact >= 0.0, "residual min %.2e (finite differences), %.2e (closed form)", res, exact);
    const std::vector<std::tuple<std::string, double, int>> runs{{"disk", 0.1, 200}, {"disk", 0.05, 200}, {"disk", 0.2, 200},
                                                                 {"egg", 0.1, 200}};
    for (const auto& [name, rho, n] : runs) {
        const Trajectory& t = run(name, rho, n);
        int samples = 0;
        double margin = 1e300;
        for (const auto& m : t.monitors) {
            if (std::isnan(m.barrier_margin)) continue;
            ++samples;
            margin = std::min(margin, m.barrier_margin);
        }
        o.require(t.barrier_active && samples > 0 && margin > 0.0, "%s rho=%.2f: %d samples below, min margin %.3e",
                  name.c_str(), rho, samples, margin);
    }
    return o;
}

// 7. Exponential estimates.
Outcome criterion7() {
    Outcome o;
    for (const auto* name : {"disk", "egg"}) {
        const NormalizedDomain& nd = std::string(name) == "disk" ? disk() : egg();
        const double l0 = solve_lambda0(nd.kappa1, nd.kappa2);
        const double r = admissible_radius(nd).r;
        const EstimateReport rep = verify_estimates(run(name, 0.1, 200), r, l0);
        for (const char* q : {"gradient", "kappa_min", "kappa_max"}) {
            const auto* rec = rep.find(q);
            bool ok = rec->pass && rec->rate >= 0.95 * r;
            if (std::string(name) == "disk") ok = ok && std::abs(rec->rate - l0 * l0) <= 0.1 * l0 * l0;
            o.require(ok, "%s %s rate %.5f (r %.4f, lambda0^2 %.5f)", name, q, rec->rate, r, l0 * l0);
        }
    }
    return o;
}

// 8. Height asymptotics.
Outcome criterion8() {
    Outcome o;
    for (const auto* name : {"disk", "egg"}) {
        const NormalizedDomain& nd = std::string(name) == "disk" ? disk() : egg();
        const double l0 = solve_lambda0(nd.kappa1, nd.kappa2);
        const Trajectory& t = run(name, 0.1, 200);
        const double rate = verify_estimates(t, admissible_radius(nd).r, l0).find("kappa_min")->rate;
        const CauchyReport c = rescaled_height_cauchy(t, rate);
        o.require(c.decreasing, "%s rescaled-height increments %.1e (oldest) .. %.1e (newest)", name, c.increments.front(),
                  c.increments.back());
        const Profile p = fit_profile(t, l0, nd.kappa1, nd.kappa2);
        if (std::string(name) == "disk") {
            o.require(std::abs(p.c) < 0.02, "disk c = %.2e, A = %.5f", p.c, p.A);
        } else {
            const double rel = std::abs(p.c - p.c_closed_form) / std::abs(p.c_closed_form);
            o.require(rel < 0.02, "egg c = %.5f vs closed form %.5f (%.2e relative)", p.c, p.c_closed_form, rel);
        }
    }
    return o;
}

// 9. Robin eigenproblem.
Outcome criterion9() {
    Outcome o;
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    double value_err = 0.0, ode = 0.0, bc = 0.0;
    bool one = true;
    for (int i = 0; i < 20; ++i) {
        const double k1 = u(gen), k2 = u(gen);
        const EigenResult e = robin_eigen(k1, k2, 5);
        one = one && e.convex_negative_count() == 1;
        const double l0 = solve_lambda0(k1, k2);
        for (const auto& p : e.negative) {
            if (p.convex) value_err = std::max(value_err, std::abs(p.mu + l0 * l0));
        }
        for (const auto* list : {&e.negative, &e.positive}) {
            for (const auto& p : *list) {
                ode = std::max(ode, p.ode_residual);
                bc = std::max(bc, p.bc_residual);
            }
        }
    }
    o.require(one, "one convex negative mode for all 20 pairs");
    o.require(value_err < 1e-10, "|mu + lambda0^2| <= %.2e", value_err);
    o.require(ode < 1e-10 && bc < 1e-10, "ODE residual %.1e, boundary residual %.1e", ode, bc);
    return o;
}

// 10. Uniqueness evidence.
Outcome criterion10() {
    Outcome o;
    const Trajectory& a = run("disk", 0.2, 200);
    const Trajectory& b = run("disk", 0.1, 200);
    const Trajectory& c = run("disk", 0.05, 200);
    const UniquenessReport coarse = uniqueness_evidence(a, b);
    const UniquenessReport fine = uniqueness_evidence(b, c);
    o.require(fine.distance < 1e-2, "rho 0.1 vs 0.05: tau* = %.2e, distance %.3e", fine.tau_star, fine.distance);
    // Both pairs sit at the spatial discretization floor, measured from the same rho on two grids.
    const double floor = matched_distance(run("disk", 0.1, 100), b, -4.0, -0.25, 40);
    o.require(fine.distance <= coarse.distance + floor,
              "pair distances %.3e (0.2 vs 0.1), %.3e (0.1 vs 0.05); grid floor %.3e", coarse.distance, fine.distance,
              floor);
    const double mirror = matched_distance(b, reflect_trajectory(b), -4.0, -0.25, 40);
    o.require(mirror > 100.0 * fine.distance, "reflected solution stays %.3f away", mirror);
    return o;
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"lambda0 solver exactness", criterion1},
        {"xi0 end conditions", criterion2},
        {"orthogonal oval construction", criterion3},
        {"solver validation orders", criterion4},
        {"structural flow identities", criterion5},
        {"barrier suite", criterion6},
        {"exponential estimates", criterion7},
        {"height asymptotics", criterion8},
        {"Robin eigen suite", criterion9},
        {"uniqueness evidence", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        failures += out.pass ? 0 : 1;
        std::printf("criterion %zu: %s  %s (%.2f s) -- %s\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first,
                    seconds_since(t0), out.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
