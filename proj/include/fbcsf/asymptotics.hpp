#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbcsf/error.hpp"
#include "fbcsf/flow.hpp"
#include "fbcsf/numeric.hpp"
#include "fbcsf/oval.hpp"

namespace fbcsf {

/// Offset-time interval used for fits. The most negative recorded times carry
/// the asymptotic information; the first unit after the start is skipped.
struct FitWindow {
    double begin = 0.0;
    double end = 0.0;
};

inline FitWindow default_window(const Trajectory& traj, double skip = 1.0, double span = 5.0) {
    if (traj.monitors.empty()) throw Error(ErrorKind::WindowTooShort, "trajectory has no monitor samples");
    const double t_min = traj.monitors.front().t;
    return {t_min + skip, std::min(t_min + skip + span, -1.0)};
}

struct EstimateRecord {
    std::string name;
    /// Fitted exponential rate (or the fitted nuisance constant for ratio bounds).
    double rate = kNaN;
    /// Rate the estimate requires; NaN for plain boundedness checks.
    double required_rate = kNaN;
    /// Constant C in quantity <= C e^{rate t} over the window, or the observed bound.
    double constant = kNaN;
    /// Largest deviation of log(quantity) from the fitted line.
    double fit_residual = kNaN;
    bool pass = false;
    FitWindow window;
    int samples = 0;
};

struct EstimateReport {
    std::vector<EstimateRecord> records;
    bool all_pass() const {
        return std::all_of(records.begin(), records.end(), [](const EstimateRecord& r) { return r.pass; });
    }
    const EstimateRecord* find(const std::string& name) const {
        for (const auto& r : records) {
            if (r.name == name) return &r;
        }
        return nullptr;
    }
};

namespace detail {

template <class F>
EstimateRecord fit_rate(const Trajectory& traj, const FitWindow& win, const std::string& name, double required, F&& quantity) {
    std::vector<double> ts, ls;
    for (const auto& m : traj.monitors) {
        if (m.t < win.begin || m.t > win.end) continue;
        const double q = quantity(m);
        if (!(q > 0.0) || !std::isfinite(q)) continue;
        ts.push_back(m.t);
        ls.push_back(std::log(q));
    }
    if (ts.size() < 8) throw Error(ErrorKind::WindowTooShort, name + ": fewer than 8 usable samples in the window");
    const LineFit fit = fit_line(ts, ls);
    EstimateRecord rec;
    rec.name = name;
    rec.rate = fit.slope;
    rec.required_rate = required;
    rec.fit_residual = fit.max_abs_residual;
    rec.constant = std::exp(fit.intercept + fit.max_abs_residual);
    rec.window = win;
    rec.samples = static_cast<int>(ts.size());
    rec.pass = std::isfinite(fit.slope) && fit.slope >= 0.95 * required;
    return rec;
}

template <class F>
EstimateRecord bounded(const Trajectory& traj, const FitWindow& win, const std::string& name, F&& quantity) {
    EstimateRecord rec;
    rec.name = name;
    rec.window = win;
    double first = kNaN, worst = 0.0, last = kNaN;
    for (const auto& m : traj.monitors) {
        if (m.t < win.begin || m.t > win.end) continue;
        const double q = quantity(m);
        if (!std::isfinite(q)) continue;
        if (std::isnan(first)) first = q;
        last = q;
        worst = std::max(worst, q);
        ++rec.samples;
    }
    if (rec.samples < 8) throw Error(ErrorKind::WindowTooShort, name + ": fewer than 8 usable samples in the window");
    rec.constant = worst;
    // Finite, and not growing across the window beyond a few percent.
    rec.rate = last - first;
    rec.pass = std::isfinite(worst) && last <= first * 1.05 + 1e-12;
    return rec;
}

}  // namespace detail

/// Checks the exponential decay and boundedness estimates on a trajectory.
/// Ratio bounds use the smallest constant from a fixed grid that makes them hold.
inline EstimateReport verify_estimates(const Trajectory& traj, double r, double lambda0,
                                       std::optional<FitWindow> window = std::nullopt, double ratio_slack = 2e-2) {
    const FitWindow win = window ? *window : default_window(traj);
    EstimateReport rep;
    rep.records.push_back(detail::fit_rate(traj, win, "gradient", r, [](const MonitorSample& m) {
        return std::sin(0.5 * (m.theta_plus + m.theta_minus));
    }));
    rep.records.push_back(detail::bounded(traj, win, "support_function", [](const MonitorSample& m) { return m.support_ratio; }));
    rep.records.push_back(detail::fit_rate(traj, win, "kappa_min", r, [](const MonitorSample& m) { return m.kappa_min; }));
    rep.records.push_back(detail::fit_rate(traj, win, "kappa_max", r, [](const MonitorSample& m) { return m.kappa_max; }));
    rep.records.push_back(detail::bounded(traj, win, "kappa_s_ratio", [](const MonitorSample& m) { return m.kappa_s_ratio; }));
    rep.records.push_back(detail::bounded(traj, win, "kappa_ratio", [](const MonitorSample& m) {
        return m.kappa_min > 0.0 ? m.kappa_max / m.kappa_min : kNaN;
    }));

    // y <= C2 kappa gives the scale for the nuisance constants n and m.
    double c2 = 0.0;
    for (const auto& m : traj.monitors) {
        if (m.t >= win.begin && m.t <= win.end && m.kappa_over_y_min > 0.0) c2 = std::max(c2, 1.0 / m.kappa_over_y_min);
    }
    const double lam2 = lambda0 * lambda0;
    // Discretization allowance on kappa / y, which is O(h) off near the ends.
    const double slack = ratio_slack * lam2;
    auto ratio_record = [&](const std::string& name, double rate, bool lower) {
        EstimateRecord rec;
        rec.name = name;
        rec.required_rate = rate;
        rec.window = win;
        for (double f : {1.0, 2.0, 5.0, 10.0, 20.0}) {
            const double n = f * std::max(c2, 1e-12) / r;
            bool ok = true;
            int count = 0;
            for (const auto& m : traj.monitors) {
                if (m.t < win.begin || m.t > win.end || !(m.kappa_over_y_min > 0.0)) continue;
                ++count;
                const double ymax = *std::max_element(m.heights.begin(), m.heights.end(),
                                                      [](double a, double b) { return !(a >= b); });
                const double y = std::isfinite(ymax) ? ymax : 0.0;
                if (lower) {
                    ok = ok && m.kappa_over_y_min * std::exp(n * y) >= lam2 - n * std::exp(rate * m.t) - slack;
                } else {
                    ok = ok && m.kappa_over_y_max * std::exp(-n * y) <= lam2 + n * std::exp(rate * m.t) + slack;
                }
            }
            rec.samples = count;
            if (ok) {
                rec.pass = true;
                rec.rate = n;
                rec.constant = n;
                break;
            }
        }
        if (rec.samples < 8) throw Error(ErrorKind::WindowTooShort, name + ": fewer than 8 usable samples in the window");
        return rec;
    };
    rep.records.push_back(ratio_record("lower_height_ratio", r, true));
    rep.records.push_back(ratio_record("upper_height_ratio", 2.0 * r, false));
    return rep;
}

struct Profile {
    double A = 0.0;
    double lambda0 = 0.0;
    double c = 0.0;
    double c_closed_form = 0.0;
    /// Sup-norm misfit of the rescaled heights against A (cosh + c sinh), relative to A.
    double fit_residual = 0.0;
    FitWindow window;
    int samples = 0;
};

/// Per-sample least squares of e^{-lambda0^2 t} y(x_k, t) on {cosh, sinh}(lambda0 x),
/// then both coefficients extrapolated to t -> -infinity linearly in e^{lambda0^2 t}.
inline Profile fit_profile(const Trajectory& traj, double lambda0, double kappa1, double kappa2,
                           std::optional<FitWindow> window = std::nullopt) {
    const FitWindow win = window ? *window : default_window(traj);
    const auto& xs = traj.abscissas;
    if (xs.size() < 5) throw Error(ErrorKind::WindowTooShort, "profile fit needs at least five abscissas");
    const double lam2 = lambda0 * lambda0;
    std::vector<double> es, as, cs;
    struct Row {
        double t;
        std::vector<double> z;
    };
    std::vector<Row> rows;
    for (const auto& m : traj.monitors) {
        if (m.t < win.begin || m.t > win.end) continue;
        if (!std::all_of(m.heights.begin(), m.heights.end(), [](double y) { return std::isfinite(y); })) continue;
        double scc = 0, scs = 0, sss = 0, szc = 0, szs = 0;
        Row row{m.t, {}};
        const double scale = std::exp(-lam2 * m.t);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double ch = std::cosh(lambda0 * xs[k]), sh = std::sinh(lambda0 * xs[k]);
            const double z = m.heights[k] * scale;
            row.z.push_back(z);
            scc += ch * ch;
            scs += ch * sh;
            sss += sh * sh;
            szc += z * ch;
            szs += z * sh;
        }
        const double det = scc * sss - scs * scs;
        const double a = (szc * sss - szs * scs) / det;
        const double b = (scc * szs - scs * szc) / det;
        es.push_back(std::exp(lam2 * m.t));
        as.push_back(a);
        cs.push_back(b / a);
        rows.push_back(std::move(row));
    }
    if (rows.size() < 8) throw Error(ErrorKind::WindowTooShort, "fewer than 8 profile samples in the window");
    Profile p;
    p.lambda0 = lambda0;
    p.window = win;
    p.samples = static_cast<int>(rows.size());
    p.A = fit_line(es, as).intercept;
    p.c = fit_line(es, cs).intercept;
    p.c_closed_form = profile_coefficient(lambda0, kappa1, kappa2);
    if (!(p.A > 0.0)) throw Error(ErrorKind::NonPositiveAmplitude, "fitted amplitude is not positive");
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double model = p.A * (std::cosh(lambda0 * xs[k]) + p.c * std::sinh(lambda0 * xs[k]));
            p.fit_residual = std::max(p.fit_residual, std::abs(row.z[k] - model) / p.A);
        }
    }
    return p;
}

struct CauchyReport {
    std::vector<double> times;
    /// Largest change of the rescaled heights between consecutive times.
    std::vector<double> increments;
    /// Increments relative to the rescaled heights.
    double floor = 0.0;
    bool decreasing = false;
};

/// Rescaled heights e^{-rate t} y(x_k, t) on a uniform time grid over the
/// window; increments must shrink (up to a relative floor) as t decreases.
/// Pass the fitted discrete rate: with lambda0^2 itself the O(h^2) rate error
/// leaves a constant drift in the increments.
inline CauchyReport rescaled_height_cauchy(const Trajectory& traj, double rate,
                                           std::optional<FitWindow> window = std::nullopt, int points = 12,
                                           double floor = 1e-5) {
    // Skip the relaxation of the initial oval; stop before the nonlinear regime.
    const FitWindow win = window ? *window : FitWindow{default_window(traj).begin + 2.0, -1.0};
    if (!(win.end - win.begin > 1.0)) throw Error(ErrorKind::WindowTooShort, "Cauchy window is shorter than one time unit");
    const double lam2 = rate;
    auto rescaled_at = [&](double t) {
        auto it = std::lower_bound(traj.monitors.begin(), traj.monitors.end(), t,
                                   [](const MonitorSample& m, double v) { return m.t < v; });
        if (it == traj.monitors.end() || it == traj.monitors.begin()) throw Error(ErrorKind::WindowTooShort, "time outside monitors");
        const MonitorSample& b = *it;
        const MonitorSample& a = *(it - 1);
        const double w = (t - a.t) / (b.t - a.t);
        std::vector<double> z;
        for (std::size_t k = 0; k < a.heights.size(); ++k) {
            const double la = std::log(a.heights[k]) - lam2 * a.t, lb = std::log(b.heights[k]) - lam2 * b.t;
            z.push_back(std::exp((1.0 - w) * la + w * lb));
        }
        return z;
    };
    CauchyReport rep;
    rep.floor = floor;
    std::vector<std::vector<double>> zs;
    for (int j = 0; j < points; ++j) {
        const double t = win.begin + (win.end - win.begin) * j / (points - 1);
        rep.times.push_back(t);
        zs.push_back(rescaled_at(t));
    }
    for (int j = 0; j + 1 < points; ++j) {
        double inc = 0.0;
        for (std::size_t k = 0; k < zs[j].size(); ++k) {
            inc = std::max(inc, std::abs(zs[j + 1][k] - zs[j][k]) / std::abs(zs[j + 1][k]));
        }
        rep.increments.push_back(inc);
    }
    rep.decreasing = true;
    for (std::size_t j = 0; j + 1 < rep.increments.size(); ++j) {
        if (rep.increments[j] > rep.increments[j + 1] + floor) rep.decreasing = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Robin eigenproblem -phi'' = mu phi on [-1, 1], phi'(1) = kappa1 phi(1), phi'(-1) = -kappa2 phi(-1).

struct EigenPair {
    double mu = 0.0;
    /// s with mu = -s^2 (negative part) or k with mu = k^2 (positive part).
    double frequency = 0.0;
    /// phi = a cosh(s x) + b sinh(s x), or a cos(k x) + b sin(k x); sup norm 1.
    double a = 0.0;
    double b = 0.0;
    double phase = 0.0;
    bool convex = false;
    double ode_residual = 0.0;
    double bc_residual = 0.0;

    double value(double x) const {
        return mu < 0.0 ? a * std::cosh(frequency * x) + b * std::sinh(frequency * x)
                        : a * std::cos(frequency * x) + b * std::sin(frequency * x);
    }
    double derivative(double x) const {
        const double f = frequency;
        return mu < 0.0 ? f * (a * std::sinh(f * x) + b * std::cosh(f * x)) : f * (-a * std::sin(f * x) + b * std::cos(f * x));
    }
    double second_derivative(double x) const { return -mu * value(x); }
};

struct EigenResult {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    std::vector<EigenPair> negative;
    std::vector<EigenPair> positive;

    int convex_negative_count() const {
        return static_cast<int>(std::count_if(negative.begin(), negative.end(), [](const EigenPair& p) { return p.convex; }));
    }
};

/// Secular function for mu = -s^2 (the same one that defines lambda0).
inline double robin_secular_negative(double s, double k1, double k2) { return lambda0_residual(s, k1, k2); }

/// Secular function for mu = k^2.
inline double robin_secular_positive(double k, double k1, double k2) {
    return (k1 * k2 - k * k) * std::sin(2.0 * k) - k * (k1 + k2) * std::cos(2.0 * k);
}

namespace detail {

inline void finish_pair(EigenPair& p, double k1, double k2) {
    // Sup norm over a fine grid and the interior critical point.
    double sup = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j <= 1000; ++j) {
        const double v = p.value(-1.0 + 2.0 * j / 1000.0);
        sup = std::max(sup, std::abs(v));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (std::abs(lo) > std::abs(hi)) {
        p.a = -p.a;
        p.b = -p.b;
        std::swap(lo, hi);
        lo = -lo;
        hi = -hi;
    }
    p.a /= sup;
    p.b /= sup;
    p.phase = std::atan2(p.b, p.a);
    p.convex = p.mu < 0.0 && lo / sup >= -1e-12;
    p.ode_residual = 0.0;
    for (int j = 0; j <= 1000; ++j) {
        const double x = -1.0 + 2.0 * j / 1000.0;
        const double f = p.frequency;
        const double second = p.mu < 0.0 ? f * f * p.value(x) : -f * f * p.value(x);
        p.ode_residual = std::max(p.ode_residual, std::abs(second + p.mu * p.value(x)));
    }
    p.bc_residual = std::max(std::abs(p.derivative(1.0) - k1 * p.value(1.0)), std::abs(p.derivative(-1.0) + k2 * p.value(-1.0)));
}

template <class F>
std::vector<double> scan_roots(F&& f, double lo, double hi, int grid, std::size_t max_roots) {
    std::vector<double> roots;
    double x0 = lo, f0 = f(lo);
    for (int j = 1; j <= grid && roots.size() < max_roots; ++j) {
        const double x1 = lo + (hi - lo) * j / grid;
        const double f1 = f(x1);
        if (f0 == 0.0) {
            roots.push_back(x0);
        } else if ((f0 > 0.0) != (f1 > 0.0)) {
            roots.push_back(bisect(f, x0, x1, 1e-15));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

}  // namespace detail

inline EigenResult robin_eigen(double kappa1, double kappa2, int k = 5) {
    if (!(kappa1 > 0.0 && kappa2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "boundary curvatures must be positive");
    EigenResult res;
    res.kappa1 = kappa1;
    res.kappa2 = kappa2;
    const double kmax = std::max(kappa1, kappa2);
    // Beyond max(kappa) + 2 the secular function is positive: (s - k1)(s - k2) dominates.
    // The scan starts at 1e-4 so the zero mode of k1 k2 = (k1 + k2) / 2 is not reported.
    auto gneg = [&](double s) { return robin_secular_negative(s, kappa1, kappa2); };
    for (double s : detail::scan_roots(gneg, 1e-4, kmax + 2.0, 20000, 8)) {
        EigenPair p;
        p.frequency = s;
        p.mu = -s * s;
        const double sh = std::sinh(s), ch = std::cosh(s);
        // Null vector of the condition at x = 1.
        p.a = s * ch - kappa1 * sh;
        p.b = -(s * sh - kappa1 * ch);
        detail::finish_pair(p, kappa1, kappa2);
        res.negative.push_back(p);
    }
    auto gpos = [&](double q) { return robin_secular_positive(q, kappa1, kappa2); };
    const double span = (k + 2) * kPi / 2.0 + kmax;
    for (double q : detail::scan_roots(gpos, 1e-4, span, 400 * (k + 2), static_cast<std::size_t>(k))) {
        EigenPair p;
        p.frequency = q;
        p.mu = q * q;
        const double sn = std::sin(q), cs = std::cos(q);
        p.a = q * cs - kappa1 * sn;
        p.b = q * sn + kappa1 * cs;
        detail::finish_pair(p, kappa1, kappa2);
        res.positive.push_back(p);
    }
    return res;
}

// ---------------------------------------------------------------------------

struct UniquenessReport {
    double tau_star = 0.0;
    double distance = 0.0;
    FitWindow window;
};

/// Time shift of the second trajectory minimizing the matched-time distance on the window.
inline UniquenessReport uniqueness_evidence(const Trajectory& a, const Trajectory& b, double window_begin = -4.0,
                                            double window_end = -0.25, double max_shift = 0.2, int samples = 40) {
    for (const Trajectory* t : {&a, &b}) {
        if (t->states.empty() || t->states.front().time > window_begin - max_shift ||
            t->states.back().time < window_end + max_shift) {
            throw Error(ErrorKind::WindowTooShort, "recorded states do not cover the comparison window");
        }
    }
    auto dist = [&](double tau) { return matched_distance(a, b, window_begin, window_end, samples, tau); };
    // Coarse scan, then golden-section refinement around the best shift.
    const int coarse = 16;
    double best_tau = 0.0, best = dist(0.0);
    for (int j = 0; j <= coarse; ++j) {
        const double tau = -max_shift + 2.0 * max_shift * j / coarse;
        const double d = dist(tau);
        if (d < best) {
            best = d;
            best_tau = tau;
        }
    }
    double lo = best_tau - 2.0 * max_shift / coarse, hi = best_tau + 2.0 * max_shift / coarse;
    lo = std::max(lo, -max_shift);
    hi = std::min(hi, max_shift);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = dist(x1), f2 = dist(x2);
    for (int it = 0; it < 40 && hi - lo > 1e-9; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = dist(x2);
        }
    }
    for (auto [tau, d] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
        if (d < best) {
            best = d;
            best_tau = tau;
        }
    }
    return {best_tau, best, {window_begin, window_end}};
}

/// Mirror image y -> -y of every stored curve (the solution on the other side of the diameter).
inline Trajectory reflect_trajectory(Trajectory traj) {
    for (auto& s : traj.states) {
        for (auto& p : s.nodes) p.y = -p.y;
    }
    for (auto& m : traj.monitors) {
        for (auto& h : m.heights) h = -h;
    }
    return traj;
}

}  // namespace fbcsf
