#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fbcsf/barrier.hpp"
#include "fbcsf/error.hpp"
#include "fbcsf/geometry.hpp"
#include "fbcsf/log.hpp"
#include "fbcsf/numeric.hpp"
#include "fbcsf/oval.hpp"

namespace fbcsf {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SolverConfig {
    int n_nodes = 200;
    double dt_safety = 0.4;
    /// Resample by arc length whenever spacing drifts past redistribution_tolerance.
    bool redistribution = true;
    double redistribution_tolerance = 0.1;
    double convexity_tolerance = 1e-8;
    int max_halvings = 20;
    double extinction_length = 1e-3;
    double max_time = 1e3;
    std::int64_t max_steps = 400'000'000;
    /// Run-time spacing of monitor samples and of stored curve snapshots (0 disables snapshots).
    double sample_interval = 0.01;
    double state_interval = 0.01;
    std::vector<double> abscissas = {-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8};

    void validate() const {
        if (n_nodes < 32) throw Error(ErrorKind::InvalidArgument, "n_nodes must be at least 32");
        if (!(dt_safety > 0.0 && dt_safety < 1.0)) throw Error(ErrorKind::InvalidArgument, "dt_safety must lie in (0, 1)");
        if (!(extinction_length > 0.0)) throw Error(ErrorKind::InvalidArgument, "extinction_length must be positive");
        if (!(sample_interval > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample_interval must be positive");
    }
};

/// Open polyline ordered left to right. In free-boundary mode the endpoints sit
/// at turning angles 3 pi/2 + s_left and pi/2 + s_right of the normalized domain.
struct CurveState {
    std::vector<Vec2> nodes;
    double time = 0.0;
    double s_left = 0.0;
    double s_right = 0.0;
    // Filled by analyze().
    std::vector<double> kappa;
    std::vector<double> theta;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    double area = 0.0;

    double omega_minus() const { return 1.5 * kPi + s_left; }
    double omega_plus() const { return 0.5 * kPi + s_right; }
};

namespace detail {

/// One end of an open curve: the end node moves along `dir`, the curve's
/// curvature normal there is `normal`, and g = kappa_s / kappa measured inwards.
struct EndRow {
    Vec2 dir;
    Vec2 normal;
    double g = 0.0;
};

inline double robin_beta(double h, double g) { return 2.0 / (h * h * std::max(0.5, 1.0 + h * g / 3.0)); }

struct OpenWork {
    std::vector<double> off, cp, px, py, gl, gr;
};

/// Backward-Euler step of X_t = (X_{i+1} - 2 X_i + X_{i-1}) / q_i^2 with
/// q_i^2 = (h_i^2 + h_{i+1}^2) / 2 and ghost-node end rows. Writes the new
/// nodes to `out` and returns the end displacements along dir.
inline std::array<double, 2> open_solve(std::span<const Vec2> x, double dt, const EndRow& left, const EndRow& right,
                                        std::vector<Vec2>& out, OpenWork& w) {
    const std::size_t m = x.size() - 1;
    const std::size_t k = m - 1;
    w.off.resize(k);
    w.cp.resize(k);
    w.px.resize(k);
    w.py.resize(k);
    w.gl.resize(k);
    w.gr.resize(k);
    const double inv_dt = 1.0 / dt;
    double h2_prev = dot(x[1] - x[0], x[1] - x[0]);
    for (std::size_t j = 0; j < k; ++j) {
        const Vec2 e = x[j + 2] - x[j + 1];
        const double h2_next = dot(e, e);
        w.off[j] = 2.0 / (h2_prev + h2_next);
        h2_prev = h2_next;
    }
    // Forward sweep for four right-hand sides sharing one matrix.
    double den = inv_dt + 2.0 * w.off[0];
    w.cp[0] = -w.off[0] / den;
    w.px[0] = (x[1].x * inv_dt + w.off[0] * x[0].x) / den;
    w.py[0] = (x[1].y * inv_dt + w.off[0] * x[0].y) / den;
    w.gl[0] = w.off[0] / den;
    w.gr[0] = 0.0;
    for (std::size_t j = 1; j < k; ++j) {
        const double a = -w.off[j];
        den = inv_dt + 2.0 * w.off[j] - a * w.cp[j - 1];
        w.cp[j] = -w.off[j] / den;
        double rx = x[j + 1].x * inv_dt, ry = x[j + 1].y * inv_dt, rr = 0.0;
        if (j + 1 == k) {
            rx += w.off[j] * x[m].x;
            ry += w.off[j] * x[m].y;
            rr = w.off[j];
        }
        w.px[j] = (rx - a * w.px[j - 1]) / den;
        w.py[j] = (ry - a * w.py[j - 1]) / den;
        // The end responses decay geometrically; cut them off before they go subnormal.
        const double g = -a * w.gl[j - 1] / den;
        w.gl[j] = std::abs(g) < 1e-200 ? 0.0 : g;
        w.gr[j] = (rr - a * w.gr[j - 1]) / den;
    }
    for (std::size_t j = k - 1; j-- > 0;) {
        w.px[j] -= w.cp[j] * w.px[j + 1];
        w.py[j] -= w.cp[j] * w.py[j + 1];
        w.gl[j] -= w.cp[j] * w.gl[j + 1];
        const double g = w.gr[j] - w.cp[j] * w.gr[j + 1];
        w.gr[j] = std::abs(g) < 1e-200 ? 0.0 : g;
    }

    // End rows: alpha <W,N> / dt = beta <N, X_nbr(new) - X_end - alpha W>.
    const double hl = norm(x[1] - x[0]);
    const double hr = norm(x[m - 1] - x[m]);
    const double bl = robin_beta(hl, left.g);
    const double br = robin_beta(hr, right.g);
    const double wl = dot(left.dir, left.normal);
    const double wr = dot(right.dir, right.normal);
    const Vec2 p1{w.px[0], w.py[0]};
    const Vec2 pk{w.px[k - 1], w.py[k - 1]};
    const double a11 = wl * inv_dt + bl * wl - bl * w.gl[0] * wl;
    const double a12 = -bl * w.gr[0] * dot(left.normal, right.dir);
    const double a21 = -br * w.gl[k - 1] * dot(right.normal, left.dir);
    const double a22 = wr * inv_dt + br * wr - br * w.gr[k - 1] * wr;
    const double b1 = bl * dot(left.normal, p1 - x[0]);
    const double b2 = br * dot(right.normal, pk - x[m]);
    const double det = a11 * a22 - a12 * a21;
    const double al = (b1 * a22 - a12 * b2) / det;
    const double ar = (a11 * b2 - a21 * b1) / det;

    out.resize(x.size());
    out[0] = x[0] + al * left.dir;
    out[m] = x[m] + ar * right.dir;
    for (std::size_t j = 0; j < k; ++j) {
        out[j + 1] = Vec2{w.px[j], w.py[j]} + (al * w.gl[j]) * left.dir + (ar * w.gr[j]) * right.dir;
    }
    return {al, ar};
}

/// Menger curvature of three consecutive nodes, positive for counter-clockwise turning.
inline double menger(Vec2 a, Vec2 b, Vec2 c) {
    const double den = norm(b - a) * norm(c - b) * norm(c - a);
    return den > 0.0 ? 2.0 * cross(b - a, c - b) / den : 0.0;
}

/// Smallest interior curvature, largest curvature and total length in one pass.
struct ShapeScan {
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    double length = 0.0;
    double spacing_min = 0.0;
    double spacing_max = 0.0;
};

inline ShapeScan scan_shape(std::span<const Vec2> x) {
    ShapeScan s;
    s.kappa_min = std::numeric_limits<double>::infinity();
    s.kappa_max = -std::numeric_limits<double>::infinity();
    s.spacing_min = std::numeric_limits<double>::infinity();
    double h_prev = norm(x[1] - x[0]);
    s.length = h_prev;
    s.spacing_min = s.spacing_max = h_prev;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double h_next = norm(x[i + 1] - x[i]);
        // chord x[i+1] - x[i-1] replaced by h_prev + h_next; equal to first order and sign-exact
        const double kap = 4.0 * cross(x[i] - x[i - 1], x[i + 1] - x[i]) / (h_prev * h_next * (h_prev + h_next));
        s.kappa_min = std::min(s.kappa_min, kap);
        s.kappa_max = std::max(s.kappa_max, kap);
        s.length += h_next;
        s.spacing_min = std::min(s.spacing_min, h_next);
        s.spacing_max = std::max(s.spacing_max, h_next);
        h_prev = h_next;
    }
    return s;
}

/// Resamples interior nodes uniformly in arc length along a cubic-spline
/// interpolant; end nodes stay put. Returns true when it changed anything.
inline bool redistribute(std::vector<Vec2>& x, double tolerance) {
    const std::size_t n = x.size();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) s[i] = s[i - 1] + norm(x[i] - x[i - 1]);
    const double mean = s.back() / static_cast<double>(n - 1);
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) worst = std::max(worst, std::abs((s[i] - s[i - 1]) / mean - 1.0));
    if (worst <= tolerance) return false;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[i].x;
        ys[i] = x[i].y;
    }
    const CubicSpline fx(s, xs), fy(s, ys);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double t = s.back() * static_cast<double>(i) / static_cast<double>(n - 1);
        x[i] = {fx(t), fy(t)};
    }
    return true;
}

}  // namespace detail

/// Free-boundary curvature flow of an open convex curve in the upper half of a
/// normalized domain, with both ends sliding on the boundary.
class FreeBoundaryFlow {
public:
    FreeBoundaryFlow(NormalizedDomain nd, SolverConfig cfg) : nd_(std::move(nd)), cfg_(std::move(cfg)) {
        cfg_.validate();
        const ConvexDomain& d = nd_.domain;
        half_area_ = 0.5 * gauss16().integrate(
                               [&d](double w) { return cross(d.point(w), d.rho(w) * ConvexDomain::tangent(w)); },
                               0.5 * kPi, 1.5 * kPi, 32);
    }

    const NormalizedDomain& domain() const { return nd_; }
    const SolverConfig& config() const { return cfg_; }
    double half_area() const { return half_area_; }

    /// State whose end nodes are placed exactly at the given boundary offsets.
    CurveState make_state(std::vector<Vec2> nodes, double s_left, double s_right, double time = 0.0) const {
        if (nodes.size() < 3) throw Error(ErrorKind::InvalidArgument, "curve needs at least three nodes");
        CurveState st;
        st.nodes = std::move(nodes);
        st.s_left = s_left;
        st.s_right = s_right;
        st.time = time;
        st.nodes.front() = end_point(3, s_left);
        st.nodes.back() = end_point(1, s_right);
        return st;
    }

    Vec2 end_point(int q, double s) const { return NormalizedDomain::anchor(q) + nd_.offset(q, s); }

    /// Step size dt_safety * h_min^2 / 2.
    double time_step(const CurveState& st) const {
        double h2min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < st.nodes.size(); ++i) {
            const Vec2 e = st.nodes[i] - st.nodes[i - 1];
            h2min = std::min(h2min, dot(e, e));
        }
        return cfg_.dt_safety * h2min / 2.0;
    }

    /// Advances one step, halving on convexity loss. Returns the step taken.
    double step(CurveState& st) {
        double dt = time_step(st);
        for (int attempt = 0; attempt <= cfg_.max_halvings; ++attempt) {
            trial_step(st, dt);
            last_scan_ = detail::scan_shape(trial_.nodes);
            if (last_scan_.kappa_min >= -cfg_.convexity_tolerance) {
                const double mean = last_scan_.length / static_cast<double>(trial_.nodes.size() - 1);
                const bool drifted = last_scan_.spacing_max > (1.0 + cfg_.redistribution_tolerance) * mean ||
                                     last_scan_.spacing_min < (1.0 - cfg_.redistribution_tolerance) * mean;
                if (cfg_.redistribution && drifted && detail::redistribute(trial_.nodes, cfg_.redistribution_tolerance)) {
                    last_scan_ = detail::scan_shape(trial_.nodes);
                }
                std::swap(st.nodes, trial_.nodes);
                std::swap(previous_.nodes, trial_.nodes);
                previous_.s_left = st.s_left;
                previous_.s_right = st.s_right;
                previous_.time = st.time;
                st.s_left = trial_.s_left;
                st.s_right = trial_.s_right;
                st.time += dt;
                return dt;
            }
            dt *= 0.5;
        }
        throw Error(ErrorKind::StepRejected, "convexity lost after repeated step halving at t = " + std::to_string(st.time));
    }

    /// State before the most recent accepted step (nodes and end offsets only).
    const CurveState& previous() const { return previous_; }
    const detail::ShapeScan& last_scan() const { return last_scan_; }

    /// Curvature at an end node from its ghost reflection, with the boundary correction.
    double end_curvature(const CurveState& st, int q) const {
        const std::size_t m = st.nodes.size() - 1;
        const detail::EndRow row = end_row(q, q == 1 ? st.s_right : st.s_left);
        const Vec2 end = q == 1 ? st.nodes[m] : st.nodes[0];
        const Vec2 nbr = q == 1 ? st.nodes[m - 1] : st.nodes[1];
        const double h = norm(nbr - end);
        return detail::robin_beta(h, row.g) * dot(row.normal, nbr - end);
    }

    /// Area between the diameter, the curve and the two boundary arcs.
    double swept_area(const CurveState& st) const {
        double b = arc_area(1, st.s_right) - arc_area(3, st.s_left);
        for (std::size_t i = 1; i < st.nodes.size(); ++i) b += 0.5 * cross(st.nodes[i], st.nodes[i - 1]);
        return b;
    }

    /// Fills curvature, turning angles, contact angles and enclosed area.
    void analyze(CurveState& st) const {
        const std::size_t n = st.nodes.size();
        st.kappa.assign(n, 0.0);
        st.theta.assign(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            st.kappa[i] = detail::menger(st.nodes[i - 1], st.nodes[i], st.nodes[i + 1]);
            const Vec2 d = st.nodes[i + 1] - st.nodes[i - 1];
            st.theta[i] = std::atan2(d.y, d.x);
        }
        st.kappa[0] = end_curvature(st, 3);
        st.kappa[n - 1] = end_curvature(st, 1);
        st.theta[0] = st.s_left;
        st.theta[n - 1] = st.s_right;
        st.theta_plus = st.s_right;
        st.theta_minus = -st.s_left;
        st.area = half_area_ - swept_area(st);
    }

private:
    detail::EndRow end_row(int q, double s) const {
        Vec2 t = ConvexDomain::tangent_q(q, s);
        if (q == 3) t = -t;
        return {t, t, -nd_.domain.kappa(q * (kPi / 2) + s)};
    }

    /// Signed area swept by the segment from the origin along the boundary from the anchor to offset s.
    double arc_area(int q, double s) const {
        if (s == 0.0) return 0.0;
        const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(s) / 0.1)));
        const double base = q * (kPi / 2);
        const Vec2 anchor = NormalizedDomain::anchor(q);
        return 0.5 * gauss16().integrate(
                         [&](double u) {
                             const Vec2 p = anchor + nd_.offset(q, u);
                             return cross(p, nd_.domain.rho(base + u) * ConvexDomain::tangent_q(q, u));
                         },
                         0.0, s, panels);
    }

    void trial_step(const CurveState& st, double dt) {
        const detail::EndRow left = end_row(3, st.s_left);
        const detail::EndRow right = end_row(1, st.s_right);
        const auto alpha = detail::open_solve(st.nodes, dt, left, right, trial_.nodes, work_);
        // Arc length alpha along the boundary, rho taken at the midpoint of the move.
        const ConvexDomain& d = nd_.domain;
        const double wr = 0.5 * kPi + st.s_right;
        const double dr0 = alpha[1] / d.rho(wr);
        trial_.s_right = st.s_right + alpha[1] / d.rho(wr + 0.5 * dr0);
        const double wl = 1.5 * kPi + st.s_left;
        const double dl0 = alpha[0] / d.rho(wl);
        trial_.s_left = st.s_left - alpha[0] / d.rho(wl - 0.5 * dl0);
        trial_.nodes.front() = end_point(3, trial_.s_left);
        trial_.nodes.back() = end_point(1, trial_.s_right);
    }

    NormalizedDomain nd_;
    SolverConfig cfg_;
    double half_area_ = 0.0;
    CurveState trial_;
    CurveState previous_;
    detail::OpenWork work_;
    detail::ShapeScan last_scan_;
};

struct MonitorSample {
    double t = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    double kappa_plus = 0.0;
    double kappa_minus = 0.0;
    double area = 0.0;
    /// Area below the curve and above the diameter; precise while the curve is flat.
    double swept = 0.0;
    double dA_dt = 0.0;
    double length = 0.0;
    double support_ratio = 0.0;
    double kappa_s_ratio = 0.0;
    double kappa_over_y_min = 0.0;
    double kappa_over_y_max = 0.0;
    int kappa_minima = 0;
    double barrier_margin = kNaN;
    std::vector<double> heights;
};

struct Trajectory {
    std::vector<double> abscissas;
    std::vector<MonitorSample> monitors;
    /// Curve snapshots (analysed) at the state interval, in offset time.
    std::vector<CurveState> states;
    /// Run time of the detected extinction and the shift applied to all times.
    double extinction_time = 0.0;
    double time_offset = 0.0;
    /// Offset time of the initial curve.
    double start_time = 0.0;
    Vec2 extinction_point{};
    std::int64_t steps = 0;
    bool barrier_active = false;
    double barrier_radius = 0.0;
    double barrier_start = 0.0;
    // Construction data when the run starts from an orthogonal oval.
    double rho = 0.0;
    double lambda_rho = 0.0;
    double xi_rho = 0.0;
};

struct BarrierMonitor {
    BarrierConfig cfg;
    /// Barrier time at the start of the run.
    double t_start = 0.0;
};

/// Height of the first polyline segment spanning abscissa x, or NaN.
inline double height_at(std::span<const Vec2> nodes, double x) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const Vec2 a = nodes[i], b = nodes[i + 1];
        if ((a.x - x) * (b.x - x) <= 0.0 && a.x != b.x) return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
    }
    return kNaN;
}

/// Local minima of a sequence, ends included, ignoring differences below tol.
inline int count_minima(std::span<const double> v, double tol) {
    int first = 0, last = 0, count = 0, prev = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double d = v[i + 1] - v[i];
        const int sgn = d > tol ? 1 : (d < -tol ? -1 : 0);
        if (sgn == 0) continue;
        if (first == 0) first = sgn;
        if (prev == -1 && sgn == 1) ++count;
        prev = sgn;
        last = sgn;
    }
    if (first == 1) ++count;
    if (last == -1) ++count;
    return count;
}

namespace detail {

inline MonitorSample make_sample(const FreeBoundaryFlow& flow, CurveState& st, double swept_prev, double dt_last,
                                 const std::vector<double>& abscissas, const std::optional<BarrierMonitor>& bm) {
    flow.analyze(st);
    MonitorSample m;
    m.t = st.time;
    m.theta_plus = st.theta_plus;
    m.theta_minus = st.theta_minus;
    m.kappa_plus = st.kappa.back();
    m.kappa_minus = st.kappa.front();
    m.kappa_min = *std::min_element(st.kappa.begin(), st.kappa.end());
    m.kappa_max = *std::max_element(st.kappa.begin(), st.kappa.end());
    m.swept = flow.swept_area(st);
    m.area = flow.half_area() - m.swept;
    m.dA_dt = dt_last > 0.0 ? -(m.swept - swept_prev) / dt_last : kNaN;
    const std::size_t n = st.nodes.size();
    double len = 0.0;
    m.kappa_over_y_min = std::numeric_limits<double>::infinity();
    m.kappa_over_y_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) len += norm(st.nodes[i] - st.nodes[i - 1]);
        const double k = st.kappa[i];
        const Vec2 nu{-std::sin(st.theta[i]), std::cos(st.theta[i])};
        if (k > 0.0) m.support_ratio = std::max(m.support_ratio, std::abs(dot(st.nodes[i], nu)) / k);
        if (st.nodes[i].y > 0.0) {
            m.kappa_over_y_min = std::min(m.kappa_over_y_min, k / st.nodes[i].y);
            m.kappa_over_y_max = std::max(m.kappa_over_y_max, k / st.nodes[i].y);
        }
        if (i > 0 && i + 1 < n && k > 0.0) {
            const double ds = norm(st.nodes[i + 1] - st.nodes[i]) + norm(st.nodes[i] - st.nodes[i - 1]);
            m.kappa_s_ratio = std::max(m.kappa_s_ratio, std::abs(st.kappa[i + 1] - st.kappa[i - 1]) / ds / k);
        }
    }
    m.length = len;
    m.kappa_minima = count_minima(st.kappa, 1e-12 * std::abs(m.kappa_max));
    m.heights.reserve(abscissas.size());
    for (double x : abscissas) m.heights.push_back(height_at(st.nodes, x));
    if (bm) {
        const double tb = bm->t_start + st.time;
        if (tb < 0.0) m.barrier_margin = below_barrier(st.nodes, barrier_at(tb, bm->cfg)).margin;
    }
    return m;
}

}  // namespace detail

/// Runs until the curve length drops below the extinction threshold (or its
/// curvature exceeds the reciprocal), then shifts all times so extinction is t = 0.
inline Trajectory run_to_extinction(FreeBoundaryFlow& flow, CurveState st,
                                    const std::optional<BarrierMonitor>& barrier = std::nullopt) {
    const SolverConfig& cfg = flow.config();
    Trajectory traj;
    traj.abscissas = cfg.abscissas;
    traj.barrier_active = barrier.has_value();
    if (barrier) {
        traj.barrier_radius = barrier->cfg.r;
        traj.barrier_start = barrier->t_start;
    }
    const double t0 = st.time;
    double swept_prev = flow.swept_area(st);
    traj.monitors.push_back(detail::make_sample(flow, st, swept_prev, 0.0, traj.abscissas, barrier));
    if (cfg.state_interval > 0.0) traj.states.push_back(st);
    double next_sample = t0 + (barrier && barrier->t_start < 0.0 ? std::min(cfg.sample_interval, -barrier->t_start / 32.0)
                                                                  : cfg.sample_interval);
    double next_state = t0 + cfg.state_interval;
    double sample_length = traj.monitors.back().length;
    const double length_ratio = std::pow(2.0, -0.25);
    double prev_length = sample_length;
    double length = sample_length;
    double dt = 0.0;

    while (true) {
        if (traj.steps >= cfg.max_steps || st.time - t0 > cfg.max_time) {
            throw Error(ErrorKind::NonExtinction, "step budget exhausted at t = " + std::to_string(st.time) +
                                                      " with length " + std::to_string(length));
        }
        dt = flow.step(st);
        ++traj.steps;
        prev_length = length;
        length = flow.last_scan().length;
        const bool done = length < cfg.extinction_length || flow.last_scan().kappa_max > 1.0 / cfg.extinction_length;
        const bool by_time = st.time >= next_sample;
        const bool by_length = length <= sample_length * length_ratio;
        if (by_time || by_length || done) {
            swept_prev = flow.swept_area(flow.previous());
            traj.monitors.push_back(detail::make_sample(flow, st, swept_prev, dt, traj.abscissas, barrier));
            if (by_time) {
                // The barrier comparison is only meaningful for a short while; resolve it finely.
                const bool in_window = barrier && barrier->t_start + st.time < 0.0;
                const double step_to = in_window ? std::min(cfg.sample_interval, -barrier->t_start / 32.0) : cfg.sample_interval;
                while (next_sample <= st.time) next_sample += step_to;
            }
            if (by_length) sample_length = length;
            if (cfg.state_interval > 0.0 && (st.time >= next_state || done)) {
                traj.states.push_back(st);
                while (next_state <= st.time) next_state += cfg.state_interval;
            }
        }
        if (done) break;
    }
    // Length squared is close to linear in time at extinction.
    const double l2 = length * length, p2 = prev_length * prev_length;
    const double extra = p2 > l2 ? l2 * dt / (p2 - l2) : 0.0;
    traj.extinction_time = st.time + extra;
    traj.extinction_point = st.nodes[st.nodes.size() / 2];
    traj.time_offset = -traj.extinction_time;
    traj.start_time = t0 - traj.extinction_time;
    for (auto& m : traj.monitors) m.t -= traj.extinction_time;
    for (auto& s : traj.states) s.time -= traj.extinction_time;
    log::info("extinction after %lld steps at run time %.6f", static_cast<long long>(traj.steps), traj.extinction_time);
    return traj;
}

/// Flow out of the sampled orthogonal oval at height rho, with the tangent barrier monitored.
inline Trajectory old_but_not_ancient(const NormalizedDomain& nd, double rho, const SolverConfig& cfg) {
    cfg.validate();
    const BarrierConfig bc = admissible_radius(nd);
    if (!(rho < bc.r)) {
        throw Error(ErrorKind::RhoTooLarge, "rho = " + std::to_string(rho) + " is not below the barrier radius " +
                                                std::to_string(bc.r));
    }
    const OrthogonalOval oval = construct_orthogonal_oval(nd, rho);
    FreeBoundaryFlow flow(nd, cfg);
    CurveState st = flow.make_state(sample_initial_curve(oval, cfg.n_nodes), oval.s_left, oval.delta_right);
    std::optional<BarrierMonitor> bm = BarrierMonitor{bc, barrier_time_for_height(rho, bc.r)};
    if (!below_barrier(st.nodes, barrier_at(bm->t_start, bc)).below) {
        log::warn("initial curve is not below the tangent barrier; barrier monitor disabled");
        bm.reset();
    }
    Trajectory traj = run_to_extinction(flow, std::move(st), bm);
    traj.rho = rho;
    traj.lambda_rho = oval.params.lambda;
    traj.xi_rho = oval.params.xi;
    return traj;
}

/// Curve at offset time t, linearly interpolated node by node between snapshots.
inline std::optional<std::vector<Vec2>> state_at(const Trajectory& traj, double t) {
    const auto& s = traj.states;
    if (s.empty() || t < s.front().time || t > s.back().time) return std::nullopt;
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const CurveState& c, double v) { return c.time < v; });
    if (it == s.begin()) return it->nodes;
    const CurveState& b = *it;
    const CurveState& a = *(it - 1);
    if (a.nodes.size() != b.nodes.size()) return b.nodes;
    const double w = (t - a.time) / (b.time - a.time);
    std::vector<Vec2> out(a.nodes.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * a.nodes[i] + w * b.nodes[i];
    return out;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 e = b - a;
    const double ee = dot(e, e);
    const double u = ee > 0.0 ? std::clamp(dot(p - a, e) / ee, 0.0, 1.0) : 0.0;
    return norm(p - (a + u * e));
}

inline double directed_distance(std::span<const Vec2> from, std::span<const Vec2> to) {
    double worst = 0.0;
    for (const Vec2& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < to.size(); ++i) best = std::min(best, point_segment_distance(p, to[i], to[i + 1]));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace detail

/// Hausdorff distance between two polylines.
inline double curve_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
    return std::max(detail::directed_distance(a, b), detail::directed_distance(b, a));
}

/// Largest matched-time curve distance over a window of offset times, after
/// shifting the second trajectory by tau.
inline double matched_distance(const Trajectory& a, const Trajectory& b, double t_begin, double t_end, int samples,
                               double tau = 0.0) {
    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double t = t_begin + (t_end - t_begin) * j / std::max(1, samples - 1);
        const auto ca = state_at(a, t);
        const auto cb = state_at(b, t + tau);
        if (!ca || !cb) throw Error(ErrorKind::WindowTooShort, "comparison window leaves the recorded states");
        worst = std::max(worst, curve_distance(*ca, *cb));
    }
    return worst;
}

struct SweepReport {
    std::vector<double> rhos;
    std::vector<Trajectory> runs;
    /// Matched-time distance between consecutive runs on the comparison window.
    std::vector<double> pair_distances;
    double window_begin = -4.0;
    double window_end = -0.25;
    /// Largest curve height at each probe time, per run.
    std::vector<double> probe_times;
    std::vector<std::vector<double>> max_heights;
};

inline double max_height(std::span<const Vec2> nodes) {
    double h = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : nodes) h = std::max(h, p.y);
    return h;
}

/// Runs old_but_not_ancient for each rho (up to `parallel` at once; results
/// are stored by rho position, so the outcome does not depend on scheduling).
inline SweepReport ancient_sweep(const NormalizedDomain& nd, const std::vector<double>& rhos, const SolverConfig& cfg,
                                 int parallel = 1, double window_begin = -4.0, double window_end = -0.25) {
    if (rhos.size() < 3) throw Error(ErrorKind::InvalidArgument, "a sweep needs at least three rho values");
    for (std::size_t i = 1; i < rhos.size(); ++i) {
        if (!(rhos[i] < rhos[i - 1])) throw Error(ErrorKind::InvalidArgument, "rho values must be decreasing");
    }
    SweepReport rep;
    rep.rhos = rhos;
    rep.window_begin = window_begin;
    rep.window_end = window_end;
    rep.runs.resize(rhos.size());
    std::vector<std::string> failures(rhos.size());
    std::vector<ErrorKind> kinds(rhos.size(), ErrorKind::InvalidArgument);
    auto work = [&](std::size_t i) {
        try {
            rep.runs[i] = old_but_not_ancient(nd, rhos[i], cfg);
        } catch (const Error& e) {
            failures[i] = e.what();
            kinds[i] = e.kind();
        }
    };
    const std::size_t width = static_cast<std::size_t>(std::max(1, parallel));
    for (std::size_t start = 0; start < rhos.size(); start += width) {
        std::vector<std::thread> pool;
        const std::size_t stop = std::min(rhos.size(), start + width);
        if (width == 1) {
            work(start);
            continue;
        }
        for (std::size_t i = start; i < stop; ++i) pool.emplace_back(work, i);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        if (!failures[i].empty()) throw Error(kinds[i], "sweep run rho = " + std::to_string(rhos[i]) + ": " + failures[i]);
    }
    for (std::size_t i = 1; i < rhos.size(); ++i) {
        rep.pair_distances.push_back(matched_distance(rep.runs[i - 1], rep.runs[i], window_begin, window_end, 64));
    }
    rep.probe_times = {-8.0, -4.0, -2.0, -1.0};
    for (const auto& run : rep.runs) {
        std::vector<double> row;
        for (double t : rep.probe_times) {
            const auto c = state_at(run, t);
            row.push_back(c ? max_height(*c) : kNaN);
        }
        rep.max_heights.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Validation modes with exact solutions.

/// Closed polygon moved by the same backward-Euler scheme (cyclic system).
inline void closed_curve_step(std::vector<Vec2>& x, double dt) {
    const std::size_t n = x.size();
    std::vector<double> a(n), b(n), c(n), dx(n), dy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 prev = x[(i + n - 1) % n], next = x[(i + 1) % n];
        const double hl = norm(x[i] - prev), hr = norm(next - x[i]);
        const double w = 2.0 / (hl * hl + hr * hr);
        a[i] = -w;
        c[i] = -w;
        b[i] = 1.0 / dt + 2.0 * w;
        dx[i] = x[i].x / dt;
        dy[i] = x[i].y / dt;
    }
    solve_cyclic_tridiagonal(a, b, c, dx);
    solve_cyclic_tridiagonal(a, b, c, dy);
    for (std::size_t i = 0; i < n; ++i) x[i] = {dx[i], dy[i]};
}

/// Largest deviation of node radii from sqrt(1 - 2t) for the unit circle flowed to t_end.
inline double shrinking_circle_error(int n, double t_end, double dt_safety = 0.4) {
    std::vector<Vec2> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = unit_at(kTwoPi * i / n);
    const double h = 2.0 * std::sin(kPi / n);
    const double dt0 = dt_safety * h * h / 2.0;
    const int steps = static_cast<int>(std::ceil(t_end / dt0));
    const double dt = t_end / steps;
    for (int s = 0; s < steps; ++s) closed_curve_step(x, dt);
    const double exact = std::sqrt(1.0 - 2.0 * t_end);
    double err = 0.0;
    for (const Vec2& p : x) err = std::max(err, std::abs(norm(p) - exact));
    return err;
}

/// Vertical walls x = +-half_width; the end nodes slide on them while the
/// curve keeps the grim reaper's contact angle.
struct WallSetup {
    double half_width = 1.0;
};

inline void straight_wall_step(std::vector<Vec2>& x, double dt, const WallSetup& walls, detail::OpenWork& work) {
    const double w = walls.half_width;
    const detail::EndRow left{{0.0, 1.0}, {std::sin(w), std::cos(w)}, std::sin(w)};
    const detail::EndRow right{{0.0, 1.0}, {-std::sin(w), std::cos(w)}, std::sin(w)};
    std::vector<Vec2> out;
    detail::open_solve(x, dt, left, right, out, work);
    out.front().x = -w;
    out.back().x = w;
    x.swap(out);
}

/// Largest vertical deviation from y = t + log sec x after flowing the grim
/// reaper between walls to t_end.
inline double grim_reaper_error(int n, double t_end, double half_width = 1.0, double dt_safety = 0.4) {
    const WallSetup walls{half_width};
    const double s_max = std::asinh(std::tan(half_width));
    std::vector<Vec2> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = -s_max + 2.0 * s_max * i / (n - 1);
        x[static_cast<std::size_t>(i)] = {std::atan(std::sinh(s)), std::log(std::cosh(s))};
    }
    const double h = 2.0 * s_max / (n - 1);
    const double dt0 = dt_safety * h * h / 2.0;
    const int steps = static_cast<int>(std::ceil(t_end / dt0));
    const double dt = t_end / steps;
    detail::OpenWork work;
    for (int s = 0; s < steps; ++s) straight_wall_step(x, dt, walls, work);
    double err = 0.0;
    for (const Vec2& p : x) err = std::max(err, std::abs(p.y - t_end - std::log(1.0 / std::cos(p.x))));
    return err;
}

}  // namespace fbcsf
