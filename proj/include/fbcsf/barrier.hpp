#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fbcsf/error.hpp"
#include "fbcsf/geometry.hpp"
#include "fbcsf/numeric.hpp"

namespace fbcsf {

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

/// True when the closed disk lies in the domain, tested through support
/// functions: <c, nu(w)> + R <= h(w) on a dense angle grid.
inline bool circle_inside(const ConvexDomain& d, const Circle& c, int grid = 1024, double tol = 1e-10) {
    for (int j = 0; j < grid; ++j) {
        const double w = kTwoPi * j / grid;
        if (dot(c.center, ConvexDomain::normal(w)) + c.radius > d.support(w) + tol) return false;
    }
    return true;
}

struct BarrierConfig {
    double r = 0.25;

    Circle plus() const { return {{1.0 - r, 0.0}, r}; }
    Circle minus() const { return {{r - 1.0, 0.0}, r}; }
};

/// Largest radius with 4r <= kappa <= 1/(4r) whose two tangent circles fit.
inline BarrierConfig admissible_radius(const NormalizedDomain& nd) {
    const ConvexDomain& d = nd.domain;
    BarrierConfig cfg;
    cfg.r = std::min(d.kappa_min() / 4.0, 1.0 / (4.0 * d.kappa_max()));
    while (!(circle_inside(d, cfg.plus()) && circle_inside(d, cfg.minus()))) cfg.r *= 0.9;
    return cfg;
}

/// Arc of the circle meeting the unit circle orthogonally at (+-cos w, sin w).
struct DiskArc {
    double omega = 0.0;
    Vec2 center;
    double radius = 0.0;

    /// alpha in [-omega, omega]; alpha = 0 is the lowest point.
    Vec2 point(double alpha) const { return center + radius * Vec2{std::sin(alpha), -std::cos(alpha)}; }
    Vec2 endpoint(int side) const { return point(side > 0 ? omega : -omega); }
    double curvature() const { return std::tan(omega); }
    double bottom_height() const { return std::tan(0.5 * omega); }
};

inline DiskArc unit_disk_arc(double omega) {
    if (!(omega > 0.0 && omega < kPi / 2)) throw Error(ErrorKind::InvalidArgument, "arc angle must lie in (0, pi/2)");
    return {omega, {0.0, 1.0 / std::sin(omega)}, 1.0 / std::tan(omega)};
}

/// |<p, p - c>| / R at the right endpoint: zero when the arc is orthogonal to the unit circle.
inline double unit_arc_orthogonality(const DiskArc& a) {
    const Vec2 p = a.endpoint(1);
    return std::abs(dot(normalized(p), (p - a.center) / a.radius));
}

/// Arc angle at rescaled time tau = t / r^2, where sin w = exp(2 tau).
inline double barrier_omega(double tau) { return std::asin(std::exp(2.0 * tau)); }

/// K_t = K_t^- + L_t + K_t^+ for the configuration's two tangent circles.
struct BarrierCurve {
    double t = 0.0;
    double r = 0.0;
    double omega = 0.0;
    /// Set when omega underflows and the barrier is the diameter itself.
    bool degenerate = false;
    /// Arcs of K_t^+ and K_t^-, already scaled and translated.
    Circle arc_plus;
    Circle arc_minus;
    /// Endpoints of L_t (inner endpoints of the arcs).
    Vec2 segment_left;
    Vec2 segment_right;
    double min_height = 0.0;
    double max_height = 0.0;

    double x_min() const { return degenerate ? -1.0 : arc_minus.center.x - r * std::cos(omega); }
    double x_max() const { return degenerate ? 1.0 : arc_plus.center.x + r * std::cos(omega); }

    /// Height of the barrier above x, or nothing outside its x-range.
    std::optional<double> height(double x) const {
        if (x < x_min() || x > x_max()) return std::nullopt;
        if (degenerate) return 0.0;
        const double hw = r * std::cos(omega);
        if (x >= segment_left.x && x <= segment_right.x) return segment_left.y;
        const double cx = x < 0.0 ? arc_minus.center.x : arc_plus.center.x;
        const double dx = std::min(std::abs(x - cx), hw);
        const double big = arc_plus.radius;
        // center height minus chord sagitta, written without cancellation for large radii
        return min_height + dx * dx / (big + std::sqrt(std::max(0.0, big * big - dx * dx)));
    }
};

inline BarrierCurve barrier_at(double t, const BarrierConfig& cfg) {
    if (!(t < 0.0)) throw Error(ErrorKind::InvalidArgument, "barrier time must be negative");
    BarrierCurve b;
    b.t = t;
    b.r = cfg.r;
    b.omega = barrier_omega(t / (cfg.r * cfg.r));
    if (!(b.omega > 0.0) || std::tan(b.omega) == 0.0) {
        b.degenerate = true;
        b.omega = 0.0;
        b.segment_left = {-1.0, 0.0};
        b.segment_right = {1.0, 0.0};
        return b;
    }
    const DiskArc a = unit_disk_arc(b.omega);
    const double r = cfg.r;
    b.arc_plus = {r * a.center + Vec2{1.0 - r, 0.0}, r * a.radius};
    b.arc_minus = {r * a.center - Vec2{1.0 - r, 0.0}, r * a.radius};
    const double hw = r * std::cos(b.omega);
    const double top = r * std::sin(b.omega);
    b.segment_left = {r - 1.0 + hw, top};
    b.segment_right = {1.0 - r - hw, top};
    b.min_height = r * a.bottom_height();
    b.max_height = top;
    return b;
}

/// Barrier time whose arcs are tangent to y = rho from above: r tan(w/2) = rho.
inline double barrier_time_for_height(double rho, double r) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "height must be positive");
    if (!(rho < r)) throw Error(ErrorKind::RhoTooLarge, "barrier tangency needs rho < r");
    const double u = rho / r;
    return 0.5 * r * r * std::log(2.0 * u / (1.0 + u * u));
}

/// Largest misfit between the arcs of K_t and orthogonality to C_r at their endpoints.
inline double endpoint_orthogonality(const BarrierCurve& b) {
    if (b.degenerate) return 0.0;
    double worst = 0.0;
    for (int side : {1, -1}) {
        const Circle& arc = side > 0 ? b.arc_plus : b.arc_minus;
        const Vec2 small = Vec2{side * (1.0 - b.r), 0.0};
        for (int end : {1, -1}) {
            const Vec2 p = arc.center + arc.radius * Vec2{end * std::sin(b.omega), -std::cos(b.omega)};
            worst = std::max(worst, std::abs(dot((p - small) / b.r, (p - arc.center) / arc.radius)));
        }
    }
    return worst;
}

/// Minimum of inward normal speed minus curvature over the scaled family,
/// sampled at times t_i and arc fractions u_j in [-1, 1] (alpha = u w).
/// Speeds come from a central difference of the distance to the moving circle.
inline double supersolution_residual(double r, std::span<const double> t_samples,
                                     std::span<const double> fractions, double dt = 1e-6) {
    auto circle_at = [r](double t) {
        const DiskArc a = unit_disk_arc(barrier_omega(t / (r * r)));
        return Circle{r * a.center + Vec2{1.0 - r, 0.0}, r * a.radius};
    };
    double worst = std::numeric_limits<double>::infinity();
    for (double t : t_samples) {
        const double w = barrier_omega(t / (r * r));
        const Circle now = circle_at(t);
        const Circle ahead = circle_at(t + dt);
        const Circle behind = circle_at(t - dt);
        for (double u : fractions) {
            const double alpha = u * w;
            const Vec2 p = now.center + now.radius * Vec2{std::sin(alpha), -std::cos(alpha)};
            const double g_ahead = norm(p - ahead.center) - ahead.radius;
            const double g_behind = norm(p - behind.center) - behind.radius;
            const double speed = (g_ahead - g_behind) / (2.0 * dt);
            worst = std::min(worst, speed - 1.0 / now.radius);
        }
    }
    return worst;
}

/// Closed form of the same residual for the unit-scale arc family.
inline double supersolution_residual_exact(double omega, double alpha) {
    const double c = std::cos(omega), s = std::sin(omega);
    return std::tan(omega) * (1.0 + c * c - 2.0 * c * std::cos(alpha)) / (s * s);
}

enum class Crossing { Acute, NonAcute, Orthogonal };

struct Intersection {
    Vec2 point;
    /// Segment index and local parameter of the crossing.
    std::size_t segment = 0;
    double u = 0.0;
    Crossing kind = Crossing::NonAcute;
    /// Cosine between the radial direction and the inner normal of the curve.
    double cosine = 0.0;
};

/// Transversal crossings of a convex polyline with a circle, ordered along the
/// polyline. A crossing is acute when the tangent line at p separates the curve
/// germ (on its inner-normal side) from the radial segment towards the center.
inline std::vector<Intersection> acute_intersection(std::span<const Vec2> curve, const Circle& circle,
                                                    double tie = 1e-8) {
    std::vector<Intersection> out;
    if (curve.size() < 2) return out;
    double turning = 0.0;
    for (std::size_t i = 0; i + 2 < curve.size(); ++i) {
        turning += cross(curve[i + 1] - curve[i], curve[i + 2] - curve[i + 1]);
    }
    const double orient = turning < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const Vec2 a = curve[i];
        const Vec2 e = curve[i + 1] - a;
        const Vec2 f = a - circle.center;
        const double qa = dot(e, e);
        const double qb = 2.0 * dot(f, e);
        const double qc = dot(f, f) - circle.radius * circle.radius;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (qa == 0.0 || disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        double roots[2] = {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)};
        for (double u : roots) {
            const bool last = i + 2 == curve.size();
            if (u < 0.0 || u > 1.0 || (u == 1.0 && !last)) continue;
            const Vec2 p = a + u * e;
            const Vec2 tangent = normalized(e);
            const Vec2 radial = normalized(p - circle.center);
            if (std::abs(dot(tangent, radial)) < tie) {
                throw Error(ErrorKind::TangentialContact, "curve touches the circle tangentially");
            }
            Intersection hit;
            hit.point = p;
            hit.segment = i;
            hit.u = u;
            hit.cosine = dot(radial, orient * perp(tangent));
            if (std::abs(hit.cosine) < tie) {
                hit.kind = Crossing::Orthogonal;
            } else {
                hit.kind = hit.cosine > 0.0 ? Crossing::Acute : Crossing::NonAcute;
            }
            if (!out.empty() && out.back().segment == i && std::abs(out.back().u - u) < 1e-15) continue;
            out.push_back(hit);
        }
    }
    return out;
}

struct BarrierComparison {
    bool below = true;
    /// Smallest barrier height minus curve height over the shared x-range.
    double margin = std::numeric_limits<double>::infinity();
};

/// Vertical comparison at the curve nodes inside the barrier's x-range.
inline BarrierComparison below_barrier(std::span<const Vec2> curve, const BarrierCurve& barrier,
                                       double tol = 1e-12) {
    BarrierComparison cmp;
    auto visit = [&](double x, double y) {
        const auto h = barrier.height(x);
        if (h) cmp.margin = std::min(cmp.margin, *h - y);
    };
    for (const Vec2& p : curve) visit(p.x, p.y);
    cmp.below = cmp.margin >= -tol;
    return cmp;
}

}  // namespace fbcsf
