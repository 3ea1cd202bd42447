#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fbcsf/error.hpp"
#include "fbcsf/geometry.hpp"
#include "fbcsf/numeric.hpp"

namespace fbcsf {

/// Shifted Angenent oval sin(lambda y) = e^{lambda^2 t} cosh(lambda (x - xi)).
struct OvalParams {
    double lambda = 1.0;
    double xi = 0.0;
    double t = -1.0;

    double amplitude() const { return std::exp(lambda * lambda * t); }
};

/// acosh(1/e) for 0 < e <= 1 without overflow for tiny e.
inline double acosh_reciprocal(double log_e) {
    const double l = -log_e;
    return l + std::log1p(std::sqrt(-std::expm1(-2.0 * l)));
}

/// Lower branch height; arcsin taken in (0, pi/2].
inline double oval_lower_height(const OvalParams& p, double x) {
    const double arg = p.amplitude() * std::cosh(p.lambda * (x - p.xi));
    if (arg > 1.0) {
        if (arg > 1.0 + 1e-14) throw Error(ErrorKind::OutOfSupport, "abscissa lies outside the oval's lower branch");
        return kPi / (2.0 * p.lambda);
    }
    return std::asin(arg) / p.lambda;
}

/// Point on the oval whose counter-clockwise tangent has angle theta.
/// theta = 0 is the bottom, theta = pi the top, theta = +-pi/2 the junctions.
inline Vec2 oval_point(const OvalParams& p, double theta) {
    const double e = p.amplitude();
    const double q = std::sqrt(std::max(0.0, 1.0 - e * e));
    const double c = std::cos(theta), s = std::sin(theta);
    const double sin_psi = std::sqrt(e * e * c * c + s * s);
    const double psi = std::atan2(sin_psi, c * q);
    return {p.xi + std::asinh(s * q / e) / p.lambda, psi / p.lambda};
}

/// Radius of curvature |dP/dtheta| of the oval.
inline double oval_speed(const OvalParams& p, double theta) {
    const double e = p.amplitude();
    const double q = std::sqrt(std::max(0.0, 1.0 - e * e));
    const double c = std::cos(theta), s = std::sin(theta);
    return q / (p.lambda * std::sqrt(e * e * c * c + s * s));
}

/// Counter-clockwise tangent angle of the oval at one of its points, in (-pi, pi].
inline double oval_tangent_angle(const OvalParams& p, Vec2 pt) {
    const double e = p.amplitude();
    return std::atan2(e * std::sinh(p.lambda * (pt.x - p.xi)), std::cos(p.lambda * pt.y));
}

/// sin(lambda y) - e^{lambda^2 t} cosh(lambda (x - xi)); positive inside the oval.
inline double oval_level(const OvalParams& p, Vec2 pt) {
    return std::sin(p.lambda * pt.y) - p.amplitude() * std::cosh(p.lambda * (pt.x - p.xi));
}

namespace detail {

/// Core of the single-contact formulas. inv_slope = 1 / phi'(x0) < 0 is
/// passed directly so that near-vertical boundaries keep their precision.
inline OvalParams orthogonal_through(double x0, double phi0, double inv_slope, double lambda) {
    if (!(phi0 > 0.0 && inv_slope < 0.0)) {
        throw Error(ErrorKind::LambdaOutOfRange, "contact needs positive height and negative boundary slope");
    }
    const double a = lambda * phi0;
    if (!(a < kPi / 2)) throw Error(ErrorKind::LambdaOutOfRange, "lambda at or above pi/(2 phi)");
    // T = tanh(lambda (x0 - xi)) = -cot(lambda phi0) / phi'(x0)
    const double tt = -inv_slope / std::tan(a);
    if (!(tt < 1.0)) throw Error(ErrorKind::LambdaOutOfRange, "lambda at or below the admissible lower bound");
    OvalParams p;
    p.lambda = lambda;
    // log of sin^2(a) - cos^2(a) / phi'^2 = sin^2(a) (1 - T^2)
    const double log_d = 2.0 * std::log(std::sin(a)) + std::log1p(-tt * tt);
    p.t = log_d / (2.0 * lambda * lambda);
    p.xi = x0 - std::atanh(tt) / lambda;
    return p;
}

}  // namespace detail

/// Oval through (x0, phi0) meeting a boundary of slope phi_slope < 0 orthogonally there.
inline OvalParams single_point_orthogonal(double x0, double phi0, double phi_slope, double lambda) {
    if (!(phi_slope < 0.0)) throw Error(ErrorKind::LambdaOutOfRange, "boundary slope must be negative");
    return detail::orthogonal_through(x0, phi0, 1.0 / phi_slope, lambda);
}

/// Admissible lambda interval for a single orthogonal contact.
inline std::array<double, 2> admissible_lambda(double phi0, double phi_slope) {
    return {std::atan(-1.0 / phi_slope) / phi0, kPi / (2.0 * phi0)};
}

/// f(lambda) whose root gives the xi = -1 configuration.
inline double xi_minus_one_function(double x0, double phi0, double phi_slope, double lambda) {
    const double th = std::tanh(lambda * (x0 + 1.0));
    const double ct = 1.0 / std::tan(lambda * phi0);
    return phi_slope * phi_slope * th * th - ct * ct;
}

/// Oval meeting the upper boundary orthogonally at two points. Contacts are
/// kept as turning-angle offsets from the diameter ends: the right contact
/// sits at pi/2 + delta_right, the left one at 3 pi/2 + s_left (s_left < 0).
struct OrthogonalOval {
    OvalParams params;
    double x0 = 0.0;
    double xhat = 0.0;
    std::array<double, 2> residuals{};
    double rho_cap = 0.0;
    double delta_right = 0.0;
    double s_left = 0.0;
    double theta_right = 0.0;
    double theta_left = 0.0;
    Vec2 p_right{};
    Vec2 p_left{};
};

namespace detail {

struct SecondContact {
    double s = 0.0;
    Vec2 point{};
    double signed_cos = 0.0;
};

/// First crossing of the oval met when climbing the left boundary arc from -e1.
inline SecondContact find_second_contact(const NormalizedDomain& nd, const OvalParams& p) {
    auto level = [&](double s) { return oval_level(p, nd.point_near(3, s)); };
    if (level(-1e-300) > 0.0) throw Error(ErrorKind::NoRoot, "oval already contains the diameter end");
    // Offsets |s| on a geometric grid up to 1e-3, then a uniform grid up to pi/2.
    constexpr int kGeo = 700, kLin = 3000;
    const double lo = std::log(1e-300), mid = std::log(1e-3);
    auto grid = [&](int j) {
        if (j <= kGeo) return -std::exp(lo + (mid - lo) * j / kGeo);
        return -(1e-3 + (kPi / 2 - 1e-3) * (j - kGeo) / kLin);
    };
    double prev_s = -1e-300;
    for (int j = 0; j <= kGeo + kLin; ++j) {
        const double s = grid(j);
        if (level(s) > 0.0) {
            SecondContact sc;
            // Bisect in log |s| so tiny offsets keep their relative precision.
            const double ls = bisect([&](double u) { return level(-std::exp(u)); }, std::log(-prev_s), std::log(-s), 1e-15);
            sc.s = -std::exp(ls);
            sc.point = nd.point_near(3, sc.s);
            const Vec2 tau_oval = unit_at(oval_tangent_angle(p, sc.point));
            sc.signed_cos = dot(tau_oval, ConvexDomain::tangent_q(3, sc.s));
            return sc;
        }
        prev_s = s;
    }
    throw Error(ErrorKind::NoRoot, "oval does not meet the left boundary arc");
}

}  // namespace detail

/// Oval meeting the upper boundary orthogonally at two points below y = rho.
///
/// x0 is fixed from the lambda = pi/(2 rho) configuration whose second
/// contact sits at the branch junction; lambda is then bisected between
/// the xi = -1 configuration and pi/(2 rho) on the second-contact angle.
inline OrthogonalOval construct_orthogonal_oval(const NormalizedDomain& nd, double rho) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
    const double top = nd.point_near(1, kPi / 2).y;
    if (rho >= top) throw Error(ErrorKind::RhoTooLarge, "line y = rho does not meet the boundary twice");

    const double s1 = bisect([&](double s) { return nd.point_near(1, s).y - rho; }, 0.0, kPi / 2, 1e-15);
    const double s_left_rho = bisect([&](double s) { return nd.point_near(3, s).y - rho; }, -kPi / 2, 0.0, 1e-15);
    const double x_left = nd.point_near(3, s_left_rho).x;

    const double lam_cap = kPi / (2.0 * rho);
    // Orthogonal configuration at the right contact pi/2 + delta; 1/phi' = -tan(delta).
    auto config = [&nd](double delta, double lambda) {
        const Vec2 p0 = nd.point_near(1, delta);
        return detail::orthogonal_through(p0.x, p0.y, -std::tan(delta), lambda);
    };
    auto junction_gap = [&](double log_delta) {
        const OvalParams p = config(std::exp(log_delta), lam_cap);
        return p.xi - acosh_reciprocal(p.lambda * p.lambda * p.t) / p.lambda - x_left;
    };

    // x-hat tends to x0 as the contact approaches the crossing of y = rho,
    // and runs off to the left as the contact approaches e1.
    double u_hi = std::log(s1 * (1.0 - 1e-9));
    double gap_hi = 0.0;
    try {
        gap_hi = junction_gap(u_hi);
    } catch (const Error& e) {
        throw Error(ErrorKind::BracketFailure, std::string("right end of the first-contact bracket: ") + e.what());
    }
    double u_lo = std::log(0.5 * s1);
    double gap_lo = gap_hi;
    for (; u_lo > std::log(1e-290); u_lo -= std::log(1e4)) {
        try {
            gap_lo = junction_gap(u_lo);
        } catch (const Error& e) {
            throw Error(ErrorKind::BracketFailure, std::string("left end of the first-contact bracket: ") + e.what());
        }
        if ((gap_lo > 0.0) != (gap_hi > 0.0)) break;
    }
    if ((gap_lo > 0.0) == (gap_hi > 0.0)) {
        throw Error(ErrorKind::BracketFailure, "junction of the lambda = pi/(2 rho) oval never reaches the left crossing");
    }
    const double delta0 = std::exp(bisect(junction_gap, u_lo, u_hi, 1e-14));
    const Vec2 p0 = nd.point_near(1, delta0);

    // xi < -1 exactly when tanh(lambda (x0 + 1)) < T(lambda).
    auto xi_sign = [&](double lambda) {
        const double tt = std::tan(delta0) / std::tan(lambda * p0.y);
        const double th = std::tanh(lambda * (p0.x + 1.0));
        return th * th - tt * tt;
    };
    const double lam_a = delta0 / p0.y;  // atan(-1/phi') / phi0 with -1/phi' = tan(delta0)
    const double lam_top = std::min(kPi / (2.0 * p0.y), lam_cap);
    const double lam_a_in = lam_a * (1.0 + 1e-13);
    if (!(xi_sign(lam_a_in) < 0.0 && xi_sign(lam_top) > 0.0)) {
        throw Error(ErrorKind::BracketFailure, "sign conditions for the xi = -1 configuration fail");
    }
    const double lam_lo = bisect(xi_sign, lam_a_in, lam_top, 1e-15);

    auto residual = [&](double lambda) {
        return detail::find_second_contact(nd, config(delta0, lambda)).signed_cos;
    };
    const double lam_lo_in = lam_lo + 1e-9 * (lam_cap - lam_lo);
    double r_lo = 0.0, r_hi = 0.0;
    try {
        r_lo = residual(lam_lo_in);
        r_hi = residual(lam_cap);
    } catch (const Error& e) {
        throw Error(ErrorKind::BracketFailure, std::string("second contact lost at a bracket end: ") + e.what());
    }
    if ((r_lo > 0.0) == (r_hi > 0.0)) {
        throw Error(ErrorKind::BracketFailure, "second-contact angle residual has equal signs at both bracket ends (" +
                                                   std::to_string(r_lo) + ", " + std::to_string(r_hi) + ")");
    }
    const double lambda = bisect(residual, lam_lo_in, lam_cap, 1e-15);

    OrthogonalOval out;
    out.params = config(delta0, lambda);
    out.rho_cap = rho;
    out.x0 = p0.x;
    out.delta_right = delta0;
    out.p_right = p0;
    out.theta_right = oval_tangent_angle(out.params, p0);
    const auto sc = detail::find_second_contact(nd, out.params);
    out.s_left = sc.s;
    out.p_left = sc.point;
    out.xhat = sc.point.x;
    out.theta_left = oval_tangent_angle(out.params, sc.point);
    out.residuals[0] = std::abs(dot(unit_at(out.theta_right), ConvexDomain::tangent_q(1, delta0)));
    out.residuals[1] = std::abs(sc.signed_cos);
    return out;
}

/// n nodes along the oval from the left contact to the right contact, uniform in arc length.
inline std::vector<Vec2> sample_initial_curve(const OrthogonalOval& oval, int n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two nodes");
    const OvalParams& p = oval.params;
    // theta = eps sinh(w) resolves the narrow angular range of flat ovals.
    const double eps = std::min(1.0, p.amplitude());
    const double wa = std::asinh(oval.theta_left / eps), wb = std::asinh(oval.theta_right / eps);
    auto speed_w = [&](double w) { return oval_speed(p, eps * std::sinh(w)) * eps * std::cosh(w); };
    constexpr int kTable = 4000;
    std::vector<double> ws(kTable + 1), s(kTable + 1, 0.0);
    const GaussLegendre& gl = gauss16();
    for (int j = 0; j <= kTable; ++j) ws[static_cast<std::size_t>(j)] = wa + (wb - wa) * j / kTable;
    for (int j = 1; j <= kTable; ++j) {
        const std::size_t k = static_cast<std::size_t>(j);
        s[k] = s[k - 1] + gl.integrate(speed_w, ws[k - 1], ws[k]);
    }
    std::vector<Vec2> out(static_cast<std::size_t>(n));
    const double total = s.back();
    for (int i = 0; i < n; ++i) {
        const double target = total * i / (n - 1);
        auto it = std::lower_bound(s.begin(), s.end(), target);
        const std::size_t hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - s.begin(), 1, kTable));
        const std::size_t lo = hi - 1;
        double w = ws[lo] + (ws[hi] - ws[lo]) * (target - s[lo]) / (s[hi] - s[lo]);
        for (int k = 0; k < 3; ++k) {
            w -= (s[lo] + gl.integrate(speed_w, ws[lo], w) - target) / speed_w(w);
        }
        out[static_cast<std::size_t>(i)] = oval_point(p, eps * std::sinh(w));
    }
    out.front() = oval.p_left;
    out.back() = oval.p_right;
    return out;
}

/// Positive root of sigma tanh sigma = kappa.
inline double solve_sigma(double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidArgument, "kappa must be positive");
    auto f = [kappa](double s) { return s * std::tanh(s) - kappa; };
    // s tanh s >= s - 1 and s tanh s <= s^2, so the root lies below this bound.
    const double hi = std::max(kappa + 1.0, std::sqrt(kappa) * 2.0);
    return bisect(f, 0.0, hi, 1e-15);
}

inline double lambda0_residual(double lambda, double kappa1, double kappa2) {
    return lambda * lambda - lambda * (kappa1 + kappa2) / std::tanh(2.0 * lambda) + kappa1 * kappa2;
}

/// Root of lambda^2 - lambda (k1 + k2) coth(2 lambda) + k1 k2 above max(k1, k2).
inline double solve_lambda0(double kappa1, double kappa2) {
    if (!(kappa1 > 0.0 && kappa2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "curvatures must be positive");
    const double km = std::max(kappa1, kappa2);
    const double sigma = solve_sigma(km);
    auto g = [=](double l) { return lambda0_residual(l, kappa1, kappa2); };
    const double g_hi = g(sigma);
    if (g_hi <= 0.0) {
        // Symmetric pairs have the root exactly at sigma.
        if (std::abs(g_hi) <= 1e-12 * std::max(1.0, sigma * sigma)) return sigma;
        throw Error(ErrorKind::NoRoot, "lambda0 bracket endpoints have the same sign");
    }
    const double lo = km * (1.0 + 1e-15);
    if (!(g(lo) < 0.0)) throw Error(ErrorKind::NoRoot, "lambda0 bracket endpoints have the same sign");
    return bisect(g, lo, sigma, 1e-15);
}

/// Limiting shift; tanh(lambda0 (1 - xi0)) = kappa1 / lambda0.
inline double xi0(double lambda0, double kappa1) {
    if (!(lambda0 > kappa1)) throw Error(ErrorKind::InvalidScale, "lambda0 must exceed kappa1");
    return 1.0 - std::atanh(kappa1 / lambda0) / lambda0;
}

/// Closed-form sinh coefficient of the limiting profile.
inline double profile_coefficient(double lambda0, double kappa1, double kappa2) {
    return (kappa1 - kappa2) / (2.0 * lambda0 - (kappa1 + kappa2) * std::tanh(lambda0));
}

struct Limits {
    double lambda0 = 0.0;
    double xi0 = 0.0;
    double sigma = 0.0;
};

inline Limits limits(double kappa1, double kappa2) {
    Limits l;
    l.lambda0 = solve_lambda0(kappa1, kappa2);
    l.xi0 = xi0(l.lambda0, kappa1);
    l.sigma = solve_sigma(std::max(kappa1, kappa2));
    return l;
}

}  // namespace fbcsf
