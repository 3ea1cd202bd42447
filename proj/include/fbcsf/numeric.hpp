#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "fbcsf/error.hpp"

namespace fbcsf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

/// Bisection on a sign change. Requires f(lo) and f(hi) of opposite sign
/// (or one of them zero); never widens the bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw Error(ErrorKind::NoRoot, "bisection bracket endpoints have the same sign");
    }
    for (int it = 0; it < max_iter && std::abs(hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Gauss-Legendre rule on [-1, 1] computed by Newton iteration on P_n.
class GaussLegendre {
public:
    explicit GaussLegendre(int n) : nodes_(static_cast<std::size_t>(n)), weights_(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes_[static_cast<std::size_t>(i)] = x;
            weights_[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    /// Composite rule over [a, b] with `panels` equal panels.
    template <class F>
    double integrate(F&& f, double a, double b, int panels = 1) const {
        const double h = (b - a) / panels;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                sum += weights_[i] * f(mid + 0.5 * h * nodes_[i]);
            }
        }
        return 0.5 * h * sum;
    }

    template <class F>
    Vec2 integrate_vec(F&& f, double a, double b, int panels = 1) const {
        const double h = (b - a) / panels;
        Vec2 sum{};
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                sum += weights_[i] * f(mid + 0.5 * h * nodes_[i]);
            }
        }
        return 0.5 * h * sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

inline const GaussLegendre& gauss8() {
    static const GaussLegendre rule(8);
    return rule;
}

inline const GaussLegendre& gauss16() {
    static const GaussLegendre rule(16);
    return rule;
}

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_abs_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope * x with equal weights.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw Error(ErrorKind::WindowTooShort, "line fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(ys[i] - fit.intercept - fit.slope * xs[i]));
    }
    return fit;
}

/// Solves the scalar tridiagonal system a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i in place (Thomas).
inline void solve_tridiagonal(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                              std::span<double> d) {
    const std::size_t n = b.size();
    std::vector<double> cp(n);
    double denom = b[0];
    cp[0] = c[0] / denom;
    d[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = b[i] - a[i] * cp[i - 1];
        cp[i] = (i + 1 < n) ? c[i] / denom : 0.0;
        d[i] = (d[i] - a[i] * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
}

/// Cyclic tridiagonal solve via Sherman-Morrison; a[0] couples to x_{n-1}, c[n-1] to x_0.
inline void solve_cyclic_tridiagonal(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> c, std::span<double> d) {
    const std::size_t n = b.size();
    const double alpha = c[n - 1];
    const double beta = a[0];
    const double gamma = -b[0];
    std::vector<double> bb(b.begin(), b.end());
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;
    std::vector<double> aa(a.begin(), a.end()), cc(c.begin(), c.end());
    aa[0] = 0.0;
    cc[n - 1] = 0.0;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    solve_tridiagonal(aa, bb, cc, d);
    solve_tridiagonal(aa, bb, cc, u);
    const double fact = (d[0] + beta * d[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) d[i] -= fact * u[i];
}

/// Natural cubic spline through (t_i, v_i) with strictly increasing t.
class CubicSpline {
public:
    CubicSpline(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)), m_(t_.size(), 0.0) {
        const std::size_t n = t_.size();
        if (n < 3) return;
        std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t_[i] - t_[i - 1];
            const double h1 = t_[i + 1] - t_[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (v_[i + 1] - v_[i]) / h1 - (v_[i] - v_[i - 1]) / h0;
        }
        solve_tridiagonal(a, b, c, d);
        m_ = std::move(d);
    }

    double operator()(double x) const {
        std::size_t hi = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), x) - t_.begin());
        hi = std::clamp<std::size_t>(hi, 1, t_.size() - 1);
        const std::size_t lo = hi - 1;
        const double h = t_[hi] - t_[lo];
        const double A = (t_[hi] - x) / h;
        const double B = (x - t_[lo]) / h;
        return A * v_[lo] + B * v_[hi] + ((A * A * A - A) * m_[lo] + (B * B * B - B) * m_[hi]) * h * h / 6.0;
    }

private:
    std::vector<double> t_;
    std::vector<double> v_;
    std::vector<double> m_;
};

}  // namespace fbcsf
