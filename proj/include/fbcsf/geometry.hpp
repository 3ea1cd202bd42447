#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fbcsf/error.hpp"
#include "fbcsf/numeric.hpp"

namespace fbcsf {

/// Strictly convex body described by its radius of curvature rho(omega),
/// omega being the turning angle of the counter-clockwise unit tangent.
///
/// rho is a truncated Fourier series without first harmonic, so the
/// boundary closes exactly; Phi is integrated term by term.
class ConvexDomain {
public:
    ConvexDomain() = default;

    /// cos_coeffs[k], sin_coeffs[k] multiply cos(k w), sin(k w). Index 1 must be (numerically) zero.
    static ConvexDomain from_fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                                     Vec2 offset = {}) {
        const std::size_t n = std::max<std::size_t>({cos_coeffs.size(), sin_coeffs.size(), 1});
        cos_coeffs.resize(n, 0.0);
        sin_coeffs.resize(n, 0.0);
        sin_coeffs[0] = 0.0;
        if (n > 1) {
            const double closure = kPi * std::hypot(cos_coeffs[1], sin_coeffs[1]);
            if (closure > 1e-10) {
                throw Error(ErrorKind::NonClosing, "first harmonic of rho gives closure residual " + std::to_string(closure));
            }
            cos_coeffs[1] = 0.0;
            sin_coeffs[1] = 0.0;
        }
        ConvexDomain d;
        d.c_ = std::move(cos_coeffs);
        d.s_ = std::move(sin_coeffs);
        d.offset_ = offset;
        d.finish();
        return d;
    }

    /// Resamples a periodic table rho(2 pi j / N) by a discrete Fourier transform.
    static ConvexDomain from_samples(std::span<const double> rho, double trim = 1e-15) {
        const std::size_t n = rho.size();
        if (n < 8) throw Error(ErrorKind::InvalidArgument, "rho table needs at least 8 samples");
        const std::size_t kmax = n / 2 - 1;
        std::vector<double> c(kmax + 1, 0.0), s(kmax + 1, 0.0);
        for (std::size_t k = 0; k <= kmax; ++k) {
            double ck = 0.0, sk = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double a = kTwoPi * static_cast<double>((k * j) % n) / static_cast<double>(n);
                ck += rho[j] * std::cos(a);
                sk += rho[j] * std::sin(a);
            }
            const double scale = (k == 0 ? 1.0 : 2.0) / static_cast<double>(n);
            c[k] = ck * scale;
            s[k] = sk * scale;
        }
        std::size_t keep = kmax + 1;
        while (keep > 2 && std::abs(c[keep - 1]) < trim * std::abs(c[0]) && std::abs(s[keep - 1]) < trim * std::abs(c[0])) {
            --keep;
        }
        c.resize(keep);
        s.resize(keep);
        return from_fourier(std::move(c), std::move(s));
    }

    static ConvexDomain disk(double radius = 1.0) { return from_fourier({radius}, {0.0}); }

    /// Centered ellipse with semi-axes a (along x) and b (along y).
    static ConvexDomain ellipse(double a, double b, std::size_t samples = 2048) {
        if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::InvalidArgument, "ellipse semi-axes must be positive");
        std::vector<double> table(samples);
        for (std::size_t j = 0; j < samples; ++j) {
            const double w = kTwoPi * static_cast<double>(j) / static_cast<double>(samples);
            const double q = a * a * std::sin(w) * std::sin(w) + b * b * std::cos(w) * std::cos(w);
            table[j] = a * a * b * b / (q * std::sqrt(q));
        }
        ConvexDomain d = from_samples(table);
        // Pin Phi(0) to the lower co-vertex so the ellipse is centered.
        d.offset_ = Vec2{0.0, -b} - d.raw_point(0.0);
        return d;
    }

    double rho(double w) const {
        double r = c_[0];
        if (c_.size() <= 2) return r;
        // cos(kw), sin(kw) by repeated rotation; drift stays near k ulps for the orders used here
        const double c1 = std::cos(w), s1 = std::sin(w);
        double ck = c1 * c1 - s1 * s1, sk = 2.0 * s1 * c1;
        for (std::size_t k = 2; k < c_.size(); ++k) {
            r += c_[k] * ck + s_[k] * sk;
            const double cn = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = cn;
        }
        return r;
    }

    double rho_prime(double w) const {
        double r = 0.0;
        if (c_.size() <= 2) return r;
        const double c1 = std::cos(w), s1 = std::sin(w);
        double ck = c1 * c1 - s1 * s1, sk = 2.0 * s1 * c1;
        for (std::size_t k = 2; k < c_.size(); ++k) {
            r += static_cast<double>(k) * (s_[k] * ck - c_[k] * sk);
            const double cn = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = cn;
        }
        return r;
    }

    double kappa(double w) const { return 1.0 / rho(w); }

    Vec2 point(double w) const { return offset_ + raw_point(w); }
    static Vec2 tangent(double w) { return {std::cos(w), std::sin(w)}; }
    static Vec2 normal(double w) { return {std::sin(w), -std::cos(w)}; }

    /// Tangent at angle q pi/2 + s with the quarter turns applied exactly.
    static Vec2 tangent_q(int q, double s) {
        const double c = std::cos(s), sn = std::sin(s);
        switch (((q % 4) + 4) % 4) {
        case 0: return {c, sn};
        case 1: return {-sn, c};
        case 2: return {-c, -sn};
        default: return {sn, -c};
        }
    }
    static Vec2 normal_q(int q, double s) {
        const Vec2 t = tangent_q(q, s);
        return {t.y, -t.x};
    }

    /// Integral of rho tau from q pi/2 to q pi/2 + s; keeps full relative
    /// precision for tiny s where differences of point() would cancel.
    Vec2 increment(int q, double s) const {
        if (s == 0.0) return {};
        const double base = q * (kPi / 2);
        const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(s) / 0.1)));
        return gauss16().integrate_vec([&](double u) { return rho(base + u) * tangent_q(q, u); }, 0.0, s, panels);
    }

    double perimeter() const { return kTwoPi * c_[0]; }
    double kappa_min() const { return kappa_min_; }
    double kappa_max() const { return kappa_max_; }
    double rho_min() const { return 1.0 / kappa_max_; }

    /// Area of the enclosed region.
    double area() const {
        // 1/2 of the integral of the support function times rho.
        return 0.5 * gauss16().integrate([this](double u) { return dot(point(u), normal(u)) * rho(u); }, 0.0, kTwoPi, 64);
    }

    /// Support function h(w) = <Phi(w), nu(w)>.
    double support(double w) const { return dot(point(w), normal(w)); }

    /// Magnitude of the closing integral evaluated by quadrature.
    double closure_residual() const {
        const Vec2 v = gauss16().integrate_vec([this](double u) { return rho(u) * tangent(u); }, 0.0, kTwoPi, 256);
        return norm(v);
    }

    const std::vector<double>& cos_coeffs() const { return c_; }
    const std::vector<double>& sin_coeffs() const { return s_; }
    Vec2 offset() const { return offset_; }

    /// Image under p -> scale * R(alpha) * (p - center).
    ConvexDomain similarity(double alpha, double scale, Vec2 center) const {
        if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "similarity scale must be positive");
        std::vector<double> c(c_.size()), s(s_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) {
            const double ka = static_cast<double>(k) * alpha;
            c[k] = scale * (c_[k] * std::cos(ka) - s_[k] * std::sin(ka));
            s[k] = scale * (c_[k] * std::sin(ka) + s_[k] * std::cos(ka));
        }
        ConvexDomain d = from_fourier(std::move(c), std::move(s));
        const Vec2 p = point(0.0) - center;
        const Vec2 img = scale * Vec2{std::cos(alpha) * p.x - std::sin(alpha) * p.y, std::sin(alpha) * p.x + std::cos(alpha) * p.y};
        d.offset_ = img - d.raw_point(alpha);
        return d;
    }

    /// Mirror image under (x, y) -> (x, -y).
    ConvexDomain reflected() const {
        std::vector<double> c(c_.size()), s(s_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            c[k] = sign * c_[k];
            s[k] = -sign * s_[k];
        }
        ConvexDomain d = from_fourier(std::move(c), std::move(s));
        const Vec2 p = point(0.0);
        d.offset_ = Vec2{p.x, -p.y} - d.raw_point(kPi);
        return d;
    }

private:
    Vec2 raw_point(double w) const {
        using C = std::complex<double>;
        const C i(0.0, 1.0);
        C f = -i * c_[0] * std::exp(i * w);
        for (std::size_t k = 2; k < c_.size(); ++k) {
            if (c_[k] == 0.0 && s_[k] == 0.0) continue;
            const double kp = static_cast<double>(k) + 1.0;
            const double km = static_cast<double>(k) - 1.0;
            const C up = std::exp(i * (kp * w));
            const C dn = std::exp(-i * (km * w));
            f += c_[k] * 0.5 * (up / (i * kp) - dn / (i * km));
            f += -s_[k] * 0.5 * (up / kp + dn / km);
        }
        return {f.real(), f.imag()};
    }

    void finish() {
        double rmin = 1e300, rmax = -1e300;
        constexpr int kGrid = 4096;
        for (int j = 0; j < kGrid; ++j) {
            const double r = rho(kTwoPi * j / kGrid);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        if (!(rmin > 0.0)) throw Error(ErrorKind::NonConvex, "radius of curvature is not positive everywhere");
        kappa_min_ = 1.0 / rmax;
        kappa_max_ = 1.0 / rmin;
    }

    std::vector<double> c_{1.0};
    std::vector<double> s_{0.0};
    Vec2 offset_{};
    double kappa_min_ = 1.0;
    double kappa_max_ = 1.0;
};

/// Chord meeting the boundary orthogonally at both ends.
struct Diameter {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    Vec2 p_plus{};
    Vec2 p_minus{};
    double length = 0.0;
};

struct DiameterSearch {
    std::vector<Diameter> diameters;
    bool degenerate = false;
};

/// Double-normal residual <Phi(w + pi) - Phi(w), tau(w)>; pi-periodic.
inline double double_normal_residual(const ConvexDomain& d, double w) {
    return dot(d.point(w + kPi) - d.point(w), ConvexDomain::tangent(w));
}

inline Diameter make_diameter(const ConvexDomain& d, double w) {
    Diameter out;
    out.omega_plus = w;
    out.omega_minus = w + kPi;
    out.p_plus = d.point(out.omega_plus);
    out.p_minus = d.point(out.omega_minus);
    out.length = norm(out.p_plus - out.p_minus);
    return out;
}

/// All isolated double normals, longest first. A disk-like domain is flagged
/// degenerate and gets the single representative at w = pi/2.
inline DiameterSearch find_diameters(const ConvexDomain& d, int grid = 2048) {
    DiameterSearch result;
    std::vector<double> g(static_cast<std::size_t>(grid) + 1);
    const double shift = 1e-3 / grid;
    double gmax = 0.0;
    for (int j = 0; j <= grid; ++j) {
        g[static_cast<std::size_t>(j)] = double_normal_residual(d, shift + kPi * j / grid);
        gmax = std::max(gmax, std::abs(g[static_cast<std::size_t>(j)]));
    }
    if (gmax < 1e-10 * std::max(1.0, d.perimeter())) {
        result.degenerate = true;
        result.diameters.push_back(make_diameter(d, kPi / 2));
        return result;
    }
    std::vector<double> roots;
    auto f = [&d](double w) { return double_normal_residual(d, w); };
    for (int j = 0; j < grid; ++j) {
        const double a = shift + kPi * j / grid;
        const double b = shift + kPi * (j + 1) / grid;
        const double ga = g[static_cast<std::size_t>(j)];
        const double gb = g[static_cast<std::size_t>(j) + 1];
        if (ga == 0.0) {
            roots.push_back(a);
        } else if ((ga > 0.0) != (gb > 0.0) && gb != 0.0) {
            roots.push_back(bisect(f, a, b, 1e-13));
        }
    }
    std::vector<double> merged;
    for (double r : roots) {
        r = std::fmod(r, kPi);
        bool dup = false;
        for (double m : merged) {
            const double diff = std::abs(r - m);
            if (std::min(diff, kPi - diff) < 1e-6) dup = true;
        }
        if (!dup) merged.push_back(r);
    }
    for (double r : merged) result.diameters.push_back(make_diameter(d, r));
    std::sort(result.diameters.begin(), result.diameters.end(),
              [](const Diameter& a, const Diameter& b) { return a.length > b.length; });
    return result;
}

struct Similarity {
    double alpha = 0.0;
    double scale = 1.0;
    Vec2 center{};

    Vec2 apply(Vec2 p) const {
        const Vec2 q = p - center;
        return scale * Vec2{std::cos(alpha) * q.x - std::sin(alpha) * q.y, std::sin(alpha) * q.x + std::cos(alpha) * q.y};
    }
};

/// Domain positioned so the chosen diameter is [-1, 1] x {0}, with
/// Phi(pi/2) = e1 and Phi(3 pi/2) = -e1.
struct NormalizedDomain {
    ConvexDomain domain;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    Similarity transform;

    /// Diameter endpoint e1 (q = 1) or -e1 (q = 3), exact by convention.
    static Vec2 anchor(int q) { return q == 1 ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0}; }

    /// Boundary point at turning angle q pi/2 + s measured from the anchor.
    Vec2 point_near(int q, double s) const { return anchor(q) + domain.increment(q, s); }

    /// Same offset as point_near but cheap: one quadrature panel for small s,
    /// the closed-form point otherwise.
    Vec2 offset(int q, double s) const {
        if (std::abs(s) < 1e-2) {
            const double base = q * (kPi / 2);
            return gauss8().integrate_vec([&](double u) { return domain.rho(base + u) * ConvexDomain::tangent_q(q, u); },
                                          0.0, s);
        }
        return domain.point(q * (kPi / 2) + s) - domain.point(q * (kPi / 2));
    }
};

inline NormalizedDomain normalize(const ConvexDomain& d, const Diameter& dia) {
    NormalizedDomain out;
    out.transform.alpha = kPi / 2 - dia.omega_plus;
    out.transform.scale = 2.0 / dia.length;
    out.transform.center = 0.5 * (dia.p_plus + dia.p_minus);
    out.domain = d.similarity(out.transform.alpha, out.transform.scale, out.transform.center);
    out.kappa1 = out.domain.kappa(kPi / 2);
    out.kappa2 = out.domain.kappa(3 * kPi / 2);
    return out;
}

/// Normalizes on the longest diameter (the representative one for a disk).
inline NormalizedDomain normalize(const ConvexDomain& d) {
    return normalize(d, find_diameters(d).diameters.front());
}

inline NormalizedDomain reflect(const NormalizedDomain& nd) {
    NormalizedDomain out = nd;
    out.domain = nd.domain.reflected();
    out.kappa1 = out.domain.kappa(kPi / 2);
    out.kappa2 = out.domain.kappa(3 * kPi / 2);
    return out;
}

/// Area cut off by the chord from Phi(pi/2 + theta) to Phi(pi + theta).
inline double chord_area(const NormalizedDomain& nd, double theta) {
    const ConvexDomain& d = nd.domain;
    const double a = kPi / 2 + theta;
    const double b = kPi + theta;
    const double arc = 0.5 * gauss16().integrate([&d](double u) { return d.support(u) * d.rho(u); }, a, b, 16);
    const Vec2 p1 = d.point(a);
    const Vec2 p2 = d.point(b);
    return arc + 0.5 * cross(p2, p1);
}

/// Infimum of chord_area over theta in [0, pi/2], by a grid scan refined with golden-section search.
inline double chord_area_inf(const NormalizedDomain& nd, int grid = 256) {
    double best = 1e300;
    int jbest = 0;
    for (int j = 0; j <= grid; ++j) {
        const double v = chord_area(nd, 0.5 * kPi * j / grid);
        if (v < best) { best = v; jbest = j; }
    }
    double lo = 0.5 * kPi * std::max(0, jbest - 1) / grid;
    double hi = 0.5 * kPi * std::min(grid, jbest + 1) / grid;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - gr * (hi - lo);
        const double m2 = lo + gr * (hi - lo);
        if (chord_area(nd, m1) < chord_area(nd, m2)) hi = m2; else lo = m1;
    }
    return std::min(best, chord_area(nd, 0.5 * (lo + hi)));
}

}  // namespace fbcsf
