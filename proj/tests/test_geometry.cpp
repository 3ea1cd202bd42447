#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fbcsf/geometry.hpp"

using namespace fbcsf;

namespace {

ConvexDomain egg() { return ConvexDomain::from_fourier({1.0, 0.0, 0.2, 0.0}, {0.0, 0.0, 0.0, 0.1}); }

// Shoelace area of a dense boundary sample.
double polygon_area(const ConvexDomain& d, int n) {
    double a = 0.0;
    Vec2 prev = d.point(0.0);
    for (int j = 1; j <= n; ++j) {
        const Vec2 p = d.point(kTwoPi * j / n);
        a += 0.5 * cross(prev, p);
        prev = p;
    }
    return a;
}

}  // namespace

TEST(Geometry, DiskIsTheUnitCircle) {
    const ConvexDomain d = ConvexDomain::disk();
    for (double w : {0.0, 0.7, 2.0, 4.0}) {
        EXPECT_NEAR(norm(d.point(w) - d.point(w + kPi)), 2.0, 1e-13);
        EXPECT_NEAR(d.kappa(w), 1.0, 1e-15);
    }
    EXPECT_NEAR(d.area(), kPi, 1e-12);
    EXPECT_NEAR(d.perimeter(), kTwoPi, 1e-15);
    EXPECT_LT(d.closure_residual(), 1e-12);
}

TEST(Geometry, EllipseMatchesImplicitEquation) {
    const ConvexDomain e = ConvexDomain::ellipse(2.0, 1.0);
    // Center from the two ends of the major axis.
    const Vec2 c = 0.5 * (e.point(kPi / 2) + e.point(3 * kPi / 2));
    for (int j = 0; j < 50; ++j) {
        const Vec2 p = e.point(kTwoPi * j / 50) - c;
        EXPECT_NEAR(p.x * p.x / 4.0 + p.y * p.y, 1.0, 1e-9);
    }
    EXPECT_NEAR(e.area(), 2.0 * kPi, 1e-9);
    // Perimeter against the parametric arc length integral.
    const double perim = gauss16().integrate(
        [](double t) { return std::sqrt(4.0 * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t)); }, 0.0, kTwoPi, 64);
    EXPECT_NEAR(e.perimeter(), perim, 1e-9);
    EXPECT_NEAR(e.kappa_max(), 2.0, 1e-8);
    EXPECT_NEAR(e.kappa_min(), 0.25, 1e-8);
}

TEST(Geometry, FirstHarmonicIsRejected) {
    try {
        (void)ConvexDomain::from_fourier({1.0, 0.1}, {0.0, 0.0});
        FAIL() << "expected NonClosing";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonClosing);
    }
}

TEST(Geometry, RandomDomainsCloseAndAreasAgree) {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(-0.04, 0.04);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> c{1.0, 0.0}, s{0.0, 0.0};
        for (int k = 2; k <= 5; ++k) {
            c.push_back(u(gen));
            s.push_back(u(gen));
        }
        const ConvexDomain d = ConvexDomain::from_fourier(c, s);
        EXPECT_LT(d.closure_residual(), 1e-12);
        EXPECT_GT(d.kappa_min(), 0.0);
        EXPECT_NEAR(d.area(), polygon_area(d, 20000), 1e-6);
    }
}

TEST(Geometry, EllipseHasTwoDiameters) {
    const DiameterSearch found = find_diameters(ConvexDomain::ellipse(2.0, 1.0));
    EXPECT_FALSE(found.degenerate);
    ASSERT_EQ(found.diameters.size(), 2u);
    EXPECT_NEAR(found.diameters[0].length, 4.0, 1e-9);
    EXPECT_NEAR(found.diameters[1].length, 2.0, 1e-9);
}

TEST(Geometry, DiskDiameterSearchIsDegenerate) {
    const DiameterSearch found = find_diameters(ConvexDomain::disk());
    EXPECT_TRUE(found.degenerate);
    ASSERT_EQ(found.diameters.size(), 1u);
    EXPECT_NEAR(found.diameters[0].omega_plus, kPi / 2, 1e-15);
}

TEST(Geometry, EggDiametersAreDoubleNormals) {
    const ConvexDomain d = egg();
    const DiameterSearch found = find_diameters(d);
    ASSERT_GE(found.diameters.size(), 1u);
    for (const Diameter& dia : found.diameters) {
        const Vec2 chord = normalized(dia.p_plus - dia.p_minus);
        // The chord is normal to the boundary at both ends.
        EXPECT_LT(std::abs(cross(chord, ConvexDomain::normal(dia.omega_plus))), 1e-10);
        EXPECT_LT(std::abs(cross(chord, ConvexDomain::normal(dia.omega_minus))), 1e-10);
    }
    for (std::size_t i = 1; i < found.diameters.size(); ++i) {
        EXPECT_GE(found.diameters[i - 1].length, found.diameters[i].length);
    }
}

TEST(Geometry, NormalizationPinsTheDiameter) {
    const ConvexDomain d = egg();
    const Diameter dia = find_diameters(d).diameters.front();
    const NormalizedDomain nd = normalize(d, dia);
    EXPECT_NEAR(nd.domain.point(kPi / 2).x, 1.0, 1e-12);
    EXPECT_NEAR(nd.domain.point(kPi / 2).y, 0.0, 1e-12);
    EXPECT_NEAR(nd.domain.point(3 * kPi / 2).x, -1.0, 1e-12);
    EXPECT_NEAR(nd.domain.point(3 * kPi / 2).y, 0.0, 1e-12);
    // Curvature scales with the length: the chord becomes length 2.
    EXPECT_NEAR(nd.kappa1, d.kappa(dia.omega_plus) * dia.length / 2.0, 1e-10);
    EXPECT_NEAR(nd.kappa2, d.kappa(dia.omega_minus) * dia.length / 2.0, 1e-10);
    // Upper arc lies above the diameter.
    for (double w = kPi / 2 + 0.05; w < 3 * kPi / 2; w += 0.1) EXPECT_GT(nd.domain.point(w).y, 0.0);
}

TEST(Geometry, EllipseAxesNormalizeToKnownCurvatures) {
    const ConvexDomain e = ConvexDomain::ellipse(2.0, 1.0);
    const DiameterSearch found = find_diameters(e);
    const NormalizedDomain major = normalize(e, found.diameters[0]);
    const NormalizedDomain minor = normalize(e, found.diameters[1]);
    // Vertex curvatures a/b^2 and b/a^2 times the half-length of the axis.
    EXPECT_NEAR(major.kappa1, 4.0, 1e-8);
    EXPECT_NEAR(major.kappa2, 4.0, 1e-8);
    EXPECT_NEAR(minor.kappa1, 0.25, 1e-8);
    EXPECT_NEAR(minor.kappa2, 0.25, 1e-8);
}

TEST(Geometry, OffsetsAgreeWithPointDifferences) {
    const NormalizedDomain nd = normalize(egg());
    for (int q : {1, 3}) {
        for (double s : {-0.3, -0.004, 1e-6, 0.002, 0.05, 0.4}) {
            const Vec2 ref = nd.domain.point(q * kPi / 2 + s) - nd.domain.point(q * kPi / 2);
            const Vec2 a = nd.offset(q, s);
            const Vec2 b = nd.domain.increment(q, s);
            EXPECT_NEAR(a.x, ref.x, 1e-13);
            EXPECT_NEAR(a.y, ref.y, 1e-13);
            EXPECT_NEAR(b.x, ref.x, 1e-13);
            EXPECT_NEAR(b.y, ref.y, 1e-13);
        }
    }
    // Small offsets keep relative precision: |offset| ~ rho(pi/2) |s|.
    const double s = 1e-12;
    EXPECT_NEAR(norm(nd.offset(1, s)), s / nd.kappa1, 1e-24);
}

TEST(Geometry, ChordAreaOfDiskQuarter) {
    const NormalizedDomain nd = normalize(ConvexDomain::disk());
    EXPECT_NEAR(chord_area(nd, 0.0), kPi / 4 - 0.5, 1e-13);
    EXPECT_NEAR(chord_area_inf(nd), kPi / 4 - 0.5, 1e-12);
}

TEST(Geometry, ReflectionMirrorsTheBoundary) {
    const NormalizedDomain nd = normalize(egg());
    const NormalizedDomain r = reflect(nd);
    for (double w : {0.3, 1.2, 2.5, 4.0, 5.5}) {
        const Vec2 p = nd.domain.point(w);
        const Vec2 q = r.domain.point(kPi - w);
        EXPECT_NEAR(q.x, p.x, 1e-12);
        EXPECT_NEAR(q.y, -p.y, 1e-12);
    }
    EXPECT_NEAR(r.kappa1, nd.kappa1, 1e-12);
    EXPECT_NEAR(r.kappa2, nd.kappa2, 1e-12);
}
