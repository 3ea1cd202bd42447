#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fbcsf/barrier.hpp"
#include "fbcsf/oval.hpp"

using namespace fbcsf;

TEST(Barrier, UnitArcMeetsTheUnitCircleOrthogonally) {
    for (double w : {0.05, 0.4, kPi / 4, 1.2, 1.5}) {
        const DiskArc a = unit_disk_arc(w);
        // Two circles are orthogonal iff |c1 - c2|^2 = R1^2 + R2^2.
        EXPECT_NEAR(dot(a.center, a.center), 1.0 + a.radius * a.radius, 1e-12 * dot(a.center, a.center));
        for (int side : {1, -1}) EXPECT_NEAR(norm(a.endpoint(side)), 1.0, 1e-12);
        EXPECT_LT(unit_arc_orthogonality(a), 1e-12);
        EXPECT_NEAR(a.point(0.0).y, std::tan(w / 2), 1e-12);
    }
    EXPECT_THROW(unit_disk_arc(0.0), Error);
    EXPECT_THROW(unit_disk_arc(kPi / 2), Error);
}

TEST(Barrier, ScaledArcsAreOrthogonalToTheSmallCircles) {
    const BarrierConfig cfg{0.25};
    for (double t : {-1.0, -0.01, -1e-4}) {
        const BarrierCurve b = barrier_at(t, cfg);
        ASSERT_FALSE(b.degenerate);
        for (const auto& [big, small] : {std::pair{b.arc_plus, cfg.plus()}, std::pair{b.arc_minus, cfg.minus()}}) {
            const Vec2 d = big.center - small.center;
            EXPECT_NEAR(dot(d, d), big.radius * big.radius + small.radius * small.radius, 1e-10 * dot(d, d));
        }
        EXPECT_LT(endpoint_orthogonality(b), 1e-10);
        EXPECT_NEAR(b.max_height, cfg.r * std::exp(2.0 * t / (cfg.r * cfg.r)), 1e-15);
        EXPECT_NEAR(*b.height(0.0), b.max_height, 1e-15);
        EXPECT_NEAR(*b.height(1.0 - cfg.r), b.min_height, 1e-14);
    }
}

TEST(Barrier, HeightIsContinuousAcrossTheJunctions) {
    const BarrierCurve b = barrier_at(-0.003, BarrierConfig{0.25});
    for (double xj : {b.segment_left.x, b.segment_right.x}) {
        EXPECT_NEAR(*b.height(xj - 1e-12), *b.height(xj + 1e-12), 1e-10);
    }
    EXPECT_FALSE(b.height(b.x_max() + 1e-9).has_value());
}

TEST(Barrier, TangencyTimeGivesTheRequestedHeight) {
    for (double rho : {0.2, 0.1, 0.05}) {
        const double t = barrier_time_for_height(rho, 0.25);
        EXPECT_NEAR(barrier_at(t, BarrierConfig{0.25}).min_height, rho, 1e-13);
    }
    try {
        (void)barrier_time_for_height(0.3, 0.25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RhoTooLarge);
    }
}

TEST(Barrier, NonNegativeTimesAreRejectedAndTinyArcsDegenerate) {
    EXPECT_THROW(barrier_at(0.0, BarrierConfig{0.25}), Error);
    const BarrierCurve b = barrier_at(-1e3, BarrierConfig{0.25});
    EXPECT_TRUE(b.degenerate);
    EXPECT_EQ(*b.height(0.3), 0.0);
}

TEST(Barrier, SupersolutionResidualIsNonNegative) {
    std::vector<double> ts, us;
    for (int i = 1; i <= 40; ++i) ts.push_back(-0.0625 * i / 10.0);
    for (int j = -10; j <= 10; ++j) us.push_back(j / 10.0);
    EXPECT_GE(supersolution_residual(0.25, ts, us), -1e-6);
    // Closed form: tan w (1 + cos^2 w - 2 cos w cos a) / sin^2 w >= tan w (1 - cos w)^2 / sin^2 w.
    for (double w = 0.05; w < 1.55; w += 0.1) {
        for (double u = -1.0; u <= 1.0; u += 0.25) {
            const double c = std::cos(w);
            EXPECT_GE(supersolution_residual_exact(w, u * w), std::tan(w) * (1 - c) * (1 - c) / std::pow(std::sin(w), 2) - 1e-14);
        }
    }
}

TEST(Barrier, FiniteDifferenceResidualMatchesClosedForm) {
    const double r = 0.25;
    for (double t : {-0.05, -0.01}) {
        const double w = barrier_omega(t / (r * r));
        for (double u : {-0.7, 0.0, 0.5}) {
            const std::vector<double> ts{t}, us{u};
            const double fd = supersolution_residual(r, ts, us);
            // Distances and curvatures of the scaled family carry a factor 1/r.
            const double exact = supersolution_residual_exact(w, u * w) / r;
            EXPECT_NEAR(fd, exact, 1e-5 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST(Barrier, CrossingsWithALineAreClassified) {
    const Circle c = BarrierConfig{0.25}.minus();
    const std::vector<Vec2> above{{-2.0, 0.1}, {2.0, 0.1}};
    const auto hits = acute_intersection(above, c);
    ASSERT_EQ(hits.size(), 2u);
    for (const auto& h : hits) {
        EXPECT_EQ(h.kind, Crossing::Acute);
        EXPECT_NEAR(norm(h.point - c.center), c.radius, 1e-14);
    }
    const std::vector<Vec2> below{{-2.0, -0.1}, {2.0, -0.1}};
    for (const auto& h : acute_intersection(below, c)) EXPECT_EQ(h.kind, Crossing::NonAcute);
    const std::vector<Vec2> through{{-2.0, 0.0}, {2.0, 0.0}};
    for (const auto& h : acute_intersection(through, c)) EXPECT_EQ(h.kind, Crossing::Orthogonal);
    const std::vector<Vec2> tangent{{-2.0, 0.25}, {2.0, 0.25}};
    try {
        (void)acute_intersection(tangent, c);
        FAIL() << "expected TangentialContact";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TangentialContact);
    }
}

TEST(Barrier, ComparisonAgainstDiameterAndItself) {
    const BarrierCurve b = barrier_at(-0.00625, BarrierConfig{0.25});
    std::vector<Vec2> diam;
    for (int i = 0; i <= 80; ++i) diam.push_back({-1.0 + 0.025 * i, 0.0});
    const auto cmp = below_barrier(diam, b);
    EXPECT_TRUE(cmp.below);
    EXPECT_NEAR(cmp.margin, b.min_height, 1e-14);

    std::vector<Vec2> self, lifted;
    for (int i = 0; i <= 500; ++i) {
        const double x = b.x_min() + (b.x_max() - b.x_min()) * i / 500;
        self.push_back({x, *b.height(x)});
        lifted.push_back({x, *b.height(x) + 1e-6});
    }
    EXPECT_TRUE(below_barrier(self, b).below);
    EXPECT_GE(below_barrier(self, b).margin, -1e-12);
    EXPECT_FALSE(below_barrier(lifted, b).below);
}

TEST(Barrier, AdmissibleRadiusFitsTheCircles) {
    EXPECT_NEAR(admissible_radius(normalize(ConvexDomain::disk())).r, 0.25, 1e-15);
    const NormalizedDomain egg = normalize(ConvexDomain::from_fourier({1.0, 0.0, 0.2, 0.0}, {0.0, 0.0, 0.0, 0.1}));
    const BarrierConfig cfg = admissible_radius(egg);
    EXPECT_LE(4.0 * cfg.r, egg.domain.kappa_min() + 1e-15);
    EXPECT_LE(cfg.r, 1.0 / (4.0 * egg.domain.kappa_max()) + 1e-15);
    // Independent containment check: every boundary point is at least r from the centers.
    for (const Circle& c : {cfg.plus(), cfg.minus()}) {
        for (int j = 0; j < 4000; ++j) {
            EXPECT_GE(norm(egg.domain.point(kTwoPi * j / 4000) - c.center), c.radius - 1e-9);
        }
    }
}

TEST(Barrier, InitialOvalStartsBelowItsBarrier) {
    const NormalizedDomain nd = normalize(ConvexDomain::disk());
    const BarrierConfig cfg = admissible_radius(nd);
    for (double rho : {0.2, 0.1}) {
        const auto curve = sample_initial_curve(construct_orthogonal_oval(nd, rho), 200);
        const auto cmp = below_barrier(curve, barrier_at(barrier_time_for_height(rho, cfg.r), cfg));
        EXPECT_TRUE(cmp.below);
        EXPECT_GT(cmp.margin, 0.0);
    }
}
