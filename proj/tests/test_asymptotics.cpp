#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fbcsf/asymptotics.hpp"

using namespace fbcsf;

namespace {

SolverConfig small_config() {
    SolverConfig c;
    c.n_nodes = 64;
    return c;
}

const NormalizedDomain& disk() {
    static const NormalizedDomain nd = normalize(ConvexDomain::disk());
    return nd;
}

const NormalizedDomain& egg() {
    static const NormalizedDomain nd = normalize(ConvexDomain::from_fourier({1.0, 0.0, 0.2, 0.0}, {0.0, 0.0, 0.0, 0.1}));
    return nd;
}

const Trajectory& disk_run() {
    static const Trajectory t = old_but_not_ancient(disk(), 0.2, small_config());
    return t;
}

const Trajectory& egg_run() {
    static const Trajectory t = old_but_not_ancient(egg(), 0.1, small_config());
    return t;
}

// Rayleigh quotient from the weak form: int phi'^2 - k1 phi(1)^2 - k2 phi(-1)^2 over int phi^2.
double rayleigh(const EigenPair& p, double k1, double k2) {
    const auto& g = gauss16();
    const double num = g.integrate([&](double x) { return p.derivative(x) * p.derivative(x); }, -1.0, 1.0, 64) -
                       k1 * p.value(1.0) * p.value(1.0) - k2 * p.value(-1.0) * p.value(-1.0);
    const double den = g.integrate([&](double x) { return p.value(x) * p.value(x); }, -1.0, 1.0, 64);
    return num / den;
}

int sign_changes(const EigenPair& p) {
    int n = 0;
    double prev = p.value(-1.0);
    for (int j = 1; j <= 4000; ++j) {
        const double v = p.value(-1.0 + 2.0 * j / 4000);
        if ((v > 0.0) != (prev > 0.0) && std::abs(v) > 1e-12) ++n;
        if (std::abs(v) > 1e-12) prev = v;
    }
    return n;
}

}  // namespace

TEST(Eigen, OneConvexNegativeModeAtMinusLambda0Squared) {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (int i = 0; i < 20; ++i) {
        const double k1 = u(gen), k2 = u(gen);
        const EigenResult e = robin_eigen(k1, k2, 4);
        ASSERT_EQ(e.convex_negative_count(), 1) << k1 << " " << k2;
        const double l0 = solve_lambda0(k1, k2);
        for (const auto& p : e.negative) {
            if (p.convex) {
                EXPECT_NEAR(p.mu, -l0 * l0, 1e-10);
            }
            EXPECT_LT(p.ode_residual, 1e-10);
            EXPECT_LT(p.bc_residual, 1e-10);
        }
        for (const auto& p : e.positive) {
            EXPECT_LT(p.ode_residual, 1e-10);
            EXPECT_LT(p.bc_residual, 1e-10);
        }
    }
}

TEST(Eigen, RayleighQuotientsAndOscillationCount) {
    const double k1 = 1.0, k2 = 0.5;
    const EigenResult e = robin_eigen(k1, k2, 5);
    std::vector<EigenPair> all = e.negative;
    all.insert(all.end(), e.positive.begin(), e.positive.end());
    std::sort(all.begin(), all.end(), [](const EigenPair& a, const EigenPair& b) { return a.mu < b.mu; });
    ASSERT_EQ(all.size(), 6u);
    for (std::size_t j = 0; j < all.size(); ++j) {
        EXPECT_NEAR(rayleigh(all[j], k1, k2), all[j].mu, 1e-9 * std::max(1.0, std::abs(all[j].mu)));
        // The j-th eigenfunction has exactly j interior zeros.
        EXPECT_EQ(sign_changes(all[j]), static_cast<int>(j));
    }
    // Self-adjointness: distinct eigenfunctions are L2-orthogonal.
    const double ip = gauss16().integrate([&](double x) { return all[0].value(x) * all[2].value(x); }, -1.0, 1.0, 64);
    EXPECT_NEAR(ip, 0.0, 1e-12);
}

TEST(Eigen, SymmetricLargeCurvatureHasAnOddNegativeMode) {
    // s tanh s = 3 (even) and s coth s = 3 (odd): two negative modes, only the even one convex.
    const EigenResult e = robin_eigen(3.0, 3.0, 2);
    ASSERT_EQ(e.negative.size(), 2u);
    EXPECT_EQ(e.convex_negative_count(), 1);
    for (const auto& p : e.negative) {
        const double s = p.frequency;
        const double lhs = p.convex ? s * std::tanh(s) : s / std::tanh(s);
        EXPECT_NEAR(lhs, 3.0, 1e-12);
    }
}

TEST(Eigen, RejectsNonPositiveCurvature) { EXPECT_THROW(robin_eigen(-1.0, 1.0), Error); }

TEST(Estimates, DiskRatesMatchLambda0Squared) {
    const double l0 = solve_lambda0(1.0, 1.0);
    const EstimateReport rep = verify_estimates(disk_run(), 0.25, l0);
    EXPECT_TRUE(rep.all_pass());
    for (const char* name : {"gradient", "kappa_min", "kappa_max"}) {
        const auto* r = rep.find(name);
        ASSERT_NE(r, nullptr);
        EXPECT_GE(r->samples, 8);
        EXPECT_NEAR(r->rate, l0 * l0, 0.1 * l0 * l0) << name;
    }
}

TEST(Estimates, WindowWithoutSamplesIsRejected) {
    try {
        (void)verify_estimates(disk_run(), 0.25, 1.2, FitWindow{-1e3, -999.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WindowTooShort);
    }
}

TEST(Profile, DiskProfileIsEven) {
    const double l0 = solve_lambda0(1.0, 1.0);
    const Profile p = fit_profile(disk_run(), l0, 1.0, 1.0);
    EXPECT_GT(p.A, 0.0);
    EXPECT_LT(std::abs(p.c), 0.02);
    EXPECT_LT(p.fit_residual, 1e-2);
}

TEST(Profile, EggCoefficientMatchesClosedForm) {
    const NormalizedDomain& nd = egg();
    const double l0 = solve_lambda0(nd.kappa1, nd.kappa2);
    const Profile p = fit_profile(egg_run(), l0, nd.kappa1, nd.kappa2);
    EXPECT_NEAR(p.c, p.c_closed_form, 0.02 * std::abs(p.c_closed_form));
}

TEST(Profile, ReflectedHeightsHaveNegativeAmplitude) {
    try {
        (void)fit_profile(reflect_trajectory(disk_run()), 1.2, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPositiveAmplitude);
    }
}

TEST(Profile, RescaledHeightsSettleAsTimeDecreases) {
    const double rate = verify_estimates(disk_run(), 0.25, solve_lambda0(1.0, 1.0)).find("kappa_min")->rate;
    const CauchyReport c = rescaled_height_cauchy(disk_run(), rate);
    EXPECT_TRUE(c.decreasing);
    EXPECT_LT(c.increments.front(), c.increments.back());
}

TEST(Uniqueness, SelfComparisonAndReflection) {
    const UniquenessReport self = uniqueness_evidence(disk_run(), disk_run());
    EXPECT_LT(self.distance, 1e-12);
    EXPECT_NEAR(self.tau_star, 0.0, 1e-6);
    const Trajectory other = reflect_trajectory(disk_run());
    EXPECT_GT(matched_distance(disk_run(), other, -4.0, -0.25, 20), 0.1);
}
