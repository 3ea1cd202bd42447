#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fbcsf/numeric.hpp"

using namespace fbcsf;

namespace {

// Dense Gaussian elimination with partial pivoting, used as the reference solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> m, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        }
        std::swap(m[k], m[piv]);
        std::swap(rhs[k], rhs[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
            rhs[i] -= f * rhs[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
        x[i] = s / m[i][i];
    }
    return x;
}

}  // namespace

TEST(Numeric, TridiagonalMatchesDenseSolve) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 23;
    std::vector<double> a(n), b(n), c(n), d(n);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = i > 0 ? u(gen) : 0.0;
        c[i] = i + 1 < n ? u(gen) : 0.0;
        b[i] = 3.0 + u(gen);
        d[i] = u(gen);
        m[i][i] = b[i];
        if (i > 0) m[i][i - 1] = a[i];
        if (i + 1 < n) m[i][i + 1] = c[i];
    }
    const auto ref = dense_solve(m, d);
    solve_tridiagonal(a, b, c, d);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(d[i], ref[i], 1e-13);
}

TEST(Numeric, CyclicTridiagonalMatchesDenseSolve) {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 17;
    std::vector<double> a(n), b(n), c(n), d(n);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = u(gen);
        c[i] = u(gen);
        b[i] = 3.0 + u(gen);
        d[i] = u(gen);
        m[i][i] = b[i];
        m[i][(i + n - 1) % n] += a[i];
        m[i][(i + 1) % n] += c[i];
    }
    const auto ref = dense_solve(m, d);
    solve_cyclic_tridiagonal(a, b, c, d);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(d[i], ref[i], 1e-13);
}

TEST(Numeric, GaussLegendreIsExactForHighDegree) {
    // 16 points integrate degree 31 exactly: int_0^1 x^31 = 1/32.
    EXPECT_NEAR(gauss16().integrate([](double x) { return std::pow(x, 31); }, 0.0, 1.0), 1.0 / 32.0, 1e-15);
    EXPECT_NEAR(gauss8().integrate([](double x) { return std::pow(x, 15); }, 0.0, 2.0), std::pow(2.0, 16) / 16.0, 1e-10);
    EXPECT_NEAR(gauss16().integrate([](double x) { return std::cos(x); }, 0.0, kPi / 2, 4), 1.0, 1e-15);
}

TEST(Numeric, FitLineRecoversExactLine) {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(0.3 * i - 1.0);
        y.push_back(2.5 - 1.25 * x.back());
    }
    const LineFit f = fit_line(x, y);
    EXPECT_NEAR(f.intercept, 2.5, 1e-13);
    EXPECT_NEAR(f.slope, -1.25, 1e-13);
    EXPECT_LT(f.max_abs_residual, 1e-13);
}

TEST(Numeric, BisectFindsRootAndRejectsBadBracket) {
    const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-15);
    EXPECT_NEAR(r, std::sqrt(2.0), 1e-15);
    EXPECT_THROW(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), Error);
}

TEST(Numeric, CubicSplineIsExactOnLinesAndConvergesOnSmoothData) {
    std::vector<double> t, v, w;
    for (int i = 0; i <= 20; ++i) {
        t.push_back(i / 20.0);
        v.push_back(3.0 * t.back() - 1.0);
    }
    const CubicSpline line(t, v);
    EXPECT_NEAR(line(0.537), 3.0 * 0.537 - 1.0, 1e-14);

    auto interior_error = [](int n) {
        std::vector<double> tt, vv;
        for (int i = 0; i <= n; ++i) {
            tt.push_back(kPi * i / n);
            vv.push_back(std::sin(tt.back()));  // natural end conditions hold exactly for sin on [0, pi]
        }
        const CubicSpline s(tt, vv);
        double err = 0.0;
        for (int j = 0; j < 997; ++j) {
            const double x = kPi * (j + 0.5) / 997;
            err = std::max(err, std::abs(s(x) - std::sin(x)));
        }
        return err;
    };
    const double e1 = interior_error(20), e2 = interior_error(40);
    EXPECT_GT(std::log2(e1 / e2), 3.7);
}

TEST(Numeric, WrapTwoPi) {
    EXPECT_NEAR(wrap_two_pi(-0.5), kTwoPi - 0.5, 1e-15);
    EXPECT_NEAR(wrap_two_pi(7.0), 7.0 - kTwoPi, 1e-15);
}
