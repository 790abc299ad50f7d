#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kapitza/averaging.hpp"
#include "kapitza/simulate.hpp"

using namespace kapitza;

namespace {

constexpr double kPi = std::numbers::pi;

LinearizedSystem pendulum_lin(double beta, double alpha) {
    return {alpha, -beta, PeriodicSignal::sine()};
}

LinearizedSystem random_lin(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Harmonic> hs;
    const int n = 1 + static_cast<int>(3 * u(rng));
    for (int k = 1; k <= n; ++k) hs.push_back({k, 2 * u(rng) - 1, 2 * u(rng) - 1});
    const double T = 1.0 + 6.0 * u(rng);
    return {0.05 + u(rng), -0.8 * u(rng), PeriodicSignal(T, hs)};
}

}  // namespace

TEST(BuildTransform, PendulumCoefficients) {
    const auto lin = pendulum_lin(0.25, 0.1);
    const auto tr = build_transform(lin, QuadratureGrid(2 * kPi));
    for (double t : {0.0, 0.5, 2.5, 6.0}) {
        EXPECT_NEAR(tr.b_fn.eval(t), std::cos(t), 1e-14);
        EXPECT_NEAR(tr.a_fn.eval(t), std::sin(t), 1e-14);
    }
    EXPECT_NEAR(tr.a_samples[512], std::sin(tr.grid.node(512)), 1e-14);
}

TEST(BuildTransform, ZeroForcing) {
    const LinearizedSystem lin{0.1, -0.25, PeriodicSignal{}};
    const auto tr = build_transform(lin, QuadratureGrid(2 * kPi));
    EXPECT_TRUE(tr.a_fn.is_zero());
    EXPECT_TRUE(tr.b_fn.is_zero());
}

TEST(BuildTransform, SecondHarmonic) {
    // b' = -cos 2t gives b = -sin(2t)/2; a' = b gives a = cos(2t)/4 (both zero-mean).
    const LinearizedSystem lin{0.1, -0.25, PeriodicSignal(2 * kPi, {{2, 1.0, 0.0}})};
    const auto tr = build_transform(lin, QuadratureGrid(2 * kPi));
    for (double t : {0.0, 0.3, 1.9}) {
        EXPECT_NEAR(tr.b_fn.eval(t), -std::sin(2 * t) / 2, 1e-14);
        EXPECT_NEAR(tr.a_fn.eval(t), std::cos(2 * t) / 4, 1e-14);
    }
}

TEST(BuildTransform, RejectsGridPeriodMismatch) {
    EXPECT_THROW((void)build_transform(pendulum_lin(0.25, 0.1), QuadratureGrid(3.0)),
                 std::invalid_argument);
}

TEST(BuildTransform, DerivativesAndMeans) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        const auto lin = random_lin(rng);
        const QuadratureGrid grid(lin.period());
        const auto tr = build_transform(lin, grid);
        EXPECT_LT(std::abs(integrate(tr.a_fn, 0.0, grid.period(), grid)) / grid.period(), 1e-10);
        EXPECT_LT(std::abs(integrate(tr.b_fn, 0.0, grid.period(), grid)) / grid.period(), 1e-10);
        const double h = 1e-5;
        for (double t : {0.1, 0.77, 1.0}) {
            EXPECT_NEAR((tr.b_fn.eval(t + h) - tr.b_fn.eval(t - h)) / (2 * h), -lin.phi_hat.eval(t), 1e-6);
            EXPECT_NEAR((tr.a_fn.eval(t + h) - tr.a_fn.eval(t - h)) / (2 * h), tr.b_fn.eval(t), 1e-6);
            EXPECT_NEAR(tr.a_fn.eval(t + grid.period()), tr.a_fn.eval(t), 1e-10);
        }
    }
}

TEST(BuildU1, Examples) {
    const QuadratureGrid grid(2 * kPi);
    auto lin = pendulum_lin(0.25, 0.1);
    Mat2 u1 = build_u1(lin, build_transform(lin, grid));
    EXPECT_NEAR(u1.a21, -0.25, 1e-12);
    EXPECT_EQ(u1.a12, 1.0);
    EXPECT_EQ(u1.a22, -0.1);

    lin = {1.0, -1.0, PeriodicSignal{}};
    u1 = build_u1(lin, build_transform(lin, grid));
    EXPECT_NEAR(u1.a21, 1.0, 1e-15);
    EXPECT_FALSE(u1_is_hurwitz(u1));

    lin = pendulum_lin(0.49, 0.2);
    u1 = build_u1(lin, build_transform(lin, grid));
    EXPECT_NEAR(u1.a21, -0.01, 1e-12);
}

TEST(U1Hurwitz, RouthHurwitz) {
    EXPECT_TRUE(u1_is_hurwitz({0.0, 1.0, -0.25, -0.1}));
    EXPECT_FALSE(u1_is_hurwitz({0.0, 1.0, 1.0, -1.0}));
    EXPECT_FALSE(u1_is_hurwitz({0.0, 1.0, 0.0, -1.0}));
}

TEST(Bogolyubov, PendulumValues) {
    const QuadratureGrid grid(2 * kPi);
    for (double beta : {0.1, 0.25, 0.4, 0.6}) {
        const auto r = bogolyubov_condition(pendulum_lin(beta, 0.1), grid);
        EXPECT_NEAR(r.lhs, 1.5, 1e-9);
        EXPECT_NEAR(r.rhs, 1.0 + beta, 1e-9);
        EXPECT_EQ(r.holds, beta < 0.5);
    }
}

TEST(Bogolyubov, DegenerateAndScaled) {
    const QuadratureGrid grid(2 * kPi);
    auto r = bogolyubov_condition({0.1, -1.0, PeriodicSignal{}}, grid);
    EXPECT_NEAR(r.lhs, 0.0, 1e-15);
    EXPECT_NEAR(r.rhs, 1.0, 1e-15);
    EXPECT_FALSE(r.holds);

    r = bogolyubov_condition({0.1, -1.0, PeriodicSignal::sine(2.0)}, grid);
    EXPECT_NEAR(r.lhs, 6.0, 1e-9);
    EXPECT_NEAR(r.rhs, 5.0, 1e-9);
    EXPECT_TRUE(r.holds);
}

TEST(Bogolyubov, EquivalentToDetU1) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto lin = random_lin(rng);
        const QuadratureGrid grid(lin.period());
        const auto r = bogolyubov_condition(lin, grid);
        const Mat2 u1 = build_u1(lin, build_transform(lin, grid));
        EXPECT_NEAR(r.lhs - r.rhs, u1.det(), 1e-8);
        if (std::abs(u1.det()) > 1e-8) {
            EXPECT_EQ(r.holds, u1_is_hurwitz(u1));
        }
    }
}

TEST(TransformedSystem, U2AtZeroMu) {
    const auto lin = pendulum_lin(0.25, 0.1);
    const TransformedSystem sys(lin, build_transform(lin, QuadratureGrid(2 * kPi)));
    for (double t : {0.0, 1.0, 4.0}) {
        const Mat2 u2 = sys.u2(t, 0.0);
        EXPECT_EQ(u2.a11, 0.0);
        EXPECT_NEAR(u2.a12, 0.0, 1e-15);
        EXPECT_NEAR(u2.a21, -0.1 * std::cos(t) - std::sin(t) * std::sin(t) + 0.5, 1e-14);
        EXPECT_NEAR(u2.a22, -std::cos(t), 1e-14);
    }
    const Mat2 u3 = sys.u3(0.0, 0.01);
    EXPECT_NEAR(u3.max_abs(), 0.0, 1e-15);
}

TEST(TransformedSystem, ZeroForcingHasNoOscillatoryPart) {
    const LinearizedSystem lin{0.3, -0.2, PeriodicSignal{}};
    const TransformedSystem sys(lin, build_transform(lin, QuadratureGrid(2 * kPi)));
    EXPECT_EQ(sys.u2(1.3, 0.02).max_abs(), 0.0);
    EXPECT_EQ(sys.u3(1.3, 0.02).max_abs(), 0.0);
}

TEST(TransformedSystem, U2HasZeroMeanAndU3Pattern) {
    const auto lin = pendulum_lin(0.25, 0.1);
    const QuadratureGrid grid(2 * kPi);
    const TransformedSystem sys(lin, build_transform(lin, grid));
    const double mu_bar = 1.0 / (4 * kPi * kPi);
    for (double mu : {mu_bar / 10, mu_bar / 2, mu_bar}) {
        const Mat2 m = integrate([&](double t) { return sys.u2(t, mu); }, 0.0, 2 * kPi, grid);
        EXPECT_LT(m.max_abs(), 1e-8) << "mu=" << mu;
        const auto s = build_u2_u3(sys, mu);
        for (const auto& u3 : s.u3) {
            EXPECT_EQ(u3.a11, 0.0);
            EXPECT_EQ(u3.a21, 0.0);
        }
    }
}

TEST(TransformedSystem, DegenerateChangeOfVariables) {
    const auto lin = pendulum_lin(0.25, 0.1);
    const TransformedSystem sys(lin, build_transform(lin, QuadratureGrid(2 * kPi)));
    EXPECT_NEAR(sys.max_admissible_mu(), 1.0, 1e-6);
    EXPECT_THROW((void)sys.u3(3 * kPi / 2, 1.5), std::domain_error);
}

TEST(TransformedSystem, ConsistentWithOriginalSystem) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const auto lin = random_lin(rng);
        const double T = lin.period();
        const TransformedSystem sys(lin, build_transform(lin, QuadratureGrid(T)));
        const double mu = 0.05;
        const Vec2 v0{0.7, -0.2};
        const Mat2 p0 = sys.transform().change_of_variables(0.0, mu);
        const Vec2 u0 = p0.inverse() * v0;

        IntegrationOptions opts;
        opts.steps_per_period = 2048;
        const auto v = integrate(linear_system(lin, mu), v0.x1, v0.x2, 5 * T, opts);
        const auto u = integrate(custom_system(T, [&](double t, const Vec2& w) {
                                     return sys.generator(t, mu) * w;
                                 }),
                                 u0.x1, u0.x2, 5 * T, opts);
        ASSERT_EQ(u.size(), v.size());
        for (std::size_t i = 0; i < u.size(); i += 97) {
            const Vec2 mapped = sys.transform().change_of_variables(u.times[i], mu) * u.states[i];
            EXPECT_NEAR(mapped.x1, v.states[i].x1, 1e-6);
            EXPECT_NEAR(mapped.x2, v.states[i].x2, 1e-6);
        }
    }
}
