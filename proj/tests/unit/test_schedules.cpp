#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dsm/admissibility.hpp"
#include "dsm/envelope.hpp"
#include "dsm/schedule.hpp"

using namespace dsm;

TEST(Schedule, ValuesMatchClosedForms) {
    const auto p = Schedule::power(2.0, 3.0, 0.5);
    EXPECT_DOUBLE_EQ(p.eps(1.0), 2.0 / std::sqrt(4.0));
    const auto l = Schedule::log(1.0, std::exp(1.0));
    EXPECT_DOUBLE_EQ(l.eps(0.0), 1.0);
    const auto e = Schedule::exp(3.0, 2.0);
    EXPECT_DOUBLE_EQ(e.eps(0.5), 3.0 * std::exp(-1.0));
}

TEST(Schedule, RejectsBadParameters) {
    EXPECT_THROW((void)Schedule::power(1.0, 1.0, 0.0), Error);
    EXPECT_THROW((void)Schedule::power(-1.0, 1.0, 1.0), Error);
    EXPECT_THROW((void)Schedule::power(1.0, 0.0, 1.0), Error);
    EXPECT_THROW((void)Schedule::log(1.0, 1.0), Error);
    EXPECT_THROW((void)Schedule::exp(1.0, 0.0), Error);
    try {
        (void)Schedule::power(1.0, 1.0, 0.0);
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::InvalidArgument);
        EXPECT_NE(std::string(err.what()).find("nu"), std::string::npos);
    }
}

// Property: eps is positive and decreasing, deriv matches a central difference
// and integral matches quadrature, for random members of every family.
TEST(Schedule, RandomFamiliesAreConsistent) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 60; ++trial) {
        Schedule s = Schedule::power(1.0, 1.0, 1.0);
        switch (trial % 3) {
            case 0: s = Schedule::power(u(rng), u(rng), u(rng)); break;
            case 1: s = Schedule::log(u(rng), 1.0 + u(rng)); break;
            default: s = Schedule::exp(u(rng), u(rng)); break;
        }
        double prev = s.eps(0.0);
        for (double t = 0.25; t < 20.0; t += 0.25) {
            const double e = s.eps(t);
            EXPECT_GT(e, 0.0);
            EXPECT_LT(e, prev);
            prev = e;
            const double h = 1e-5;
            const double fd = (s.eps(t + h) - s.eps(t - h)) / (2 * h);
            EXPECT_NEAR(s.deriv(t), fd, 1e-6 * (1.0 + std::abs(fd)));
        }
        const double quad = adaptive_simpson([&](double t) { return s.eps(t); }, 0.0, 5.0, {1e-12, 40});
        EXPECT_NEAR(s.integral(0.0, 5.0), quad, 1e-9);
    }
}

// sup eps(0)|eps'|/eps^2 on a dense grid never exceeds the closed form and
// approaches it.
TEST(Schedule, CEpsClosedFormDominatesGrid) {
    for (const auto& s : {Schedule::power(2.0, 3.0, 0.7), Schedule::power(1.0, 2.0, 1.0), Schedule::log(1.0, 3.0),
                          Schedule::log(5.0, 10.0)}) {
        const double ce = c_eps(s);
        const double scan = c_eps_scan([&](double t) { return s.eps(t); }, [&](double t) { return s.deriv(t); },
                                       0.0, 1e6, 8192);
        EXPECT_LE(scan, ce * (1 + 1e-12));
        EXPECT_GT(scan, 0.99 * ce);
    }
}

TEST(Schedule, ClassifierMatchesExamples) {
    for (double nu : {0.1, 0.5, 1.0}) {
        for (double t0 : {nu + 0.01, 2.0, 10.0}) EXPECT_TRUE(passes_c_eps(Schedule::power(1.0, t0, nu)));
        EXPECT_FALSE(passes_c_eps(Schedule::power(1.0, nu * 0.99, nu)));
    }
    EXPECT_FALSE(passes_c_eps(Schedule::exp(1.0, 1.0)));
    EXPECT_FALSE(check_theorem33(Schedule::exp(1.0, 1.0)).passes());
    EXPECT_TRUE(passes_c_eps(Schedule::log(1.0, 3.0)));   // 3 log 3 > 1
    EXPECT_FALSE(passes_c_eps(Schedule::log(1.0, 1.5)));  // 1.5 log 1.5 < 1
    EXPECT_TRUE(check_theorem33(Schedule::log(1.0, 3.0)).passes());
    EXPECT_TRUE(check_theorem33(Schedule::power(1.0, 2.0, 0.5)).passes());
    EXPECT_FALSE(check_theorem33(Schedule::power(1.0, 2.0, 1.0)).passes());
}

TEST(NewtonAdmissibility, Eps0BoundIsReportedWhenViolated) {
    const auto a = check_theorem32(Schedule::power(1e-3, 5.0, 1.0), 6.0, 1.0);
    EXPECT_FALSE(a.passes());
    EXPECT_FALSE(a.first_failure().empty());
    EXPECT_TRUE(check_theorem32(Schedule::power(50.0, 5.0, 1.0), 6.0, 1.0).passes());
}

TEST(Envelope, LambdaOverEpsDerivative) {
    const auto s = Schedule::power(2.0, 3.0, 1.0);
    const auto e = Envelope::lambda_over_eps(s, 0.5);
    for (double t : {0.0, 1.0, 10.0}) {
        EXPECT_NEAR(e.mu(t), 0.5 / s.eps(t), 1e-14);
        const double h = 1e-5;
        EXPECT_NEAR(e.mu_dot(t), (e.mu(t + h) - e.mu(t - h)) / (2 * h), 1e-7);
    }
    EXPECT_THROW((void)Envelope::lambda_over_eps(s, 0.0), Error);
}

TEST(Envelope, OdeDefinedIsIncreasing) {
    const auto s = Schedule::power(1.0, 2.0, 0.5);
    const auto grid = log_grid(1e3, 256);
    const auto e = mu_ode_envelope(s, 2.0, 0.5, grid);
    double prev = 0.0;
    for (double t : grid) {
        EXPECT_GT(e.mu(t), prev);
        prev = e.mu(t);
    }
}
