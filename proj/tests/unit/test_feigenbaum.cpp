#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dsm/feigenbaum.hpp"

using namespace dsm;

TEST(Feigenbaum, QuinticSeeds) {
    const auto r = seed_roots_quintic();
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0], -1.8597174, 1e-6);
    EXPECT_NEAR(r[1], -1.4021968, 1e-6);
    for (double q : r) EXPECT_NEAR(quintic(q), 0.0, 1e-12);
}

// At n = 1, z = 2 the collocation residual (node x = 1) vanishes at both
// quintic roots.
TEST(Feigenbaum, QuinticRootsSolveOneTermSystem) {
    const FeigenbaumSystem sys(2.0, 1);
    for (double q : seed_roots_quintic()) {
        Vector v(1);
        v(0) = q;
        EXPECT_NEAR(eval_system(sys, v)(0), 0.0, 1e-12);
    }
    Vector off(1);
    off(0) = -0.5;
    EXPECT_GT(std::abs(eval_system(sys, off)(0)), 0.1);
}

TEST(Feigenbaum, Partitions) {
    const auto u = partition_nodes(2.0, 4, Partition::Auto);
    EXPECT_DOUBLE_EQ(u[0], 0.25);
    EXPECT_DOUBLE_EQ(u[3], 1.0);
    const auto p = partition_nodes(13.0, 4, Partition::Auto);
    EXPECT_NEAR(p[0], std::pow(0.25, 1.0 / 13.0), 1e-15);
    EXPECT_THROW((void)partition_nodes(2.0, 0, Partition::Uniform), Error);
    EXPECT_THROW(FeigenbaumSystem(1.5, 2), Error);
}

// Analytic Jacobian vs central differences over a (z, n) grid at random q.
TEST(Feigenbaum, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (double z : {2.0, 3.0, 4.0, 7.5, 13.0}) {
        for (int n : {1, 2, 3, 5, 8}) {
            const FeigenbaumSystem sys(z, n);
            for (int trial = 0; trial < 3; ++trial) {
                Vector q = Vector::Zero(n);
                q(0) = -1.3 + u(rng);
                for (int i = 1; i < n; ++i) q(i) = 0.1 * u(rng);
                const DenseMatrix j = eval_jacobian(sys, q);
                const DenseMatrix fd =
                    finite_difference_jacobian([&sys](const Vector& x) { return eval_system(sys, x); }, q);
                const double rel = (j - fd).norm() / std::max(1.0, j.norm());
                EXPECT_LE(rel, 1e-5) << "z=" << z << " n=" << n;
            }
        }
    }
}

TEST(Feigenbaum, AlphaAndConcavity) {
    Vector q(1);
    q(0) = -1.5;
    EXPECT_DOUBLE_EQ(alpha_from_coefficients(q), 2.0);
    q(0) = -1.0;
    EXPECT_THROW((void)alpha_from_coefficients(q), Error);
    Vector c(2);
    c << -1.5416948, 0.1439197;
    EXPECT_TRUE(is_concave(2.0, c));
    c << -1.0, 2.0;
    EXPECT_FALSE(is_concave(2.0, c));
}

TEST(Feigenbaum, AcceptedDigits) {
    auto d = accepted_digits(-1.2290281, -1.2290289);
    EXPECT_EQ(d.digits, 6);
    EXPECT_EQ(d.value, "-1.229028");
    d = accepted_digits(2.5, -2.5);
    EXPECT_EQ(d.digits, 0);
    d = accepted_digits(1.0, 1.0);
    EXPECT_EQ(d.digits, 12);
}

// The n = 2 step at z = 2 from the concave seed.
TEST(Feigenbaum, QuadraticTwoTermSolution) {
    ContinuationOptions opt;
    const FeigenbaumSystem sys(2.0, 2);
    Vector start(2);
    start << -1.4021968, 0.0;
    for (auto m : {FlowKind::RegNewton, FlowKind::RegGNSourcewise}) {
        const Vector q = detail::solve_collocation(sys, start, m, opt).q;
        EXPECT_NEAR(q(0), -1.5416948, 1e-6);
        EXPECT_NEAR(q(1), 0.1439197, 1e-6);
    }
}

TEST(Feigenbaum, ContinuationAtZ2) {
    ContinuationOptions opt;
    opt.n_max = 8;
    const auto a = continuation_solve(2.0, FlowKind::RegNewton, opt);
    const auto b = continuation_solve(2.0, FlowKind::RegGNSourcewise, opt);
    EXPECT_NEAR(a.alpha_signed, -2.502907875, 1e-7);
    EXPECT_GE(accepted_digits(a.alpha_signed, b.alpha_signed).digits, 7);
    EXPECT_TRUE(a.branch_concave);
    // Exactly one accepted step, and it is the reported one.
    int accepted = 0;
    for (const auto& s : a.steps) accepted += s.accepted ? 1 : 0;
    EXPECT_EQ(accepted, 1);
}

TEST(Feigenbaum, WrongSeedBranchIsRejected) {
    ContinuationOptions opt;
    opt.n_max = 2;
    opt.seed = -1.8597174;
    try {
        (void)continuation_solve(2.0, FlowKind::RegNewton, opt);
        FAIL() << "non-concave branch accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoConcaveSolution);
    }
}

TEST(Feigenbaum, MethodRestriction) {
    EXPECT_THROW((void)continuation_solve(2.0, FlowKind::RegSimple, ContinuationOptions{}), Error);
}
