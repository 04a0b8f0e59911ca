#include <gtest/gtest.h>

#include <random>

#include "dsm/benchmarks.hpp"
#include "dsm/problem.hpp"

using namespace dsm;

TEST(Problem, ValidateRejectsInconsistentData) {
    Problem p;
    EXPECT_THROW(validate(p), Error);
    p.dim = 2;
    p.eval_F = [](const Vector& x) { return x; };
    p.z0 = Vector::Zero(3);
    EXPECT_THROW(validate(p), Error);
    p.z0 = Vector::Zero(2);
    EXPECT_NO_THROW(validate(p));
    p.N2 = -1.0;
    EXPECT_THROW(validate(p), Error);
}

TEST(Problem, WrongSizedOutputIsReported) {
    Problem p;
    p.name = "bad";
    p.dim = 2;
    p.eval_F = [](const Vector&) { return Vector::Zero(3); };
    p.z0 = Vector::Zero(2);
    EXPECT_THROW((void)p.F(p.z0), Error);
}

// Every benchmark's analytic Jacobian agrees with central differences at
// random points.
TEST(Benchmarks, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const auto& name : benchmark_names()) {
        const auto b = make_benchmark(name);
        const Problem& p = b.problem;
        ASSERT_NO_THROW(validate(p)) << name;
        for (int k = 0; k < 20; ++k) {
            Vector x(static_cast<Eigen::Index>(p.dim));
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
            const DenseMatrix fd = finite_difference_jacobian(p.eval_F, x);
            const DenseMatrix j = p.jacobian(x);
            EXPECT_LE((j - fd).norm(), 1e-6 * (1.0 + j.norm())) << name;
        }
    }
}

TEST(Benchmarks, KnownSolutionsSolve) {
    for (const auto& name : benchmark_names()) {
        const auto b = make_benchmark(name);
        ASSERT_TRUE(b.problem.known_solution) << name;
        EXPECT_LE(b.problem.F(*b.problem.known_solution).norm(), 1e-14) << name;
    }
}

// Sampled constants are lower bounds of the suprema, so they never exceed the
// documented N1 and N2.
TEST(Benchmarks, DocumentedConstantsDominateSamples) {
    for (const auto& name : {"scalar-cubic", "monotone-2d", "sourcewise-2d", "rank-deficient-2d"}) {
        const auto b = make_benchmark(name);
        const Problem& p = b.problem;
        const Vector lo = Vector::Constant(static_cast<Eigen::Index>(p.dim), -1.0);
        const Vector hi = Vector::Constant(static_cast<Eigen::Index>(p.dim), 1.0);
        const auto est = estimate_constants(p, lo, hi, 128);
        EXPECT_LE(est.N1, *p.N1 * (1 + 1e-6)) << name;
        EXPECT_LE(est.N2, *p.N2 * (1 + 1e-3)) << name;
    }
}

TEST(Benchmarks, SourcewiseRepresentationHolds) {
    const auto b = make_benchmark("sourcewise-2d");
    ASSERT_TRUE(b.source_v);
    const Problem& p = b.problem;
    const Vector lhs = p.z0 - *p.known_solution;
    const Vector rhs = p.jacobian(*p.known_solution) * *b.source_v;
    EXPECT_LE((lhs - rhs).norm(), 1e-14);
    EXPECT_LT(*p.N2 * b.source_v->norm(), 2.0);
}

TEST(Benchmarks, UnknownNameAndBadExponent) {
    EXPECT_THROW((void)make_benchmark("no-such"), Error);
    EXPECT_THROW((void)make_benchmark("scalar-power-m", 0.5), Error);
    EXPECT_DOUBLE_EQ(*make_benchmark("scalar-power-m", 4.0).rate_exponent, 0.25);
}
