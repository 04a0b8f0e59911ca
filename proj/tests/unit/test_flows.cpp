#include <gtest/gtest.h>

#include <random>

#include "dsm/benchmarks.hpp"
#include "dsm/flows.hpp"

using namespace dsm;

namespace {

Problem linear_problem(const DenseMatrix& a, const Vector& b, const Vector& z0) {
    Problem p;
    p.name = "linear";
    p.dim = static_cast<std::size_t>(a.rows());
    p.eval_F = [a, b](const Vector& x) { return Vector(a * x - b); };
    p.eval_jacobian = [a](const Vector&) { return a; };
    p.N1 = a.norm();
    p.N2 = 0.0;
    p.z0 = z0;
    return p;
}

}  // namespace

TEST(Flows, NamesRoundTrip) {
    for (auto k : {FlowKind::ClassicalSimple, FlowKind::ClassicalNewton, FlowKind::ClassicalGaussNewton,
                   FlowKind::RegSimple, FlowKind::RegNewton, FlowKind::RegGNProjector, FlowKind::RegGNSourcewise}) {
        EXPECT_EQ(parse_flow_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_flow_kind("levenberg"));
}

TEST(Flows, RegularizedNeedsSchedule) {
    const auto b = make_benchmark("scalar-cubic");
    EXPECT_THROW((void)make_flow(FlowKind::RegNewton, b.problem), Error);
    EXPECT_NO_THROW((void)make_flow(FlowKind::ClassicalNewton, b.problem));
}

// On a linear map every right-hand side has an explicit matrix form.
TEST(Flows, LinearOracle) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix a(3, 3);
        Vector b(3), z0(3), h(3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
            b(i) = g(rng);
            z0(i) = g(rng);
            h(i) = g(rng);
        }
        a = a * a.transpose() + DenseMatrix::Identity(3, 3);  // monotone
        const auto s = Schedule::power(1.0, 2.0, 1.0);
        const double t = 0.7;
        const double e = s.eps(t);
        const Problem p = linear_problem(a, b, z0);
        const Vector fh = a * h - b;
        const DenseMatrix id = DenseMatrix::Identity(3, 3);

        EXPECT_LE((eval_flow(make_flow(FlowKind::RegSimple, p, s), h, t) + fh + e * (h - z0)).norm(), 1e-12);
        const Vector newton = -(a + e * id).inverse() * (fh + e * (h - z0));
        EXPECT_LE((eval_flow(make_flow(FlowKind::RegNewton, p, s), h, t) - newton).norm(), 1e-10);
        const DenseMatrix t_h = a.transpose() * a;
        const Vector gn = -(t_h + e * id).inverse() * (a.transpose() * fh + e * (h - z0));
        EXPECT_LE((eval_flow(make_flow(FlowKind::RegGNSourcewise, p, s), h, t) - gn).norm(), 1e-9);
        EXPECT_LE((eval_flow(make_flow(FlowKind::ClassicalNewton, p), h, t) + a.inverse() * fh).norm(), 1e-10);
    }
}

TEST(Flows, ProjectorVariantKeepsRange) {
    DenseMatrix a = DenseMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    const Problem p = linear_problem(a, Vector::Zero(2), Vector::Ones(2));
    const auto f = make_flow(FlowKind::RegGNProjector, p, Schedule::power(1.0, 2.0, 1.0));
    const Vector d = eval_flow(f, Vector::Ones(2), 0.0);
    EXPECT_NEAR(d(1), 0.0, 1e-14);  // null-space component untouched
    EXPECT_LT(d(0), 0.0);
}

// The auxiliary solution solves F(x) + eps(x - z0) = 0 and tends to the
// minimal-distance solution as eps -> 0.
TEST(Flows, AuxiliarySolution) {
    const auto b = make_benchmark("rank-deficient-2d");
    for (double eps : {1.0, 1e-2, 1e-4, 1e-6}) {
        const Vector x = auxiliary_solution(b.problem, eps, b.problem.z0);
        EXPECT_LE((b.problem.F(x) + eps * (x - b.problem.z0)).norm(), 1e-9);
        EXPECT_NEAR(x(0), eps / (1.0 + eps), 1e-9);
        EXPECT_NEAR(x(1), 1.0, 1e-12);
    }
    EXPECT_THROW((void)auxiliary_solution(b.problem, 0.0, b.problem.z0), Error);
}

// Semimonotonicity: the certified estimate holds at random points near the
// auxiliary solution on the monotone benchmark.
TEST(Flows, NewtonSemimonotonicityMargin) {
    const auto b = make_benchmark("monotone-2d");
    const auto s = Schedule::power(50.0, 5.0, 1.0);
    const auto f = make_flow(FlowKind::RegNewton, b.problem, s);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (double t : {0.0, 10.0, 100.0, 1000.0}) {
        const Vector x = auxiliary_solution(b.problem, s.eps(t), b.problem.z0);
        for (int k = 0; k < 50; ++k) {
            Vector h = x;
            h(0) += u(rng);
            h(1) += u(rng);
            EXPECT_LE(semimonotonicity_margin(f, h, t, x), 1e-9) << "t=" << t;
        }
    }
}

TEST(Flows, SourcewiseCoefficientsNeedConstants) {
    const auto b = make_benchmark("sourcewise-2d");
    const auto f = make_flow(FlowKind::RegGNSourcewise, b.problem, b.schedule);
    EXPECT_THROW((void)semimonotonicity_coefficients(f, 0.0), Error);
    const auto k = semimonotonicity_coefficients(f, 0.0, b.constants);
    EXPECT_GT(k.gamma, 0.0);
}
