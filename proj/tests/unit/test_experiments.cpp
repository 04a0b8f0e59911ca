#include <gtest/gtest.h>

#include <cmath>

#include "dsm/benchmarks.hpp"
#include "dsm/experiments.hpp"

using namespace dsm;

namespace {

Trajectory synthetic(double exponent, std::size_t n) {
    Trajectory t;
    for (std::size_t k = 0; k < n; ++k) {
        Sample s;
        s.t = static_cast<double>(k);
        s.eps = std::pow(10.0, -0.01 * static_cast<double>(k));
        s.dist_to_solution = 3.0 * std::pow(s.eps, exponent);
        t.samples.push_back(s);
    }
    return t;
}

}  // namespace

TEST(RateFit, RecoversSyntheticExponent) {
    for (double p : {0.25, 1.0 / 3.0, 0.5, 1.0}) {
        const auto f = fit_rate(synthetic(p, 200));
        EXPECT_EQ(f.samples, 100u);
        EXPECT_NEAR(f.exponent, p, 1e-12);
        EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
    }
}

TEST(RateFit, NeedsSolutionDistance) {
    auto t = synthetic(1.0, 10);
    t.samples.back().dist_to_solution.reset();
    EXPECT_THROW((void)fit_rate(t), Error);
}

TEST(SourceRate, ConstantAndDomain) {
    EXPECT_NEAR(source_rate_constant(0.2, 1.0, 0.5), 0.8 + 2.0 / 1.5, 1e-15);
    EXPECT_THROW((void)source_rate_constant(0.2, 1.0, 2.5), Error);
    EXPECT_THROW((void)source_rate_constant(0.2, 0.0, 0.5), Error);
}

TEST(Preflight, RowsInFixedOrder) {
    const auto b = make_benchmark("scalar-cubic");
    const auto pf = preflight(b.problem, FlowKind::RegNewton, b.schedule, b.constants);
    ASSERT_EQ(pf.checks.size(), 4u);
    EXPECT_EQ(pf.checks[0].theorem, "newton");
    EXPECT_EQ(pf.checks[1].theorem, "simple");
    EXPECT_TRUE(pf.method_admissible());
    EXPECT_EQ(pf.target, AuxiliaryTarget::RegularizedSolution);
    EXPECT_NEAR(pf.C_eps, 0.2, 1e-15);
}

TEST(Preflight, MissingDataIsUnverifiable) {
    const auto b = make_benchmark("scalar-cubic");
    const auto pf = preflight(b.problem, FlowKind::RegGNSourcewise, b.schedule, FlowConstants{});
    EXPECT_FALSE(pf.method_admissible());
    EXPECT_NE(pf.method_check->reason.find("unverifiable"), std::string::npos);
}

TEST(Preflight, ExpScheduleFailsNewton) {
    const auto b = make_benchmark("monotone-2d");
    const auto pf = preflight(b.problem, FlowKind::RegNewton, Schedule::exp(50.0, 1.0), b.constants);
    EXPECT_FALSE(pf.method_admissible());
    EXPECT_FALSE(pf.envelope);
}

TEST(Preflight, SourcewiseBenchmarkAdmitsGaussNewton) {
    const auto b = make_benchmark("sourcewise-2d");
    const auto pf = preflight(b.problem, FlowKind::RegGNSourcewise, b.schedule, b.constants);
    EXPECT_TRUE(pf.method_admissible()) << pf.method_check->reason;
    EXPECT_EQ(pf.target, AuxiliaryTarget::KnownSolution);
    ASSERT_TRUE(pf.envelope);
}
