#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dsm/benchmarks.hpp"
#include "dsm/experiments.hpp"
#include "dsm/integrator.hpp"

using namespace dsm;

TEST(Dopri5, ExponentialDecayOracle) {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0, 5.0};
    Vector y0(2);
    y0 << 1.0, 2.0;
    const auto ys = integrate_to_grid([](double, const Vector& y) { return Vector(-y); }, y0, grid, cfg);
    ASSERT_EQ(ys.size(), grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_NEAR(ys[k](0), std::exp(-grid[k]), 1e-9);
        EXPECT_NEAR(ys[k](1), 2.0 * std::exp(-grid[k]), 1e-9);
    }
}

TEST(Dopri5, TimeDependentOracle) {
    // y' = cos t, y(0) = 0
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    const auto ys = integrate_to_grid([](double t, const Vector&) { return Vector::Constant(1, std::cos(t)); },
                                      Vector::Zero(1), {0.0, 1.0, 3.0, 10.0}, cfg);
    EXPECT_NEAR(ys[3](0), std::sin(10.0), 1e-8);
}

TEST(Integrator, ConfigValidation) {
    IntegratorConfig c;
    EXPECT_NO_THROW(c.validate());
    c.h_min = 1.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.t_max = -1.0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Integrator, StopsOnResidual) {
    const auto b = make_benchmark("scalar-linear");
    IntegratorConfig cfg;
    cfg.residual_stop = 1e-3;
    const auto traj = integrate(make_flow(FlowKind::ClassicalNewton, b.problem), cfg);
    EXPECT_EQ(traj.status, TrajectoryStatus::ReachedResidual);
    EXPECT_LE(traj.final_sample().residual, 1e-3);
    // z' = -z from z0 = 1 reaches 1e-3 near t = log 1000.
    EXPECT_NEAR(traj.final_sample().t, std::log(1e3), 0.1);
}

TEST(Integrator, FlowErrorIsAStatus) {
    const auto b = make_benchmark("rank-deficient-2d");
    const auto traj = integrate(make_flow(FlowKind::ClassicalNewton, b.problem), IntegratorConfig{});
    EXPECT_EQ(traj.status, TrajectoryStatus::FlowError);
    ASSERT_TRUE(traj.error_kind);
    EXPECT_EQ(*traj.error_kind, ErrorKind::SolveFailed);
}

TEST(Integrator, StepLimit) {
    const auto b = make_benchmark("scalar-cubic");
    IntegratorConfig cfg;
    cfg.max_steps = 5;
    const auto traj = integrate(make_flow(FlowKind::RegNewton, b.problem, b.schedule), cfg);
    EXPECT_EQ(traj.status, TrajectoryStatus::StepLimit);
}

// Monotone sample times, residual = ||F(z)||, eps = schedule at t.
TEST(Integrator, SampleInvariants) {
    const auto b = make_benchmark("monotone-2d");
    IntegratorConfig cfg;
    cfg.t_max = 100.0;
    Monitors mon;
    mon.target = AuxiliaryTarget::KnownSolution;
    const auto traj = integrate(make_flow(FlowKind::RegNewton, b.problem, b.schedule), cfg, mon);
    ASSERT_GT(traj.samples.size(), 10u);
    EXPECT_EQ(traj.samples.front().t, 0.0);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        EXPECT_GT(s.t, traj.samples[i - 1].t);
        EXPECT_NEAR(s.residual, b.problem.F(s.z).norm(), 1e-14);
        EXPECT_NEAR(s.eps, b.schedule.eps(s.t), 1e-14 * s.eps);
        ASSERT_TRUE(s.dist_to_solution);
        EXPECT_NEAR(*s.dist_to_solution, (s.z - *b.problem.known_solution).norm(), 1e-14);
    }
    EXPECT_THROW((void)envelope_violations(traj), Error);
}

TEST(Integrator, SerializationFormats) {
    const auto b = make_benchmark("monotone-2d");
    IntegratorConfig cfg;
    cfg.t_max = 1.0;
    const auto traj = integrate(make_flow(FlowKind::RegNewton, b.problem, b.schedule), cfg);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    const std::string csv = os.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,z_0,z_1,residual,eps,envelope,dist_aux,dist_sol");
    const auto j = trajectory_json(traj);
    EXPECT_EQ(j["schema"], "dsm-traj/1");
    EXPECT_EQ(j["samples"].size(), traj.samples.size());
}

// Newton flow on every benchmark with the default schedule stays inside the
// certified radius (1 - C_eps)/N2 eps(t) around the auxiliary solution.
TEST(Integrator, NewtonEnvelopeHoldsOnBenchmarks) {
    for (const auto& name : benchmark_names()) {
        const auto b = make_benchmark(name);
        const auto s = Schedule::power(50.0, 5.0, 1.0);
        const auto pf = preflight(b.problem, FlowKind::RegNewton, s, b.constants, 1e3);
        ASSERT_TRUE(pf.method_admissible()) << name << ": " << pf.method_check->reason;
        ASSERT_TRUE(pf.envelope);
        Monitors mon;
        mon.target = pf.target;
        mon.envelope = pf.envelope;
        IntegratorConfig cfg;
        cfg.t_max = 1e3;
        const auto traj = integrate(make_flow(FlowKind::RegNewton, b.problem, s), cfg, mon);
        EXPECT_TRUE(envelope_violations(traj).empty()) << name;
        const double radius = (1.0 - c_eps(s)) / *b.problem.N2;
        for (const auto& smp : traj.samples) EXPECT_LT(*smp.dist_to_aux, radius * smp.eps) << name;
    }
}
