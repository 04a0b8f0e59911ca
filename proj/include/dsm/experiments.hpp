#pragma once

// Glue between the theorems and a concrete run: which admissibility checks
// apply, which envelope a passing check licenses, and rate fitting on the
// recorded trajectory.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dsm/admissibility.hpp"
#include "dsm/envelope.hpp"
#include "dsm/error.hpp"
#include "dsm/flows.hpp"
#include "dsm/integrator.hpp"
#include "dsm/problem.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

struct Preflight {
    std::vector<TheoremCheck> checks;  // one row per theorem, in a fixed order
    std::optional<TheoremCheck> method_check;
    std::optional<Envelope> envelope;  // licensed by the method's own theorem
    AuxiliaryTarget target = AuxiliaryTarget::None;
    double C_eps = kInf;
    std::optional<double> C0;

    [[nodiscard]] bool method_admissible() const { return method_check && method_check->passes; }
};

namespace detail {

inline TheoremCheck unverifiable(std::string theorem, std::string why) {
    return TheoremCheck{std::move(theorem), false, "unverifiable: " + std::move(why)};
}

inline std::optional<double> dist0(const Problem& p) {
    if (!p.known_solution) return std::nullopt;
    return (*p.known_solution - p.z0).norm();
}

/// Component of y - z0 outside the range of T(xi), relative to ||y - z0||.
inline bool null_space_clean(const SpectralDecomposition& sd, const Vector& r) {
    const double top = std::max(1.0, sd.eigenvalues().cwiseAbs().maxCoeff());
    const Vector off = r - sd.projector(1e-12 * top) * r;
    return off.norm() <= 1e-10 * (1.0 + r.norm());
}

/// Runs one admissibility check; a numerical failure inside it becomes a failed row.
template <typename Fn>
TheoremCheck guarded(const std::string& theorem, const Fn& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return TheoremCheck{theorem, false, e.what()};
    }
}

}  // namespace detail

/// Runs every admissibility check the available data allows, for the schedule
/// `s` and the problem, and picks the envelope licensed by the method's theorem.
[[nodiscard]] inline Preflight preflight(const Problem& p, FlowKind method, const Schedule& s,
                                         const FlowConstants& c = {}, double t_max = 1e4) {
    Preflight pf;
    pf.C_eps = c_eps(s);
    const auto d0 = detail::dist0(p);

    // Regularized Newton.
    TheoremCheck newton = [&] {
        if (!p.N2) return detail::unverifiable("newton", "N2 unknown");
        if (!d0) return detail::unverifiable("newton", "no known solution for ||z0 - y||");
        return check_theorem32(s, *p.N2, *d0).checks.front();
    }();
    TheoremCheck simple = check_theorem33(s).checks.front();

    std::optional<double> sw_c0;
    TheoremCheck sourcewise = detail::guarded("gn-sourcewise", [&] {
        if (!p.N1 || !p.N2) return detail::unverifiable("gn-sourcewise", "N1 or N2 unknown");
        if (!c.source_norm) return detail::unverifiable("gn-sourcewise", "source norm ||v|| unknown");
        if (!d0) return detail::unverifiable("gn-sourcewise", "no known solution for ||z0 - y||");
        const auto a = check_theorem42(s, SourcewiseTheoremInput{*p.N1, *p.N2, c.zeta, *c.source_norm, *d0});
        sw_c0 = a.C0;
        return a.checks.front();
    });

    std::optional<double> pj_c0;
    TheoremCheck projector = detail::guarded("gn-projector", [&] {
        if (!p.N1 || !p.N2) return detail::unverifiable("gn-projector", "N1 or N2 unknown");
        if (!p.known_solution) return detail::unverifiable("gn-projector", "C and C_alpha need the solution y");
        const Flow f = make_flow(FlowKind::RegGNProjector, p, s);
        // Times where eps has underflowed (fast exponential schedules) carry no information.
        std::vector<double> grid;
        std::vector<double> eps_values;
        for (double t : log_grid(t_max, 512)) {
            const double e = s.eps(t);
            if (!(e >= std::numeric_limits<double>::min())) break;
            grid.push_back(t);
            eps_values.push_back(e);
        }
        ProjectorTheoremInput in;
        in.N1 = *p.N1;
        in.N2 = *p.N2;
        in.C = projector_constant(f, *p.known_solution, eps_values);
        in.C_alpha = c_alpha(f, *p.known_solution, grid);
        in.dist0 = *d0;
        in.null_space_condition = detail::null_space_clean(*f.spectral, *p.known_solution - p.z0);
        const auto a = check_theorem41(s, in);
        pj_c0 = a.C0;
        return a.checks.front();
    });

    pf.checks = {newton, simple, projector, sourcewise};

    switch (method) {
        case FlowKind::RegNewton:
            pf.method_check = newton;
            pf.target = AuxiliaryTarget::RegularizedSolution;
            if (newton.passes && *p.N2 > 0.0) pf.envelope = Envelope::lambda_over_eps(s, *p.N2 / (1.0 - pf.C_eps));
            break;
        case FlowKind::RegSimple:
            pf.method_check = simple;
            pf.target = AuxiliaryTarget::RegularizedSolution;
            if (simple.passes && d0 && *d0 > 0.0) {
                const Vector x0 = auxiliary_solution(p, s.eps(0.0), p.z0);
                const double gap = (p.z0 - x0).norm();
                const double mu0 = gap > 0.0 ? 0.5 / gap : 1.0;
                pf.envelope = mu_ode_envelope(s, 2.0 * *d0, mu0, log_grid(t_max, 2048));
            }
            break;
        case FlowKind::RegGNSourcewise:
            pf.method_check = sourcewise;
            pf.C0 = sw_c0;
            pf.target = p.known_solution ? AuxiliaryTarget::KnownSolution : AuxiliaryTarget::None;
            if (sourcewise.passes && *p.N2 > 0.0) {
                const double lambda = *p.N2 * std::pow(s.eps(0.0), c.zeta - 0.5) / (2.0 * *sw_c0);
                pf.envelope = Envelope::lambda_over_eps_zeta(s, lambda, c.zeta);
            }
            break;
        case FlowKind::RegGNProjector:
            pf.method_check = projector;
            pf.C0 = pj_c0;
            pf.target = p.known_solution ? AuxiliaryTarget::KnownSolution : AuxiliaryTarget::None;
            if (projector.passes && *p.N2 > 0.0) {
                const double lambda = (4.0 * *p.N1 * *p.N2 + *p.N2 * std::sqrt(s.eps(0.0))) / (2.0 * *pj_c0);
                pf.envelope = Envelope::lambda_over_eps(s, lambda);
            }
            break;
        default:
            pf.target = p.known_solution ? AuxiliaryTarget::KnownSolution : AuxiliaryTarget::None;
            break;
    }
    return pf;
}

// ---------------------------------------------------------------------------
// Rates

struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0;
    std::size_t samples = 0;
};

/// Least-squares slope of log ||z - y|| against log eps over the second half of
/// the samples. Samples with a zero distance are skipped.
[[nodiscard]] inline RateFit fit_rate(const Trajectory& traj) {
    RateFit r;
    const std::size_t start = traj.samples.size() / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        if (!s.dist_to_solution) fail(ErrorKind::MissingMonitor, "rate fit needs the distance to the solution");
        if (!(*s.dist_to_solution > 0.0) || !(s.eps > 0.0)) continue;
        const double x = std::log(s.eps);
        const double y = std::log(*s.dist_to_solution);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++r.samples;
    }
    if (r.samples < 2) return r;
    const double n = static_cast<double>(r.samples);
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) fail(ErrorKind::DivisionByZero, "eps is constant over the tail");
    r.exponent = (n * sxy - sx * sy) / den;
    r.intercept = (sy - r.exponent * sx) / n;
    return r;
}

/// Coefficient K in ||z(t) - y|| <= K eps(t) under the source condition
/// z0 - y = F'(y) v with ||v|| < 2/N2.
[[nodiscard]] inline double source_rate_constant(double C_eps, double N2, double v_norm) {
    if (!(N2 > 0.0)) fail(ErrorKind::InvalidArgument, "source_rate_constant needs N2 > 0");
    if (!(N2 * v_norm < 2.0)) fail(ErrorKind::ConditionViolated, "||v|| must be below 2/N2");
    return (1.0 - C_eps) / N2 + 4.0 * v_norm / (2.0 - N2 * v_norm);
}

}  // namespace dsm
