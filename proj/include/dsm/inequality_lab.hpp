#pragma once

// Riccati majorant, comparison-lemma checks and the decay lemma with its
// counterexample, all exercised through saturating ODEs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dsm/admissibility.hpp"
#include "dsm/envelope.hpp"
#include "dsm/error.hpp"
#include "dsm/integrator.hpp"
#include "dsm/quadrature.hpp"

namespace dsm {

struct RiccatiSetup {
    ScalarFn gamma;
    ScalarFn sigma;
    ScalarFn beta;
    Envelope mu;
    double v0 = 0.0;
};

[[nodiscard]] inline RiccatiReport check_riccati_conditions(const RiccatiSetup& s, const std::vector<double>& grid) {
    return check_riccati_conditions(s.gamma, s.sigma, s.beta, s.mu, s.v0, grid);
}

struct MajorantPoint {
    double t = 0.0;
    double u = 0.0;        // majorant of v(t) exp(int gamma)
    double v_scale = 0.0;  // u exp(-int gamma): majorant of v(t) itself
    double bound = 0.0;    // 1/mu(t), the envelope on the v scale
    double bracket = 0.0;  // 1 - (1/(1 - mu0 v0) + (1/2) int (gamma - mu'/mu))^-1
};

namespace detail {

inline void require_majorant_start(const RiccatiSetup& s) {
    if (!(s.mu.mu(0.0) * s.v0 < 1.0)) fail(ErrorKind::ConditionViolated, "mu(0)v(0) >= 1");
}

inline MajorantPoint majorant_from_integrals(const RiccatiSetup& s, double t, double int_gamma, double int_drive) {
    MajorantPoint p;
    p.t = t;
    const double mu_t = s.mu.mu(t);
    const double start = 1.0 / (1.0 - s.mu.mu(0.0) * s.v0);
    p.bracket = 1.0 - 1.0 / (start + 0.5 * int_drive);
    p.bound = 1.0 / mu_t;
    p.v_scale = p.bracket / mu_t;
    p.u = std::exp(int_gamma) * p.v_scale;
    return p;
}

}  // namespace detail

/// Closed-form Riccati majorant at t:
/// u(t) = e^{int_0^t gamma}/mu(t) [1 - (1/(1 - mu(0)v0) + (1/2) int_0^t (gamma - mu'/mu))^-1].
[[nodiscard]] inline MajorantPoint riccati_majorant(const RiccatiSetup& s, double t) {
    detail::require_majorant_start(s);
    const QuadratureOptions q{1e-10, 40};
    const double ig = adaptive_simpson(s.gamma, 0.0, t, q);
    const double id = adaptive_simpson([&](double r) { return s.gamma(r) - s.mu.mu_dot(r) / s.mu.mu(r); }, 0.0, t, q);
    return detail::majorant_from_integrals(s, t, ig, id);
}

/// Majorant on a whole grid, accumulating both integrals segment by segment.
[[nodiscard]] inline std::vector<MajorantPoint> riccati_majorant_trace(const RiccatiSetup& s,
                                                                      const std::vector<double>& grid) {
    detail::require_majorant_start(s);
    require_time_grid(grid);
    const QuadratureOptions q{1e-12, 40};
    std::vector<MajorantPoint> out;
    out.reserve(grid.size());
    double ig = 0.0;
    double id = 0.0;
    out.push_back(detail::majorant_from_integrals(s, 0.0, 0.0, 0.0));
    for (std::size_t k = 1; k < grid.size(); ++k) {
        ig += adaptive_simpson(s.gamma, grid[k - 1], grid[k], q);
        id += adaptive_simpson([&](double r) { return s.gamma(r) - s.mu.mu_dot(r) / s.mu.mu(r); }, grid[k - 1],
                               grid[k], q);
        out.push_back(detail::majorant_from_integrals(s, grid[k], ig, id));
    }
    return out;
}

/// Independent route: integrate the Riccati equation
/// u' = (1/2)(gamma - mu'/mu) [mu e^{-G} u^2 + e^{G}/mu], G' = gamma, u(0) = v0,
/// and report u together with its v-scale value u e^{-G}.
[[nodiscard]] inline std::vector<MajorantPoint> riccati_ode_trace(const RiccatiSetup& s,
                                                                 const std::vector<double>& grid,
                                                                 double rel_tol = 1e-12) {
    require_time_grid(grid);
    auto rhs = [&s](double t, const Vector& y) {
        const double m = s.mu.mu(t);
        const double drive = 0.5 * (s.gamma(t) - s.mu.mu_dot(t) / m);
        Vector d(2);
        d(0) = drive * (m * std::exp(-y(1)) * y(0) * y(0) + std::exp(y(1)) / m);
        d(1) = s.gamma(t);
        return d;
    };
    IntegratorConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = 1e-14;
    cfg.h_init = 1e-4;
    cfg.h_min = 1e-14;
    cfg.h_max = 1.0;
    cfg.t_max = grid.back() > 0.0 ? grid.back() : 1.0;
    Vector y0(2);
    y0 << s.v0, 0.0;
    const auto states = integrate_to_grid(rhs, y0, grid, cfg);
    std::vector<MajorantPoint> out;
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        MajorantPoint p;
        p.t = grid[k];
        p.u = states[k](0);
        p.v_scale = p.u * std::exp(-states[k](1));
        p.bound = 1.0 / s.mu.mu(grid[k]);
        p.bracket = p.v_scale * s.mu.mu(grid[k]);
        out.push_back(p);
    }
    return out;
}

/// Nonnegative solution of the saturating equation v' = -gamma v + sigma v^2 + beta.
[[nodiscard]] inline std::vector<double> saturating_riccati_trace(const RiccatiSetup& s,
                                                                 const std::vector<double>& grid) {
    auto rhs = [&s](double t, const Vector& y) {
        Vector d(1);
        d(0) = -s.gamma(t) * y(0) + s.sigma(t) * y(0) * y(0) + s.beta(t);
        return d;
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;
    cfg.h_init = 1e-4;
    cfg.h_min = 1e-14;
    cfg.h_max = 10.0;
    cfg.t_max = grid.back() > 0.0 ? grid.back() : 1.0;
    Vector y0(1);
    y0(0) = s.v0;
    std::vector<double> out;
    for (const auto& v : integrate_to_grid(rhs, y0, grid, cfg)) out.push_back(v(0));
    return out;
}

// ---------------------------------------------------------------------------
// Example coefficient families

/// gamma = c1(1+t)^nu1, sigma = c2(1+t)^nu2, beta = c3(1+t)^nu3, mu = c(1+t)^nu.
[[nodiscard]] inline RiccatiSetup power_riccati_setup(const PowerRiccatiParams& p) {
    RiccatiSetup s;
    s.gamma = [p](double t) { return p.c1 * std::pow(1.0 + t, p.nu1); };
    s.sigma = [p](double t) { return p.c2 * std::pow(1.0 + t, p.nu2); };
    s.beta = [p](double t) { return p.c3 * std::pow(1.0 + t, p.nu3); };
    s.mu = Envelope::custom([p](double t) { return p.c * std::pow(1.0 + t, p.nu); },
                            [p](double t) { return p.c * p.nu * std::pow(1.0 + t, p.nu - 1.0); });
    s.v0 = p.v0;
    return s;
}

struct ExponentialRiccatiParams {
    double gamma0 = 2.0;
    double nu = 1.0;
    double sigma0 = 0.5;
    double mu0 = 1.0;
    double beta0 = 0.5;
    double v0 = 0.5;
};

/// gamma = gamma0, sigma = sigma0 e^{nu t}, beta = beta0 e^{-nu t}, mu = mu0 e^{nu t}.
[[nodiscard]] inline RiccatiSetup exponential_riccati_setup(const ExponentialRiccatiParams& p) {
    RiccatiSetup s;
    s.gamma = [p](double) { return p.gamma0; };
    s.sigma = [p](double t) { return p.sigma0 * std::exp(p.nu * t); };
    s.beta = [p](double t) { return p.beta0 * std::exp(-p.nu * t); };
    s.mu = Envelope::custom([p](double t) { return p.mu0 * std::exp(p.nu * t); },
                            [p](double t) { return p.mu0 * p.nu * std::exp(p.nu * t); });
    s.v0 = p.v0;
    return s;
}

struct LogRiccatiParams {
    double t0 = 7.38905609893065;  // e^2
    double c = 0.2;
    double v0 = 1.0;
    double sigma_fraction = 0.5;  // sigma and beta as fractions of their caps
    double beta_fraction = 0.5;
};

/// gamma = 1/sqrt(log(t+t0)), mu = c log(t+t0); sigma and beta are the given
/// fractions of (c/2)(sqrt(log) - 1/(t+t0)) and (sqrt(log) - 1/(t+t0))/(2 c log^2).
[[nodiscard]] inline RiccatiSetup log_riccati_setup(const LogRiccatiParams& p) {
    if (!(p.t0 > 1.0)) fail(ErrorKind::InvalidArgument, "log Riccati family needs t0 > 1");
    RiccatiSetup s;
    s.gamma = [p](double t) { return 1.0 / std::sqrt(std::log(t + p.t0)); };
    s.sigma = [p](double t) {
        const double l = std::log(t + p.t0);
        return p.sigma_fraction * 0.5 * p.c * (std::sqrt(l) - 1.0 / (t + p.t0));
    };
    s.beta = [p](double t) {
        const double l = std::log(t + p.t0);
        return p.beta_fraction * (std::sqrt(l) - 1.0 / (t + p.t0)) / (2.0 * p.c * l * l);
    };
    s.mu = Envelope::custom([p](double t) { return p.c * std::log(t + p.t0); },
                            [p](double t) { return p.c / (t + p.t0); });
    s.v0 = p.v0;
    return s;
}

// ---------------------------------------------------------------------------
// Comparison lemma

using Rhs2 = std::function<double(double, double)>;

struct ComparisonReport {
    bool passes = false;
    double max_violation = 0.0;  // max over the grid of w - u (<= 0 when u dominates)
    double max_gap = 0.0;        // max |u - w|
    std::vector<double> t;
    std::vector<double> w;
    std::vector<double> u;
};

/// Integrates u' = g(t,u) and the saturating w' = f(t,w) on a shared grid and
/// checks u >= w - 1e-9 max(1, |u|). The precondition is sampled where the proof
/// of the comparison lemma uses it, at contact points: f(t,s) <= g(t,s) on a
/// 64 x 64 lattice covering both traces.
[[nodiscard]] inline ComparisonReport comparison_check(const Rhs2& f, const Rhs2& g, double w0, double u0,
                                                       double t_max, std::size_t points = 512) {
    if (!(w0 <= u0)) fail(ErrorKind::PreconditionSampleFailed, "w0 > u0");
    if (!(t_max > 0.0)) fail(ErrorKind::InvalidArgument, "comparison_check: t_max must be positive");
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k) grid[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);

    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.h_init = 1e-4;
    cfg.h_min = 1e-14;
    cfg.h_max = 1.0;
    cfg.t_max = t_max;
    auto lift = [](const Rhs2& r) {
        return [&r](double t, const Vector& y) {
            Vector d(1);
            d(0) = r(t, y(0));
            return d;
        };
    };
    Vector a(1), b(1);
    a(0) = w0;
    b(0) = u0;
    const auto ws = integrate_to_grid(lift(f), a, grid, cfg);
    const auto us = integrate_to_grid(lift(g), b, grid, cfg);

    ComparisonReport r;
    r.t = grid;
    double lo = std::min(w0, u0);
    double hi = std::max(w0, u0);
    for (std::size_t k = 0; k < points; ++k) {
        r.w.push_back(ws[k](0));
        r.u.push_back(us[k](0));
        lo = std::min({lo, ws[k](0), us[k](0)});
        hi = std::max({hi, ws[k](0), us[k](0)});
    }

    constexpr std::size_t lattice = 64;
    for (std::size_t i = 0; i < lattice; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(lattice - 1);
        for (std::size_t j = 0; j < lattice; ++j) {
            const double s = hi > lo ? lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(lattice - 1) : lo;
            const double fv = f(t, s);
            const double gv = g(t, s);
            if (fv > gv + 1e-12 * std::max(1.0, std::abs(gv))) {
                fail(ErrorKind::PreconditionSampleFailed, "f(t,s) > g(t,s) at t=" + std::to_string(t) +
                                                               ", s=" + std::to_string(s));
            }
        }
    }

    r.passes = true;
    r.max_violation = -kInf;
    for (std::size_t k = 0; k < points; ++k) {
        const double diff = r.w[k] - r.u[k];
        r.max_violation = std::max(r.max_violation, diff);
        r.max_gap = std::max(r.max_gap, std::abs(diff));
        if (diff > 1e-9 * std::max(1.0, std::abs(r.u[k]))) r.passes = false;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Decay lemma u' <= -a(t) f(u) + b(t)

struct AppendixSetup {
    ScalarFn a;
    ScalarFn b;
    ScalarFn f;
    double u0 = 0.0;
    bool has_condition4 = false;  // exists c > 0 with f(u) >= c for u >= 1
};

/// Sampled test for the lower bound of f on [1, u_hi].
[[nodiscard]] inline bool sampled_condition4(const ScalarFn& f, double u_hi = 100.0, double floor = 1e-8) {
    double lo = kInf;
    for (int k = 0; k <= 1000; ++k) lo = std::min(lo, f(1.0 + (u_hi - 1.0) * k / 1000.0));
    return lo > floor;
}

struct DecayReport {
    bool decays = false;
    double u_final = 0.0;
    std::vector<double> t;
    std::vector<double> u;
};

[[nodiscard]] inline DecayReport appendix_decay_check(const AppendixSetup& s, double t_max = 1e3,
                                                      std::size_t points = 512) {
    const auto grid = log_grid(t_max, points);
    for (double t : grid) {
        if (!(s.a(t) > 0.0) || !(s.b(t) >= 0.0)) {
            fail(ErrorKind::InvalidArgument, "appendix setup needs a > 0 and b >= 0 (t=" + std::to_string(t) + ")");
        }
    }
    if (s.f(0.0) != 0.0) fail(ErrorKind::InvalidArgument, "appendix setup needs f(0) = 0");
    for (int k = 1; k <= 200; ++k) {
        if (!(s.f(0.05 * k) > 0.0)) fail(ErrorKind::InvalidArgument, "appendix setup needs f(u) > 0 for u > 0");
    }

    auto rhs = [&s](double t, const Vector& y) {
        Vector d(1);
        d(0) = -s.a(t) * s.f(y(0)) + s.b(t);
        if (!std::isfinite(d(0))) fail(ErrorKind::NonFinite, "decay equation is not finite");
        return d;
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.h_init = 1e-4;
    cfg.h_min = 1e-14;
    cfg.h_max = 50.0;
    cfg.t_max = t_max;
    Vector y0(1);
    y0(0) = s.u0;
    const auto states = integrate_to_grid(rhs, y0, grid, cfg);
    DecayReport r;
    r.t = grid;
    for (const auto& v : states) r.u.push_back(v(0));
    r.u_final = r.u.back();
    r.decays = r.u_final < 0.01 * std::max(1.0, s.u0);
    return r;
}

/// f(u) = u on [0,1], e^{1-u} beyond; a = 1, b = 3/(t+c), u0 = 1 + log c.
[[nodiscard]] inline AppendixSetup appendix_counterexample(double c = 1.0) {
    if (!(c > std::exp(-1.0))) fail(ErrorKind::InvalidArgument, "counterexample needs c > 1/e");
    AppendixSetup s;
    s.f = [](double u) { return u <= 1.0 ? u : std::exp(1.0 - u); };
    s.a = [](double) { return 1.0; };
    s.b = [c](double t) { return 3.0 / (t + c); };
    s.u0 = 1.0 + std::log(c);
    s.has_condition4 = sampled_condition4(s.f);
    return s;
}

/// Same data with f replaced by min(u, 1), which satisfies the lower bound.
[[nodiscard]] inline AppendixSetup appendix_repaired(double c = 1.0) {
    AppendixSetup s = appendix_counterexample(c);
    s.f = [](double u) { return std::min(u, 1.0); };
    s.has_condition4 = sampled_condition4(s.f);
    return s;
}

}  // namespace dsm
