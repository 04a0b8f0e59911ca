#pragma once

// Schedule admissibility diagnostics for the convergence theorems, plus the
// pointwise Riccati-condition checker.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsm/envelope.hpp"
#include "dsm/error.hpp"
#include "dsm/flows.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

struct TheoremCheck {
    std::string theorem;
    bool passes = false;
    std::string reason;  // empty on pass, otherwise the violated inequality
};

struct Admissibility {
    double C_eps = kInf;
    std::optional<double> C0;
    std::optional<double> C_alpha;
    std::vector<TheoremCheck> checks;

    [[nodiscard]] bool passes() const {
        return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.passes; });
    }
    [[nodiscard]] std::string first_failure() const {
        for (const auto& c : checks) {
            if (!c.passes) return c.theorem + ": " + c.reason;
        }
        return {};
    }
};

namespace detail {

inline std::string g(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

/// Right-hand side of the lower bound on eps(0) for the regularized Newton flow.
[[nodiscard]] inline double theorem32_eps0_bound(double c_eps_value, double N2, double dist0) {
    const double one_minus = 1.0 - c_eps_value;
    return N2 * dist0 / one_minus * std::max(1.0, 2.0 * c_eps_value / one_minus);
}

/// Regularized Newton: C_eps < 1 and eps(0) > N2 dist0/(1-C) max{1, 2C/(1-C)}.
[[nodiscard]] inline Admissibility check_theorem32(const Schedule& s, double N2, double dist0) {
    if (!(N2 >= 0.0) || !(dist0 >= 0.0)) fail(ErrorKind::InvalidArgument, "check_theorem32: N2, dist0 must be >= 0");
    Admissibility a;
    a.C_eps = c_eps(s);
    TheoremCheck c{"newton", false, {}};
    if (std::isinf(a.C_eps)) {
        c.reason = "C_eps = +inf";
    } else if (!(a.C_eps < 1.0)) {
        c.reason = "C_eps = " + detail::g(a.C_eps) + " is not below 1";
    } else {
        const double bound = theorem32_eps0_bound(a.C_eps, N2, dist0);
        if (s.eps(0.0) > bound) {
            c.passes = true;
        } else {
            c.reason = "eps(0) = " + detail::g(s.eps(0.0)) + " does not exceed N2*dist0/(1-C)*max(1,2C/(1-C)) = " +
                       detail::g(bound);
        }
    }
    a.checks.push_back(std::move(c));
    return a;
}

/// Regularized simple iteration: eps decreases to 0 and eps'/eps^2 -> 0.
[[nodiscard]] inline Admissibility check_theorem33(const Schedule& s) {
    Admissibility a;
    a.C_eps = c_eps(s);
    TheoremCheck c{"simple", false, {}};
    switch (s.kind()) {
        case ScheduleKind::Power:
            if (s.nu() < 1.0) {
                c.passes = true;
            } else {
                c.reason = "|eps'|/eps^2 does not tend to 0 (power family needs nu < 1, got nu = " +
                           detail::g(s.nu()) + ")";
            }
            break;
        case ScheduleKind::Log: c.passes = true; break;
        case ScheduleKind::Exp: c.reason = "|eps'|/eps^2 grows without bound for the exponential family"; break;
    }
    a.checks.push_back(std::move(c));
    return a;
}

/// The C_eps < 1 test on its own (the classifier of the schedule examples).
[[nodiscard]] inline bool passes_c_eps(const Schedule& s) { return c_eps(s) < 1.0; }

struct ProjectorTheoremInput {
    double N1 = 0.0;
    double N2 = 0.0;
    double C = 0.0;        // projector constant, must be < 1/2
    double C_alpha = 0.0;  // eps(0) max alpha/eps
    double dist0 = 0.0;    // ||y - z0||
    std::optional<bool> null_space_condition;  // P_null (y - z0) = 0, when known
};

/// Projector Gauss-Newton: C < 1/2, C0 = (1/2 - C) - sup|eps'|/eps > 0, C_alpha
/// finite and (4 N1 N2 + N2 sqrt(eps0)) / (2 C0) < eps0 min{C0/(2 C_alpha), 1/dist0}.
[[nodiscard]] inline Admissibility check_theorem41(const Schedule& s, const ProjectorTheoremInput& in) {
    Admissibility a;
    a.C_eps = c_eps(s);
    a.C_alpha = in.C_alpha;
    const double gamma = 0.5 - in.C;
    const double c0 = gamma - max_log_rate(s);
    a.C0 = c0;
    TheoremCheck c{"gn-projector", false, {}};
    const double e0 = s.eps(0.0);
    if (in.null_space_condition && !*in.null_space_condition) {
        c.reason = "y - z0 has a component in the null space of T(xi)";
    } else if (!(in.C < 0.5)) {
        c.reason = "C = " + detail::g(in.C) + " is not below 1/2";
    } else if (!(c0 > 0.0)) {
        c.reason = "C0 = " + detail::g(c0) + " is not positive";
    } else if (!std::isfinite(in.C_alpha)) {
        c.reason = "C_alpha = +inf";
    } else {
        const double lhs = (4.0 * in.N1 * in.N2 + in.N2 * std::sqrt(e0)) / (2.0 * c0);
        const double m1 = in.C_alpha > 0.0 ? c0 / (2.0 * in.C_alpha) : kInf;
        const double m2 = in.dist0 > 0.0 ? 1.0 / in.dist0 : kInf;
        const double rhs = e0 * std::min(m1, m2);
        if (lhs < rhs) {
            c.passes = true;
        } else {
            c.reason = "(4 N1 N2 + N2 sqrt(eps0))/(2 C0) = " + detail::g(lhs) +
                       " is not below eps0 min{C0/(2 C_alpha), 1/dist0} = " + detail::g(rhs);
        }
    }
    a.checks.push_back(std::move(c));
    return a;
}

struct SourcewiseTheoremInput {
    double N1 = 0.0;
    double N2 = 0.0;
    double zeta = 1.0;       // in [1/2, 1]
    double source_norm = 0.0;  // ||v||
    double dist0 = 0.0;      // ||y - z0||
};

/// gamma(t) of the sourcewise Gauss-Newton flow.
[[nodiscard]] inline double sourcewise_gamma(double eps, const SourcewiseTheoremInput& in) {
    const double kap = source_kappa(in.zeta);
    return 1.0 - 0.5 * std::pow(eps, in.zeta - 0.5) * in.N2 * kap * in.source_norm -
           std::pow(in.N1, 2.0 * in.zeta + 1.0) * in.N2 * in.source_norm / (in.N1 * in.N1 + eps);
}

/// Sourcewise Gauss-Newton: gamma(t) > 0, C0 = min_t {gamma(t) - zeta|eps'|/eps} > 0
/// and N2 eps0^(zeta-1/2)/(2 C0) < min{C0/(2 kappa ||v||), eps0^zeta/dist0}.
/// The minimum is a log-grid scan over [0, 1e6] plus the t -> infinity limit.
[[nodiscard]] inline Admissibility check_theorem42(const Schedule& s, const SourcewiseTheoremInput& in) {
    if (!(in.zeta >= 0.5 && in.zeta <= 1.0)) fail(ErrorKind::InvalidArgument, "zeta must lie in [1/2, 1]");
    Admissibility a;
    a.C_eps = c_eps(s);
    double c0 = kInf;
    double gmin = kInf;
    for (double t : log_grid(1e6, 4096)) {
        const double e = s.eps(t);
        const double gam = sourcewise_gamma(e, in);
        gmin = std::min(gmin, gam);
        c0 = std::min(c0, gam - in.zeta * std::abs(s.deriv(t)) / e);
    }
    const double g_inf = sourcewise_gamma(0.0, in);
    gmin = std::min(gmin, g_inf);
    c0 = std::min(c0, g_inf - in.zeta * tail_log_rate(s));
    a.C0 = c0;

    TheoremCheck c{"gn-sourcewise", false, {}};
    const double e0 = s.eps(0.0);
    const double kap = source_kappa(in.zeta);
    if (!(gmin > 0.0)) {
        c.reason = "gamma(t) = " + detail::g(gmin) + " is not positive";
    } else if (!(c0 > 0.0)) {
        c.reason = "C0 = " + detail::g(c0) + " is not positive";
    } else {
        const double lhs = in.N2 * std::pow(e0, in.zeta - 0.5) / (2.0 * c0);
        const double m1 = in.source_norm > 0.0 ? c0 / (2.0 * kap * in.source_norm) : kInf;
        const double m2 = in.dist0 > 0.0 ? std::pow(e0, in.zeta) / in.dist0 : kInf;
        const double rhs = std::min(m1, m2);
        if (lhs < rhs) {
            c.passes = true;
        } else {
            c.reason = "N2 eps0^(zeta-1/2)/(2 C0) = " + detail::g(lhs) +
                       " is not below min{C0/(2 kappa ||v||), eps0^zeta/dist0} = " + detail::g(rhs);
        }
    }
    a.checks.push_back(std::move(c));
    return a;
}

// ---------------------------------------------------------------------------
// Riccati conditions: 0 <= sigma <= (mu/2)(gamma - mu'/mu),
// beta <= (1/(2 mu))(gamma - mu'/mu), mu(0) v(0) < 1.

using ScalarFn = std::function<double(double)>;

struct RiccatiReport {
    bool passes = true;
    std::string reason;
    std::optional<double> first_violation_t;
    double min_sigma_slack = kInf;  // (mu/2)(gamma - mu'/mu) - sigma
    double min_beta_slack = kInf;   // (1/(2mu))(gamma - mu'/mu) - beta
    std::size_t points = 0;
};

[[nodiscard]] inline RiccatiReport check_riccati_conditions(const ScalarFn& gamma, const ScalarFn& sigma,
                                                            const ScalarFn& beta, const Envelope& mu, double v0,
                                                            const std::vector<double>& t_grid) {
    require_time_grid(t_grid);
    constexpr double rel = 1e-12;
    RiccatiReport r;
    r.points = t_grid.size();
    auto violate = [&r](double t, std::string why) {
        if (!r.passes) return;
        r.passes = false;
        r.reason = std::move(why);
        r.first_violation_t = t;
    };
    if (!(mu.mu(0.0) * v0 < 1.0)) violate(0.0, "mu(0)v(0) >= 1");
    for (double t : t_grid) {
        const double g = gamma(t);
        const double sg = sigma(t);
        const double b = beta(t);
        const double m = mu.mu(t);
        const double md = mu.mu_dot(t);
        if (!std::isfinite(g) || !std::isfinite(sg) || !std::isfinite(b) || !std::isfinite(m) || !std::isfinite(md)) {
            fail(ErrorKind::NonFinite, "riccati coefficients are not finite at t=" + std::to_string(t));
        }
        const double drive = g - md / m;
        const double sig_cap = 0.5 * m * drive;
        const double beta_cap = drive / (2.0 * m);
        r.min_sigma_slack = std::min(r.min_sigma_slack, sig_cap - sg);
        r.min_beta_slack = std::min(r.min_beta_slack, beta_cap - b);
        if (sg < -rel * std::abs(sig_cap)) violate(t, "sigma(t) < 0 at t=" + detail::g(t));
        if (sg > sig_cap + rel * std::max(std::abs(sg), std::abs(sig_cap))) {
            violate(t, "sigma(t) > (mu/2)(gamma - mu'/mu) at t=" + detail::g(t));
        }
        if (b > beta_cap + rel * std::max(std::abs(b), std::abs(beta_cap))) {
            violate(t, "beta(t) > (gamma - mu'/mu)/(2 mu) at t=" + detail::g(t));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Power-family Riccati coefficients: gamma = c1(1+t)^nu1, sigma = c2(1+t)^nu2,
// beta = c3(1+t)^nu3 with mu = c(1+t)^nu. Pure parameter arithmetic.

struct PowerRiccatiParams {
    double c1 = 4.0, c2 = 1.0, c3 = 1.0;
    double nu1 = 0.0, nu2 = 0.0, nu3 = 0.0;
    double c = 1.0, nu = 0.0;
    double v0 = 0.5;
};

struct PowerRiccatiVerdict {
    bool envelope_exists = false;  // the conditions on (nu, c) hold
    bool decays = false;           // additionally v(t) -> 0 is guaranteed
    std::string reason;
};

[[nodiscard]] inline PowerRiccatiVerdict validate_power_riccati(const PowerRiccatiParams& p) {
    PowerRiccatiVerdict v;
    auto bad = [&v](std::string why) {
        if (v.reason.empty()) v.reason = std::move(why);
    };
    if (!(p.c2 > 0.0) || !(p.c3 > 0.0) || !(p.c > 0.0)) bad("c2, c3 and c must be positive");
    if (!(p.nu1 >= -1.0)) bad("nu1 < -1");
    if (!(p.nu2 - p.nu1 <= p.nu)) bad("nu < nu2 - nu1");
    if (!(p.nu <= p.nu1 - p.nu3)) bad("nu > nu1 - nu3");
    if (!(p.c1 > p.nu)) bad("c1 <= nu");
    if (p.c1 > p.nu) {
        if (!(2.0 * p.c2 / (p.c1 - p.nu) <= p.c)) bad("c < 2 c2/(c1 - nu)");
        if (!(p.c <= (p.c1 - p.nu) / (2.0 * p.c3))) bad("c > (c1 - nu)/(2 c3)");
    }
    if (!(p.c * p.v0 < 1.0)) bad("c v(0) >= 1");
    v.envelope_exists = v.reason.empty();
    // Decay: the envelope must grow, plus the existence conditions with nu = nu2 - nu1.
    const bool decay_exponents = p.nu1 >= -1.0 && p.nu2 + p.nu3 <= 2.0 * p.nu1 && p.nu1 > p.nu3;
    const bool decay_constants = p.c1 > p.nu2 - p.nu1 && 2.0 * std::sqrt(p.c2 * p.c3) <= p.c1 &&
                                 2.0 * p.c2 * p.v0 < p.c1;
    v.decays = decay_exponents && decay_constants;
    return v;
}

}  // namespace dsm
