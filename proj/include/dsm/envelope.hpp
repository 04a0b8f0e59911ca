#pragma once

// Envelope functions mu(t) > 0 with ||z(t) - x(t)|| < 1/mu(t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dsm/error.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

enum class EnvelopeForm { LambdaOverEps, LambdaOverEpsZeta, OdeDefined, Custom };

[[nodiscard]] constexpr std::string_view to_string(EnvelopeForm f) noexcept {
    switch (f) {
        case EnvelopeForm::LambdaOverEps: return "lambda/eps";
        case EnvelopeForm::LambdaOverEpsZeta: return "lambda/eps^zeta";
        case EnvelopeForm::OdeDefined: return "ode";
        case EnvelopeForm::Custom: return "custom";
    }
    return "unknown";
}

class Envelope {
public:
    using Fn = std::function<double(double)>;

    Envelope() = default;

    /// mu(t) = lambda / eps(t).
    [[nodiscard]] static Envelope lambda_over_eps(const Schedule& s, double lambda) {
        require_lambda(lambda);
        Envelope e(EnvelopeForm::LambdaOverEps, [s, lambda](double t) { return lambda / s.eps(t); },
                   [s, lambda](double t) {
                       const double v = s.eps(t);
                       return -lambda * s.deriv(t) / (v * v);
                   });
        e.lambda_ = lambda;
        return e;
    }

    /// mu(t) = lambda / eps(t)^zeta, zeta in [1/2, 1].
    [[nodiscard]] static Envelope lambda_over_eps_zeta(const Schedule& s, double lambda, double zeta) {
        require_lambda(lambda);
        if (!(zeta >= 0.5 && zeta <= 1.0)) fail(ErrorKind::InvalidArgument, "envelope: zeta must lie in [1/2, 1]");
        Envelope e(EnvelopeForm::LambdaOverEpsZeta, [s, lambda, zeta](double t) { return lambda * std::pow(s.eps(t), -zeta); },
                   [s, lambda, zeta](double t) {
                       return -zeta * lambda * s.deriv(t) * std::pow(s.eps(t), -zeta - 1.0);
                   });
        e.lambda_ = lambda;
        e.zeta_ = zeta;
        return e;
    }

    [[nodiscard]] static Envelope custom(Fn mu, Fn mu_dot) {
        return Envelope(EnvelopeForm::Custom, std::move(mu), std::move(mu_dot));
    }

    /// Internal constructor for forms built elsewhere (the ODE-defined form).
    Envelope(EnvelopeForm form, Fn mu, Fn mu_dot) : form_(form), mu_(std::move(mu)), mu_dot_(std::move(mu_dot)) {}

    [[nodiscard]] EnvelopeForm form() const noexcept { return form_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double zeta() const noexcept { return zeta_; }
    [[nodiscard]] explicit operator bool() const noexcept { return static_cast<bool>(mu_); }

    [[nodiscard]] double mu(double t) const { return mu_(t); }
    [[nodiscard]] double mu_dot(double t) const { return mu_dot_(t); }
    /// 1/mu(t): the radius of the tube around the auxiliary trajectory.
    [[nodiscard]] double radius(double t) const { return 1.0 / mu_(t); }

    /// mu <- c * mu.
    [[nodiscard]] Envelope scaled(double c) const {
        Envelope e(form_, [m = mu_, c](double t) { return c * m(t); }, [d = mu_dot_, c](double t) { return c * d(t); });
        e.lambda_ = lambda_ * c;
        e.zeta_ = zeta_;
        return e;
    }

private:
    static void require_lambda(double lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::InvalidArgument, "envelope: lambda must be positive");
    }

    EnvelopeForm form_ = EnvelopeForm::Custom;
    Fn mu_;
    Fn mu_dot_;
    double lambda_ = 1.0;
    double zeta_ = 1.0;
};

namespace detail {

/// rho(b) given rho(a) for rho' + eps rho = A |eps'| / eps, written so that no
/// exponential of the accumulated integral of eps is ever formed.
template <typename Eps, typename DEps, typename EpsInt>
double advance_rho(const Eps& eps, const DEps& deps, const EpsInt& eps_integral, double amp, double a, double b,
                   double rho_a) {
    const double decay = std::exp(-eps_integral(a, b));
    const double forcing = adaptive_simpson(
        [&](double s) { return std::abs(deps(s)) / eps(s) * std::exp(-eps_integral(s, b)); }, a, b,
        QuadratureOptions{1e-10, 40});
    return rho_a * decay + amp * forcing;
}

}  // namespace detail

/// Envelope defined by -mu'/mu^2 + eps/mu = A|eps'|/eps, i.e. rho = 1/mu solves
/// rho' + eps rho = A|eps'|/eps with rho(0) = 1/mu0. rho is tabulated at the
/// grid knots; evaluation between knots continues the quadrature from the
/// nearest knot below.
template <typename Eps, typename DEps, typename EpsInt>
[[nodiscard]] Envelope mu_ode_envelope(Eps eps, DEps deps, EpsInt eps_integral, double amp, double mu0,
                                       const std::vector<double>& t_grid) {
    if (!(amp > 0.0)) fail(ErrorKind::InvalidArgument, "mu_ode_envelope: A must be positive");
    if (!(mu0 > 0.0)) fail(ErrorKind::InvalidArgument, "mu_ode_envelope: mu0 must be positive");
    require_time_grid(t_grid);

    struct Table {
        std::vector<double> t;
        std::vector<double> rho;
    };
    auto table = std::make_shared<Table>();
    table->t = t_grid;
    table->rho.resize(t_grid.size());
    table->rho[0] = 1.0 / mu0;
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        table->rho[k] = detail::advance_rho(eps, deps, eps_integral, amp, t_grid[k - 1], t_grid[k], table->rho[k - 1]);
    }

    auto rho = [table, eps, deps, eps_integral, amp](double t) {
        const auto it = std::upper_bound(table->t.begin(), table->t.end(), t);
        const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - table->t.begin()) - 1));
        if (table->t[k] == t) return table->rho[k];
        return detail::advance_rho(eps, deps, eps_integral, amp, table->t[k], t, table->rho[k]);
    };
    auto mu = [rho](double t) { return 1.0 / rho(t); };
    auto mu_dot = [rho, eps, deps, amp](double t) {
        const double r = rho(t);
        const double rdot = amp * std::abs(deps(t)) / eps(t) - eps(t) * r;
        return -rdot / (r * r);
    };
    return Envelope(EnvelopeForm::OdeDefined, mu, mu_dot);
}

[[nodiscard]] inline Envelope mu_ode_envelope(const Schedule& s, double amp, double mu0,
                                              const std::vector<double>& t_grid) {
    return mu_ode_envelope([s](double t) { return s.eps(t); }, [s](double t) { return s.deriv(t); },
                           [s](double a, double b) { return s.integral(a, b); }, amp, mu0, t_grid);
}

}  // namespace dsm
