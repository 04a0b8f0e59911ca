#pragma once

// Right-hand sides Phi(h, t) of the Cauchy problem z' = Phi(z, t), z(0) = z0.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "dsm/error.hpp"
#include "dsm/linalg.hpp"
#include "dsm/problem.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

enum class FlowKind {
    ClassicalSimple,
    ClassicalNewton,
    ClassicalGaussNewton,
    RegSimple,
    RegNewton,
    RegGNProjector,
    RegGNSourcewise,
};

[[nodiscard]] constexpr std::string_view to_string(FlowKind k) noexcept {
    switch (k) {
        case FlowKind::ClassicalSimple: return "classical-simple";
        case FlowKind::ClassicalNewton: return "classical-newton";
        case FlowKind::ClassicalGaussNewton: return "classical-gn";
        case FlowKind::RegSimple: return "simple";
        case FlowKind::RegNewton: return "newton";
        case FlowKind::RegGNProjector: return "gn-projector";
        case FlowKind::RegGNSourcewise: return "gn-sourcewise";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<FlowKind> parse_flow_kind(std::string_view s) {
    for (auto k : {FlowKind::ClassicalSimple, FlowKind::ClassicalNewton, FlowKind::ClassicalGaussNewton,
                   FlowKind::RegSimple, FlowKind::RegNewton, FlowKind::RegGNProjector, FlowKind::RegGNSourcewise}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

[[nodiscard]] constexpr bool is_regularized(FlowKind k) noexcept {
    return k == FlowKind::RegSimple || k == FlowKind::RegNewton || k == FlowKind::RegGNProjector ||
           k == FlowKind::RegGNSourcewise;
}

/// A concrete flow. Build with make_flow so that kind-specific fields are
/// checked and the projector eigendecomposition is cached up front.
struct Flow {
    FlowKind kind = FlowKind::RegNewton;
    std::shared_ptr<const Problem> problem;
    std::optional<Schedule> schedule;
    std::optional<Vector> xi;
    Vector z0;
    std::shared_ptr<const SpectralDecomposition> spectral;  // T(xi), projector variant only

    [[nodiscard]] double eps(double t) const { return schedule ? schedule->eps(t) : 0.0; }
};

[[nodiscard]] inline Flow make_flow(FlowKind kind, Problem problem, std::optional<Schedule> schedule = std::nullopt,
                                    std::optional<Vector> xi = std::nullopt) {
    validate(problem);
    Flow f;
    f.kind = kind;
    f.z0 = problem.z0;
    if (is_regularized(kind) && !schedule) {
        fail(ErrorKind::InvalidArgument, std::string(to_string(kind)) + " flow needs a schedule");
    }
    f.schedule = schedule;
    if (kind == FlowKind::RegGNProjector) {
        const Vector anchor = xi ? *xi : problem.z0;
        if (anchor.size() != problem.z0.size()) fail(ErrorKind::InvalidArgument, "xi has the wrong size");
        require_finite(anchor, "xi");
        f.xi = anchor;
        f.spectral = std::make_shared<const SpectralDecomposition>(gram_map(problem.jacobian(anchor)));
    }
    f.problem = std::make_shared<const Problem>(std::move(problem));
    return f;
}

/// Phi(h, t) for every flow kind.
[[nodiscard]] inline Vector eval_flow(const Flow& f, const Vector& h, double t) {
    require_finite(h, "flow state");
    if (!(t >= 0.0)) fail(ErrorKind::InvalidArgument, "flow time must be nonnegative");
    const Problem& p = *f.problem;
    const Vector fh = p.F(h);
    Vector out;
    switch (f.kind) {
        case FlowKind::ClassicalSimple: out = -fh; break;
        case FlowKind::ClassicalNewton: out = -checked_solve(p.jacobian(h), fh); break;
        case FlowKind::ClassicalGaussNewton: {
            const DenseMatrix j = p.jacobian(h);
            out = -checked_solve(gram_map(j), j.transpose() * fh);
            break;
        }
        case FlowKind::RegSimple: out = -(fh + f.eps(t) * (h - f.z0)); break;
        case FlowKind::RegNewton: {
            const double e = f.eps(t);
            out = -regularized_solve(p.jacobian(h), e, fh + e * (h - f.z0));
            break;
        }
        case FlowKind::RegGNSourcewise: {
            const double e = f.eps(t);
            out = -regularized_lsq(p.jacobian(h), e, fh, h - f.z0);
            break;
        }
        case FlowKind::RegGNProjector: {
            const double e = f.eps(t);
            const DenseMatrix j = p.jacobian(h);
            const DenseMatrix& proj = f.spectral->projector(e);
            const Vector d = h - f.z0;
            out = (proj * d - d) - proj * regularized_lsq(j, e, fh, Vector::Zero(d.size()));
            break;
        }
    }
    if (!out.allFinite()) fail(ErrorKind::NonFinite, "flow value is not finite at t=" + std::to_string(t));
    return out;
}

struct AuxiliaryOptions {
    double tol_scale = 1e-10;
    int max_iter = 200;
    double armijo_c = 1e-4;
};

/// Solves F(x) + eps (x - z0) = 0 by damped Newton with Armijo backtracking.
[[nodiscard]] inline Vector auxiliary_solution(const Problem& p, double eps, const Vector& warm_start,
                                               const AuxiliaryOptions& opt = {}) {
    if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "auxiliary_solution: eps must be positive");
    const double tol = opt.tol_scale * (1.0 + p.F(p.z0).norm());
    auto residual = [&](const Vector& x) { return Vector(p.F(x) + eps * (x - p.z0)); };

    Vector x = warm_start;
    Vector g = residual(x);
    double gn = g.norm();
    for (int it = 0; it < opt.max_iter; ++it) {
        if (gn <= tol) return x;
        const Vector d = -regularized_solve(p.jacobian(x), eps, g);
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            const Vector xt = x + step * d;
            Vector gt;
            try {
                gt = residual(xt);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NonFinite) throw;
                step *= 0.5;
                continue;
            }
            const double gtn = gt.norm();
            if (gtn * gtn <= (1.0 - 2.0 * opt.armijo_c * step) * gn * gn) {
                x = xt;
                g = gt;
                gn = gtn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    if (gn <= tol) return x;
    fail(ErrorKind::NoConvergence,
         "auxiliary_solution: residual " + std::to_string(gn) + " above " + std::to_string(tol) + " at eps=" +
             std::to_string(eps));
}

/// kappa(zeta) = zeta^zeta (1 - zeta)^(1 - zeta), with the zeta = 1 limit equal to 1.
[[nodiscard]] inline double source_kappa(double zeta) {
    if (zeta >= 1.0) return 1.0;
    return std::pow(zeta, zeta) * std::pow(1.0 - zeta, 1.0 - zeta);
}

/// Extra data some flows need for their semimonotonicity coefficients.
struct FlowConstants {
    double zeta = 1.0;                 // source exponent, sourcewise Gauss-Newton
    std::optional<double> source_norm;  // ||v||, sourcewise Gauss-Newton
    std::optional<double> projector_C;  // sup ||P T_eps^-1(xi) (T(y) - T(xi))||, projector variant
};

struct SemimonotonicityCoefficients {
    double alpha = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
};

namespace detail {

inline double need(const std::optional<double>& v, const char* what) {
    if (!v) fail(ErrorKind::MissingConstants, std::string(what) + " is required for this flow");
    return *v;
}

}  // namespace detail

/// alpha(t), gamma(t), sigma(t) in <Phi(h,t), h - x> <= alpha r - gamma r^2 + sigma r^3.
/// For the Gauss-Newton variants x(t) is the solution y itself, which the
/// projector variant needs for alpha.
[[nodiscard]] inline SemimonotonicityCoefficients semimonotonicity_coefficients(const Flow& f, double t,
                                                                              const FlowConstants& c = {},
                                                                              const Vector* y = nullptr) {
    const Problem& p = *f.problem;
    const double e = f.eps(t);
    SemimonotonicityCoefficients k;
    switch (f.kind) {
        case FlowKind::RegSimple: k.gamma = e; break;
        case FlowKind::RegNewton:
            k.gamma = 1.0;
            k.sigma = detail::need(p.N2, "N2") / (2.0 * e);
            break;
        case FlowKind::RegGNSourcewise: {
            const double n1 = detail::need(p.N1, "N1");
            const double n2 = detail::need(p.N2, "N2");
            const double v = detail::need(c.source_norm, "source norm ||v||");
            const double kap = source_kappa(c.zeta);
            k.alpha = std::pow(e, c.zeta) * kap * v;
            k.sigma = n2 / (4.0 * std::sqrt(e));
            k.gamma = 1.0 - 0.5 * std::pow(e, c.zeta - 0.5) * n2 * kap * v -
                      std::pow(n1, 2.0 * c.zeta + 1.0) * n2 * v / (n1 * n1 + e);
            break;
        }
        case FlowKind::RegGNProjector: {
            const double n1 = detail::need(p.N1, "N1");
            const double n2 = detail::need(p.N2, "N2");
            const double cc = detail::need(c.projector_C, "projector constant C");
            if (y == nullptr) fail(ErrorKind::MissingConstants, "projector variant needs the solution y for alpha");
            const Vector r = *y - f.z0;
            k.alpha = (f.spectral->projector(e) * r - r).norm();
            k.gamma = 0.5 - cc;
            k.sigma = n1 * n2 / e + n2 / (4.0 * std::sqrt(e));
            break;
        }
        default: fail(ErrorKind::InvalidArgument, "classical flows have no semimonotonicity certificate");
    }
    return k;
}

/// <Phi(h,t), h - x_t> - [alpha r - gamma r^2 + sigma r^3] with r = ||h - x_t||.
/// Nonpositive values certify the semimonotonicity estimate at (h, t).
[[nodiscard]] inline double semimonotonicity_margin(const Flow& f, const Vector& h, double t, const Vector& x_t,
                                                    const FlowConstants& c = {}) {
    const auto k = semimonotonicity_coefficients(f, t, c, &x_t);
    const Vector d = h - x_t;
    const double r = d.norm();
    return eval_flow(f, h, t).dot(d) - (k.alpha * r - k.gamma * r * r + k.sigma * r * r * r);
}

/// sup over the eps values of ||P_eps(xi) T_eps(xi)^-1 (T(y) - T(xi))||. Needs
/// the solution y, so it is only available for benchmarks.
template <typename Range>
[[nodiscard]] double projector_constant(const Flow& f, const Vector& y, const Range& eps_values) {
    if (f.kind != FlowKind::RegGNProjector) fail(ErrorKind::InvalidArgument, "projector_constant: wrong flow kind");
    const Problem& p = *f.problem;
    const DenseMatrix txi = gram_map(p.jacobian(*f.xi));
    const DenseMatrix diff = gram_map(p.jacobian(y)) - txi;
    double best = 0.0;
    for (double e : eps_values) {
        DenseMatrix m(diff.rows(), diff.cols());
        for (Eigen::Index c = 0; c < diff.cols(); ++c) m.col(c) = regularized_solve(txi, e, diff.col(c));
        best = std::max(best, operator_norm(f.spectral->projector(e) * m));
    }
    return best;
}

/// C_alpha = eps(0) max_t alpha(t)/eps(t) with alpha(t) = ||(P_eps(t)(xi) - I)(y - z0)||.
[[nodiscard]] inline double c_alpha(const Flow& f, const Vector& y, const std::vector<double>& t_grid) {
    if (f.kind != FlowKind::RegGNProjector) fail(ErrorKind::InvalidArgument, "c_alpha: wrong flow kind");
    const Vector r = y - f.z0;
    double best = 0.0;
    for (double t : t_grid) {
        const double e = f.eps(t);
        best = std::max(best, (f.spectral->projector(e) * r - r).norm() / e);
    }
    return f.eps(0.0) * best;
}

}  // namespace dsm
