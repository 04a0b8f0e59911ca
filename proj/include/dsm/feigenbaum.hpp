#pragma once

// Collocation system for the Feigenbaum functional equation
// g(1) g(x) = g(g(g(1) x)), g(x) = 1 + sum_i q_i |x|^{z i}, and the dimension
// continuation that extracts the scaling constant alpha_z.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/error.hpp"
#include "dsm/flows.hpp"
#include "dsm/integrator.hpp"
#include "dsm/linalg.hpp"
#include "dsm/problem.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

/// Collocation nodes on (0, 1]: uniform j/n, or power (j/n)^{1/z}. Auto picks
/// uniform for z <= 3 and power otherwise.
enum class Partition { Uniform, Power, Auto };

[[nodiscard]] constexpr std::string_view to_string(Partition p) noexcept {
    switch (p) {
        case Partition::Uniform: return "uniform";
        case Partition::Power: return "power";
        case Partition::Auto: return "auto";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<Partition> parse_partition(std::string_view s) {
    if (s == "uniform") return Partition::Uniform;
    if (s == "power") return Partition::Power;
    if (s == "auto") return Partition::Auto;
    return std::nullopt;
}

[[nodiscard]] inline Partition resolve_partition(Partition p, double z) {
    if (p != Partition::Auto) return p;
    return z <= 3.0 ? Partition::Uniform : Partition::Power;
}

[[nodiscard]] inline std::vector<double> partition_nodes(double z, int count, Partition p) {
    if (count < 1) fail(ErrorKind::InvalidArgument, "partition needs at least one node");
    const Partition r = resolve_partition(p, z);
    std::vector<double> x(static_cast<std::size_t>(count));
    for (int j = 1; j <= count; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(count);
        x[static_cast<std::size_t>(j - 1)] = r == Partition::Uniform ? u : std::pow(u, 1.0 / z);
    }
    x.back() = 1.0;
    return x;
}

struct FeigenbaumSystem {
    double z = 2.0;
    int n = 1;
    Partition partition = Partition::Auto;
    std::vector<double> nodes;

    FeigenbaumSystem() = default;
    FeigenbaumSystem(double z_, int n_, Partition p = Partition::Auto) : z(z_), n(n_), partition(p) {
        if (!(z >= 2.0) || !std::isfinite(z)) fail(ErrorKind::InvalidArgument, "Feigenbaum system needs z >= 2");
        if (n < 1) fail(ErrorKind::InvalidArgument, "Feigenbaum system needs n >= 1");
        nodes = partition_nodes(z, n, p);
    }
};

namespace detail {

/// G(x) = 1 + sum q_i |x|^{z i} and G'(x) = sum q_i z i |x|^{z i - 1} sgn(x).
struct Poly {
    const Vector& q;
    double z;

    [[nodiscard]] double value(double x) const {
        const double a = std::abs(x);
        double s = 1.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) s += q(i) * std::pow(a, z * static_cast<double>(i + 1));
        return s;
    }
    [[nodiscard]] double deriv(double x) const {
        const double a = std::abs(x);
        const double sg = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        double s = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            const double p = z * static_cast<double>(i + 1);
            s += q(i) * p * std::pow(a, p - 1.0);
        }
        return s * sg;
    }
};

}  // namespace detail

/// Residual g(1) G(x) - G(G(g(1) x)) at arbitrary nodes.
[[nodiscard]] inline Vector feigenbaum_residual(double z, const Vector& q, const std::vector<double>& nodes) {
    require_finite(q, "coefficients");
    const detail::Poly g{q, z};
    const double s = 1.0 + q.sum();
    Vector f(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double x = nodes[j];
        f(static_cast<Eigen::Index>(j)) = s * g.value(x) - g.value(g.value(s * x));
    }
    if (!f.allFinite()) fail(ErrorKind::NonFinite, "Feigenbaum residual is not finite");
    return f;
}

[[nodiscard]] inline Vector eval_system(const FeigenbaumSystem& sys, const Vector& q) {
    if (q.size() != sys.n) fail(ErrorKind::InvalidArgument, "coefficient vector has the wrong length");
    return feigenbaum_residual(sys.z, q, sys.nodes);
}

/// Exact Jacobian dF_j/dq_l = G(x_j) + s|x_j|^{zl} - |w_j|^{zl} - G'(w_j) dw_j/dq_l with
/// w_j = G(s x_j) and dw_j/dq_l = |s x_j|^{zl} + G'(s x_j) x_j.
[[nodiscard]] inline DenseMatrix eval_jacobian(const FeigenbaumSystem& sys, const Vector& q) {
    if (q.size() != sys.n) fail(ErrorKind::InvalidArgument, "coefficient vector has the wrong length");
    require_finite(q, "coefficients");
    const detail::Poly g{q, sys.z};
    const double s = 1.0 + q.sum();
    DenseMatrix j(sys.n, sys.n);
    for (int r = 0; r < sys.n; ++r) {
        const double x = sys.nodes[static_cast<std::size_t>(r)];
        const double sx = s * x;
        const double w = g.value(sx);
        const double gx = g.value(x);
        const double dgw = g.deriv(w);
        const double dgsx = g.deriv(sx);
        for (int l = 0; l < sys.n; ++l) {
            const double p = sys.z * static_cast<double>(l + 1);
            const double dw = std::pow(std::abs(sx), p) + dgsx * x;
            j(r, l) = gx + s * std::pow(std::abs(x), p) - std::pow(std::abs(w), p) - dgw * dw;
        }
    }
    if (!j.allFinite()) fail(ErrorKind::NonFinite, "Feigenbaum Jacobian is not finite");
    return j;
}

[[nodiscard]] inline Problem as_problem(const FeigenbaumSystem& sys, const Vector& start) {
    Problem p;
    p.name = "feigenbaum";
    p.dim = static_cast<std::size_t>(sys.n);
    p.eval_F = [sys](const Vector& q) { return eval_system(sys, q); };
    p.eval_jacobian = [sys](const Vector& q) { return eval_jacobian(sys, q); };
    p.z0 = start;
    return p;
}

[[nodiscard]] inline double quintic(double q) {
    return ((((q + 3.0) * q + 3.0) * q + 3.0) * q + 2.0) * q - 1.0;
}

/// Negative real roots of q^5 + 3q^4 + 3q^3 + 3q^2 + 2q - 1, ascending.
[[nodiscard]] inline std::vector<double> seed_roots_quintic() {
    std::vector<double> roots;
    constexpr double lo = -4.0;
    constexpr double step = 1e-3;
    for (int k = 0; k < 4000; ++k) {
        double a = lo + step * k;
        double b = a + step;
        double fa = quintic(a);
        const double fb = quintic(b);
        if (fa == 0.0) {
            roots.push_back(a);
            continue;
        }
        if ((fa < 0.0) == (fb < 0.0)) continue;
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = quintic(m);
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push_back(0.5 * (a + b));
    }
    return roots;
}

/// Seed of the concave branch.
inline constexpr double kConcaveSeed = -1.4021968;

/// alpha = -1/g(1) = -1/(1 + sum q).
[[nodiscard]] inline double alpha_from_coefficients(const Vector& q) {
    const double g1 = 1.0 + q.sum();
    if (!(std::abs(g1) >= 1e-14)) fail(ErrorKind::DivisionByZero, "g(1) = 1 + sum q vanishes");
    return -1.0 / g1;
}

/// Concavity of g on a uniform 200-point grid of [0, 1]: every second
/// difference must be <= 1e-8.
[[nodiscard]] inline bool is_concave(double z, const Vector& q, int points = 200, double tol = 1e-8) {
    const detail::Poly g{q, z};
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) v[static_cast<std::size_t>(k)] = g.value(static_cast<double>(k) / (points - 1));
    for (int k = 1; k + 1 < points; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (v[i - 1] - 2.0 * v[i] + v[i + 1] > tol) return false;
    }
    return true;
}

/// Residual norm on the 4n-node refinement of the same partition family.
[[nodiscard]] inline double discrepancy(double z, const Vector& q, Partition p) {
    return feigenbaum_residual(z, q, partition_nodes(z, 4 * static_cast<int>(q.size()), p)).norm();
}

// ---------------------------------------------------------------------------
// Continuation

struct ContinuationOptions {
    int n_max = 12;
    Partition partition = Partition::Auto;
    Schedule schedule = Schedule::exp(1e-12, 1.0);
    IntegratorConfig integrator = [] {
        IntegratorConfig c;
        c.rel_tol = 1e-10;
        c.abs_tol = 1e-13;
        c.h_init = 1e-3;
        c.h_min = 1e-14;
        c.h_max = 5.0;
        c.t_max = 200.0;
        c.residual_stop = 1e-12;
        c.max_steps = 200000;
        return c;
    }();
    double seed = kConcaveSeed;
    // Extra dimensions tried after one that fails to improve the discrepancy.
    int patience = 1;
    // Collocation residual above which a dimension step is not a solution.
    double accept_residual = 1e-8;
    // Enforce concavity at every z. When false, concavity selects the branch at
    // z = 2 only and is reported for larger z.
    bool require_concave = false;
};

struct DimensionStep {
    int n = 0;
    double residual = 0.0;     // at the collocation nodes
    double discrepancy = 0.0;  // on the refinement nodes
    bool concave = false;
    bool accepted = false;
    std::string status;
    double t_final = 0.0;
    long steps = 0;
    Vector q;
};

struct ContinuationResult {
    double z = 2.0;
    FlowKind method = FlowKind::RegNewton;
    Vector q;
    double alpha = 0.0;         // -1/g(1)
    double alpha_signed = 0.0;  // 1/g(1), the conventionally signed constant
    int n_final = 0;
    std::vector<DimensionStep> steps;
    std::vector<double> chain_q1;  // n = 1 solutions along z' = 2, 3, ..., z
    Vector branch_q;               // n = 2 solution at z = 2 used for the branch test
    bool branch_concave = false;
};

namespace detail {

struct SolveOutcome {
    Vector q;
    Trajectory traj;
};

inline SolveOutcome solve_collocation(const FeigenbaumSystem& sys, const Vector& start, FlowKind method,
                                      const ContinuationOptions& opt) {
    Flow flow = make_flow(method, as_problem(sys, start), opt.schedule);
    Trajectory traj = integrate(flow, opt.integrator);
    if (traj.status == TrajectoryStatus::FlowError) {
        fail(ErrorKind::NoConvergence, "flow failed for z=" + std::to_string(sys.z) + ", n=" + std::to_string(sys.n) +
                                           ": " + traj.message);
    }
    // The last sample is not necessarily the best one once the residual stalls at rounding level.
    const auto best = std::min_element(traj.samples.begin(), traj.samples.end(),
                                       [](const Sample& a, const Sample& b) { return a.residual < b.residual; });
    return {best->z, std::move(traj)};
}

}  // namespace detail

/// Solves the n = 1 equation along z' = 2, 3, ..., floor(z) (then z itself when
/// it is not an integer), each solve warm-started from the previous one.
[[nodiscard]] inline std::vector<double> n1_chain(double z, FlowKind method, const ContinuationOptions& opt) {
    std::vector<double> chain;
    Vector q(1);
    q(0) = opt.seed;
    std::vector<double> zs;
    for (double zz = 2.0; zz <= z + 1e-12; zz += 1.0) zs.push_back(zz);
    if (zs.empty() || std::abs(zs.back() - z) > 1e-12) zs.push_back(z);
    for (double zz : zs) {
        const FeigenbaumSystem sys(zz, 1, opt.partition);
        q = detail::solve_collocation(sys, q, method, opt).q;
        chain.push_back(q(0));
    }
    return chain;
}

/// Dimension continuation at fixed z. For n = 1..n_max the previous solution is
/// padded with a zero and the regularized flow is integrated on the (z, n)
/// system. The dimension stops growing when the refinement discrepancy no longer
/// improves. The result is the usable step with the smallest discrepancy.
[[nodiscard]] inline ContinuationResult continuation_solve(double z, FlowKind method, const ContinuationOptions& opt) {
    if (method != FlowKind::RegNewton && method != FlowKind::RegGNSourcewise) {
        fail(ErrorKind::InvalidArgument, "continuation uses the newton or gn-sourcewise flow");
    }
    if (opt.n_max < 1) fail(ErrorKind::InvalidArgument, "n_max must be positive");
    ContinuationResult res;
    res.z = z;
    res.method = method;
    res.chain_q1 = n1_chain(z, method, opt);
    const bool enforce = opt.require_concave || z == 2.0;

    // Branch test: the seed must continue to a concave n = 2 solution at z = 2.
    {
        const FeigenbaumSystem sys(2.0, std::min(2, opt.n_max), opt.partition);
        Vector start = Vector::Zero(sys.n);
        start(0) = res.chain_q1.front();
        const Vector q2 = detail::solve_collocation(sys, start, method, opt).q;
        res.branch_q = q2;
        res.branch_concave = eval_system(sys, q2).norm() <= opt.accept_residual && is_concave(2.0, q2) &&
                             1.0 + q2.sum() < 1.0;
        if (!res.branch_concave) {
            fail(ErrorKind::NoConcaveSolution, "seed " + std::to_string(opt.seed) +
                                                   " does not continue to a concave solution at z=2");
        }
    }

    Vector q(1);
    q(0) = res.chain_q1.back();
    // Dimension grows while the discrepancy improves on the best so far, with
    // `patience` extra dimensions allowed after a non-improving one.
    std::optional<std::size_t> best;
    int misses = 0;
    for (int n = 1; n <= opt.n_max; ++n) {
        const FeigenbaumSystem sys(z, n, opt.partition);
        Vector start = Vector::Zero(n);
        start.head(q.size()) = q;
        DimensionStep st;
        st.n = n;
        try {
            auto out = detail::solve_collocation(sys, start, method, opt);
            st.q = out.q;
            st.residual = eval_system(sys, out.q).norm();
            st.discrepancy = discrepancy(z, out.q, opt.partition);
            st.concave = is_concave(z, out.q) && 1.0 + out.q.sum() < 1.0;
            st.status = std::string(to_string(out.traj.status));
            st.t_final = out.traj.samples.back().t;
            st.steps = out.traj.stats.accepted;
        } catch (const Error& e) {
            st.status = e.what();
            res.steps.push_back(std::move(st));
            break;
        }
        const bool usable = st.residual <= opt.accept_residual && (st.concave || !enforce);
        const bool improves = usable && (!best || st.discrepancy < res.steps[*best].discrepancy);
        q = st.q;
        res.steps.push_back(std::move(st));
        if (improves) {
            best = res.steps.size() - 1;
            misses = 0;
        } else if (++misses > opt.patience) {
            break;
        }
    }
    if (best) res.steps[*best].accepted = true;
    if (!best) fail(ErrorKind::NoConcaveSolution, "no accepted solution for z=" + std::to_string(z));
    const auto& chosen = res.steps[*best];
    res.q = chosen.q;
    res.n_final = chosen.n;
    res.alpha = alpha_from_coefficients(res.q);
    res.alpha_signed = -res.alpha;
    return res;
}

/// Number of decimal digits (after the point) on which two values agree when
/// both are written with 12 decimals, and the agreed value truncated there.
struct AcceptedDigits {
    int digits = 0;
    std::string value;
};

[[nodiscard]] inline AcceptedDigits accepted_digits(double a, double b) {
    char sa[64];
    char sb[64];
    std::snprintf(sa, sizeof sa, "%.12f", a);
    std::snprintf(sb, sizeof sb, "%.12f", b);
    const std::string x(sa);
    const std::string y(sb);
    AcceptedDigits d;
    const auto dot = x.find('.');
    if (dot == std::string::npos || x.substr(0, dot + 1) != y.substr(0, y.find('.') + 1)) {
        d.value = "";
        return d;
    }
    std::size_t i = dot + 1;
    while (i < x.size() && i < y.size() && x[i] == y[i]) ++i;
    d.digits = static_cast<int>(i - dot - 1);
    d.value = x.substr(0, i);
    return d;
}

}  // namespace dsm
