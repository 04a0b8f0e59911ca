#pragma once

// Built-in operator equations with known solutions. Each one ships a schedule
// that passes the regularized Newton admissibility check on its own data.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/error.hpp"
#include "dsm/flows.hpp"
#include "dsm/linalg.hpp"
#include "dsm/problem.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

struct Benchmark {
    std::string name;
    std::string description;
    Problem problem;
    Schedule schedule = Schedule::power(50.0, 5.0, 1.0);
    FlowKind method = FlowKind::RegNewton;
    // Expected exponent p in ||z(t) - y|| ~ eps(t)^p, when the operator has one.
    std::optional<double> rate_exponent;
    // z0 - y = F'(y) v; for the Gauss-Newton source condition y - z0 = T(y)^zeta w.
    std::optional<Vector> source_v;
    FlowConstants constants;
};

[[nodiscard]] inline std::vector<std::string> benchmark_names() {
    return {"scalar-linear", "scalar-cubic", "scalar-power-m", "monotone-2d", "rank-deficient-2d", "sourcewise-2d"};
}

namespace detail {

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

/// F(x) = sign(x)|x|^m on the real line.
inline Benchmark scalar_power(std::string name, double m) {
    if (!(m >= 1.0) || !std::isfinite(m)) fail(ErrorKind::InvalidArgument, "scalar-power-m needs m >= 1");
    Benchmark b;
    b.name = std::move(name);
    b.description = "F(x) = sign(x)|x|^m, root of multiplicity m at 0, z0 = 1";
    Problem& p = b.problem;
    p.name = b.name;
    p.dim = 1;
    p.eval_F = [m](const Vector& x) {
        Vector f(1);
        f(0) = std::copysign(std::pow(std::abs(x(0)), m), x(0));
        return f;
    };
    p.eval_jacobian = [m](const Vector& x) {
        DenseMatrix j(1, 1);
        j(0, 0) = m * std::pow(std::abs(x(0)), m - 1.0);
        return j;
    };
    // Bounds on [-1, 1], which contains every trajectory started at z0 = 1.
    p.N1 = m;
    if (m >= 2.0 || m == 1.0) p.N2 = m == 1.0 ? 1.0 : m * (m - 1.0);
    p.known_solution = vec({0.0});
    p.z0 = vec({1.0});
    b.rate_exponent = 1.0 / m;
    return b;
}

}  // namespace detail

/// `m` is only read by scalar-power-m.
[[nodiscard]] inline Benchmark make_benchmark(std::string_view name, double m = 3.0) {
    using detail::vec;
    if (name == "scalar-linear") {
        Benchmark b = detail::scalar_power("scalar-linear", 1.0);
        b.description = "F(x) = x, well posed, z0 = 1 (N2 = 1 is a valid, non-sharp bound)";
        return b;
    }
    if (name == "scalar-cubic") {
        Benchmark b = detail::scalar_power("scalar-cubic", 3.0);
        b.description = "F(x) = x^3, z0 = 1";
        return b;
    }
    if (name == "scalar-power-m") {
        Benchmark b = detail::scalar_power("scalar-power-m", m);
        return b;
    }
    if (name == "monotone-2d") {
        Benchmark b;
        b.name = "monotone-2d";
        b.description = "F(x) = [[1,1],[1,1]] x + (x1^3, x2^3), y = 0, z0 = (0.8, -0.6)";
        Problem& p = b.problem;
        p.name = b.name;
        p.dim = 2;
        p.eval_F = [](const Vector& x) {
            const double s = x(0) + x(1);
            return vec({s + x(0) * x(0) * x(0), s + x(1) * x(1) * x(1)});
        };
        p.eval_jacobian = [](const Vector& x) {
            DenseMatrix j(2, 2);
            j << 1.0 + 3.0 * x(0) * x(0), 1.0, 1.0, 1.0 + 3.0 * x(1) * x(1);
            return j;
        };
        p.N1 = 5.0;  // on the unit box
        p.N2 = 6.0;
        p.known_solution = vec({0.0, 0.0});
        p.z0 = vec({0.8, -0.6});
        return b;
    }
    if (name == "rank-deficient-2d") {
        Benchmark b;
        b.name = "rank-deficient-2d";
        b.description = "F(x) = diag(1, 0) x, solution set x1 = 0, z0 = (1, 1), nearest solution (0, 1)";
        Problem& p = b.problem;
        p.name = b.name;
        p.dim = 2;
        p.eval_F = [](const Vector& x) { return vec({x(0), 0.0}); };
        p.eval_jacobian = [](const Vector&) {
            DenseMatrix j = DenseMatrix::Zero(2, 2);
            j(0, 0) = 1.0;
            return j;
        };
        p.N1 = 1.0;
        p.N2 = 1.0;  // F is linear; any nonnegative bound is valid
        p.known_solution = vec({0.0, 1.0});
        p.z0 = vec({1.0, 1.0});
        b.rate_exponent = 1.0;
        return b;
    }
    if (name == "sourcewise-2d") {
        // F(x) = M(x - y) + d u phi(u.(x - y)), phi(s) = s - tanh s, M = p p^T, d = 0.1.
        // F'(y) = M, so z0 = y + M v with v = p/2 gives z0 - y = F'(y) v.
        Benchmark b;
        b.name = "sourcewise-2d";
        b.description = "F(x) = M(x-y) + 0.1 u phi(u.(x-y)), phi(s) = s - tanh s, z0 - y = F'(y) v, ||v|| = 1/2";
        constexpr double d = 0.1;
        const double r = 1.0 / std::sqrt(2.0);
        const Vector pv = vec({r, r});
        const Vector uv = vec({r, -r});
        const Vector y = vec({0.5, -0.25});
        const DenseMatrix mm = pv * pv.transpose();
        const Vector v = 0.5 * pv;
        Problem& p = b.problem;
        p.name = b.name;
        p.dim = 2;
        p.eval_F = [=](const Vector& x) {
            const Vector dx = x - y;
            const double s = uv.dot(dx);
            return Vector(mm * dx + d * uv * (s - std::tanh(s)));
        };
        p.eval_jacobian = [=](const Vector& x) {
            const double th = std::tanh(uv.dot(x - y));
            return DenseMatrix(mm + d * (th * th) * uv * uv.transpose());
        };
        p.N1 = 1.0;
        p.N2 = d * 4.0 / (3.0 * std::sqrt(3.0));  // max |phi''| = max 2 tanh sech^2
        p.known_solution = y;
        p.z0 = y + mm * v;
        b.schedule = Schedule::power(10.0, 10.0, 1.0);
        b.source_v = v;
        // T(y) = M^2 = M, so y - z0 = T(y) w with w = -v, zeta = 1.
        b.constants.zeta = 1.0;
        b.constants.source_norm = v.norm();
        return b;
    }
    fail(ErrorKind::InvalidArgument, "unknown benchmark '" + std::string(name) + "'");
}

}  // namespace dsm
