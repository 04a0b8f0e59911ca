#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "dsm/error.hpp"
#include "dsm/linalg.hpp"

namespace dsm {

using VectorMap = std::function<Vector(const Vector&)>;
using MatrixMap = std::function<DenseMatrix(const Vector&)>;

/// Central-difference Jacobian with step max(1e-6, 1e-6 * |x|_inf).
[[nodiscard]] inline DenseMatrix finite_difference_jacobian(const VectorMap& f, const Vector& x) {
    const double h = std::max(1e-6, 1e-6 * x.cwiseAbs().maxCoeff());
    const Vector f0 = f(x);
    DenseMatrix j(f0.size(), x.size());
    Vector xp = x;
    for (Eigen::Index l = 0; l < x.size(); ++l) {
        xp(l) = x(l) + h;
        const Vector fp = f(xp);
        xp(l) = x(l) - h;
        const Vector fm = f(xp);
        xp(l) = x(l);
        j.col(l) = (fp - fm) / (2.0 * h);
    }
    return j;
}

/// The operator equation F(z) = 0 together with everything the flows and the
/// admissibility checks need to know about it. Evaluation maps must be
/// reentrant.
struct Problem {
    std::string name;
    std::size_t dim = 0;
    VectorMap eval_F;
    MatrixMap eval_jacobian;  // empty: central differences
    std::optional<double> N1;  // sup |F'|
    std::optional<double> N2;  // sup |F''|
    std::optional<Vector> known_solution;
    Vector z0;

    [[nodiscard]] Vector F(const Vector& x) const {
        Vector v = eval_F(x);
        if (v.size() != static_cast<Eigen::Index>(dim)) {
            fail(ErrorKind::InvalidArgument, name + ": F returned a vector of the wrong size");
        }
        if (!v.allFinite()) fail(ErrorKind::NonFinite, name + ": F(x) is not finite");
        return v;
    }

    [[nodiscard]] DenseMatrix jacobian(const Vector& x) const {
        DenseMatrix j = eval_jacobian ? eval_jacobian(x) : finite_difference_jacobian(eval_F, x);
        if (j.rows() != static_cast<Eigen::Index>(dim) || j.cols() != static_cast<Eigen::Index>(dim)) {
            fail(ErrorKind::InvalidArgument, name + ": Jacobian has the wrong shape");
        }
        if (!j.allFinite()) fail(ErrorKind::NonFinite, name + ": F'(x) is not finite");
        return j;
    }

    [[nodiscard]] bool has_analytic_jacobian() const noexcept { return static_cast<bool>(eval_jacobian); }
};

inline void validate(const Problem& p) {
    if (p.dim == 0) fail(ErrorKind::InvalidArgument, "problem dimension must be positive");
    if (!p.eval_F) fail(ErrorKind::InvalidArgument, "problem has no F");
    if (p.z0.size() != static_cast<Eigen::Index>(p.dim)) fail(ErrorKind::InvalidArgument, "z0 has the wrong size");
    if (!p.z0.allFinite()) fail(ErrorKind::NonFinite, "z0 is not finite");
    if (p.N1 && !(*p.N1 >= 0.0)) fail(ErrorKind::InvalidArgument, "N1 must be nonnegative");
    if (p.N2 && !(*p.N2 >= 0.0)) fail(ErrorKind::InvalidArgument, "N2 must be nonnegative");
    if (p.known_solution && p.known_solution->size() != static_cast<Eigen::Index>(p.dim)) {
        fail(ErrorKind::InvalidArgument, "known solution has the wrong size");
    }
}

struct ConstantEstimate {
    double N1 = 0.0;
    double N2 = 0.0;
    std::size_t samples = 0;
    bool heuristic = true;  // sampled maxima are lower bounds of the true suprema
};

/// Samples |F'(x)| and the second-derivative norm sup_u |F''(x)[u, .]| over a
/// box. The second derivative is taken by central differences of the Jacobian
/// along random unit directions.
[[nodiscard]] inline ConstantEstimate estimate_constants(const Problem& p, const Vector& lo, const Vector& hi,
                                                         std::size_t samples = 256, std::uint64_t seed = 42,
                                                         std::size_t directions = 8) {
    validate(p);
    if (lo.size() != static_cast<Eigen::Index>(p.dim) || hi.size() != lo.size()) {
        fail(ErrorKind::InvalidArgument, "estimate_constants: box has the wrong dimension");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ConstantEstimate est;
    Vector x(lo.size());
    Vector u(lo.size());
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
        est.N1 = std::max(est.N1, operator_norm(p.jacobian(x)));
        const double h = 1e-4 * std::max(1.0, x.cwiseAbs().maxCoeff());
        for (std::size_t d = 0; d < directions; ++d) {
            for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = gauss(rng);
            u.normalize();
            const DenseMatrix dj = (p.jacobian(x + h * u) - p.jacobian(x - h * u)) / (2.0 * h);
            est.N2 = std::max(est.N2, operator_norm(dj));
        }
    }
    est.samples = samples;
    return est;
}

}  // namespace dsm
