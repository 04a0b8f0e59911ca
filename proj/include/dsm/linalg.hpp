#pragma once

// Dense finite-dimensional Hilbert-space primitives. The space is R^n with the
// Euclidean inner product; operators are dense row-major-agnostic Eigen
// matrices.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dsm/error.hpp"

namespace dsm {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

template <typename Derived>
[[nodiscard]] bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
}

inline void require_finite(const DenseMatrix& a, const char* what) {
    if (!a.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

inline void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

/// Largest singular value.
[[nodiscard]] inline double operator_norm(const DenseMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<DenseMatrix> svd(a);
    return svd.singularValues()(0);
}

/// Solves (A + eps I) x = b by LU with partial pivoting plus one step of
/// iterative refinement.
[[nodiscard]] inline Vector regularized_solve(const DenseMatrix& a, double eps, const Vector& b) {
    if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "regularized_solve: matrix is not square");
    if (a.rows() != b.size()) fail(ErrorKind::InvalidArgument, "regularized_solve: dimension mismatch");
    if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "regularized_solve: eps must be positive");
    require_finite(a, "regularized_solve: A");
    require_finite(b, "regularized_solve: b");

    DenseMatrix m = a;
    m.diagonal().array() += eps;
    Eigen::PartialPivLU<DenseMatrix> lu(m);
    if ((lu.matrixLU().diagonal().array() == 0.0).any()) {
        fail(ErrorKind::SolveFailed, "regularized_solve: A + eps I is exactly singular");
    }
    Vector x = lu.solve(b);
    x += lu.solve(b - m * x);
    if (!x.allFinite()) fail(ErrorKind::SolveFailed, "regularized_solve: solution is not finite");
    return x;
}

/// (J^T J + eps I)^-1 (J^T r + eps d) as the least-squares solution of
/// [J; sqrt(eps) I] x = [r; sqrt(eps) d]. Same value as forming the Gram
/// matrix, but the conditioning is that of J rather than its square.
[[nodiscard]] inline Vector regularized_lsq(const DenseMatrix& j, double eps, const Vector& r, const Vector& d) {
    if (j.rows() != r.size() || j.cols() != d.size()) fail(ErrorKind::InvalidArgument, "regularized_lsq: dimension mismatch");
    if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "regularized_lsq: eps must be positive");
    require_finite(j, "regularized_lsq: J");
    require_finite(r, "regularized_lsq: r");
    require_finite(d, "regularized_lsq: d");
    const Eigen::Index m = j.rows();
    const Eigen::Index n = j.cols();
    const double se = std::sqrt(eps);
    DenseMatrix a(m + n, n);
    a.topRows(m) = j;
    a.bottomRows(n) = se * DenseMatrix::Identity(n, n);
    Vector b(m + n);
    b.head(m) = r;
    b.tail(n) = se * d;
    Vector x = a.householderQr().solve(b);
    if (!x.allFinite()) fail(ErrorKind::SolveFailed, "regularized_lsq: solution is not finite");
    return x;
}

/// Unregularized solve used by the classical flows. Near-singular systems are
/// reported, never regularized behind the caller's back.
[[nodiscard]] inline Vector checked_solve(const DenseMatrix& a, const Vector& b, double rcond_floor = 1e-14) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        fail(ErrorKind::InvalidArgument, "checked_solve: dimension mismatch");
    }
    require_finite(a, "checked_solve: A");
    require_finite(b, "checked_solve: b");
    Eigen::PartialPivLU<DenseMatrix> lu(a);
    // Eigen's estimate reports 1 for an exactly zero pivot, so also look at the pivots.
    const auto piv = lu.matrixLU().diagonal().cwiseAbs();
    const double rc = std::min(lu.rcond(), a.rows() == 0 ? 1.0 : piv.minCoeff() / std::max(piv.maxCoeff(), 1e-300));
    if (!(rc >= rcond_floor)) {
        fail(ErrorKind::SolveFailed,
             "operator is numerically singular (reciprocal condition " + std::to_string(rc) + ")");
    }
    Vector x = lu.solve(b);
    if (!x.allFinite()) fail(ErrorKind::SolveFailed, "checked_solve: solution is not finite");
    return x;
}

/// T = J^T J, symmetrized to remove rounding asymmetry.
[[nodiscard]] inline DenseMatrix gram_map(const DenseMatrix& j) {
    require_finite(j, "gram_map: J");
    DenseMatrix t = j.transpose() * j;
    return 0.5 * (t + t.transpose());
}

[[nodiscard]] inline bool is_symmetric(const DenseMatrix& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Eigendecomposition of a fixed symmetric PSD operator with the orthogonal
/// projectors P = sum_{lambda_i >= eps} u_i u_i^T precomputed for every
/// possible cutoff, so evaluating P for a moving eps is a lookup.
class SpectralDecomposition {
public:
    SpectralDecomposition() = default;

    explicit SpectralDecomposition(const DenseMatrix& t) {
        if (!is_symmetric(t)) fail(ErrorKind::InvalidArgument, "spectral decomposition: matrix is not symmetric");
        require_finite(t, "spectral decomposition");
        const DenseMatrix sym = 0.5 * (t + t.transpose());
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sym);
        if (es.info() != Eigen::Success) fail(ErrorKind::EigFailed, "symmetric eigensolver did not converge");
        values_ = es.eigenvalues();
        vectors_ = es.eigenvectors();

        const auto n = static_cast<std::size_t>(sym.rows());
        projectors_.assign(n + 1, DenseMatrix::Zero(sym.rows(), sym.cols()));
        // projectors_[k] spans eigenvectors k..n-1 (eigenvalues ascending).
        for (std::size_t k = n; k-- > 0;) {
            const auto col = vectors_.col(static_cast<Eigen::Index>(k));
            projectors_[k] = projectors_[k + 1] + col * col.transpose();
        }
    }

    [[nodiscard]] const Vector& eigenvalues() const noexcept { return values_; }
    [[nodiscard]] const DenseMatrix& eigenvectors() const noexcept { return vectors_; }

    /// Number of eigenvalues >= eps.
    [[nodiscard]] std::size_t rank_at(double eps) const {
        const auto first = std::lower_bound(values_.data(), values_.data() + values_.size(), eps);
        return static_cast<std::size_t>(values_.data() + values_.size() - first);
    }

    [[nodiscard]] const DenseMatrix& projector(double eps) const {
        const auto first = std::lower_bound(values_.data(), values_.data() + values_.size(), eps);
        return projectors_[static_cast<std::size_t>(first - values_.data())];
    }

private:
    Vector values_;
    DenseMatrix vectors_;
    std::vector<DenseMatrix> projectors_;
};

[[nodiscard]] inline DenseMatrix spectral_projector(const DenseMatrix& t, double eps) {
    if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "spectral_projector: eps must be positive");
    return SpectralDecomposition(t).projector(eps);
}

}  // namespace dsm
