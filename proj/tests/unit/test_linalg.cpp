#include <gtest/gtest.h>

#include <random>

#include "dsm/linalg.hpp"

using namespace dsm;

namespace {

DenseMatrix random_spd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return a * a.transpose() + 0.1 * DenseMatrix::Identity(n, n);
}

Vector random_vec(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

}  // namespace

TEST(RegularizedSolve, MatchesExplicitInverseOnSpd) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const DenseMatrix a = random_spd(rng, 5);
        const Vector b = random_vec(rng, 5);
        const double eps = std::pow(10.0, -3.0 + 4.0 * (trial % 10) / 9.0);
        const DenseMatrix m = a + eps * DenseMatrix::Identity(5, 5);
        const Vector oracle = m.inverse() * b;
        const Vector x = regularized_solve(a, eps, b);
        EXPECT_LE((x - oracle).norm(), 1e-10 * (1.0 + oracle.norm()));
    }
}

TEST(RegularizedSolve, RejectsBadInput) {
    const DenseMatrix a = DenseMatrix::Identity(2, 2);
    EXPECT_THROW((void)regularized_solve(a, 0.0, Vector::Ones(2)), Error);
    EXPECT_THROW((void)regularized_solve(a, 1.0, Vector::Ones(3)), Error);
    DenseMatrix m = -DenseMatrix::Identity(2, 2);
    try {
        (void)regularized_solve(m, 1.0, Vector::Ones(2));
        FAIL() << "singular A + eps I accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SolveFailed);
    }
}

TEST(RegularizedLsq, MatchesNormalEquations) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        DenseMatrix j(5, 5);
        for (int c = 0; c < 5; ++c) j.col(c) = random_vec(rng, 5);
        const Vector r = random_vec(rng, 5);
        const Vector d = random_vec(rng, 5);
        const double eps = 0.01 + 0.1 * trial;
        const DenseMatrix t = j.transpose() * j + eps * DenseMatrix::Identity(5, 5);
        const Vector oracle = t.inverse() * (j.transpose() * r + eps * d);
        EXPECT_LE((regularized_lsq(j, eps, r, d) - oracle).norm(), 1e-9 * (1.0 + oracle.norm()));
    }
}

TEST(CheckedSolve, RefusesSingularSystems) {
    DenseMatrix a = DenseMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    try {
        (void)checked_solve(a, Vector::Ones(2));
        FAIL() << "singular system accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SolveFailed);
    }
    const Vector x = checked_solve(DenseMatrix::Identity(3, 3) * 2.0, Vector::Ones(3));
    EXPECT_NEAR(x(1), 0.5, 1e-15);
}

// Projectors are symmetric, idempotent, nested in eps and have the right rank.
TEST(SpectralProjector, Properties) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const DenseMatrix t = random_spd(rng, 6);
        const SpectralDecomposition sd(t);
        for (double eps : {0.05, 0.5, 2.0, 10.0}) {
            const DenseMatrix& p = sd.projector(eps);
            EXPECT_LE((p * p - p).norm(), 1e-10);
            EXPECT_LE((p - p.transpose()).norm(), 1e-12);
            EXPECT_NEAR(p.trace(), static_cast<double>(sd.rank_at(eps)), 1e-9);
            EXPECT_LE((p * t - t * p).norm(), 1e-9 * t.norm());
        }
        EXPECT_GE(sd.rank_at(0.05), sd.rank_at(10.0));
    }
    EXPECT_THROW((void)spectral_projector(DenseMatrix::Identity(2, 2), 0.0), Error);
    DenseMatrix ns(2, 2);
    ns << 1, 2, 0, 1;
    EXPECT_THROW(SpectralDecomposition{ns}, Error);
}
