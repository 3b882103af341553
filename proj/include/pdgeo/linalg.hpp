#pragma once

#include <pdgeo/rng.hpp>
#include <pdgeo/types.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace pdgeo::linalg {

/// Leading singular triplets or eigenpairs, values sorted nonincreasing,
/// columns of `vectors` orthonormal.
struct SpectralFactors {
    Vector values;
    Matrix vectors;       // U (singular) or eigenvectors
    Matrix right_vectors; // V for singular factors, empty otherwise
};

inline constexpr double kSpectralTol = 1e-12;
inline constexpr Index kLanczosThreshold = 64;

/// Thin SVD with singular values in nonincreasing order.
inline SpectralFactors svd(const Matrix& x)
{
    Eigen::BDCSVD<Matrix> solver(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("svd: decomposition failed to converge");
    }
    return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

/// Full symmetric eigendecomposition, eigenvalues sorted nonincreasing.
inline SpectralFactors symmetric_eigen(const Matrix& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("symmetric_eigen: decomposition failed to converge");
    }
    // Eigen returns ascending order.
    return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse(), Matrix()};
}

namespace detail {

// One Lanczos pass of dimension `steps` with full reorthogonalization.
// Returns false if the top-k Ritz pairs did not reach the residual tolerance.
inline bool lanczos_pass(const Matrix& s, Index k, Index steps, SpectralFactors& out)
{
    const Index n = s.rows();
    Matrix basis(n, steps);
    Vector alpha = Vector::Zero(steps);
    Vector beta = Vector::Zero(steps);

    Rng rng(0x1a2c05ULL);
    auto random_unit_orthogonal = [&](Index filled) {
        Vector v(n);
        for (int attempt = 0; attempt < 8; ++attempt) {
            for (Index i = 0; i < n; ++i) {
                v[i] = rng.uniform(-1.0, 1.0);
            }
            for (int pass = 0; pass < 2; ++pass) {
                v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
            }
            const double nv = v.norm();
            if (nv > 1e-8) {
                return Vector(v / nv);
            }
        }
        return Vector(Vector::Zero(n));
    };

    basis.col(0) = random_unit_orthogonal(0);
    Index m = steps;
    for (Index j = 0; j < steps; ++j) {
        Vector w = s * basis.col(j);
        alpha[j] = basis.col(j).dot(w);
        for (int pass = 0; pass < 2; ++pass) {
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        }
        if (j + 1 == steps) {
            beta[j] = w.norm();
            break;
        }
        const double bj = w.norm();
        if (bj <= 1e-12 * std::max(1.0, std::abs(alpha[j]))) {
            // Invariant subspace: continue with a fresh orthogonal direction.
            beta[j] = 0.0;
            Vector fresh = random_unit_orthogonal(j + 1);
            if (fresh.squaredNorm() == 0.0) {
                m = j + 1;
                break;
            }
            basis.col(j + 1) = fresh;
        } else {
            beta[j] = bj;
            basis.col(j + 1) = w / bj;
        }
    }

    Eigen::SelfAdjointEigenSolver<Matrix> tri;
    tri.computeFromTridiagonal(alpha.head(m), beta.head(std::max<Index>(m - 1, 0)),
                               Eigen::ComputeEigenvectors);
    if (tri.info() != Eigen::Success) {
        return false;
    }
    const Vector theta = tri.eigenvalues().reverse();
    const Matrix ritz = tri.eigenvectors().rowwise().reverse();
    const double scale = std::max({1.0, std::abs(theta[0]), std::abs(theta[m - 1])});
    const double tail = (m == steps) ? beta[steps - 1] : 0.0;
    const Index kk = std::min(k, m);
    for (Index i = 0; i < kk; ++i) {
        if (std::abs(tail * ritz(m - 1, i)) > 1e-11 * scale) {
            return false;
        }
    }
    out.values = theta.head(kk);
    out.vectors = basis.leftCols(m) * ritz.leftCols(kk);
    out.right_vectors.resize(0, 0);
    return kk == k;
}

} // namespace detail

/// Top-k eigenpairs of a symmetric matrix. Small matrices use the full
/// decomposition; larger ones use Lanczos with full reorthogonalization and a
/// growing Krylov dimension, falling back to the full decomposition when the
/// Ritz residuals do not settle.
inline SpectralFactors top_eigenpairs(const Matrix& s, Index k)
{
    const Index n = s.rows();
    if (k < 1 || k > n) {
        throw InvalidArgument("top_eigenpairs: k out of range");
    }
    if (n > kLanczosThreshold) {
        Index steps = std::min(n, std::max<Index>(2 * k + 20, 40));
        while (steps < n) {
            SpectralFactors f;
            if (detail::lanczos_pass(s, k, steps, f)) {
                return f;
            }
            steps = std::min(n, 2 * steps);
        }
    }
    SpectralFactors full = symmetric_eigen(s);
    return {full.values.head(k), full.vectors.leftCols(k), Matrix()};
}

} // namespace pdgeo::linalg
