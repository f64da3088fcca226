#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "eqlab/matrix.hpp"

namespace eqlab {

/// Eigenpairs of a Hermitian matrix. Column k of `eigenvectors` belongs to eigenvalues[k];
/// eigenvalues ascend.
struct EigenDecomposition {
    RVector eigenvalues;
    ComplexMatrix eigenvectors;

    /// U diag(λ) U†
    ComplexMatrix reconstruct() const {
        const std::size_t n = eigenvalues.size();
        ComplexMatrix r(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += eigenvectors(i, k) * eigenvalues[k] * std::conj(eigenvectors(j, k));
                r(i, j) = s;
            }
        return r;
    }
};

inline constexpr double default_eigen_tolerance = 1e-12;
inline constexpr int jacobi_sweep_limit = 100;
inline constexpr double hermitian_input_tolerance = 1e-12;

namespace detail {

inline double off_diagonal_max(const ComplexMatrix& a) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p)
        for (std::size_t q = p + 1; q < a.cols(); ++q) m = std::max(m, std::abs(a(p, q)));
    return m;
}

}  // namespace detail

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of a(p,q) with diag(1, e^{-iφ}) and then applies the
/// real Jacobi rotation that zeroes the resulting real symmetric 2x2 block. Converged when every
/// off-diagonal magnitude is at most tol * ||M||_F.
///
/// Throws NotHermitian when max|M - M†| exceeds 1e-12 (scaled by max(1, max|M|)) and
/// NoConvergence after `jacobi_sweep_limit` sweeps.
inline EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& m,
                                                       double tol = default_eigen_tolerance) {
    if (!m.is_square()) throw NotHermitian("hermitian_eigendecomposition: non-square " + m.shape());
    if (m.empty()) throw DimensionMismatch("hermitian_eigendecomposition: empty matrix");
    const double scale = std::max(1.0, m.max_abs());
    const double defect = hermiticity_defect(m);
    if (!(defect <= hermitian_input_tolerance * scale))
        throw NotHermitian("hermitian_eigendecomposition: max|M - M†| = " + std::to_string(defect));

    const std::size_t n = m.rows();
    ComplexMatrix a = hermitize(m);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double threshold = tol * a.frobenius_norm();

    int sweep = 0;
    while (detail::off_diagonal_max(a) > threshold) {
        if (++sweep > jacobi_sweep_limit)
            throw NoConvergence("hermitian_eigendecomposition: no convergence after " +
                                std::to_string(jacobi_sweep_limit) + " sweeps (n=" + std::to_string(n) + ")");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const cplx phase = apq / mag;  // e^{iφ}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on (p, q)
                const cplx gpp = c;
                const cplx gpq = s;
                const cplx gqp = -s * std::conj(phase);
                const cplx gqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // A <- A G
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- G† A
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;
                for (std::size_t k = 0; k < n; ++k) {  // V <- V G
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// Eigenvalues only; same algorithm.
inline RVector hermitian_eigenvalues(const ComplexMatrix& m, double tol = default_eigen_tolerance) {
    return hermitian_eigendecomposition(m, tol).eigenvalues;
}

}  // namespace eqlab
