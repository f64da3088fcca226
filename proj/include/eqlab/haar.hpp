#pragma once

#include <cmath>
#include <string>

#include "eqlab/matrix.hpp"
#include "eqlab/random.hpp"

namespace eqlab {

/// Haar-distributed unitary: complex Ginibre matrix orthonormalized column by column
/// (modified Gram-Schmidt, applied twice). The implied triangular factor has a real positive
/// diagonal, which makes the distribution exactly Haar.
inline ComplexMatrix haar_random_unitary(std::size_t dim, Rng& rng) {
    if (dim == 0) throw DimensionMismatch("haar_random_unitary: dim must be >= 1");
    require_dimension(dim, "haar_random_unitary");
    ComplexMatrix u(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) u(i, j) = rng.complex_normal();

    for (std::size_t j = 0; j < dim; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < dim; ++i) proj += std::conj(u(i, k)) * u(i, j);
                for (std::size_t i = 0; i < dim; ++i) u(i, j) -= proj * u(i, k);
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) nrm += std::norm(u(i, j));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < dim; ++i) u(i, j) /= nrm;
    }
    return u;
}

/// GUE-style random Hermitian: real N(0,1) diagonal, complex Gaussian off-diagonals.
inline ComplexMatrix gaussian_hermitian(std::size_t dim, Rng& rng) {
    ComplexMatrix h(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        h(i, i) = rng.normal();
        for (std::size_t j = i + 1; j < dim; ++j) {
            h(i, j) = rng.complex_normal();
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

}  // namespace eqlab
