#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "eqlab/bipartite.hpp"
#include "eqlab/eigen.hpp"
#include "eqlab/matrix.hpp"
#include "eqlab/random.hpp"

namespace eqlab {

inline constexpr double state_norm_tolerance = 1e-10;
inline constexpr double density_tolerance = 1e-10;
inline constexpr double negativity_tolerance = 1e-9;
inline constexpr double rank_threshold = 1e-10;

/// Normalized state vector.
class PureState {
public:
    explicit PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) throw DimensionMismatch("PureState: empty amplitude vector");
        const double n = norm2(amps_);
        if (!(std::abs(n - 1.0) <= state_norm_tolerance))
            throw DimensionMismatch("PureState: norm " + std::to_string(n) + " is not 1");
    }

    /// Rescales to unit norm; the input must be nonzero.
    static PureState normalized(CVector v) {
        const double n = norm2(v);
        if (!(n > 0.0) || !std::isfinite(n)) throw DimensionMismatch("PureState::normalized: zero or non-finite vector");
        for (auto& z : v) z /= n;
        return PureState(std::move(v));
    }

    static PureState basis(std::size_t dim, std::size_t index) {
        if (index >= dim) throw IndexOutOfRange("PureState::basis: index " + std::to_string(index));
        CVector v(dim);
        v[index] = 1.0;
        return PureState(std::move(v));
    }

    std::size_t dim() const noexcept { return amps_.size(); }
    const CVector& amplitudes() const noexcept { return amps_; }
    const cplx& operator[](std::size_t i) const noexcept { return amps_[i]; }
    double norm() const { return norm2(amps_); }

    ComplexMatrix density() const { return ComplexMatrix::projector(amps_); }

private:
    CVector amps_;
};

/// |<a|b>|, insensitive to global phase.
inline double overlap_magnitude(const PureState& a, const PureState& b) {
    return std::abs(inner(a.amplitudes(), b.amplitudes()));
}

/// Hermitian, unit-trace operator. PSD is checked on demand (`check_positive`) since it needs
/// a diagonalization.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        if (!m_.is_square() || m_.empty()) throw DimensionMismatch("DensityMatrix: non-square " + m_.shape());
        const double herm = hermiticity_defect(m_);
        if (!(herm <= density_tolerance))
            throw NotHermitian("DensityMatrix: max|ρ - ρ†| = " + std::to_string(herm));
        const cplx tr = m_.trace();
        if (!(std::abs(tr - 1.0) <= density_tolerance))
            throw DimensionMismatch("DensityMatrix: trace " + std::to_string(tr.real()) + " is not 1");
    }

    explicit DensityMatrix(const PureState& psi) : m_(psi.density()) {}

    static DensityMatrix maximally_mixed(std::size_t dim) {
        ComplexMatrix m = ComplexMatrix::identity(dim);
        m *= 1.0 / static_cast<double>(dim);
        return DensityMatrix(std::move(m));
    }

    std::size_t dim() const noexcept { return m_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }

    RVector eigenvalues() const { return hermitian_eigenvalues(m_); }

    /// Throws if the smallest eigenvalue is below -1e-9.
    void check_positive() const {
        const RVector ev = eigenvalues();
        if (ev.front() < -negativity_tolerance)
            throw NotHermitian("DensityMatrix: eigenvalue " + std::to_string(ev.front()) + " is negative");
    }

private:
    ComplexMatrix m_;
};

/// Orthonormal basis of a subspace H_R, stored as the columns of an ambient_dim x d_R matrix.
class Subspace {
public:
    explicit Subspace(ComplexMatrix basis) : basis_(std::move(basis)) {
        if (basis_.rows() == 0 || basis_.cols() == 0 || basis_.cols() > basis_.rows())
            throw DimensionMismatch("Subspace: basis shape " + basis_.shape());
        const double defect = unitarity_defect(basis_);
        if (!(defect <= 1e-10))
            throw DimensionMismatch("Subspace: basis columns not orthonormal (defect " + std::to_string(defect) + ")");
    }

    static Subspace full(std::size_t dim) { return Subspace(ComplexMatrix::identity(dim)); }

    /// |ψ>_S ⊗ H_B
    static Subspace product_fixed_system(const PureState& psi_s, const BipartiteSpace& space) {
        if (psi_s.dim() != space.d_S()) throw DimensionMismatch("product_fixed_system: d_S mismatch");
        ComplexMatrix b(space.dim(), space.d_B());
        for (std::size_t s = 0; s < space.d_S(); ++s)
            for (std::size_t j = 0; j < space.d_B(); ++j) b(s * space.d_B() + j, j) = psi_s[s];
        return Subspace(std::move(b));
    }

    /// H_S ⊗ |φ>_B
    static Subspace product_fixed_bath(const BipartiteSpace& space, const PureState& phi_b) {
        if (phi_b.dim() != space.d_B()) throw DimensionMismatch("product_fixed_bath: d_B mismatch");
        ComplexMatrix b(space.dim(), space.d_S());
        for (std::size_t s = 0; s < space.d_S(); ++s)
            for (std::size_t j = 0; j < space.d_B(); ++j) b(s * space.d_B() + j, s) = phi_b[j];
        return Subspace(std::move(b));
    }

    std::size_t ambient_dim() const noexcept { return basis_.rows(); }
    std::size_t dim() const noexcept { return basis_.cols(); }
    const ComplexMatrix& basis() const noexcept { return basis_; }

    /// Π_R = basis basis†
    ComplexMatrix projector() const { return basis_ * basis_.adjoint(); }

    /// <v|Π_R|v>
    double weight(std::span<const cplx> v) const {
        const CVector c = adjoint_times(basis_, v);
        double s = 0.0;
        for (const auto& z : c) s += std::norm(z);
        return s;
    }

private:
    ComplexMatrix basis_;
};

/// Haar-random pure state in the subspace: complex Gaussian coefficients on the basis, normalized.
inline PureState haar_random_state(const Subspace& subspace, Rng& rng) {
    CVector coeffs(subspace.dim());
    for (auto& z : coeffs) z = rng.complex_normal();
    const double n = norm2(coeffs);
    for (auto& z : coeffs) z /= n;
    return PureState::normalized(subspace.basis() * coeffs);
}

inline PureState haar_random_state(std::size_t dim, Rng& rng) {
    CVector v(dim);
    for (auto& z : v) z = rng.complex_normal();
    return PureState::normalized(std::move(v));
}

/// |ψ>_S |φ>_B
inline PureState product_state(const PureState& psi_s, const PureState& phi_b, const BipartiteSpace& space) {
    if (psi_s.dim() != space.d_S() || phi_b.dim() != space.d_B())
        throw DimensionMismatch("product_state: factor dimensions do not match the space");
    return PureState::normalized(kronecker_product(psi_s.amplitudes(), phi_b.amplitudes()));
}

/// tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ.
inline double purity(const ComplexMatrix& rho) {
    double s = 0.0;
    for (const auto& z : rho.data()) s += std::norm(z);
    return s;
}
inline double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

/// d_eff = 1 / tr(ρ²)
inline double effective_dimension(const ComplexMatrix& rho) { return 1.0 / purity(rho); }
inline double effective_dimension(const DensityMatrix& rho) { return effective_dimension(rho.matrix()); }

/// Count of eigenvalues above 1e-10.
inline std::size_t numerical_rank(const ComplexMatrix& rho) {
    const RVector ev = hermitian_eigenvalues(rho);
    return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [](double x) { return x > rank_threshold; }));
}

/// D(ρ1, ρ2) = ½ Σ|λ_i(ρ1 - ρ2)|
inline double trace_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw DimensionMismatch("trace_distance: " + rho1.shape() + " vs " + rho2.shape());
    const ComplexMatrix diff = rho1 - rho2;
    double s = 0.0;
    for (double l : hermitian_eigenvalues(diff)) s += std::abs(l);
    return 0.5 * s;
}
inline double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    return trace_distance(rho1.matrix(), rho2.matrix());
}

}  // namespace eqlab
