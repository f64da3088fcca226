#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eqlab/bipartite.hpp"
#include "eqlab/eigen.hpp"
#include "eqlab/haar.hpp"
#include "eqlab/matrix.hpp"
#include "eqlab/random.hpp"

namespace eqlab {

/// H = Σ_k E_k |E_k><E_k| with ascending energies; column k of `eigenbasis` is |E_k>.
class SpectralHamiltonian {
public:
    SpectralHamiltonian(RVector energies, ComplexMatrix eigenbasis, BipartiteSpace space)
        : energies_(std::move(energies)), eigenbasis_(std::move(eigenbasis)), space_(space) {
        const std::size_t d = energies_.size();
        if (d == 0 || eigenbasis_.rows() != d || eigenbasis_.cols() != d || space_.dim() != d)
            throw DimensionMismatch("SpectralHamiltonian: " + std::to_string(d) + " energies, eigenbasis " +
                                    eigenbasis_.shape() + ", space dim " + std::to_string(space_.dim()));
        for (double e : energies_)
            if (!std::isfinite(e)) throw DimensionMismatch("SpectralHamiltonian: non-finite energy");
        if (!std::is_sorted(energies_.begin(), energies_.end()))
            throw DimensionMismatch("SpectralHamiltonian: energies must be ascending");
        const double defect = unitarity_defect(eigenbasis_);
        if (!(defect <= 1e-10))
            throw DimensionMismatch("SpectralHamiltonian: eigenbasis not unitary (defect " + std::to_string(defect) + ")");
    }

    std::size_t dim() const noexcept { return energies_.size(); }
    const RVector& energies() const noexcept { return energies_; }
    const ComplexMatrix& eigenbasis() const noexcept { return eigenbasis_; }
    const BipartiteSpace& space() const noexcept { return space_; }
    CVector eigenvector(std::size_t k) const { return eigenbasis_.column(k); }

    double window_width() const noexcept { return energies_.back() - energies_.front(); }

    /// Smallest adjacent level spacing; +inf when d = 1.
    double min_level_spacing() const noexcept {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < energies_.size(); ++k) m = std::min(m, energies_[k] - energies_[k - 1]);
        return m;
    }

    /// U diag(E) U†
    ComplexMatrix dense() const { return EigenDecomposition{energies_, eigenbasis_}.reconstruct(); }

    friend bool operator==(const SpectralHamiltonian&, const SpectralHamiltonian&) = default;

private:
    RVector energies_;
    ComplexMatrix eigenbasis_;
    BipartiteSpace space_;
};

struct GapReport {
    bool passes = true;
    double min_gap_separation = std::numeric_limits<double>::infinity();
    /// (k,l,m,n) with E_k - E_l ≈ E_m - E_n. Degenerate levels appear as (k,l,l,k).
    std::vector<std::array<std::size_t, 4>> degenerate_pairs;
    /// Total violations found; degenerate_pairs keeps at most `max_reported` of them.
    std::size_t violation_count = 0;
    double tolerance = 0.0;

    static constexpr std::size_t max_reported = 10000;
};

inline constexpr double default_gap_relative_tolerance = 1e-9;

inline double default_gap_tolerance(const RVector& energies) {
    const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
    return default_gap_relative_tolerance * (*hi - *lo);
}

/// Non-degenerate-gap test on a sorted spectrum: every positive gap E_k - E_l (k > l) is
/// compared with its neighbours after sorting, so the check is O(d² log d).
inline GapReport gap_analysis(const RVector& energies, double tol) {
    const std::size_t d = energies.size();
    if (d < 2) throw DimensionMismatch("gap_analysis: need at least two levels");
    if (!std::is_sorted(energies.begin(), energies.end()))
        throw DimensionMismatch("gap_analysis: energies must be ascending");

    GapReport report;
    report.tolerance = tol;
    auto record = [&](std::array<std::size_t, 4> q) {
        ++report.violation_count;
        if (report.degenerate_pairs.size() < GapReport::max_reported) report.degenerate_pairs.push_back(q);
    };

    struct Gap {
        double value;
        std::size_t k, l;
    };
    std::vector<Gap> gaps;
    gaps.reserve(d * (d - 1) / 2);
    for (std::size_t k = 1; k < d; ++k)
        for (std::size_t l = 0; l < k; ++l) {
            const double g = energies[k] - energies[l];
            if (g <= tol)
                record({k, l, l, k});
            else
                gaps.push_back({g, k, l});
        }
    std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.k != b.k ? a.k < b.k : a.l < b.l;
    });
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        const double sep = gaps[i].value - gaps[i - 1].value;
        report.min_gap_separation = std::min(report.min_gap_separation, sep);
        if (sep <= tol) record({gaps[i - 1].k, gaps[i - 1].l, gaps[i].k, gaps[i].l});
    }
    report.passes = report.violation_count == 0;
    return report;
}

inline GapReport gap_analysis(const SpectralHamiltonian& h, double tol) { return gap_analysis(h.energies(), tol); }
inline GapReport gap_analysis(const SpectralHamiltonian& h) {
    return gap_analysis(h.energies(), default_gap_tolerance(h.energies()));
}

inline constexpr int resample_attempt_limit = 100;

struct EnergyWindow {
    double lo = 0.0;
    double hi = 1.0;
};

namespace detail {

inline void check_window(const EnergyWindow& w) {
    if (!(w.hi > w.lo) || !std::isfinite(w.lo) || !std::isfinite(w.hi))
        throw DimensionMismatch("energy window must satisfy lo < hi");
}

/// i.i.d. uniform draws until the (unsorted) values have non-degenerate gaps.
inline RVector draw_gapped_energies(std::size_t d, const EnergyWindow& w, Rng& rng) {
    check_window(w);
    for (int attempt = 0; attempt < resample_attempt_limit; ++attempt) {
        RVector e(d);
        for (auto& x : e) x = rng.uniform(w.lo, w.hi);
        RVector sorted = e;
        std::sort(sorted.begin(), sorted.end());
        if (d < 2 || gap_analysis(sorted, default_gap_relative_tolerance * (w.hi - w.lo)).passes) return e;
    }
    throw DegenerateHamiltonian("could not draw a spectrum with non-degenerate gaps in " +
                                std::to_string(resample_attempt_limit) + " attempts");
}

inline std::vector<std::size_t> ascending_order(const RVector& e) {
    std::vector<std::size_t> order(e.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e[a] < e[b]; });
    return order;
}

}  // namespace detail

/// Energies i.i.d. uniform on the window (resampled until the gaps are non-degenerate),
/// eigenbasis Haar-random.
inline SpectralHamiltonian random_spectral_hamiltonian(const BipartiteSpace& space, const EnergyWindow& window,
                                                       Rng& rng) {
    RVector e = detail::draw_gapped_energies(space.dim(), window, rng);
    std::sort(e.begin(), e.end());
    ComplexMatrix u = haar_random_unitary(space.dim(), rng);
    return SpectralHamiltonian(std::move(e), std::move(u), space);
}

/// H_S ⊗ 1 + 1 ⊗ H_B: energies E^S_s + E^B_b on product eigenvectors, re-sorted.
inline SpectralHamiltonian noninteracting_hamiltonian(const SpectralHamiltonian& h_s, const SpectralHamiltonian& h_b,
                                                      const BipartiteSpace& space) {
    if (h_s.dim() != space.d_S() || h_b.dim() != space.d_B())
        throw DimensionMismatch("noninteracting_hamiltonian: factor dimensions do not match the space");
    const std::size_t d = space.dim();
    RVector e(d);
    for (std::size_t s = 0; s < space.d_S(); ++s)
        for (std::size_t b = 0; b < space.d_B(); ++b) e[s * space.d_B() + b] = h_s.energies()[s] + h_b.energies()[b];
    const auto order = detail::ascending_order(e);
    RVector sorted(d);
    ComplexMatrix basis(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        const auto [s, b] = space.decompose_index(order[k]);
        sorted[k] = e[order[k]];
        for (std::size_t i = 0; i < space.d_S(); ++i)
            for (std::size_t j = 0; j < space.d_B(); ++j)
                basis(i * space.d_B() + j, k) = h_s.eigenbasis()(i, s) * h_b.eigenbasis()(j, b);
    }
    return SpectralHamiltonian(std::move(sorted), std::move(basis), space);
}

/// H = Σ_nm E_nm |n><n|_S ⊗ |m><m|_B with E_nm i.i.d. uniform on the window. The eigenvectors
/// are computational basis states; columns are ordered by energy, so the eigenbasis is a
/// permutation matrix.
inline SpectralHamiltonian diagonal_product_hamiltonian(const BipartiteSpace& space, const EnergyWindow& window,
                                                        Rng& rng) {
    const RVector e = detail::draw_gapped_energies(space.dim(), window, rng);
    const auto order = detail::ascending_order(e);
    const std::size_t d = space.dim();
    RVector sorted(d);
    ComplexMatrix basis(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        sorted[k] = e[order[k]];
        basis(order[k], k) = 1.0;
    }
    return SpectralHamiltonian(std::move(sorted), std::move(basis), space);
}

/// Gaussian Hermitian rescaled so its spectral radius is 1.
inline ComplexMatrix unit_radius_hermitian(std::size_t dim, Rng& rng) {
    ComplexMatrix h = gaussian_hermitian(dim, rng);
    const RVector ev = hermitian_eigenvalues(h);
    const double radius = std::max(std::abs(ev.front()), std::abs(ev.back()));
    h *= 1.0 / radius;
    return h;
}

/// Pieces of E σ_z ⊗ 1 + H_int + 1 ⊗ H_B, kept so callers can bound the non-spin terms.
struct SpinBathModel {
    double spin_energy = 0.0;
    ComplexMatrix interaction;  ///< H_int on the full space, spectral radius 1
    ComplexMatrix bath_term;    ///< 1_S ⊗ H_B, spectral radius 1
    ComplexMatrix dense;        ///< full Hamiltonian
    SpectralHamiltonian hamiltonian;
};

inline SpinBathModel spin_bath_model(double spin_energy, std::size_t d_B, Rng& rng) {
    if (!(spin_energy > 0.0)) throw DimensionMismatch("spin_bath_model: E must be > 0");
    if (d_B < 2) throw DimensionMismatch("spin_bath_model: d_B must be >= 2");
    const BipartiteSpace space(2, d_B);
    ComplexMatrix sigma_z{{1.0, 0.0}, {0.0, -1.0}};
    const ComplexMatrix spin_term = embed_system_operator(sigma_z, space) * cplx(spin_energy);

    for (int attempt = 0; attempt < resample_attempt_limit; ++attempt) {
        ComplexMatrix h_int = unit_radius_hermitian(space.dim(), rng);
        ComplexMatrix h_bath = embed_bath_operator(unit_radius_hermitian(d_B, rng), space);
        ComplexMatrix total = hermitize(spin_term + h_int + h_bath);
        EigenDecomposition eig = hermitian_eigendecomposition(total);
        if (!gap_analysis(eig.eigenvalues, default_gap_tolerance(eig.eigenvalues)).passes) continue;
        SpectralHamiltonian h(std::move(eig.eigenvalues), std::move(eig.eigenvectors), space);
        return SpinBathModel{spin_energy, std::move(h_int), std::move(h_bath), std::move(total), std::move(h)};
    }
    throw DegenerateHamiltonian("spin_bath_model: no non-degenerate sample in " +
                                std::to_string(resample_attempt_limit) + " attempts");
}

inline SpectralHamiltonian spin_bath_hamiltonian(double spin_energy, std::size_t d_B, Rng& rng) {
    return spin_bath_model(spin_energy, d_B, rng).hamiltonian;
}

}  // namespace eqlab
