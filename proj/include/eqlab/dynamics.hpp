#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "eqlab/bipartite.hpp"
#include "eqlab/hamiltonian.hpp"
#include "eqlab/matrix.hpp"
#include "eqlab/random.hpp"
#include "eqlab/state.hpp"

namespace eqlab {

/// c_k = <E_k|ψ0>, Σ|c_k|² = 1.
class EnergyCoefficients {
public:
    explicit EnergyCoefficients(CVector c) : c_(std::move(c)) {
        const double n = norm2(c_);
        if (!(std::abs(n - 1.0) <= state_norm_tolerance))
            throw DimensionMismatch("EnergyCoefficients: norm " + std::to_string(n) + " is not 1");
    }

    std::size_t dim() const noexcept { return c_.size(); }
    const CVector& values() const noexcept { return c_; }
    const cplx& operator[](std::size_t k) const noexcept { return c_[k]; }

    /// |c_k|²
    RVector populations() const {
        RVector p(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) p[k] = std::norm(c_[k]);
        return p;
    }

private:
    CVector c_;
};

inline EnergyCoefficients energy_coefficients(const PureState& psi0, const SpectralHamiltonian& h) {
    if (psi0.dim() != h.dim()) throw DimensionMismatch("energy_coefficients: state/Hamiltonian dimension mismatch");
    return EnergyCoefficients(adjoint_times(h.eigenbasis(), psi0.amplitudes()));
}

/// Σ_k c_k e^{iθ_k} |E_k> in the computational basis.
inline CVector from_eigenbasis(const EnergyCoefficients& c, const SpectralHamiltonian& h, std::span<const double> phases) {
    CVector rotated(c.dim());
    for (std::size_t k = 0; k < c.dim(); ++k) rotated[k] = c[k] * std::polar(1.0, phases[k]);
    return h.eigenbasis() * rotated;
}

inline CVector evolve_amplitudes(const EnergyCoefficients& c, const SpectralHamiltonian& h, double t) {
    RVector phases(h.dim());
    for (std::size_t k = 0; k < h.dim(); ++k) phases[k] = -h.energies()[k] * t;
    return from_eigenbasis(c, h, phases);
}

/// |ψ(t)> = Σ_k c_k e^{-iE_k t} |E_k>
inline PureState evolve(const PureState& psi0, const SpectralHamiltonian& h, double t) {
    if (!std::isfinite(t)) throw DimensionMismatch("evolve: non-finite time");
    if (t == 0.0) return psi0;
    return PureState::normalized(evolve_amplitudes(energy_coefficients(psi0, h), h, t));
}

inline void require_nondegenerate_gaps(const SpectralHamiltonian& h, const char* who) {
    if (h.dim() < 2) return;
    const GapReport report = gap_analysis(h);
    if (!report.passes)
        throw DegenerateHamiltonian(std::string(who) + ": Hamiltonian has " + std::to_string(report.violation_count) +
                                    " degenerate gap(s)");
}

/// Σ_k p_k |E_k><E_k| for given level populations.
inline ComplexMatrix dephased_operator(const RVector& populations, const SpectralHamiltonian& h) {
    return EigenDecomposition{populations, h.eigenbasis()}.reconstruct();
}

/// ω = Σ_k |c_k|² |E_k><E_k|, the infinite-time average of |ψ(t)><ψ(t)|.
inline DensityMatrix dephased_time_average(const PureState& psi0, const SpectralHamiltonian& h) {
    require_nondegenerate_gaps(h, "dephased_time_average");
    return DensityMatrix(hermitize(dephased_operator(energy_coefficients(psi0, h).populations(), h)));
}

/// Marginals of ω, computed without forming the d x d matrix.
struct EquilibriumMarginals {
    ComplexMatrix omega_S;
    ComplexMatrix omega_B;
    double purity_omega = 0.0;  ///< Σ_k |c_k|⁴

    double deff_omega() const { return 1.0 / purity_omega; }
    double deff_omega_S() const { return effective_dimension(omega_S); }
    double deff_omega_B() const { return effective_dimension(omega_B); }
};

inline EquilibriumMarginals equilibrium_marginals(const RVector& populations, const SpectralHamiltonian& h) {
    const BipartiteSpace& space = h.space();
    const std::size_t dS = space.d_S(), dB = space.d_B();
    EquilibriumMarginals out{ComplexMatrix(dS, dS), ComplexMatrix(dB, dB), 0.0};
    const ComplexMatrix& u = h.eigenbasis();
    CVector col(h.dim());
    for (std::size_t k = 0; k < h.dim(); ++k) {
        const double p = populations[k];
        out.purity_omega += p * p;
        if (p == 0.0) continue;
        for (std::size_t i = 0; i < h.dim(); ++i) col[i] = u(i, k);
        for (std::size_t s = 0; s < dS; ++s)
            for (std::size_t sp = 0; sp < dS; ++sp) {
                cplx acc = 0.0;
                for (std::size_t b = 0; b < dB; ++b) acc += col[s * dB + b] * std::conj(col[sp * dB + b]);
                out.omega_S(s, sp) += p * acc;
            }
        for (std::size_t b = 0; b < dB; ++b)
            for (std::size_t bp = 0; bp < dB; ++bp) {
                cplx acc = 0.0;
                for (std::size_t s = 0; s < dS; ++s) acc += col[s * dB + b] * std::conj(col[s * dB + bp]);
                out.omega_B(b, bp) += p * acc;
            }
    }
    out.omega_S = hermitize(out.omega_S);
    out.omega_B = hermitize(out.omega_B);
    return out;
}

inline EquilibriumMarginals equilibrium_marginals(const EnergyCoefficients& c, const SpectralHamiltonian& h) {
    return equilibrium_marginals(c.populations(), h);
}

/// Ψ(α) = Σ_k e^{iα_k} c_k |E_k>
inline PureState torus_state(const EnergyCoefficients& c, const SpectralHamiltonian& h, std::span<const double> alpha) {
    if (alpha.size() != h.dim() || c.dim() != h.dim())
        throw DimensionMismatch("torus_state: phase vector length " + std::to_string(alpha.size()) +
                                " vs dimension " + std::to_string(h.dim()));
    return PureState::normalized(from_eigenbasis(c, h, alpha));
}

struct TimeSampling {
    double t_max_factor = 1e3;  ///< t_max = factor / (minimum level spacing)
    std::size_t n_samples = 2000;

    double t_max(const SpectralHamiltonian& h) const { return t_max_factor / h.min_level_spacing(); }
};

/// Stratified grid on [0, t_max]: t_j = (j + u_j) t_max / n with u_j uniform on [0, 1).
inline RVector stratified_times(double t_max, std::size_t n, Rng& rng) {
    RVector t(n);
    const double w = t_max / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = (static_cast<double>(j) + rng.uniform()) * w;
    return t;
}

/// D(ρ_S(t), ω_S) at each time.
inline RVector subsystem_distances(const EnergyCoefficients& c, const SpectralHamiltonian& h,
                                   const ComplexMatrix& omega_S, std::span<const double> times) {
    RVector out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const CVector psi = evolve_amplitudes(c, h, times[j]);
        out[j] = trace_distance(reduced_system_state(psi, h.space()), omega_S);
    }
    return out;
}

/// (1/n) Σ_j |ψ(t_j)><ψ(t_j)|
inline ComplexMatrix sampled_time_average(const PureState& psi0, const SpectralHamiltonian& h,
                                          std::span<const double> times) {
    const EnergyCoefficients c = energy_coefficients(psi0, h);
    ComplexMatrix avg(h.dim(), h.dim());
    for (double t : times) avg += ComplexMatrix::projector(evolve_amplitudes(c, h, t));
    avg *= 1.0 / static_cast<double>(times.size());
    return avg;
}

struct TrajectoryStats {
    double mean_distance = 0.0;
    double max_distance = 0.0;
    std::vector<std::pair<double, double>> exceed_fraction;  ///< (K, fraction with D > K * mean)
    std::size_t sample_count = 0;
    double t_max = 0.0;
    RVector distances;

    double exceed_fraction_for(double k) const {
        for (const auto& [kk, f] : exceed_fraction)
            if (kk == k) return f;
        throw IndexOutOfRange("exceed_fraction_for: threshold not computed");
    }
};

inline const std::vector<double>& default_thresholds() {
    static const std::vector<double> k{2.0, 5.0, 10.0};
    return k;
}

inline TrajectoryStats summarize_distances(RVector distances, std::span<const double> thresholds, double t_max) {
    TrajectoryStats st;
    st.sample_count = distances.size();
    st.t_max = t_max;
    CompensatedSum sum;
    for (double x : distances) {
        sum.add(x);
        st.max_distance = std::max(st.max_distance, x);
    }
    st.mean_distance = distances.empty() ? 0.0 : sum.value() / static_cast<double>(distances.size());
    for (double k : thresholds) {
        const auto over = std::count_if(distances.begin(), distances.end(),
                                        [&](double x) { return x > k * st.mean_distance; });
        st.exceed_fraction.emplace_back(k, static_cast<double>(over) / static_cast<double>(distances.size()));
    }
    st.distances = std::move(distances);
    return st;
}

/// Time statistics of D(ρ_S(t), ω_S) over a stratified grid on [0, t_max]; ω_S is exact.
inline TrajectoryStats trajectory_statistics(const PureState& psi0, const SpectralHamiltonian& h, double t_max,
                                             std::size_t n_samples, std::span<const double> thresholds, Rng& rng) {
    if (n_samples < 2) throw DimensionMismatch("trajectory_statistics: n_samples must be >= 2");
    require_nondegenerate_gaps(h, "trajectory_statistics");
    const EnergyCoefficients c = energy_coefficients(psi0, h);
    const EquilibriumMarginals eq = equilibrium_marginals(c, h);
    const RVector times = stratified_times(t_max, n_samples, rng);
    return summarize_distances(subsystem_distances(c, h, eq.omega_S, times), thresholds, t_max);
}

}  // namespace eqlab
