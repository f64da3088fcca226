#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eqlab/bipartite.hpp"
#include "eqlab/dynamics.hpp"
#include "eqlab/hamiltonian.hpp"
#include "eqlab/haar.hpp"
#include "eqlab/matrix.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/random.hpp"
#include "eqlab/state.hpp"

namespace eqlab {

/// Result of comparing a measured quantity with an upper bound.
struct BoundCheck {
    double empirical = 0.0;
    double bound = 0.0;
    bool satisfied = false;
    double margin = 0.0;
    std::map<std::string, std::string> metadata;

    BoundCheck() = default;
    BoundCheck(double empirical_, double bound_) : empirical(empirical_), bound(bound_) {
        margin = bound - empirical;
        satisfied = margin >= 0.0;
    }

    /// Probability bounds at or above 1 carry no information.
    bool vacuous() const { return metadata.contains("vacuous") && metadata.at("vacuous") == "true"; }

    BoundCheck& label(const std::string& key, const std::string& value) {
        metadata[key] = value;
        return *this;
    }
};

namespace detail {
inline BoundCheck probability_check(double frequency, double bound) {
    BoundCheck b(frequency, bound);
    b.label("vacuous", bound >= 1.0 ? "true" : "false");
    return b;
}
}  // namespace detail

struct ConstantsTable {
    /// effective-dimension tail: (ln 2)² / (72 π³)
    static constexpr double c = std::numbers::ln2 * std::numbers::ln2 / (72.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
    /// independence tail: 2 / (9 π³)
    static constexpr double c_prime = 2.0 / (9.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
    /// torus tail: 1 / (128 π²)
    static constexpr double c_double_prime = 1.0 / (128.0 * std::numbers::pi * std::numbers::pi);
};

/// Mean and standard error of the mean.
struct SampleMoments {
    double mean = 0.0;
    double std_error = 0.0;
};

inline SampleMoments sample_moments(std::span<const double> xs) {
    SampleMoments m;
    if (xs.empty()) return m;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        CompensatedSum v;
        for (double x : xs) v.add((x - m.mean) * (x - m.mean));
        m.std_error = std::sqrt(v.value() / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return m;
}

// --- Equilibration distance bound ---------------------------------------------------------

struct Theorem1Result {
    BoundCheck bath_bound;   ///< <D>_t <= ½ sqrt(d_S / d_eff(ω_B))
    BoundCheck total_bound;  ///< <D>_t <= ½ sqrt(d_S² / d_eff(ω))
    double deff_omega = 0.0;
    double deff_omega_B = 0.0;
    EquilibriumMarginals equilibrium;
    TrajectoryStats trajectory;
};

inline Theorem1Result theorem1_check(const PureState& psi0, const SpectralHamiltonian& h, const TimeSampling& sampling,
                                     std::span<const double> thresholds, Rng& rng) {
    require_nondegenerate_gaps(h, "theorem1_check");
    const double dS = static_cast<double>(h.space().d_S());
    const EnergyCoefficients c = energy_coefficients(psi0, h);
    Theorem1Result r;
    r.equilibrium = equilibrium_marginals(c, h);
    r.deff_omega = r.equilibrium.deff_omega();
    r.deff_omega_B = r.equilibrium.deff_omega_B();
    const double t_max = sampling.t_max(h);
    const RVector times = stratified_times(t_max, sampling.n_samples, rng);
    r.trajectory = summarize_distances(subsystem_distances(c, h, r.equilibrium.omega_S, times), thresholds, t_max);
    r.bath_bound = BoundCheck(r.trajectory.mean_distance, 0.5 * std::sqrt(dS / r.deff_omega_B));
    r.total_bound = BoundCheck(r.trajectory.mean_distance, 0.5 * std::sqrt(dS * dS / r.deff_omega));
    r.bath_bound.label("theorem", "1").label("bound", "bath");
    r.total_bound.label("theorem", "1").label("bound", "total");
    return r;
}

// --- Effective dimension statistics -------------------------------------------------------

struct Theorem2Summary {
    std::size_t d_R = 0;
    std::size_t trials = 0;
    RVector deff;                ///< d_eff(ω) per trial
    SampleMoments deff_moments;
    double tail_frequency = 0.0;  ///< fraction with d_eff(ω) < d_R / 4
    BoundCheck mean_check;        ///< empirical = d_R/2 - mean, bound = 3 standard errors
    BoundCheck tail_check;        ///< empirical tail frequency vs 2 exp(-c sqrt(d_R))
};

/// d_eff(ω) = 1 / Σ_k |<E_k|Ψ>|⁴
inline double deff_of_time_average(const PureState& psi, const SpectralHamiltonian& h) {
    double s = 0.0;
    for (double p : energy_coefficients(psi, h).populations()) s += p * p;
    return 1.0 / s;
}

inline constexpr double standard_error_allowance = 3.0;

inline constexpr std::size_t min_statistics_trials = 30;

/// Trial i uses the stream derive_seed(master_seed, sweep, i).
inline Theorem2Summary theorem2_statistics(const Subspace& subspace, const SpectralHamiltonian& h, std::size_t trials,
                                           std::uint64_t master_seed, std::uint64_t sweep = 0,
                                           std::size_t workers = 1) {
    if (trials < min_statistics_trials) throw DimensionMismatch("theorem2_statistics: need at least 30 trials");
    if (subspace.ambient_dim() != h.dim()) throw DimensionMismatch("theorem2_statistics: subspace/Hamiltonian mismatch");
    require_nondegenerate_gaps(h, "theorem2_statistics");
    Theorem2Summary out;
    out.d_R = subspace.dim();
    out.trials = trials;
    const double dR = static_cast<double>(out.d_R);
    out.deff = parallel_map(trials, workers, [&](std::size_t i) {
        Rng rng(derive_seed(master_seed, sweep, i));
        return deff_of_time_average(haar_random_state(subspace, rng), h);
    });
    const auto tail = std::count_if(out.deff.begin(), out.deff.end(), [&](double d) { return d < dR / 4.0; });
    out.deff_moments = sample_moments(out.deff);
    out.tail_frequency = static_cast<double>(tail) / static_cast<double>(trials);
    out.mean_check = BoundCheck(dR / 2.0 - out.deff_moments.mean, standard_error_allowance * out.deff_moments.std_error);
    out.mean_check.label("theorem", "2i");
    out.tail_check = detail::probability_check(out.tail_frequency, 2.0 * std::exp(-ConstantsTable::c * std::sqrt(dR)));
    out.tail_check.label("theorem", "2ii");
    return out;
}

// --- Bath and subsystem independence -----------------------------------------------------

/// δ = Σ_k <E_k|Π_R/d_R|E_k> tr(tr_B |E_k><E_k|)²
inline double delta_quantity(const SpectralHamiltonian& h, const Subspace& subspace, const BipartiteSpace& space) {
    if (subspace.ambient_dim() != h.dim() || space.dim() != h.dim())
        throw DimensionMismatch("delta_quantity: inconsistent dimensions");
    const double dR = static_cast<double>(subspace.dim());
    CompensatedSum delta;
    for (std::size_t k = 0; k < h.dim(); ++k) {
        const CVector ek = h.eigenvector(k);
        const double w = subspace.weight(ek) / dR;
        if (w == 0.0) continue;
        delta.add(w * purity(reduced_system_state(ek, space)));
    }
    return delta.value();
}

struct Theorem3Summary {
    std::size_t d_R = 0;
    std::size_t trials = 0;
    double delta = 0.0;
    RVector distances;                ///< D(ω_S^Ψ, Ω_S) per trial
    SampleMoments distance_moments;
    ComplexMatrix omega_S_mean;       ///< sample estimate of Ω_S
    double omega_S_max_std_error = 0.0;  ///< largest entrywise standard error of that estimate
    double delta_bound = 0.0;         ///< sqrt(d_S δ / (4 d_R))
    double weak_bound = 0.0;          ///< sqrt(d_S / (4 d_R))
    BoundCheck delta_check;           ///< mean vs delta_bound + 3 SE
    BoundCheck weak_check;            ///< mean vs weak_bound + 3 SE
    double epsilon = 0.0;             ///< d_R^{-1/3}
    double tail_threshold = 0.0;      ///< ½ sqrt(d_S δ / d_R) + ε
    double tail_frequency = 0.0;
    BoundCheck tail_check;            ///< vs 2 exp(-c' ε² d_R)
};

/// Ω_S is estimated by the mean of ω_S^Ψ over the same trials. Trial i uses the stream
/// derive_seed(master_seed, sweep, i).
inline Theorem3Summary theorem3_statistics(const Subspace& subspace, const SpectralHamiltonian& h, std::size_t trials,
                                           std::uint64_t master_seed, std::uint64_t sweep = 0,
                                           std::size_t workers = 1) {
    if (trials < min_statistics_trials) throw DimensionMismatch("theorem3_statistics: need at least 30 trials");
    if (subspace.ambient_dim() != h.dim()) throw DimensionMismatch("theorem3_statistics: subspace/Hamiltonian mismatch");
    require_nondegenerate_gaps(h, "theorem3_statistics");
    const BipartiteSpace& space = h.space();
    const std::size_t dS = space.d_S();
    Theorem3Summary out;
    out.d_R = subspace.dim();
    out.trials = trials;
    const double dR = static_cast<double>(out.d_R);

    const std::vector<ComplexMatrix> omegas = parallel_map(trials, workers, [&](std::size_t i) {
        Rng rng(derive_seed(master_seed, sweep, i));
        const PureState psi = haar_random_state(subspace, rng);
        return equilibrium_marginals(energy_coefficients(psi, h), h).omega_S;
    });
    out.omega_S_mean = ComplexMatrix(dS, dS);
    for (const auto& w : omegas) out.omega_S_mean += w;
    out.omega_S_mean *= 1.0 / static_cast<double>(trials);
    for (std::size_t k = 0; k < dS * dS; ++k) {
        double var = 0.0;
        for (const auto& w : omegas) var += std::norm(w.data()[k] - out.omega_S_mean.data()[k]);
        var /= static_cast<double>(trials - 1);
        out.omega_S_max_std_error = std::max(out.omega_S_max_std_error, std::sqrt(var / static_cast<double>(trials)));
    }
    for (const auto& w : omegas) out.distances.push_back(trace_distance(w, out.omega_S_mean));
    out.distance_moments = sample_moments(out.distances);

    out.delta = delta_quantity(h, subspace, space);
    const double d_s = static_cast<double>(dS);
    out.delta_bound = std::sqrt(d_s * out.delta / (4.0 * dR));
    out.weak_bound = std::sqrt(d_s / (4.0 * dR));
    const double allowance = standard_error_allowance * out.distance_moments.std_error;
    out.delta_check = BoundCheck(out.distance_moments.mean, out.delta_bound + allowance);
    out.delta_check.label("theorem", "3i").label("bound", "delta");
    out.weak_check = BoundCheck(out.distance_moments.mean, out.weak_bound + allowance);
    out.weak_check.label("theorem", "3i").label("bound", "weak");

    out.epsilon = std::pow(dR, -1.0 / 3.0);
    out.tail_threshold = 0.5 * std::sqrt(d_s * out.delta / dR) + out.epsilon;
    const auto over = std::count_if(out.distances.begin(), out.distances.end(),
                                    [&](double x) { return x > out.tail_threshold; });
    out.tail_frequency = static_cast<double>(over) / static_cast<double>(trials);
    out.tail_check = detail::probability_check(
        out.tail_frequency, 2.0 * std::exp(-ConstantsTable::c_prime * out.epsilon * out.epsilon * dR));
    out.tail_check.label("theorem", "3ii");
    return out;
}

// --- Torus tail --------------------------------------------------------------------------

/// D(ρ_S(α), ω_S) for uniformly random phase vectors α.
inline RVector torus_distances(const EnergyCoefficients& c, const SpectralHamiltonian& h, const ComplexMatrix& omega_S,
                               std::size_t samples, Rng& rng) {
    RVector out(samples);
    RVector alpha(h.dim());
    for (std::size_t j = 0; j < samples; ++j) {
        for (auto& a : alpha) a = rng.phase();
        out[j] = trace_distance(reduced_system_state(from_eigenbasis(c, h, alpha), h.space()), omega_S);
    }
    return out;
}

struct Theorem4Result {
    double threshold = 0.0;  ///< sqrt(d_S / d_eff(ω_B)) + ε
    double deff_omega = 0.0;
    double deff_omega_B = 0.0;
    RVector distances;
    BoundCheck tail;         ///< empirical Pr_α{D > threshold} vs exp(-c'' ε⁴ d_eff(ω))
};

inline constexpr std::size_t min_torus_samples = 1000;

/// Treats the spectrum as rationally independent; that cannot be checked in floating point.
inline Theorem4Result theorem4_tail(const EnergyCoefficients& c, const SpectralHamiltonian& h, double epsilon,
                                    std::size_t samples, Rng& rng) {
    if (c.dim() != h.dim()) throw DimensionMismatch("theorem4_tail: coefficient/Hamiltonian mismatch");
    if (samples < min_torus_samples) throw DimensionMismatch("theorem4_tail: samples must be >= 1000");
    const EquilibriumMarginals eq = equilibrium_marginals(c, h);
    Theorem4Result r;
    r.deff_omega = eq.deff_omega();
    r.deff_omega_B = eq.deff_omega_B();
    r.threshold = std::sqrt(static_cast<double>(h.space().d_S()) / r.deff_omega_B) + epsilon;
    r.distances = torus_distances(c, h, eq.omega_S, samples, rng);
    const auto over = std::count_if(r.distances.begin(), r.distances.end(), [&](double x) { return x > r.threshold; });
    const double eps4 = epsilon * epsilon * epsilon * epsilon;
    r.tail = detail::probability_check(static_cast<double>(over) / static_cast<double>(samples),
                                       std::exp(-ConstantsTable::c_double_prime * eps4 * r.deff_omega));
    r.tail.label("theorem", "4").label("assumption", "rationally independent spectrum (not verifiable)");
    return r;
}

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_statistic(RVector a, RVector b) {
    if (a.empty() || b.empty()) throw DimensionMismatch("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// --- Weak subadditivity and bath checks --------------------------------------------------

struct SubadditivityReport {
    BoundCheck renyi_chain;         ///< tr(ω_B²)/d_S <= tr(ω²)
    BoundCheck bath_deff_chain;     ///< d_eff(ω)/d_S <= d_eff(ω_B)
    BoundCheck instantaneous_bath;  ///< max_t d_eff(ρ_B(t)) <= d_S + 1e-6
    std::size_t rank_checked = 0;
    std::size_t rank_mismatches = 0;  ///< times where rank(ρ_B(t)) != rank(ρ_S(t))
    std::size_t max_rank = 0;
    std::optional<BoundCheck> generic_chain;  ///< d_R_B/(4 d_S) <= d_eff(ω_B), when d_eff(ω) >= d_R_B/4
    double deff_omega = 0.0;
    double deff_omega_B = 0.0;

    bool all_hold() const {
        return renyi_chain.satisfied && bath_deff_chain.satisfied && instantaneous_bath.satisfied &&
               rank_mismatches == 0 && (!generic_chain || generic_chain->satisfied);
    }
};

inline constexpr double bath_deff_slack = 1e-6;
inline constexpr std::size_t rank_sample_limit = 64;

/// `bath_restricted_dim` is d_R_B for product initial states |ψ>|φ> with φ drawn from a
/// d_R_B-dimensional bath subspace; 0 skips the generic-state chain.
inline SubadditivityReport subadditivity_and_bath_checks(const PureState& psi0, const SpectralHamiltonian& h,
                                                         std::span<const double> times,
                                                         std::size_t bath_restricted_dim = 0) {
    require_nondegenerate_gaps(h, "subadditivity_and_bath_checks");
    const BipartiteSpace& space = h.space();
    const double dS = static_cast<double>(space.d_S());
    const EnergyCoefficients c = energy_coefficients(psi0, h);
    const EquilibriumMarginals eq = equilibrium_marginals(c, h);
    SubadditivityReport r;
    r.deff_omega = eq.deff_omega();
    r.deff_omega_B = eq.deff_omega_B();
    r.renyi_chain = BoundCheck(purity(eq.omega_B) / dS, eq.purity_omega);
    r.bath_deff_chain = BoundCheck(r.deff_omega / dS, r.deff_omega_B);

    double max_deff_bath = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const CVector psi = evolve_amplitudes(c, h, times[j]);
        const ComplexMatrix rho_B = reduced_bath_state(psi, space);
        max_deff_bath = std::max(max_deff_bath, effective_dimension(rho_B));
        if (j < rank_sample_limit) {
            const std::size_t rb = numerical_rank(rho_B);
            const std::size_t rs = numerical_rank(reduced_system_state(psi, space));
            ++r.rank_checked;
            r.max_rank = std::max(r.max_rank, rb);
            if (rb != rs) ++r.rank_mismatches;
        }
    }
    r.instantaneous_bath = BoundCheck(max_deff_bath, dS + bath_deff_slack);
    if (bath_restricted_dim > 0 && r.deff_omega >= static_cast<double>(bath_restricted_dim) / 4.0)
        r.generic_chain = BoundCheck(static_cast<double>(bath_restricted_dim) / (4.0 * dS), r.deff_omega_B);
    return r;
}

// --- Identities ---------------------------------------------------------------------------

/// |tr(AB) - tr((A⊗B) S)|
inline double swap_trace_identity_check(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.is_square() || a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("swap_trace_identity_check: " + a.shape() + " vs " + b.shape());
    const cplx lhs = trace_of_product(a, b);
    const cplx rhs = (kronecker_product(a, b) * swap_operator(a.rows())).trace();
    return std::abs(lhs - rhs);
}

/// Π_RR (1 + S) / (d_R (d_R + 1)) on H ⊗ H.
inline ComplexMatrix haar_pair_moment_closed_form(const Subspace& subspace) {
    const std::size_t n = subspace.ambient_dim();
    const double dR = static_cast<double>(subspace.dim());
    const ComplexMatrix p = subspace.projector();
    ComplexMatrix pp = kronecker_product(p, p);
    ComplexMatrix m = pp * (ComplexMatrix::identity(n * n) + swap_operator(n));
    m *= 1.0 / (dR * (dR + 1.0));
    return m;
}

/// Monte Carlo average of |Ψ><Ψ| ⊗ |Ψ><Ψ|; trial i uses derive_seed(master_seed, 0, i).
inline ComplexMatrix haar_pair_moment_estimate(const Subspace& subspace, std::size_t trials, std::uint64_t master_seed) {
    const std::size_t n = subspace.ambient_dim();
    require_dimension(n * n, "haar_pair_moment_estimate");
    ComplexMatrix acc(n * n, n * n);
    for (std::size_t i = 0; i < trials; ++i) {
        Rng rng(derive_seed(master_seed, 0, i));
        const PureState psi = haar_random_state(subspace, rng);
        const CVector v = kronecker_product(psi.amplitudes(), psi.amplitudes());
        for (std::size_t r = 0; r < v.size(); ++r) {
            const cplx vr = v[r];
            for (std::size_t c = 0; c < v.size(); ++c) acc(r, c) += vr * std::conj(v[c]);
        }
    }
    acc *= 1.0 / static_cast<double>(trials);
    return acc;
}

inline constexpr std::size_t min_moment_trials = 1000;

/// Max entrywise deviation between the Monte Carlo pair moment and its closed form.
inline double haar_pair_moment_check(const Subspace& subspace, std::size_t trials, std::uint64_t master_seed) {
    if (trials < min_moment_trials) throw DimensionMismatch("haar_pair_moment_check: trials must be >= 1000");
    return max_abs_diff(haar_pair_moment_estimate(subspace, trials, master_seed), haar_pair_moment_closed_form(subspace));
}

// --- Counterexamples ---------------------------------------------------------------------

struct DiagonalModelReport {
    double max_population_drift = 0.0;  ///< max_{n,t} |<n|ρ_S(t)|n> - <n|ρ_S(0)|n>| for a random ψ_S
    double basis_pair_distance = 0.0;   ///< D(ω_S for |0>_S, ω_S for |1>_S)
    double random_pair_distance = 0.0;  ///< D(ω_S^a, ω_S^b) for two random subsystem states
    double random_pair_half_imbalance = 0.0;  ///< ½ Σ_n |p_n - q_n| of their initial populations
    std::size_t times_checked = 0;
};

/// Conserved subsystem populations under Σ E_nm |n><n| ⊗ |m><m|.
inline DiagonalModelReport diagonal_model_demonstration(const BipartiteSpace& space, const EnergyWindow& window,
                                                        std::size_t n_times, Rng& rng) {
    if (space.d_S() < 2) throw DimensionMismatch("diagonal_model_demonstration: d_S must be >= 2");
    const SpectralHamiltonian h = diagonal_product_hamiltonian(space, window, rng);
    const PureState phi = haar_random_state(space.d_B(), rng);
    const PureState psi_a = haar_random_state(space.d_S(), rng);
    const PureState psi_b = haar_random_state(space.d_S(), rng);
    DiagonalModelReport r;

    const PureState start = product_state(psi_a, phi, space);
    const ComplexMatrix rho0 = reduced_system_state(start.amplitudes(), space);
    const EnergyCoefficients c = energy_coefficients(start, h);
    const RVector times = stratified_times(TimeSampling{}.t_max(h), n_times, rng);
    for (double t : times) {
        const ComplexMatrix rho = reduced_system_state(evolve_amplitudes(c, h, t), space);
        for (std::size_t n = 0; n < space.d_S(); ++n)
            r.max_population_drift = std::max(r.max_population_drift, std::abs(rho(n, n).real() - rho0(n, n).real()));
    }
    r.times_checked = times.size();

    auto omega_S = [&](const PureState& s) {
        return dephased_time_average(product_state(s, phi, space), h);
    };
    auto reduce = [&](const DensityMatrix& w) { return partial_trace_bath(w.matrix(), space); };
    r.basis_pair_distance = trace_distance(reduce(omega_S(PureState::basis(space.d_S(), 0))),
                                           reduce(omega_S(PureState::basis(space.d_S(), 1))));
    r.random_pair_distance = trace_distance(reduce(omega_S(psi_a)), reduce(omega_S(psi_b)));
    for (std::size_t n = 0; n < space.d_S(); ++n)
        r.random_pair_half_imbalance += 0.5 * std::abs(std::norm(psi_a[n]) - std::norm(psi_b[n]));
    return r;
}

struct SpinBathReport {
    double spin_energy = 0.0;
    double min_energy_difference = 0.0;  ///< min_t <H>_+ - <H>_-
    double max_energy_difference = 0.0;
    double max_drift = 0.0;              ///< max_t |Δ(t) - Δ(0)|
    double omega_distance = 0.0;         ///< D(ω_S^+, ω_S^-)
    double min_eigenstate_purity = 0.0;  ///< min_k tr(tr_B |E_k><E_k|)²
    bool conservation_claimed = false;   ///< E large enough for the energy argument (E > 2)
    std::size_t times_checked = 0;

    bool within_window() const {
        return min_energy_difference >= 2.0 * spin_energy - 4.0 && max_energy_difference <= 2.0 * spin_energy + 4.0;
    }
};

inline double expectation(const ComplexMatrix& op, std::span<const cplx> psi) {
    return inner(psi, op * psi).real();
}

/// |ψ±>|φ> under E σ_z ⊗ 1 + H_int + 1 ⊗ H_B; the energy gap between the two branches stays
/// within 2E ± 4.
inline SpinBathReport spin_bath_demonstration(double spin_energy, std::size_t d_B, std::size_t n_times, Rng& rng) {
    const SpinBathModel model = spin_bath_model(spin_energy, d_B, rng);
    const SpectralHamiltonian& h = model.hamiltonian;
    const BipartiteSpace& space = h.space();
    const PureState phi = haar_random_state(d_B, rng);
    const PureState plus = product_state(PureState::basis(2, 0), phi, space);
    const PureState minus = product_state(PureState::basis(2, 1), phi, space);
    const EnergyCoefficients cp = energy_coefficients(plus, h), cm = energy_coefficients(minus, h);

    SpinBathReport r;
    r.spin_energy = spin_energy;
    r.conservation_claimed = spin_energy > 2.0;
    const RVector times = stratified_times(TimeSampling{}.t_max(h), n_times, rng);
    const double delta0 = expectation(model.dense, plus.amplitudes()) - expectation(model.dense, minus.amplitudes());
    r.min_energy_difference = r.max_energy_difference = delta0;
    for (double t : times) {
        const double d = expectation(model.dense, evolve_amplitudes(cp, h, t)) -
                         expectation(model.dense, evolve_amplitudes(cm, h, t));
        r.min_energy_difference = std::min(r.min_energy_difference, d);
        r.max_energy_difference = std::max(r.max_energy_difference, d);
        r.max_drift = std::max(r.max_drift, std::abs(d - delta0));
    }
    r.times_checked = times.size();
    r.omega_distance = trace_distance(equilibrium_marginals(cp, h).omega_S, equilibrium_marginals(cm, h).omega_S);
    r.min_eigenstate_purity = 1.0;
    for (std::size_t k = 0; k < h.dim(); ++k)
        r.min_eigenstate_purity = std::min(r.min_eigenstate_purity, purity(reduced_system_state(h.eigenvector(k), space)));
    return r;
}

struct CounterexampleReport {
    DiagonalModelReport diagonal;
    SpinBathReport spin_bath;
};

inline CounterexampleReport counterexample_demonstrations(const BipartiteSpace& diagonal_space,
                                                          const EnergyWindow& window, double spin_energy,
                                                          std::size_t spin_bath_d_B, std::size_t n_times, Rng& rng) {
    CounterexampleReport r;
    r.diagonal = diagonal_model_demonstration(diagonal_space, window, n_times, rng);
    r.spin_bath = spin_bath_demonstration(spin_energy, spin_bath_d_B, n_times, rng);
    return r;
}

}  // namespace eqlab
