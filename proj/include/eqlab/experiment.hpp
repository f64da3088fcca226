#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eqlab/dynamics.hpp"
#include "eqlab/hamiltonian.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/verifiers.hpp"

namespace eqlab {

// --- Configuration -------------------------------------------------------------------------

enum class ExperimentKind { Thm1, Thm2, Thm3Bath, Thm3Subsystem, Thm4, Counterexamples, Identities };
enum class SubspaceKind { Full, ProductFixedSystem, ProductFixedBath, Explicit };
enum class HamiltonianModel { RandomSpectral, DiagonalProduct, SpinBath };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Thm1: return "thm1";
        case ExperimentKind::Thm2: return "thm2";
        case ExperimentKind::Thm3Bath: return "thm3-bath";
        case ExperimentKind::Thm3Subsystem: return "thm3-subsystem";
        case ExperimentKind::Thm4: return "thm4";
        case ExperimentKind::Counterexamples: return "counterexamples";
        case ExperimentKind::Identities: return "identities";
    }
    return "?";
}

struct HamiltonianSpec {
    HamiltonianModel model = HamiltonianModel::RandomSpectral;
    EnergyWindow window{};
    double spin_energy = 50.0;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Thm1;
    std::size_t d_S = 2;
    std::vector<std::size_t> d_B{32};  ///< one entry per sweep point
    SubspaceKind subspace = SubspaceKind::Full;
    ComplexMatrix explicit_basis;      ///< only for SubspaceKind::Explicit
    HamiltonianSpec hamiltonian{};
    std::size_t trials = 10;
    TimeSampling time_sampling{};
    std::vector<double> thresholds_K = default_thresholds();
    double epsilon = 0.2;
    std::size_t torus_samples = 2000;
    std::size_t moment_trials = 10000;
    std::size_t identity_dim = 4;
    std::size_t spin_bath_d_B = 8;
    std::size_t counterexample_times = 500;
    std::uint64_t master_seed = 1;
    std::string output_path;
    std::string format;                ///< "csv" or "json"; empty selects by extension
    std::size_t workers = 1;
    bool record_timing = false;        ///< wall_ms is 0 unless set, which keeps output byte-stable
};

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(key, e.what());
    }
}

inline std::size_t get_positive(const nlohmann::json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigInvalid(key, "must be an integer >= 1");
    return v.get<std::size_t>();
}

}  // namespace detail

inline ExperimentKind parse_experiment(const std::string& s) {
    for (auto k : {ExperimentKind::Thm1, ExperimentKind::Thm2, ExperimentKind::Thm3Bath, ExperimentKind::Thm3Subsystem,
                   ExperimentKind::Thm4, ExperimentKind::Counterexamples, ExperimentKind::Identities})
        if (to_string(k) == s) return k;
    throw ConfigInvalid("experiment", "unknown experiment '" + s + "'");
}

/// Parses and validates a config document. Unknown keys are rejected.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::get_field;
    using detail::get_positive;
    if (!j.is_object()) throw ConfigInvalid("<root>", "config must be a JSON object");
    static const std::set<std::string> known{
        "experiment", "d_S", "d_B", "subspace", "subspace_basis", "hamiltonian", "trials", "time_sampling",
        "thresholds_K", "epsilon", "torus_samples", "moment_trials", "identity_dim", "spin_bath_d_B",
        "counterexample_times", "master_seed", "output_path", "format", "workers", "record_timing"};
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw ConfigInvalid(key, "unknown field");

    ExperimentConfig c;
    if (!j.contains("experiment")) throw ConfigInvalid("experiment", "missing");
    c.experiment = parse_experiment(get_field<std::string>(j, "experiment", ""));
    c.d_S = get_positive(j, "d_S", c.d_S);
    if (j.contains("d_B")) {
        const auto& v = j.at("d_B");
        c.d_B.clear();
        if (v.is_array()) {
            if (v.empty()) throw ConfigInvalid("d_B", "sweep list is empty");
            for (const auto& x : v) {
                if (!x.is_number_integer() || x.get<long long>() < 1) throw ConfigInvalid("d_B", "entries must be >= 1");
                c.d_B.push_back(x.get<std::size_t>());
            }
        } else {
            c.d_B.push_back(get_positive(j, "d_B", 1));
        }
    }

    const std::string subspace = get_field<std::string>(j, "subspace", "full");
    if (subspace == "full") c.subspace = SubspaceKind::Full;
    else if (subspace == "product-fixed-system") c.subspace = SubspaceKind::ProductFixedSystem;
    else if (subspace == "product-fixed-bath") c.subspace = SubspaceKind::ProductFixedBath;
    else if (subspace == "explicit") c.subspace = SubspaceKind::Explicit;
    else throw ConfigInvalid("subspace", "unknown subspace '" + subspace + "'");
    if (c.subspace == SubspaceKind::Explicit) {
        if (!j.contains("subspace_basis")) throw ConfigInvalid("subspace_basis", "required for explicit subspace");
        const auto& b = j.at("subspace_basis");
        const std::size_t d_R = get_positive(b, "d_R", 0);
        const auto flat = get_field<std::vector<double>>(b, "basis", {});
        if (d_R == 0 || flat.size() % (2 * d_R) != 0)
            throw ConfigInvalid("subspace_basis", "need d_R >= 1 and 2 * ambient * d_R basis numbers");
        const std::size_t ambient = flat.size() / (2 * d_R);
        CVector e(ambient * d_R);
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = {flat[2 * k], flat[2 * k + 1]};
        c.explicit_basis = ComplexMatrix(ambient, d_R, std::move(e));
    }

    if (j.contains("hamiltonian")) {
        const auto& h = j.at("hamiltonian");
        if (!h.is_object()) throw ConfigInvalid("hamiltonian", "must be an object");
        const std::string model = get_field<std::string>(h, "model", "random-spectral");
        if (model == "random-spectral") c.hamiltonian.model = HamiltonianModel::RandomSpectral;
        else if (model == "diagonal-product") c.hamiltonian.model = HamiltonianModel::DiagonalProduct;
        else if (model == "spin-bath") c.hamiltonian.model = HamiltonianModel::SpinBath;
        else throw ConfigInvalid("hamiltonian.model", "unknown model '" + model + "'");
        const auto window = get_field<std::vector<double>>(h, "window", {0.0, 1.0});
        if (window.size() != 2 || !(window[1] > window[0]))
            throw ConfigInvalid("hamiltonian.window", "must be [lo, hi] with lo < hi");
        c.hamiltonian.window = {window[0], window[1]};
        c.hamiltonian.spin_energy = get_field<double>(h, "E", c.hamiltonian.spin_energy);
        if (!(c.hamiltonian.spin_energy > 0.0)) throw ConfigInvalid("hamiltonian.E", "must be > 0");
    }

    if (j.contains("trials")) {
        const auto& v = j.at("trials");
        if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigInvalid("trials", "must be an integer >= 1");
        c.trials = v.get<std::size_t>();
    }
    if ((c.experiment == ExperimentKind::Thm2 || c.experiment == ExperimentKind::Thm3Bath ||
         c.experiment == ExperimentKind::Thm3Subsystem) &&
        c.trials < min_statistics_trials)
        throw ConfigInvalid("trials", "Monte Carlo statistics need at least 30 trials");

    if (j.contains("time_sampling")) {
        const auto& t = j.at("time_sampling");
        c.time_sampling.t_max_factor = get_field<double>(t, "t_max_factor", c.time_sampling.t_max_factor);
        if (!(c.time_sampling.t_max_factor > 0.0)) throw ConfigInvalid("time_sampling.t_max_factor", "must be > 0");
        c.time_sampling.n_samples = get_positive(t, "n_samples", c.time_sampling.n_samples);
        if (c.time_sampling.n_samples < 2) throw ConfigInvalid("time_sampling.n_samples", "must be >= 2");
    }
    c.thresholds_K = get_field<std::vector<double>>(j, "thresholds_K", c.thresholds_K);
    for (double k : c.thresholds_K)
        if (!(k > 0.0)) throw ConfigInvalid("thresholds_K", "entries must be > 0");
    c.epsilon = get_field<double>(j, "epsilon", c.epsilon);
    if (!(c.epsilon > 0.0)) throw ConfigInvalid("epsilon", "must be > 0");
    c.torus_samples = get_positive(j, "torus_samples", c.torus_samples);
    if (c.torus_samples < min_torus_samples) throw ConfigInvalid("torus_samples", "must be >= 1000");
    c.moment_trials = get_positive(j, "moment_trials", c.moment_trials);
    if (c.moment_trials < min_moment_trials) throw ConfigInvalid("moment_trials", "must be >= 1000");
    c.identity_dim = get_positive(j, "identity_dim", c.identity_dim);
    c.spin_bath_d_B = get_positive(j, "spin_bath_d_B", c.spin_bath_d_B);
    if (c.spin_bath_d_B < 2) throw ConfigInvalid("spin_bath_d_B", "must be >= 2");
    c.counterexample_times = get_positive(j, "counterexample_times", c.counterexample_times);
    c.master_seed = get_field<std::uint64_t>(j, "master_seed", c.master_seed);
    c.output_path = get_field<std::string>(j, "output_path", "");
    c.format = get_field<std::string>(j, "format", "");
    if (!c.format.empty() && c.format != "csv" && c.format != "json")
        throw ConfigInvalid("format", "must be 'csv' or 'json'");
    c.workers = get_positive(j, "workers", c.workers);
    c.record_timing = get_field<bool>(j, "record_timing", false);

    for (std::size_t dB : c.d_B) {
        if (c.d_S * dB > max_dimension())
            throw DimensionOverflow("d_S * d_B = " + std::to_string(c.d_S * dB) + " exceeds maximum " +
                                    std::to_string(max_dimension()));
        if (c.subspace == SubspaceKind::Explicit && c.explicit_basis.rows() != c.d_S * dB)
            throw ConfigInvalid("subspace_basis", "ambient dimension must equal d_S * d_B");
    }
    if (c.experiment == ExperimentKind::Counterexamples && c.d_S < 2)
        throw ConfigInvalid("d_S", "counterexamples need d_S >= 2");
    if (c.experiment == ExperimentKind::Identities && c.identity_dim * c.identity_dim > max_dimension())
        throw DimensionOverflow("identity_dim squared exceeds maximum dimension");
    return c;
}

/// Applies "a.b.c=value" to the document. The value is parsed as JSON when possible and kept
/// as a string otherwise.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigInvalid(assignment, "override must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    std::string pointer;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw ConfigInvalid(key, "empty path component");
        pointer += "/" + part;
    }
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    doc[nlohmann::json::json_pointer(pointer)] = value;
}

// --- Records -------------------------------------------------------------------------------

struct ExperimentRecord {
    std::string experiment;
    std::size_t d_S = 0;
    std::size_t d_B = 0;
    std::size_t d_R = 0;
    long long trial = -1;  ///< -1 marks an aggregate row
    std::uint64_t seed = 0;
    std::string quantity;
    double empirical = 0.0;
    double bound = 0.0;
    bool satisfied = false;
    double wall_ms = 0.0;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Quantities whose bound holds unconditionally (or, for sample means, up to the 3 SE
/// allowance). A failure here is an error, not data.
inline bool is_guaranteed(const std::string& quantity) {
    static const std::set<std::string> guaranteed{
        "thm1_mean_distance", "thm1_max_bound_ratio", "thm2_mean_deff_deficit", "thm3_delta",
        "thm3_mean_distance_delta_bound", "thm3_mean_distance_weak_bound", "diagonal_population_drift",
        "diagonal_basis_pair_distance_error", "diagonal_random_pair_half_imbalance",
        "spin_bath_energy_difference_deviation", "swap_trace_deviation", "haar_pair_moment_deviation"};
    return guaranteed.contains(quantity);
}

inline bool all_guaranteed_satisfied(const std::vector<ExperimentRecord>& records) {
    return std::all_of(records.begin(), records.end(),
                       [](const ExperimentRecord& r) { return !is_guaranteed(r.quantity) || r.satisfied; });
}

// --- Running -------------------------------------------------------------------------------

/// Stream index reserved for per-sweep-point setup (Hamiltonian, fixed factor states).
inline constexpr std::uint64_t setup_stream = std::numeric_limits<std::uint64_t>::max();

namespace detail {

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

inline SpectralHamiltonian make_hamiltonian(const HamiltonianSpec& spec, const BipartiteSpace& space, Rng& rng) {
    switch (spec.model) {
        case HamiltonianModel::RandomSpectral: return random_spectral_hamiltonian(space, spec.window, rng);
        case HamiltonianModel::DiagonalProduct: return diagonal_product_hamiltonian(space, spec.window, rng);
        case HamiltonianModel::SpinBath:
            if (space.d_S() != 2) throw ConfigInvalid("hamiltonian.model", "spin-bath needs d_S = 2");
            return spin_bath_hamiltonian(spec.spin_energy, space.d_B(), rng);
    }
    throw ConfigInvalid("hamiltonian.model", "unhandled model");
}

inline Subspace make_subspace(const ExperimentConfig& c, const BipartiteSpace& space, Rng& rng) {
    switch (c.subspace) {
        case SubspaceKind::Full: return Subspace::full(space.dim());
        case SubspaceKind::ProductFixedSystem:
            return Subspace::product_fixed_system(haar_random_state(space.d_S(), rng), space);
        case SubspaceKind::ProductFixedBath:
            return Subspace::product_fixed_bath(space, haar_random_state(space.d_B(), rng));
        case SubspaceKind::Explicit: return Subspace(c.explicit_basis);
    }
    throw ConfigInvalid("subspace", "unhandled subspace");
}

struct SweepContext {
    const ExperimentConfig& config;
    std::size_t sweep;
    BipartiteSpace space;

    ExperimentRecord row(std::size_t d_R, long long trial, std::uint64_t seed, std::string quantity, double empirical,
                         double bound, double wall_ms) const {
        return ExperimentRecord{to_string(config.experiment), space.d_S(), space.d_B(), d_R, trial, seed,
                                std::move(quantity), empirical, bound, empirical <= bound, wall_ms};
    }
    ExperimentRecord row(std::size_t d_R, long long trial, std::uint64_t seed, std::string quantity,
                         const BoundCheck& check, double wall_ms) const {
        ExperimentRecord r = row(d_R, trial, seed, std::move(quantity), check.empirical, check.bound, wall_ms);
        r.satisfied = check.satisfied;
        return r;
    }
    std::uint64_t trial_seed(std::size_t trial) const { return derive_seed(config.master_seed, sweep, trial); }
};

inline void run_thm1(const SweepContext& ctx, std::vector<ExperimentRecord>& out) {
    const auto& c = ctx.config;
    const std::size_t d = ctx.space.dim();
    auto rows = parallel_map(c.trials, c.workers, [&](std::size_t i) {
        Stopwatch sw(c.record_timing);
        const std::uint64_t seed = ctx.trial_seed(i);
        Rng rng(seed);
        const SpectralHamiltonian h = make_hamiltonian(c.hamiltonian, ctx.space, rng);
        const PureState psi = haar_random_state(d, rng);
        const Theorem1Result r = theorem1_check(psi, h, c.time_sampling, c.thresholds_K, rng);
        return ctx.row(d, static_cast<long long>(i), seed, "thm1_mean_distance", r.bath_bound, sw.ms());
    });
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.empirical / r.bound);
    out.insert(out.end(), rows.begin(), rows.end());
    out.push_back(ctx.row(d, -1, c.master_seed, "thm1_max_bound_ratio", worst, 1.0, 0.0));
}

inline void run_thm2(const SweepContext& ctx, std::vector<ExperimentRecord>& out) {
    const auto& c = ctx.config;
    Stopwatch sw(c.record_timing);
    Rng setup(ctx.trial_seed(setup_stream));
    const SpectralHamiltonian h = make_hamiltonian(c.hamiltonian, ctx.space, setup);
    const Subspace sub = make_subspace(c, ctx.space, setup);
    const std::size_t dR = sub.dim();
    const Theorem2Summary s = theorem2_statistics(sub, h, c.trials, c.master_seed, ctx.sweep, c.workers);
    for (std::size_t i = 0; i < s.trials; ++i)
        out.push_back(ctx.row(dR, static_cast<long long>(i), ctx.trial_seed(i), "purity_omega", 1.0 / s.deff[i],
                              4.0 / static_cast<double>(dR), 0.0));
    const double ms = sw.ms();
    out.push_back(ctx.row(dR, -1, c.master_seed, "thm2_mean_deff_deficit", s.mean_check, ms));
    out.push_back(ctx.row(dR, -1, c.master_seed, "thm2_tail_frequency", s.tail_check, ms));
}

inline void run_thm3(const SweepContext& ctx, std::vector<ExperimentRecord>& out) {
    const auto& c = ctx.config;
    Stopwatch sw(c.record_timing);
    Rng setup(ctx.trial_seed(setup_stream));
    const SpectralHamiltonian h = make_hamiltonian(c.hamiltonian, ctx.space, setup);
    const Subspace sub = make_subspace(c, ctx.space, setup);
    const std::size_t dR = sub.dim();
    const Theorem3Summary s = theorem3_statistics(sub, h, c.trials, c.master_seed, ctx.sweep, c.workers);
    for (std::size_t i = 0; i < s.trials; ++i)
        out.push_back(ctx.row(dR, static_cast<long long>(i), ctx.trial_seed(i), "thm3_distance", s.distances[i],
                              s.tail_threshold, 0.0));
    const double ms = sw.ms();
    out.push_back(ctx.row(dR, -1, c.master_seed, "thm3_delta", s.delta, 1.0, ms));
    out.push_back(ctx.row(dR, -1, c.master_seed, "thm3_mean_distance_delta_bound", s.delta_check, ms));
    out.push_back(ctx.row(dR, -1, c.master_seed, "thm3_mean_distance_weak_bound", s.weak_check, ms));
    out.push_back(ctx.row(dR, -1, c.master_seed, "thm3_tail_frequency", s.tail_check, ms));
}

inline constexpr double ergodic_ks_tolerance = 0.05;

inline void run_thm4(const SweepContext& ctx, std::vector<ExperimentRecord>& out) {
    const auto& c = ctx.config;
    const std::size_t d = ctx.space.dim();
    auto rows = parallel_map(c.trials, c.workers, [&](std::size_t i) {
        Stopwatch sw(c.record_timing);
        const std::uint64_t seed = ctx.trial_seed(i);
        Rng rng(seed);
        const SpectralHamiltonian h = make_hamiltonian(c.hamiltonian, ctx.space, rng);
        const PureState psi = haar_random_state(d, rng);
        const EnergyCoefficients coeffs = energy_coefficients(psi, h);
        const Theorem4Result r = theorem4_tail(coeffs, h, c.epsilon, c.torus_samples, rng);
        const EquilibriumMarginals eq = equilibrium_marginals(coeffs, h);
        const RVector times = stratified_times(c.time_sampling.t_max(h), c.time_sampling.n_samples, rng);
        const double ks = ks_statistic(r.distances, subsystem_distances(coeffs, h, eq.omega_S, times));
        const double ms = sw.ms();
        return std::vector<ExperimentRecord>{
            ctx.row(d, static_cast<long long>(i), seed, "thm4_tail_frequency", r.tail, ms),
            ctx.row(d, static_cast<long long>(i), seed, "thm4_ks_statistic", ks, ergodic_ks_tolerance, ms)};
    });
    for (auto& pair : rows) out.insert(out.end(), pair.begin(), pair.end());
}

inline void run_counterexamples(const SweepContext& ctx, std::vector<ExperimentRecord>& out) {
    const auto& c = ctx.config;
    Stopwatch sw(c.record_timing);
    const std::uint64_t seed = ctx.trial_seed(0);
    Rng rng(seed);
    const DiagonalModelReport dm =
        diagonal_model_demonstration(ctx.space, c.hamiltonian.window, c.counterexample_times, rng);
    const SpinBathReport sb =
        spin_bath_demonstration(c.hamiltonian.spin_energy, c.spin_bath_d_B, c.counterexample_times, rng);
    const double ms = sw.ms();
    const std::size_t d = ctx.space.dim();
    out.push_back(ctx.row(d, 0, seed, "diagonal_population_drift", dm.max_population_drift, 1e-10, ms));
    out.push_back(ctx.row(d, 0, seed, "diagonal_basis_pair_distance_error", std::abs(dm.basis_pair_distance - 1.0),
                          1e-9, ms));
    out.push_back(ctx.row(d, 0, seed, "diagonal_random_pair_half_imbalance", dm.random_pair_half_imbalance,
                          dm.random_pair_distance + 1e-12, ms));
    const double two_e = 2.0 * sb.spin_energy;
    const double deviation =
        std::max(std::abs(sb.min_energy_difference - two_e), std::abs(sb.max_energy_difference - two_e));
    ExperimentRecord spin = ctx.row(2 * c.spin_bath_d_B, 0, seed, "spin_bath_energy_difference_deviation", deviation,
                                    4.0, ms);
    spin.d_S = 2;
    spin.d_B = c.spin_bath_d_B;
    out.push_back(spin);
    ExperimentRecord omega = ctx.row(2 * c.spin_bath_d_B, 0, seed, "spin_bath_omega_distance", sb.omega_distance, 1.0, ms);
    omega.d_S = 2;
    omega.d_B = c.spin_bath_d_B;
    out.push_back(omega);
}

inline constexpr double swap_identity_tolerance = 1e-10;

inline void run_identities(const SweepContext& ctx, std::vector<ExperimentRecord>& out) {
    const auto& c = ctx.config;
    const std::size_t n = c.identity_dim;
    Stopwatch sw(c.record_timing);
    const std::uint64_t seed = ctx.trial_seed(0);
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.trials; ++i) {
        ComplexMatrix a(n, n), b(n, n);
        for (auto& z : a.data()) z = rng.complex_normal();
        for (auto& z : b.data()) z = rng.complex_normal();
        worst = std::max(worst, swap_trace_identity_check(a, b));
    }
    std::vector<ExperimentRecord> rows;
    rows.push_back(ctx.row(n, 0, seed, "swap_trace_deviation", worst, swap_identity_tolerance, sw.ms()));
    const std::uint64_t moment_seed = ctx.trial_seed(1);
    const double dev = haar_pair_moment_check(Subspace::full(n), c.moment_trials, moment_seed);
    rows.push_back(ctx.row(n, 1, moment_seed, "haar_pair_moment_deviation", dev,
                           5.0 / std::sqrt(static_cast<double>(c.moment_trials)), sw.ms()));
    for (auto& r : rows) {
        // both identities act on C^n ⊗ C^n
        r.d_S = n;
        r.d_B = n;
        out.push_back(std::move(r));
    }
}

}  // namespace detail

/// Runs every sweep point of the config. Output order is (sweep point, trial, quantity) and does
/// not depend on the worker count.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
    std::vector<ExperimentRecord> out;
    for (std::size_t sweep = 0; sweep < config.d_B.size(); ++sweep) {
        const detail::SweepContext ctx{config, sweep, BipartiteSpace(config.d_S, config.d_B[sweep])};
        switch (config.experiment) {
            case ExperimentKind::Thm1: detail::run_thm1(ctx, out); break;
            case ExperimentKind::Thm2: detail::run_thm2(ctx, out); break;
            case ExperimentKind::Thm3Bath:
            case ExperimentKind::Thm3Subsystem: {
                ExperimentConfig adjusted = config;
                if (config.subspace == SubspaceKind::Full)
                    adjusted.subspace = config.experiment == ExperimentKind::Thm3Bath ? SubspaceKind::ProductFixedSystem
                                                                                      : SubspaceKind::ProductFixedBath;
                detail::run_thm3(detail::SweepContext{adjusted, sweep, ctx.space}, out);
                break;
            }
            case ExperimentKind::Thm4: detail::run_thm4(ctx, out); break;
            case ExperimentKind::Counterexamples: detail::run_counterexamples(ctx, out); break;
            case ExperimentKind::Identities: detail::run_identities(ctx, out); break;
        }
    }
    return out;
}

// --- Emission ------------------------------------------------------------------------------

inline const char* csv_header() { return "experiment,d_S,d_B,d_R,trial,seed,quantity,empirical,bound,satisfied,wall_ms"; }

/// 17 significant digits.
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string to_csv(const std::vector<ExperimentRecord>& records) {
    std::string s = csv_header();
    s += '\n';
    for (const auto& r : records) {
        s += r.experiment + ',' + std::to_string(r.d_S) + ',' + std::to_string(r.d_B) + ',' + std::to_string(r.d_R) +
             ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + r.quantity + ',' +
             format_number(r.empirical) + ',' + format_number(r.bound) + ',' + (r.satisfied ? "true" : "false") +
             ',' + format_number(r.wall_ms) + '\n';
    }
    return s;
}

inline std::string to_json_text(const std::vector<ExperimentRecord>& records) {
    std::string s = "[\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        s += "  {\"experiment\": " + nlohmann::json(r.experiment).dump() + ", \"d_S\": " + std::to_string(r.d_S) +
             ", \"d_B\": " + std::to_string(r.d_B) + ", \"d_R\": " + std::to_string(r.d_R) +
             ", \"trial\": " + std::to_string(r.trial) + ", \"seed\": " + std::to_string(r.seed) +
             ", \"quantity\": " + nlohmann::json(r.quantity).dump() + ", \"empirical\": " + format_number(r.empirical) +
             ", \"bound\": " + format_number(r.bound) + ", \"satisfied\": " + (r.satisfied ? "true" : "false") +
             ", \"wall_ms\": " + format_number(r.wall_ms) + "}";
        s += i + 1 < records.size() ? ",\n" : "\n";
    }
    s += "]\n";
    return s;
}

inline std::vector<ExperimentRecord> records_from_json(const nlohmann::json& j) {
    std::vector<ExperimentRecord> out;
    try {
        for (const auto& o : j) {
            ExperimentRecord r;
            r.experiment = o.at("experiment").get<std::string>();
            r.d_S = o.at("d_S").get<std::size_t>();
            r.d_B = o.at("d_B").get<std::size_t>();
            r.d_R = o.at("d_R").get<std::size_t>();
            r.trial = o.at("trial").get<long long>();
            r.seed = o.at("seed").get<std::uint64_t>();
            r.quantity = o.at("quantity").get<std::string>();
            r.empirical = o.at("empirical").get<double>();
            r.bound = o.at("bound").get<double>();
            r.satisfied = o.at("satisfied").get<bool>();
            r.wall_ms = o.at("wall_ms").get<double>();
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("records_from_json: ") + e.what());
    }
    return out;
}

enum class OutputFormat { Csv, Json };

inline OutputFormat format_for(const std::string& explicit_format, const std::string& path) {
    if (explicit_format == "json") return OutputFormat::Json;
    if (explicit_format == "csv") return OutputFormat::Csv;
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return OutputFormat::Json;
    return OutputFormat::Csv;
}

inline std::string serialize(const std::vector<ExperimentRecord>& records, OutputFormat format) {
    return format == OutputFormat::Json ? to_json_text(records) : to_csv(records);
}

/// Writes the records to `path`; I/O failures carry the path.
inline void emit(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path) {
    if (records.empty()) throw Error("emit: no records to write");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("emit: cannot open '" + path + "' for writing");
    f << serialize(records, format);
    f.close();
    if (!f) throw Error("emit: write to '" + path + "' failed");
}

}  // namespace eqlab
