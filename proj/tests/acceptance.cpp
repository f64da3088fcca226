// Acceptance checks. Each criterion prints one PASS/FAIL line; `--criterion <id>` runs one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "eqlab/experiment.hpp"

using namespace eqlab;

namespace {

constexpr std::uint64_t master_seed = 20240611;

// Frozen measurement of δ for the Haar eigenbasis at d_S=2, d_B=32 under the seed below.
constexpr std::uint64_t delta_seed = 5;
constexpr double delta_regression_value = 0.52401902426589209;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- Shared equilibration-bound runs (criteria 1, 2, 9) -------------------------------------------------

const std::vector<std::size_t> thm1_baths{8, 16, 32};
constexpr std::size_t thm1_instances = 50;

ExperimentConfig thm1_config() {
    return parse_config(nlohmann::json{{"experiment", "thm1"},
                                       {"d_S", 2},
                                       {"d_B", thm1_baths},
                                       {"trials", thm1_instances},
                                       {"master_seed", master_seed}});
}

struct Thm1Instance {
    std::size_t d_B;
    Theorem1Result result;
    SubadditivityReport subadditivity;
};

// Rebuilds each instance from its trial stream in the same order as the runner, then keeps
// drawing from that stream for the subadditivity time grid.
const std::vector<Thm1Instance>& thm1_instances_cache() {
    static const std::vector<Thm1Instance> cache = [] {
        const ExperimentConfig cfg = thm1_config();
        std::vector<Thm1Instance> out;
        for (std::size_t sweep = 0; sweep < thm1_baths.size(); ++sweep) {
            const BipartiteSpace space(2, thm1_baths[sweep]);
            for (std::size_t i = 0; i < thm1_instances; ++i) {
                Rng rng(derive_seed(master_seed, sweep, i));
                const SpectralHamiltonian h = random_spectral_hamiltonian(space, cfg.hamiltonian.window, rng);
                const PureState psi = haar_random_state(space.dim(), rng);
                Theorem1Result r = theorem1_check(psi, h, cfg.time_sampling, cfg.thresholds_K, rng);
                const RVector times = stratified_times(cfg.time_sampling.t_max(h), 200, rng);
                SubadditivityReport s = subadditivity_and_bath_checks(psi, h, times);
                out.push_back({space.d_B(), std::move(r), std::move(s)});
            }
        }
        return out;
    }();
    return cache;
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto records = run_experiment(thm1_config());
    const double elapsed = seconds_since(t0);
    const auto& direct = thm1_instances_cache();
    std::size_t rows = 0, failures = 0, mismatches = 0;
    double worst_ratio = 0.0;
    for (const auto& r : records) {
        if (r.quantity != "thm1_mean_distance") continue;
        const auto& d = direct[rows];
        if (r.empirical != d.result.bath_bound.empirical || r.bound != d.result.bath_bound.bound) ++mismatches;
        if (!r.satisfied) ++failures;
        worst_ratio = std::max(worst_ratio, r.empirical / r.bound);
        ++rows;
    }
    const bool pass = rows == thm1_baths.size() * thm1_instances && failures == 0 && mismatches == 0 && elapsed < 120.0;
    return {pass, fmt("equilibration bath bound: %zu instances (d_B in {8,16,32}), %zu failures, worst <D>/bound = %.4f, "
                      "runner/direct mismatches %zu, %.1f s (< 120 s)",
                      rows, failures, worst_ratio, mismatches, elapsed)};
}

Outcome criterion2() {
    std::map<double, double> worst;
    for (const auto& inst : thm1_instances_cache())
        for (const auto& [k, f] : inst.result.trajectory.exceed_fraction) worst[k] = std::max(worst[k], f);
    bool pass = worst.size() == 3;
    std::string detail = "Markov fluctuation, max exceed_fraction over 150 runs:";
    for (const auto& [k, f] : worst) {
        pass = pass && f <= 1.0 / k + 0.02;
        detail += fmt(" K=%g: %.4f (<= %.4f)", k, f, 1.0 / k + 0.02);
    }
    return {pass, detail};
}

Outcome criterion3() {
    Rng rng(derive_seed(master_seed, 3, setup_stream));
    const SpectralHamiltonian h = random_spectral_hamiltonian(BipartiteSpace(2, 32), {0.0, 1.0}, rng);
    const Theorem2Summary s = theorem2_statistics(Subspace::full(64), h, 200, master_seed, 3);
    const double floor = 32.0 - 3.0 * s.deff_moments.std_error;
    const bool pass = s.deff_moments.mean >= floor && s.tail_frequency == 0.0;
    return {pass, fmt("effective dimension: mean d_eff(omega) = %.3f >= %.3f (32 - 3 SE); tail freq {d_eff < 16} = %g; "
                      "analytic tail bound 2exp(-c sqrt(64)) = %.4f%s",
                      s.deff_moments.mean, floor, s.tail_frequency, s.tail_check.bound,
                      s.tail_check.vacuous() ? " (vacuous)" : "")};
}

Outcome criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(master_seed, 4, setup_stream));
    const SpectralHamiltonian h = random_spectral_hamiltonian(BipartiteSpace(2, 64), {0.0, 1.0}, rng);
    const Subspace sub = Subspace::product_fixed_system(haar_random_state(2, rng), h.space());
    const Theorem3Summary s = theorem3_statistics(sub, h, 100, master_seed, 4);
    const double elapsed = seconds_since(t0);
    const double limit = std::sqrt(2.0 / (4.0 * 64.0)) + 3.0 * s.distance_moments.std_error;
    const bool pass = s.distance_moments.mean <= limit && elapsed < 180.0;
    return {pass, fmt("bath independence: mean D(omega_S, Omega_S) = %.5f <= %.5f (0.0884 + 3 SE); "
                      "delta = %.4f; Omega_S max SE %.2e; %.1f s (< 180 s)",
                      s.distance_moments.mean, limit, s.delta, s.omega_S_max_std_error, elapsed)};
}

Outcome criterion5a() {
    Rng rng(derive_seed(master_seed, 5, 0));
    const SpectralHamiltonian h = diagonal_product_hamiltonian(BipartiteSpace(2, 32), {0.0, 1.0}, rng);
    const double delta = delta_quantity(h, Subspace::full(64), h.space());
    return {std::abs(delta - 1.0) <= 1e-10, fmt("delta, product eigenbasis: %.17g (= 1 within 1e-10)", delta)};
}

Outcome criterion5b() {
    Rng rng(derive_seed(master_seed, 5, delta_seed));
    const SpectralHamiltonian h = random_spectral_hamiltonian(BipartiteSpace(2, 32), {0.0, 1.0}, rng);
    const double delta = delta_quantity(h, Subspace::full(64), h.space());
    const bool in_range = delta >= 0.5 && delta <= 1.0;
    const bool small = delta < 0.2;
    const bool regression = std::abs(delta - delta_regression_value) <= 1e-12;
    return {in_range && small && regression,
            fmt("delta, Haar eigenbasis d_S=2 d_B=32: %.17g; in [1/d_S, 1]: %s; < 0.2: %s; matches frozen %.17g: %s",
                delta, in_range ? "yes" : "no", small ? "yes" : "no", delta_regression_value,
                regression ? "yes" : "no")};
}

Outcome criterion6() {
    Rng rng(derive_seed(master_seed, 6, 0));
    const DiagonalModelReport r = diagonal_model_demonstration(BipartiteSpace(2, 16), {0.0, 1.0}, 500, rng);
    const bool pass = r.times_checked == 500 && r.max_population_drift <= 1e-10 &&
                      std::abs(r.basis_pair_distance - 1.0) <= 1e-9;
    return {pass, fmt("diagonal model: max population drift %.2e over %zu times (<= 1e-10); "
                      "D(omega_S^0, omega_S^1) = %.17g (= 1 within 1e-9)",
                      r.max_population_drift, r.times_checked, r.basis_pair_distance)};
}

Outcome criterion7() {
    Rng rng(derive_seed(master_seed, 7, 0));
    const SpinBathReport r = spin_bath_demonstration(50.0, 8, 200, rng);
    const bool pass = r.times_checked == 200 && r.min_energy_difference >= 96.0 && r.max_energy_difference <= 104.0;
    return {pass, fmt("spin bath E=50 d_B=8: <H> difference in [%.4f, %.4f] over %zu times (within [96, 104]); "
                      "D(omega_S^+, omega_S^-) = %.4f",
                      r.min_energy_difference, r.max_energy_difference, r.times_checked, r.omega_distance)};
}

Outcome criterion8() {
    Rng rng(derive_seed(master_seed, 8, 0));
    double swap_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ComplexMatrix a(4, 4), b(4, 4);
        for (auto& z : a.data()) z = rng.complex_normal();
        for (auto& z : b.data()) z = rng.complex_normal();
        swap_worst = std::max(swap_worst, swap_trace_identity_check(a, b));
    }
    // single-run check at N = 1e4; the 1/sqrt(N) scaling uses means over independent replicates
    const Subspace s = Subspace::full(4);
    const double d1 = haar_pair_moment_check(s, 10000, derive_seed(master_seed, 8, 1));
    constexpr int replicates = 8;
    double m1 = 0.0, m4 = 0.0;
    for (int r = 0; r < replicates; ++r) {
        m1 += haar_pair_moment_check(s, 10000, derive_seed(master_seed, 8, 100 + r)) / replicates;
        m4 += haar_pair_moment_check(s, 40000, derive_seed(master_seed, 8, 200 + r)) / replicates;
    }
    const double d4 = m4;
    const double ratio = m4 / m1;
    const bool pass = swap_worst <= 1e-10 && d1 <= 5.0 / std::sqrt(1e4) && ratio >= 0.25 && ratio <= 1.0;
    return {pass, fmt("identities: SWAP deviation %.2e (<= 1e-10) on 100 pairs; pair moment deviation %.4f at N=1e4 "
                      "(<= 0.05); replicate means %.4f at N=1e4, %.4f at N=4e4, ratio %.3f (in [0.25, 1])",
                      swap_worst, d1, m1, d4, ratio)};
}

Outcome criterion9() {
    std::size_t renyi_fail = 0, bath_fail = 0, rank_fail = 0;
    double worst_bath = 0.0, min_renyi_margin = 1.0;
    for (const auto& inst : thm1_instances_cache()) {
        const auto& s = inst.subadditivity;
        if (!s.renyi_chain.satisfied) ++renyi_fail;
        if (!s.instantaneous_bath.satisfied) ++bath_fail;
        if (s.rank_mismatches != 0 || s.max_rank > 2) ++rank_fail;
        worst_bath = std::max(worst_bath, s.instantaneous_bath.empirical);
        min_renyi_margin = std::min(min_renyi_margin, s.renyi_chain.margin);
    }
    const bool pass = renyi_fail == 0 && bath_fail == 0 && rank_fail == 0;
    return {pass, fmt("subadditivity over 150 runs: tr(w^2) >= tr(w_B^2)/d_S failures %zu (min margin %.3e); "
                      "max d_eff(rho_B(t)) = %.6f (<= 2 + 1e-6), failures %zu; rank mismatches %zu",
                      renyi_fail, min_renyi_margin, worst_bath, bath_fail, rank_fail)};
}

Outcome criterion10() {
    Rng rng(derive_seed(master_seed, 10, 0));
    const SpectralHamiltonian h = random_spectral_hamiltonian(BipartiteSpace(2, 32), {0.0, 1.0}, rng);
    const EnergyCoefficients c = energy_coefficients(haar_random_state(64, rng), h);
    const Theorem4Result r = theorem4_tail(c, h, 0.2, 2000, rng);
    const EquilibriumMarginals eq = equilibrium_marginals(c, h);
    const RVector times = stratified_times(TimeSampling{}.t_max(h), 2000, rng);
    const double ks = ks_statistic(r.distances, subsystem_distances(c, h, eq.omega_S, times));
    const bool tail_ok = r.tail.vacuous() || r.tail.satisfied;
    return {ks <= 0.05 && tail_ok,
            fmt("torus tail: KS(torus, time) = %.4f (<= 0.05) at 2000 samples each; tail freq at eps=0.2 = %g vs "
                "exp(-c'' eps^4 d_eff) = %.6f%s",
                ks, r.tail.empirical, r.tail.bound, r.tail.vacuous() ? " (vacuous)" : "")};
}

Outcome criterion11() {
    Rng rng(derive_seed(master_seed, 11, 0));
    double worst_recon = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        ComplexMatrix m(16, 16);
        for (auto& z : m.data()) z = rng.complex_normal();
        m = hermitize(m);
        ComplexMatrix diff = hermitian_eigendecomposition(m).reconstruct();
        diff -= m;
        worst_recon = std::max(worst_recon, diff.frobenius_norm() / m.frobenius_norm());
    }
    const BipartiteSpace sp(3, 5);
    double worst_trace = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        ComplexMatrix a(15, 15);
        for (auto& z : a.data()) z = rng.complex_normal();
        ComplexMatrix rho = a * a.adjoint();
        rho *= 1.0 / rho.trace().real();
        ComplexMatrix ts(3, 3), tb(5, 5);
        for (std::size_t s = 0; s < 3; ++s)
            for (std::size_t sp2 = 0; sp2 < 3; ++sp2)
                for (std::size_t b = 0; b < 5; ++b) ts(s, sp2) += rho(s * 5 + b, sp2 * 5 + b);
        for (std::size_t b = 0; b < 5; ++b)
            for (std::size_t bp = 0; bp < 5; ++bp)
                for (std::size_t s = 0; s < 3; ++s) tb(b, bp) += rho(s * 5 + b, s * 5 + bp);
        worst_trace = std::max({worst_trace, max_abs_diff(partial_trace_bath(rho, sp), ts),
                                max_abs_diff(partial_trace_system(rho, sp), tb)});
    }
    return {worst_recon <= 1e-9 && worst_trace <= 1e-12,
            fmt("kernels: worst eigen reconstruction %.2e (<= 1e-9) over 100 16x16; worst partial-trace deviation "
                "%.2e (<= 1e-12) on 3x5",
                worst_recon, worst_trace)};
}

std::string read_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome criterion12() {
    const std::vector<nlohmann::json> docs{
        {{"experiment", "thm1"}, {"d_B", {8, 16}}, {"trials", 8}, {"time_sampling", {{"n_samples", 500}}}},
        {{"experiment", "thm3-bath"}, {"d_B", 16}, {"trials", 30}},
        {{"experiment", "thm4"}, {"d_B", 8}, {"trials", 2}, {"torus_samples", 1000}},
        {{"experiment", "counterexamples"}, {"d_B", 8}, {"counterexample_times", 100}},
    };
    const auto dir = std::filesystem::temp_directory_path();
    std::size_t identical = 0;
    for (std::size_t k = 0; k < docs.size(); ++k) {
        std::string bytes[3];
        for (int run = 0; run < 3; ++run) {
            nlohmann::json doc = docs[k];
            doc["workers"] = run == 2 ? 3 : 1;
            const std::string path = (dir / fmt("eqlab_accept_%zu_%d.csv", k, run)).string();
            emit(run_experiment(parse_config(doc)), OutputFormat::Csv, path);
            bytes[run] = read_bytes(path);
            std::filesystem::remove(path);
        }
        if (!bytes[0].empty() && bytes[0] == bytes[1] && bytes[0] == bytes[2]) ++identical;
    }
    return {identical == docs.size(),
            fmt("reproducibility: %zu/%zu configs give byte-identical CSV across reruns and worker counts", identical,
                docs.size())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1", criterion1},   {"2", criterion2},   {"3", criterion3},   {"4", criterion4},   {"5a", criterion5a},
        {"5b", criterion5b}, {"6", criterion6},   {"7", criterion7},   {"8", criterion8},   {"9", criterion9},
        {"10", criterion10}, {"11", criterion11}, {"12", criterion12},
    };
    std::string only;
    if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
        only = argv[2];
    } else if (argc != 1) {
        std::fprintf(stderr, "usage: %s [--criterion <id>]\n", argv[0]);
        return 1;
    }
    int failed = 0, ran = 0;
    for (const auto& [id, fn] : criteria) {
        if (!only.empty() && id != only) continue;
        ++ran;
        Outcome o{false, ""};
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 1;
    }
    return failed == 0 ? 0 : 1;
}
