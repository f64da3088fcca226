#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eqlab/experiment.hpp"

namespace {

constexpr const char* version_string = "eqlab 0.1.0";

int run_command(const std::string& config_path, const std::vector<std::string>& overrides, std::size_t workers,
                const std::string& output, const std::string& format) {
    std::ifstream in(config_path);
    if (!in) throw eqlab::ConfigInvalid("--config", "cannot read '" + config_path + "'");
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw eqlab::ConfigInvalid("--config", "'" + config_path + "' is not valid JSON");
    for (const auto& o : overrides) eqlab::apply_override(doc, o);
    if (workers > 0) doc["workers"] = workers;
    if (!output.empty()) doc["output_path"] = output;
    if (!format.empty()) doc["format"] = format;

    const eqlab::ExperimentConfig config = eqlab::parse_config(doc);
    const auto records = eqlab::run_experiment(config);
    const auto fmt = eqlab::format_for(config.format, config.output_path);
    if (config.output_path.empty() || config.output_path == "-")
        std::cout << eqlab::serialize(records, fmt);
    else
        eqlab::emit(records, fmt, config.output_path);

    int failed = 0;
    for (const auto& r : records)
        if (eqlab::is_guaranteed(r.quantity) && !r.satisfied) {
            std::fprintf(stderr, "bound failed: %s d_B=%zu trial=%lld empirical=%.6g bound=%.6g\n", r.quantity.c_str(),
                         r.d_B, r.trial, r.empirical, r.bound);
            ++failed;
        }
    return failed == 0 ? 0 : 2;
}

void print_constants() {
    using C = eqlab::ConstantsTable;
    std::printf("c   = (ln 2)^2 / (72 pi^3) = %.17g\n", C::c);
    std::printf("c'  = 2 / (9 pi^3)         = %.17g\n", C::c_prime);
    std::printf("c'' = 1 / (128 pi^2)       = %.17g\n", C::c_double_prime);
}

int check_identities(std::size_t dim, std::size_t pairs, std::size_t moment_trials, std::uint64_t seed) {
    eqlab::Rng rng(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        eqlab::ComplexMatrix a(dim, dim), b(dim, dim);
        for (auto& z : a.data()) z = rng.complex_normal();
        for (auto& z : b.data()) z = rng.complex_normal();
        worst = std::max(worst, eqlab::swap_trace_identity_check(a, b));
    }
    const double dev = eqlab::haar_pair_moment_check(eqlab::Subspace::full(dim), moment_trials, seed);
    const double moment_bound = 5.0 / std::sqrt(static_cast<double>(moment_trials));
    const bool swap_ok = worst <= 1e-10, moment_ok = dev <= moment_bound;
    std::printf("%s swap trace identity: max deviation %.3e (<= 1e-10) over %zu pairs\n", swap_ok ? "PASS" : "FAIL",
                worst, pairs);
    std::printf("%s Haar pair moment: max deviation %.3e (<= %.3e) at N = %zu\n", moment_ok ? "PASS" : "FAIL", dev,
                moment_bound, moment_trials);
    return swap_ok && moment_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of pure-state equilibration bounds"};
    app.require_subcommand(1);

    std::string config_path, output, format;
    std::vector<std::string> overrides;
    std::size_t workers = 0;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--set", overrides, "Override a field, e.g. --set time_sampling.n_samples=500");
    run->add_option("--workers", workers, "Worker threads (overrides config)");
    run->add_option("--output", output, "Output path ('-' for stdout)");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    app.add_subcommand("constants", "Print the concentration constants");

    std::size_t id_dim = 4, id_pairs = 100, id_trials = 10000;
    std::uint64_t id_seed = 1;
    auto* ids = app.add_subcommand("check-identities", "SWAP trace and Haar pair-moment checks");
    ids->add_option("--dim", id_dim, "Dimension")->check(CLI::Range(1, 64));
    ids->add_option("--pairs", id_pairs, "Random matrix pairs");
    ids->add_option("--trials", id_trials, "Haar samples")->check(CLI::PositiveNumber);
    ids->add_option("--seed", id_seed, "Seed");

    app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*run) return run_command(config_path, overrides, workers, output, format);
        if (app.got_subcommand("constants")) {
            print_constants();
            return 0;
        }
        if (*ids) return check_identities(id_dim, id_pairs, id_trials, id_seed);
        if (app.got_subcommand("version")) {
            std::printf("%s\n", version_string);
            return 0;
        }
    } catch (const eqlab::ConfigInvalid& e) {
        std::fprintf(stderr, "config error (%s): %s\n", e.field().c_str(), e.what());
        return 1;
    } catch (const eqlab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
