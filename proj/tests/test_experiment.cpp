#include "catch_amalgamated.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "eqlab/experiment.hpp"

using namespace eqlab;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("eqlab_test_" + name)).string();
}

ExperimentRecord sample_record() {
    return ExperimentRecord{"thm1", 2, 8, 16, 3, 1234567890123ULL, "thm1_mean_distance", 0.1, 1.0 / 3.0, true, 0.0};
}

}  // namespace

TEST_CASE("config: defaults and validation") {
    const ExperimentConfig c = parse_config(json{{"experiment", "thm1"}});
    CHECK(c.experiment == ExperimentKind::Thm1);
    CHECK(c.d_B == std::vector<std::size_t>{32});

    CHECK_THROWS_AS(parse_config(json::array()), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"d_S", 2}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm9"}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"trials", 0}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"d_S", 0}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"d_B", json::array()}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"subspace", "half"}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"format", "xml"}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"typo", 1}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm2"}, {"trials", 10}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"hamiltonian", {{"window", {1.0, 0.0}}}}}),
                    ConfigInvalid);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm1"}, {"d_S", 64}, {"d_B", 128}}), DimensionOverflow);
}

TEST_CASE("config: field name is reported") {
    try {
        parse_config(json{{"experiment", "thm1"}, {"trials", 0}});
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(e.field() == "trials");
    }
}

TEST_CASE("config: sweep lists and explicit subspaces") {
    const ExperimentConfig c = parse_config(json{{"experiment", "thm1"}, {"d_B", {4, 8}}});
    CHECK(c.d_B == std::vector<std::size_t>{4, 8});
    // first two basis vectors of C^2 ⊗ C^2
    const json basis = {{"d_R", 2}, {"basis", {1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0}}};
    const ExperimentConfig e =
        parse_config(json{{"experiment", "thm2"}, {"d_B", 2}, {"subspace", "explicit"}, {"subspace_basis", basis}, {"trials", 30}});
    CHECK(e.explicit_basis.rows() == 4);
    CHECK(e.explicit_basis.cols() == 2);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "thm2"}, {"d_B", 3}, {"subspace", "explicit"},
                                      {"subspace_basis", basis}, {"trials", 30}}),
                    ConfigInvalid);
}

TEST_CASE("config: dotted overrides") {
    json doc{{"experiment", "thm1"}};
    apply_override(doc, "time_sampling.n_samples=300");
    apply_override(doc, "d_B=[4,8]");
    apply_override(doc, "output_path=out.csv");
    const ExperimentConfig c = parse_config(doc);
    CHECK(c.time_sampling.n_samples == 300);
    CHECK(c.d_B.size() == 2);
    CHECK(c.output_path == "out.csv");
    CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigInvalid);
    CHECK_THROWS_AS(apply_override(doc, "a..b=1"), ConfigInvalid);
}

TEST_CASE("run: thm1 gives one row per trial plus an aggregate") {
    json doc{{"experiment", "thm1"}, {"d_S", 2}, {"d_B", 32}, {"trials", 10}, {"time_sampling", {{"n_samples", 300}}}};
    const auto records = run_experiment(parse_config(doc));
    REQUIRE(records.size() == 11);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(records[i].trial == static_cast<long long>(i));
        CHECK(records[i].seed == derive_seed(1, 0, i));
    }
    CHECK(records.back().trial == -1);
    CHECK(all_guaranteed_satisfied(records));
}

TEST_CASE("run: identical output across reruns and worker counts") {
    json doc{{"experiment", "thm1"}, {"d_B", {4, 8}}, {"trials", 6}, {"time_sampling", {{"n_samples", 200}}}};
    const auto a = run_experiment(parse_config(doc));
    const auto b = run_experiment(parse_config(doc));
    doc["workers"] = 3;
    const auto c = run_experiment(parse_config(doc));
    CHECK(to_csv(a) == to_csv(b));
    CHECK(a == c);
}

TEST_CASE("run: every experiment kind produces satisfied guaranteed rows") {
    const std::vector<json> docs{
        {{"experiment", "thm2"}, {"d_B", 8}, {"trials", 30}},
        {{"experiment", "thm3-bath"}, {"d_B", 8}, {"trials", 30}},
        {{"experiment", "thm3-subsystem"}, {"d_B", 8}, {"trials", 30}},
        {{"experiment", "thm4"}, {"d_B", 8}, {"trials", 1}, {"torus_samples", 1000}, {"time_sampling", {{"n_samples", 1000}}}},
        {{"experiment", "counterexamples"}, {"d_B", 4}, {"counterexample_times", 50}},
        {{"experiment", "identities"}, {"trials", 10}, {"moment_trials", 2000}},
    };
    for (const auto& doc : docs) {
        const auto records = run_experiment(parse_config(doc));
        INFO(doc.dump());
        CHECK_FALSE(records.empty());
        CHECK(all_guaranteed_satisfied(records));
    }
}

TEST_CASE("guaranteed quantities") {
    CHECK(is_guaranteed("thm1_mean_distance"));
    CHECK(is_guaranteed("swap_trace_deviation"));
    CHECK_FALSE(is_guaranteed("thm2_tail_frequency"));
    CHECK_FALSE(is_guaranteed("thm4_ks_statistic"));
    ExperimentRecord r = sample_record();
    r.satisfied = false;
    CHECK_FALSE(all_guaranteed_satisfied({r}));
    r.quantity = "thm4_tail_frequency";
    CHECK(all_guaranteed_satisfied({r}));
}

TEST_CASE("emit: csv layout") {
    const std::string csv = to_csv({sample_record()});
    CHECK(csv ==
          "experiment,d_S,d_B,d_R,trial,seed,quantity,empirical,bound,satisfied,wall_ms\n"
          "thm1,2,8,16,3,1234567890123,thm1_mean_distance,0.10000000000000001,0.33333333333333331,true,0\n");
    ExperimentRecord f = sample_record();
    f.satisfied = false;
    CHECK(to_csv({f}).find(",false,") != std::string::npos);
}

TEST_CASE("emit: json round trip") {
    std::vector<ExperimentRecord> records{sample_record(), sample_record()};
    records[1].trial = -1;
    records[1].satisfied = false;
    records[1].empirical = 1e-300;
    records[1].seed = ~0ULL;
    const std::string text = to_json_text(records);
    CHECK(text.find("\"satisfied\": true") != std::string::npos);
    CHECK(text.find("\"satisfied\": false") != std::string::npos);
    CHECK(records_from_json(json::parse(text)) == records);
}

TEST_CASE("emit: files, formats and errors") {
    const std::string path = temp_path("out.json");
    emit({sample_record()}, format_for("", path), path);
    CHECK(records_from_json(json::parse(read_file(path))) == std::vector<ExperimentRecord>{sample_record()});
    std::remove(path.c_str());

    CHECK(format_for("", "a.csv") == OutputFormat::Csv);
    CHECK(format_for("csv", "a.json") == OutputFormat::Csv);
    CHECK(format_for("json", "a.csv") == OutputFormat::Json);

    CHECK_THROWS_AS(emit({}, OutputFormat::Csv, temp_path("empty.csv")), Error);
    try {
        emit({sample_record()}, OutputFormat::Csv, "/nonexistent-dir/x.csv");
        FAIL("expected an I/O error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
    }
}
