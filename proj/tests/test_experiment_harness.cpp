// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "occsim/error.hpp"
#include "occsim/experiment_harness.hpp"

using namespace occsim;
using Catch::Approx;

namespace {

std::string csv_of(const SweepResult& result) {
    std::ostringstream out;
    write_sweep_csv(result, out);
    return out.str();
}

SceneConfig noisy_scene(double sigma) {
    SceneConfig scene;
    scene.noise.sigma = sigma;
    return scene;
}

}  // namespace

TEST_CASE("reference trial decodes perfectly", "[harness]") {
    const Bits payload = test::random_bits(182, 21);
    const TrialOutcome outcome = run_trial(SceneConfig{}, payload, 1);
    CHECK(outcome.success == 1.0);
    CHECK(outcome.roi_found);
    CHECK_FALSE(outcome.link_broken);
}

TEST_CASE("the research-group message survives the reference link", "[harness]") {
    const Bits payload = text_to_bits("optical communications");
    REQUIRE(payload.size() == 176);
    CHECK(run_trial(SceneConfig{}, payload, 9).success == 1.0);
}

TEST_CASE("trials are deterministic per seed", "[harness]") {
    const Bits payload = test::random_bits(182, 22);
    SceneConfig scene = noisy_scene(0.25);
    scene.geometry = LinkGeometry(0.4);
    const TrialOutcome a = run_trial(scene, payload, 77);
    const TrialOutcome b = run_trial(scene, payload, 77);
    CHECK(a.success == b.success);
    CHECK(a.success >= 0.0);
    CHECK(a.success <= 1.0);
}

TEST_CASE("overwhelming noise gives coin-flip success", "[harness]") {
    const SceneConfig scene = noisy_scene(10.0);
    double total = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        total += run_trial(scene, test::random_bits(182, 1000 + t), hash64(5, 0, t)).success;
    }
    const double mean = total / 100.0;
    CHECK(mean >= 0.45);
    CHECK(mean <= 0.55);
}

TEST_CASE("broken links score zero", "[harness]") {
    SceneConfig scene;
    scene.geometry = LinkGeometry(10.0);
    const TrialOutcome outcome = run_trial(scene, test::random_bits(182, 23), 1);
    CHECK(outcome.link_broken);
    CHECK(outcome.success == 0.0);
}

TEST_CASE("default sweep distances", "[harness]") {
    const auto d = default_sweep_distances();
    REQUIRE(d.size() == 10);
    CHECK(d.front() == 0.10);
    CHECK(d.back() == 0.55);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] - d[i - 1] == Approx(0.05).epsilon(1e-12));
}

TEST_CASE("sweep config validation", "[harness]") {
    SweepConfig config;
    config.distances = {0.2, 0.2};
    CHECK_THROWS_AS(config.validate(), DomainError);
    config.distances = {};
    CHECK_THROWS_AS(config.validate(), DomainError);
    config.distances = {-0.1, 0.2};
    CHECK_THROWS_AS(config.validate(), DomainError);
    config.distances = {0.2};
    config.trials_per_distance = 0;
    CHECK_THROWS_AS(config.validate(), DomainError);
}

TEST_CASE("noiseless sweep succeeds everywhere", "[harness]") {
    SweepConfig config;
    config.trials_per_distance = 5;
    const SweepResult result = sweep_distance(config);
    REQUIRE(result.records.size() == 10);
    for (const auto& r : result.records) {
        CHECK(r.mean_success == 1.0);
        CHECK(r.std_success == 0.0);
        CHECK(r.trials == 5);
        CHECK(r.link_broken == 0);
    }
}

TEST_CASE("sweep output is identical across runs and thread counts", "[harness]") {
    SweepConfig config;
    config.distances = {0.35, 0.45, 0.5};
    config.trials_per_distance = 12;
    config.base_scene = noisy_scene(0.2);
    config.master_seed = 42;
    const std::string serial = csv_of(sweep_distance(config));
    CHECK(serial == csv_of(sweep_distance(config)));
    config.threads = 4;
    CHECK(serial == csv_of(sweep_distance(config)));

    config.master_seed = 43;
    CHECK(serial != csv_of(sweep_distance(config)));
}

TEST_CASE("fixed payloads are used verbatim", "[harness]") {
    SweepConfig config;
    config.distances = {0.2};
    config.trials_per_distance = 3;
    config.payload_source = PayloadSource::fixed;
    config.fixed_payload = text_to_bits("A");
    const SweepResult result = sweep_distance(config);
    CHECK(result.records[0].mean_success == 1.0);
}

TEST_CASE("sweep statistics stay in range", "[harness]") {
    SweepConfig config;
    config.distances = {0.45, 0.55};
    config.trials_per_distance = 10;
    config.base_scene = noisy_scene(0.25);
    for (const auto& r : sweep_distance(config).records) {
        CHECK(r.mean_success >= 0.0);
        CHECK(r.mean_success <= 1.0);
        CHECK(r.std_success >= 0.0);
    }
}

TEST_CASE("success does not grow with noise", "[harness][slow]") {
    SweepConfig config;
    config.distances = {0.4};
    config.trials_per_distance = 200;
    double previous = 1.0;
    for (int k = 0; k <= 10; ++k) {
        config.base_scene = noisy_scene(0.05 * k);
        const double mean = sweep_distance(config).records[0].mean_success;
        INFO("sigma " << 0.05 * k);
        CHECK(mean <= previous + 0.01);
        previous = mean;
    }
}

TEST_CASE("calibration rejects impossible targets", "[harness]") {
    const SceneConfig scene;
    CHECK_THROWS_AS(calibrate_noise(0.4, 1.0, scene), DomainError);
    CHECK_THROWS_AS(calibrate_noise(0.4, 0.0, scene), DomainError);
    CalibrationOptions quick;
    quick.trials = 4;
    CHECK_THROWS_AS(calibrate_noise(10.0, 0.5, scene, quick), DomainError);
}

TEST_CASE("calibration is reproducible", "[harness]") {
    CalibrationOptions options;
    options.trials = 40;
    options.master_seed = 3;
    const CalibrationResult a = calibrate_noise(0.4, 0.9, SceneConfig{}, options);
    const CalibrationResult b = calibrate_noise(0.4, 0.9, SceneConfig{}, options);
    CHECK(a.sigma > 0.0);
    CHECK(a.sigma == b.sigma);
    CHECK(a.mean_success == b.mean_success);
    CHECK(std::abs(a.mean_success - 0.9) <= 0.01);
    CHECK(a.probes.size() <= 30);
    CHECK(a.probes.front().sigma == 0.0);
}

TEST_CASE("sweep CSV uses the export schema", "[harness]") {
    SweepResult result;
    result.records.push_back({0.1, 1.0, 0.0, 200, 0});
    result.records.push_back({0.15, 0.975, 0.1, 200, 3});
    CHECK(csv_of(result) ==
          "distance_m,mean_success,std_success,trials,link_broken\n"
          "0.1,1,0,200,0\n"
          "0.15,0.975,0.1,200,3\n");
}

TEST_CASE("ingest measured success rates", "[harness]") {
    std::istringstream in("distance_m,success_rate\n0.1,1\n0.4,0.98\n");
    const Measurements m = ingest_measurements(in);
    REQUIRE(std::holds_alternative<SweepResult>(m));
    const auto& records = std::get<SweepResult>(m).records;
    REQUIRE(records.size() == 2);
    CHECK(records[1].distance_m == 0.4);
    CHECK(records[1].mean_success == 0.98);
}

TEST_CASE("ingest round-trips an exported sweep", "[harness]") {
    SweepResult result;
    result.records.push_back({0.2, 0.5, 0.25, 10, 1});
    std::istringstream in(csv_of(result));
    const Measurements m = ingest_measurements(in);
    REQUIRE(std::holds_alternative<SweepResult>(m));
    CHECK(csv_of(std::get<SweepResult>(m)) == csv_of(result));
}

TEST_CASE("ingest angular profiles", "[harness]") {
    std::istringstream in("# unit=norm\nangle_deg,power\n0,0\n90,1\n180,0\n");
    const Measurements m = ingest_measurements(in);
    REQUIRE(std::holds_alternative<AngularProfile>(m));
    CHECK(std::get<AngularProfile>(m).unit == "norm");
    CHECK(std::get<AngularProfile>(m).samples.size() == 3);
}

TEST_CASE("ingest reports bad rows by line", "[harness]") {
    std::istringstream in("distance_m,success_rate\n0.2,abc\n");
    try {
        ingest_measurements(in, "lab.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("lab.csv:2") != std::string::npos);
    }
    std::istringstream out_of_range("distance_m,success_rate\n0.2,1.5\n");
    CHECK_THROWS_AS(ingest_measurements(out_of_range), ParseError);
}

TEST_CASE("ingest rejects unknown headers", "[harness]") {
    std::istringstream in("distance,rate\n0.2,abc\n");
    CHECK_THROWS_AS(ingest_measurements(in), SchemaError);
}

TEST_CASE("ingest reads files", "[harness]") {
    const auto path = std::filesystem::temp_directory_path() / "occsim_ingest_test.csv";
    {
        std::ofstream out(path);
        out << "distance_m,success_rate\n0.3,0.99\n";
    }
    const Measurements m = ingest_measurements(path);
    CHECK(std::get<SweepResult>(m).records.size() == 1);
    std::filesystem::remove(path);
    CHECK_THROWS(ingest_measurements(path));
}
