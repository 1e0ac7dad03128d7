// Copyright 2026 The OTDRO Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "otdro/serialization.hpp"
#include "otdro/svm_demo.hpp"
#include "support/xml_check.hpp"

using namespace otdro;

namespace {

SvmExperimentConfig quick_config(std::uint64_t seed) {
    SvmExperimentConfig config;
    config.seed = seed;
    config.sample_count = 12;
    config.training_steps = 2000;
    return config;
}

} // namespace

TEST_CASE("zero radius keeps the sample fixed with unit weights") {
    SvmExperimentConfig config = quick_config(3);
    config.radii = {0.0};
    const SvmExperimentResult result = run_svm_demo(config);
    const SvmRadiusResult& rr = result.per_radius.front();
    for (std::size_t i = 0; i < rr.coupling.records.size(); ++i) {
        CHECK(rr.coupling.records[i].perturbed_v[0] == result.features[i][0]);
        CHECK(rr.coupling.records[i].perturbed_v[1] == result.features[i][1]);
        CHECK(rr.coupling.records[i].weight_multiplier == 1.0);
    }
}

TEST_CASE("worst-case risk grows strictly with the radius") {
    SvmExperimentConfig config = quick_config(4);
    const SvmExperimentResult result = run_svm_demo(config);
    REQUIRE(result.per_radius.size() == 4);
    for (std::size_t k = 1; k < result.per_radius.size(); ++k)
        CHECK(result.per_radius[k].objective > result.per_radius[k - 1].objective);
}

TEST_CASE("guarded coordinates and labels survive the perturbation") {
    SvmExperimentConfig config = quick_config(5);
    config.radii = {0.3};
    const SvmExperimentResult result = run_svm_demo(config);
    for (const TransportRecord& rec : result.per_radius.front().coupling.records)
        CHECK(rec.perturbed_v[2] == 1.0); // the absorbed-bias coordinate stayed put
    CHECK(result.per_radius.front().coupling.mean_weight() ==
          doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("artifacts are deterministic and well-formed") {
    namespace fs = std::filesystem;
    const fs::path dir_a = fs::temp_directory_path() / "otdro_svm_a";
    const fs::path dir_b = fs::temp_directory_path() / "otdro_svm_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    SvmExperimentConfig config = quick_config(7);
    config.radii = {0.0, 0.2};
    config.out_dir = dir_a.string();
    run_svm_demo(config);
    config.out_dir = dir_b.string();
    run_svm_demo(config);

    const std::vector<std::string> names = {
        "worst_case_r0.csv",          "worst_case_r0.2.csv",
        "perturbed_points_r0.svg",    "perturbed_points_r0.2.svg",
        "nominal_weights_r0.svg",     "nominal_weights_r0.2.svg",
        "run_metadata.json",
    };
    for (const std::string& name : names) {
        CAPTURE(name);
        REQUIRE(fs::exists(dir_a / name));
        const std::string a = read_file((dir_a / name).string());
        const std::string b = read_file((dir_b / name).string());
        CHECK(a == b);
        if (name.ends_with(".svg")) CHECK(test_support::xml_well_formed(a));
    }

    SUBCASE("csv schema") {
        const std::string csv = read_file((dir_a / "worst_case_r0.2.csv").string());
        CHECK(csv.rfind("x1_star,x2_star,y,w_star\n", 0) == 0);
        // one row per transport record: at least one per sample, more when a
        // sample's worst case splits across tied branches
        std::size_t lines = 0;
        for (char ch : csv)
            if (ch == '\n') ++lines;
        CHECK(lines >= config.sample_count + 1);
        CHECK(lines <= 2 * config.sample_count + 1);
    }

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("one-class draws are re-rolled with the next seed") {
    // with two samples, some seeds draw both labels on one side; scan for one
    // and check the substitution is recorded
    SvmExperimentConfig config = quick_config(0);
    config.sample_count = 2;
    config.radii = {0.0};
    bool saw_substitution = false;
    for (std::uint64_t seed = 0; seed < 40 && !saw_substitution; ++seed) {
        config.seed = seed;
        const SvmExperimentResult result = run_svm_demo(config);
        if (result.seed_used != result.seed_requested) {
            saw_substitution = true;
            CHECK(!result.rejected_seeds.empty());
            CHECK(result.labels.front() != result.labels.back());
        }
    }
    CHECK(saw_substitution);
}
