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

#include <cstdlib>
#include <filesystem>
#include <string>

#include "otdro/serialization.hpp"

using namespace otdro;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string command = std::string(OTDRO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

struct Workspace {
    fs::path dir;
    Workspace() : dir(fs::temp_directory_path() / "otdro_cli_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

void write_sample_instance(const Workspace& ws) {
    ValueDomain domain;
    domain.v_lower = {-3.0};
    domain.v_upper = {3.0};
    domain.w_max = 4.0;
    const ClassicInstance instance{PiecewiseAffineLoss({{{1.0}, 0.0}, {{-1.0}, 0.2}}),
                                   GroundCost::squared_euclidean(),
                                   DiscreteMeasure::uniform({{0.0}, {1.0}}),
                                   SigmaField::Trivial,
                                   0.2,
                                   domain};
    write_file_atomic(ws.path("instance.json"), instance_to_json(instance));
}

} // namespace

TEST_CASE("lift / solve / oracle / emit-conic pipeline") {
    Workspace ws;
    write_sample_instance(ws);

    CHECK(run("lift --family interpolated --in " + ws.path("instance.json") + " --out " +
              ws.path("lifted.json")) == 0);
    CHECK(run("solve --in " + ws.path("lifted.json") + " --method kl --out " +
              ws.path("result.json")) == 0);
    CHECK(run("oracle --in " + ws.path("lifted.json") + " --v-step 0.5 --out " +
              ws.path("oracle.json")) == 0);
    CHECK(run("emit-conic --in " + ws.path("lifted.json") + " --out " +
              ws.path("program.json") + " --verify " + ws.path("result.json")) == 0);

    CHECK(fs::exists(ws.path("lifted.json")));
    CHECK(fs::exists(ws.path("result.json")));
    CHECK(fs::exists(ws.path("oracle.json")));
    CHECK(fs::exists(ws.path("program.json")));

    SUBCASE("the oracle value stays below the dual objective") {
        const std::string report = read_file(ws.path("oracle.json"));
        CHECK(report.find("\"gap_vs_dual\"") != std::string::npos);
    }
}

TEST_CASE("wasserstein lift and solve") {
    Workspace ws;
    write_sample_instance(ws);
    CHECK(run("lift --family wasserstein --in " + ws.path("instance.json") + " --out " +
              ws.path("wass.json")) == 0);
    CHECK(run("solve --in " + ws.path("wass.json") + " --method wasserstein --out " +
              ws.path("wass_result.json")) == 0);
}

TEST_CASE("phi lift with grid-searched scenario and general-phi solve") {
    Workspace ws;
    write_sample_instance(ws);
    CHECK(run("lift --family phi --phi total-variation --mix-epsilon 0.05 --in " +
              ws.path("instance.json") + " --out " + ws.path("phi.json")) == 0);
    CHECK(run("oracle --in " + ws.path("phi.json") + " --v-step 0.5 --out " +
              ws.path("phi_oracle.json")) == 0);

    CHECK(run("lift --family interpolated --phi modified-chi2 --in " +
              ws.path("instance.json") + " --out " + ws.path("mchi2.json")) == 0);
    CHECK(run("solve --in " + ws.path("mchi2.json") + " --method general-phi --out " +
              ws.path("mchi2_result.json")) == 0);
}

TEST_CASE("sinkhorn end to end") {
    Workspace ws;
    write_sample_instance(ws);
    write_file_atomic(ws.path("reference.json"),
                      measure_to_json(DiscreteMeasure::uniform({{0.0}, {0.5}, {1.0}})));
    CHECK(run("lift --family sinkhorn --reg-epsilon 0.8 --radius 1.0 --in " +
              ws.path("instance.json") + " --reference " + ws.path("reference.json") +
              " --out " + ws.path("sink.json")) == 0);
    CHECK(run("solve --in " + ws.path("sink.json") + " --method sinkhorn --out " +
              ws.path("sink_result.json")) == 0);
    CHECK(run("oracle --in " + ws.path("sink.json") + " --out " +
              ws.path("sink_oracle.json")) == 0);
}

TEST_CASE("divergence subcommand") {
    Workspace ws;
    write_file_atomic(ws.path("mu.json"),
                      measure_to_json(DiscreteMeasure({{0.0}, {1.0}}, {0.6, 0.4})));
    write_file_atomic(ws.path("mu_hat.json"),
                      measure_to_json(DiscreteMeasure::uniform({{0.0}, {1.0}})));
    CHECK(run("divergence --phi kullback-leibler --mu " + ws.path("mu.json") + " --mu-hat " +
              ws.path("mu_hat.json")) == 0);
    CHECK(run("divergence --phi total-variation --mu " + ws.path("mu.json") + " --mu-hat " +
              ws.path("mu_hat.json")) == 0);
}

TEST_CASE("exit codes") {
    Workspace ws;
    write_sample_instance(ws);

    SUBCASE("unknown flags and subcommands exit 2") {
        CHECK(run("--definitely-not-a-flag") == 2);
        CHECK(run("frobnicate") == 2);
        CHECK(run("lift --family nope --in " + ws.path("instance.json") + " --out " +
                  ws.path("x.json")) == 2);
        CHECK(run("lift --family interpolated --in missing.json --out " + ws.path("x.json")) ==
              2);
    }

    SUBCASE("infeasible sinkhorn lifts exit 3") {
        write_file_atomic(ws.path("far_reference.json"),
                          measure_to_json(DiscreteMeasure::point_mass({80.0})));
        CHECK(run("lift --family sinkhorn --reg-epsilon 0.5 --in " + ws.path("instance.json") +
                  " --reference " + ws.path("far_reference.json") + " --out " +
                  ws.path("sink.json")) == 3);
    }

    SUBCASE("help exits 0") { CHECK(run("--help") == 0); }
}

TEST_CASE("svm-demo runs are byte-identical per seed") {
    Workspace ws;
    CHECK(run("svm-demo --seed 7 --radius 0 --radius 0.1 --out " + ws.path("runA")) == 0);
    CHECK(run("svm-demo --seed 7 --radius 0 --radius 0.1 --out " + ws.path("runB")) == 0);
    const std::string name = "/worst_case_r0.1.csv";
    CHECK(read_file(ws.path("runA") + name) == read_file(ws.path("runB") + name));
}
