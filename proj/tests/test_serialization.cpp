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

#include "otdro/lifting.hpp"
#include "otdro/serialization.hpp"
#include "otdro/solvers.hpp"

using namespace otdro;

namespace {

ClassicInstance sample_instance() {
    ValueDomain domain;
    domain.v_lower = {-2.0};
    domain.v_upper = {2.0};
    domain.w_max = 4.0;
    return ClassicInstance{PiecewiseAffineLoss({{{1.0}, 0.0}, {{-1.0}, 0.5}}),
                           GroundCost::p_norm(2.0),
                           DiscreteMeasure::uniform({{0.0}, {1.0}}),
                           SigmaField::Trivial,
                           0.25,
                           domain};
}

} // namespace

TEST_CASE("measure documents round-trip and reject unknown fields") {
    const DiscreteMeasure measure({{0.125}, {1.0, }}, {0.25, 0.75});
    const DiscreteMeasure parsed = measure_from_json(measure_to_json(measure));
    CHECK(parsed == measure);
    CHECK(measure_to_json(parsed) == measure_to_json(measure));

    CHECK_THROWS_AS(measure_from_json(R"({"atoms": [[0.0]], "weights": [1.0], "extra": 1})"),
                    InputError);
    CHECK_THROWS_AS(measure_from_json(R"({"atoms": [[0.0]]})"), InputError);
}

TEST_CASE("classic instance documents") {
    const ClassicInstance instance = sample_instance();
    const std::string text = instance_to_json(instance);
    const ClassicInstance parsed = instance_from_json(text);
    CHECK(parsed.loss == instance.loss);
    CHECK(parsed.cost == instance.cost);
    CHECK(parsed.nominal == instance.nominal);
    CHECK(parsed.radius == instance.radius);
    CHECK(parsed.value_domain == instance.value_domain);
    CHECK(instance_to_json(parsed) == text);

    SUBCASE("contract violations") {
        CHECK_THROWS_AS(instance_from_json("{}"), InputError);
        // unknown top-level field
        std::string bad = text;
        bad.insert(bad.find("\"loss\""), "\"surprise\": 3, ");
        CHECK_THROWS_AS(instance_from_json(bad), InputError);
        // wrong version
        std::string wrong = text;
        wrong.replace(wrong.find("\"version\": 1"), 12, "\"version\": 2");
        CHECK_THROWS_AS(instance_from_json(wrong), InputError);
        // malformed text and type mismatches are input errors, not crashes
        CHECK_THROWS_AS(instance_from_json("{ not json"), InputError);
        CHECK_THROWS_AS(measure_from_json(R"({"atoms": "x", "weights": [1.0]})"), InputError);
    }

    SUBCASE("the max-norm exponent round-trips through its string form") {
        ClassicInstance inf_norm = sample_instance();
        inf_norm.cost = GroundCost::p_norm(kInf);
        const ClassicInstance parsed = instance_from_json(instance_to_json(inf_norm));
        CHECK(std::isinf(parsed.cost.p()));
        CHECK(instance_to_json(parsed).find("\"p\": \"inf\"") != std::string::npos);
    }
}

TEST_CASE("lifted documents round-trip for every cost kind") {
    const ClassicInstance classic = sample_instance();

    std::vector<std::string> documents;
    documents.push_back(lifted_to_json(
        lift_wasserstein(classic.loss, classic.cost, classic.nominal, 0.25)));
    documents.push_back(lifted_to_json(
        lift_phi_divergence(classic.loss, EntropyFunction::chi_order(2.5), classic.nominal,
                            0.25, 0.1, Point{3.0})));
    documents.push_back(lifted_to_json(
        build_interpolated(classic.loss, classic.cost, EntropyFunction::kullback_leibler(),
                           classic.nominal, 0.25, 1.0, 2.0)));
    auto [sinkhorn_instance, sinkhorn_data] =
        lift_sinkhorn(classic.loss, GroundCost::squared_euclidean(), classic.nominal, 1.0,
                      0.5, DiscreteMeasure::uniform({{0.0}, {0.5}, {1.0}}));
    documents.push_back(lifted_to_json(sinkhorn_instance, &sinkhorn_data));

    for (const std::string& text : documents) {
        const LoadedLifted loaded = lifted_from_json(text);
        const std::string again = loaded.sinkhorn
                                      ? lifted_to_json(loaded.instance, &*loaded.sinkhorn)
                                      : lifted_to_json(loaded.instance);
        CHECK(again == text);
    }

    SUBCASE("sinkhorn block carries the kernel data") {
        const LoadedLifted loaded = lifted_from_json(documents.back());
        REQUIRE(loaded.sinkhorn.has_value());
        CHECK(loaded.sinkhorn->kernel_rows.size() == 2);
        CHECK(loaded.sinkhorn->adjusted_radius ==
              doctest::Approx(sinkhorn_data.adjusted_radius));
        CHECK(loaded.instance.condition_offset == 1);
    }
}

TEST_CASE("per-atom losses survive the lifted round trip") {
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform({{0.0, 1.0}, {1.0, 1.0}});
    std::vector<PiecewiseAffineLoss> losses;
    losses.push_back(PiecewiseAffineLoss({{{1.0, 0.5}, 0.0}, {{0.0, 0.0}, 0.0}}));
    losses.push_back(PiecewiseAffineLoss({{{-1.0, 0.5}, 0.2}, {{0.0, 0.0}, 0.0}}));
    const LiftedInstance instance = build_interpolated_per_atom(
        losses, GroundCost::squared_euclidean_label_guard({1}),
        EntropyFunction::kullback_leibler(), mu_hat, 0.3, 1.0, 1.0);
    const std::string text = lifted_to_json(instance);
    const LoadedLifted loaded = lifted_from_json(text);
    REQUIRE(loaded.instance.losses.size() == 2);
    CHECK(loaded.instance.losses[0] == losses[0]);
    CHECK(loaded.instance.losses[1] == losses[1]);
    CHECK(loaded.instance.cost.ground().guarded() == std::vector<std::size_t>{1});
    CHECK(lifted_to_json(loaded.instance) == text);

    // the loaded instance solves identically
    CHECK(solve_kl_interpolated(loaded.instance).certificate.objective ==
          solve_kl_interpolated(instance).certificate.objective);
}

TEST_CASE("result documents expose the certificate and diagnostics") {
    const ClassicInstance classic = sample_instance();
    const LiftedInstance instance =
        build_interpolated(classic.loss, GroundCost::squared_euclidean(),
                           EntropyFunction::kullback_leibler(), classic.nominal, 0.2, 1.0, 1.0);
    const WorstCaseCoupling coupling = solve_kl_interpolated(instance);
    const std::string text = result_to_json(coupling);
    CHECK(text.find("\"objective\"") != std::string::npos);
    CHECK(text.find("\"weak_duality_ok\": true") != std::string::npos);
    CHECK(text.find("\"records\"") != std::string::npos);

    const DualCertificate cert = certificate_from_result_json(text);
    CHECK(cert.objective == coupling.certificate.objective);
    CHECK(cert.lambda_star == coupling.certificate.lambda_star);
    CHECK(cert.alpha_star == coupling.certificate.alpha_star);
}

TEST_CASE("oracle reports") {
    const std::string with_gap = oracle_report_to_json(1.5, 0.01, {1.2, 1.4, 1.5});
    CHECK(with_gap.find("\"gap_vs_dual\": 0.01") != std::string::npos);
    const std::string without_gap = oracle_report_to_json(1.5, std::nullopt, {1.5});
    CHECK(without_gap.find("\"gap_vs_dual\": null") != std::string::npos);
}

TEST_CASE("atomic write then read round-trips") {
    const std::string path = "serialization_test_scratch.json";
    write_file_atomic(path, "{\"a\": 1}\n");
    CHECK(read_file(path) == "{\"a\": 1}\n");
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_file("definitely/not/here.json"), InputError);
}
