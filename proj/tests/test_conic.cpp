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

#include <cmath>

#include "otdro/conic.hpp"
#include "otdro/extended.hpp"
#include "otdro/lifting.hpp"
#include "otdro/rng.hpp"
#include "otdro/solvers.hpp"

using namespace otdro;

namespace {

LiftedInstance norm_instance(std::size_t n, double radius, bool box = false) {
    std::vector<Point> atoms;
    for (std::size_t i = 0; i < n; ++i) atoms.push_back({0.5 * static_cast<double>(i)});
    const PiecewiseAffineLoss loss({{{0.8}, 0.1}});
    ValueDomain domain;
    if (box) {
        domain.v_lower = {-4.0};
        domain.v_upper = {4.0};
    }
    LiftedInstance instance = build_interpolated(
        loss, GroundCost::p_norm(2.0), EntropyFunction::kullback_leibler(),
        DiscreteMeasure::uniform(atoms), radius, 1.0, 1.0, domain);
    instance.domain_is_box = box;
    return instance;
}

LiftedInstance quadratic_instance(double radius) {
    const PiecewiseAffineLoss loss({{{1.0, -0.5}, 0.2}, {{-0.3, 0.7}, 0.0}});
    const DiscreteMeasure mu_hat =
        DiscreteMeasure::uniform({{0.0, 0.0}, {1.0, -1.0}, {0.5, 2.0}});
    return build_interpolated(loss, GroundCost::squared_euclidean(),
                              EntropyFunction::kullback_leibler(), mu_hat, radius, 1.0, 1.0);
}

} // namespace

TEST_CASE("constraint counts, full-space norm cost, n = 1, K = 1") {
    const ConicProgram prog = build_conic(norm_instance(1, 0.2));
    CHECK(prog.exp_cones.size() == 1);
    CHECK(prog.majorization.size() == 1);
    CHECK(prog.norm_bounds.size() == 1);
    CHECK(prog.quadratic_offsets.empty());
    CHECK(prog.aggregate.label == "aggregate");
    CHECK(prog.blocks.size() == 4); // lambda, t, eta, p — no xi/omega off a full space
    CHECK(prog.nonneg.size() == 2); // lambda and eta_1
}

TEST_CASE("full-space majorization rows carry a' vhat + b") {
    // (-l_k)*(y) is finite only at y = -a with value b; a brute 1-D scan of
    // sup_v y v + (a v + b) confirms it stays bounded only there
    const double a = 0.8, b = 0.1;
    auto neg_loss_conjugate = [&](double y, double half_width) {
        double best = -kInf;
        for (double v = -half_width; v <= half_width; v += half_width / 2000.0)
            best = std::max(best, y * v + a * v + b);
        return best;
    };
    CHECK(neg_loss_conjugate(-a, 1e3) == doctest::Approx(b));
    CHECK(neg_loss_conjugate(-a + 0.1, 1e3) > 50.0);

    const ConicProgram prog = build_conic(norm_instance(2, 0.2));
    // row: a vhat_i + b - p_i <= 0
    const std::size_t p0 = prog.block("p").offset;
    REQUIRE(prog.majorization.size() == 2);
    CHECK(prog.majorization[0].expr.constant == doctest::Approx(a * 0.0 + b));
    CHECK(prog.majorization[1].expr.constant == doctest::Approx(a * 0.5 + b));
    REQUIRE(prog.majorization[0].expr.terms.size() == 1);
    CHECK(prog.majorization[0].expr.terms[0].first == p0);
    CHECK(prog.majorization[0].expr.terms[0].second == -1.0);
    // norm bound on the constant vector (-a) against lambda theta1
    CHECK(prog.norm_bounds[0].vec[0].constant == doctest::Approx(-a));
}

TEST_CASE("quadratic variant emits 1/lambda offset rows and no xi/omega blocks") {
    const LiftedInstance instance = quadratic_instance(0.3);
    const ConicProgram prog = build_conic(instance);
    CHECK(prog.cost_kind == "quadratic");
    CHECK(prog.exp_cones.size() == 3);
    CHECK(prog.quadratic_offsets.size() == 6); // n = 3 atoms x K = 2 pieces
    CHECK(prog.majorization.empty());
    CHECK(prog.norm_bounds.empty());
    CHECK(prog.blocks.size() == 4);

    // row for atom 0, piece 0: a'vhat + b + ||a||^2/(4 lam th1) <= p_0
    const AffinePiece& piece = instance.loss_for(0).piece(0);
    const double sq = piece.a[0] * piece.a[0] + piece.a[1] * piece.a[1];
    CHECK(prog.quadratic_offsets[0].constant == doctest::Approx(piece.b));
    CHECK(prog.quadratic_offsets[0].coefficient == doctest::Approx(sq / 4.0));
}

TEST_CASE("exp cone membership implements both branches") {
    CHECK(exp_cone_violation(std::exp(1.0), 1.0, 1.0) == 0.0);         // boundary
    CHECK(exp_cone_violation(std::exp(1.0) + 0.1, 1.0, 1.0) == 0.0);   // interior
    CHECK(exp_cone_violation(std::exp(1.0) - 0.1, 1.0, 1.0) > 0.05);   // outside
    CHECK(exp_cone_violation(1.0, 0.0, -1.0) == 0.0);                  // closure slice
    CHECK(exp_cone_violation(1.0, 0.0, 0.5) == 0.5);                   // x3 > 0 at x2 = 0
    CHECK(exp_cone_violation(-0.2, 0.0, -1.0) == doctest::Approx(0.2));
    CHECK(exp_cone_violation(1.0, -0.3, 0.0) == doctest::Approx(0.3)); // x2 < 0
}

TEST_CASE("a converged certificate satisfies every row") {
    for (const LiftedInstance& instance :
         {quadratic_instance(0.3), norm_instance(3, 0.4), norm_instance(3, 0.4, true)}) {
        CAPTURE(instance.cost.ground().kind_name());
        const WorstCaseCoupling solved = solve_kl_interpolated(instance);
        const ConicProgram prog = build_conic(instance);
        const VerificationReport report =
            verify_certificate(prog, solved.certificate, instance);
        CAPTURE(report.violations.empty() ? "" : report.violations.front().label);
        CHECK(report.clean());
        CHECK(report.max_violation <= 1e-7);
        CHECK(report.objective_difference <= 1e-7);
    }
}

TEST_CASE("perturbing the multiplier breaks feasibility") {
    const LiftedInstance instance = quadratic_instance(0.3);
    const WorstCaseCoupling solved = solve_kl_interpolated(instance);
    const ConicProgram prog = build_conic(instance);
    DualCertificate perturbed = solved.certificate;
    perturbed.lambda_star *= 1.1;
    const VerificationReport report = verify_certificate(prog, perturbed, instance);
    CHECK(!report.clean());
    CHECK(report.max_violation > 1e-7);
}

TEST_CASE("zero-radius instances are skipped with a note") {
    const LiftedInstance instance = quadratic_instance(0.0);
    const WorstCaseCoupling solved = solve_kl_interpolated(instance);
    const VerificationReport report =
        verify_certificate(build_conic(instance), solved.certificate, instance);
    CHECK(report.skipped);
    CHECK(!report.note.empty());
}

TEST_CASE("serialization round-trips and builds are byte-identical") {
    for (const LiftedInstance& instance :
         {quadratic_instance(0.25), norm_instance(2, 0.2), norm_instance(2, 0.2, true)}) {
        const ConicProgram prog = build_conic(instance);
        const std::string doc = serialize_conic(prog);
        CHECK(serialize_conic(build_conic(instance)) == doc); // determinism
        const ConicProgram parsed = parse_conic(doc);
        CHECK(parsed == prog);
    }
}

TEST_CASE("two-atom two-piece hinge counts") {
    const PiecewiseAffineLoss hinge({{{-1.0}, 1.0}, {{0.0}, 0.0}});
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform({{0.0}, {1.0}});
    const LiftedInstance instance =
        build_interpolated(hinge, GroundCost::p_norm(2.0),
                           EntropyFunction::kullback_leibler(), mu_hat, 0.2, 1.0, 1.0);
    const ConicProgram prog = build_conic(instance);
    CHECK(prog.exp_cones.size() == 2);
    CHECK(prog.majorization.size() == 4);
    CHECK(prog.norm_bounds.size() == 4);
}

TEST_CASE("box-domain norm build carries xi/omega/s blocks and link rows") {
    const LiftedInstance instance = norm_instance(2, 0.3, true);
    const ConicProgram prog = build_conic(instance);
    CHECK(prog.domain == "box");
    CHECK(prog.blocks.size() == 7);
    CHECK(prog.block("xi").size == 2);   // n K d = 2 * 1 * 1
    CHECK(prog.links.size() == 2);       // one per coordinate per (atom, piece)
    CHECK(prog.supports.size() == 4);    // lower and upper epigraph rows
    CHECK(prog.majorization.size() == 2);
}

TEST_CASE("unsupported shapes are rejected") {
    // box + quadratic cost has no stated reduction
    LiftedInstance instance = quadratic_instance(0.2);
    instance.domain_is_box = true;
    instance.value_domain.v_lower = {-3.0, -3.0};
    instance.value_domain.v_upper = {3.0, 3.0};
    CHECK_THROWS_AS(build_conic(instance), InputError);

    // non-KL entropies are outside the reduction
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform({{0.0}});
    const LiftedInstance tv_instance = build_interpolated(
        PiecewiseAffineLoss({{{1.0}, 0.0}}), GroundCost::squared_euclidean(),
        EntropyFunction::modified_chi2(), mu_hat, 0.2, 1.0, 1.0);
    CHECK_THROWS_AS(build_conic(tv_instance), InputError);
}
