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

#include "otdro/extended.hpp"
#include "otdro/ground_cost.hpp"
#include "otdro/loss.hpp"
#include "otdro/measure.hpp"
#include "otdro/rng.hpp"

using namespace otdro;

TEST_CASE("extended arithmetic follows the stated conventions") {
    CHECK(ext_mul(kInf, 0.0) == 0.0);
    CHECK(ext_mul(0.0, kInf) == 0.0);
    CHECK(ext_mul(kInf, 2.0) == kInf);
    CHECK(ext_mul(-kInf, 2.0) == -kInf);
    CHECK(ext_add(kInf, -kInf) == kInf);
    CHECK(ext_add(-kInf, kInf) == kInf);
    CHECK(ext_add(1.0, 2.0) == 3.0);
    CHECK(ext_div(0.0, 0.0) == 0.0);
    CHECK(ext_div(3.0, 0.0) == kInf);
}

TEST_CASE("measure validation") {
    CHECK_NOTHROW(DiscreteMeasure({{0.0}, {1.0}}, {0.5, 0.5}));
    CHECK_THROWS_AS(DiscreteMeasure({{0.0}}, {0.5}), InputError);       // sum != 1
    CHECK_THROWS_AS(DiscreteMeasure({{0.0}}, {1.0, 0.0}), InputError);  // length mismatch
    CHECK_THROWS_AS(DiscreteMeasure({{0.0}, {1.0}}, {1.5, -0.5}), InputError);
    CHECK_THROWS_AS(DiscreteMeasure({}, {}), InputError);
    // 1e-12 tolerance on the weight sum
    CHECK_NOTHROW(DiscreteMeasure({{0.0}, {1.0}}, {0.5, 0.5 + 4e-13}));
    CHECK_THROWS_AS(DiscreteMeasure({{0.0}, {1.0}}, {0.5, 0.5 + 1e-11}), InputError);
}

TEST_CASE("measure constructors") {
    const DiscreteMeasure u = DiscreteMeasure::uniform({{0.0}, {1.0}, {2.0}});
    CHECK(u.weight(0) == doctest::Approx(1.0 / 3));
    const DiscreteMeasure p = DiscreteMeasure::point_mass({4.0, 5.0});
    CHECK(p.size() == 1);
    const DiscreteMeasure n = DiscreteMeasure::normalized({{0.0}, {1.0}}, {2.0, 6.0});
    CHECK(n.weight(1) == doctest::Approx(0.75));
}

TEST_CASE("evaluate_loss examples") {
    // |v| as max of +-v
    const PiecewiseAffineLoss abs_loss({{{1.0}, 0.0}, {{-1.0}, 0.0}});
    CHECK(evaluate_loss(abs_loss, {0.5}) == doctest::Approx(0.5));

    // hinge saturates at zero once the margin exceeds one
    const double y = 1.0, beta = 2.0, b = 0.0;
    const PiecewiseAffineLoss hinge({{{-y * beta}, 1.0 - y * b}, {{0.0}, 0.0}});
    CHECK(evaluate_loss(hinge, {3.0}) == 0.0); // 1 - 6 < 0

    // enumerate both pieces: max(2*1 + 1, -1 + 3) = 3
    const PiecewiseAffineLoss two({{{2.0}, 1.0}, {{-1.0}, 3.0}});
    CHECK(evaluate_loss(two, {1.0}) == 3.0);

    CHECK_THROWS_AS(evaluate_loss(two, {1.0, 2.0}), InputError);
}

TEST_CASE("expected_value examples") {
    const DiscreteMeasure u = DiscreteMeasure::uniform({{0.0}, {1.0}});
    CHECK(expected_value(u, [](const Point& z) { return z[0]; }) == doctest::Approx(0.5));

    const DiscreteMeasure point = DiscreteMeasure::point_mass({7.0});
    CHECK(expected_value(point, [](const Point& z) { return z[0] * z[0]; }) ==
          doctest::Approx(49.0));

    const DiscreteMeasure weighted({{1.0}, {2.0}}, {0.3, 0.7});
    CHECK(expected_value(weighted, [](const Point& z) { return z[0]; }) ==
          doctest::Approx(1.7)); // 0.3*1 + 0.7*2

    CHECK_THROWS_AS(expected_value(u, [](const Point&) { return kInf; }), InputError);
}

TEST_CASE("loss is convex along segments") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AffinePiece> pieces;
        const std::size_t k = 1 + rng.below(4);
        for (std::size_t p = 0; p < k; ++p)
            pieces.push_back({{rng.normal(), rng.normal()}, rng.normal()});
        const PiecewiseAffineLoss loss(pieces);
        const Point v1{rng.normal() * 3, rng.normal() * 3};
        const Point v2{rng.normal() * 3, rng.normal() * 3};
        const double t = rng.uniform01();
        const Point mid{t * v1[0] + (1 - t) * v2[0], t * v1[1] + (1 - t) * v2[1]};
        CHECK(loss(mid) <= t * loss(v1) + (1 - t) * loss(v2) + 1e-12);
    }
}

TEST_CASE("ground cost kinds") {
    const Point v{1.0, 2.0}, w{4.0, 6.0};

    CHECK(GroundCost::p_norm(2.0)(v, w) == doctest::Approx(5.0));
    CHECK(GroundCost::p_norm(1.0)(v, w) == doctest::Approx(7.0));
    CHECK(GroundCost::p_norm(kInf)(v, w) == doctest::Approx(4.0));
    CHECK(GroundCost::squared_euclidean()(v, w) == doctest::Approx(25.0));

    const GroundCost guard = GroundCost::squared_euclidean_label_guard({1});
    CHECK(guard(v, {4.0, 2.0}) == doctest::Approx(9.0));
    CHECK(guard(v, w) == kInf); // label moved

    SUBCASE("identity of indiscernibles") {
        CHECK(GroundCost::p_norm(2.0)(v, v) == 0.0);
        CHECK(GroundCost::squared_euclidean()(v, v) == 0.0);
        CHECK(guard(v, v) == 0.0);
    }

    SUBCASE("dual exponents") {
        CHECK(GroundCost::p_norm(1.0).dual_exponent() == kInf);
        CHECK(GroundCost::p_norm(2.0).dual_exponent() == doctest::Approx(2.0));
        CHECK(GroundCost::p_norm(kInf).dual_exponent() == doctest::Approx(1.0));
        CHECK(GroundCost::p_norm(3.0).dual_exponent() == doctest::Approx(1.5));
    }

    CHECK_THROWS_AS(GroundCost::p_norm(0.5), InputError);
}

TEST_CASE("rng is deterministic and normal moments look right") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng rng(7);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}
