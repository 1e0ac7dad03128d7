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

// The OpenMP kernels must reproduce their serial reference implementations
// bit for bit, for any schedule: every parallel loop writes disjoint slots
// or reduces with an index-ordered merge.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otdro/dtransform.hpp"
#include "otdro/lifting.hpp"
#include "otdro/oracle.hpp"
#include "otdro/parallel.hpp"
#include "otdro/rng.hpp"

using namespace otdro;

namespace {

DiscreteMeasure random_measure(Rng& rng, std::size_t n, std::size_t d) {
    std::vector<Point> atoms(n, Point(d, 0.0));
    for (Point& a : atoms)
        for (double& x : a) x = rng.normal();
    return DiscreteMeasure::uniform(std::move(atoms));
}

} // namespace

TEST_CASE("envelope batches match the serial reference exactly") {
    Rng rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<AffinePiece> pieces;
        const std::size_t k = 1 + rng.below(4);
        for (std::size_t p = 0; p < k; ++p)
            pieces.push_back({{rng.normal(), rng.normal(), rng.normal()}, rng.normal()});
        const LiftedInstance instance = build_interpolated(
            PiecewiseAffineLoss(pieces), GroundCost::squared_euclidean(),
            EntropyFunction::kullback_leibler(), random_measure(rng, 257, 3), 0.3, 1.0, 1.0);
        const double lam = rng.uniform(0.1, 2.0);
        const auto parallel = d_transform_batch(instance, lam);
        const auto serial = d_transform_batch_serial(instance, lam);
        REQUIRE(parallel.size() == serial.size());
        for (std::size_t i = 0; i < parallel.size(); ++i) {
            CHECK(parallel[i].value == serial[i].value);
            CHECK(parallel[i].maximizer == serial[i].maximizer);
        }
    }
}

TEST_CASE("sinkhorn kernel rows match the serial reference exactly") {
    Rng rng(67);
    const DiscreteMeasure mu_hat = random_measure(rng, 41, 2);
    const DiscreteMeasure reference = random_measure(rng, 53, 2);
    const GroundCost cost = GroundCost::squared_euclidean();
    const SinkhornLiftData parallel =
        make_sinkhorn_lift_data(cost, mu_hat, 1.0, 0.6, reference);
    const SinkhornLiftData serial =
        make_sinkhorn_lift_data_serial(cost, mu_hat, 1.0, 0.6, reference);
    CHECK(parallel.adjusted_radius == serial.adjusted_radius);
    CHECK(parallel.log_normalizers == serial.log_normalizers);
    REQUIRE(parallel.kernel_rows.size() == serial.kernel_rows.size());
    for (std::size_t c = 0; c < parallel.kernel_rows.size(); ++c)
        CHECK(parallel.kernel_rows[c].weights() == serial.kernel_rows[c].weights());
}

TEST_CASE("lattice argmax matches the serial reference exactly") {
    auto bumpy = [](const Point& v) {
        return std::sin(3.0 * v[0]) * std::cos(2.0 * v[1]) -
               0.1 * (v[0] * v[0] + v[1] * v[1]);
    };
    const Point lo{-4.0, -4.0}, hi{4.0, 4.0};
    const auto parallel = grid_argmax(bumpy, lo, hi, 0.01);
    const auto serial = grid_argmax_serial(bumpy, lo, hi, 0.01);
    CHECK(parallel.first == serial.first);
    CHECK(parallel.second == serial.second);

    SUBCASE("ties resolve identically in both paths") {
        auto flat = [](const Point&) { return 1.0; };
        const auto p = grid_argmax(flat, {-1.0}, {1.0}, 0.1);
        const auto s = grid_argmax_serial(flat, {-1.0}, {1.0}, 0.1);
        CHECK(p.first == s.first);
        CHECK(p.first[0] == -1.0);
    }
}
