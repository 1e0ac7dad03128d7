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
#include "otdro/lifting.hpp"
#include "otdro/oracle.hpp"
#include "otdro/rng.hpp"
#include "otdro/solvers.hpp"
#include "support/revised_simplex.hpp"

using namespace otdro;

namespace {
const PiecewiseAffineLoss kIdentity({{{1.0}, 0.0}});
}

TEST_CASE("grid_argmax basics") {
    // concave quadratic peak at an interior point
    auto [peak, peak_value] = grid_argmax(
        [](const Point& v) { return -(v[0] - 0.37) * (v[0] - 0.37); }, {-2.0}, {2.0}, 0.01);
    CHECK(peak[0] == doctest::Approx(0.37).epsilon(1e-4));

    // constant function: first lattice point wins by the deterministic tie-break
    auto [first, constant_value] =
        grid_argmax([](const Point&) { return 3.0; }, {-1.0}, {1.0}, 0.5);
    CHECK(first[0] == -1.0);
    CHECK(constant_value == 3.0);

    // max(v, -v) - (v - 0.5)^2 on [-5, 5]
    auto [arg, value] = grid_argmax(
        [](const Point& v) {
            return std::max(v[0], -v[0]) - (v[0] - 0.5) * (v[0] - 0.5);
        },
        {-5.0}, {5.0}, 0.001);
    CHECK(arg[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(value == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("simplex on hand-sized programs") {
    SUBCASE("bounded maximum") {
        // max x + y  s.t. x + 2y <= 4, 3x + y <= 6
        const LpResult r = simplex_solve({1.0, 1.0}, {}, {}, {{1.0, 2.0}, {3.0, 1.0}},
                                         {4.0, 6.0});
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK(r.objective == doctest::Approx(2.8)); // x = 1.6, y = 1.2
    }
    SUBCASE("equality rows") {
        // max 2x + y  s.t. x + y = 1
        const LpResult r = simplex_solve({2.0, 1.0}, {{1.0, 1.0}}, {1.0}, {}, {});
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK(r.objective == doctest::Approx(2.0));
    }
    SUBCASE("infeasible") {
        const LpResult r =
            simplex_solve({1.0}, {{1.0}}, {2.0}, {{1.0}}, {1.0}); // x = 2 and x <= 1
        CHECK(r.status == LpStatus::Infeasible);
    }
    SUBCASE("unbounded") {
        const LpResult r = simplex_solve({1.0, 0.0}, {}, {}, {{-1.0, 1.0}}, {1.0});
        CHECK(r.status == LpStatus::Unbounded);
    }
    SUBCASE("variable cap") {
        CHECK_THROWS_AS(simplex_solve(std::vector<double>(5001, 1.0), {}, {}, {}, {}),
                        InputError);
    }
}

TEST_CASE("two-phase Bland simplex matches an independent revised simplex") {
    Rng rng(53);
    int solved = 0;
    while (solved < 50) {
        const std::size_t n = 2 + rng.below(4);
        const std::size_t m_ub = 1 + rng.below(3);
        const std::size_t m_eq = rng.below(2);
        std::vector<double> c(n);
        for (double& x : c) x = rng.normal();
        std::vector<std::vector<double>> a_ub(m_ub, std::vector<double>(n));
        std::vector<double> b_ub(m_ub);
        for (std::size_t i = 0; i < m_ub; ++i) {
            for (double& x : a_ub[i]) x = rng.normal();
            b_ub[i] = rng.uniform(0.5, 3.0);
        }
        // bounding box keeps every instance bounded
        std::vector<std::vector<double>> box(n, std::vector<double>(n, 0.0));
        for (std::size_t j = 0; j < n; ++j) box[j][j] = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            a_ub.push_back(box[j]);
            b_ub.push_back(5.0);
        }
        std::vector<std::vector<double>> a_eq(m_eq, std::vector<double>(n));
        std::vector<double> b_eq(m_eq);
        for (std::size_t i = 0; i < m_eq; ++i) {
            for (double& x : a_eq[i]) x = rng.uniform(0.2, 1.0);
            b_eq[i] = rng.uniform(0.5, 2.0);
        }
        const LpResult mine = simplex_solve(c, a_eq, b_eq, a_ub, b_ub);
        const test_support::RevisedLpResult reference =
            test_support::revised_simplex_max(c, a_eq, b_eq, a_ub, b_ub);
        if (mine.status != LpStatus::Optimal) {
            CHECK(!reference.optimal);
            continue;
        }
        REQUIRE(reference.optimal);
        CHECK(std::abs(mine.objective - reference.objective) < 1e-8);
        ++solved;
    }
}

TEST_CASE("lp_primal at zero radius reproduces the nominal risk") {
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform({{0.0}, {1.0}});
    LiftedInstance instance =
        build_interpolated(kIdentity, GroundCost::squared_euclidean(),
                           EntropyFunction::kullback_leibler(), mu_hat, 0.0, 1.0, 1.0);
    instance.value_domain.v_lower = {-2.0};
    instance.value_domain.v_upper = {2.0};
    const CouplingGrid grid = make_coupling_grid(instance, 0.5);
    const LpPrimalResult result = lp_primal(instance, grid);
    CHECK(result.value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("lp_primal solves the two-atom transport example") {
    // identity loss on R, d = |.|, r = 0.5: the budget buys value at unit
    // rate, so the optimum is E[l] + 0.5; the dual sits at lam = 1
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform({{0.0}, {1.0}});
    LiftedInstance instance = lift_wasserstein(kIdentity, GroundCost::p_norm(1.0), mu_hat, 0.5);
    instance.value_domain.v_lower = {-5.0};
    instance.value_domain.v_upper = {5.0};
    const CouplingGrid grid = make_coupling_grid(instance, 0.25);
    const LpPrimalResult primal = lp_primal(instance, grid);
    CHECK(primal.value == doctest::Approx(1.0).epsilon(1e-9));

    const WorstCaseCoupling dual = solve_wasserstein(instance);
    CHECK(dual.certificate.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(primal.value <= dual.certificate.objective + 1e-6);

    SUBCASE("halving the step never decreases the value") {
        const std::vector<double> trace = lp_primal_trace(instance, 0.5, 3);
        for (std::size_t level = 1; level < trace.size(); ++level)
            CHECK(trace[level] >= trace[level - 1] - 1e-12);
        CHECK(trace.back() <= dual.certificate.objective + 1e-6);
    }
}

TEST_CASE("lp_primal reports infeasible grids") {
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform({{0.0}, {1.0}});
    LiftedInstance instance = lift_wasserstein(kIdentity, GroundCost::p_norm(1.0), mu_hat, 0.5);
    // a grid with no w = 1 level has only infinite-cost pairs
    CouplingGrid grid;
    grid.v_points = {{0.0}, {1.0}};
    grid.w_points = {0.0, 2.0};
    CHECK_THROWS_AS(lp_primal(instance, grid), InfeasibleError);
}

TEST_CASE("kl_dro_bisection") {
    SUBCASE("constant losses return the constant") {
        const KlDroResult r = kl_dro_bisection({2.0, 2.0, 2.0}, {0.3, 0.3, 0.4}, 0.7);
        CHECK(r.value == doctest::Approx(2.0));
        CHECK(r.saturated);
    }
    SUBCASE("huge radius migrates all mass to the argmax") {
        const KlDroResult r = kl_dro_bisection({0.0, 1.0}, {0.5, 0.5}, 100.0);
        CHECK(r.value == doctest::Approx(1.0));
        CHECK(r.saturated);
        CHECK(r.worst_weights[1] == doctest::Approx(1.0));
    }
    SUBCASE("two-point problem agrees with a direct primal scan") {
        // max over p = (1-q, q) of q with KL((1-q, q) || (1/2, 1/2)) <= 0.1
        const double radius = 0.1;
        double best = -kInf;
        for (int k = 0; k <= 2000000; ++k) {
            const double q = static_cast<double>(k) / 2000000.0;
            double kl = 0.0;
            if (q > 0.0) kl += q * std::log(2.0 * q);
            if (q < 1.0) kl += (1.0 - q) * std::log(2.0 * (1.0 - q));
            if (kl <= radius) best = std::max(best, q);
        }
        const KlDroResult r = kl_dro_bisection({0.0, 1.0}, {0.5, 0.5}, radius);
        CHECK(std::abs(r.value - best) < 1e-6);
        CHECK(!r.saturated);
        // worst-case weights are feasible and attain the value
        CHECK(r.worst_weights[0] + r.worst_weights[1] == doctest::Approx(1.0));
        CHECK(r.worst_weights[1] == doctest::Approx(r.value).epsilon(1e-6));
    }
    CHECK_THROWS_AS(kl_dro_bisection({0.0, 1.0}, {0.5, 0.5}, 0.0), InputError);
}

TEST_CASE("mirror ascent on the KL ball") {
    const DiscreteMeasure kappa({{0.0}, {1.0}}, {0.5, 0.5});

    SUBCASE("zero budget returns the kernel mean") {
        const MirrorAscentResult r = mirror_ascent_kl_ball(kappa, {0.0, 1.0}, 0.0);
        CHECK(r.value == doctest::Approx(0.5));
    }
    SUBCASE("large budget reaches the maximum") {
        const MirrorAscentResult r = mirror_ascent_kl_ball(kappa, {0.0, 1.0}, 10.0);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("agrees with the bisection dual") {
        const MirrorAscentResult ascent = mirror_ascent_kl_ball(kappa, {0.0, 1.0}, 0.1);
        const KlDroResult bisected = kl_dro_bisection({0.0, 1.0}, {0.5, 0.5}, 0.1);
        CHECK(std::abs(ascent.value - bisected.value) < 1e-6);
    }
    SUBCASE("agreement on random instances") {
        Rng rng(59);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t k = 2 + rng.below(4);
            std::vector<Point> atoms;
            std::vector<double> mass, losses;
            for (std::size_t j = 0; j < k; ++j) {
                atoms.push_back({static_cast<double>(j)});
                mass.push_back(rng.uniform(0.1, 1.0));
                losses.push_back(rng.uniform(0.0, 3.0));
            }
            const DiscreteMeasure row = DiscreteMeasure::normalized(atoms, mass);
            const double budget = rng.uniform(0.01, 0.5);
            const MirrorAscentResult ascent = mirror_ascent_kl_ball(row, losses, budget);
            const KlDroResult bisected = kl_dro_bisection(losses, row.weights(), budget);
            CHECK(std::abs(ascent.value - bisected.value) < 1e-6);
        }
    }
}
