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

#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "otdro/instance.hpp"
#include "otdro/measure.hpp"

// Independent brute-force primal solvers used to certify every dual result
// at desk scale: a dense two-phase simplex over discretized couplings, a
// KL-DRO bisection solver, an entropic mirror-ascent solver, and lattice
// maximizers. None of them share code with the dual reformulation path.

namespace otdro {

// ---------------------------------------------------------------------------
// Lattice maximization

/// Lattice maximizer over an axis-aligned box with two refinement passes
/// (factor 10 each) around the incumbent. Ties break to the first lattice
/// point in scan order; the parallel scan reproduces the serial result.
std::pair<Point, double> grid_argmax(const std::function<double(const Point&)>& fn,
                                     const Point& lower, const Point& upper,
                                     double resolution);

/// Serial reference for the lattice scan.
std::pair<Point, double> grid_argmax_serial(const std::function<double(const Point&)>& fn,
                                            const Point& lower, const Point& upper,
                                            double resolution);

// ---------------------------------------------------------------------------
// Dense simplex

/// Outcome of a linear program solve.
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

/**
 * Dense two-phase primal simplex with Bland's anti-cycling rule.
 *
 * maximize    c^T x
 * subject to  A_eq x  = b_eq
 *             A_ub x <= b_ub
 *             x >= 0
 *
 * Desk-scale only: problems beyond 5000 variables are rejected.
 */
LpResult simplex_solve(const std::vector<double>& c,
                       const std::vector<std::vector<double>>& a_eq,
                       const std::vector<double>& b_eq,
                       const std::vector<std::vector<double>>& a_ub,
                       const std::vector<double>& b_ub);

// ---------------------------------------------------------------------------
// Coupling grid LP

/**
 * Finite discretization of the coupling space: candidate perturbed points
 * v_j and weight levels w_l paired against every nominal atom. The weight
 * grid always contains 0 and 1 and spans [0, w_max] with w_max >= n so
 * degenerate reweightings stay representable; solver-reported weights can be
 * appended to make strong-duality comparisons exact.
 */
struct CouplingGrid {
    std::vector<Point> v_points;
    std::vector<double> w_points;
};

/// Builds the default grid for an instance: a lattice over the value_domain
/// box at step v_step (when a box exists) plus the nominal v-parts, and the
/// default w grid {0, 0.25, ..., w_max} + {1} + extras.
CouplingGrid make_coupling_grid(const LiftedInstance& instance, double v_step,
                                double w_step = 0.25, double w_max = -1.0,
                                const std::vector<Point>& extra_v = {},
                                const std::vector<double>& extra_w = {});

struct LpPrimalResult {
    double value = 0.0;
    /// Transport mass per (atom, v index, w index) triple with finite cost.
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, double>> coupling;
};

/**
 * Grid restriction of the coupling problem, solved by the dense simplex:
 *
 * maximize    sum pi_ijl f(v_j, w_l)
 * subject to  sum_{jl} pi_ijl = nu_hat_i            for every nominal atom
 *             moment rows per the sigma-field (trivial: E[W] = 1;
 *             conditional: E[W - 1] = 0 per conditioning cell)
 *             sum pi_ijl c_ijl <= r
 *             pi >= 0,
 *
 * with infinite-cost pairs excluded from the variable set. A restriction of
 * the true primal, so its value never exceeds the dual objective.
 */
LpPrimalResult lp_primal(const LiftedInstance& instance, const CouplingGrid& grid);

/// Values from `levels` successively halved v-steps (nested lattices, so the
/// trace is nondecreasing).
std::vector<double> lp_primal_trace(const LiftedInstance& instance, double v_step,
                                    int levels, double w_step = 0.25, double w_max = -1.0,
                                    const std::vector<Point>& extra_v = {},
                                    const std::vector<double>& extra_w = {});

// ---------------------------------------------------------------------------
// KL-DRO bisection

struct KlDroResult {
    double value = 0.0;
    double lambda = 0.0;
    std::vector<double> worst_weights;
    bool saturated = false;
};

/**
 * Standalone KL-DRO dual  min_{lam>0} lam r + lam log sum_i q_i exp(l_i/lam),
 * solved by bisection on the analytic derivative. When the radius covers the
 * cost of concentrating on the argmax (r >= log 1/mass(argmax)) the solver
 * returns max l with a saturation flag. Worst-case weights are
 * p_i ~ q_i exp(l_i / lam*).
 */
KlDroResult kl_dro_bisection(const std::vector<double>& losses,
                             const std::vector<double>& weights, double radius);

// ---------------------------------------------------------------------------
// Entropic mirror ascent

struct MirrorAscentResult {
    double value = 0.0;
    std::vector<double> q;
};

/**
 * maximize sum_j q_j l_j over distributions q with KL(q || kappa) <= budget,
 * by exponentiated-gradient ascent on the Lagrangian with bisection on the
 * multiplier. Deliberately does not reuse the log-partition closed form so
 * it stays an independent check of the dual path.
 */
MirrorAscentResult mirror_ascent_kl_ball(const DiscreteMeasure& kernel_row,
                                         const std::vector<double>& losses, double budget);

/**
 * Cell-coupled variant for the Sinkhorn primal: a shared multiplier across
 * cells enforces eps * sum_c W_c KL(q_c || kappa_c) <= r_bar while each cell
 * maximizes its own expected loss.
 */
double mirror_ascent_sinkhorn_primal(const SinkhornLiftData& data,
                                     const std::vector<std::vector<double>>& cell_losses);

} // namespace otdro
