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

#include <optional>
#include <utility>
#include <vector>

#include "otdro/instance.hpp"

namespace otdro {

/**
 * Lift constructors: each maps a classic DRO tuple (Z, l, mu_hat, D, r) to
 * the unified instance (f, V, W, G, nu_hat, c, r). The lifted space carries
 * the likelihood-ratio coordinate W; nominal risk is preserved,
 * E_nuhat[f] = E_muhat[l], for every family except Sinkhorn, whose nominal
 * risk is the kernel-smoothed E_gammahat[l] by construction.
 */

/// Wasserstein: nu_hat = mu_hat x delta_1, trivial sigma-field, cost
/// d(v, vhat) + inf * 1{w != what}.
LiftedInstance lift_wasserstein(PiecewiseAffineLoss loss, GroundCost ground_cost,
                                const DiscreteMeasure& mu_hat, double radius,
                                ValueDomain value_domain = {});

/**
 * Generalized phi-divergence: the nominal mixes the data atoms at weight
 * level 1/(1-eps) with a zero-weight copy of a worst-case scenario
 * z_{n+1} in argmax l,
 *
 *   nu_hat = (1-eps)/n sum_i delta_{(z_i, 1/(1-eps))} + eps delta_{(z_{n+1}, 0)},
 *
 * under the identity-guard cost. The scenario is caller-supplied or located
 * by a lattice search over value_domain (two refinement passes); the chosen
 * maximizer is recorded in the returned cost.
 */
LiftedInstance lift_phi_divergence(PiecewiseAffineLoss loss, EntropyFunction phi,
                                   const DiscreteMeasure& mu_hat, double radius,
                                   double mix_epsilon = 1e-3,
                                   std::optional<Point> worst_scenario = std::nullopt,
                                   ValueDomain value_domain = {});

/**
 * Sinkhorn: V = Z x Z with atoms (z_j, zhat_i) weighted by the kernel rows
 * times mu_hat, conditional sigma-field on the second block, and the
 * eps-scaled KL-increment cost. Throws InfeasibleError when the adjusted
 * radius r_bar is negative (the ambiguity set is empty).
 */
std::pair<LiftedInstance, SinkhornLiftData> lift_sinkhorn(
    PiecewiseAffineLoss loss, GroundCost ground_cost, const DiscreteMeasure& mu_hat,
    double radius, double reg_epsilon, const DiscreteMeasure& reference,
    ValueDomain value_domain = {});

/// Interpolated family: nu_hat = mu_hat x delta_1, trivial sigma-field, cost
/// theta1 w d(v, vhat) + theta2 (phi(w) - phi(what))+.
LiftedInstance build_interpolated(PiecewiseAffineLoss loss, GroundCost ground_cost,
                                  EntropyFunction phi, const DiscreteMeasure& mu_hat,
                                  double radius, double theta1, double theta2,
                                  ValueDomain value_domain = {});

/// Same with one loss per nominal atom (labels baked into per-sample pieces).
LiftedInstance build_interpolated_per_atom(std::vector<PiecewiseAffineLoss> losses,
                                           GroundCost ground_cost, EntropyFunction phi,
                                           const DiscreteMeasure& mu_hat, double radius,
                                           double theta1, double theta2,
                                           ValueDomain value_domain = {});

/// Kernel-row and adjusted-radius computation behind the Sinkhorn lift,
/// exposed for tests; does not enforce feasibility.
SinkhornLiftData make_sinkhorn_lift_data(const GroundCost& ground_cost,
                                         const DiscreteMeasure& mu_hat, double radius,
                                         double reg_epsilon, const DiscreteMeasure& reference);

/// Serial reference for the kernel-row kernel (the parallel path is the
/// default inside make_sinkhorn_lift_data).
SinkhornLiftData make_sinkhorn_lift_data_serial(const GroundCost& ground_cost,
                                                const DiscreteMeasure& mu_hat, double radius,
                                                double reg_epsilon,
                                                const DiscreteMeasure& reference);

} // namespace otdro
