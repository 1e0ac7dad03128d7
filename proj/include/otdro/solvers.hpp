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

#include "otdro/dtransform.hpp"
#include "otdro/instance.hpp"

namespace otdro {

/// Shared controls for the one-dimensional multiplier searches: golden
/// section over log lambda with guard bounds at both ends, plus a 16-point
/// log-spaced cross-check against silent non-unimodality.
struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 200;
    double lambda_min = 1e-10;
    double lambda_max = 1e10;
    double bracket_tol = 1e-10;
};

/**
 * Interpolated-cost dual with phi = KL, the one-dimensional program
 *
 *   min_{lam >= 0}  lam r + lam theta2 log E_muhat[ exp( l_{lam theta1}(Vhat)
 *                                                        / (lam theta2) ) ].
 *
 * r = 0 returns the empirical risk with the identity coupling. A bracket
 * collapse at lambda_min reports lambda* = 0 with the explicit lambda -> 0
 * limit (the sup of the loss over reachable points); an objective that is
 * +inf for every multiplier raises UnboundedError. Worst-case rows move
 * (vhat_i, 1) to the envelope maximizer v_i* with multiplier
 * w_i* = exp((l_{lam* theta1}(vhat_i) - alpha*) / (lam* theta2)), whose
 * nominal mean is one by the first-order condition for alpha*.
 */
WorstCaseCoupling solve_kl_interpolated(const LiftedInstance& instance,
                                        const SolveOptions& options = {});

/**
 * Interpolated-cost dual for a general entropy with strictly increasing
 * conjugate (per catalog metadata: kullback-leibler, modified-chi2,
 * chi-order-n),
 *
 *   min_{lam >= 0, alpha}  lam r + alpha
 *       + lam theta2 E_muhat[ phi*( (l_{lam theta1}(Vhat) - alpha)
 *                                   / (lam theta2) ) ],
 *
 * solved by nesting an exact one-dimensional alpha minimization (derivative
 * bisection on an expanding bracket) inside the golden-section search over
 * log lambda. Worst-case multipliers come from the conjugate derivative.
 */
WorstCaseCoupling solve_general_phi(const LiftedInstance& instance,
                                    const SolveOptions& options = {});

/// Direct Wasserstein dual  min_{lam >= 0} lam r + E_muhat[ l_lam(Vhat) ]
/// on a Wasserstein-lifted instance; weight multipliers stay at one.
WorstCaseCoupling solve_wasserstein(const LiftedInstance& instance,
                                    const SolveOptions& options = {});

/**
 * Sinkhorn dual: with kernel rows kappa_c and cell weights W_c,
 *
 *   min_{lam >= 0}  lam r_bar
 *       + lam eps sum_c W_c log sum_j kappa_cj exp( l(z_j) / (lam eps) ),
 *
 * the conditional specialization of the general dual with one moment
 * multiplier per conditioning cell. Worst-case conditional weights are
 * w_cj ~ kappa_cj exp(l(z_j)/(lam* eps)), normalized per cell. Raises
 * InfeasibleError when r_bar < 0.
 */
WorstCaseCoupling solve_sinkhorn(const SinkhornLiftData& lift_data,
                                 const PiecewiseAffineLoss& loss,
                                 const SolveOptions& options = {});

/// Rebuilds the worst-case coupling from a certificate and the instance it
/// was produced on (dispatches on the lifted-cost kind).
WorstCaseCoupling extract_worst_case(const DualCertificate& certificate,
                                     const LiftedInstance& instance);

/// Dispatches to the solver matching the instance's cost kind ("kl",
/// "general-phi", "wasserstein"); the CLI entry point for `solve`.
WorstCaseCoupling solve_instance(const LiftedInstance& instance, const std::string& method,
                                 const SolveOptions& options = {});

} // namespace otdro
