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
#include <vector>

#include "otdro/ground_cost.hpp"
#include "otdro/instance.hpp"
#include "otdro/loss.hpp"
#include "otdro/measure.hpp"

namespace otdro {

/// Axis-aligned restriction of the transport domain used by the box-domain
/// closed forms and the grid fallback.
struct Box {
    Point lower;
    Point upper;
};

/**
 * Result of the transport-regularized envelope
 *
 *   l_lam(vhat) = sup_v  l(v) - lam d(v, vhat).
 *
 * Always >= l(vhat). For the p-norm cost over full space the sup is l(vhat)
 * when every piece satisfies ||a_k||_q <= lam and +inf otherwise; for the
 * quadratic costs each piece gains ||a_k||^2 / (4 lam) at v = vhat + a_k/(2 lam)
 * (guarded coordinates stay put, box domains clamp coordinatewise). The grid
 * method covers the remaining combination (p-norm over a box).
 */
struct DTransformResult {
    enum class Method { ClosedFormNorm, ClosedFormQuadratic, Grid };

    double value = 0.0; // extended real
    Point maximizer;    // lexicographically smallest maximizer when finite
    /// All closed-form piece maximizers whose value ties with the best
    /// (within 1e-9 relative), sorted; the argmax is non-unique exactly at
    /// the kinks of the dual objective, where worst-case couplings split
    /// mass across the tied branches.
    std::vector<Point> co_maximizers;
    Method method = Method::ClosedFormQuadratic;
};

/// Envelope at one nominal point. `domain` restricts the sup to a box; the
/// quadratic kinds keep a closed form there, the p-norm kind falls back to a
/// lattice search at `grid_resolution`. Ties among equal-value piece
/// candidates break to the lexicographically smallest maximizer.
DTransformResult d_transform(const PiecewiseAffineLoss& loss, const GroundCost& cost,
                             double lam, const Point& v_hat,
                             const std::optional<Box>& domain = std::nullopt,
                             double grid_resolution = 1e-3);

/// Grid evaluation of the envelope over an explicit box (the independent
/// check for the closed forms).
DTransformResult d_transform_grid(const PiecewiseAffineLoss& loss, const GroundCost& cost,
                                  double lam, const Point& v_hat, const Box& domain,
                                  double resolution);

/// Envelope values for every nominal atom of an instance at lam; the hot
/// inner kernel of every dual objective evaluation, parallel over atoms.
std::vector<DTransformResult> d_transform_batch(const LiftedInstance& instance, double lam);

/// Serial reference for the batch kernel; identical output guaranteed.
std::vector<DTransformResult> d_transform_batch_serial(const LiftedInstance& instance,
                                                       double lam);

} // namespace otdro
