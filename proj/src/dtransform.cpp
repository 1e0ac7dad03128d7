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

#include "otdro/dtransform.hpp"

#include <algorithm>
#include <cmath>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"
#include "otdro/oracle.hpp"
#include "otdro/parallel.hpp"

namespace otdro {

namespace {

struct PieceCandidate {
    double value = -kInf;
    Point maximizer;
};

PieceCandidate norm_piece(const AffinePiece& piece, const GroundCost& cost, double lam,
                          const Point& v_hat) {
    // sup_u a.u - lam ||u||_p is 0 when ||a||_q <= lam and +inf otherwise
    // (Hoelder), so the piece contributes its value at vhat or blows up.
    if (cost.dual_norm_unguarded(piece.a) <= lam) {
        double value = piece.b;
        for (std::size_t j = 0; j < piece.a.size(); ++j) value += piece.a[j] * v_hat[j];
        return {value, v_hat};
    }
    return {kInf, {}};
}

PieceCandidate quadratic_piece(const AffinePiece& piece, const GroundCost& cost, double lam,
                               const Point& v_hat, const Box* box) {
    Point v = v_hat;
    double value = piece.b;
    for (std::size_t j = 0; j < piece.a.size(); ++j) {
        if (cost.is_guarded(j)) {
            value += piece.a[j] * v_hat[j];
            continue;
        }
        if (lam > 0.0) {
            double vj = v_hat[j] + piece.a[j] / (2.0 * lam);
            if (box) vj = std::clamp(vj, box->lower[j], box->upper[j]);
            v[j] = vj;
            const double diff = vj - v_hat[j];
            value += piece.a[j] * vj - lam * diff * diff;
        } else if (box) {
            const double vj = piece.a[j] > 0.0   ? box->upper[j]
                              : piece.a[j] < 0.0 ? box->lower[j]
                                                 : v_hat[j];
            v[j] = vj;
            value += piece.a[j] * vj;
        } else if (piece.a[j] != 0.0) {
            return {kInf, {}};
        } else {
            value += 0.0;
        }
    }
    return {value, std::move(v)};
}

DTransformResult combine(std::vector<PieceCandidate> candidates,
                         DTransformResult::Method method) {
    double best = -kInf;
    for (const PieceCandidate& c : candidates) best = std::max(best, c.value);
    DTransformResult result;
    result.value = best;
    result.method = method;
    if (!is_finite(best)) return result;
    const double tie_tol = 1e-9 * std::max(1.0, std::abs(best));
    for (const PieceCandidate& c : candidates) {
        if (c.value < best - tie_tol) continue;
        result.co_maximizers.push_back(c.maximizer);
    }
    std::sort(result.co_maximizers.begin(), result.co_maximizers.end());
    result.co_maximizers.erase(
        std::unique(result.co_maximizers.begin(), result.co_maximizers.end()),
        result.co_maximizers.end());
    result.maximizer = result.co_maximizers.front();
    return result;
}

} // namespace

DTransformResult d_transform_grid(const PiecewiseAffineLoss& loss, const GroundCost& cost,
                                  double lam, const Point& v_hat, const Box& domain,
                                  double resolution) {
    // Guarded coordinates cannot move; pin them so the lattice stays on the
    // finite-cost slice.
    Box box = domain;
    for (std::size_t j = 0; j < box.lower.size(); ++j) {
        if (cost.is_guarded(j)) {
            box.lower[j] = v_hat[j];
            box.upper[j] = v_hat[j];
        }
    }
    auto objective = [&](const Point& v) {
        const double d = cost(v, v_hat);
        if (!is_finite(d)) return -kInf;
        return loss(v) - lam * d;
    };
    auto [point, value] = grid_argmax(objective, box.lower, box.upper, resolution);
    DTransformResult result;
    result.value = value;
    result.maximizer = std::move(point);
    result.method = DTransformResult::Method::Grid;
    // The nominal point itself may be off-lattice; taking v = vhat is always
    // feasible and keeps the envelope >= l(vhat).
    const double at_nominal = loss(v_hat);
    if (at_nominal > result.value) {
        result.value = at_nominal;
        result.maximizer = v_hat;
    }
    result.co_maximizers = {result.maximizer};
    return result;
}

DTransformResult d_transform(const PiecewiseAffineLoss& loss, const GroundCost& cost,
                             double lam, const Point& v_hat,
                             const std::optional<Box>& domain, double grid_resolution) {
    if (!(lam >= 0.0)) throw InputError("d_transform: multiplier must be nonnegative");
    if (v_hat.size() != loss.dimension())
        throw InputError("d_transform: nominal point has wrong dimension");

    if (cost.kind() == GroundCost::Kind::PNorm) {
        if (domain) return d_transform_grid(loss, cost, lam, v_hat, *domain, grid_resolution);
        std::vector<PieceCandidate> candidates;
        candidates.reserve(loss.piece_count());
        for (const AffinePiece& piece : loss.pieces())
            candidates.push_back(norm_piece(piece, cost, lam, v_hat));
        return combine(std::move(candidates), DTransformResult::Method::ClosedFormNorm);
    }

    const Box* box = domain ? &*domain : nullptr;
    std::vector<PieceCandidate> candidates;
    candidates.reserve(loss.piece_count());
    for (const AffinePiece& piece : loss.pieces())
        candidates.push_back(quadratic_piece(piece, cost, lam, v_hat, box));
    return combine(std::move(candidates), DTransformResult::Method::ClosedFormQuadratic);
}

namespace {

template <typename ForLoop>
std::vector<DTransformResult> batch_impl(const LiftedInstance& instance, double lam,
                                         ForLoop&& for_loop) {
    const GroundCost& ground = instance.cost.ground();
    std::optional<Box> box;
    double resolution = 1e-3;
    if (instance.domain_is_box) {
        if (!instance.value_domain.has_box())
            throw InputError("d_transform_batch: box domain requested without box bounds");
        box = Box{instance.value_domain.v_lower, instance.value_domain.v_upper};
        double span = 0.0;
        for (std::size_t j = 0; j < box->lower.size(); ++j)
            span = std::max(span, box->upper[j] - box->lower[j]);
        resolution = std::max(span / 2000.0, 1e-9);
    }
    std::vector<DTransformResult> results(instance.atom_count());
    for_loop(instance.atom_count(), [&](std::size_t i) {
        results[i] = d_transform(instance.loss_for(i), ground, lam, instance.v_part(i), box,
                                 resolution);
    });
    return results;
}

} // namespace

std::vector<DTransformResult> d_transform_batch(const LiftedInstance& instance, double lam) {
    return batch_impl(instance, lam,
                      [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

std::vector<DTransformResult> d_transform_batch_serial(const LiftedInstance& instance,
                                                       double lam) {
    return batch_impl(instance, lam, [](std::size_t n, auto&& body) { serial_for(n, body); });
}

} // namespace otdro
