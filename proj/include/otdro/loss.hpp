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
#include <utility>
#include <vector>

#include "otdro/errors.hpp"
#include "otdro/measure.hpp"

namespace otdro {

/// One affine piece a^T v + b of a pointwise-max loss.
struct AffinePiece {
    Point a;
    double b = 0.0;

    bool operator==(const AffinePiece& other) const { return a == other.a && b == other.b; }
};

/**
 * Piecewise affine loss l(v) = max_k a_k^T v + b_k with K >= 1 pieces —
 * finite everywhere, convex, and exactly the pointwise-max-of-concave family
 * the tractable reformulations require.
 */
class PiecewiseAffineLoss {
public:
    explicit PiecewiseAffineLoss(std::vector<AffinePiece> pieces)
        : pieces_(std::move(pieces)) {
        if (pieces_.empty()) throw InputError("loss: needs at least one piece");
        const std::size_t d = pieces_.front().a.size();
        for (const AffinePiece& p : pieces_)
            if (p.a.size() != d) throw InputError("loss: pieces must share one dimension");
    }

    std::size_t dimension() const { return pieces_.front().a.size(); }
    std::size_t piece_count() const { return pieces_.size(); }
    const std::vector<AffinePiece>& pieces() const { return pieces_; }
    const AffinePiece& piece(std::size_t k) const { return pieces_[k]; }

    /// max_k a_k^T v + b_k; v may be longer than the loss dimension, in which
    /// case only the leading coordinates are consumed (lifted spaces append
    /// conditioning coordinates after the loss block).
    double operator()(const Point& v) const {
        if (v.size() < dimension())
            throw InputError("loss: evaluation point has too few coordinates");
        double best = piece_value(0, v);
        for (std::size_t k = 1; k < pieces_.size(); ++k) {
            const double val = piece_value(k, v);
            if (val > best) best = val;
        }
        return best;
    }

    double piece_value(std::size_t k, const Point& v) const {
        const AffinePiece& p = pieces_[k];
        double val = p.b;
        for (std::size_t j = 0; j < p.a.size(); ++j) val += p.a[j] * v[j];
        return val;
    }

    bool operator==(const PiecewiseAffineLoss& other) const { return pieces_ == other.pieces_; }

private:
    std::vector<AffinePiece> pieces_;
};

/// Evaluates the loss with a strict dimension check (the operator() accepts
/// longer lifted points; this entry point does not).
inline double evaluate_loss(const PiecewiseAffineLoss& loss, const Point& v) {
    if (v.size() != loss.dimension())
        throw InputError("evaluate_loss: dimension mismatch");
    return loss(v);
}

} // namespace otdro
