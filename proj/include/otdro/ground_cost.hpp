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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"
#include "otdro/measure.hpp"

namespace otdro {

/**
 * Ground distance d(v, v_hat) on the outcome space.
 *
 * Three kinds:
 *   - p-norm            d = ||v - v_hat||_p, p in [1, inf]
 *   - squared euclidean d = ||v - v_hat||^2
 *   - squared euclidean with guards: squared euclidean on the unguarded
 *     coordinates plus an infinite charge when any guarded coordinate
 *     (a label or an absorbed bias) differs. Guarded coordinates are
 *     compared exactly; an infinite cost is a distinguished value, never
 *     a large float.
 */
class GroundCost {
public:
    enum class Kind { PNorm, SquaredEuclidean, SquaredEuclideanLabelGuard };

    static GroundCost p_norm(double p) {
        if (!(p >= 1.0)) throw InputError("ground cost: p-norm exponent must be >= 1");
        GroundCost c;
        c.kind_ = Kind::PNorm;
        c.p_ = p;
        return c;
    }

    static GroundCost squared_euclidean() {
        GroundCost c;
        c.kind_ = Kind::SquaredEuclidean;
        return c;
    }

    static GroundCost squared_euclidean_label_guard(std::vector<std::size_t> guarded) {
        GroundCost c;
        c.kind_ = Kind::SquaredEuclideanLabelGuard;
        c.guarded_ = std::move(guarded);
        std::sort(c.guarded_.begin(), c.guarded_.end());
        return c;
    }

    Kind kind() const { return kind_; }
    double p() const { return p_; }
    const std::vector<std::size_t>& guarded() const { return guarded_; }

    bool is_guarded(std::size_t j) const {
        return std::binary_search(guarded_.begin(), guarded_.end(), j);
    }

    bool is_quadratic() const { return kind_ != Kind::PNorm; }

    /// Hoelder-conjugate exponent q with 1/p + 1/q = 1.
    double dual_exponent() const {
        if (p_ == 1.0) return kInf;
        if (std::isinf(p_)) return 1.0;
        return p_ / (p_ - 1.0);
    }

    /// d(v, v_hat) as an extended real (guard violations return +inf).
    double operator()(const Point& v, const Point& v_hat) const {
        if (v.size() != v_hat.size())
            throw InputError("ground cost: dimension mismatch");
        switch (kind_) {
        case Kind::PNorm: {
            if (std::isinf(p_)) {
                double m = 0.0;
                for (std::size_t j = 0; j < v.size(); ++j)
                    m = std::max(m, std::abs(v[j] - v_hat[j]));
                return m;
            }
            if (p_ == 1.0) {
                double s = 0.0;
                for (std::size_t j = 0; j < v.size(); ++j) s += std::abs(v[j] - v_hat[j]);
                return s;
            }
            double s = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j)
                s += std::pow(std::abs(v[j] - v_hat[j]), p_);
            return std::pow(s, 1.0 / p_);
        }
        case Kind::SquaredEuclidean: {
            double s = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                const double diff = v[j] - v_hat[j];
                s += diff * diff;
            }
            return s;
        }
        case Kind::SquaredEuclideanLabelGuard: {
            double s = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (is_guarded(j)) {
                    if (v[j] != v_hat[j]) return kInf;
                } else {
                    const double diff = v[j] - v_hat[j];
                    s += diff * diff;
                }
            }
            return s;
        }
        }
        return kInf;
    }

    /// ||x||_q over the unguarded coordinates (q = dual exponent for the
    /// p-norm kind; plain euclidean norm for the quadratic kinds).
    double dual_norm_unguarded(const Point& x) const {
        if (kind_ == Kind::PNorm) {
            const double q = dual_exponent();
            if (std::isinf(q)) {
                double m = 0.0;
                for (double xi : x) m = std::max(m, std::abs(xi));
                return m;
            }
            if (q == 1.0) {
                double s = 0.0;
                for (double xi : x) s += std::abs(xi);
                return s;
            }
            double s = 0.0;
            for (double xi : x) s += std::pow(std::abs(xi), q);
            return std::pow(s, 1.0 / q);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!is_guarded(j)) s += x[j] * x[j];
        return std::sqrt(s);
    }

    std::string kind_name() const {
        switch (kind_) {
        case Kind::PNorm: return "p-norm";
        case Kind::SquaredEuclidean: return "squared-euclidean";
        case Kind::SquaredEuclideanLabelGuard: return "squared-euclidean-with-label-guard";
        }
        return "";
    }

    bool operator==(const GroundCost& other) const {
        return kind_ == other.kind_ && p_ == other.p_ && guarded_ == other.guarded_;
    }

private:
    Kind kind_ = Kind::SquaredEuclidean;
    double p_ = 2.0;
    std::vector<std::size_t> guarded_;
};

} // namespace otdro
