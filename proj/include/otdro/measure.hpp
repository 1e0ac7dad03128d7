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

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"

namespace otdro {

using Point = std::vector<double>;

inline constexpr double kWeightSumTolerance = 1e-12;

/**
 * Finitely supported probability measure: a list of atoms in R^d with
 * nonnegative weights summing to one (within 1e-12). Immutable after
 * construction and safe to share across threads.
 */
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<Point> atoms, std::vector<double> weights)
        : atoms_(std::move(atoms)), weights_(std::move(weights)) {
        validate();
    }

    static DiscreteMeasure uniform(std::vector<Point> atoms) {
        if (atoms.empty()) throw InputError("uniform measure needs at least one atom");
        std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
        return DiscreteMeasure(std::move(atoms), std::move(w));
    }

    static DiscreteMeasure point_mass(Point atom) {
        return DiscreteMeasure({std::move(atom)}, {1.0});
    }

    /// Builds a measure from raw nonnegative masses by normalizing their sum.
    static DiscreteMeasure normalized(std::vector<Point> atoms, std::vector<double> raw) {
        double total = 0.0;
        for (double r : raw) {
            if (!(r >= 0.0)) throw InputError("normalized: masses must be nonnegative");
            total += r;
        }
        if (!(total > 0.0)) throw InputError("normalized: total mass must be positive");
        for (double& r : raw) r /= total;
        return DiscreteMeasure(std::move(atoms), std::move(raw));
    }

    std::size_t size() const { return atoms_.size(); }
    std::size_t dimension() const { return atoms_.front().size(); }
    const Point& atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<Point>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }

    bool operator==(const DiscreteMeasure& other) const {
        return atoms_ == other.atoms_ && weights_ == other.weights_;
    }

private:
    void validate() const {
        if (atoms_.empty() || atoms_.size() != weights_.size())
            throw InputError("measure: atoms and weights must have equal length >= 1");
        const std::size_t d = atoms_.front().size();
        if (d == 0) throw InputError("measure: atoms must have dimension >= 1");
        for (const Point& a : atoms_)
            if (a.size() != d) throw InputError("measure: atoms must share one dimension");
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw InputError("measure: weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > kWeightSumTolerance)
            throw InputError("measure: weights must sum to 1 within 1e-12");
    }

    std::vector<Point> atoms_;
    std::vector<double> weights_;
};

/**
 * Expectation of an integrand over a discrete measure: sum_i w_i * g(atom_i).
 * Throws if the integrand is not finite on some atom.
 */
inline double expected_value(const DiscreteMeasure& measure,
                             const std::function<double(const Point&)>& integrand) {
    double total = 0.0;
    for (std::size_t i = 0; i < measure.size(); ++i) {
        const double g = integrand(measure.atom(i));
        if (!std::isfinite(g))
            throw InputError("expected_value: integrand is not finite on an atom");
        total += measure.weight(i) * g;
    }
    return total;
}

} // namespace otdro
