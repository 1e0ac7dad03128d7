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

#include "otdro/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"
#include "otdro/oracle.hpp"
#include "otdro/parallel.hpp"

namespace otdro {

namespace {

ValueDomain with_default_w_max(ValueDomain vd, std::size_t n) {
    if (vd.w_max <= 0.0) vd.w_max = static_cast<double>(std::max<std::size_t>(n, 1));
    return vd;
}

Point concat(const Point& a, const Point& b) {
    Point out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

} // namespace

LiftedInstance lift_wasserstein(PiecewiseAffineLoss loss, GroundCost ground_cost,
                                const DiscreteMeasure& mu_hat, double radius,
                                ValueDomain value_domain) {
    if (!(radius >= 0.0)) throw InputError("lift_wasserstein: radius must be nonnegative");
    std::vector<Point> atoms;
    atoms.reserve(mu_hat.size());
    for (std::size_t i = 0; i < mu_hat.size(); ++i)
        atoms.push_back(concat(mu_hat.atom(i), {1.0}));
    const std::size_t dim = loss.dimension();
    return LiftedInstance({std::move(loss)}, dim, LiftedCost::wasserstein(std::move(ground_cost)),
                          DiscreteMeasure(std::move(atoms), mu_hat.weights()),
                          SigmaField::Trivial, radius,
                          with_default_w_max(std::move(value_domain), mu_hat.size()));
}

LiftedInstance lift_phi_divergence(PiecewiseAffineLoss loss, EntropyFunction phi,
                                   const DiscreteMeasure& mu_hat, double radius,
                                   double mix_epsilon, std::optional<Point> worst_scenario,
                                   ValueDomain value_domain) {
    if (!(mix_epsilon > 0.0 && mix_epsilon < 1.0))
        throw InputError("lift_phi_divergence: mix_epsilon must lie in (0, 1)");

    Point scenario;
    if (worst_scenario) {
        if (worst_scenario->size() != loss.dimension())
            throw InputError("lift_phi_divergence: worst scenario has wrong dimension");
        scenario = *worst_scenario;
    } else {
        if (!value_domain.has_box())
            throw InputError("lift_phi_divergence: need a worst scenario or a value_domain box");
        double span = 0.0;
        for (std::size_t j = 0; j < value_domain.v_lower.size(); ++j)
            span = std::max(span, value_domain.v_upper[j] - value_domain.v_lower[j]);
        auto [point, value] = grid_argmax([&loss](const Point& v) { return loss(v); },
                                          value_domain.v_lower, value_domain.v_upper,
                                          std::max(span / 1000.0, 1e-9));
        (void)value;
        scenario = std::move(point);
    }

    const double keep = 1.0 - mix_epsilon;
    std::vector<Point> atoms;
    std::vector<double> weights;
    atoms.reserve(mu_hat.size() + 1);
    weights.reserve(mu_hat.size() + 1);
    for (std::size_t i = 0; i < mu_hat.size(); ++i) {
        atoms.push_back(concat(mu_hat.atom(i), {1.0 / keep}));
        weights.push_back(keep * mu_hat.weight(i));
    }
    atoms.push_back(concat(scenario, {0.0}));
    weights.push_back(mix_epsilon);

    const std::size_t dim = loss.dimension();
    LiftedCost cost =
        LiftedCost::phi_identity_guard(std::move(phi), mix_epsilon, mu_hat.atoms(), scenario);
    return LiftedInstance({std::move(loss)}, dim, std::move(cost),
                          DiscreteMeasure::normalized(std::move(atoms), std::move(weights)),
                          SigmaField::Trivial, radius,
                          with_default_w_max(std::move(value_domain), mu_hat.size()));
}

namespace {

template <typename ForLoop>
SinkhornLiftData build_sinkhorn_lift_data(const GroundCost& ground_cost,
                                          const DiscreteMeasure& mu_hat, double radius,
                                          double reg_epsilon, const DiscreteMeasure& reference,
                                          ForLoop&& for_loop) {
    if (!(reg_epsilon > 0.0))
        throw InputError("sinkhorn lift: reg_epsilon must be positive");
    if (reference.dimension() != mu_hat.dimension())
        throw InputError("sinkhorn lift: reference and nominal dimensions differ");

    // Conditioning cells: distinct nominal atoms, first-seen order; the
    // sigma-field cannot distinguish data points with identical values.
    std::map<Point, std::size_t> seen;
    std::vector<Point> cell_atoms;
    std::vector<double> cell_weights;
    for (std::size_t i = 0; i < mu_hat.size(); ++i) {
        auto [it, inserted] = seen.try_emplace(mu_hat.atom(i), cell_atoms.size());
        if (inserted) {
            cell_atoms.push_back(mu_hat.atom(i));
            cell_weights.push_back(0.0);
        }
        cell_weights[it->second] += mu_hat.weight(i);
    }

    const std::size_t cells = cell_atoms.size();
    const std::size_t m = reference.size();
    std::vector<std::vector<double>> row_weights(cells);
    std::vector<double> log_normalizers(cells);
    std::vector<int> degenerate(cells, 0);

    for_loop(cells, [&](std::size_t c) {
        std::vector<double> dist(m);
        double dmin = kInf;
        for (std::size_t j = 0; j < m; ++j) {
            dist[j] = ground_cost(reference.atom(j), cell_atoms[c]);
            if (dist[j] < dmin) dmin = dist[j];
        }
        if (!is_finite(dmin)) {
            degenerate[c] = 1;
            return;
        }
        // Shift by the minimum distance so the tilts stay in (0, 1].
        std::vector<double> w(m, 0.0);
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (is_finite(dist[j]))
                w[j] = reference.weight(j) * std::exp((dmin - dist[j]) / reg_epsilon);
            total += w[j];
        }
        if (!(total > 0.0)) {
            degenerate[c] = 1;
            return;
        }
        for (double& wj : w) wj /= total;
        row_weights[c] = std::move(w);
        log_normalizers[c] = std::log(total) - dmin / reg_epsilon;
    });

    for (std::size_t c = 0; c < cells; ++c)
        if (degenerate[c])
            throw InputError("sinkhorn lift: kernel normalizer vanished for a nominal atom");

    SinkhornLiftData data{reference, reg_epsilon, std::move(cell_atoms),
                          std::move(cell_weights), {}, std::move(log_normalizers), 0.0};
    data.kernel_rows.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c)
        data.kernel_rows.emplace_back(reference.atoms(), std::move(row_weights[c]));

    double shift = 0.0;
    for (std::size_t c = 0; c < cells; ++c)
        shift += data.cell_weights[c] * data.log_normalizers[c];
    data.adjusted_radius = radius + reg_epsilon * shift;
    return data;
}

} // namespace

SinkhornLiftData make_sinkhorn_lift_data(const GroundCost& ground_cost,
                                         const DiscreteMeasure& mu_hat, double radius,
                                         double reg_epsilon,
                                         const DiscreteMeasure& reference) {
    return build_sinkhorn_lift_data(ground_cost, mu_hat, radius, reg_epsilon, reference,
                                    [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

SinkhornLiftData make_sinkhorn_lift_data_serial(const GroundCost& ground_cost,
                                                const DiscreteMeasure& mu_hat, double radius,
                                                double reg_epsilon,
                                                const DiscreteMeasure& reference) {
    return build_sinkhorn_lift_data(ground_cost, mu_hat, radius, reg_epsilon, reference,
                                    [](std::size_t n, auto&& body) { serial_for(n, body); });
}

std::pair<LiftedInstance, SinkhornLiftData> lift_sinkhorn(
    PiecewiseAffineLoss loss, GroundCost ground_cost, const DiscreteMeasure& mu_hat,
    double radius, double reg_epsilon, const DiscreteMeasure& reference,
    ValueDomain value_domain) {
    SinkhornLiftData data =
        make_sinkhorn_lift_data(ground_cost, mu_hat, radius, reg_epsilon, reference);
    if (data.adjusted_radius < 0.0)
        throw InfeasibleError("sinkhorn lift: adjusted radius " +
                              std::to_string(data.adjusted_radius) +
                              " is negative; the ambiguity set is empty");

    std::vector<Point> atoms;
    std::vector<double> weights;
    const std::size_t m = reference.size();
    atoms.reserve(data.cell_atoms.size() * m);
    weights.reserve(data.cell_atoms.size() * m);
    for (std::size_t c = 0; c < data.cell_atoms.size(); ++c) {
        for (std::size_t j = 0; j < m; ++j) {
            Point v = concat(reference.atom(j), data.cell_atoms[c]);
            v.push_back(1.0);
            atoms.push_back(std::move(v));
            weights.push_back(data.cell_weights[c] * data.kernel_rows[c].weight(j));
        }
    }

    const std::size_t dim = loss.dimension();
    LiftedInstance instance({std::move(loss)}, dim, LiftedCost::sinkhorn_increment(reg_epsilon),
                            DiscreteMeasure::normalized(std::move(atoms), std::move(weights)),
                            SigmaField::ConditionOnNominalAtom, data.adjusted_radius,
                            with_default_w_max(std::move(value_domain), mu_hat.size()));
    instance.condition_offset = dim;
    return {std::move(instance), std::move(data)};
}

LiftedInstance build_interpolated_per_atom(std::vector<PiecewiseAffineLoss> losses,
                                           GroundCost ground_cost, EntropyFunction phi,
                                           const DiscreteMeasure& mu_hat, double radius,
                                           double theta1, double theta2,
                                           ValueDomain value_domain) {
    if (!(theta1 > 0.0) || !(theta2 > 0.0))
        throw InputError("build_interpolated: theta1 and theta2 must be positive");
    std::vector<Point> atoms;
    atoms.reserve(mu_hat.size());
    for (std::size_t i = 0; i < mu_hat.size(); ++i)
        atoms.push_back(concat(mu_hat.atom(i), {1.0}));
    const std::size_t dim = losses.front().dimension();
    return LiftedInstance(
        std::move(losses), dim,
        LiftedCost::interpolated(std::move(ground_cost), std::move(phi), theta1, theta2),
        DiscreteMeasure(std::move(atoms), mu_hat.weights()), SigmaField::Trivial, radius,
        with_default_w_max(std::move(value_domain), mu_hat.size()));
}

LiftedInstance build_interpolated(PiecewiseAffineLoss loss, GroundCost ground_cost,
                                  EntropyFunction phi, const DiscreteMeasure& mu_hat,
                                  double radius, double theta1, double theta2,
                                  ValueDomain value_domain) {
    std::vector<PiecewiseAffineLoss> losses;
    losses.push_back(std::move(loss));
    return build_interpolated_per_atom(std::move(losses), std::move(ground_cost),
                                       std::move(phi), mu_hat, radius, theta1, theta2,
                                       std::move(value_domain));
}

} // namespace otdro
