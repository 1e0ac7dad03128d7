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
#include <optional>
#include <string>
#include <vector>

#include "otdro/divergence.hpp"
#include "otdro/ground_cost.hpp"
#include "otdro/loss.hpp"
#include "otdro/measure.hpp"

namespace otdro {

/// Conditioning structure of the moment constraint E[W | G] = 1: either one
/// scalar constraint (trivial sigma-field) or one constraint per nominal
/// conditioning cell.
enum class SigmaField { Trivial, ConditionOnNominalAtom };

/// Axis-aligned box bounds for the outcome grid plus the weight-grid cap.
/// Used by the oracles and grid fallbacks; solvers treat V as full space
/// unless the instance marks the box as the actual transport domain.
struct ValueDomain {
    std::vector<double> v_lower;
    std::vector<double> v_upper;
    double w_max = 0.0;

    bool has_box() const { return !v_lower.empty() && v_lower.size() == v_upper.size(); }

    bool operator==(const ValueDomain& other) const = default;
};

/**
 * Transport cost on the lifted space (V x W) x (V x W), one kind per lift
 * family:
 *
 *   wasserstein-weight-guard  d(v, vhat) + inf * 1{w != what}
 *   phi-identity-guard        inf * 1{v != vhat} + g(v) phi(w / g(v)),
 *                             g = 1/(1-eps) on the data atoms, 0 at the
 *                             worst-case scenario atom (where the charge
 *                             becomes phi'_inf * w), +inf elsewhere
 *   sinkhorn-kl-increment     inf * 1{v != vhat} + eps (phiKL(w) - phiKL(what))+
 *   interpolated              theta1 w d(v, vhat) + theta2 (phi(w) - phi(what))+
 *
 * Every kind vanishes on the diagonal of the nominal support and is
 * nonnegative wherever finite.
 */
class LiftedCost {
public:
    enum class Kind { PhiIdentityGuard, SinkhornKlIncrement, WassersteinWeightGuard, Interpolated };

    static LiftedCost wasserstein(GroundCost ground);
    static LiftedCost phi_identity_guard(EntropyFunction phi, double mix_epsilon,
                                         std::vector<Point> data_atoms, Point worst_atom);
    static LiftedCost sinkhorn_increment(double reg_epsilon);
    static LiftedCost interpolated(GroundCost ground, EntropyFunction phi, double theta1,
                                   double theta2);

    Kind kind() const { return kind_; }
    const GroundCost& ground() const;
    const EntropyFunction& phi() const;
    double theta1() const { return theta1_; }
    double theta2() const { return theta2_; }
    double mix_epsilon() const { return mix_epsilon_; }
    double reg_epsilon() const { return reg_epsilon_; }
    const std::vector<Point>& data_atoms() const { return data_atoms_; }
    const Point& worst_atom() const { return worst_atom_; }

    /// c((v, w), (vhat, what)) as an extended real.
    double operator()(const Point& v, double w, const Point& v_hat, double w_hat) const;

    std::string kind_name() const;

private:
    Kind kind_ = Kind::Interpolated;
    std::optional<GroundCost> ground_;
    std::optional<EntropyFunction> phi_;
    double theta1_ = 1.0, theta2_ = 1.0;
    double mix_epsilon_ = 0.0, reg_epsilon_ = 0.0;
    std::vector<Point> data_atoms_;
    Point worst_atom_;
};

/**
 * The unified problem object: maximize E_nu[f(V, W)] with f(v, w) = l(v) w
 * over measures nu with M(nu, nu_hat) <= r under the conditional moment
 * constraint E[W | G] = 1. The nominal measure lives on V x W; its atoms
 * store the v-coordinates followed by the w-coordinate.
 *
 * `losses` holds either one shared loss or one loss per nominal atom (the
 * SVM experiment bakes each sample's label into its own hinge pieces).
 * `loss_dim` is the number of leading v-coordinates the loss consumes; the
 * Sinkhorn lift sets it to d_z while v carries (z, zhat) pairs.
 * `condition_offset` marks where the conditioning coordinates start for the
 * conditional sigma-field (atoms with equal trailing blocks share a cell).
 */
struct LiftedInstance {
    std::vector<PiecewiseAffineLoss> losses;
    std::size_t loss_dim = 0;
    LiftedCost cost;
    DiscreteMeasure nominal;
    SigmaField sigma_field = SigmaField::Trivial;
    double radius = 0.0;
    ValueDomain value_domain;
    std::size_t condition_offset = 0;
    bool domain_is_box = false;

    LiftedInstance(std::vector<PiecewiseAffineLoss> losses_in, std::size_t loss_dim_in,
                   LiftedCost cost_in, DiscreteMeasure nominal_in, SigmaField sigma,
                   double radius_in, ValueDomain domain_in);

    std::size_t atom_count() const { return nominal.size(); }
    std::size_t v_dim() const { return nominal.dimension() - 1; }

    const PiecewiseAffineLoss& loss_for(std::size_t i) const {
        return losses.size() == 1 ? losses.front() : losses[i];
    }

    Point v_part(std::size_t i) const {
        const Point& a = nominal.atom(i);
        return Point(a.begin(), a.end() - 1);
    }
    double w_part(std::size_t i) const { return nominal.atom(i).back(); }

    /// f(v, w) = l(v) * w against atom i's loss.
    double objective_value(std::size_t i, const Point& v, double w) const {
        return loss_for(i)(v) * w;
    }

    /// Atom indices grouped into conditioning cells. Trivial sigma-field:
    /// one cell with everything; conditional: grouped by exact equality of
    /// the coordinates from condition_offset on (equal values merge).
    std::vector<std::vector<std::size_t>> conditioning_cells() const;
};

/// Dual optimizer output: the transport multiplier, the moment multiplier(s)
/// (one per conditioning cell), and the attained objective.
struct DualCertificate {
    double lambda_star = 0.0;
    std::vector<double> alpha_star;
    double objective = 0.0;
    int iterations = 0;
    double tolerance_achieved = 0.0;
    bool converged = false;
    std::string note;
};

/// One row of the worst-case transport plan: nominal mass at (nominal_v, 1)
/// moves to (perturbed_v, weight_multiplier); `mass` is the nominal weight
/// the row carries and `atom` the index of the nominal atom it came from.
/// A nominal atom can own several rows when the envelope argmax ties and
/// the coupling splits its mass across the tied branches.
struct TransportRecord {
    std::size_t atom = 0;
    Point nominal_v;
    Point perturbed_v;
    double weight_multiplier = 1.0;
    double mass = 0.0;
};

/// Worst-case coupling plus its dual certificate and the weak-duality data.
struct WorstCaseCoupling {
    std::vector<TransportRecord> records;
    DualCertificate certificate;
    double primal_value = 0.0;

    double duality_gap() const { return certificate.objective - primal_value; }
    bool weak_duality_ok(double tol = 1e-6) const {
        return primal_value <= certificate.objective + tol;
    }
    /// Mean of the weight multipliers under the nominal masses.
    double mean_weight() const {
        double m = 0.0;
        for (const TransportRecord& rec : records) m += rec.mass * rec.weight_multiplier;
        return m;
    }
};

/**
 * Per-cell kernel data of the Sinkhorn lift: the smoothing rows
 * kappa_{zhat,eps} (exp(-d/eps)-tilted copies of the reference measure), the
 * log-normalizers, and the adjusted radius
 *
 *   r_bar = r + eps E_muhat[ log E_eta[ exp(-d(Z, Zhat)/eps) ] ],
 *
 * whose nonnegativity is necessary and sufficient for feasibility. Cells are
 * keyed by distinct nominal atoms; duplicates merge.
 */
struct SinkhornLiftData {
    DiscreteMeasure reference;
    double reg_epsilon = 1.0;
    std::vector<Point> cell_atoms;
    std::vector<double> cell_weights;
    std::vector<DiscreteMeasure> kernel_rows;
    std::vector<double> log_normalizers;
    double adjusted_radius = 0.0;
};

} // namespace otdro
