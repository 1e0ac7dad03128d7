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

#include "otdro/instance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"

namespace otdro {

LiftedCost LiftedCost::wasserstein(GroundCost ground) {
    LiftedCost c;
    c.kind_ = Kind::WassersteinWeightGuard;
    c.ground_ = std::move(ground);
    return c;
}

LiftedCost LiftedCost::phi_identity_guard(EntropyFunction phi, double mix_epsilon,
                                          std::vector<Point> data_atoms, Point worst_atom) {
    if (!(mix_epsilon > 0.0 && mix_epsilon < 1.0))
        throw InputError("phi lift: mix_epsilon must lie in (0, 1)");
    LiftedCost c;
    c.kind_ = Kind::PhiIdentityGuard;
    c.phi_ = std::move(phi);
    c.mix_epsilon_ = mix_epsilon;
    c.data_atoms_ = std::move(data_atoms);
    c.worst_atom_ = std::move(worst_atom);
    return c;
}

LiftedCost LiftedCost::sinkhorn_increment(double reg_epsilon) {
    if (!(reg_epsilon > 0.0))
        throw InputError("sinkhorn lift: reg_epsilon must be positive");
    LiftedCost c;
    c.kind_ = Kind::SinkhornKlIncrement;
    c.reg_epsilon_ = reg_epsilon;
    c.phi_ = EntropyFunction::kullback_leibler();
    return c;
}

LiftedCost LiftedCost::interpolated(GroundCost ground, EntropyFunction phi, double theta1,
                                    double theta2) {
    if (!(theta1 > 0.0) || !(theta2 > 0.0))
        throw InputError("interpolated cost: theta1 and theta2 must be positive");
    LiftedCost c;
    c.kind_ = Kind::Interpolated;
    c.ground_ = std::move(ground);
    c.phi_ = std::move(phi);
    c.theta1_ = theta1;
    c.theta2_ = theta2;
    return c;
}

const GroundCost& LiftedCost::ground() const {
    if (!ground_) throw InputError("lifted cost: no ground cost component");
    return *ground_;
}

const EntropyFunction& LiftedCost::phi() const {
    if (!phi_) throw InputError("lifted cost: no entropy component");
    return *phi_;
}

std::string LiftedCost::kind_name() const {
    switch (kind_) {
    case Kind::PhiIdentityGuard: return "phi-identity-guard";
    case Kind::SinkhornKlIncrement: return "sinkhorn-kl-increment";
    case Kind::WassersteinWeightGuard: return "wasserstein-weight-guard";
    case Kind::Interpolated: return "interpolated";
    }
    return "";
}

double LiftedCost::operator()(const Point& v, double w, const Point& v_hat,
                              double w_hat) const {
    if (!(w >= 0.0) || !(w_hat >= 0.0))
        throw InputError("lifted cost: weight coordinates must be nonnegative");
    switch (kind_) {
    case Kind::WassersteinWeightGuard: {
        if (w != w_hat) return kInf;
        return (*ground_)(v, v_hat);
    }
    case Kind::PhiIdentityGuard: {
        if (v != v_hat) return kInf;
        // The worst-scenario branch is keyed on the nominal atom
        // (worst_atom, 0) so the diagonal stays zero even when the chosen
        // scenario coincides with a data atom.
        const bool at_worst = (v_hat == worst_atom_) &&
                              (w_hat == 0.0 ||
                               std::find(data_atoms_.begin(), data_atoms_.end(), v_hat) ==
                                   data_atoms_.end());
        if (at_worst) return ext_mul(phi_->recession_slope(), w);
        if (std::find(data_atoms_.begin(), data_atoms_.end(), v) != data_atoms_.end()) {
            const double g = 1.0 / (1.0 - mix_epsilon_);
            return ext_mul(g, phi_->value(w / g));
        }
        return kInf;
    }
    case Kind::SinkhornKlIncrement: {
        if (v != v_hat) return kInf;
        const double increment = ext_add(phi_->value(w), -phi_->value(w_hat));
        return ext_mul(reg_epsilon_, std::max(0.0, increment));
    }
    case Kind::Interpolated: {
        const double transport = ext_mul(theta1_, ext_mul(w, (*ground_)(v, v_hat)));
        const double increment = ext_add(phi_->value(w), -phi_->value(w_hat));
        const double reweight = ext_mul(theta2_, std::max(0.0, increment));
        return ext_add(transport, reweight);
    }
    }
    return kInf;
}

LiftedInstance::LiftedInstance(std::vector<PiecewiseAffineLoss> losses_in,
                               std::size_t loss_dim_in, LiftedCost cost_in,
                               DiscreteMeasure nominal_in, SigmaField sigma, double radius_in,
                               ValueDomain domain_in)
    : losses(std::move(losses_in)), loss_dim(loss_dim_in), cost(std::move(cost_in)),
      nominal(std::move(nominal_in)), sigma_field(sigma), radius(radius_in),
      value_domain(std::move(domain_in)) {
    if (!(radius >= 0.0)) throw InputError("instance: radius must be nonnegative");
    if (losses.empty()) throw InputError("instance: needs at least one loss");
    if (losses.size() != 1 && losses.size() != nominal.size())
        throw InputError("instance: losses must be shared or one per nominal atom");
    if (nominal.dimension() < 2)
        throw InputError("instance: nominal atoms must carry v and w coordinates");
    if (loss_dim == 0 || loss_dim > v_dim())
        throw InputError("instance: loss dimension out of range");
    for (const PiecewiseAffineLoss& l : losses)
        if (l.dimension() != loss_dim)
            throw InputError("instance: loss dimension mismatch");
    for (std::size_t i = 0; i < nominal.size(); ++i)
        if (!(w_part(i) >= 0.0))
            throw InputError("instance: nominal W-coordinates must be nonnegative");
}

std::vector<std::vector<std::size_t>> LiftedInstance::conditioning_cells() const {
    if (sigma_field == SigmaField::Trivial) {
        std::vector<std::size_t> all(nominal.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return {all};
    }
    // Group by exact equality of the conditioning coordinates, keeping the
    // first-seen order of cells for determinism.
    std::map<Point, std::size_t> seen;
    std::vector<std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        const Point v = v_part(i);
        Point key(v.begin() + static_cast<std::ptrdiff_t>(condition_offset), v.end());
        auto [it, inserted] = seen.try_emplace(key, cells.size());
        if (inserted) cells.emplace_back();
        cells[it->second].push_back(i);
    }
    return cells;
}

} // namespace otdro
