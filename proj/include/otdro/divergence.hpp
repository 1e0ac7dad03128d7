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

#include <string>
#include <utility>

#include "otdro/measure.hpp"

namespace otdro {

/**
 * Entropy function phi: a lower-semicontinuous convex function on [0, inf)
 * with phi(1) = 0, generating a phi-divergence. The catalog covers
 *
 *   kullback-leibler   t log t - t + 1
 *   burg               -log t + t - 1
 *   j-divergence       (t - 1) log t
 *   chi2               (t - 1)^2 / t
 *   modified-chi2      (t - 1)^2
 *   hellinger          (sqrt t - 1)^2
 *   chi-order-n        |t - 1|^n,  n > 1
 *   total-variation    |t - 1|
 *   cressie-read       (1 - theta + theta t - t^theta) / (theta (1 - theta)),
 *                      theta not in {0, 1}
 *
 * plus an internal entry for the Csiszar dual of chi-order-n,
 * t |1/t - 1|^n, which no standalone name covers.
 *
 * Values at t = 0 and the recession slope phi'_inf = lim phi(t)/t are the
 * analytic right limits per entry, never computed by float arithmetic on
 * infinities. Convex conjugates phi*(s) = sup_{t>=0} s t - phi(t) are in
 * closed form for every named entry except j-divergence, whose stationarity
 * condition log t + 1 - 1/t = s is inverted by a safeguarded Newton step
 * (the derivative is a strictly increasing bijection onto R).
 */
class EntropyFunction {
public:
    enum class Kind {
        KullbackLeibler,
        Burg,
        JDivergence,
        Chi2,
        ModifiedChi2,
        Hellinger,
        ChiOrder,
        TotalVariation,
        CressieRead,
        ChiOrderDual, // internal: Csiszar dual of ChiOrder
    };

    static EntropyFunction kullback_leibler() { return EntropyFunction(Kind::KullbackLeibler); }
    static EntropyFunction burg() { return EntropyFunction(Kind::Burg); }
    static EntropyFunction j_divergence() { return EntropyFunction(Kind::JDivergence); }
    static EntropyFunction chi2() { return EntropyFunction(Kind::Chi2); }
    static EntropyFunction modified_chi2() { return EntropyFunction(Kind::ModifiedChi2); }
    static EntropyFunction hellinger() { return EntropyFunction(Kind::Hellinger); }
    static EntropyFunction chi_order(double n);
    static EntropyFunction total_variation() { return EntropyFunction(Kind::TotalVariation); }
    static EntropyFunction cressie_read(double theta);

    /// Looks an entry up by its CLI/JSON name, e.g. "kullback-leibler" or
    /// "chi-order-n" / "cressie-read" with the parameter argument.
    static EntropyFunction from_name(const std::string& name, double parameter = 0.0);

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    std::string name() const;
    bool has_parameter() const { return kind_ == Kind::ChiOrder || kind_ == Kind::CressieRead || kind_ == Kind::ChiOrderDual; }

    /// phi(t) for t >= 0 (extended real); throws on t < 0.
    double value(double t) const;

    /// The analytic right limit phi(0+).
    double value_at_zero() const;

    /// Recession slope phi'_inf = lim_{t->inf} phi(t)/t, computed analytically
    /// from the formula (the catalog table's finite/infinite markers are not
    /// trusted; see the recession tests for the two rows where they differ).
    double recession_slope() const;

    /// Convex conjugate phi*(s) = sup_{t>=0} s t - phi(t), extended real.
    double conjugate(double s) const;

    /// Whether phi* is strictly increasing on its finite domain — the
    /// admission flag for the general-phi dual solver. Per catalog metadata
    /// this is set for kullback-leibler, modified-chi2 and chi-order-n only.
    bool conjugate_strictly_increasing() const;

    /// d/ds phi*(s) where defined (the worst-case weight multiplier). Only
    /// available for entries with conjugate_strictly_increasing().
    double conjugate_derivative(double s) const;

    /// Csiszar dual psi(t) = t phi(1/t). Swapping the divergence arguments
    /// swaps phi and psi.
    EntropyFunction csiszar_dual() const;

    bool operator==(const EntropyFunction& other) const {
        return kind_ == other.kind_ && param_ == other.param_;
    }

private:
    explicit EntropyFunction(Kind kind, double param = 0.0) : kind_(kind), param_(param) {}

    Kind kind_;
    double param_;
};

/// phi(t) with the domain check (t >= 0).
double phi_eval(const EntropyFunction& phi, double t);

/// phi*(s) = sup_{t>=0} s t - phi(t).
double phi_conjugate(const EntropyFunction& phi, double s);

/// psi(t) = t phi(1/t).
EntropyFunction csiszar_dual(const EntropyFunction& phi);

/**
 * Generalized phi-divergence between finitely supported measures,
 *
 *   D_phi(mu, mu_hat) = sum_z  mhat(z) phi(m(z)/mhat(z))   over mhat(z) > 0
 *                     + phi'_inf * mu(mhat = 0),
 *
 * with the conventions 0 phi(0/0) = 0 and 0 phi(a/0) = a phi'_inf. The
 * dominating measure is uniform on the union of the two supports, which
 * makes every Radon-Nikodym ratio a plain quotient of weights (the
 * definition is dominating-measure independent). Atoms are matched by exact
 * coordinate equality; duplicate atoms within one measure are aggregated.
 */
double generalized_divergence(const EntropyFunction& phi, const DiscreteMeasure& mu,
                              const DiscreteMeasure& mu_hat);

/// The two terms of the divergence decomposition: the integral over the
/// nominal support and the recession term phi'_inf * mu(off support). Their
/// sum equals generalized_divergence exactly in extended arithmetic.
std::pair<double, double> divergence_decomposed(const EntropyFunction& phi,
                                                const DiscreteMeasure& mu,
                                                const DiscreteMeasure& mu_hat);

} // namespace otdro
