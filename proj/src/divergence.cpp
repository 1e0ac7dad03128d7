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

#include "otdro/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"

namespace otdro {

EntropyFunction EntropyFunction::chi_order(double n) {
    if (!(n > 1.0) || !std::isfinite(n))
        throw InputError("chi-order-n: order must satisfy n > 1");
    return EntropyFunction(Kind::ChiOrder, n);
}

EntropyFunction EntropyFunction::cressie_read(double theta) {
    if (!std::isfinite(theta) || theta == 0.0 || theta == 1.0)
        throw InputError("cressie-read: theta must be finite and not in {0, 1}");
    return EntropyFunction(Kind::CressieRead, theta);
}

EntropyFunction EntropyFunction::from_name(const std::string& name, double parameter) {
    if (name == "kullback-leibler") return kullback_leibler();
    if (name == "burg") return burg();
    if (name == "j-divergence") return j_divergence();
    if (name == "chi2") return chi2();
    if (name == "modified-chi2") return modified_chi2();
    if (name == "hellinger") return hellinger();
    if (name == "chi-order-n") return chi_order(parameter);
    if (name == "total-variation") return total_variation();
    if (name == "cressie-read") return cressie_read(parameter);
    throw InputError("unknown entropy function: " + name);
}

std::string EntropyFunction::name() const {
    switch (kind_) {
    case Kind::KullbackLeibler: return "kullback-leibler";
    case Kind::Burg: return "burg";
    case Kind::JDivergence: return "j-divergence";
    case Kind::Chi2: return "chi2";
    case Kind::ModifiedChi2: return "modified-chi2";
    case Kind::Hellinger: return "hellinger";
    case Kind::ChiOrder: return "chi-order-n";
    case Kind::TotalVariation: return "total-variation";
    case Kind::CressieRead: return "cressie-read";
    case Kind::ChiOrderDual: return "chi-order-n-dual";
    }
    return "";
}

double EntropyFunction::value_at_zero() const {
    switch (kind_) {
    case Kind::KullbackLeibler: return 1.0;
    case Kind::Burg: return kInf;
    case Kind::JDivergence: return kInf;
    case Kind::Chi2: return kInf;
    case Kind::ModifiedChi2: return 1.0;
    case Kind::Hellinger: return 1.0;
    case Kind::ChiOrder: return 1.0;
    case Kind::TotalVariation: return 1.0;
    case Kind::CressieRead: return param_ > 0.0 ? 1.0 / param_ : kInf;
    case Kind::ChiOrderDual: return kInf;
    }
    return kInf;
}

double EntropyFunction::value(double t) const {
    if (!(t >= 0.0)) throw InputError("entropy function: argument must be nonnegative");
    if (t == 0.0) return value_at_zero();
    switch (kind_) {
    case Kind::KullbackLeibler: return t * std::log(t) - t + 1.0;
    case Kind::Burg: return -std::log(t) + t - 1.0;
    case Kind::JDivergence: return (t - 1.0) * std::log(t);
    case Kind::Chi2: {
        const double d = t - 1.0;
        return d * d / t;
    }
    case Kind::ModifiedChi2: {
        const double d = t - 1.0;
        return d * d;
    }
    case Kind::Hellinger: {
        const double d = std::sqrt(t) - 1.0;
        return d * d;
    }
    case Kind::ChiOrder: return std::pow(std::abs(t - 1.0), param_);
    case Kind::TotalVariation: return std::abs(t - 1.0);
    case Kind::CressieRead: {
        const double th = param_;
        return (1.0 - th + th * t - std::pow(t, th)) / (th * (1.0 - th));
    }
    case Kind::ChiOrderDual:
        // t |1/t - 1|^n = |1 - t|^n t^(1-n)
        return std::pow(std::abs(1.0 - t), param_) * std::pow(t, 1.0 - param_);
    }
    return kInf;
}

double EntropyFunction::recession_slope() const {
    switch (kind_) {
    case Kind::KullbackLeibler: return kInf;
    case Kind::Burg: return 1.0;
    case Kind::JDivergence: return kInf;
    case Kind::Chi2: return 1.0; // (t-1)^2 / t^2 -> 1
    case Kind::ModifiedChi2: return kInf;
    case Kind::Hellinger: return 1.0;
    case Kind::ChiOrder: return kInf;
    case Kind::TotalVariation: return 1.0;
    case Kind::CressieRead: return param_ < 1.0 ? 1.0 / (1.0 - param_) : kInf;
    case Kind::ChiOrderDual: return 1.0;
    }
    return kInf;
}

namespace {

// Inverts log t + 1 - 1/t = s (the j-divergence stationarity condition) in
// u = log t; the map u -> u + 1 - exp(-u) is a strictly increasing bijection
// onto R, so a bracketed Newton iteration converges for every s.
double j_divergence_stationary_point(double s) {
    auto g = [s](double u) { return u + 1.0 - std::exp(-u) - s; };
    double lo = 0.0, hi = 0.0, step = 1.0;
    while (g(lo) > 0.0) { lo -= step; step *= 2.0; }
    step = 1.0;
    while (g(hi) < 0.0) { hi += step; step *= 2.0; }
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gu = g(u);
        if (gu > 0.0) hi = u; else lo = u;
        const double du = gu / (1.0 + std::exp(-u));
        double next = u - du;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 1e-16 * (1.0 + std::abs(u))) { u = next; break; }
        u = next;
    }
    return std::exp(u);
}

} // namespace

double EntropyFunction::conjugate(double s) const {
    switch (kind_) {
    case Kind::KullbackLeibler:
        return std::expm1(s);
    case Kind::Burg:
        return s < 1.0 ? -std::log1p(-s) : kInf;
    case Kind::JDivergence: {
        const double t = j_divergence_stationary_point(s);
        return s * t - (t - 1.0) * std::log(t);
    }
    case Kind::Chi2:
        return s <= 1.0 ? 2.0 - 2.0 * std::sqrt(1.0 - s) : kInf;
    case Kind::ModifiedChi2:
        return s >= -2.0 ? s + 0.25 * s * s : -1.0;
    case Kind::Hellinger:
        return s < 1.0 ? s / (1.0 - s) : kInf;
    case Kind::ChiOrder: {
        const double n = param_;
        if (s < -n) return -1.0;
        return s + (n - 1.0) * std::pow(std::abs(s) / n, n / (n - 1.0));
    }
    case Kind::TotalVariation:
        if (s > 1.0) return kInf;
        return s < -1.0 ? -1.0 : s;
    case Kind::CressieRead: {
        const double th = param_;
        const double base = 1.0 - s * (1.0 - th);
        if (th > 1.0)
            return base >= 0.0 ? (std::pow(base, th / (th - 1.0)) - 1.0) / th : -1.0 / th;
        // theta < 1: the conjugate is finite exactly on s <= 1/(1-theta)
        // (and the boundary value is finite only for theta < 0).
        if (base > 0.0) return (std::pow(base, th / (th - 1.0)) - 1.0) / th;
        if (base == 0.0 && th < 0.0) return -1.0 / th;
        return kInf;
    }
    case Kind::ChiOrderDual:
        throw InputError("chi-order-n-dual: no closed-form conjugate");
    }
    return kInf;
}

bool EntropyFunction::conjugate_strictly_increasing() const {
    switch (kind_) {
    case Kind::KullbackLeibler:
    case Kind::ModifiedChi2:
    case Kind::ChiOrder:
        return true;
    default:
        return false;
    }
}

double EntropyFunction::conjugate_derivative(double s) const {
    switch (kind_) {
    case Kind::KullbackLeibler:
        return std::exp(s);
    case Kind::ModifiedChi2:
        return std::max(0.0, 1.0 + 0.5 * s);
    case Kind::ChiOrder: {
        const double n = param_;
        if (s < -n) return 0.0;
        const double root = std::pow(std::abs(s) / n, 1.0 / (n - 1.0));
        return s >= 0.0 ? 1.0 + root : 1.0 - root;
    }
    default:
        throw InputError(name() + ": conjugate derivative not available");
    }
}

EntropyFunction EntropyFunction::csiszar_dual() const {
    switch (kind_) {
    case Kind::KullbackLeibler: return burg();
    case Kind::Burg: return kullback_leibler();
    case Kind::JDivergence: return j_divergence();
    case Kind::Chi2: return modified_chi2();
    case Kind::ModifiedChi2: return chi2();
    case Kind::Hellinger: return hellinger();
    case Kind::ChiOrder: return EntropyFunction(Kind::ChiOrderDual, param_);
    case Kind::TotalVariation: return total_variation();
    case Kind::CressieRead: return cressie_read(1.0 - param_);
    case Kind::ChiOrderDual: return EntropyFunction(Kind::ChiOrder, param_);
    }
    throw InputError("csiszar_dual: unknown entry");
}

double phi_eval(const EntropyFunction& phi, double t) { return phi.value(t); }

double phi_conjugate(const EntropyFunction& phi, double s) { return phi.conjugate(s); }

EntropyFunction csiszar_dual(const EntropyFunction& phi) { return phi.csiszar_dual(); }

namespace {

// Aggregated masses (m, mhat) per distinct atom; the lexicographic map order
// makes the summation order deterministic.
std::map<Point, std::pair<double, double>> joint_masses(const DiscreteMeasure& mu,
                                                        const DiscreteMeasure& mu_hat) {
    if (mu.dimension() != mu_hat.dimension())
        throw InputError("divergence: measures must share one ambient space");
    std::map<Point, std::pair<double, double>> masses;
    for (std::size_t i = 0; i < mu.size(); ++i)
        masses[mu.atom(i)].first += mu.weight(i);
    for (std::size_t i = 0; i < mu_hat.size(); ++i)
        masses[mu_hat.atom(i)].second += mu_hat.weight(i);
    return masses;
}

} // namespace

std::pair<double, double> divergence_decomposed(const EntropyFunction& phi,
                                                const DiscreteMeasure& mu,
                                                const DiscreteMeasure& mu_hat) {
    const double slope = phi.recession_slope();
    double on_support = 0.0;
    double off_support = 0.0;
    for (const auto& [atom, mass] : joint_masses(mu, mu_hat)) {
        const auto [m, mhat] = mass;
        if (m == 0.0 && mhat == 0.0) continue;
        if (mhat > 0.0) {
            on_support = ext_add(on_support, ext_mul(mhat, phi.value(m / mhat)));
        } else {
            off_support = ext_add(off_support, ext_mul(slope, m));
        }
    }
    return {on_support, off_support};
}

double generalized_divergence(const EntropyFunction& phi, const DiscreteMeasure& mu,
                              const DiscreteMeasure& mu_hat) {
    const auto [on_support, off_support] = divergence_decomposed(phi, mu, mu_hat);
    return ext_add(on_support, off_support);
}

} // namespace otdro
