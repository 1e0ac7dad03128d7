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

#include "otdro/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"

namespace otdro {

namespace {

// ---------------------------------------------------------------------------
// Golden section over log lambda

enum class SearchStatus { Interior, LeftGuard, RightGuard, AllInfinite };

struct SearchOutcome {
    SearchStatus status = SearchStatus::AllInfinite;
    double lambda = 0.0;
    double value = kInf;
    int iterations = 0;
    double width = 0.0;
    std::string warning;
};

// Minimizes h(exp(u)) over u in [log lambda_min, log lambda_max]. A 16-point
// log-spaced sweep locates the unimodal basin (and doubles as the
// cross-check against silent non-unimodality); golden section refines inside
// the bracket [incumbent - spacing, incumbent + spacing].
SearchOutcome golden_over_log_lambda(const std::function<double(double)>& h,
                                     const SolveOptions& opt) {
    const double u_min = std::log(opt.lambda_min);
    const double u_max = std::log(opt.lambda_max);
    constexpr int kSweep = 16;
    const double spacing = (u_max - u_min) / (kSweep - 1);

    double grid_best_u = 0.0, grid_best = kInf;
    for (int k = 0; k < kSweep; ++k) {
        const double u = u_min + k * spacing;
        const double value = h(std::exp(u));
        if (value < grid_best) {
            grid_best = value;
            grid_best_u = u;
        }
    }
    SearchOutcome out;
    if (!is_finite(grid_best)) return out;

    double lo = std::max(u_min, grid_best_u - spacing);
    double hi = std::min(u_max, grid_best_u + spacing);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = h(std::exp(x1));
    double f2 = h(std::exp(x2));
    int iterations = 0;
    while (hi - lo > opt.bracket_tol && iterations < opt.max_iter) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = h(std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = h(std::exp(x2));
        }
        ++iterations;
    }
    double u_star = f1 < f2 ? x1 : x2;
    double f_star = std::min(f1, f2);
    if (grid_best < f_star) {
        // The sweep beat the refined search: the objective was not unimodal
        // on the bracket. Keep the better point and flag it.
        u_star = grid_best_u;
        f_star = grid_best;
        out.warning = "log-spaced sweep below golden-section result; "
                      "objective may not be unimodal";
    }
    out.status = u_star <= u_min + 1e-6   ? SearchStatus::LeftGuard
                 : u_star >= u_max - 1e-6 ? SearchStatus::RightGuard
                                          : SearchStatus::Interior;
    out.lambda = std::exp(u_star);
    out.value = f_star;
    out.iterations = iterations;
    out.width = hi - lo;
    return out;
}

// ---------------------------------------------------------------------------
// Shared pieces

double nominal_risk(const LiftedInstance& instance) {
    double risk = 0.0;
    for (std::size_t i = 0; i < instance.atom_count(); ++i)
        risk += instance.nominal.weight(i) *
                instance.objective_value(i, instance.v_part(i), instance.w_part(i));
    return risk;
}

WorstCaseCoupling empirical_coupling(const LiftedInstance& instance, const std::string& note) {
    WorstCaseCoupling coupling;
    coupling.certificate.lambda_star = 0.0;
    coupling.certificate.alpha_star = {nominal_risk(instance)};
    coupling.certificate.objective = nominal_risk(instance);
    coupling.certificate.converged = true;
    coupling.certificate.note = note;
    for (std::size_t i = 0; i < instance.atom_count(); ++i) {
        const Point v = instance.v_part(i);
        coupling.records.push_back({i, v, v, 1.0, instance.nominal.weight(i)});
    }
    coupling.primal_value = coupling.certificate.objective;
    return coupling;
}

// alpha = lam theta2 log E[exp(x / (lam theta2))], evaluated around max x.
// The pieces (max, normalizer) are kept so downstream weights can be formed
// as exp((x_i - max)/tau) / normalizer, which avoids the catastrophic
// cancellation of (x_i - alpha)/tau when tau is tiny against the x scale.
struct LogPartition {
    double max = -kInf;
    double normalizer = 0.0;
    double alpha = kInf;
};

LogPartition log_partition(const std::vector<DTransformResult>& xs,
                           const std::vector<double>& weights, double tau) {
    LogPartition out;
    for (const DTransformResult& x : xs) {
        if (!is_finite(x.value)) return out;
        out.max = std::max(out.max, x.value);
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        out.normalizer += weights[i] * std::exp((xs[i].value - out.max) / tau);
    out.alpha = out.max + tau * std::log(out.normalizer);
    return out;
}

void require_interpolated(const LiftedInstance& instance, const char* who) {
    if (instance.cost.kind() != LiftedCost::Kind::Interpolated)
        throw InputError(std::string(who) + ": instance does not carry an interpolated cost");
}

struct CouplingBuild {
    std::vector<TransportRecord> records;
    double primal = 0.0;
};

/**
 * Transport records from the envelope results. At kinks of the dual
 * objective the argmax is tied between loss pieces with different transport
 * distances; there the worst-case coupling splits each tied atom between the
 * cheapest and the dearest branch so the budget is spent exactly (the
 * multiplier w_i depends only on the envelope value, so the nominal mean of
 * the weights is unaffected). Away from kinks this reduces to one record per
 * atom at the lexicographically smallest maximizer.
 */
CouplingBuild build_coupling(const LiftedInstance& instance,
                             const std::vector<DTransformResult>& xs,
                             const std::function<double(double)>& multiplier_of_envelope) {
    const std::size_t n = instance.atom_count();
    struct Branch {
        Point v;
        double cost = 0.0;
    };
    std::vector<double> w(n);
    std::vector<Branch> near(n), far(n);
    double cost_near = 0.0, cost_far = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = multiplier_of_envelope(xs[i].value);
        const Point v_hat = instance.v_part(i);
        const double w_hat = instance.w_part(i);
        Branch lo, hi;
        bool first = true;
        for (const Point& v : xs[i].co_maximizers) {
            const double c = instance.cost(v, w[i], v_hat, w_hat);
            if (first || c < lo.cost) lo = {v, c};
            if (first || c > hi.cost) hi = {v, c};
            first = false;
        }
        near[i] = std::move(lo);
        far[i] = std::move(hi);
        cost_near += instance.nominal.weight(i) * near[i].cost;
        cost_far += instance.nominal.weight(i) * far[i].cost;
    }
    double rho = 0.0;
    if (cost_far > cost_near + 1e-14 && instance.radius >= cost_near &&
        instance.radius <= cost_far)
        rho = (instance.radius - cost_near) / (cost_far - cost_near);

    CouplingBuild out;
    for (std::size_t i = 0; i < n; ++i) {
        const double mass = instance.nominal.weight(i);
        const Point v_hat = instance.v_part(i);
        const PiecewiseAffineLoss& loss = instance.loss_for(i);
        if (rho > 0.0 && !(near[i].v == far[i].v)) {
            if (rho < 1.0)
                out.records.push_back({i, v_hat, near[i].v, w[i], mass * (1.0 - rho)});
            out.records.push_back({i, v_hat, far[i].v, w[i], mass * rho});
            out.primal += mass * w[i] *
                          ((1.0 - rho) * loss(near[i].v) + rho * loss(far[i].v));
        } else {
            // no split: deterministic lexicographic tie-break
            out.records.push_back({i, v_hat, xs[i].co_maximizers.front(), w[i], mass});
            out.primal += mass * w[i] * loss(xs[i].co_maximizers.front());
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// KL-interpolated dual (alpha eliminated in closed form)

WorstCaseCoupling solve_kl_interpolated(const LiftedInstance& instance,
                                        const SolveOptions& options) {
    require_interpolated(instance, "solve_kl_interpolated");
    if (instance.cost.phi().kind() != EntropyFunction::Kind::KullbackLeibler)
        throw InputError("solve_kl_interpolated: entropy must be kullback-leibler");
    if (instance.radius == 0.0)
        return empirical_coupling(instance, "zero radius: empirical risk");

    const double r = instance.radius;
    const double th1 = instance.cost.theta1(), th2 = instance.cost.theta2();
    const std::vector<double>& weights = instance.nominal.weights();

    const auto objective = [&](double lam) {
        const auto xs = d_transform_batch(instance, lam * th1);
        const double alpha = log_partition(xs, weights, lam * th2).alpha;
        return is_finite(alpha) ? lam * r + alpha : kInf;
    };

    const SearchOutcome search = golden_over_log_lambda(objective, options);
    if (search.status == SearchStatus::AllInfinite)
        throw UnboundedError("solve_kl_interpolated: dual objective is +inf for every "
                             "multiplier; the loss outgrows the transport cost");

    WorstCaseCoupling coupling;
    DualCertificate& cert = coupling.certificate;
    cert.iterations = search.iterations;
    cert.tolerance_achieved = search.width;
    cert.note = search.warning;

    if (search.status == SearchStatus::LeftGuard) {
        // The bracket collapsed at lambda_min: the dual minimum sits at the
        // boundary, whose value is the sup of the loss over reachable points.
        const auto limit = d_transform_batch(instance, 0.0);
        double sup = -kInf;
        for (const DTransformResult& x : limit) sup = std::max(sup, x.value);
        if (!is_finite(sup))
            throw UnboundedError("solve_kl_interpolated: unbounded risk at lambda -> 0");
        cert.lambda_star = 0.0;
        cert.alpha_star = {sup};
        cert.objective = sup;
        cert.converged = true;
        cert.note = "lambda at lower guard: reported the lambda -> 0 limit";
        const CouplingBuild built =
            build_coupling(instance, limit, [](double) { return 1.0; });
        coupling.records = built.records;
        coupling.primal_value = built.primal;
        return coupling;
    }

    const double lam = search.lambda;
    const auto xs = d_transform_batch(instance, lam * th1);
    const double tau = lam * th2;
    const LogPartition partition = log_partition(xs, weights, tau);
    cert.lambda_star = lam;
    cert.alpha_star = {partition.alpha};
    cert.objective = lam * r + partition.alpha;
    cert.converged = search.warning.empty();

    const CouplingBuild built = build_coupling(instance, xs, [&](double envelope) {
        return std::exp((envelope - partition.max) / tau) / partition.normalizer;
    });
    coupling.records = built.records;
    coupling.primal_value = built.primal;
    return coupling;
}

// ---------------------------------------------------------------------------
// General-phi dual (nested alpha minimization)

namespace {

struct AlphaSolve {
    double alpha = 0.0;
    double value = kInf; // alpha + tau E[phi*((x - alpha)/tau)]
};

AlphaSolve minimize_over_alpha(const std::vector<DTransformResult>& xs,
                               const std::vector<double>& weights, double tau,
                               const EntropyFunction& phi) {
    double x_max = -kInf;
    for (const DTransformResult& x : xs) {
        if (!is_finite(x.value)) return {};
        x_max = std::max(x_max, x.value);
    }
    const auto slope = [&](double alpha) {
        double s = 1.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s -= weights[i] * phi.conjugate_derivative((xs[i].value - alpha) / tau);
        return s;
    };
    double lo = x_max - 1.0, hi = x_max + 1.0, step = 1.0;
    int expansions = 0;
    while (slope(lo) > 0.0) {
        lo -= step;
        step *= 2.0;
        if (++expansions > 200)
            throw NumericalError("solve_general_phi: inner alpha bracket exhausted (low side)");
    }
    step = 1.0;
    while (slope(hi) < 0.0) {
        hi += step;
        step *= 2.0;
        if (++expansions > 200)
            throw NumericalError("solve_general_phi: inner alpha bracket exhausted (high side)");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) < 0.0) lo = mid; else hi = mid;
    }
    AlphaSolve out;
    out.alpha = 0.5 * (lo + hi);
    double expectation = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        expectation += weights[i] * phi.conjugate((xs[i].value - out.alpha) / tau);
    out.value = out.alpha + tau * expectation;
    return out;
}

} // namespace

WorstCaseCoupling solve_general_phi(const LiftedInstance& instance,
                                    const SolveOptions& options) {
    require_interpolated(instance, "solve_general_phi");
    const EntropyFunction phi = instance.cost.phi();
    if (!phi.conjugate_strictly_increasing())
        throw InputError("solve_general_phi: unsupported entropy '" + phi.name() +
                         "' (conjugate is not strictly increasing per catalog metadata)");
    if (instance.radius == 0.0)
        return empirical_coupling(instance, "zero radius: empirical risk");

    const double r = instance.radius;
    const double th1 = instance.cost.theta1(), th2 = instance.cost.theta2();
    const std::vector<double>& weights = instance.nominal.weights();

    const auto objective = [&](double lam) {
        const auto xs = d_transform_batch(instance, lam * th1);
        const AlphaSolve inner = minimize_over_alpha(xs, weights, lam * th2, phi);
        return is_finite(inner.value) ? lam * r + inner.value : kInf;
    };

    const SearchOutcome search = golden_over_log_lambda(objective, options);
    if (search.status == SearchStatus::AllInfinite)
        throw UnboundedError("solve_general_phi: dual objective is +inf for every multiplier");

    const double lam = search.lambda;
    const double tau = lam * th2;
    const auto xs = d_transform_batch(instance, lam * th1);
    const AlphaSolve inner = minimize_over_alpha(xs, weights, tau, phi);

    WorstCaseCoupling coupling;
    DualCertificate& cert = coupling.certificate;
    cert.lambda_star = lam;
    cert.alpha_star = {inner.alpha};
    cert.objective = lam * r + inner.value;
    cert.iterations = search.iterations;
    cert.tolerance_achieved = search.width;
    cert.converged = search.warning.empty();
    cert.note = search.status == SearchStatus::LeftGuard
                    ? "lambda at lower guard"
                    : search.warning;

    // |envelope - alpha| at one-ULP scale is bisection noise; snapping it to
    // the conjugate's kink matters for entropies whose derivative has a
    // vertical tangent there (chi-order), where an ULP otherwise amplifies
    // to a 1e-7-scale weight error.
    const auto conjugate_argument = [&](double envelope, double alpha) {
        const double diff = envelope - alpha;
        const double ulp = 8.0 * 2.220446049250313e-16 *
                           std::max({1.0, std::abs(envelope), std::abs(alpha)});
        return std::abs(diff) <= ulp ? 0.0 : diff / tau;
    };
    const CouplingBuild built = build_coupling(instance, xs, [&](double envelope) {
        return phi.conjugate_derivative(conjugate_argument(envelope, inner.alpha));
    });
    coupling.records = built.records;
    coupling.primal_value = built.primal;
    return coupling;
}

// ---------------------------------------------------------------------------
// Direct Wasserstein dual

WorstCaseCoupling solve_wasserstein(const LiftedInstance& instance,
                                    const SolveOptions& options) {
    if (instance.cost.kind() != LiftedCost::Kind::WassersteinWeightGuard)
        throw InputError("solve_wasserstein: instance does not carry the weight-guard cost");
    if (instance.radius == 0.0)
        return empirical_coupling(instance, "zero radius: empirical risk");

    const double r = instance.radius;
    const std::vector<double>& weights = instance.nominal.weights();

    const auto objective = [&](double lam) {
        const auto xs = d_transform_batch(instance, lam);
        double mean = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!is_finite(xs[i].value)) return kInf;
            mean += weights[i] * xs[i].value;
        }
        return lam * r + mean;
    };

    const SearchOutcome search = golden_over_log_lambda(objective, options);
    if (search.status == SearchStatus::AllInfinite)
        throw UnboundedError("solve_wasserstein: dual objective is +inf for every multiplier");

    const double lam = search.lambda;
    const auto xs = d_transform_batch(instance, lam);
    WorstCaseCoupling coupling;
    DualCertificate& cert = coupling.certificate;
    cert.lambda_star = lam;
    cert.alpha_star = {0.0};
    cert.objective = search.value;
    cert.iterations = search.iterations;
    cert.tolerance_achieved = search.width;
    cert.converged = search.warning.empty();
    cert.note = search.warning;
    const CouplingBuild built = build_coupling(instance, xs, [](double) { return 1.0; });
    coupling.records = built.records;
    coupling.primal_value = built.primal;
    return coupling;
}

// ---------------------------------------------------------------------------
// Sinkhorn dual

namespace {

struct SinkhornCells {
    std::vector<std::vector<double>> kappa;  // per cell kernel weights
    std::vector<std::vector<double>> losses; // per cell losses at the z atoms
    std::vector<std::vector<Point>> z_atoms; // per cell z coordinates
    std::vector<Point> cell_atoms;
    std::vector<double> cell_weights;
};

// Stable per-cell log partition m_c + tau log sum_j kappa_cj e^{(l_j-m_c)/tau};
// the (max, normalizer) pieces are kept so conditional weights can be formed
// without subtracting the log partition back out (which cancels
// catastrophically when tau is tiny against the loss scale).
struct CellPartition {
    double max = -kInf;
    double normalizer = 0.0;
    double value = kInf;
};

CellPartition cell_log_partition(const std::vector<double>& kappa,
                                 const std::vector<double>& losses, double tau) {
    CellPartition out;
    for (std::size_t j = 0; j < kappa.size(); ++j)
        if (kappa[j] > 0.0) out.max = std::max(out.max, losses[j]);
    for (std::size_t j = 0; j < kappa.size(); ++j)
        if (kappa[j] > 0.0) out.normalizer += kappa[j] * std::exp((losses[j] - out.max) / tau);
    out.value = out.max + tau * std::log(out.normalizer);
    return out;
}

WorstCaseCoupling solve_sinkhorn_cells(const SinkhornCells& cells, double r_bar, double eps,
                                       const SolveOptions& options) {
    if (r_bar < 0.0)
        throw InfeasibleError("solve_sinkhorn: adjusted radius " + std::to_string(r_bar) +
                              " is negative; the ambiguity set is empty");
    const std::size_t n_cells = cells.kappa.size();

    auto records_at = [&](const std::function<double(std::size_t, std::size_t)>& w_of) {
        std::vector<TransportRecord> records;
        std::size_t atom = 0;
        for (std::size_t c = 0; c < n_cells; ++c) {
            for (std::size_t j = 0; j < cells.kappa[c].size(); ++j, ++atom) {
                Point v = cells.z_atoms[c][j];
                v.insert(v.end(), cells.cell_atoms[c].begin(), cells.cell_atoms[c].end());
                records.push_back({atom, v, v, w_of(c, j),
                                   cells.cell_weights[c] * cells.kappa[c][j]});
            }
        }
        return records;
    };
    auto primal_of = [&](const std::vector<TransportRecord>& records) {
        double value = 0.0;
        std::size_t k = 0;
        for (std::size_t c = 0; c < n_cells; ++c)
            for (std::size_t j = 0; j < cells.kappa[c].size(); ++j, ++k)
                value += records[k].mass * records[k].weight_multiplier * cells.losses[c][j];
        return value;
    };

    WorstCaseCoupling coupling;
    DualCertificate& cert = coupling.certificate;

    if (r_bar == 0.0) {
        // Zero-budget KL ball: the coupling is the kernel-smoothed nominal.
        cert.lambda_star = 0.0;
        cert.converged = true;
        cert.note = "zero adjusted radius: kernel-smoothed nominal risk";
        coupling.records = records_at([](std::size_t, std::size_t) { return 1.0; });
        coupling.primal_value = primal_of(coupling.records);
        cert.objective = coupling.primal_value;
        cert.alpha_star.assign(n_cells, 0.0);
        return coupling;
    }

    // h(lam) = lam r_bar + sum_c W_c [m_c + lam eps log S_c]; the per-cell
    // log partition already carries the lam*eps scaling.
    const auto objective = [&](double lam) {
        const double tau = lam * eps;
        double value = lam * r_bar;
        for (std::size_t c = 0; c < n_cells; ++c)
            value += cells.cell_weights[c] *
                     cell_log_partition(cells.kappa[c], cells.losses[c], tau).value;
        return value;
    };
    const SearchOutcome search = golden_over_log_lambda(objective, options);
    if (search.status == SearchStatus::AllInfinite)
        throw UnboundedError("solve_sinkhorn: dual objective is +inf for every multiplier");

    const double lam = search.lambda;
    const double tau = lam * eps;
    cert.lambda_star = lam;
    cert.objective = search.value;
    cert.iterations = search.iterations;
    cert.tolerance_achieved = search.width;
    cert.converged = search.warning.empty();
    cert.note = search.status == SearchStatus::LeftGuard
                    ? "lambda at lower guard: budget saturates the kernel supports"
                    : search.warning;

    cert.alpha_star.resize(n_cells);
    std::vector<std::vector<double>> w(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        const CellPartition partition =
            cell_log_partition(cells.kappa[c], cells.losses[c], tau);
        cert.alpha_star[c] = partition.value;
        w[c].resize(cells.kappa[c].size(), 0.0);
        for (std::size_t j = 0; j < cells.kappa[c].size(); ++j)
            if (cells.kappa[c][j] > 0.0)
                w[c][j] = std::exp((cells.losses[c][j] - partition.max) / tau) /
                          partition.normalizer;
    }
    coupling.records = records_at([&](std::size_t c, std::size_t j) { return w[c][j]; });
    coupling.primal_value = primal_of(coupling.records);
    return coupling;
}

} // namespace

WorstCaseCoupling solve_sinkhorn(const SinkhornLiftData& lift_data,
                                 const PiecewiseAffineLoss& loss,
                                 const SolveOptions& options) {
    SinkhornCells cells;
    const std::size_t n_cells = lift_data.kernel_rows.size();
    cells.kappa.resize(n_cells);
    cells.losses.resize(n_cells);
    cells.z_atoms.resize(n_cells);
    cells.cell_atoms = lift_data.cell_atoms;
    cells.cell_weights = lift_data.cell_weights;
    for (std::size_t c = 0; c < n_cells; ++c) {
        const DiscreteMeasure& row = lift_data.kernel_rows[c];
        cells.kappa[c] = row.weights();
        cells.z_atoms[c] = row.atoms();
        cells.losses[c].resize(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) cells.losses[c][j] = loss(row.atom(j));
    }
    return solve_sinkhorn_cells(cells, lift_data.adjusted_radius, lift_data.reg_epsilon,
                                options);
}

namespace {

SinkhornCells cells_from_instance(const LiftedInstance& instance) {
    if (instance.cost.kind() != LiftedCost::Kind::SinkhornKlIncrement)
        throw InputError("sinkhorn solve: instance does not carry the KL-increment cost");
    SinkhornCells cells;
    const auto groups = instance.conditioning_cells();
    const std::size_t dz = instance.loss_dim;
    for (const auto& group : groups) {
        double cell_weight = 0.0;
        for (std::size_t i : group) cell_weight += instance.nominal.weight(i);
        std::vector<double> kappa;
        std::vector<Point> z_atoms;
        std::vector<double> losses;
        for (std::size_t i : group) {
            const Point v = instance.v_part(i);
            Point z(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dz));
            losses.push_back(instance.loss_for(i)(z));
            kappa.push_back(cell_weight > 0.0 ? instance.nominal.weight(i) / cell_weight : 0.0);
            z_atoms.push_back(std::move(z));
        }
        const Point v0 = instance.v_part(group.front());
        cells.cell_atoms.emplace_back(v0.begin() + static_cast<std::ptrdiff_t>(dz), v0.end());
        cells.cell_weights.push_back(cell_weight);
        cells.kappa.push_back(std::move(kappa));
        cells.z_atoms.push_back(std::move(z_atoms));
        cells.losses.push_back(std::move(losses));
    }
    return cells;
}

} // namespace

// ---------------------------------------------------------------------------
// Extraction and dispatch

WorstCaseCoupling extract_worst_case(const DualCertificate& certificate,
                                     const LiftedInstance& instance) {
    switch (instance.cost.kind()) {
    case LiftedCost::Kind::Interpolated: {
        if (instance.radius == 0.0)
            return empirical_coupling(instance, "zero radius: empirical risk");
        const double lam = certificate.lambda_star;
        const double tau = lam * instance.cost.theta2();
        const double alpha = certificate.alpha_star.empty() ? 0.0 : certificate.alpha_star[0];
        const auto xs = d_transform_batch(instance, lam * instance.cost.theta1());
        const EntropyFunction& phi = instance.cost.phi();
        WorstCaseCoupling coupling;
        coupling.certificate = certificate;
        const CouplingBuild built = build_coupling(instance, xs, [&](double envelope) {
            const double diff = envelope - alpha;
            const double ulp = 8.0 * 2.220446049250313e-16 *
                               std::max({1.0, std::abs(envelope), std::abs(alpha)});
            const double s = std::abs(diff) <= ulp ? 0.0 : diff / tau;
            return phi.kind() == EntropyFunction::Kind::KullbackLeibler
                       ? std::exp(s)
                       : phi.conjugate_derivative(s);
        });
        coupling.records = built.records;
        coupling.primal_value = built.primal;
        return coupling;
    }
    case LiftedCost::Kind::WassersteinWeightGuard: {
        if (instance.radius == 0.0)
            return empirical_coupling(instance, "zero radius: empirical risk");
        const auto xs = d_transform_batch(instance, certificate.lambda_star);
        WorstCaseCoupling coupling;
        coupling.certificate = certificate;
        const CouplingBuild built =
            build_coupling(instance, xs, [](double) { return 1.0; });
        coupling.records = built.records;
        coupling.primal_value = built.primal;
        return coupling;
    }
    case LiftedCost::Kind::SinkhornKlIncrement: {
        SinkhornCells cells = cells_from_instance(instance);
        WorstCaseCoupling coupling = solve_sinkhorn_cells(
            cells, instance.radius, instance.cost.reg_epsilon(), SolveOptions{});
        coupling.certificate.note = "re-extracted from instance";
        return coupling;
    }
    case LiftedCost::Kind::PhiIdentityGuard:
        throw InputError("extract_worst_case: phi-identity-guard instances are certified "
                         "through the coupling oracle, not a dual solver");
    }
    throw InputError("extract_worst_case: unknown cost kind");
}

WorstCaseCoupling solve_instance(const LiftedInstance& instance, const std::string& method,
                                 const SolveOptions& options) {
    if (method == "kl") return solve_kl_interpolated(instance, options);
    if (method == "general-phi") return solve_general_phi(instance, options);
    if (method == "wasserstein") return solve_wasserstein(instance, options);
    if (method == "sinkhorn") {
        SinkhornCells cells = cells_from_instance(instance);
        return solve_sinkhorn_cells(cells, instance.radius, instance.cost.reg_epsilon(),
                                    options);
    }
    throw InputError("solve: unknown method '" + method + "'");
}

} // namespace otdro
