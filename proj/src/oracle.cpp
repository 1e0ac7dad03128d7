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

#include "otdro/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

#include "otdro/errors.hpp"
#include "otdro/extended.hpp"
#include "otdro/parallel.hpp"

namespace otdro {

// ---------------------------------------------------------------------------
// Lattice maximization

namespace {

constexpr std::size_t kMaxLatticePoints = 40'000'000;

struct Lattice {
    Point lower;
    std::vector<double> step;
    std::vector<std::size_t> counts; // points per axis
    std::size_t total = 1;

    Lattice(const Point& lo, const Point& hi, double resolution) {
        const std::size_t d = lo.size();
        lower = lo;
        step.resize(d);
        counts.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double span = hi[j] - lo[j];
            if (!(span >= 0.0)) throw InputError("grid_argmax: box has negative extent");
            const std::size_t segments =
                span > 0.0 ? static_cast<std::size_t>(std::ceil(span / resolution - 1e-9)) : 0;
            counts[j] = segments + 1;
            step[j] = segments > 0 ? span / static_cast<double>(segments) : 0.0;
            if (total > kMaxLatticePoints / counts[j])
                throw InputError("grid_argmax: lattice too large; coarsen the resolution");
            total *= counts[j];
        }
    }

    Point point(std::size_t flat) const {
        Point p(lower.size());
        for (std::size_t j = lower.size(); j-- > 0;) {
            const std::size_t k = flat % counts[j];
            flat /= counts[j];
            p[j] = lower[j] + static_cast<double>(k) * step[j];
        }
        return p;
    }
};

// One scan pass; merge keeps the larger value, ties keep the smaller index,
// so the parallel partition reproduces the serial scan exactly.
template <bool Parallel>
std::pair<std::size_t, double> scan_lattice(const std::function<double(const Point&)>& fn,
                                            const Lattice& lattice) {
    const std::size_t total = lattice.total;
    if constexpr (Parallel) {
        const std::size_t parts = static_cast<std::size_t>(std::max(1, thread_count() * 4));
        const std::size_t chunk = (total + parts - 1) / parts;
        std::vector<std::pair<std::size_t, double>> best(
            parts, {total, -kInf});
        parallel_for(parts, [&](std::size_t p) {
            const std::size_t begin = p * chunk;
            const std::size_t end = std::min(total, begin + chunk);
            std::size_t arg = total;
            double val = -kInf;
            for (std::size_t i = begin; i < end; ++i) {
                const double f = fn(lattice.point(i));
                if (f > val) {
                    val = f;
                    arg = i;
                }
            }
            best[p] = {arg, val};
        });
        std::size_t arg = total;
        double val = -kInf;
        for (const auto& [a, v] : best) {
            if (a == total) continue;
            if (v > val || (v == val && a < arg)) {
                val = v;
                arg = a;
            }
        }
        return {arg, val};
    } else {
        std::size_t arg = 0;
        double val = -kInf;
        for (std::size_t i = 0; i < total; ++i) {
            const double f = fn(lattice.point(i));
            if (f > val) {
                val = f;
                arg = i;
            }
        }
        return {arg, val};
    }
}

template <bool Parallel>
std::pair<Point, double> grid_argmax_impl(const std::function<double(const Point&)>& fn,
                                          const Point& lower, const Point& upper,
                                          double resolution) {
    if (lower.size() != upper.size() || lower.empty())
        throw InputError("grid_argmax: box bounds must be nonempty and consistent");
    if (!(resolution > 0.0)) throw InputError("grid_argmax: resolution must be positive");

    Point lo = lower, hi = upper;
    double res = resolution;
    Point best_point;
    double best_value = -kInf;
    for (int pass = 0; pass < 3; ++pass) {
        Lattice lattice(lo, hi, res);
        auto [arg, val] = scan_lattice<Parallel>(fn, lattice);
        Point p = lattice.point(arg);
        if (val > best_value) {
            best_value = val;
            best_point = p;
        }
        // Refine around the incumbent, clipped to the original box.
        for (std::size_t j = 0; j < lo.size(); ++j) {
            lo[j] = std::max(lower[j], best_point[j] - res);
            hi[j] = std::min(upper[j], best_point[j] + res);
        }
        res /= 10.0;
    }
    return {best_point, best_value};
}

} // namespace

std::pair<Point, double> grid_argmax(const std::function<double(const Point&)>& fn,
                                     const Point& lower, const Point& upper,
                                     double resolution) {
    return grid_argmax_impl<true>(fn, lower, upper, resolution);
}

std::pair<Point, double> grid_argmax_serial(const std::function<double(const Point&)>& fn,
                                            const Point& lower, const Point& upper,
                                            double resolution) {
    return grid_argmax_impl<false>(fn, lower, upper, resolution);
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex, Bland's rule

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kFeasEps = 1e-8;

struct Tableau {
    std::size_t rows = 0, cols = 0; // cols excludes the rhs
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<std::size_t> basis;
    std::vector<double> cost;   // current objective (minimization)
    std::vector<double> reduced;
    std::vector<char> allowed; // columns eligible to enter

    void pivot(std::size_t r, std::size_t c) {
        const double piv = a[r][c];
        for (std::size_t j = 0; j < cols; ++j) a[r][j] /= piv;
        b[r] /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const double f = a[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            a[i][c] = 0.0;
            b[i] -= f * b[r];
        }
        const double f = reduced[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j < cols; ++j) reduced[j] -= f * a[r][j];
            reduced[c] = 0.0;
        }
        basis[r] = c;
    }

    void recompute_reduced() {
        reduced = cost;
        for (std::size_t i = 0; i < rows; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) reduced[j] -= cb * a[i][j];
        }
        for (std::size_t i = 0; i < rows; ++i) reduced[basis[i]] = 0.0;
    }

    double basic_cost() const {
        double z = 0.0;
        for (std::size_t i = 0; i < rows; ++i) z += cost[basis[i]] * b[i];
        return z;
    }

    // Bland: entering = smallest eligible index with negative reduced cost;
    // leaving = min-ratio row, ties resolved to the smallest basic index.
    // Returns false at optimality; throws on unboundedness.
    bool step() {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (allowed[j] && reduced[j] < -kPivotEps) {
                enter = j;
                break;
            }
        }
        if (enter == cols) return false;
        std::size_t leave = rows;
        double best_ratio = kInf;
        for (std::size_t i = 0; i < rows; ++i) {
            if (a[i][enter] > kPivotEps) {
                const double ratio = b[i] / a[i][enter];
                if (leave == rows || ratio < best_ratio - 1e-12) {
                    best_ratio = ratio;
                    leave = i;
                } else if (ratio < best_ratio + 1e-12 && basis[i] < basis[leave]) {
                    leave = i;
                }
            }
        }
        if (leave == rows) throw UnboundedError("simplex: objective is unbounded");
        pivot(leave, enter);
        return true;
    }
};

} // namespace

LpResult simplex_solve(const std::vector<double>& c,
                       const std::vector<std::vector<double>>& a_eq,
                       const std::vector<double>& b_eq,
                       const std::vector<std::vector<double>>& a_ub,
                       const std::vector<double>& b_ub) {
    const std::size_t n = c.size();
    if (n == 0) throw InputError("simplex: empty variable set");
    if (n > 5000) throw InputError("simplex: more than 5000 variables; oracles are desk-scale");
    const std::size_t m_eq = a_eq.size(), m_ub = a_ub.size();
    const std::size_t m = m_eq + m_ub;

    Tableau t;
    t.rows = m;
    const std::size_t slack0 = n, art0 = n + m_ub;
    t.cols = n + m_ub + m; // original + slacks + one artificial per row
    t.a.assign(m, std::vector<double>(t.cols, 0.0));
    t.b.assign(m, 0.0);
    t.basis.assign(m, 0);
    t.allowed.assign(t.cols, 1);

    for (std::size_t i = 0; i < m; ++i) {
        const bool is_eq = i < m_eq;
        const std::vector<double>& row = is_eq ? a_eq[i] : a_ub[i - m_eq];
        if (row.size() != n) throw InputError("simplex: constraint row has wrong length");
        double rhs = is_eq ? b_eq[i] : b_ub[i - m_eq];
        double sign = 1.0;
        if (rhs < 0.0) {
            sign = -1.0;
            rhs = -rhs;
        }
        for (std::size_t j = 0; j < n; ++j) t.a[i][j] = sign * row[j];
        if (!is_eq) t.a[i][slack0 + (i - m_eq)] = sign;
        t.a[i][art0 + i] = 1.0;
        t.b[i] = rhs;
        t.basis[i] = art0 + i;
    }

    // Phase 1: minimize the artificial mass.
    t.cost.assign(t.cols, 0.0);
    for (std::size_t i = 0; i < m; ++i) t.cost[art0 + i] = 1.0;
    t.recompute_reduced();
    int pivots = 0;
    while (t.step())
        if (++pivots > 200000)
            throw NumericalError("simplex: phase 1 exceeded the pivot budget");
    if (t.basic_cost() > kFeasEps) return {LpStatus::Infeasible, 0.0, {}};

    // Remove artificials: pivot basic ones out where possible, drop their
    // columns from eligibility either way.
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis[i] < art0) continue;
        std::size_t col = t.cols;
        for (std::size_t j = 0; j < art0; ++j) {
            if (std::abs(t.a[i][j]) > kPivotEps) {
                col = j;
                break;
            }
        }
        if (col != t.cols) t.pivot(i, col);
        // Redundant rows keep a zero-level artificial pinned in the basis.
    }
    for (std::size_t j = art0; j < t.cols; ++j) t.allowed[j] = 0;

    // Phase 2: minimize -c (i.e. maximize c).
    t.cost.assign(t.cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) t.cost[j] = -c[j];
    t.recompute_reduced();
    try {
        pivots = 0;
        while (t.step())
            if (++pivots > 200000)
                throw NumericalError("simplex: phase 2 exceeded the pivot budget");
    } catch (const UnboundedError&) {
        return {LpStatus::Unbounded, kInf, {}};
    }

    LpResult result;
    result.status = LpStatus::Optimal;
    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] < n) result.x[t.basis[i]] = t.b[i];
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += c[j] * result.x[j];
    result.objective = obj;
    return result;
}

// ---------------------------------------------------------------------------
// Coupling grid LP

CouplingGrid make_coupling_grid(const LiftedInstance& instance, double v_step, double w_step,
                                double w_max, const std::vector<Point>& extra_v,
                                const std::vector<double>& extra_w) {
    if (!(v_step > 0.0) || !(w_step > 0.0))
        throw InputError("coupling grid: steps must be positive");
    CouplingGrid grid;

    std::set<Point> vset;
    for (std::size_t i = 0; i < instance.atom_count(); ++i) vset.insert(instance.v_part(i));
    for (const Point& v : extra_v) {
        if (v.size() != instance.v_dim())
            throw InputError("coupling grid: extra v point has wrong dimension");
        vset.insert(v);
    }
    if (instance.value_domain.has_box() &&
        instance.value_domain.v_lower.size() == instance.v_dim()) {
        const ValueDomain& vd = instance.value_domain;
        std::vector<std::size_t> counts(vd.v_lower.size());
        std::size_t total = 1;
        for (std::size_t j = 0; j < vd.v_lower.size(); ++j) {
            const double span = vd.v_upper[j] - vd.v_lower[j];
            counts[j] = span > 0.0
                            ? static_cast<std::size_t>(std::floor(span / v_step + 1e-9)) + 1
                            : 1;
            total *= counts[j];
            if (total > 200000)
                throw InputError("coupling grid: lattice too large; increase --v-step");
        }
        for (std::size_t flat = 0; flat < total; ++flat) {
            Point p(vd.v_lower.size());
            std::size_t rem = flat;
            for (std::size_t j = vd.v_lower.size(); j-- > 0;) {
                const std::size_t k = rem % counts[j];
                rem /= counts[j];
                p[j] = vd.v_lower[j] + static_cast<double>(k) * v_step;
            }
            vset.insert(p);
        }
    }
    grid.v_points.assign(vset.begin(), vset.end());

    double cap = w_max;
    if (cap <= 0.0) cap = instance.value_domain.w_max;
    if (cap <= 0.0) cap = static_cast<double>(instance.atom_count());
    cap = std::max(cap, static_cast<double>(instance.atom_count()));
    std::set<double> wset;
    for (double w = 0.0; w <= cap + 1e-12; w += w_step) wset.insert(w);
    wset.insert(1.0);
    wset.insert(cap);
    for (double w : extra_w) {
        if (!(w >= 0.0)) throw InputError("coupling grid: w points must be nonnegative");
        wset.insert(w);
    }
    grid.w_points.assign(wset.begin(), wset.end());
    return grid;
}

LpPrimalResult lp_primal(const LiftedInstance& instance, const CouplingGrid& grid) {
    const std::size_t n_atoms = instance.atom_count();
    const std::size_t nv = grid.v_points.size(), nw = grid.w_points.size();

    // Variables: finite-cost triples only.
    struct Var {
        std::size_t atom, vi, wi;
        double cost, value;
    };
    std::vector<Var> vars;
    std::vector<std::size_t> per_atom(n_atoms, 0);
    for (std::size_t i = 0; i < n_atoms; ++i) {
        const Point v_hat = instance.v_part(i);
        const double w_hat = instance.w_part(i);
        for (std::size_t j = 0; j < nv; ++j) {
            for (std::size_t l = 0; l < nw; ++l) {
                const double c =
                    instance.cost(grid.v_points[j], grid.w_points[l], v_hat, w_hat);
                if (!is_finite(c)) continue;
                const double f = instance.objective_value(i, grid.v_points[j], grid.w_points[l]);
                vars.push_back({i, j, l, c, f});
                ++per_atom[i];
            }
        }
    }
    for (std::size_t i = 0; i < n_atoms; ++i)
        if (per_atom[i] == 0 && instance.nominal.weight(i) > 0.0)
            throw InfeasibleError("lp_primal: a nominal atom has no finite-cost grid pair");
    if (vars.empty()) throw InfeasibleError("lp_primal: all grid costs are infinite");

    const auto cells = instance.conditioning_cells();
    std::vector<std::size_t> cell_of(n_atoms, 0);
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t i : cells[c]) cell_of[i] = c;

    const std::size_t moment_rows = instance.sigma_field == SigmaField::Trivial
                                        ? 1
                                        : cells.size();
    std::vector<std::vector<double>> a_eq(n_atoms + moment_rows,
                                          std::vector<double>(vars.size(), 0.0));
    std::vector<double> b_eq(n_atoms + moment_rows, 0.0);
    std::vector<std::vector<double>> a_ub(1, std::vector<double>(vars.size(), 0.0));
    std::vector<double> b_ub(1, instance.radius);
    std::vector<double> objective(vars.size(), 0.0);

    for (std::size_t k = 0; k < vars.size(); ++k) {
        const Var& var = vars[k];
        a_eq[var.atom][k] = 1.0;
        const double w = grid.w_points[var.wi];
        if (instance.sigma_field == SigmaField::Trivial) {
            a_eq[n_atoms][k] = w;
        } else {
            a_eq[n_atoms + cell_of[var.atom]][k] = w - 1.0;
        }
        a_ub[0][k] = var.cost;
        objective[k] = var.value;
    }
    for (std::size_t i = 0; i < n_atoms; ++i) b_eq[i] = instance.nominal.weight(i);
    if (instance.sigma_field == SigmaField::Trivial) b_eq[n_atoms] = 1.0;

    const LpResult lp = simplex_solve(objective, a_eq, b_eq, a_ub, b_ub);
    if (lp.status == LpStatus::Infeasible)
        throw InfeasibleError("lp_primal: grid problem is infeasible");
    if (lp.status == LpStatus::Unbounded)
        throw UnboundedError("lp_primal: grid problem is unbounded");

    LpPrimalResult result;
    result.value = lp.objective;
    for (std::size_t k = 0; k < vars.size(); ++k)
        if (lp.x[k] > 1e-12)
            result.coupling.emplace_back(vars[k].atom, vars[k].vi, vars[k].wi, lp.x[k]);
    return result;
}

std::vector<double> lp_primal_trace(const LiftedInstance& instance, double v_step, int levels,
                                    double w_step, double w_max,
                                    const std::vector<Point>& extra_v,
                                    const std::vector<double>& extra_w) {
    std::vector<double> trace;
    double step = v_step;
    for (int level = 0; level < levels; ++level) {
        trace.push_back(
            lp_primal(instance, make_coupling_grid(instance, step, w_step, w_max, extra_v,
                                                   extra_w))
                .value);
        step /= 2.0;
    }
    return trace;
}

// ---------------------------------------------------------------------------
// KL-DRO bisection

namespace {

// g(lam) = lam r + lam log sum q_i exp(l_i / lam), evaluated stably around
// the maximal loss; returns both the value and the analytic derivative.
struct KlDual {
    const std::vector<double>& losses;
    const std::vector<double>& weights;
    double r;
    double max_loss;

    double derivative(double lam) const {
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < losses.size(); ++i) {
            const double e = weights[i] * std::exp((losses[i] - max_loss) / lam);
            s0 += e;
            s1 += e * losses[i];
        }
        return r + std::log(s0) + (max_loss - s1 / s0) / lam;
    }

    double value(double lam) const {
        double s0 = 0.0;
        for (std::size_t i = 0; i < losses.size(); ++i)
            s0 += weights[i] * std::exp((losses[i] - max_loss) / lam);
        return lam * r + max_loss + lam * std::log(s0);
    }
};

} // namespace

KlDroResult kl_dro_bisection(const std::vector<double>& losses,
                             const std::vector<double>& weights, double radius) {
    if (losses.empty() || losses.size() != weights.size())
        throw InputError("kl_dro_bisection: losses and weights must match and be nonempty");
    if (!(radius > 0.0)) throw InputError("kl_dro_bisection: radius must be positive");

    const double max_loss = *std::max_element(losses.begin(), losses.end());
    double argmax_mass = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i)
        if (losses[i] == max_loss) argmax_mass += weights[i];

    KlDroResult result;
    // Concentrating on the argmax costs log(1/mass); beyond that the ball
    // contains the point mass and the value saturates at max l.
    if (radius + std::log(argmax_mass) >= 0.0) {
        result.value = max_loss;
        result.lambda = 0.0;
        result.saturated = true;
        result.worst_weights.assign(losses.size(), 0.0);
        for (std::size_t i = 0; i < losses.size(); ++i)
            if (losses[i] == max_loss) result.worst_weights[i] = weights[i] / argmax_mass;
        return result;
    }

    const KlDual dual{losses, weights, radius, max_loss};
    double lo = 1.0, hi = 1.0;
    while (dual.derivative(lo) > 0.0 && lo > 1e-12) lo /= 4.0;
    while (dual.derivative(hi) < 0.0 && hi < 1e12) hi *= 4.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dual.derivative(mid) < 0.0) lo = mid; else hi = mid;
    }
    const double lam = 0.5 * (lo + hi);

    result.value = dual.value(lam);
    result.lambda = lam;
    result.worst_weights.resize(losses.size());
    double total = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        result.worst_weights[i] = weights[i] * std::exp((losses[i] - max_loss) / lam);
        total += result.worst_weights[i];
    }
    for (double& w : result.worst_weights) w /= total;
    return result;
}

// ---------------------------------------------------------------------------
// Entropic mirror ascent

namespace {

double kl_to_kernel(const std::vector<double>& q, const std::vector<double>& kappa) {
    double kl = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j)
        if (q[j] > 0.0) kl += q[j] * std::log(q[j] / kappa[j]);
    return kl;
}

// Exponentiated-gradient ascent for max_q sum q l - m KL(q || kappa), run in
// the log domain with step 0.5/m (a contraction toward the optimizer).
std::vector<double> eg_inner(const std::vector<double>& kappa, const std::vector<double>& l,
                             double m) {
    const std::size_t k = kappa.size();
    std::vector<double> logq(k, -kInf);
    for (std::size_t j = 0; j < k; ++j)
        if (kappa[j] > 0.0) logq[j] = std::log(kappa[j]);
    if (m < 1e-12) {
        // Degenerate multiplier: the ascent concentrates on the argmax of l
        // over the kernel support.
        double best = -kInf;
        std::size_t arg = k;
        for (std::size_t j = 0; j < k; ++j)
            if (kappa[j] > 0.0 && l[j] > best) {
                best = l[j];
                arg = j;
            }
        std::vector<double> q(k, 0.0);
        if (arg < k) q[arg] = 1.0;
        return q;
    }
    for (int it = 0; it < 300; ++it) {
        double shift = -kInf;
        std::vector<double> next(k, -kInf);
        double delta = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (kappa[j] <= 0.0) continue;
            // log q+ = log q + eta (l - m (log(q/kappa) + 1)), eta = 0.5/m
            next[j] = 0.5 * logq[j] + 0.5 * std::log(kappa[j]) + 0.5 * l[j] / m - 0.5;
            shift = std::max(shift, next[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            if (kappa[j] > 0.0) total += std::exp(next[j] - shift);
        const double log_total = shift + std::log(total);
        for (std::size_t j = 0; j < k; ++j) {
            if (kappa[j] <= 0.0) continue;
            next[j] -= log_total;
            delta = std::max(delta, std::abs(next[j] - logq[j]));
            logq[j] = next[j];
        }
        if (delta < 1e-15) break;
    }
    std::vector<double> q(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        if (kappa[j] > 0.0) q[j] = std::exp(logq[j]);
    return q;
}

} // namespace

MirrorAscentResult mirror_ascent_kl_ball(const DiscreteMeasure& kernel_row,
                                         const std::vector<double>& losses, double budget) {
    if (losses.size() != kernel_row.size())
        throw InputError("mirror_ascent_kl_ball: losses and kernel sizes differ");
    if (!(budget >= 0.0)) throw InputError("mirror_ascent_kl_ball: budget must be nonnegative");
    const std::vector<double>& kappa = kernel_row.weights();

    auto value_of = [&](const std::vector<double>& q) {
        double v = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) v += q[j] * losses[j];
        return v;
    };

    if (budget == 0.0) return {value_of(kappa), kappa};

    const double m_min = 1e-10, m_max = 1e12;
    std::vector<double> q = eg_inner(kappa, losses, m_min);
    if (kl_to_kernel(q, kappa) <= budget) return {value_of(q), q};

    double lo = m_min, hi = 1.0;
    while (kl_to_kernel(eg_inner(kappa, losses, hi), kappa) > budget && hi < m_max) hi *= 4.0;
    MirrorAscentResult best{value_of(kappa), kappa}; // feasible fallback
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        q = eg_inner(kappa, losses, mid);
        if (kl_to_kernel(q, kappa) > budget) {
            lo = mid;
        } else {
            hi = mid;
            const double v = value_of(q);
            if (v >= best.value) best = {v, q};
        }
    }
    return best;
}

double mirror_ascent_sinkhorn_primal(const SinkhornLiftData& data,
                                     const std::vector<std::vector<double>>& cell_losses) {
    const std::size_t cells = data.kernel_rows.size();
    if (cell_losses.size() != cells)
        throw InputError("mirror_ascent_sinkhorn_primal: cell count mismatch");
    const double budget = data.adjusted_radius;
    if (budget < 0.0)
        throw InfeasibleError("mirror_ascent_sinkhorn_primal: negative adjusted radius");
    const double eps = data.reg_epsilon;

    auto solve_at = [&](double m, double& spent) {
        double value = 0.0;
        spent = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            const std::vector<double>& kappa = data.kernel_rows[c].weights();
            const std::vector<double> q = eg_inner(kappa, cell_losses[c], m * eps);
            double v = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) v += q[j] * cell_losses[c][j];
            value += data.cell_weights[c] * v;
            spent += eps * data.cell_weights[c] * kl_to_kernel(q, kappa);
        }
        return value;
    };

    double spent = 0.0;
    if (budget == 0.0) {
        double value = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            double v = 0.0;
            for (std::size_t j = 0; j < data.kernel_rows[c].size(); ++j)
                v += data.kernel_rows[c].weight(j) * cell_losses[c][j];
            value += data.cell_weights[c] * v;
        }
        return value;
    }

    const double m_min = 1e-10, m_max = 1e12;
    double value = solve_at(m_min, spent);
    if (spent <= budget) return value;
    double lo = m_min, hi = 1.0;
    value = solve_at(hi, spent);
    while (spent > budget && hi < m_max) {
        hi *= 4.0;
        value = solve_at(hi, spent);
    }
    double best = value; // hi side is feasible
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        value = solve_at(mid, spent);
        if (spent > budget) {
            lo = mid;
        } else {
            hi = mid;
            best = std::max(best, value);
        }
    }
    return best;
}

} // namespace otdro
