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
#include <string>
#include <utility>
#include <vector>

#include "otdro/instance.hpp"

namespace otdro {

/// Sparse affine expression sum_k coef_k x[idx_k] + constant.
struct AffineExpr {
    std::vector<std::pair<std::size_t, double>> terms;
    double constant = 0.0;

    double eval(const std::vector<double>& x) const {
        double v = constant;
        for (const auto& [idx, coef] : terms) v += coef * x[idx];
        return v;
    }
    bool operator==(const AffineExpr&) const = default;
};

struct VariableBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
    bool operator==(const VariableBlock&) const = default;
};

/// expr <= 0 (or == 0).
struct LinearConstraint {
    AffineExpr expr;
    bool equality = false;
    std::string label;
    bool operator==(const LinearConstraint&) const = default;
};

/// (x1, x2, x3) in K_exp = {x1 >= x2 exp(x3/x2), x2 > 0} plus the closure
/// slice {x2 = 0, x1 >= 0, x3 <= 0}.
struct ExpConeConstraint {
    AffineExpr x1, x2, x3;
    std::string label;
    bool operator==(const ExpConeConstraint&) const = default;
};

struct NonnegConstraint {
    std::size_t var = 0;
    std::string label;
    bool operator==(const NonnegConstraint&) const = default;
};

/// || vector ||_q <= bound.
struct NormBoundConstraint {
    std::vector<AffineExpr> vec;
    double q = 2.0;
    AffineExpr bound;
    std::string label;
    bool operator==(const NormBoundConstraint&) const = default;
};

/// constant + coefficient / lambda <= x[p] — the quadratic-cost majorization
/// row a_k' vhat_i + b_k + ||a_k||^2 / (4 lambda theta1) <= p_i, kept in the
/// 1/lambda form rather than splitting it into a rotated cone.
struct QuadraticOffsetConstraint {
    double constant = 0.0;
    double coefficient = 0.0;
    std::size_t lambda_var = 0;
    std::size_t p_var = 0;
    std::string label;
    bool operator==(const QuadraticOffsetConstraint&) const = default;
};

/**
 * The finite exponential-cone program of the interpolated-KL dual:
 *
 *   min  lambda r + t
 *   s.t. (eta_i, lambda theta2, p_i - t) in K_exp      for every atom
 *        majorization rows bounding the envelope by p_i  (per atom, piece)
 *        ||xi_ik||_q <= lambda theta1                     (norm cost)
 *        a_k' vhat_i + b_k + ||a_k||^2/(4 lambda theta1) <= p_i  (quadratic)
 *        sum_i nuhat_i eta_i <= lambda theta2
 *        lambda, eta >= 0.
 *
 * Emitted for external cone solvers; nothing here solves it. Validation goes
 * through verify_certificate with multipliers from the interpolated-KL dual.
 */
struct ConicProgram {
    std::vector<VariableBlock> blocks;
    AffineExpr objective; // minimized
    std::vector<ExpConeConstraint> exp_cones;
    std::vector<LinearConstraint> majorization;
    std::vector<LinearConstraint> links;   // xi - omega = -a rows (box domain)
    std::vector<LinearConstraint> supports; // sigma_V epigraph rows (box domain)
    std::vector<NormBoundConstraint> norm_bounds;
    std::vector<QuadraticOffsetConstraint> quadratic_offsets;
    LinearConstraint aggregate;
    std::vector<NonnegConstraint> nonneg;

    std::string cost_kind; // "p-norm" | "quadratic"
    std::string domain;    // "full-space" | "box"
    double radius = 0.0, theta1 = 1.0, theta2 = 1.0;
    std::size_t atom_count = 0;
    std::vector<std::size_t> piece_counts;
    std::string note;

    std::size_t var_count() const {
        return blocks.empty() ? 0 : blocks.back().offset + blocks.back().size;
    }
    const VariableBlock& block(const std::string& name) const;

    bool operator==(const ConicProgram&) const = default;
};

/// Builds the cone program from an interpolated-KL instance (p-norm cost
/// over full space or a box; quadratic cost over full space).
ConicProgram build_conic(const LiftedInstance& instance);

struct Violation {
    std::string label;
    double amount = 0.0;
};

struct VerificationReport {
    bool skipped = false;
    std::string note;
    std::vector<Violation> violations;
    double max_violation = 0.0;
    double objective_difference = 0.0;

    bool clean() const { return !skipped && violations.empty(); }
};

/**
 * Reconstructs the conic point implied by an interpolated-KL certificate
 * (t* = objective - lambda* r, p_i the envelope values, eta_i on the cone
 * boundary) and checks every constraint at the given absolute tolerance.
 * Violations are reported, never thrown; r = 0 instances are skipped with a
 * boundary-case note since lambda* degenerates there.
 */
VerificationReport verify_certificate(const ConicProgram& program,
                                      const DualCertificate& certificate,
                                      const LiftedInstance& instance, double tol = 1e-7);

/// Distance-to-membership of a point against K_exp (0 when inside); both
/// definition branches are implemented exactly.
double exp_cone_violation(double x1, double x2, double x3);

/// Deterministic JSON document (blocks in declaration order, rows by family
/// then atom then piece). Two builds of one instance serialize bytewise
/// identically.
std::string serialize_conic(const ConicProgram& program);

/// Inverse of serialize_conic.
ConicProgram parse_conic(const std::string& document);

} // namespace otdro
