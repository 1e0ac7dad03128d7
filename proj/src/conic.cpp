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

#include "otdro/conic.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "otdro/dtransform.hpp"
#include "otdro/errors.hpp"
#include "otdro/extended.hpp"

namespace otdro {

using ordered_json = nlohmann::ordered_json;

const VariableBlock& ConicProgram::block(const std::string& name) const {
    for (const VariableBlock& b : blocks)
        if (b.name == name) return b;
    throw InputError("conic program: no variable block named " + name);
}

namespace {

std::string tag(const char* family, std::size_t i) {
    return std::string(family) + "[" + std::to_string(i) + "]";
}

std::string tag(const char* family, std::size_t i, std::size_t k) {
    return std::string(family) + "[" + std::to_string(i) + "," + std::to_string(k) + "]";
}

std::string tag(const char* family, std::size_t i, std::size_t k, std::size_t j) {
    return std::string(family) + "[" + std::to_string(i) + "," + std::to_string(k) + "," +
           std::to_string(j) + "]";
}

} // namespace

ConicProgram build_conic(const LiftedInstance& instance) {
    if (instance.cost.kind() != LiftedCost::Kind::Interpolated)
        throw InputError("build_conic: instance does not carry an interpolated cost");
    if (instance.cost.phi().kind() != EntropyFunction::Kind::KullbackLeibler)
        throw InputError("build_conic: entropy must be kullback-leibler");
    const GroundCost& ground = instance.cost.ground();
    const bool quadratic = ground.is_quadratic();
    const bool box = instance.domain_is_box;
    if (box && !instance.value_domain.has_box())
        throw InputError("build_conic: box domain requested without box bounds");
    if (box && quadratic)
        throw InputError("build_conic: unsupported domain (the quadratic-cost reduction "
                         "needs the full space)");

    const std::size_t n = instance.atom_count();
    const std::size_t d = instance.v_dim();
    const double th1 = instance.cost.theta1(), th2 = instance.cost.theta2();

    ConicProgram prog;
    prog.cost_kind = quadratic ? "quadratic" : "p-norm";
    prog.domain = box ? "box" : "full-space";
    prog.radius = instance.radius;
    prog.theta1 = th1;
    prog.theta2 = th2;
    prog.atom_count = n;
    for (std::size_t i = 0; i < n; ++i)
        prog.piece_counts.push_back(instance.loss_for(i).piece_count());
    if (!box)
        prog.note = "full-space domain: sigma_V vanishes only at omega = 0, so the "
                    "xi/omega blocks are eliminated (xi_ik = -a_k)";

    std::size_t total_pieces = 0;
    for (std::size_t kcount : prog.piece_counts) total_pieces += kcount;

    // Variable layout: lambda, t, eta, p [, xi, omega, s for box-norm].
    std::size_t offset = 0;
    auto add_block = [&](const std::string& name, std::size_t size) {
        prog.blocks.push_back({name, offset, size});
        offset += size;
        return prog.blocks.back().offset;
    };
    const std::size_t lambda = add_block("lambda", 1);
    const std::size_t t_var = add_block("t", 1);
    const std::size_t eta0 = add_block("eta", n);
    const std::size_t p0 = add_block("p", n);
    std::size_t xi0 = 0, omega0 = 0, s0 = 0;
    if (box && !quadratic) {
        xi0 = add_block("xi", total_pieces * d);
        omega0 = add_block("omega", total_pieces * d);
        s0 = add_block("s", total_pieces * d);
    }

    prog.objective = {{{lambda, instance.radius}, {t_var, 1.0}}, 0.0};

    for (std::size_t i = 0; i < n; ++i) {
        ExpConeConstraint cone;
        cone.x1 = {{{eta0 + i, 1.0}}, 0.0};
        cone.x2 = {{{lambda, th2}}, 0.0};
        cone.x3 = {{{p0 + i, 1.0}, {t_var, -1.0}}, 0.0};
        cone.label = tag("exp-cone", i);
        prog.exp_cones.push_back(std::move(cone));
    }

    std::size_t piece_base = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const PiecewiseAffineLoss& loss = instance.loss_for(i);
        const Point v_hat = instance.v_part(i);
        for (std::size_t k = 0; k < loss.piece_count(); ++k) {
            const AffinePiece& piece = loss.piece(k);
            if (quadratic) {
                double sq = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    if (!ground.is_guarded(j)) sq += piece.a[j] * piece.a[j];
                double base = piece.b;
                for (std::size_t j = 0; j < d; ++j) base += piece.a[j] * v_hat[j];
                prog.quadratic_offsets.push_back(
                    {base, sq / (4.0 * th1), lambda, p0 + i, tag("majorization", i, k)});
            } else if (!box) {
                AffineExpr row;
                row.constant = piece.b;
                for (std::size_t j = 0; j < d; ++j) row.constant += piece.a[j] * v_hat[j];
                row.terms.push_back({p0 + i, -1.0});
                prog.majorization.push_back({std::move(row), false, tag("majorization", i, k)});

                NormBoundConstraint nb;
                for (std::size_t j = 0; j < d; ++j) nb.vec.push_back({{}, -piece.a[j]});
                nb.q = ground.dual_exponent();
                nb.bound = {{{lambda, th1}}, 0.0};
                nb.label = tag("norm-bound", i, k);
                prog.norm_bounds.push_back(std::move(nb));
            } else {
                const std::size_t block = (piece_base + k) * d;
                // (-l_k)* is finite only at xi - omega = -a_k.
                for (std::size_t j = 0; j < d; ++j) {
                    prog.links.push_back({{{{xi0 + block + j, 1.0}, {omega0 + block + j, -1.0}},
                                           piece.a[j]},
                                          true,
                                          tag("link", i, k, j)});
                    prog.supports.push_back(
                        {{{{omega0 + block + j, instance.value_domain.v_lower[j]},
                           {s0 + block + j, -1.0}},
                          0.0},
                         false,
                         tag("support-lower", i, k, j)});
                    prog.supports.push_back(
                        {{{{omega0 + block + j, instance.value_domain.v_upper[j]},
                           {s0 + block + j, -1.0}},
                          0.0},
                         false,
                         tag("support-upper", i, k, j)});
                }
                AffineExpr row;
                row.constant = piece.b;
                for (std::size_t j = 0; j < d; ++j) {
                    row.terms.push_back({s0 + block + j, 1.0});
                    row.terms.push_back({xi0 + block + j, -v_hat[j]});
                }
                row.terms.push_back({p0 + i, -1.0});
                prog.majorization.push_back({std::move(row), false, tag("majorization", i, k)});

                NormBoundConstraint nb;
                for (std::size_t j = 0; j < d; ++j)
                    nb.vec.push_back({{{xi0 + block + j, 1.0}}, 0.0});
                nb.q = ground.dual_exponent();
                nb.bound = {{{lambda, th1}}, 0.0};
                nb.label = tag("norm-bound", i, k);
                prog.norm_bounds.push_back(std::move(nb));
            }
        }
        piece_base += loss.piece_count();
    }

    AffineExpr agg;
    for (std::size_t i = 0; i < n; ++i)
        agg.terms.push_back({eta0 + i, instance.nominal.weight(i)});
    agg.terms.push_back({lambda, -th2});
    prog.aggregate = {std::move(agg), false, "aggregate"};

    prog.nonneg.push_back({lambda, "nonneg[lambda]"});
    for (std::size_t i = 0; i < n; ++i) prog.nonneg.push_back({eta0 + i, tag("nonneg-eta", i)});
    return prog;
}

double exp_cone_violation(double x1, double x2, double x3) {
    if (x2 > 0.0) {
        const double ratio = x3 / x2;
        if (ratio > 700.0) return kInf; // e^ratio overflows any feasible x1
        return std::max(0.0, x2 * std::exp(ratio) - x1);
    }
    if (x2 == 0.0) return std::max(0.0, -x1) + std::max(0.0, x3);
    return -x2;
}

namespace {

double q_norm(const std::vector<double>& v, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    if (q == 1.0) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), q);
    return std::pow(s, 1.0 / q);
}

} // namespace

VerificationReport verify_certificate(const ConicProgram& program,
                                      const DualCertificate& certificate,
                                      const LiftedInstance& instance, double tol) {
    VerificationReport report;
    if (instance.radius == 0.0) {
        report.skipped = true;
        report.note = "zero-radius instance: the multiplier degenerates, outside the "
                      "conic model's interior";
        return report;
    }

    const double lam = certificate.lambda_star;
    const double th1 = program.theta1, th2 = program.theta2;
    const double t_star = certificate.objective - lam * program.radius;

    std::vector<double> x(program.var_count(), 0.0);
    x[program.block("lambda").offset] = lam;
    x[program.block("t").offset] = t_star;

    const auto envelopes = d_transform_batch(instance, lam * th1);
    const std::size_t p0 = program.block("p").offset;
    const std::size_t eta0 = program.block("eta").offset;
    for (std::size_t i = 0; i < program.atom_count; ++i) {
        if (!is_finite(envelopes[i].value)) {
            report.violations.push_back({tag("envelope", i), kInf});
            continue;
        }
        x[p0 + i] = envelopes[i].value;
        x[eta0 + i] = lam * th2 * std::exp((envelopes[i].value - t_star) / (lam * th2));
    }

    // Box-domain builds carry xi/omega/s blocks; omega = 0 and s = 0 with
    // xi = -a_k is feasible for them.
    if (program.domain == "box" && program.cost_kind == "p-norm") {
        const std::size_t xi0 = program.block("xi").offset;
        const std::size_t d = instance.v_dim();
        std::size_t piece_base = 0;
        for (std::size_t i = 0; i < program.atom_count; ++i) {
            const PiecewiseAffineLoss& loss = instance.loss_for(i);
            for (std::size_t k = 0; k < loss.piece_count(); ++k)
                for (std::size_t j = 0; j < d; ++j)
                    x[xi0 + (piece_base + k) * d + j] = -loss.piece(k).a[j];
            piece_base += loss.piece_count();
        }
    }

    auto check_linear = [&](const LinearConstraint& row) {
        const double value = row.expr.eval(x);
        const double amount = row.equality ? std::abs(value) : std::max(0.0, value);
        if (amount > tol) report.violations.push_back({row.label, amount});
        report.max_violation = std::max(report.max_violation, amount);
    };

    for (const ExpConeConstraint& cone : program.exp_cones) {
        const double amount =
            exp_cone_violation(cone.x1.eval(x), cone.x2.eval(x), cone.x3.eval(x));
        if (amount > tol) report.violations.push_back({cone.label, amount});
        report.max_violation = std::max(report.max_violation, amount);
    }
    for (const LinearConstraint& row : program.majorization) check_linear(row);
    for (const LinearConstraint& row : program.links) check_linear(row);
    for (const LinearConstraint& row : program.supports) check_linear(row);
    for (const NormBoundConstraint& nb : program.norm_bounds) {
        std::vector<double> vec(nb.vec.size());
        for (std::size_t j = 0; j < nb.vec.size(); ++j) vec[j] = nb.vec[j].eval(x);
        const double amount = std::max(0.0, q_norm(vec, nb.q) - nb.bound.eval(x));
        if (amount > tol) report.violations.push_back({nb.label, amount});
        report.max_violation = std::max(report.max_violation, amount);
    }
    for (const QuadraticOffsetConstraint& qo : program.quadratic_offsets) {
        const double lhs =
            qo.constant + (qo.coefficient == 0.0 ? 0.0 : qo.coefficient / x[qo.lambda_var]);
        const double amount = std::max(0.0, lhs - x[qo.p_var]);
        if (amount > tol) report.violations.push_back({qo.label, amount});
        report.max_violation = std::max(report.max_violation, amount);
    }
    check_linear(program.aggregate);
    for (const NonnegConstraint& nn : program.nonneg) {
        const double amount = std::max(0.0, -x[nn.var]);
        if (amount > tol) report.violations.push_back({nn.label, amount});
        report.max_violation = std::max(report.max_violation, amount);
    }

    report.objective_difference =
        std::abs(program.objective.eval(x) - certificate.objective);
    if (report.objective_difference > tol)
        report.violations.push_back({"objective", report.objective_difference});
    return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json expr_to_json(const AffineExpr& expr) {
    ordered_json terms = ordered_json::array();
    for (const auto& [idx, coef] : expr.terms)
        terms.push_back(ordered_json::array({idx, coef}));
    return ordered_json{{"terms", std::move(terms)}, {"constant", expr.constant}};
}

AffineExpr expr_from_json(const nlohmann::json& j) {
    AffineExpr expr;
    for (const auto& term : j.at("terms"))
        expr.terms.push_back({term.at(0).get<std::size_t>(), term.at(1).get<double>()});
    expr.constant = j.at("constant").get<double>();
    return expr;
}

ordered_json linear_to_json(const LinearConstraint& row) {
    return ordered_json{{"type", row.equality ? "linear-equality" : "linear-inequality"},
                        {"label", row.label},
                        {"expr", expr_to_json(row.expr)}};
}

LinearConstraint linear_from_json(const nlohmann::json& j) {
    return {expr_from_json(j.at("expr")), j.at("type") == "linear-equality",
            j.at("label").get<std::string>()};
}

} // namespace

std::string serialize_conic(const ConicProgram& program) {
    ordered_json doc;
    doc["format"] = "otdro-conic";
    doc["version"] = 1;
    doc["metadata"] = ordered_json{{"cost_kind", program.cost_kind},
                                   {"domain", program.domain},
                                   {"radius", program.radius},
                                   {"theta1", program.theta1},
                                   {"theta2", program.theta2},
                                   {"atoms", program.atom_count},
                                   {"piece_counts", program.piece_counts},
                                   {"note", program.note}};
    ordered_json blocks = ordered_json::array();
    for (const VariableBlock& b : program.blocks)
        blocks.push_back(ordered_json{{"name", b.name}, {"offset", b.offset}, {"size", b.size}});
    doc["variables"] = std::move(blocks);
    doc["objective"] = expr_to_json(program.objective);

    ordered_json constraints = ordered_json::array();
    for (const ExpConeConstraint& cone : program.exp_cones)
        constraints.push_back(ordered_json{{"type", "exponential-cone"},
                                           {"label", cone.label},
                                           {"x1", expr_to_json(cone.x1)},
                                           {"x2", expr_to_json(cone.x2)},
                                           {"x3", expr_to_json(cone.x3)}});
    for (const LinearConstraint& row : program.majorization)
        constraints.push_back(linear_to_json(row));
    for (const LinearConstraint& row : program.links) constraints.push_back(linear_to_json(row));
    for (const LinearConstraint& row : program.supports)
        constraints.push_back(linear_to_json(row));
    for (const NormBoundConstraint& nb : program.norm_bounds) {
        ordered_json vec = ordered_json::array();
        for (const AffineExpr& e : nb.vec) vec.push_back(expr_to_json(e));
        constraints.push_back(ordered_json{{"type", "q-norm-bound"},
                                           {"label", nb.label},
                                           {"q", nb.q},
                                           {"vector", std::move(vec)},
                                           {"bound", expr_to_json(nb.bound)}});
    }
    for (const QuadraticOffsetConstraint& qo : program.quadratic_offsets)
        constraints.push_back(ordered_json{{"type", "quadratic-offset"},
                                           {"label", qo.label},
                                           {"constant", qo.constant},
                                           {"coefficient", qo.coefficient},
                                           {"lambda", qo.lambda_var},
                                           {"p", qo.p_var}});
    constraints.push_back(linear_to_json(program.aggregate));
    for (const NonnegConstraint& nn : program.nonneg)
        constraints.push_back(ordered_json{{"type", "nonnegative-orthant"},
                                           {"label", nn.label},
                                           {"var", nn.var}});
    doc["constraints"] = std::move(constraints);
    return doc.dump(2) + "\n";
}

ConicProgram parse_conic(const std::string& document) {
    const nlohmann::json doc = nlohmann::json::parse(document);
    if (doc.at("format") != "otdro-conic" || doc.at("version") != 1)
        throw InputError("parse_conic: unrecognized document format");
    ConicProgram prog;
    const auto& meta = doc.at("metadata");
    prog.cost_kind = meta.at("cost_kind").get<std::string>();
    prog.domain = meta.at("domain").get<std::string>();
    prog.radius = meta.at("radius").get<double>();
    prog.theta1 = meta.at("theta1").get<double>();
    prog.theta2 = meta.at("theta2").get<double>();
    prog.atom_count = meta.at("atoms").get<std::size_t>();
    prog.piece_counts = meta.at("piece_counts").get<std::vector<std::size_t>>();
    prog.note = meta.at("note").get<std::string>();
    for (const auto& b : doc.at("variables"))
        prog.blocks.push_back({b.at("name").get<std::string>(),
                               b.at("offset").get<std::size_t>(),
                               b.at("size").get<std::size_t>()});
    prog.objective = expr_from_json(doc.at("objective"));
    for (const auto& c : doc.at("constraints")) {
        const std::string type = c.at("type").get<std::string>();
        const std::string label = c.at("label").get<std::string>();
        if (type == "exponential-cone") {
            prog.exp_cones.push_back({expr_from_json(c.at("x1")), expr_from_json(c.at("x2")),
                                      expr_from_json(c.at("x3")), label});
        } else if (type == "linear-inequality" || type == "linear-equality") {
            LinearConstraint row = linear_from_json(c);
            if (label == "aggregate") {
                prog.aggregate = std::move(row);
            } else if (label.rfind("link", 0) == 0) {
                prog.links.push_back(std::move(row));
            } else if (label.rfind("support", 0) == 0) {
                prog.supports.push_back(std::move(row));
            } else {
                prog.majorization.push_back(std::move(row));
            }
        } else if (type == "q-norm-bound") {
            NormBoundConstraint nb;
            nb.label = label;
            nb.q = c.at("q").get<double>();
            for (const auto& e : c.at("vector")) nb.vec.push_back(expr_from_json(e));
            nb.bound = expr_from_json(c.at("bound"));
            prog.norm_bounds.push_back(std::move(nb));
        } else if (type == "quadratic-offset") {
            prog.quadratic_offsets.push_back({c.at("constant").get<double>(),
                                              c.at("coefficient").get<double>(),
                                              c.at("lambda").get<std::size_t>(),
                                              c.at("p").get<std::size_t>(), label});
        } else if (type == "nonnegative-orthant") {
            prog.nonneg.push_back({c.at("var").get<std::size_t>(), label});
        } else {
            throw InputError("parse_conic: unknown constraint type " + type);
        }
    }
    return prog;
}

} // namespace otdro
