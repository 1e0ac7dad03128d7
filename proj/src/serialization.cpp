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

#include "otdro/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "otdro/errors.hpp"

namespace otdro {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Every JSON failure (malformed text, wrong types, missing keys) surfaces as
// an input error so the CLI exits with the input-error code.
template <typename Fn>
auto guard_json(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

// Strict field policy: every present key must be known, every listed key
// must be present (unless optional).
void expect_fields(const json& j, const std::vector<std::string>& required,
                   const std::vector<std::string>& optional = {}) {
    if (!j.is_object()) throw InputError("document: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        const bool known =
            std::find(required.begin(), required.end(), key) != required.end() ||
            std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known) throw InputError("document: unknown field '" + key + "'");
    }
    for (const std::string& key : required)
        if (!j.contains(key)) throw InputError("document: missing field '" + key + "'");
}

void expect_version(const json& j) {
    if (j.at("version").get<int>() != 1)
        throw InputError("document: unsupported version");
}

ordered_json measure_node(const DiscreteMeasure& measure) {
    return ordered_json{{"atoms", measure.atoms()}, {"weights", measure.weights()}};
}

DiscreteMeasure measure_from_node(const json& j) {
    expect_fields(j, {"atoms", "weights"});
    return DiscreteMeasure(j.at("atoms").get<std::vector<Point>>(),
                           j.at("weights").get<std::vector<double>>());
}

ordered_json loss_node(const PiecewiseAffineLoss& loss) {
    ordered_json pieces = ordered_json::array();
    for (const AffinePiece& p : loss.pieces())
        pieces.push_back(ordered_json{{"a", p.a}, {"b", p.b}});
    return ordered_json{{"pieces", std::move(pieces)}};
}

PiecewiseAffineLoss loss_from_node(const json& j) {
    expect_fields(j, {"pieces"});
    std::vector<AffinePiece> pieces;
    for (const auto& p : j.at("pieces")) {
        expect_fields(p, {"a", "b"});
        pieces.push_back({p.at("a").get<Point>(), p.at("b").get<double>()});
    }
    return PiecewiseAffineLoss(std::move(pieces));
}

ordered_json ground_cost_node(const GroundCost& cost) {
    ordered_json params = ordered_json::object();
    if (cost.kind() == GroundCost::Kind::PNorm) {
        // JSON has no infinity literal; the max-norm exponent travels as "inf"
        if (std::isinf(cost.p()))
            params["p"] = "inf";
        else
            params["p"] = cost.p();
    }
    if (cost.kind() == GroundCost::Kind::SquaredEuclideanLabelGuard)
        params["guarded"] = cost.guarded();
    return ordered_json{{"kind", cost.kind_name()}, {"params", std::move(params)}};
}

GroundCost ground_cost_from_node(const json& j) {
    expect_fields(j, {"kind", "params"});
    const std::string kind = j.at("kind").get<std::string>();
    const json& params = j.at("params");
    if (kind == "p-norm") {
        expect_fields(params, {"p"});
        if (params.at("p").is_string()) {
            if (params.at("p").get<std::string>() != "inf")
                throw InputError("cost: p must be a number or \"inf\"");
            return GroundCost::p_norm(std::numeric_limits<double>::infinity());
        }
        return GroundCost::p_norm(params.at("p").get<double>());
    }
    if (kind == "squared-euclidean") {
        expect_fields(params, {});
        return GroundCost::squared_euclidean();
    }
    if (kind == "squared-euclidean-with-label-guard") {
        expect_fields(params, {"guarded"});
        return GroundCost::squared_euclidean_label_guard(
            params.at("guarded").get<std::vector<std::size_t>>());
    }
    throw InputError("cost: unknown kind '" + kind + "'");
}

ordered_json phi_node(const EntropyFunction& phi) {
    ordered_json node{{"name", phi.name()}};
    if (phi.has_parameter()) node["parameter"] = phi.parameter();
    return node;
}

EntropyFunction phi_from_node(const json& j) {
    expect_fields(j, {"name"}, {"parameter"});
    return EntropyFunction::from_name(j.at("name").get<std::string>(),
                                      j.value("parameter", 0.0));
}

std::string sigma_name(SigmaField sigma) {
    return sigma == SigmaField::Trivial ? "trivial" : "condition-on-nominal-atom";
}

SigmaField sigma_from_name(const std::string& name) {
    if (name == "trivial") return SigmaField::Trivial;
    if (name == "condition-on-nominal-atom") return SigmaField::ConditionOnNominalAtom;
    throw InputError("sigma_field: unknown kind '" + name + "'");
}

ordered_json value_domain_node(const ValueDomain& vd) {
    return ordered_json{
        {"v_lower", vd.v_lower}, {"v_upper", vd.v_upper}, {"w_max", vd.w_max}};
}

ValueDomain value_domain_from_node(const json& j) {
    expect_fields(j, {"v_lower", "v_upper", "w_max"});
    ValueDomain vd;
    vd.v_lower = j.at("v_lower").get<std::vector<double>>();
    vd.v_upper = j.at("v_upper").get<std::vector<double>>();
    vd.w_max = j.at("w_max").get<double>();
    return vd;
}

} // namespace

std::string measure_to_json(const DiscreteMeasure& measure) {
    ordered_json doc = measure_node(measure);
    return doc.dump(2) + "\n";
}

DiscreteMeasure measure_from_json(const std::string& text) {
    return guard_json("measure", [&] { return measure_from_node(json::parse(text)); });
}

std::string instance_to_json(const ClassicInstance& instance) {
    ordered_json doc;
    doc["version"] = 1;
    doc["loss"] = loss_node(instance.loss);
    doc["cost"] = ground_cost_node(instance.cost);
    doc["nominal"] = measure_node(instance.nominal);
    doc["sigma_field"] = sigma_name(instance.sigma_field);
    doc["radius"] = instance.radius;
    doc["value_domain"] = value_domain_node(instance.value_domain);
    return doc.dump(2) + "\n";
}

ClassicInstance instance_from_json(const std::string& text) {
    return guard_json("instance", [&] {
    const json doc = json::parse(text);
    expect_fields(doc,
                  {"version", "loss", "cost", "nominal", "sigma_field", "radius",
                   "value_domain"});
    expect_version(doc);
    ClassicInstance instance{loss_from_node(doc.at("loss")),
                             ground_cost_from_node(doc.at("cost")),
                             measure_from_node(doc.at("nominal")),
                             sigma_from_name(doc.at("sigma_field").get<std::string>()),
                             doc.at("radius").get<double>(),
                             value_domain_from_node(doc.at("value_domain"))};
    if (!(instance.radius >= 0.0)) throw InputError("instance: radius must be nonnegative");
    return instance;
    });
}

namespace {

ordered_json lifted_cost_node(const LiftedCost& cost) {
    ordered_json node{{"kind", cost.kind_name()}};
    switch (cost.kind()) {
    case LiftedCost::Kind::WassersteinWeightGuard:
        node["ground_cost"] = ground_cost_node(cost.ground());
        break;
    case LiftedCost::Kind::PhiIdentityGuard:
        node["phi"] = phi_node(cost.phi());
        node["mix_epsilon"] = cost.mix_epsilon();
        node["data_atoms"] = cost.data_atoms();
        node["worst_atom"] = cost.worst_atom();
        break;
    case LiftedCost::Kind::SinkhornKlIncrement:
        node["reg_epsilon"] = cost.reg_epsilon();
        break;
    case LiftedCost::Kind::Interpolated:
        node["ground_cost"] = ground_cost_node(cost.ground());
        node["phi"] = phi_node(cost.phi());
        node["theta1"] = cost.theta1();
        node["theta2"] = cost.theta2();
        break;
    }
    return node;
}

LiftedCost lifted_cost_from_node(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "wasserstein-weight-guard") {
        expect_fields(j, {"kind", "ground_cost"});
        return LiftedCost::wasserstein(ground_cost_from_node(j.at("ground_cost")));
    }
    if (kind == "phi-identity-guard") {
        expect_fields(j, {"kind", "phi", "mix_epsilon", "data_atoms", "worst_atom"});
        return LiftedCost::phi_identity_guard(
            phi_from_node(j.at("phi")), j.at("mix_epsilon").get<double>(),
            j.at("data_atoms").get<std::vector<Point>>(), j.at("worst_atom").get<Point>());
    }
    if (kind == "sinkhorn-kl-increment") {
        expect_fields(j, {"kind", "reg_epsilon"});
        return LiftedCost::sinkhorn_increment(j.at("reg_epsilon").get<double>());
    }
    if (kind == "interpolated") {
        expect_fields(j, {"kind", "ground_cost", "phi", "theta1", "theta2"});
        return LiftedCost::interpolated(ground_cost_from_node(j.at("ground_cost")),
                                        phi_from_node(j.at("phi")),
                                        j.at("theta1").get<double>(),
                                        j.at("theta2").get<double>());
    }
    throw InputError("lifted_cost: unknown kind '" + kind + "'");
}

ordered_json sinkhorn_node(const SinkhornLiftData& data) {
    ordered_json rows = ordered_json::array();
    for (const DiscreteMeasure& row : data.kernel_rows) rows.push_back(measure_node(row));
    return ordered_json{{"reference", measure_node(data.reference)},
                        {"reg_epsilon", data.reg_epsilon},
                        {"cell_atoms", data.cell_atoms},
                        {"cell_weights", data.cell_weights},
                        {"kernel_rows", std::move(rows)},
                        {"log_normalizers", data.log_normalizers},
                        {"adjusted_radius", data.adjusted_radius}};
}

SinkhornLiftData sinkhorn_from_node(const json& j) {
    expect_fields(j, {"reference", "reg_epsilon", "cell_atoms", "cell_weights", "kernel_rows",
                      "log_normalizers", "adjusted_radius"});
    SinkhornLiftData data{measure_from_node(j.at("reference")),
                          j.at("reg_epsilon").get<double>(),
                          j.at("cell_atoms").get<std::vector<Point>>(),
                          j.at("cell_weights").get<std::vector<double>>(),
                          {},
                          j.at("log_normalizers").get<std::vector<double>>(),
                          j.at("adjusted_radius").get<double>()};
    for (const auto& row : j.at("kernel_rows")) data.kernel_rows.push_back(measure_from_node(row));
    return data;
}

} // namespace

std::string lifted_to_json(const LiftedInstance& instance, const SinkhornLiftData* sinkhorn) {
    ordered_json doc;
    doc["version"] = 1;
    ordered_json losses = ordered_json::array();
    for (const PiecewiseAffineLoss& loss : instance.losses) losses.push_back(loss_node(loss));
    doc["losses"] = std::move(losses);
    doc["loss_dim"] = instance.loss_dim;
    doc["lifted_cost"] = lifted_cost_node(instance.cost);
    doc["nominal"] = measure_node(instance.nominal);
    doc["sigma_field"] = sigma_name(instance.sigma_field);
    doc["radius"] = instance.radius;
    doc["value_domain"] = value_domain_node(instance.value_domain);
    doc["condition_offset"] = instance.condition_offset;
    doc["domain_is_box"] = instance.domain_is_box;
    if (sinkhorn != nullptr) doc["sinkhorn"] = sinkhorn_node(*sinkhorn);
    return doc.dump(2) + "\n";
}

LoadedLifted lifted_from_json(const std::string& text) {
    return guard_json("lifted instance", [&] {
    const json doc = json::parse(text);
    expect_fields(doc,
                  {"version", "losses", "loss_dim", "lifted_cost", "nominal", "sigma_field",
                   "radius", "value_domain", "condition_offset", "domain_is_box"},
                  {"sinkhorn"});
    expect_version(doc);
    std::vector<PiecewiseAffineLoss> losses;
    for (const auto& l : doc.at("losses")) losses.push_back(loss_from_node(l));
    LiftedInstance instance(std::move(losses), doc.at("loss_dim").get<std::size_t>(),
                            lifted_cost_from_node(doc.at("lifted_cost")),
                            measure_from_node(doc.at("nominal")),
                            sigma_from_name(doc.at("sigma_field").get<std::string>()),
                            doc.at("radius").get<double>(),
                            value_domain_from_node(doc.at("value_domain")));
    instance.condition_offset = doc.at("condition_offset").get<std::size_t>();
    instance.domain_is_box = doc.at("domain_is_box").get<bool>();
    LoadedLifted loaded{std::move(instance), std::nullopt};
    if (doc.contains("sinkhorn")) loaded.sinkhorn = sinkhorn_from_node(doc.at("sinkhorn"));
    return loaded;
    });
}

std::string result_to_json(const WorstCaseCoupling& coupling) {
    const DualCertificate& cert = coupling.certificate;
    ordered_json records = ordered_json::array();
    for (const TransportRecord& rec : coupling.records)
        records.push_back(ordered_json{{"atom", rec.atom},
                                       {"nominal", rec.nominal_v},
                                       {"perturbed", rec.perturbed_v},
                                       {"weight", rec.weight_multiplier},
                                       {"mass", rec.mass}});
    ordered_json doc;
    doc["objective"] = cert.objective;
    doc["lambda_star"] = cert.lambda_star;
    doc["alpha_star"] = cert.alpha_star;
    doc["records"] = std::move(records);
    doc["diagnostics"] = ordered_json{{"iterations", cert.iterations},
                                      {"tolerance_achieved", cert.tolerance_achieved},
                                      {"converged", cert.converged},
                                      {"primal_value", coupling.primal_value},
                                      {"duality_gap", coupling.duality_gap()},
                                      {"weak_duality_ok", coupling.weak_duality_ok()},
                                      {"mean_weight", coupling.mean_weight()},
                                      {"note", cert.note}};
    return doc.dump(2) + "\n";
}

std::string oracle_report_to_json(double value, std::optional<double> gap_vs_dual,
                                  const std::vector<double>& grid_trace) {
    ordered_json doc;
    doc["value"] = value;
    if (gap_vs_dual)
        doc["gap_vs_dual"] = *gap_vs_dual;
    else
        doc["gap_vs_dual"] = nullptr;
    doc["grid_trace"] = grid_trace;
    return doc.dump(2) + "\n";
}

DualCertificate certificate_from_result_json(const std::string& text) {
    return guard_json("result", [&] {
    const json doc = json::parse(text);
    DualCertificate cert;
    cert.objective = doc.at("objective").get<double>();
    cert.lambda_star = doc.at("lambda_star").get<double>();
    cert.alpha_star = doc.at("alpha_star").get<std::vector<double>>();
    const json& diag = doc.at("diagnostics");
    cert.iterations = diag.at("iterations").get<int>();
    cert.tolerance_achieved = diag.at("tolerance_achieved").get<double>();
    cert.converged = diag.at("converged").get<bool>();
    cert.note = diag.at("note").get<std::string>();
    return cert;
    });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write file: " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw InputError("cannot move " + tmp + " into place");
}

} // namespace otdro
