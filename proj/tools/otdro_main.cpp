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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "otdro/conic.hpp"
#include "otdro/divergence.hpp"
#include "otdro/errors.hpp"
#include "otdro/lifting.hpp"
#include "otdro/oracle.hpp"
#include "otdro/serialization.hpp"
#include "otdro/solvers.hpp"
#include "otdro/svm_demo.hpp"

namespace {

using namespace otdro;

bool verbose() {
    const char* log = std::getenv("OTDRO_LOG");
    return log != nullptr && log[0] != '\0';
}

void log_line(const std::string& line) {
    if (verbose()) std::cerr << "[otdro] " << line << "\n";
}

struct LiftArgs {
    std::string family, in, out, phi_name = "kullback-leibler", reference;
    double phi_param = 0.0, mix_epsilon = 1e-3, reg_epsilon = 1.0;
    double theta1 = 1.0, theta2 = 1.0;
    std::optional<double> radius;
};

int run_lift(const LiftArgs& args) {
    ClassicInstance classic = instance_from_json(read_file(args.in));
    if (args.radius) classic.radius = *args.radius;
    log_line("lift family=" + args.family + " n=" + std::to_string(classic.nominal.size()));
    std::string document;
    if (args.family == "wasserstein") {
        document = lifted_to_json(lift_wasserstein(classic.loss, classic.cost, classic.nominal,
                                                   classic.radius, classic.value_domain));
    } else if (args.family == "phi") {
        const EntropyFunction phi = EntropyFunction::from_name(args.phi_name, args.phi_param);
        document = lifted_to_json(lift_phi_divergence(classic.loss, phi, classic.nominal,
                                                      classic.radius, args.mix_epsilon,
                                                      std::nullopt, classic.value_domain));
    } else if (args.family == "sinkhorn") {
        if (args.reference.empty())
            throw InputError("lift --family sinkhorn needs --reference ref.json");
        const DiscreteMeasure reference = measure_from_json(read_file(args.reference));
        auto [instance, data] =
            lift_sinkhorn(classic.loss, classic.cost, classic.nominal, classic.radius,
                          args.reg_epsilon, reference, classic.value_domain);
        document = lifted_to_json(instance, &data);
    } else if (args.family == "interpolated") {
        const EntropyFunction phi = EntropyFunction::from_name(args.phi_name, args.phi_param);
        document =
            lifted_to_json(build_interpolated(classic.loss, classic.cost, phi, classic.nominal,
                                              classic.radius, args.theta1, args.theta2,
                                              classic.value_domain));
    } else {
        throw InputError("lift: unknown family '" + args.family + "'");
    }
    write_file_atomic(args.out, document);
    std::cout << "lifted instance written to " << args.out << "\n";
    return 0;
}

struct SolveArgs {
    std::string in, out, method = "kl";
    double tol = 1e-8;
};

int run_solve(const SolveArgs& args) {
    LoadedLifted loaded = lifted_from_json(read_file(args.in));
    SolveOptions options;
    options.tol = args.tol;
    log_line("solve method=" + args.method);
    WorstCaseCoupling coupling;
    if (args.method == "sinkhorn" && loaded.sinkhorn) {
        coupling = solve_sinkhorn(*loaded.sinkhorn, loaded.instance.losses.front(), options);
    } else {
        coupling = solve_instance(loaded.instance, args.method, options);
    }
    if (!args.out.empty()) write_file_atomic(args.out, result_to_json(coupling));
    const DualCertificate& cert = coupling.certificate;
    std::cout << "objective " << cert.objective << "  lambda_star " << cert.lambda_star
              << "  primal " << coupling.primal_value << "\n";
    if (!coupling.weak_duality_ok()) {
        std::cout << "weak-duality check FAILED (gap " << -coupling.duality_gap() << ")\n";
        throw NumericalError("solve: primal value exceeds the dual objective");
    }
    std::cout << (cert.converged ? "converged" : "finished with warnings: " + cert.note)
              << "\n";
    return 0;
}

struct OracleArgs {
    std::string in, out;
    double v_step = 0.25, w_max = -1.0;
    int levels = 3;
};

int run_oracle(const OracleArgs& args) {
    LoadedLifted loaded = lifted_from_json(read_file(args.in));
    const LiftedInstance& instance = loaded.instance;
    log_line("oracle v_step=" + std::to_string(args.v_step));

    // Solve the matching dual first: its objective anchors the gap, and its
    // reported maximizers and weight multipliers join the grid so the LP can
    // represent the dual's candidate coupling exactly.
    std::optional<WorstCaseCoupling> dual;
    switch (instance.cost.kind()) {
    case LiftedCost::Kind::Interpolated:
        dual = solve_kl_interpolated(instance);
        break;
    case LiftedCost::Kind::WassersteinWeightGuard:
        dual = solve_wasserstein(instance);
        break;
    case LiftedCost::Kind::SinkhornKlIncrement:
        dual = solve_instance(instance, "sinkhorn");
        break;
    case LiftedCost::Kind::PhiIdentityGuard:
        break; // certified against the direct primal oracles instead
    }
    std::vector<Point> extra_v;
    std::vector<double> extra_w;
    if (dual) {
        for (const TransportRecord& rec : dual->records) {
            extra_v.push_back(rec.perturbed_v);
            extra_w.push_back(rec.weight_multiplier);
        }
    }
    const std::vector<double> trace = lp_primal_trace(instance, args.v_step, args.levels,
                                                      0.25, args.w_max, extra_v, extra_w);
    const double value = trace.back();
    std::optional<double> gap;
    if (dual) gap = dual->certificate.objective - value;
    const std::string report = oracle_report_to_json(value, gap, trace);
    if (!args.out.empty()) write_file_atomic(args.out, report);
    std::cout << report;
    return 0;
}

struct EmitConicArgs {
    std::string in, out, verify;
};

int run_emit_conic(const EmitConicArgs& args) {
    LoadedLifted loaded = lifted_from_json(read_file(args.in));
    const ConicProgram program = build_conic(loaded.instance);
    write_file_atomic(args.out, serialize_conic(program));
    std::cout << "conic program written to " << args.out << "\n";
    if (!args.verify.empty()) {
        const DualCertificate cert = certificate_from_result_json(read_file(args.verify));
        const VerificationReport report = verify_certificate(program, cert, loaded.instance);
        if (report.skipped) {
            std::cout << "verification skipped: " << report.note << "\n";
        } else if (report.clean()) {
            std::cout << "certificate satisfies all " << "constraints (max violation "
                      << report.max_violation << ")\n";
        } else {
            std::cout << report.violations.size() << " constraint violations, max "
                      << report.max_violation << "\n";
            for (const Violation& v : report.violations)
                std::cout << "  " << v.label << ": " << v.amount << "\n";
            throw NumericalError("emit-conic: certificate verification failed");
        }
    }
    return 0;
}

struct SvmArgs {
    std::uint64_t seed = 0;
    std::string out;
    std::vector<double> radii;
    double theta1 = 1.0, theta2 = 1.0;
};

int run_svm_demo_cmd(const SvmArgs& args) {
    SvmExperimentConfig config;
    config.seed = args.seed;
    config.out_dir = args.out;
    config.theta1 = args.theta1;
    config.theta2 = args.theta2;
    if (!args.radii.empty()) config.radii = args.radii;
    const SvmExperimentResult result = run_svm_demo(config);
    std::cout << "seed " << result.seed_used << "  beta_hat [" << result.beta_hat[0] << ", "
              << result.beta_hat[1] << "]  b_hat " << result.b_hat << "\n";
    for (const SvmRadiusResult& rr : result.per_radius)
        std::cout << "r = " << rr.radius << "  worst-case risk " << rr.objective
                  << "  mean w " << rr.coupling.mean_weight() << "\n";
    if (!args.out.empty()) std::cout << "artifacts written to " << args.out << "\n";
    return 0;
}

struct DivergenceArgs {
    std::string phi_name, mu, mu_hat;
    double phi_param = 0.0;
};

int run_divergence(const DivergenceArgs& args) {
    const EntropyFunction phi = EntropyFunction::from_name(args.phi_name, args.phi_param);
    const DiscreteMeasure mu = measure_from_json(read_file(args.mu));
    const DiscreteMeasure mu_hat = measure_from_json(read_file(args.mu_hat));
    const auto [on_support, off_support] = divergence_decomposed(phi, mu, mu_hat);
    std::cout << "D_phi(mu, mu_hat) = " << generalized_divergence(phi, mu, mu_hat) << "\n"
              << "  on-support term  = " << on_support << "\n"
              << "  off-support term = " << off_support << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case risk over optimal-transport ambiguity sets: lifts, dual solvers, "
                 "coupling oracles, and exponential-cone program emission"};
    app.require_subcommand(1);

    LiftArgs lift_args;
    CLI::App* lift = app.add_subcommand("lift", "Lift a classic instance to the unified form");
    lift->add_option("--family", lift_args.family, "wasserstein|phi|sinkhorn|interpolated")
        ->required();
    lift->add_option("--in", lift_args.in, "classic instance JSON")->required();
    lift->add_option("--out", lift_args.out, "lifted instance JSON")->required();
    lift->add_option("--phi", lift_args.phi_name, "entropy function name");
    lift->add_option("--phi-param", lift_args.phi_param, "order n / theta where applicable");
    lift->add_option("--mix-epsilon", lift_args.mix_epsilon, "phi-lift mixing weight");
    lift->add_option("--reg-epsilon", lift_args.reg_epsilon, "sinkhorn regularization");
    lift->add_option("--theta1", lift_args.theta1, "transport weight");
    lift->add_option("--theta2", lift_args.theta2, "reweighting weight");
    lift->add_option("--reference", lift_args.reference, "sinkhorn reference measure JSON");
    double radius_override = -1.0;
    CLI::Option* radius_opt =
        lift->add_option("--radius", radius_override, "override the instance radius");

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Run a dual reformulation solver");
    solve->add_option("--in", solve_args.in, "lifted instance JSON")->required();
    solve->add_option("--method", solve_args.method, "kl|general-phi|sinkhorn|wasserstein");
    solve->add_option("--tol", solve_args.tol, "solver tolerance");
    solve->add_option("--out", solve_args.out, "result JSON");

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "Certify by the coupling-grid LP");
    oracle->add_option("--in", oracle_args.in, "lifted instance JSON")->required();
    oracle->add_option("--v-step", oracle_args.v_step, "outcome lattice step");
    oracle->add_option("--w-max", oracle_args.w_max, "weight grid upper end");
    oracle->add_option("--levels", oracle_args.levels, "refinement levels");
    oracle->add_option("--out", oracle_args.out, "oracle report JSON");

    EmitConicArgs conic_args;
    CLI::App* emit = app.add_subcommand("emit-conic", "Emit the exponential-cone program");
    emit->add_option("--in", conic_args.in, "lifted instance JSON")->required();
    emit->add_option("--out", conic_args.out, "conic program JSON")->required();
    emit->add_option("--verify", conic_args.verify, "result JSON to check against the program");

    SvmArgs svm_args;
    CLI::App* svm = app.add_subcommand("svm-demo", "Worst-case distribution experiment");
    svm->add_option("--seed", svm_args.seed, "generator seed");
    svm->add_option("--out", svm_args.out, "output directory");
    svm->add_option("--radius", svm_args.radii, "radii to sweep (repeatable)");
    svm->add_option("--theta1", svm_args.theta1, "transport weight");
    svm->add_option("--theta2", svm_args.theta2, "reweighting weight");

    DivergenceArgs div_args;
    CLI::App* divergence = app.add_subcommand("divergence", "Evaluate a generalized divergence");
    divergence->add_option("--phi", div_args.phi_name, "entropy function name")->required();
    divergence->add_option("--phi-param", div_args.phi_param, "order n / theta");
    divergence->add_option("--mu", div_args.mu, "measure JSON")->required();
    divergence->add_option("--mu-hat", div_args.mu_hat, "nominal measure JSON")->required();

    try {
        app.parse(argc, argv);
        if (lift->parsed()) {
            if (radius_opt->count() > 0) lift_args.radius = radius_override;
            return run_lift(lift_args);
        }
        if (solve->parsed()) return run_solve(solve_args);
        if (oracle->parsed()) return run_oracle(oracle_args);
        if (emit->parsed()) return run_emit_conic(conic_args);
        if (svm->parsed()) return run_svm_demo_cmd(svm_args);
        if (divergence->parsed()) return run_divergence(div_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const UnboundedError& e) {
        std::cerr << "unbounded: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
