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

#include "otdro/svm_demo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "otdro/errors.hpp"
#include "otdro/lifting.hpp"
#include "otdro/rng.hpp"
#include "otdro/serialization.hpp"
#include "otdro/solvers.hpp"

namespace otdro {

namespace {

std::string fmt(const char* format, double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), format, x);
    return buffer;
}

std::string g17(double x) { return fmt("%.17g", x); }
std::string svg_num(double x) { return fmt("%.6f", x); }

struct Dataset {
    std::vector<double> beta_star;
    std::vector<Point> features;
    std::vector<double> labels;
};

Dataset draw_dataset(std::uint64_t seed, const SvmExperimentConfig& config) {
    Rng rng(seed);
    Dataset data;
    data.beta_star.resize(config.feature_dim);
    for (double& b : data.beta_star) b = rng.normal();
    data.features.resize(config.sample_count, Point(config.feature_dim, 0.0));
    for (Point& x : data.features)
        for (double& xj : x) xj = rng.normal();
    const double noise_sd = std::sqrt(config.noise_variance);
    data.labels.resize(config.sample_count);
    for (std::size_t i = 0; i < config.sample_count; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < config.feature_dim; ++j)
            inner += data.beta_star[j] * data.features[i][j];
        const double pseudo = inner >= 0.0 ? 1.0 : -1.0;
        data.labels[i] = pseudo + rng.normal(0.0, noise_sd) >= 0.0 ? 1.0 : -1.0;
    }
    return data;
}

bool one_class(const std::vector<double>& labels) {
    return std::all_of(labels.begin(), labels.end(),
                       [&](double y) { return y == labels.front(); }) ||
           labels.empty();
}

// Subgradient descent on the average hinge loss, fixed step 1/sqrt(t) from
// zero init; no regularization, raw data.
void train_svm(const Dataset& data, int steps, std::vector<double>& beta, double& bias) {
    const std::size_t d = data.features.front().size();
    const std::size_t n = data.features.size();
    beta.assign(d, 0.0);
    bias = 0.0;
    for (int t = 1; t <= steps; ++t) {
        std::vector<double> grad_beta(d, 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double margin = bias;
            for (std::size_t j = 0; j < d; ++j) margin += beta[j] * data.features[i][j];
            if (1.0 - data.labels[i] * margin > 0.0) {
                for (std::size_t j = 0; j < d; ++j)
                    grad_beta[j] -= data.labels[i] * data.features[i][j];
                grad_bias -= data.labels[i];
            }
        }
        const double step = 1.0 / std::sqrt(static_cast<double>(t));
        for (std::size_t j = 0; j < d; ++j) beta[j] -= step * grad_beta[j] / static_cast<double>(n);
        bias -= step * grad_bias / static_cast<double>(n);
    }
}

std::string csv_document(const SvmExperimentResult& result, const SvmRadiusResult& radius) {
    std::ostringstream out;
    out << "x1_star,x2_star,y,w_star\n";
    // one row per transport record: a sample whose worst case splits across
    // tied branches contributes one row per branch
    for (const TransportRecord& rec : radius.coupling.records) {
        out << g17(rec.perturbed_v[0]) << ',' << g17(rec.perturbed_v[1]) << ','
            << g17(result.labels[rec.atom]) << ',' << g17(rec.weight_multiplier) << '\n';
    }
    return out.str();
}

struct View {
    double x_min, x_max, y_min, y_max;
    static constexpr double kSize = 500.0, kMargin = 45.0;

    double sx(double x) const {
        return kMargin + (x - x_min) / (x_max - x_min) * (kSize - 2.0 * kMargin);
    }
    double sy(double y) const {
        return kSize - kMargin - (y - y_min) / (y_max - y_min) * (kSize - 2.0 * kMargin);
    }
};

View view_of(const std::vector<Point>& points) {
    View v{points[0][0], points[0][0], points[0][1], points[0][1]};
    for (const Point& p : points) {
        v.x_min = std::min(v.x_min, p[0]);
        v.x_max = std::max(v.x_max, p[0]);
        v.y_min = std::min(v.y_min, p[1]);
        v.y_max = std::max(v.y_max, p[1]);
    }
    const double pad_x = 0.1 * std::max(1e-9, v.x_max - v.x_min);
    const double pad_y = 0.1 * std::max(1e-9, v.y_max - v.y_min);
    v.x_min -= pad_x;
    v.x_max += pad_x;
    v.y_min -= pad_y;
    v.y_max += pad_y;
    return v;
}

void svg_open(std::ostringstream& out, const std::string& title) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" "
           "viewBox=\"0 0 500 500\">\n"
        << "  <title>" << title << "</title>\n"
        << "  <rect x=\"0\" y=\"0\" width=\"500\" height=\"500\" fill=\"white\"/>\n";
}

// Decision boundary beta.x + b = 0 clipped to the view rectangle.
void svg_boundary(std::ostringstream& out, const View& view, const std::vector<double>& beta,
                  double bias) {
    double x1a, y1a, x1b, y1b;
    if (std::abs(beta[1]) > 1e-12) {
        x1a = view.x_min;
        y1a = -(bias + beta[0] * x1a) / beta[1];
        x1b = view.x_max;
        y1b = -(bias + beta[0] * x1b) / beta[1];
    } else if (std::abs(beta[0]) > 1e-12) {
        x1a = x1b = -bias / beta[0];
        y1a = view.y_min;
        y1b = view.y_max;
    } else {
        return;
    }
    out << "  <line x1=\"" << svg_num(view.sx(x1a)) << "\" y1=\"" << svg_num(view.sy(y1a))
        << "\" x2=\"" << svg_num(view.sx(x1b)) << "\" y2=\"" << svg_num(view.sy(y1b))
        << "\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>\n";
}

std::string perturbed_svg(const SvmExperimentResult& result, const SvmRadiusResult& radius) {
    std::vector<Point> points;
    for (const TransportRecord& rec : radius.coupling.records)
        points.push_back({rec.perturbed_v[0], rec.perturbed_v[1]});
    const View view = view_of(points);
    std::ostringstream out;
    svg_open(out, "worst-case points, r = " + radius_tag(radius.radius).substr(1));
    svg_boundary(out, view, result.beta_hat, result.b_hat);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double label = result.labels[radius.coupling.records[i].atom];
        const char* fill = label > 0.0 ? "#d62728" : "#2ca02c";
        out << "  <circle cx=\"" << svg_num(view.sx(points[i][0])) << "\" cy=\""
            << svg_num(view.sy(points[i][1])) << "\" r=\"5\" fill=\"" << fill << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string weights_svg(const SvmExperimentResult& result, const SvmRadiusResult& radius) {
    const View view = view_of(result.features);
    // the multiplier is shared across a sample's split branches, so the last
    // record per atom carries the sample's weight
    std::vector<double> weight_of(result.features.size(), 1.0);
    double w_min = kInf, w_max = 0.0;
    for (const TransportRecord& rec : radius.coupling.records) {
        weight_of[rec.atom] = rec.weight_multiplier;
        w_min = std::min(w_min, rec.weight_multiplier);
        w_max = std::max(w_max, rec.weight_multiplier);
    }
    const double span = std::max(1e-12, w_max - w_min);
    std::ostringstream out;
    svg_open(out, "nominal weights, r = " + radius_tag(radius.radius).substr(1));
    svg_boundary(out, view, result.beta_hat, result.b_hat);
    for (std::size_t i = 0; i < result.features.size(); ++i) {
        const double t = (weight_of[i] - w_min) / span;
        // light gray (low weight) to dark red (high weight)
        const int red = static_cast<int>(230 - 60 * t);
        const int other = static_cast<int>(220 - 190 * t);
        out << "  <circle cx=\"" << svg_num(view.sx(result.features[i][0])) << "\" cy=\""
            << svg_num(view.sy(result.features[i][1])) << "\" r=\"5\" fill=\"rgb(" << red << ','
            << other << ',' << other << ")\"/>\n";
    }
    out << "  <text x=\"12\" y=\"20\" font-size=\"12\" fill=\"#333\">w range ["
        << svg_num(w_min) << ", " << svg_num(w_max) << "]</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string metadata_document(const SvmExperimentConfig& config,
                              const SvmExperimentResult& result) {
    nlohmann::ordered_json doc;
    doc["seed_requested"] = result.seed_requested;
    doc["seed_used"] = result.seed_used;
    doc["rejected_seeds"] = result.rejected_seeds;
    doc["sample_count"] = config.sample_count;
    doc["noise_variance"] = config.noise_variance;
    doc["theta1"] = config.theta1;
    doc["theta2"] = config.theta2;
    doc["beta_star"] = result.beta_star;
    doc["beta_hat"] = result.beta_hat;
    doc["b_hat"] = result.b_hat;
    doc["training"] = nlohmann::ordered_json{{"method", "subgradient-descent"},
                                             {"steps", config.training_steps},
                                             {"step_schedule", "1/sqrt(t)"},
                                             {"init", "zero"},
                                             {"regularization", "none"},
                                             {"standardized", false}};
    nlohmann::ordered_json radii = nlohmann::ordered_json::array();
    for (const SvmRadiusResult& r : result.per_radius)
        radii.push_back(nlohmann::ordered_json{{"radius", r.radius},
                                               {"objective", r.objective},
                                               {"lambda_star", r.coupling.certificate.lambda_star},
                                               {"mean_weight", r.coupling.mean_weight()}});
    doc["radii"] = std::move(radii);
    return doc.dump(2) + "\n";
}

} // namespace

std::string radius_tag(double radius) { return "r" + fmt("%g", radius); }

SvmExperimentResult run_svm_demo(const SvmExperimentConfig& config) {
    if (config.feature_dim != 2)
        throw InputError("svm-demo: the experiment is two-dimensional");
    if (config.sample_count < 2) throw InputError("svm-demo: need at least two samples");

    SvmExperimentResult result;
    result.seed_requested = config.seed;

    // Re-roll one-class draws with the next seed and record the substitution.
    std::uint64_t seed = config.seed;
    Dataset data = draw_dataset(seed, config);
    while (one_class(data.labels)) {
        result.rejected_seeds.push_back(seed);
        if (result.rejected_seeds.size() > 100)
            throw NumericalError("svm-demo: could not draw a two-class sample");
        ++seed;
        data = draw_dataset(seed, config);
    }
    result.seed_used = seed;
    result.beta_star = data.beta_star;
    result.features = data.features;
    result.labels = data.labels;

    train_svm(data, config.training_steps, result.beta_hat, result.b_hat);

    // Lifted outcome space (x1, x2, u): u is the absorbed bias coordinate,
    // guarded like a label so only the features can move.
    std::vector<Point> atoms(config.sample_count);
    std::vector<PiecewiseAffineLoss> losses;
    ValueDomain domain;
    domain.v_lower = {0.0, 0.0, 1.0};
    domain.v_upper = {0.0, 0.0, 1.0};
    for (std::size_t i = 0; i < config.sample_count; ++i) {
        atoms[i] = {data.features[i][0], data.features[i][1], 1.0};
        const double y = data.labels[i];
        losses.push_back(PiecewiseAffineLoss{
            {{{-y * result.beta_hat[0], -y * result.beta_hat[1], -y * result.b_hat}, 1.0},
             {{0.0, 0.0, 0.0}, 0.0}}});
        for (std::size_t j = 0; j < 2; ++j) {
            domain.v_lower[j] = std::min(domain.v_lower[j], atoms[i][j] - 5.0);
            domain.v_upper[j] = std::max(domain.v_upper[j], atoms[i][j] + 5.0);
        }
    }
    domain.w_max = static_cast<double>(config.sample_count);
    const DiscreteMeasure mu_hat = DiscreteMeasure::uniform(atoms);
    const GroundCost cost = GroundCost::squared_euclidean_label_guard({2});

    std::vector<double> radii = config.radii;
    for (double r : radii) {
        LiftedInstance instance = build_interpolated_per_atom(
            losses, cost, EntropyFunction::kullback_leibler(), mu_hat, r, config.theta1,
            config.theta2, domain);
        SvmRadiusResult rr;
        rr.radius = r;
        rr.coupling = solve_kl_interpolated(instance);
        rr.objective = rr.coupling.certificate.objective;
        result.per_radius.push_back(std::move(rr));
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        const std::string base = config.out_dir + "/";
        for (const SvmRadiusResult& rr : result.per_radius) {
            const std::string tag = radius_tag(rr.radius);
            write_file_atomic(base + "worst_case_" + tag + ".csv", csv_document(result, rr));
            write_file_atomic(base + "perturbed_points_" + tag + ".svg",
                              perturbed_svg(result, rr));
            write_file_atomic(base + "nominal_weights_" + tag + ".svg",
                              weights_svg(result, rr));
        }
        write_file_atomic(base + "run_metadata.json", metadata_document(config, result));
    }
    return result;
}

} // namespace otdro
