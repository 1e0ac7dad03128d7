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

#include <cstdint>
#include <string>
#include <vector>

#include "otdro/instance.hpp"

namespace otdro {

/**
 * Worst-case-distribution experiment for a linear SVM: draw a planted
 * separator and Gaussian features, label with a small flip noise, train an
 * empirical SVM by subgradient descent, then sweep radii of the
 * interpolated ambiguity set (phi = KL, theta1 = theta2 = 1, squared cost
 * with the label/bias coordinates guarded) and extract worst-case couplings.
 * Everything is driven by the in-repo splitmix64 generator, so outputs are
 * byte-identical per seed.
 */
struct SvmExperimentConfig {
    std::size_t sample_count = 32;
    std::size_t feature_dim = 2;
    double noise_variance = 1e-4;
    std::vector<double> radii = {0.0, 0.1, 0.2, 0.5};
    double theta1 = 1.0;
    double theta2 = 1.0;
    std::uint64_t seed = 0;
    std::string out_dir; // empty: compute only, write nothing
    int training_steps = 10000;
};

struct SvmRadiusResult {
    double radius = 0.0;
    double objective = 0.0;
    WorstCaseCoupling coupling;
};

struct SvmExperimentResult {
    std::uint64_t seed_requested = 0;
    std::uint64_t seed_used = 0;
    std::vector<std::uint64_t> rejected_seeds; // one-class draws that were re-rolled
    std::vector<double> beta_star;
    std::vector<Point> features;
    std::vector<double> labels; // +1 / -1
    std::vector<double> beta_hat;
    double b_hat = 0.0;
    std::vector<SvmRadiusResult> per_radius;
};

SvmExperimentResult run_svm_demo(const SvmExperimentConfig& config);

/// File name stem for a radius, shared by the CSV/SVG writers and the tests.
std::string radius_tag(double radius);

} // namespace otdro
