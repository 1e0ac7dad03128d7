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

#include <optional>
#include <string>
#include <vector>

#include "otdro/instance.hpp"

namespace otdro {

/**
 * A classic (unlifted) problem: loss, ground distance, nominal measure on Z,
 * radius, and the grid bounds. This is what `otdro lift` consumes.
 */
struct ClassicInstance {
    PiecewiseAffineLoss loss;
    GroundCost cost;
    DiscreteMeasure nominal;
    SigmaField sigma_field = SigmaField::Trivial;
    double radius = 0.0;
    ValueDomain value_domain;
};

// All documents are versioned JSON. Field names are part of the contract:
// unknown fields are rejected, not ignored. Emission uses insertion-ordered
// keys so identical inputs serialize bytewise identically.

std::string measure_to_json(const DiscreteMeasure& measure);
DiscreteMeasure measure_from_json(const std::string& text);

std::string instance_to_json(const ClassicInstance& instance);
ClassicInstance instance_from_json(const std::string& text);

std::string lifted_to_json(const LiftedInstance& instance,
                           const SinkhornLiftData* sinkhorn = nullptr);

struct LoadedLifted {
    LiftedInstance instance;
    std::optional<SinkhornLiftData> sinkhorn;
};
LoadedLifted lifted_from_json(const std::string& text);

/// Result document for `otdro solve`: objective, multipliers, transport
/// records, and the weak-duality diagnostics block.
std::string result_to_json(const WorstCaseCoupling& coupling);

/// Report document for `otdro oracle`.
std::string oracle_report_to_json(double value, std::optional<double> gap_vs_dual,
                                  const std::vector<double>& grid_trace);

/// Reads the certificate block back out of a result document (for
/// `emit-conic --verify`).
DualCertificate certificate_from_result_json(const std::string& text);

std::string read_file(const std::string& path);

/// Writes through a temp file + rename so partial outputs never appear.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace otdro
