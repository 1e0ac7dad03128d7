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

// Benchmark comparing the OpenMP kernels against their serial reference
// implementations: per-atom envelope batches, Sinkhorn kernel rows, and the
// lattice maximizer. Each pair is checked for identical output before timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "otdro/dtransform.hpp"
#include "otdro/lifting.hpp"
#include "otdro/oracle.hpp"
#include "otdro/parallel.hpp"
#include "otdro/rng.hpp"

namespace {

using namespace otdro;
using Clock = std::chrono::steady_clock;

double seconds_of(const std::function<void()>& fn, int repeats) {
    const auto start = Clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto stop = Clock::now();
    return std::chrono::duration<double>(stop - start).count() / repeats;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %9.4f ms   parallel %9.4f ms   speedup %5.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

DiscreteMeasure random_measure(Rng& rng, std::size_t n, std::size_t d) {
    std::vector<Point> atoms(n, Point(d, 0.0));
    for (Point& a : atoms)
        for (double& x : a) x = rng.normal();
    return DiscreteMeasure::uniform(std::move(atoms));
}

} // namespace

int main() {
    std::printf("OpenMP %s, %d thread(s)\n\n", openmp_enabled() ? "enabled" : "disabled",
                thread_count());
    Rng rng(42);

    // Envelope batch: 4000 atoms, 6 pieces, squared cost.
    {
        const std::size_t n = 4000, d = 4;
        std::vector<AffinePiece> pieces;
        for (int k = 0; k < 6; ++k) {
            Point a(d);
            for (double& x : a) x = rng.normal();
            pieces.push_back({a, rng.normal()});
        }
        LiftedInstance instance = build_interpolated(
            PiecewiseAffineLoss(pieces), GroundCost::squared_euclidean(),
            EntropyFunction::kullback_leibler(), random_measure(rng, n, d), 0.1, 1.0, 1.0);
        auto serial = d_transform_batch_serial(instance, 0.7);
        auto parallel = d_transform_batch(instance, 0.7);
        bool equal = serial.size() == parallel.size();
        for (std::size_t i = 0; equal && i < serial.size(); ++i)
            equal = serial[i].value == parallel[i].value &&
                    serial[i].maximizer == parallel[i].maximizer;
        std::printf("envelope batch outputs %s\n", equal ? "identical" : "DIFFER");
        report("d_transform_batch",
               seconds_of([&] { d_transform_batch_serial(instance, 0.7); }, 20),
               seconds_of([&] { d_transform_batch(instance, 0.7); }, 20));
    }

    // Sinkhorn kernel rows: 600 nominal atoms x 600 reference atoms.
    {
        const DiscreteMeasure mu_hat = random_measure(rng, 600, 3);
        const DiscreteMeasure reference = random_measure(rng, 600, 3);
        const GroundCost cost = GroundCost::squared_euclidean();
        auto serial = make_sinkhorn_lift_data_serial(cost, mu_hat, 0.5, 0.8, reference);
        auto parallel = make_sinkhorn_lift_data(cost, mu_hat, 0.5, 0.8, reference);
        bool equal = serial.adjusted_radius == parallel.adjusted_radius;
        for (std::size_t c = 0; equal && c < serial.kernel_rows.size(); ++c)
            equal = serial.kernel_rows[c].weights() == parallel.kernel_rows[c].weights();
        std::printf("\nkernel rows outputs %s\n", equal ? "identical" : "DIFFER");
        report("sinkhorn kernel rows",
               seconds_of(
                   [&] { make_sinkhorn_lift_data_serial(cost, mu_hat, 0.5, 0.8, reference); },
                   5),
               seconds_of([&] { make_sinkhorn_lift_data(cost, mu_hat, 0.5, 0.8, reference); },
                          5));
    }

    // Lattice maximizer: 2-d box at one million points per pass.
    {
        auto fn = [](const Point& v) {
            return -(v[0] - 0.3) * (v[0] - 0.3) - (v[1] + 0.6) * (v[1] + 0.6) +
                   std::sin(3.0 * v[0]) * 0.1;
        };
        const Point lo{-5.0, -5.0}, hi{5.0, 5.0};
        auto serial = grid_argmax_serial(fn, lo, hi, 0.01);
        auto parallel = grid_argmax(fn, lo, hi, 0.01);
        const bool equal =
            serial.first == parallel.first && serial.second == parallel.second;
        std::printf("\nlattice argmax outputs %s\n", equal ? "identical" : "DIFFER");
        report("grid_argmax",
               seconds_of([&] { grid_argmax_serial(fn, lo, hi, 0.01); }, 3),
               seconds_of([&] { grid_argmax(fn, lo, hi, 0.01); }, 3));
    }
    return 0;
}
