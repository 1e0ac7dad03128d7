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

#ifdef _OPENMP
#include <omp.h>
#endif

// Parallel loop helpers for the per-atom kernels. Every parallel loop in this
// project writes to disjoint output slots (or merges with an index-ordered
// reduction), so results are identical for any schedule; the serial variants
// are kept as reference implementations for the tests and the benchmark.

namespace otdro {

inline bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Body is called once per index in [0, n); indices may run concurrently.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

/// Serial reference with the same contract as parallel_for.
template <typename Body>
void serial_for(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

} // namespace otdro
