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

#include <cmath>
#include <limits>

// Extended-real arithmetic with the conventions
//   inf * 0 = 0 * inf = 0,   inf - inf = inf,
// implemented by explicit case analysis so no IEEE NaN is ever produced.

namespace otdro {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

/// Product under the convention inf * 0 = 0.
inline double ext_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    if (std::isinf(a) || std::isinf(b)) {
        const bool negative = (a < 0.0) != (b < 0.0);
        return negative ? -kInf : kInf;
    }
    return a * b;
}

/// Sum under the convention inf - inf = inf.
inline double ext_add(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) {
        if (a == kInf || b == kInf) return kInf;
        return -kInf;
    }
    return a + b;
}

/// Quotient of nonnegative masses; 0/0 = 0, a/0 = inf for a > 0.
inline double ext_div(double a, double b) {
    if (b == 0.0) return a == 0.0 ? 0.0 : kInf;
    return a / b;
}

} // namespace otdro
