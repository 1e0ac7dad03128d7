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

#include <stdexcept>
#include <string>

namespace otdro {

/// Malformed or inconsistent input (bad dimensions, parameters out of range,
/// rejected document fields). Mapped to exit code 2 by the CLI.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// The problem instance has an empty feasible set (e.g. a Sinkhorn instance
/// with adjusted radius below zero). Mapped to exit code 3.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// The worst-case risk is +infinity (loss grows faster than the transport
/// cost can charge). Mapped to exit code 3.
class UnboundedError : public std::runtime_error {
public:
    explicit UnboundedError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative routine exhausted its budget without locating a valid
/// bracket or pivot. Mapped to exit code 4.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace otdro
