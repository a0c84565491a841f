// Copyright 2026 The mbftqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MBFTQC_ERRORS_H
#define MBFTQC_ERRORS_H

#include <stdexcept>
#include <string>

namespace mbftqc {

/// Operand sizes disagree (e.g. Pauli strings over different qubit counts).
struct SizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A gate kind was used somewhere it has no meaning (e.g. conjugating by a measurement).
struct InvalidGateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed circuit text, bad targets, or an out-of-range probability.
struct CircuitError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised by compile() when a detector is not deterministic in the noiseless circuit.
struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested something outside the Clifford instance (e.g. a nonzero analog angle).
struct UnsupportedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Internal inconsistency while building or using a decoder.
struct DecoderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mbftqc

#endif
