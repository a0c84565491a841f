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

#ifndef MBFTQC_GATE_H
#define MBFTQC_GATE_H

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbftqc/errors.h"

namespace mbftqc {

enum class GateKind : uint8_t {
    H,
    S,
    S_DAG,
    X,
    Y,
    Z,
    CNOT,
    CZ,
    PREP_Z,
    PREP_X,
    MEAS_Z,
    MEAS_X,
    // Noiseless, non-destructive measurement of a Pauli product. Used for ideal validation.
    OBSERVE,
    DEPOLARIZE1,
    DEPOLARIZE2,
    X_ERROR,
    Y_ERROR,
    Z_ERROR,
    PAULI_CHANNEL_1,
};

struct GateInfo {
    GateKind kind;
    std::string_view name;
    uint8_t arity;  // 0 = variable (OBSERVE)
    uint8_t num_args;
    bool unitary;
    bool noise;
    bool measurement;
};

inline constexpr std::array<GateInfo, 19> GATE_TABLE{{
    {GateKind::H, "H", 1, 0, true, false, false},
    {GateKind::S, "S", 1, 0, true, false, false},
    {GateKind::S_DAG, "S_DAG", 1, 0, true, false, false},
    {GateKind::X, "X", 1, 0, true, false, false},
    {GateKind::Y, "Y", 1, 0, true, false, false},
    {GateKind::Z, "Z", 1, 0, true, false, false},
    {GateKind::CNOT, "CNOT", 2, 0, true, false, false},
    {GateKind::CZ, "CZ", 2, 0, true, false, false},
    {GateKind::PREP_Z, "PREP_Z", 1, 0, false, false, false},
    {GateKind::PREP_X, "PREP_X", 1, 0, false, false, false},
    {GateKind::MEAS_Z, "MEAS_Z", 1, 0, false, false, true},
    {GateKind::MEAS_X, "MEAS_X", 1, 0, false, false, true},
    {GateKind::OBSERVE, "OBSERVE", 0, 0, false, false, true},
    {GateKind::DEPOLARIZE1, "DEPOLARIZE1", 1, 1, false, true, false},
    {GateKind::DEPOLARIZE2, "DEPOLARIZE2", 2, 1, false, true, false},
    {GateKind::X_ERROR, "X_ERROR", 1, 1, false, true, false},
    {GateKind::Y_ERROR, "Y_ERROR", 1, 1, false, true, false},
    {GateKind::Z_ERROR, "Z_ERROR", 1, 1, false, true, false},
    {GateKind::PAULI_CHANNEL_1, "PAULI_CHANNEL_1", 1, 3, false, true, false},
}};

inline const GateInfo &gate_info(GateKind k) {
    return GATE_TABLE[static_cast<size_t>(k)];
}

inline std::optional<GateKind> gate_kind_from_name(std::string_view name) {
    for (const auto &g : GATE_TABLE) {
        if (g.name == name) {
            return g.kind;
        }
    }
    return std::nullopt;
}

/// One circuit instruction.
///
/// `bases` is only populated for OBSERVE, one of 'X', 'Y', 'Z' per target.
/// `args` holds probabilities for noise kinds (PAULI_CHANNEL_1 uses px, py, pz).
struct Gate {
    GateKind kind = GateKind::H;
    std::vector<uint32_t> targets;
    std::vector<char> bases;
    std::array<double, 3> args{};
    std::string label;

    bool operator==(const Gate &other) const = default;

    /// Total firing probability of a noise site.
    double total_probability() const {
        if (kind == GateKind::PAULI_CHANNEL_1) {
            return args[0] + args[1] + args[2];
        }
        return args[0];
    }

    void validate() const {
        const auto &info = gate_info(kind);
        if (info.arity != 0 && targets.size() != info.arity) {
            throw CircuitError(
                std::string(info.name) + " takes exactly " + std::to_string(info.arity) + " target(s), got " +
                std::to_string(targets.size()));
        }
        if (kind == GateKind::OBSERVE) {
            if (targets.empty() || bases.size() != targets.size()) {
                throw CircuitError("OBSERVE needs at least one Pauli target");
            }
            for (size_t i = 0; i < targets.size(); i++) {
                if (bases[i] != 'X' && bases[i] != 'Y' && bases[i] != 'Z') {
                    throw CircuitError("OBSERVE basis must be X, Y or Z");
                }
                for (size_t j = 0; j < i; j++) {
                    if (targets[i] == targets[j]) {
                        throw CircuitError("OBSERVE repeats qubit " + std::to_string(targets[i]));
                    }
                }
            }
        } else if (!bases.empty()) {
            throw CircuitError(std::string(info.name) + " does not take Pauli targets");
        }
        if (info.arity == 2 && targets[0] == targets[1]) {
            throw CircuitError(std::string(info.name) + " targets must be distinct");
        }
        for (size_t k = 0; k < 3; k++) {
            double a = args[k];
            if (k >= info.num_args) {
                if (a != 0) {
                    throw CircuitError(std::string(info.name) + " given too many arguments");
                }
                continue;
            }
            if (!(a >= 0 && a <= 1)) {
                throw CircuitError(std::string(info.name) + " probability out of [0, 1]");
            }
        }
        if (kind == GateKind::PAULI_CHANNEL_1 && total_probability() > 1 + 1e-12) {
            throw CircuitError("PAULI_CHANNEL_1 probabilities sum above 1");
        }
    }
};

}  // namespace mbftqc

#endif
