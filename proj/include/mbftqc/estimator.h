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

#ifndef MBFTQC_ESTIMATOR_H
#define MBFTQC_ESTIMATOR_H

#include <cmath>
#include <cstdint>
#include <string>

#include "mbftqc/errors.h"

namespace mbftqc {

/// Code blocks per logical data qubit in the zoned layout.
inline constexpr int BLOCKS_PER_LOGICAL_QUBIT = 5;
/// Physical Hadamard-test ancillas added per logical qubit for the Golay T factory.
inline constexpr int GOLAY_FACTORY_EXTRA_QUBITS = 2;
inline constexpr int ETA_STEANE = 7 * BLOCKS_PER_LOGICAL_QUBIT;
inline constexpr int ETA_GOLAY = 23 * BLOCKS_PER_LOGICAL_QUBIT + GOLAY_FACTORY_EXTRA_QUBITS;
static_assert(ETA_STEANE == 35 && ETA_GOLAY == 117);

/// Gates in one SU(4) element with Z-rotation Euler angles: 3 CZ, 15 R_Z, 15 H.
inline constexpr int SU4_CZ = 3;
inline constexpr int SU4_RZ = 15;
inline constexpr int SU4_H = 15;
/// Arbitrary single-qubit unitaries per SU(4) element when every one of them is synthesized.
inline constexpr int SU4_SYNTHESIZED_UNITARIES = 7;

struct GateErrorRates {
    double p_H = 0;
    double p_CZ = 0;
    double p_nonclifford = 0;
};

struct ResourceEstimate {
    int64_t m = 0;
    double m_raw = 0;
    int eta = 0;
    int64_t n_physical = 0;
    double delta = 0;
    int64_t n_t = 0;
    int iterations = 0;
};

inline void check_probability(double v, const char *what) {
    if (!(v > 0 && v < 1)) {
        throw NumericError(std::string(what) + " must lie in (0, 1)");
    }
}

/// Largest square circuit with m^2/2 SU(4) elements whose summed error stays below one.
inline ResourceEstimate qv_steane(const GateErrorRates &r) {
    check_probability(r.p_H, "p_H");
    check_probability(r.p_CZ, "p_CZ");
    check_probability(r.p_nonclifford, "p_RZ");
    double per_su4 = SU4_H * r.p_H + SU4_CZ * r.p_CZ + SU4_RZ * r.p_nonclifford;
    ResourceEstimate e;
    e.m_raw = std::sqrt(2 / per_su4);
    e.m = static_cast<int64_t>(std::floor(e.m_raw));
    e.eta = ETA_STEANE;
    e.n_physical = e.m * e.eta;
    return e;
}

/// Solves delta = 3 p_T log2(1/delta) by fixed-point iteration.
inline double synthesis_accuracy(double p_t, int *iterations = nullptr) {
    check_probability(p_t, "p_T");
    double delta = p_t;
    for (int it = 1; it <= 100; it++) {
        double next = 3 * p_t * std::log2(1 / delta);
        if (!(next > 0 && next < 1)) {
            throw NumericError("synthesis accuracy iteration left (0, 1)");
        }
        if (std::abs(next - delta) <= 1e-12 * delta) {
            if (iterations) {
                *iterations = it;
            }
            return next;
        }
        delta = next;
    }
    throw NumericError("synthesis accuracy did not converge in 100 iterations");
}

/// Golay path: every SU(4) element is synthesized to accuracy delta from Clifford+T.
inline ResourceEstimate qv_golay(double p_t) {
    ResourceEstimate e;
    e.delta = synthesis_accuracy(p_t, &e.iterations);
    e.n_t = std::llround(e.delta / p_t);
    e.m_raw = std::sqrt(2 / (SU4_SYNTHESIZED_UNITARIES * e.delta));
    e.m = static_cast<int64_t>(std::floor(e.m_raw));
    e.eta = ETA_GOLAY;
    e.n_physical = e.m * e.eta;
    return e;
}

inline int64_t golay_physical_qubits(int64_t logical_qubits) {
    return logical_qubits * ETA_GOLAY;
}

struct WorkloadReport {
    std::string name;
    int64_t logical_qubits = 0;
    double t_count = 0;
    int64_t n_physical = 0;
    double total_error = 0;  // t_count * p_T
    double headroom = 0;     // 1 / total_error
    bool feasible = false;
};

inline WorkloadReport workload(const std::string &name, int64_t logical_qubits, double t_count, double p_t) {
    if (logical_qubits <= 0 || t_count < 0) {
        throw NumericError("workload sizes must be positive");
    }
    check_probability(p_t, "p_T");
    WorkloadReport w;
    w.name = name;
    w.logical_qubits = logical_qubits;
    w.t_count = t_count;
    w.n_physical = golay_physical_qubits(logical_qubits);
    w.total_error = t_count * p_t;
    w.headroom = w.total_error > 0 ? 1 / w.total_error : INFINITY;
    w.feasible = w.total_error < 1;
    return w;
}

struct RotationEquivalent {
    int64_t t_per_rotation = 0;
    double rotations = 0;      // ~1/p_RZ rotations before one expected failure
    double t_equivalents = 0;  // t_per_rotation-weighted
};

/// T-gate cost of synthesizing a rotation to the accuracy an analog rotation achieves.
inline RotationEquivalent rz_equivalent_t_count(double p_rz) {
    check_probability(p_rz, "p_RZ");
    RotationEquivalent r;
    double exact = 3 * std::log2(1 / p_rz);
    r.t_per_rotation = std::llround(exact);
    r.rotations = 1 / p_rz;
    r.t_equivalents = exact / p_rz;
    return r;
}

}  // namespace mbftqc

#endif
