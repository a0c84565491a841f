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

#ifndef MBFTQC_FRAME_SAMPLER_H
#define MBFTQC_FRAME_SAMPLER_H

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

#include "mbftqc/circuit.h"
#include "mbftqc/tableau.h"

namespace mbftqc {

/// Shots are simulated in fixed blocks; the RNG stream of a block depends only on
/// (seed, block index), so results do not depend on how blocks are spread over workers.
inline constexpr size_t SHOTS_PER_BLOCK = 1024;
inline constexpr size_t BLOCK_WORDS = SHOTS_PER_BLOCK / 64;

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t block_seed(uint64_t seed, uint64_t block_index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(block_index + 0x5851F42D4C957F2Dull));
}

struct ErrorSite {
    size_t op_index;
    GateKind kind;
    std::array<double, 3> probs;
    std::vector<uint32_t> targets;
};

/// One injected Pauli (and optional record flip), applied to a single shot right after a program op.
/// What a seeded block draws. Detector values do not depend on the stabilizer randomization,
/// so detector-only consumers can skip it; raw measurement records need it.
enum class FrameMode : uint8_t { NOISE_AND_GAUGE, NOISE_ONLY, GAUGE_ONLY };

struct Injection {
    uint32_t prog_index = 0;
    uint32_t shot = 0;
    std::vector<std::pair<uint32_t, uint8_t>> paulis;  // (qubit, bit0 = x, bit1 = z)
    uint32_t flip_slot = NO_SLOT;
};

namespace detail {

enum class FrameOpCode : uint8_t { H, S, CNOT, CZ, RESET, MEASURE, OBSERVE, NOISE };

struct FrameOp {
    FrameOpCode code;
    uint32_t a = 0;
    uint32_t b = 0;
    uint32_t slot = 0;
    uint32_t aux = 0;  // observe / noise-group index
};

struct NoiseGroup {
    GateKind kind;
    double p = 0;                   // total firing probability per unit
    std::array<double, 2> split{};  // PAULI_CHANNEL_1 conditional thresholds
    uint32_t arity = 1;
    std::vector<uint32_t> qubits;   // arity entries per unit
    uint32_t first_site = 0;
};

struct ObserveTerm {
    std::vector<std::pair<uint32_t, char>> terms;
};

inline double uniform_open0(std::mt19937_64 &rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline uint32_t uniform_below(std::mt19937_64 &rng, uint32_t n) {
    return static_cast<uint32_t>(((rng() >> 32) * uint64_t{n}) >> 32);
}

}  // namespace detail

/// A circuit lowered to reference outcomes plus a Pauli-frame program.
class CompiledSampler {
   public:
    size_t num_qubits = 0;
    size_t num_slots = 0;
    std::vector<uint8_t> reference_bits;
    std::vector<uint8_t> reference_detectors;
    std::vector<ErrorSite> error_sites;
    std::vector<Detector> detectors;

    std::vector<detail::FrameOp> program;
    std::vector<detail::NoiseGroup> noise_groups;
    std::vector<detail::ObserveTerm> observes;
    std::vector<uint32_t> op_end;     // source op -> last program index implementing it (or NO_SLOT)
    std::vector<uint32_t> site_prog;  // error site -> program index of its noise group
};

/// Per-block simulation state. Slot-major records: record[slot * BLOCK_WORDS + w].
struct FrameBlock {
    std::vector<uint64_t> x;
    std::vector<uint64_t> z;
    std::vector<uint64_t> record;

    void resize(const CompiledSampler &s) {
        x.assign(s.num_qubits * BLOCK_WORDS, 0);
        z.assign(s.num_qubits * BLOCK_WORDS, 0);
        record.assign(s.num_slots * BLOCK_WORDS, 0);
    }
    const uint64_t *slot(size_t k) const {
        return record.data() + k * BLOCK_WORDS;
    }
};

namespace detail {

inline void flip_pauli(FrameBlock &st, uint32_t q, uint32_t shot, uint32_t xz) {
    uint64_t bit = uint64_t{1} << (shot & 63);
    size_t w = size_t{q} * BLOCK_WORDS + (shot >> 6);
    if (xz & 1) {
        st.x[w] ^= bit;
    }
    if (xz & 2) {
        st.z[w] ^= bit;
    }
}

// Letter code 1..3 -> (x,z) bits: X = 1, Z = 2, Y = 3.
inline void fire(const NoiseGroup &g, FrameBlock &st, size_t unit, uint32_t shot, std::mt19937_64 &rng) {
    const uint32_t *q = g.qubits.data() + unit * g.arity;
    switch (g.kind) {
        case GateKind::DEPOLARIZE1:
            flip_pauli(st, q[0], shot, 1 + uniform_below(rng, 3));
            break;
        case GateKind::DEPOLARIZE2: {
            uint32_t v = 1 + uniform_below(rng, 15);
            flip_pauli(st, q[0], shot, v & 3);
            flip_pauli(st, q[1], shot, v >> 2);
            break;
        }
        case GateKind::X_ERROR:
            flip_pauli(st, q[0], shot, 1);
            break;
        case GateKind::Y_ERROR:
            flip_pauli(st, q[0], shot, 3);
            break;
        case GateKind::Z_ERROR:
            flip_pauli(st, q[0], shot, 2);
            break;
        case GateKind::PAULI_CHANNEL_1: {
            double u = uniform_open0(rng);
            uint32_t xz = u <= g.split[0] ? 1 : (u <= g.split[1] ? 3 : 2);
            flip_pauli(st, q[0], shot, xz);
            break;
        }
        default:
            break;
    }
}

inline void apply_noise(const NoiseGroup &g, FrameBlock &st, std::mt19937_64 &rng) {
    if (g.p <= 0) {
        return;
    }
    size_t units = g.qubits.size() / g.arity;
    uint64_t total = uint64_t{units} * SHOTS_PER_BLOCK;
    if (g.p < 0.05) {
        double inv_log = 1.0 / std::log1p(-g.p);
        uint64_t pos = 0;
        while (true) {
            double skip = std::floor(std::log(uniform_open0(rng)) * inv_log);
            if (skip >= static_cast<double>(total - pos)) {
                break;
            }
            pos += static_cast<uint64_t>(skip);
            fire(g, st, pos / SHOTS_PER_BLOCK, static_cast<uint32_t>(pos % SHOTS_PER_BLOCK), rng);
            pos++;
            if (pos >= total) {
                break;
            }
        }
    } else {
        for (size_t u = 0; u < units; u++) {
            for (uint32_t shot = 0; shot < SHOTS_PER_BLOCK; shot++) {
                if (uniform_open0(rng) <= g.p) {
                    fire(g, st, u, shot, rng);
                }
            }
        }
    }
}

// With an rng, the frame is also multiplied by a uniformly random stabilizer of the reference
// state: every reset and measurement contributes a random copy of the Pauli it fixes. Random
// outcomes (including hidden collapses at resets) then get the right joint distribution.
inline void run_program(const CompiledSampler &s, FrameBlock &st, std::mt19937_64 *rng,
                        const std::vector<Injection> *inj, FrameMode mode = FrameMode::NOISE_AND_GAUGE) {
    std::mt19937_64 *gauge_rng = mode == FrameMode::NOISE_ONLY ? nullptr : rng;
    std::mt19937_64 *noise_rng = mode == FrameMode::GAUGE_ONLY ? nullptr : rng;
    std::fill(st.x.begin(), st.x.end(), 0);
    std::fill(st.z.begin(), st.z.end(), 0);
    auto randomize = [&](uint64_t *v) {
        for (size_t w = 0; w < BLOCK_WORDS; w++) {
            v[w] = (*gauge_rng)();
        }
    };
    if (gauge_rng) {
        for (size_t q = 0; q < s.num_qubits; q++) {
            randomize(st.z.data() + q * BLOCK_WORDS);
        }
    }
    size_t next_inj = 0;
    uint64_t *X = st.x.data();
    uint64_t *Z = st.z.data();
    uint64_t *R = st.record.data();
    for (size_t pi = 0; pi < s.program.size(); pi++) {
        const FrameOp &op = s.program[pi];
        uint64_t *xa = X + size_t{op.a} * BLOCK_WORDS;
        uint64_t *za = Z + size_t{op.a} * BLOCK_WORDS;
        switch (op.code) {
            case FrameOpCode::H:
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    std::swap(xa[w], za[w]);
                }
                break;
            case FrameOpCode::S:
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    za[w] ^= xa[w];
                }
                break;
            case FrameOpCode::CNOT: {
                uint64_t *xb = X + size_t{op.b} * BLOCK_WORDS;
                uint64_t *zb = Z + size_t{op.b} * BLOCK_WORDS;
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    xb[w] ^= xa[w];
                    za[w] ^= zb[w];
                }
                break;
            }
            case FrameOpCode::CZ: {
                uint64_t *xb = X + size_t{op.b} * BLOCK_WORDS;
                uint64_t *zb = Z + size_t{op.b} * BLOCK_WORDS;
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    za[w] ^= xb[w];
                    zb[w] ^= xa[w];
                }
                break;
            }
            case FrameOpCode::RESET:
                std::fill(xa, xa + BLOCK_WORDS, 0);
                std::fill(za, za + BLOCK_WORDS, 0);
                if (gauge_rng) {
                    randomize(op.aux == 1 ? xa : za);
                }
                break;
            case FrameOpCode::MEASURE: {
                uint64_t *r = R + size_t{op.slot} * BLOCK_WORDS;
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    r[w] = xa[w];
                }
                if (gauge_rng) {
                    for (size_t w = 0; w < BLOCK_WORDS; w++) {
                        za[w] ^= (*gauge_rng)();
                    }
                }
                break;
            }
            case FrameOpCode::OBSERVE: {
                uint64_t *r = R + size_t{op.slot} * BLOCK_WORDS;
                std::fill(r, r + BLOCK_WORDS, 0);
                for (const auto &[q, b] : s.observes[op.aux].terms) {
                    const uint64_t *xq = X + size_t{q} * BLOCK_WORDS;
                    const uint64_t *zq = Z + size_t{q} * BLOCK_WORDS;
                    for (size_t w = 0; w < BLOCK_WORDS; w++) {
                        // A frame bit flips the outcome iff it anticommutes with the measured letter.
                        r[w] ^= (b == 'X' ? zq[w] : b == 'Z' ? xq[w] : (xq[w] ^ zq[w]));
                    }
                }
                if (gauge_rng) {
                    for (size_t w = 0; w < BLOCK_WORDS; w++) {
                        uint64_t m = (*gauge_rng)();
                        for (const auto &[q, b] : s.observes[op.aux].terms) {
                            X[size_t{q} * BLOCK_WORDS + w] ^= b != 'Z' ? m : 0;
                            Z[size_t{q} * BLOCK_WORDS + w] ^= b != 'X' ? m : 0;
                        }
                    }
                }
                break;
            }
            case FrameOpCode::NOISE:
                if (noise_rng) {
                    apply_noise(s.noise_groups[op.aux], st, *noise_rng);
                }
                break;
        }
        if (inj) {
            while (next_inj < inj->size() && (*inj)[next_inj].prog_index == pi) {
                const Injection &e = (*inj)[next_inj++];
                for (const auto &[q, xz] : e.paulis) {
                    flip_pauli(st, q, e.shot, xz);
                }
                if (e.flip_slot != NO_SLOT) {
                    R[size_t{e.flip_slot} * BLOCK_WORDS + (e.shot >> 6)] ^= uint64_t{1} << (e.shot & 63);
                }
            }
        }
    }
}

}  // namespace detail

/// Runs one block of SHOTS_PER_BLOCK shots with noise drawn from the block's RNG stream.
inline void simulate_block(const CompiledSampler &s, FrameBlock &st, uint64_t seed, uint64_t block_index,
                           FrameMode mode = FrameMode::NOISE_AND_GAUGE) {
    std::mt19937_64 rng(block_seed(seed, block_index));
    detail::run_program(s, st, &rng, nullptr, mode);
}

/// Runs one block with noise disabled and the given injections (sorted by prog_index) applied.
inline void simulate_block_injected(const CompiledSampler &s, FrameBlock &st, const std::vector<Injection> &inj) {
    detail::run_program(s, st, nullptr, &inj);
}

/// Detector flips of a block, detector-major.
inline std::vector<uint64_t> block_detector_flips(const CompiledSampler &s, const FrameBlock &st) {
    std::vector<uint64_t> out(s.detectors.size() * BLOCK_WORDS, 0);
    for (size_t d = 0; d < s.detectors.size(); d++) {
        uint64_t *o = out.data() + d * BLOCK_WORDS;
        for (auto k : s.detectors[d].slots) {
            const uint64_t *r = st.slot(k);
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                o[w] ^= r[w];
            }
        }
    }
    return out;
}

/// Builds the injection list for a set of concrete faults in one shot.
inline void add_fault_injections(const CompiledSampler &s, const std::vector<Fault> &faults, uint32_t shot,
                                 std::vector<Injection> &out) {
    auto code = [](char c) -> uint8_t {
        switch (c) {
            case 'X':
                return 1;
            case 'Z':
                return 2;
            case 'Y':
                return 3;
            case 'I':
                return 0;
        }
        throw std::invalid_argument("bad fault letter");
    };
    for (const auto &f : faults) {
        if (f.site >= s.error_sites.size()) {
            throw std::invalid_argument("fault site out of range");
        }
        const auto &site = s.error_sites[f.site];
        Injection e;
        e.prog_index = s.site_prog[f.site];
        e.shot = shot;
        if (uint8_t c = code(f.p0)) {
            e.paulis.push_back({site.targets[0], c});
        }
        if (uint8_t c = code(f.p1)) {
            if (site.targets.size() < 2) {
                throw std::invalid_argument("two-qubit fault at a one-qubit site");
            }
            e.paulis.push_back({site.targets[1], c});
        }
        out.push_back(std::move(e));
    }
}

inline void sort_injections(std::vector<Injection> &inj) {
    std::stable_sort(inj.begin(), inj.end(),
                     [](const Injection &a, const Injection &b) { return a.prog_index < b.prog_index; });
}

namespace detail {

inline void emit(CompiledSampler &s, FrameOpCode code, uint32_t a, uint32_t b = 0, uint32_t slot = 0,
                 uint32_t aux = 0) {
    s.program.push_back({code, a, b, slot, aux});
}

// A detector is deterministic iff it never fires in a noiseless block with stabilizer
// randomization; a random one passes a block with probability 2^-SHOTS_PER_BLOCK.
inline void verify_determinism(const CompiledSampler &s) {
    if (s.detectors.empty()) {
        return;
    }
    FrameBlock st;
    st.resize(s);
    std::mt19937_64 rng(0x6D62667471636B21ull);
    run_program(s, st, &rng, nullptr, FrameMode::GAUGE_ONLY);
    auto flips = block_detector_flips(s, st);
    for (size_t d = 0; d < s.detectors.size(); d++) {
        for (size_t w = 0; w < BLOCK_WORDS; w++) {
            if (flips[d * BLOCK_WORDS + w]) {
                std::string name = s.detectors[d].label.empty() ? "#" + std::to_string(d) : s.detectors[d].label;
                throw CompileError("detector " + name + " is not deterministic");
            }
        }
    }
}

}  // namespace detail

/// Lowers a circuit: reference outcomes from the tableau, then a frame-propagation program.
/// Throws CompileError if some detector depends on a random measurement outcome.
inline CompiledSampler compile(const Circuit &c) {
    using detail::FrameOpCode;
    CompiledSampler s;
    s.num_qubits = c.n_qubits;
    s.num_slots = c.num_slots();
    s.detectors = c.detectors;
    TableauRun ref = run_tableau(c);
    s.reference_bits = ref.bits;
    s.reference_detectors = ref.detector_bits;
    s.op_end.assign(c.ops.size(), NO_SLOT);

    uint32_t slot = 0;
    for (size_t oi = 0; oi < c.ops.size(); oi++) {
        const Gate &g = c.ops[oi];
        const auto &info = gate_info(g.kind);
        uint32_t a = g.targets.empty() ? 0 : g.targets[0];
        uint32_t b = g.targets.size() > 1 ? g.targets[1] : 0;
        if (info.noise) {
            ErrorSite site{oi, g.kind, g.args, g.targets};
            uint32_t site_index = static_cast<uint32_t>(s.error_sites.size());
            s.error_sites.push_back(site);
            bool merge = false;
            if (oi > 0 && !s.program.empty() && s.program.back().code == FrameOpCode::NOISE &&
                gate_info(c.ops[oi - 1].kind).noise) {
                const auto &prev = s.noise_groups[s.program.back().aux];
                merge = prev.kind == g.kind && c.ops[oi - 1].args == g.args;
            }
            if (!merge) {
                detail::NoiseGroup grp;
                grp.kind = g.kind;
                grp.p = g.total_probability();
                grp.arity = info.arity;
                grp.first_site = site_index;
                if (g.kind == GateKind::PAULI_CHANNEL_1 && grp.p > 0) {
                    grp.split = {g.args[0] / grp.p, (g.args[0] + g.args[1]) / grp.p};
                }
                s.noise_groups.push_back(std::move(grp));
                detail::emit(s, FrameOpCode::NOISE, 0, 0, 0, static_cast<uint32_t>(s.noise_groups.size() - 1));
            }
            auto &grp = s.noise_groups[s.program.back().aux];
            grp.qubits.insert(grp.qubits.end(), g.targets.begin(), g.targets.end());
            s.site_prog.push_back(static_cast<uint32_t>(s.program.size() - 1));
            s.op_end[oi] = static_cast<uint32_t>(s.program.size() - 1);
            continue;
        }
        switch (g.kind) {
            case GateKind::H:
                detail::emit(s, FrameOpCode::H, a);
                break;
            case GateKind::S:
            case GateKind::S_DAG:
                detail::emit(s, FrameOpCode::S, a);
                break;
            case GateKind::X:
            case GateKind::Y:
            case GateKind::Z:
                break;
            case GateKind::CNOT:
                detail::emit(s, FrameOpCode::CNOT, a, b);
                break;
            case GateKind::CZ:
                detail::emit(s, FrameOpCode::CZ, a, b);
                break;
            case GateKind::PREP_Z:
                detail::emit(s, FrameOpCode::RESET, a);
                break;
            case GateKind::PREP_X:
                detail::emit(s, FrameOpCode::RESET, a, 0, 0, 1);  // aux=1: X-basis reset
                break;
            case GateKind::MEAS_Z:
                detail::emit(s, FrameOpCode::MEASURE, a, 0, slot++);
                break;
            case GateKind::MEAS_X:
                detail::emit(s, FrameOpCode::H, a);
                detail::emit(s, FrameOpCode::MEASURE, a, 0, slot++);
                detail::emit(s, FrameOpCode::H, a, 0, 0, 1);  // aux=1 marks the closing H of a lowering
                break;
            case GateKind::OBSERVE: {
                detail::ObserveTerm t;
                for (size_t k = 0; k < g.targets.size(); k++) {
                    t.terms.push_back({g.targets[k], g.bases[k]});
                }
                s.observes.push_back(std::move(t));
                detail::emit(s, FrameOpCode::OBSERVE, 0, 0, slot++, static_cast<uint32_t>(s.observes.size() - 1));
                break;
            }
            default:
                break;
        }
        if (!s.program.empty()) {
            s.op_end[oi] = static_cast<uint32_t>(s.program.size() - 1);
        }
    }
    detail::verify_determinism(s);
    return s;
}

/// Shot-major packed bits. measurement_bits are absolute outcomes (reference XOR flips);
/// detector_bits are detector flips relative to the noiseless reference.
struct ShotBatch {
    size_t n_shots = 0;
    size_t n_slots = 0;
    size_t n_detectors = 0;
    uint64_t rng_seed = 0;
    uint64_t shot_offset = 0;
    std::vector<uint64_t> measurement_bits;
    std::vector<uint64_t> detector_bits;

    size_t slot_words() const {
        return (n_slots + 63) / 64;
    }
    size_t detector_words() const {
        return (n_detectors + 63) / 64;
    }
    bool measurement(size_t shot, size_t slot) const {
        return (measurement_bits[shot * slot_words() + slot / 64] >> (slot % 64)) & 1;
    }
    bool detector(size_t shot, size_t d) const {
        return (detector_bits[shot * detector_words() + d / 64] >> (d % 64)) & 1;
    }
    bool operator==(const ShotBatch &other) const = default;
};

/// Samples n_shots shots starting at absolute shot index shot_offset.
inline ShotBatch sample(const CompiledSampler &s, uint64_t n_shots, uint64_t seed, uint64_t shot_offset = 0) {
    if (n_shots == 0) {
        throw std::invalid_argument("n_shots must be at least 1");
    }
    ShotBatch b;
    b.n_shots = n_shots;
    b.n_slots = s.num_slots;
    b.n_detectors = s.detectors.size();
    b.rng_seed = seed;
    b.shot_offset = shot_offset;
    b.measurement_bits.assign(n_shots * b.slot_words(), 0);
    b.detector_bits.assign(n_shots * b.detector_words(), 0);
    FrameBlock st;
    st.resize(s);
    uint64_t first_block = shot_offset / SHOTS_PER_BLOCK;
    uint64_t last_block = (shot_offset + n_shots - 1) / SHOTS_PER_BLOCK;
    for (uint64_t blk = first_block; blk <= last_block; blk++) {
        simulate_block(s, st, seed, blk);
        auto flips = block_detector_flips(s, st);
        uint64_t base = blk * SHOTS_PER_BLOCK;
        uint64_t lo = std::max(base, shot_offset);
        uint64_t hi = std::min(base + SHOTS_PER_BLOCK, shot_offset + n_shots);
        for (uint64_t shot = lo; shot < hi; shot++) {
            size_t i = shot - base;
            size_t out = shot - shot_offset;
            uint64_t bit_mask = uint64_t{1} << (i & 63);
            for (size_t k = 0; k < s.num_slots; k++) {
                bool v = s.reference_bits[k] ^ ((st.record[k * BLOCK_WORDS + (i >> 6)] & bit_mask) != 0);
                b.measurement_bits[out * b.slot_words() + k / 64] |= uint64_t{v} << (k % 64);
            }
            for (size_t d = 0; d < b.n_detectors; d++) {
                bool v = (flips[d * BLOCK_WORDS + (i >> 6)] & bit_mask) != 0;
                b.detector_bits[out * b.detector_words() + d / 64] |= uint64_t{v} << (d % 64);
            }
        }
    }
    return b;
}

struct SplitResult {
    uint64_t accepted = 0;
    std::vector<uint64_t> observable_flips;
};

/// Post-selects on `postselect` detectors and tallies `observables` over accepted shots.
inline SplitResult split_records(const ShotBatch &b, const std::vector<uint32_t> &postselect,
                                 const std::vector<uint32_t> &observables) {
    for (auto d : postselect) {
        if (d >= b.n_detectors) {
            throw ConfigError("postselect detector out of range");
        }
        if (std::find(observables.begin(), observables.end(), d) != observables.end()) {
            throw ConfigError("detector " + std::to_string(d) + " is both postselected and observed");
        }
    }
    for (auto d : observables) {
        if (d >= b.n_detectors) {
            throw ConfigError("observable detector out of range");
        }
    }
    SplitResult r;
    r.observable_flips.assign(observables.size(), 0);
    for (size_t shot = 0; shot < b.n_shots; shot++) {
        bool ok = true;
        for (auto d : postselect) {
            if (b.detector(shot, d)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        r.accepted++;
        for (size_t k = 0; k < observables.size(); k++) {
            r.observable_flips[k] += b.detector(shot, observables[k]);
        }
    }
    return r;
}

/// Binary export: "MBSB", u32 version, u64 n_shots, u64 n_detectors, u64 seed, then one
/// little-endian bit row of ceil(n_detectors / 8) bytes per shot.
inline void write_detector_batch(std::ostream &out, const ShotBatch &b) {
    auto put64 = [&](uint64_t v) {
        for (int k = 0; k < 8; k++) {
            out.put(static_cast<char>((v >> (8 * k)) & 0xFF));
        }
    };
    out.write("MBSB", 4);
    uint32_t version = 1;
    for (int k = 0; k < 4; k++) {
        out.put(static_cast<char>((version >> (8 * k)) & 0xFF));
    }
    put64(b.n_shots);
    put64(b.n_detectors);
    put64(b.rng_seed);
    size_t row_bytes = (b.n_detectors + 7) / 8;
    for (size_t shot = 0; shot < b.n_shots; shot++) {
        for (size_t byte = 0; byte < row_bytes; byte++) {
            uint64_t w = b.detector_bits[shot * b.detector_words() + byte / 8];
            out.put(static_cast<char>((w >> (8 * (byte % 8))) & 0xFF));
        }
    }
}

inline void write_detector_counts_csv(std::ostream &out, const ShotBatch &b, const std::vector<Detector> &dets) {
    out << "detector,label,flips,n_shots\n";
    for (size_t d = 0; d < b.n_detectors; d++) {
        uint64_t c = 0;
        for (size_t shot = 0; shot < b.n_shots; shot++) {
            c += b.detector(shot, d);
        }
        out << d << "," << (d < dets.size() ? dets[d].label : "") << "," << c << "," << b.n_shots << "\n";
    }
}

}  // namespace mbftqc

#endif
