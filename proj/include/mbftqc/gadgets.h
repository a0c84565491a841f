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

#ifndef MBFTQC_GADGETS_H
#define MBFTQC_GADGETS_H

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mbftqc/circuit.h"
#include "mbftqc/css_codes.h"

namespace mbftqc {

/// Readout error before a Z measurement: a single-qubit depolarizing channel (flips the result
/// with probability 2p/3), or a classical flip with probability p.
enum class Readout : uint8_t { DEPOLARIZE, FLIP };

inline std::string readout_name(Readout r) {
    return r == Readout::DEPOLARIZE ? "depolarize" : "flip";
}

inline Readout readout_from_name(const std::string &s) {
    if (s == "depolarize") {
        return Readout::DEPOLARIZE;
    }
    if (s == "flip") {
        return Readout::FLIP;
    }
    throw ConfigError("unknown readout noise '" + s + "' (expected depolarize or flip)");
}

/// Where physical noise goes: after gates and preparations, before measurements.
struct NoisePolicy {
    double p = 0;
    bool apply_gate_noise = true;
    bool apply_prep_noise = true;
    bool apply_meas_noise = true;
    Readout readout = Readout::DEPOLARIZE;

    static NoisePolicy uniform(double p, Readout readout = Readout::DEPOLARIZE) {
        if (!(p >= 0 && p <= 1)) {
            throw ConfigError("physical error rate must lie in [0, 1]");
        }
        NoisePolicy n;
        n.p = p;
        n.readout = readout;
        return n;
    }
};

enum class AncillaMode : uint8_t { TRANSVERSAL_MODEL, EXPLICIT_PURIFICATION };

inline std::string ancilla_mode_name(AncillaMode m) {
    return m == AncillaMode::TRANSVERSAL_MODEL ? "model" : "explicit";
}

inline AncillaMode ancilla_mode_from_name(const std::string &s) {
    if (s == "model") {
        return AncillaMode::TRANSVERSAL_MODEL;
    }
    if (s == "explicit") {
        return AncillaMode::EXPLICIT_PURIFICATION;
    }
    throw ConfigError("unknown ancilla mode '" + s + "' (expected model or explicit)");
}

/// Per-qubit X/Y/Z weights of the transversal error models, in units of p/15.
inline constexpr std::array<double, 3> ZERO_MODEL_WEIGHTS = {6, 2, 2};
inline constexpr std::array<double, 3> ROTATION_MODEL_WEIGHTS = {2, 2, 10};

struct AncillaModel {
    AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL;

    static std::array<double, 3> probabilities(const std::array<double, 3> &weights, double p) {
        std::array<double, 3> out{};
        for (size_t k = 0; k < 3; k++) {
            out[k] = weights[k] * p / 15;
        }
        if (out[0] + out[1] + out[2] > 1) {
            throw ConfigError("ancilla model probabilities exceed 1");
        }
        return out;
    }
};

struct DecodeTerm {
    std::shared_ptr<const LookupTable> table;
    std::vector<std::vector<uint32_t>> syndrome;  // one slot set per check row
    uint64_t overlap = 0;                         // correction bits that flip the checked parity
};

/// A transversally measured block whose corrected logical value is a Pauli-frame byproduct.
struct Byproduct {
    std::string label;
    Basis basis = Basis::X;
    std::vector<uint32_t> slots;          // raw outcomes, one per code qubit
    std::vector<uint32_t> logical_slots;  // raw logical parity
    DecodeTerm term;
};

/// An ideal logical measurement whose decoded flip (relative to the noiseless run) is a failure.
/// `detector` is the raw deterministic parity; `terms` add lookup-decoded corrections.
struct ValidationCheck {
    std::string label;
    uint32_t step = 1;
    uint32_t detector = 0;
    std::vector<DecodeTerm> terms;
};

struct GadgetCircuit {
    std::string name;
    CssCode code;
    double p = 0;
    AncillaMode ancilla = AncillaMode::TRANSVERSAL_MODEL;
    Readout readout = Readout::DEPOLARIZE;
    Circuit circuit;
    std::vector<uint32_t> postselect_detectors;
    std::vector<Byproduct> byproduct_slots;
    std::vector<ValidationCheck> validation_observables;
    uint32_t num_steps = 1;
    std::map<std::string, size_t> named_sites;                   // noise-site indices
    std::map<std::string, std::vector<uint32_t>> slot_groups;    // named measurement slots
};

using Block = std::vector<uint32_t>;

/// Incremental circuit construction with qubit reuse, noise placement and detector bookkeeping.
class GadgetBuilder {
   public:
    GadgetBuilder(CssCode code, NoisePolicy noise, AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL)
        : noise_(noise) {
        g_.code = std::move(code);
        g_.p = noise.p;
        g_.ancilla = mode;
        g_.readout = noise.readout;
        table_ = default_lookup(g_.code);
    }

    const CssCode &code() const {
        return g_.code;
    }
    const NoisePolicy &noise() const {
        return noise_;
    }
    AncillaMode mode() const {
        return g_.ancilla;
    }
    Circuit &circuit() {
        return g_.circuit;
    }
    size_t num_noise_sites() const {
        return sites_;
    }

    uint32_t alloc_qubit() {
        if (!free_.empty()) {
            uint32_t q = free_.front();
            free_.erase(free_.begin());
            return q;
        }
        return next_qubit_++;
    }
    Block alloc_block() {
        Block b(g_.code.n);
        for (auto &q : b) {
            q = alloc_qubit();
        }
        return b;
    }
    void free_qubit(uint32_t q) {
        free_.insert(std::lower_bound(free_.begin(), free_.end(), q), q);
    }
    void free_block(const Block &b) {
        for (auto q : b) {
            free_qubit(q);
        }
    }

    // ---- physical operations ----

    void depolarize1(uint32_t q) {
        if (noise_.p > 0) {
            g_.circuit.append(GateKind::DEPOLARIZE1, {q}, noise_.p);
            sites_++;
        }
    }
    void depolarize2(uint32_t a, uint32_t b) {
        if (noise_.p > 0) {
            g_.circuit.append(GateKind::DEPOLARIZE2, {a, b}, noise_.p);
            sites_++;
        }
    }
    void pauli_channel(uint32_t q, const std::array<double, 3> &probs) {
        if (probs[0] + probs[1] + probs[2] > 0) {
            g_.circuit.pauli_channel_1(q, probs[0], probs[1], probs[2]);
            sites_++;
        }
    }
    void prep(uint32_t q, bool noisy) {
        g_.circuit.append(GateKind::PREP_Z, {q});
        if (noisy && noise_.apply_prep_noise) {
            depolarize1(q);
        }
    }
    void gate1(GateKind k, uint32_t q, bool noisy) {
        g_.circuit.append(k, {q});
        if (noisy && noise_.apply_gate_noise) {
            depolarize1(q);
        }
    }
    void gate2(GateKind k, uint32_t a, uint32_t b, bool noisy) {
        g_.circuit.append(k, {a, b});
        if (noisy && noise_.apply_gate_noise) {
            depolarize2(a, b);
        }
    }
    uint32_t measure_z(uint32_t q, bool noisy, std::string label = {}) {
        if (noisy && noise_.apply_meas_noise) {
            if (noise_.readout == Readout::FLIP) {
                if (noise_.p > 0) {
                    g_.circuit.append(GateKind::X_ERROR, {q}, noise_.p);
                    sites_++;
                }
            } else {
                depolarize1(q);
            }
        }
        return g_.circuit.append(GateKind::MEAS_Z, {q}, 0, std::move(label));
    }
    /// X-basis measurement from the native gate set: H, then Z measurement.
    uint32_t measure_x(uint32_t q, bool noisy, std::string label = {}) {
        gate1(GateKind::H, q, noisy);
        return measure_z(q, noisy, std::move(label));
    }

    /// Replays a local circuit (PREP_Z / unitaries) on a block with standard noise.
    void emit_local(const Circuit &local, const Block &b, bool noisy) {
        for (const auto &g : local.ops) {
            switch (g.kind) {
                case GateKind::PREP_Z:
                    prep(b[g.targets[0]], noisy);
                    break;
                case GateKind::CNOT:
                case GateKind::CZ:
                    gate2(g.kind, b[g.targets[0]], b[g.targets[1]], noisy);
                    break;
                default:
                    if (!gate_info(g.kind).unitary) {
                        throw InvalidGateError("unexpected op in local circuit");
                    }
                    gate1(g.kind, b[g.targets[0]], noisy);
            }
        }
    }

    // ---- block operations ----

    void transversal1(GateKind k, const Block &b, bool noisy = true) {
        for (auto q : b) {
            gate1(k, q, noisy);
        }
    }
    void transversal2(GateKind k, const Block &a, const Block &b, bool noisy = true) {
        for (size_t i = 0; i < a.size(); i++) {
            gate2(k, a[i], b[i], noisy);
        }
    }
    std::vector<uint32_t> measure_block(const Block &b, Basis basis, bool noisy, const std::string &label) {
        std::vector<uint32_t> slots;
        for (size_t i = 0; i < b.size(); i++) {
            std::string l = label.empty() ? std::string{} : label + "." + std::to_string(i);
            slots.push_back(basis == Basis::Z ? measure_z(b[i], noisy, l) : measure_x(b[i], noisy, l));
        }
        return slots;
    }
    void apply_model(const Block &b, const std::array<double, 3> &weights) {
        auto probs = AncillaModel::probabilities(weights, noise_.p);
        for (auto q : b) {
            pauli_channel(q, probs);
        }
    }

    static std::vector<uint32_t> select(const std::vector<uint32_t> &slots, uint64_t mask) {
        std::vector<uint32_t> out;
        for (size_t i = 0; i < slots.size(); i++) {
            if ((mask >> i) & 1) {
                out.push_back(slots[i]);
            }
        }
        return out;
    }

    /// Check rows that see errors in a transversal measurement of the given basis.
    const std::vector<uint64_t> &rows_for(Basis basis) const {
        return basis == Basis::Z ? g_.code.h_z : g_.code.h_x;
    }
    uint64_t logical_for(Basis basis) const {
        return basis == Basis::Z ? g_.code.logical_z_support : g_.code.logical_x_support;
    }

    uint32_t detector(std::vector<uint32_t> slots, std::string label, bool postselect) {
        uint32_t d = g_.circuit.add_detector(std::move(slots), std::move(label));
        if (postselect) {
            g_.postselect_detectors.push_back(d);
        }
        return d;
    }

    /// Syndrome parities of a measured block. Always registered as detectors so that
    /// compile() verifies they are deterministic.
    std::vector<std::vector<uint32_t>> syndrome_sets(const std::vector<uint32_t> &slots, Basis basis,
                                                     const std::string &label, bool postselect) {
        std::vector<std::vector<uint32_t>> sets;
        const auto &rows = rows_for(basis);
        for (size_t r = 0; r < rows.size(); r++) {
            auto s = select(slots, rows[r]);
            detector(s, label + ".s" + std::to_string(r), postselect);
            sets.push_back(std::move(s));
        }
        return sets;
    }

    /// Registers a transversally measured block as a decodable byproduct; returns its id.
    uint32_t add_byproduct(const std::vector<uint32_t> &slots, Basis basis, const std::string &label) {
        Byproduct b;
        b.label = label;
        b.basis = basis;
        b.slots = slots;
        b.logical_slots = select(slots, logical_for(basis));
        b.term.table = table_;
        b.term.syndrome = syndrome_sets(slots, basis, label, false);
        b.term.overlap = logical_for(basis);
        g_.byproduct_slots.push_back(std::move(b));
        return static_cast<uint32_t>(g_.byproduct_slots.size() - 1);
    }

    /// Ideal stabilizer measurements of one type on a block. `x_type` selects X-type stabilizers.
    std::vector<std::vector<uint32_t>> observe_stabilizers(const Block &b, bool x_type, const std::string &label) {
        std::vector<std::vector<uint32_t>> sets;
        const auto &rows = x_type ? g_.code.h_x : g_.code.h_z;
        for (size_t r = 0; r < rows.size(); r++) {
            std::vector<std::pair<uint32_t, char>> terms;
            for (size_t i = 0; i < b.size(); i++) {
                if ((rows[r] >> i) & 1) {
                    terms.push_back({b[i], x_type ? 'X' : 'Z'});
                }
            }
            std::string l = label + (x_type ? ".sx" : ".sz") + std::to_string(r);
            uint32_t slot = g_.circuit.observe(terms, l);
            detector({slot}, l, false);
            sets.push_back({slot});
        }
        return sets;
    }

    struct LogicalFactor {
        Block block;
        char letter;  // 'X', 'Y' or 'Z' (logical operator on this block)
    };

    /// Adds an ideal validation measurement of a logical Pauli product. `byproducts` lists the ids
    /// whose decoded bits enter the expected value (the Pauli frame's anticommutation set).
    uint32_t add_validation(const std::vector<LogicalFactor> &factors, const std::vector<uint32_t> &byproducts,
                            uint32_t step, const std::string &label) {
        std::vector<std::pair<uint32_t, char>> terms;
        ValidationCheck chk;
        chk.label = label;
        chk.step = step;
        for (size_t f = 0; f < factors.size(); f++) {
            const auto &[blk, letter] = factors[f];
            bool has_x = letter == 'X' || letter == 'Y';
            bool has_z = letter == 'Z' || letter == 'Y';
            uint64_t support = has_x ? g_.code.logical_x_support : g_.code.logical_z_support;
            for (size_t i = 0; i < blk.size(); i++) {
                if ((support >> i) & 1) {
                    terms.push_back({blk[i], letter});
                }
            }
            std::string fl = label + ".f" + std::to_string(f);
            if (has_x) {
                // Z errors flip an X-type factor; they show up in the X-type stabilizers.
                chk.terms.push_back({table_, observe_stabilizers(blk, true, fl), g_.code.logical_x_support});
            }
            if (has_z) {
                chk.terms.push_back({table_, observe_stabilizers(blk, false, fl), g_.code.logical_z_support});
            }
        }
        uint32_t obs = g_.circuit.observe(terms, label + ".obs");
        std::vector<uint32_t> slots = {obs};
        for (auto id : byproducts) {
            const auto &b = g_.byproduct_slots.at(id);
            for (auto s : b.logical_slots) {
                slots.push_back(s);
            }
            chk.terms.push_back(b.term);
        }
        chk.detector = detector(slots, label, false);
        g_.validation_observables.push_back(std::move(chk));
        return static_cast<uint32_t>(g_.validation_observables.size() - 1);
    }

    void name_site(const std::string &name) {
        g_.named_sites[name] = sites_ - 1;
    }
    void name_slots(const std::string &name, std::vector<uint32_t> slots) {
        g_.slot_groups[name] = std::move(slots);
    }

    // ---- logical state preparation ----

    void ideal_zero(const Block &b) {
        emit_local(encoding_circuit(g_.code, 1), b, false);
    }
    void ideal_plus(const Block &b) {
        emit_local(plus_encoding_circuit(g_.code), b, false);
    }

    /// Two-round entanglement purification; the purified |0>_L ends up on `out`.
    void purify_zero_into(const Block &out, const std::string &label) {
        Block b2 = alloc_block(), b3 = alloc_block(), b4 = alloc_block();
        const Block *blocks[4] = {&out, &b2, &b3, &b4};
        for (int v = 0; v < 4; v++) {
            emit_local(encoding_circuit(g_.code, v + 1), *blocks[v], true);
        }
        transversal2(GateKind::CNOT, out, b2);
        transversal2(GateKind::CNOT, b3, b4);
        for (const Block *b : {&b2, &b4}) {
            std::string l = label + (b == &b2 ? ".b2" : ".b4");
            auto slots = measure_block(*b, Basis::Z, true, {});
            syndrome_sets(slots, Basis::Z, l, true);
            detector(select(slots, g_.code.logical_z_support), l + ".L", true);
        }
        // Second round: Z errors on block 1 are copied onto block 3 and read in the X basis.
        transversal2(GateKind::CNOT, b3, out);
        auto slots3 = measure_block(b3, Basis::X, true, {});
        syndrome_sets(slots3, Basis::X, label + ".b3", true);
        free_block(b2);
        free_block(b3);
        free_block(b4);
    }

    /// |0>_L by the configured ancilla mode.
    void ancilla_zero(const Block &b, const std::string &label) {
        if (g_.ancilla == AncillaMode::EXPLICIT_PURIFICATION) {
            purify_zero_into(b, label);
        } else {
            ideal_zero(b);
            apply_model(b, ZERO_MODEL_WEIGHTS);
        }
    }

    /// Post-selection with two |0>_L ancillas: the first (as CNOT control) collects the data's
    /// Z errors, the second (through CZ) its X errors; both are read in the X basis.
    void steane_gadget(const Block &data, const std::string &label) {
        Block a1 = alloc_block();
        ancilla_zero(a1, label + ".a1");
        transversal2(GateKind::CNOT, a1, data);
        auto s1 = measure_block(a1, Basis::X, true, {});
        syndrome_sets(s1, Basis::X, label + ".z", true);
        free_block(a1);
        Block a2 = alloc_block();
        ancilla_zero(a2, label + ".a2");
        transversal2(GateKind::CZ, data, a2);
        auto s2 = measure_block(a2, Basis::X, true, {});
        syndrome_sets(s2, Basis::X, label + ".x", true);
        free_block(a2);
    }

    /// One logical one-bit teleportation: CZ into the ancilla, X measurement of the data.
    /// Returns the byproduct id; the data block is freed.
    uint32_t lobt(const Block &data, const Block &anc, const std::string &label) {
        transversal2(GateKind::CZ, data, anc);
        auto slots = measure_block(data, Basis::X, true, {});
        free_block(data);
        return add_byproduct(slots, Basis::X, label);
    }

    GadgetCircuit finish(std::string name, uint32_t steps = 1) {
        g_.name = std::move(name);
        g_.num_steps = steps;
        return std::move(g_);
    }

   private:
    GadgetCircuit g_;
    NoisePolicy noise_;
    std::shared_ptr<const LookupTable> table_;
    std::vector<uint32_t> free_;
    uint32_t next_qubit_ = 0;
    size_t sites_ = 0;
};

// ---------------------------------------------------------------------------
// Gadget circuits.

/// Two-round purified |0>_L with validation of the Z-type stabilizers and logical Z.
/// With `observe_x_checks` the X-type stabilizers are also measured ideally (for per-qubit
/// X/Y/Z error statistics; they are not part of the validation).
inline GadgetCircuit purification_zero(const CssCode &code, NoisePolicy noise, bool observe_x_checks = false) {
    GadgetBuilder b(code, noise);
    Block out = b.alloc_block();
    b.purify_zero_into(out, "pur");
    b.add_validation({{out, 'Z'}}, {}, 1, "val");
    if (observe_x_checks) {
        auto zs = b.observe_stabilizers(out, false, "stat");
        auto xs = b.observe_stabilizers(out, true, "stat");
        std::vector<uint32_t> zslots, xslots;
        for (auto &s : zs) {
            zslots.push_back(s[0]);
        }
        for (auto &s : xs) {
            xslots.push_back(s[0]);
        }
        b.name_slots("out.z_checks", zslots);
        b.name_slots("out.x_checks", xslots);
    }
    return b.finish("purification_zero");
}

enum class BenchGate : uint8_t { H, CZ, RZ_TELE, T_TELE };

inline std::string bench_gate_name(BenchGate g) {
    switch (g) {
        case BenchGate::H:
            return "h";
        case BenchGate::CZ:
            return "cz";
        case BenchGate::RZ_TELE:
            return "rz_tele";
        case BenchGate::T_TELE:
            return "t_tele";
    }
    return "?";
}

inline BenchGate bench_gate_from_name(const std::string &s) {
    if (s == "h" || s == "H") {
        return BenchGate::H;
    }
    if (s == "cz" || s == "CZ") {
        return BenchGate::CZ;
    }
    if (s == "rz_tele" || s == "rz" || s == "RZ_tele") {
        return BenchGate::RZ_TELE;
    }
    if (s == "t_tele" || s == "t" || s == "T_tele") {
        return BenchGate::T_TELE;
    }
    throw ConfigError("unknown gate '" + s + "' (expected h, cz, rz_tele or t_tele)");
}

/// Stage 1 of the analog |+_theta>_L encoder on 7 local qubits: |+> on 0,1,4,5, |0> on 2,3,6,
/// then CNOTs 0->2 and 1->3. Qubits 0..3 are then stabilized by XXXX, ZIZI, IZIZ.
inline Circuit analog_encoder_stage1() {
    Circuit c;
    c.n_qubits = 7;
    for (uint32_t q = 0; q < 7; q++) {
        c.append(GateKind::PREP_Z, {q});
    }
    for (uint32_t q : {0u, 1u, 4u, 5u}) {
        c.append(GateKind::H, {q});
    }
    c.append(GateKind::CNOT, {0, 2});
    c.append(GateKind::CNOT, {1, 3});
    return c;
}

/// Stage 2 (after R_ZZ(theta) on qubits 2,3): six CNOTs completing the Steane |+_theta>_L encoder.
inline Circuit analog_encoder_stage2() {
    Circuit c;
    c.n_qubits = 7;
    static constexpr uint32_t CNOTS[6][2] = {{1, 6}, {4, 2}, {4, 3}, {5, 6}, {6, 2}, {2, 1}};
    for (const auto &g : CNOTS) {
        c.append(GateKind::CNOT, {g[0], g[1]});
    }
    return c;
}

/// Analog-rotation ancilla on `out` (Steane only, theta = 0): encoder with the R_ZZ site replaced by
/// a two-qubit depolarizing channel, followed by Steane-gadget post-selection.
inline void analog_prep_into(GadgetBuilder &b, const Block &out, const std::string &label) {
    if (b.code().name != "steane") {
        throw UnsupportedError("analog rotation ancilla is defined for the Steane code only");
    }
    b.emit_local(analog_encoder_stage1(), out, true);
    b.depolarize2(out[2], out[3]);
    if (b.noise().p > 0) {
        b.name_site(label + ".rzz");
    }
    b.emit_local(analog_encoder_stage2(), out, true);
    b.steane_gadget(out, label + ".ps");
}

inline GadgetCircuit analog_ancilla_prep(bool theta_is_zero, NoisePolicy noise,
                                         AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL) {
    if (!theta_is_zero) {
        throw UnsupportedError("only the theta = 0 (Clifford) instance can be simulated");
    }
    GadgetBuilder b(steane_code(), noise, mode);
    Block out = b.alloc_block();
    analog_prep_into(b, out, "rot");
    b.add_validation({{out, 'X'}}, {}, 1, "val");
    return b.finish("analog_ancilla_prep");
}

/// Steane-gadget post-selection applied to an ideal |0>_L data block; a test fixture for the
/// gadget itself. `inject_before` may add ops on the data before the gadget.
inline GadgetCircuit steane_gadget(const CssCode &code, NoisePolicy noise,
                                   AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL,
                                   const std::function<void(GadgetBuilder &, const Block &)> &inject_before = {}) {
    GadgetBuilder b(code, noise, mode);
    Block data = b.alloc_block();
    b.ideal_zero(data);
    if (inject_before) {
        inject_before(b, data);
    }
    b.steane_gadget(data, "ps");
    b.add_validation({{data, 'Z'}}, {}, 1, "val");
    return b.finish("steane_gadget");
}

/// Higher-order zero-level distillation with the S|+> proxy (Golay): injected S|+>, then r rounds
/// of {Bell-pair Hadamard test of the logical Y, Steane gadget}.
inline GadgetCircuit distillation(int r, NoisePolicy noise, AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL,
                                  const CssCode &code = golay_code()) {
    if (r < 1 || r > 3) {
        throw ConfigError("distillation rounds must be 1..3");
    }
    GadgetBuilder b(code, noise, mode);
    Block data = b.alloc_block();
    // Zero-level start: S|+> on one physical qubit, spread by the non-fault-tolerant injection
    // encoder, so single faults there leave logical errors for the Hadamard tests to catch.
    auto enc = injection_encoder(code);
    for (auto q : data) {
        b.prep(q, true);
    }
    b.gate1(GateKind::H, data[enc.input], true);
    b.gate1(GateKind::S, data[enc.input], true);
    b.emit_local(enc.circuit, data, true);
    for (int round = 1; round <= r; round++) {
        std::string l = "r" + std::to_string(round);
        uint32_t c0 = b.alloc_qubit(), c1 = b.alloc_qubit();
        b.prep(c0, true);
        b.prep(c1, true);
        b.gate1(GateKind::H, c1, true);
        b.gate2(GateKind::CNOT, c1, c0, true);
        b.transversal1(GateKind::S_DAG, data);
        for (auto q : data) {
            b.gate2(GateKind::CNOT, c1, q, true);
        }
        b.gate2(GateKind::CNOT, c1, c0, true);
        b.transversal1(GateKind::S, data);
        b.gate1(GateKind::H, c1, true);
        uint32_t m0 = b.measure_z(c0, true, l + ".flag");
        uint32_t m1 = b.measure_z(c1, true, l + ".test");
        b.detector({m0}, l + ".flag", true);
        b.detector({m1}, l + ".test", true);
        b.free_qubit(c0);
        b.free_qubit(c1);
        b.steane_gadget(data, l + ".ps");
    }
    b.add_validation({{data, 'Y'}}, {}, 1, "val");
    return b.finish("distillation");
}

/// Resource state consumed by one LOBT step of a gate benchmark.
inline void bench_ancilla(GadgetBuilder &b, BenchGate gate, const Block &anc, const std::string &label) {
    switch (gate) {
        case BenchGate::H:
            b.ancilla_zero(anc, label);
            b.transversal1(GateKind::H, anc);
            return;
        case BenchGate::RZ_TELE:
        case BenchGate::T_TELE:
            if (b.mode() == AncillaMode::EXPLICIT_PURIFICATION) {
                if (gate == BenchGate::T_TELE) {
                    throw UnsupportedError("explicit T-ancilla preparation is not simulated; use the model");
                }
                analog_prep_into(b, anc, label);
            } else {
                b.ideal_plus(anc);
                b.apply_model(anc, ROTATION_MODEL_WEIGHTS);
            }
            return;
        case BenchGate::CZ:
            break;
    }
    throw ConfigError("CZ ancillas come in pairs");
}

/// Logical Pauli frame: per logical qubit, the byproduct ids whose X (resp. Z) part is present.
struct LogicalFrame {
    std::vector<std::vector<uint8_t>> x, z;

    explicit LogicalFrame(size_t qubits) : x(qubits), z(qubits) {
    }
    static void toggle(std::vector<uint8_t> &v, uint32_t id) {
        if (v.size() <= id) {
            v.resize(id + 1, 0);
        }
        v[id] ^= 1;
    }
    static void add(std::vector<uint8_t> &dst, const std::vector<uint8_t> &src) {
        if (dst.size() < src.size()) {
            dst.resize(src.size(), 0);
        }
        for (size_t i = 0; i < src.size(); i++) {
            dst[i] ^= src[i];
        }
    }
    void hadamard(size_t q) {
        std::swap(x[q], z[q]);
    }
    void cz(size_t a, size_t b) {
        auto xa = x[a];
        add(z[a], x[b]);
        add(z[b], xa);
    }
    /// Byproducts that flip the measured value of a logical Pauli product.
    std::vector<uint32_t> anticommuting(const std::vector<std::pair<size_t, char>> &factors) const {
        std::vector<uint8_t> acc;
        for (const auto &[q, letter] : factors) {
            if (letter == 'X' || letter == 'Y') {
                add(acc, z[q]);
            }
            if (letter == 'Z' || letter == 'Y') {
                add(acc, x[q]);
            }
        }
        std::vector<uint32_t> out;
        for (size_t i = 0; i < acc.size(); i++) {
            if (acc[i]) {
                out.push_back(static_cast<uint32_t>(i));
            }
        }
        return out;
    }
};

/// Repeated application of a logical gate by LOBT, with an ideal validation after every step.
/// H-type gates alternate Z_L / X_L checks; CZ cycles {ZI,IZ} -> {XZ,ZX} -> {XI,IX}.
inline GadgetCircuit repeated_gate_circuit(BenchGate gate, const CssCode &code, NoisePolicy noise, uint32_t q_max,
                                           AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL) {
    if (q_max < 1) {
        throw ConfigError("Q_max must be at least 1");
    }
    GadgetBuilder b(code, noise, mode);
    if (gate != BenchGate::CZ) {
        LogicalFrame frame(1);
        Block data = b.alloc_block();
        b.ideal_plus(data);
        char expected = 'X';
        for (uint32_t step = 1; step <= q_max; step++) {
            std::string l = "q" + std::to_string(step);
            Block anc = b.alloc_block();
            bench_ancilla(b, gate, anc, l + ".anc");
            uint32_t m = b.lobt(data, anc, l + ".m");
            frame.hadamard(0);
            LogicalFrame::toggle(frame.x[0], m);
            expected = expected == 'X' ? 'Z' : 'X';
            b.add_validation({{anc, expected}}, frame.anticommuting({{0, expected}}), step, l + ".val");
            data = anc;
        }
        return b.finish("repeated_" + bench_gate_name(gate), q_max);
    }

    LogicalFrame frame(2);
    Block da = b.alloc_block(), db = b.alloc_block();
    b.ideal_plus(da);
    b.ideal_plus(db);
    // Expected stabilizer pair of U^Q |++>, U = CZ (H x H).
    static constexpr char PAIRS[3][2][2] = {{{'Z', 'I'}, {'I', 'Z'}}, {{'X', 'Z'}, {'Z', 'X'}}, {{'X', 'I'}, {'I', 'X'}}};
    for (uint32_t step = 1; step <= q_max; step++) {
        std::string l = "q" + std::to_string(step);
        Block aa = b.alloc_block(), ab = b.alloc_block();
        b.ancilla_zero(aa, l + ".ga");
        b.ancilla_zero(ab, l + ".gb");
        b.transversal1(GateKind::H, aa);
        b.transversal1(GateKind::H, ab);
        b.transversal2(GateKind::CZ, aa, ab);
        uint32_t ma = b.lobt(da, aa, l + ".ma");
        uint32_t mb = b.lobt(db, ab, l + ".mb");
        frame.hadamard(0);
        frame.hadamard(1);
        LogicalFrame::toggle(frame.x[0], ma);
        LogicalFrame::toggle(frame.x[1], mb);
        frame.cz(0, 1);
        const auto &pair = PAIRS[(step - 1) % 3];
        for (int k = 0; k < 2; k++) {
            std::vector<GadgetBuilder::LogicalFactor> factors;
            std::vector<std::pair<size_t, char>> frame_factors;
            if (pair[k][0] != 'I') {
                factors.push_back({aa, pair[k][0]});
                frame_factors.push_back({0, pair[k][0]});
            }
            if (pair[k][1] != 'I') {
                factors.push_back({ab, pair[k][1]});
                frame_factors.push_back({1, pair[k][1]});
            }
            b.add_validation(factors, frame.anticommuting(frame_factors), step, l + ".val" + std::to_string(k));
        }
        da = aa;
        db = ab;
    }
    return b.finish("repeated_cz", q_max);
}

inline GadgetCircuit lobt_h(const CssCode &code, AncillaMode mode, NoisePolicy noise) {
    return repeated_gate_circuit(BenchGate::H, code, noise, 1, mode);
}
inline GadgetCircuit lobt_cz(const CssCode &code, AncillaMode mode, NoisePolicy noise) {
    return repeated_gate_circuit(BenchGate::CZ, code, noise, 1, mode);
}
inline GadgetCircuit lobt_rz(const CssCode &code, AncillaMode mode, NoisePolicy noise) {
    return repeated_gate_circuit(BenchGate::RZ_TELE, code, noise, 1, mode);
}

/// Name -> builder, for CLI dispatch. Builders take (code, p, ancilla mode, r, Q_max).
struct GadgetRequest {
    std::string code = "steane";
    double p = 0;
    AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL;
    Readout readout = Readout::DEPOLARIZE;
    int r = 1;
    uint32_t q_max = 12;

    NoisePolicy noise() const {
        return NoisePolicy::uniform(p, readout);
    }
};

inline const std::map<std::string, std::function<GadgetCircuit(const GadgetRequest &)>> &gadget_registry() {
    static const std::map<std::string, std::function<GadgetCircuit(const GadgetRequest &)>> reg = {
        {"purification", [](const GadgetRequest &r) { return purification_zero(code_by_name(r.code), r.noise()); }},
        {"steane_gadget", [](const GadgetRequest &r) { return steane_gadget(code_by_name(r.code), r.noise(), r.mode); }},
        {"analog_rz", [](const GadgetRequest &r) { return analog_ancilla_prep(true, r.noise(), r.mode); }},
        {"distillation", [](const GadgetRequest &r) { return distillation(r.r, r.noise(), r.mode, code_by_name(r.code)); }},
        {"lobt_h", [](const GadgetRequest &r) { return lobt_h(code_by_name(r.code), r.mode, r.noise()); }},
        {"lobt_cz", [](const GadgetRequest &r) { return lobt_cz(code_by_name(r.code), r.mode, r.noise()); }},
        {"lobt_rz", [](const GadgetRequest &r) { return lobt_rz(code_by_name(r.code), r.mode, r.noise()); }},
        {"bench_h", [](const GadgetRequest &r) { return repeated_gate_circuit(BenchGate::H, code_by_name(r.code), r.noise(), r.q_max, r.mode); }},
        {"bench_cz", [](const GadgetRequest &r) { return repeated_gate_circuit(BenchGate::CZ, code_by_name(r.code), r.noise(), r.q_max, r.mode); }},
        {"bench_rz_tele", [](const GadgetRequest &r) { return repeated_gate_circuit(BenchGate::RZ_TELE, code_by_name(r.code), r.noise(), r.q_max, r.mode); }},
        {"bench_t_tele", [](const GadgetRequest &r) { return repeated_gate_circuit(BenchGate::T_TELE, code_by_name(r.code), r.noise(), r.q_max, r.mode); }},
    };
    return reg;
}

}  // namespace mbftqc

#endif
