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

#ifndef MBFTQC_CSS_CODES_H
#define MBFTQC_CSS_CODES_H

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mbftqc/circuit.h"
#include "mbftqc/errors.h"
#include "mbftqc/pauli.h"

namespace mbftqc {

inline bool parity(uint64_t v) {
    return std::popcount(v) & 1;
}

/// A self-dual CSS code on at most 64 qubits. Check-matrix rows and logical supports are bit masks.
struct CssCode {
    std::string name;
    size_t n = 0;
    size_t k = 1;
    size_t d = 0;
    std::vector<uint64_t> h_x;
    std::vector<uint64_t> h_z;
    uint64_t logical_x_support = 0;
    uint64_t logical_z_support = 0;

    size_t num_checks() const {
        return h_x.size();
    }
    uint64_t all_qubits() const {
        return n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    }

    PauliString logical_x() const {
        PauliString p(n);
        for (size_t q = 0; q < n; q++) {
            if ((logical_x_support >> q) & 1) {
                p.set(q, true, false);
            }
        }
        return p;
    }
    PauliString logical_z() const {
        PauliString p(n);
        for (size_t q = 0; q < n; q++) {
            if ((logical_z_support >> q) & 1) {
                p.set(q, false, true);
            }
        }
        return p;
    }

    /// Syndrome of an error support against a list of check rows (bit r = row r).
    static uint32_t syndrome_of(const std::vector<uint64_t> &rows, uint64_t err) {
        uint32_t s = 0;
        for (size_t r = 0; r < rows.size(); r++) {
            s |= static_cast<uint32_t>(parity(rows[r] & err)) << r;
        }
        return s;
    }
    /// Syndrome of an X-type error, read out by the Z checks.
    uint32_t x_error_syndrome(uint64_t err) const {
        return syndrome_of(h_z, err);
    }
    /// Syndrome of a Z-type error, read out by the X checks.
    uint32_t z_error_syndrome(uint64_t err) const {
        return syndrome_of(h_x, err);
    }

    /// Check-matrix text: one 0/1 row per check.
    std::string str() const {
        std::ostringstream out;
        out << name << " [[" << n << "," << k << "," << d << "]]\n";
        auto row = [&](uint64_t m) {
            for (size_t q = 0; q < n; q++) {
                out << ((m >> q) & 1);
            }
            out << "\n";
        };
        out << "H_X\n";
        for (auto r : h_x) {
            row(r);
        }
        out << "H_Z\n";
        for (auto r : h_z) {
            row(r);
        }
        out << "L_X\n";
        row(logical_x_support);
        out << "L_Z\n";
        row(logical_z_support);
        return out.str();
    }
};

inline CssCode steane_code() {
    CssCode c;
    c.name = "steane";
    c.n = 7;
    c.d = 3;
    // Column q of the check matrix is the binary expansion of q + 1.
    for (int bit = 2; bit >= 0; bit--) {
        uint64_t row = 0;
        for (size_t q = 0; q < 7; q++) {
            if (((q + 1) >> bit) & 1) {
                row |= uint64_t{1} << q;
            }
        }
        c.h_x.push_back(row);
    }
    c.h_z = c.h_x;
    c.logical_x_support = c.logical_z_support = 0b0000111;
    return c;
}

/// Generator polynomial of the cyclic binary [23,12,7] Golay code: x^11+x^10+x^6+x^5+x^4+x^2+1.
inline constexpr uint64_t GOLAY_GENERATOR = (1u << 11) | (1u << 10) | (1u << 6) | (1u << 5) | (1u << 4) | (1u << 2) | 1u;

inline CssCode golay_code() {
    CssCode c;
    c.name = "golay";
    c.n = 23;
    c.d = 7;
    // (1+x) g(x) generates the even-weight subcode, which is the dual of the Golay code.
    uint64_t even_gen = GOLAY_GENERATOR ^ (GOLAY_GENERATOR << 1);
    for (size_t i = 0; i < 11; i++) {
        c.h_x.push_back(even_gen << i);
    }
    c.h_z = c.h_x;
    c.logical_x_support = c.logical_z_support = GOLAY_GENERATOR;
    return c;
}

inline CssCode code_by_name(const std::string &name) {
    if (name == "steane") {
        return steane_code();
    }
    if (name == "golay") {
        return golay_code();
    }
    throw ConfigError("unknown code '" + name + "' (expected steane or golay)");
}

/// Syndrome -> minimum-weight correction, for errors up to max_weight.
struct LookupTable {
    size_t n = 0;
    size_t num_checks = 0;
    size_t max_weight = 0;
    std::vector<uint8_t> present;
    std::vector<uint64_t> correction;

    size_t size() const {
        return static_cast<size_t>(std::count(present.begin(), present.end(), 1));
    }
    std::optional<uint64_t> lookup(uint32_t syndrome) const {
        if (syndrome >= present.size() || !present[syndrome]) {
            return std::nullopt;
        }
        return correction[syndrome];
    }
    bool operator==(const LookupTable &other) const = default;
};

/// Enumerates all errors of weight <= max_weight in order of weight.
inline LookupTable build_lookup_from_rows(size_t n, const std::vector<uint64_t> &rows, size_t max_weight) {
    if (rows.size() > 24) {
        throw DecoderError("too many checks for a lookup table");
    }
    LookupTable t;
    t.n = n;
    t.num_checks = rows.size();
    t.max_weight = max_weight;
    t.present.assign(size_t{1} << rows.size(), 0);
    t.correction.assign(size_t{1} << rows.size(), 0);
    std::vector<size_t> idx;
    auto visit = [&](uint64_t err) {
        uint32_t s = CssCode::syndrome_of(rows, err);
        if (t.present[s]) {
            throw DecoderError("two errors of weight <= " + std::to_string(max_weight) + " share syndrome " +
                               std::to_string(s));
        }
        t.present[s] = 1;
        t.correction[s] = err;
    };
    for (size_t w = 0; w <= max_weight; w++) {
        // Lexicographic enumeration of w-subsets of {0..n-1}.
        idx.resize(w);
        for (size_t i = 0; i < w; i++) {
            idx[i] = i;
        }
        if (w > n) {
            break;
        }
        while (true) {
            uint64_t err = 0;
            for (auto i : idx) {
                err |= uint64_t{1} << i;
            }
            visit(err);
            size_t i = w;
            while (i > 0 && idx[i - 1] == n - w + i - 1) {
                i--;
            }
            if (i == 0) {
                break;
            }
            idx[i - 1]++;
            for (size_t j = i; j < w; j++) {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    return t;
}

inline LookupTable build_lookup(const CssCode &code, size_t max_weight) {
    if (max_weight > (code.d - 1) / 2) {
        throw DecoderError("max_weight exceeds the code's correction radius");
    }
    return build_lookup_from_rows(code.n, code.h_x, max_weight);
}

/// Process-wide cached full-radius tables.
inline std::shared_ptr<const LookupTable> default_lookup(const CssCode &code) {
    static const auto steane = std::make_shared<const LookupTable>(build_lookup(steane_code(), 1));
    static const auto golay = std::make_shared<const LookupTable>(build_lookup(golay_code(), 3));
    if (code.name == "steane") {
        return steane;
    }
    if (code.name == "golay") {
        return golay;
    }
    return std::make_shared<const LookupTable>(build_lookup(code, (code.d - 1) / 2));
}

enum class Basis : uint8_t { X, Z };

/// Decodes a transversal measurement. Returns nullopt when the syndrome is not in the table.
inline std::optional<bool> corrected_logical(const CssCode &code, const LookupTable &table, uint64_t raw_bits,
                                             Basis basis) {
    // Z-basis outcomes see X errors through the Z checks, and vice versa.
    const auto &rows = basis == Basis::Z ? code.h_z : code.h_x;
    uint64_t logical = basis == Basis::Z ? code.logical_z_support : code.logical_x_support;
    auto corr = table.lookup(CssCode::syndrome_of(rows, raw_bits & code.all_qubits()));
    if (!corr) {
        return std::nullopt;
    }
    return parity(raw_bits & logical) ^ parity(*corr & logical);
}

inline std::optional<bool> corrected_logical(const CssCode &code, const LookupTable &table,
                                             const std::vector<uint8_t> &raw_bits, Basis basis) {
    if (raw_bits.size() != code.n) {
        throw SizeError("raw measurement has " + std::to_string(raw_bits.size()) + " bits, code has " +
                        std::to_string(code.n));
    }
    uint64_t m = 0;
    for (size_t q = 0; q < raw_bits.size(); q++) {
        m |= uint64_t{raw_bits[q] & 1u} << q;
    }
    return corrected_logical(code, table, m, basis);
}

/// Binary blob: "MBLT", u32 version, u32 n, u32 num_checks, u32 max_weight, then per syndrome
/// a presence byte and a u64 correction, all little endian.
inline void write_lookup(std::ostream &out, const LookupTable &t) {
    auto put = [&](uint64_t v, int bytes) {
        for (int k = 0; k < bytes; k++) {
            out.put(static_cast<char>((v >> (8 * k)) & 0xFF));
        }
    };
    out.write("MBLT", 4);
    put(1, 4);
    put(t.n, 4);
    put(t.num_checks, 4);
    put(t.max_weight, 4);
    for (size_t s = 0; s < t.present.size(); s++) {
        put(t.present[s], 1);
        put(t.correction[s], 8);
    }
}

inline LookupTable read_lookup(std::istream &in) {
    auto get = [&](int bytes) {
        uint64_t v = 0;
        for (int k = 0; k < bytes; k++) {
            int c = in.get();
            if (c == EOF) {
                throw DecoderError("truncated lookup blob");
            }
            v |= uint64_t(uint8_t(c)) << (8 * k);
        }
        return v;
    };
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "MBLT") {
        throw DecoderError("not a lookup blob");
    }
    if (get(4) != 1) {
        throw DecoderError("unsupported lookup blob version");
    }
    LookupTable t;
    t.n = get(4);
    t.num_checks = get(4);
    t.max_weight = get(4);
    if (t.num_checks > 24 || t.n > 64) {
        throw DecoderError("lookup blob dimensions out of range");
    }
    t.present.resize(size_t{1} << t.num_checks);
    t.correction.resize(size_t{1} << t.num_checks);
    for (size_t s = 0; s < t.present.size(); s++) {
        t.present[s] = static_cast<uint8_t>(get(1));
        t.correction[s] = get(8);
    }
    return t;
}

namespace detail {

struct Rref {
    std::vector<uint64_t> rows;
    std::vector<size_t> pivots;
};

inline Rref row_reduce(std::vector<uint64_t> rows, size_t n) {
    Rref out;
    size_t r = 0;
    for (size_t col = 0; col < n && r < rows.size(); col++) {
        uint64_t bit = uint64_t{1} << col;
        size_t sel = r;
        while (sel < rows.size() && !(rows[sel] & bit)) {
            sel++;
        }
        if (sel == rows.size()) {
            continue;
        }
        std::swap(rows[r], rows[sel]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != r && (rows[i] & bit)) {
                rows[i] ^= rows[r];
            }
        }
        out.pivots.push_back(col);
        r++;
    }
    rows.resize(r);
    out.rows = rows;
    return out;
}

}  // namespace detail

/// Noiseless circuit preparing sum_{c in span(rows)} |c> from |0...0>, in standard form:
/// pivots are put in |+>, then each remaining qubit collects its parity by CNOTs, reusing
/// already-finished qubits whose parity set is a subset of the one needed.
inline Circuit synthesize_span_state(size_t n, const std::vector<uint64_t> &rows) {
    auto rr = detail::row_reduce(rows, n);
    Circuit c;
    c.n_qubits = n;
    for (size_t q = 0; q < n; q++) {
        c.append(GateKind::PREP_Z, {static_cast<uint32_t>(q)});
    }
    uint64_t pivot_mask = 0;
    for (auto p : rr.pivots) {
        c.append(GateKind::H, {static_cast<uint32_t>(p)});
        pivot_mask |= uint64_t{1} << p;
    }
    // Parity set of each non-pivot column, as a mask over row indices.
    struct Target {
        size_t col;
        uint64_t set;
    };
    std::vector<Target> targets;
    for (size_t col = 0; col < n; col++) {
        if ((pivot_mask >> col) & 1) {
            continue;
        }
        uint64_t set = 0;
        for (size_t i = 0; i < rr.rows.size(); i++) {
            if ((rr.rows[i] >> col) & 1) {
                set |= uint64_t{1} << i;
            }
        }
        if (set) {
            targets.push_back({col, set});
        }
    }
    std::stable_sort(targets.begin(), targets.end(),
                     [](const Target &a, const Target &b) { return std::popcount(a.set) < std::popcount(b.set); });
    std::vector<Target> done;
    for (const auto &t : targets) {
        uint64_t remaining = t.set;
        while (true) {
            const Target *best = nullptr;
            for (const auto &d : done) {
                if (std::popcount(d.set) >= 2 && (d.set & remaining) == d.set &&
                    (!best || std::popcount(d.set) > std::popcount(best->set))) {
                    best = &d;
                }
            }
            if (!best) {
                break;
            }
            c.append(GateKind::CNOT, {static_cast<uint32_t>(best->col), static_cast<uint32_t>(t.col)});
            remaining &= ~best->set;
        }
        for (size_t i = 0; i < rr.rows.size(); i++) {
            if ((remaining >> i) & 1) {
                c.append(GateKind::CNOT, {static_cast<uint32_t>(rr.pivots[i]), static_cast<uint32_t>(t.col)});
            }
        }
        done.push_back(t);
    }
    return c;
}

/// Hand-searched |0>_L encoder for the Golay code: H on the pivots, then 58 CNOTs that build the
/// remaining columns in place. Found by a randomized greedy search over information sets.
inline Circuit golay_zero_encoder() {
    static constexpr uint32_t PIVOTS[] = {15, 13, 9, 11, 8, 10, 7, 14, 19, 21, 3};
    static constexpr uint32_t CNOTS[][2] = {
        {8, 16}, {14, 20}, {13, 18}, {10, 1}, {21, 4}, {3, 5}, {3, 22}, {15, 0}, {19, 2}, {22, 2}, {2, 12},
        {2, 1}, {9, 22}, {22, 18}, {0, 18}, {18, 20}, {20, 16}, {16, 5}, {5, 4}, {4, 12}, {2, 20}, {10, 6},
        {7, 2}, {7, 5}, {5, 17}, {11, 22}, {6, 17}, {11, 20}, {20, 17}, {17, 0}, {9, 16}, {11, 6}, {6, 16},
        {7, 1}, {11, 4}, {3, 5}, {14, 4}, {10, 18}, {21, 18}, {21, 2}, {2, 22}, {21, 6}, {14, 17}, {7, 0},
        {13, 6}, {8, 2}, {13, 12}, {14, 1}, {15, 5}, {9, 17}, {15, 1}, {10, 2}, {21, 0}, {7, 6}, {13, 2},
        {7, 4}, {14, 6}, {3, 22}};
    Circuit c;
    c.n_qubits = 23;
    for (uint32_t q = 0; q < 23; q++) {
        c.append(GateKind::PREP_Z, {q});
    }
    for (auto p : PIVOTS) {
        c.append(GateKind::H, {p});
    }
    for (const auto &ct : CNOTS) {
        c.append(GateKind::CNOT, {ct[0], ct[1]});
    }
    return c;
}

/// Qubit permutation (code automorphism) used for encoder variant 1..4.
inline std::vector<uint32_t> encoder_permutation(const CssCode &code, int variant) {
    if (variant < 1 || variant > 4) {
        throw ConfigError("encoder variant must be 1..4");
    }
    std::vector<uint32_t> perm(code.n);
    if (code.name == "steane") {
        // Variants (1)=(3) and (2)=(4); the second wiring relabels columns by a GL(3,2) element
        // (cyclic rotation of the three label bits).
        for (uint32_t q = 0; q < 7; q++) {
            uint32_t label = q + 1;
            uint32_t rot = ((label << 1) | (label >> 2)) & 7;
            perm[q] = variant % 2 == 1 ? q : rot - 1;
        }
        return perm;
    }
    if (code.name == "golay") {
        // Cyclic shifts chosen so that cancellation_scan reports no residual above weight 2.
        static constexpr uint32_t SHIFTS[4] = {0, 1, 3, 4};
        for (uint32_t q = 0; q < 23; q++) {
            perm[q] = (q + SHIFTS[variant - 1]) % 23;
        }
        return perm;
    }
    for (uint32_t q = 0; q < code.n; q++) {
        perm[q] = q;
    }
    return perm;
}

inline Circuit permute_qubits(const Circuit &c, const std::vector<uint32_t> &perm) {
    Circuit out;
    out.n_qubits = c.n_qubits;
    for (auto g : c.ops) {
        for (auto &t : g.targets) {
            t = perm[t];
        }
        out.append(std::move(g));
    }
    for (const auto &d : c.detectors) {
        out.add_detector(d.slots, d.label);
    }
    return out;
}

/// Noiseless |0>_L preparation on qubits 0..n-1.
inline Circuit encoding_circuit(const CssCode &code, int variant) {
    auto base = code.name == "golay" ? golay_zero_encoder() : synthesize_span_state(code.n, code.h_x);
    return permute_qubits(base, encoder_permutation(code, variant));
}

/// Non-fault-tolerant state injection: a unitary taking |psi> on `input` (other qubits in |0>)
/// to |psi>_L. The logical X row is reduced against the stabilizer pivots and fanned out from
/// `input` first; the stabilizer pivots are fanned out afterwards.
struct InjectionEncoder {
    uint32_t input = 0;
    Circuit circuit;
};

inline InjectionEncoder injection_encoder(const CssCode &code) {
    auto rr = detail::row_reduce(code.h_x, code.n);
    uint64_t logical = code.logical_x_support;
    for (size_t i = 0; i < rr.rows.size(); i++) {
        if ((logical >> rr.pivots[i]) & 1) {
            logical ^= rr.rows[i];
        }
    }
    InjectionEncoder e;
    e.input = static_cast<uint32_t>(std::countr_zero(logical));
    e.circuit.n_qubits = code.n;
    for (auto p : rr.pivots) {
        e.circuit.append(GateKind::H, {static_cast<uint32_t>(p)});
    }
    auto fan_out = [&](uint32_t src, uint64_t row) {
        for (uint32_t q = 0; q < code.n; q++) {
            if (q != src && ((row >> q) & 1)) {
                e.circuit.append(GateKind::CNOT, {src, q});
            }
        }
    };
    fan_out(e.input, logical);
    for (size_t i = 0; i < rr.rows.size(); i++) {
        fan_out(static_cast<uint32_t>(rr.pivots[i]), rr.rows[i]);
    }
    return e;
}

/// Noiseless |+>_L preparation on qubits 0..n-1.
inline Circuit plus_encoding_circuit(const CssCode &code) {
    auto rows = code.h_x;
    rows.push_back(code.logical_x_support);
    return synthesize_span_state(code.n, rows);
}

/// X and Z parts of a Pauli error on an encoder's output block, as qubit masks.
struct FaultPattern {
    uint64_t x = 0;
    uint64_t z = 0;
    auto operator<=>(const FaultPattern &) const = default;
};

/// Output error patterns of every single Pauli fault placed after an op of a PREP_Z/H/CNOT
/// encoder (3 per one-qubit op, 15 per CNOT), deduplicated and sorted.
inline std::vector<FaultPattern> encoder_fault_patterns(const Circuit &c) {
    auto propagate = [&](size_t from, FaultPattern f) {
        for (size_t i = from; i < c.ops.size(); i++) {
            const auto &g = c.ops[i];
            uint64_t a = uint64_t{1} << g.targets[0];
            switch (g.kind) {
                case GateKind::PREP_Z:
                    f.x &= ~a;
                    f.z &= ~a;
                    break;
                case GateKind::H: {
                    bool bx = f.x & a, bz = f.z & a;
                    f.x = (f.x & ~a) | (bz ? a : 0);
                    f.z = (f.z & ~a) | (bx ? a : 0);
                    break;
                }
                case GateKind::CNOT: {
                    uint64_t b = uint64_t{1} << g.targets[1];
                    if (f.x & a) {
                        f.x ^= b;
                    }
                    if (f.z & b) {
                        f.z ^= a;
                    }
                    break;
                }
                default:
                    throw ConfigError(std::string("encoder scan does not support ") + std::string(gate_info(g.kind).name));
            }
        }
        return f;
    };
    std::vector<FaultPattern> out;
    for (size_t i = 0; i < c.ops.size(); i++) {
        const auto &t = c.ops[i].targets;
        uint32_t arity = c.ops[i].kind == GateKind::CNOT ? 2 : 1;
        for (uint32_t k = 1; k < (arity == 2 ? 16u : 4u); k++) {
            FaultPattern f;
            for (uint32_t j = 0; j < arity; j++) {
                uint32_t bits = (k >> (2 * j)) & 3;
                uint64_t m = uint64_t{1} << t[j];
                f.x |= (bits & 1) ? m : 0;
                f.z |= (bits & 2) ? m : 0;
            }
            out.push_back(propagate(i + 1, f));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct CancellationScan {
    size_t hazards = 0;        // fault pairs that pass a comparison and leave a residual of weight > t_max
    size_t worst_residual = 0;
};

/// Checks the four-encoder purification against correlated cancellation: one fault in each
/// of two compared encoders can go unflagged when their patterns have equal syndromes (and,
/// for X errors, equal logical parity). Encoders (1,2) and (3,4) are compared on X errors and
/// {1,2} x {3,4} on Z errors. The residual is the minimum weight of the surviving error modulo
/// stabilizers (plus logical Z for phase errors, which do not affect |0>_L).
inline CancellationScan cancellation_scan(const CssCode &code, const std::vector<Circuit> &encoders,
                                          size_t t_max = 2) {
    if (encoders.size() != 4) {
        throw ConfigError("cancellation scan needs four encoders");
    }
    auto span = [](const std::vector<uint64_t> &gens) {
        std::vector<uint64_t> s{0};
        for (auto g : gens) {
            size_t m = s.size();
            for (size_t i = 0; i < m; i++) {
                s.push_back(s[i] ^ g);
            }
        }
        return s;
    };
    auto x_group = span(code.h_x);
    auto z_gens = code.h_z;
    z_gens.push_back(code.logical_z_support);
    auto z_group = span(z_gens);
    auto min_weight = [](uint64_t e, const std::vector<uint64_t> &group) {
        int w = 64;
        for (auto s : group) {
            w = std::min(w, std::popcount(e ^ s));
        }
        return static_cast<size_t>(w);
    };
    auto syndrome = [](uint64_t e, const std::vector<uint64_t> &rows) {
        uint64_t s = 0;
        for (size_t i = 0; i < rows.size(); i++) {
            s |= uint64_t{parity(e & rows[i])} << i;
        }
        return s;
    };
    std::vector<std::vector<FaultPattern>> pats;
    for (const auto &e : encoders) {
        pats.push_back(encoder_fault_patterns(e));
    }
    CancellationScan r;
    auto visit = [&](size_t w) {
        r.worst_residual = std::max(r.worst_residual, w);
        r.hazards += w > t_max;
    };
    // X errors are detected by Z checks; the comparison also sees the logical Z parity.
    for (auto [a, b] : {std::pair{0, 1}, std::pair{2, 3}}) {
        std::vector<uint64_t> keys;
        for (const auto &f : pats[b]) {
            keys.push_back(syndrome(f.x, code.h_z) | uint64_t{parity(f.x & code.logical_z_support)} << 63);
        }
        std::sort(keys.begin(), keys.end());
        for (const auto &f : pats[a]) {
            uint64_t key = syndrome(f.x, code.h_z) | uint64_t{parity(f.x & code.logical_z_support)} << 63;
            if (f.x && std::binary_search(keys.begin(), keys.end(), key)) {
                visit(min_weight(f.x, x_group));
            }
        }
    }
    for (int a : {0, 1}) {
        for (int b : {2, 3}) {
            std::vector<uint64_t> keys;
            for (const auto &f : pats[b]) {
                keys.push_back(syndrome(f.z, code.h_x));
            }
            std::sort(keys.begin(), keys.end());
            for (const auto &f : pats[a]) {
                if (f.z && std::binary_search(keys.begin(), keys.end(), syndrome(f.z, code.h_x))) {
                    visit(min_weight(f.z, z_group));
                }
            }
        }
    }
    return r;
}

inline CancellationScan cancellation_scan(const CssCode &code, size_t t_max = 2) {
    std::vector<Circuit> enc;
    for (int v = 1; v <= 4; v++) {
        enc.push_back(encoding_circuit(code, v));
    }
    return cancellation_scan(code, enc, t_max);
}

}  // namespace mbftqc

#endif
