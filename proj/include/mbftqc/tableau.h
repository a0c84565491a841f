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

#ifndef MBFTQC_TABLEAU_H
#define MBFTQC_TABLEAU_H

#include <cassert>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "mbftqc/circuit.h"
#include "mbftqc/pauli.h"

namespace mbftqc {

struct MeasureResult {
    bool bit = false;
    bool deterministic = true;
    /// For a random outcome: a Pauli that maps the post-measurement state of one branch onto
    /// the other. It commutes with every remaining stabilizer and anticommutes with the
    /// measured observable.
    PauliString gauge;
};

/// Aaronson-Gottesman stabilizer tableau (destabilizers + stabilizers). Deliberately simple.
class Tableau {
   public:
    explicit Tableau(size_t n) : n_(n) {
        rows_.reserve(2 * n);
        for (size_t i = 0; i < n; i++) {
            PauliString d(n);
            d.set(i, true, false);
            rows_.push_back(std::move(d));
        }
        for (size_t i = 0; i < n; i++) {
            PauliString s(n);
            s.set(i, false, true);
            rows_.push_back(std::move(s));
        }
    }

    size_t num_qubits() const {
        return n_;
    }
    const PauliString &stabilizer(size_t i) const {
        return rows_[n_ + i];
    }
    const PauliString &destabilizer(size_t i) const {
        return rows_[i];
    }

    /// Applies a unitary or a preparation. Noise kinds and measurements are rejected. A reset
    /// collapses an entangled qubit with a random outcome when an rng is supplied.
    void apply_gate(const Gate &g, std::mt19937_64 *rng = nullptr) {
        for (auto q : g.targets) {
            if (q >= n_) {
                throw SizeError("target " + std::to_string(q) + " out of range");
            }
        }
        const auto &info = gate_info(g.kind);
        if (info.unitary) {
            for (auto &r : rows_) {
                detail::conjugate_in_place(r, g.kind, g.targets.data());
            }
            return;
        }
        if (g.kind == GateKind::PREP_Z || g.kind == GateKind::PREP_X) {
            uint32_t q = g.targets[0];
            if (measure_z(q, rng).bit) {
                apply_unitary(GateKind::X, q);
            }
            if (g.kind == GateKind::PREP_X) {
                apply_unitary(GateKind::H, q);
            }
            return;
        }
        throw InvalidGateError(std::string(info.name) + " cannot be applied to a tableau");
    }

    void apply_unitary(GateKind kind, uint32_t a, uint32_t b = 0) {
        uint32_t t[2] = {a, b};
        for (auto &r : rows_) {
            detail::conjugate_in_place(r, kind, t);
        }
    }

    /// Eigenvalue of obs if it is (up to sign) in the stabilizer group. No collapse.
    /// Returns +1/-1 as false/true; nullopt if undefined.
    std::optional<bool> measure_observable(const PauliString &obs) const {
        if (obs.num_qubits() != n_) {
            throw SizeError("observable size mismatch");
        }
        for (size_t i = 0; i < n_; i++) {
            if (rows_[n_ + i].anticommutes(obs)) {
                return std::nullopt;
            }
        }
        return deterministic_value(obs);
    }

    /// Measures a Hermitian Pauli product, collapsing the state. A random outcome is drawn from rng,
    /// or forced to 0 (the +1 eigenvalue) when rng is null.
    MeasureResult measure_pauli(const PauliString &obs, std::mt19937_64 *rng = nullptr) {
        if (obs.num_qubits() != n_) {
            throw SizeError("observable size mismatch");
        }
        size_t p = 2 * n_;
        for (size_t i = n_; i < 2 * n_; i++) {
            if (rows_[i].anticommutes(obs)) {
                p = i;
                break;
            }
        }
        MeasureResult res;
        if (p == 2 * n_) {
            res.bit = deterministic_value(obs);
            return res;
        }
        for (size_t i = 0; i < 2 * n_; i++) {
            if (i != p && rows_[i].anticommutes(obs)) {
                rows_[i].right_mul(rows_[p]);
            }
        }
        res.deterministic = false;
        res.bit = rng ? ((*rng)() & 1) : false;
        res.gauge = rows_[p];
        res.gauge.set_log_i(0);
        rows_[p - n_] = rows_[p];
        rows_[p] = obs;
        if (res.bit) {
            rows_[p].flip_sign();
        }
        return res;
    }

    MeasureResult measure_z(uint32_t q, std::mt19937_64 *rng = nullptr) {
        PauliString z(n_);
        z.set(q, false, true);
        return measure_pauli(z, rng);
    }

    /// Checks the commutation structure. O(n^3 / 64); intended for tests.
    bool invariants_hold() const {
        for (size_t i = 0; i < n_; i++) {
            for (size_t j = 0; j < n_; j++) {
                if (rows_[n_ + i].anticommutes(rows_[n_ + j])) {
                    return false;
                }
                if (rows_[i].anticommutes(rows_[n_ + j]) != (i == j)) {
                    return false;
                }
            }
            if (!rows_[n_ + i].is_hermitian()) {
                return false;
            }
        }
        return true;
    }

   private:
    bool deterministic_value(const PauliString &obs) const {
        PauliString acc(n_);
        for (size_t i = 0; i < n_; i++) {
            if (rows_[i].anticommutes(obs)) {
                acc.right_mul(rows_[n_ + i]);
            }
        }
        assert(acc.xs() == obs.xs() && acc.zs() == obs.zs());
        return acc.log_i() != obs.log_i();
    }

    size_t n_;
    std::vector<PauliString> rows_;
};

inline PauliString observable_of(const Gate &g, size_t n) {
    PauliString p(n);
    for (size_t k = 0; k < g.targets.size(); k++) {
        p.set_letter(g.targets[k], g.bases[k]);
    }
    return p;
}

/// Noiseless execution record of a circuit.
struct TableauRun {
    std::vector<uint8_t> bits;            // per measurement slot
    std::vector<uint8_t> deterministic;   // per measurement slot
    std::vector<PauliString> gauges;      // per slot; identity when deterministic
    std::vector<uint8_t> detector_bits;
};

/// Runs a circuit on the tableau with noise annotations ignored. Random outcomes are forced to 0
/// unless an rng is supplied.
inline TableauRun run_tableau(const Circuit &c, std::mt19937_64 *rng = nullptr) {
    Tableau t(c.n_qubits);
    TableauRun run;
    for (const auto &g : c.ops) {
        const auto &info = gate_info(g.kind);
        if (info.noise) {
            continue;
        }
        if (!info.measurement) {
            t.apply_gate(g, rng);
            continue;
        }
        MeasureResult m;
        if (g.kind == GateKind::MEAS_Z) {
            m = t.measure_z(g.targets[0], rng);
        } else if (g.kind == GateKind::MEAS_X) {
            t.apply_unitary(GateKind::H, g.targets[0]);
            m = t.measure_z(g.targets[0], rng);
            t.apply_unitary(GateKind::H, g.targets[0]);
            if (!m.deterministic) {
                detail::conjugate_in_place(m.gauge, GateKind::H, g.targets.data());
                m.gauge.set_log_i(0);
            }
        } else {
            m = t.measure_pauli(observable_of(g, c.n_qubits), rng);
        }
        run.bits.push_back(m.bit);
        run.deterministic.push_back(m.deterministic);
        run.gauges.push_back(m.deterministic ? PauliString(c.n_qubits) : std::move(m.gauge));
    }
    for (const auto &d : c.detectors) {
        uint8_t v = 0;
        for (auto s : d.slots) {
            v ^= run.bits[s];
        }
        run.detector_bits.push_back(v);
    }
    return run;
}

/// A concrete Pauli fault at one noise site: letters for the site's target qubits ('I','X','Y','Z').
struct Fault {
    size_t site = 0;
    char p0 = 'I';
    char p1 = 'I';
};

/// Replaces the given noise sites by explicit Pauli gates and drops all other noise.
/// Sites are numbered by their order among the circuit's noise annotations.
inline Circuit instantiate_faults(const Circuit &c, const std::vector<Fault> &faults) {
    std::map<size_t, std::vector<const Fault *>> by_site;
    for (const auto &f : faults) {
        by_site[f.site].push_back(&f);
    }
    Circuit out;
    out.n_qubits = c.n_qubits;
    size_t site = 0;
    auto emit = [&](char letter, uint32_t q) {
        if (letter == 'X') {
            out.append(GateKind::X, {q});
        } else if (letter == 'Y') {
            out.append(GateKind::Y, {q});
        } else if (letter == 'Z') {
            out.append(GateKind::Z, {q});
        } else if (letter != 'I') {
            throw std::invalid_argument("bad fault letter");
        }
    };
    for (const auto &g : c.ops) {
        if (!gate_info(g.kind).noise) {
            out.append(g);
            continue;
        }
        auto it = by_site.find(site);
        if (it != by_site.end()) {
            for (const Fault *f : it->second) {
                emit(f->p0, g.targets[0]);
                if (g.targets.size() > 1) {
                    emit(f->p1, g.targets[1]);
                } else if (f->p1 != 'I') {
                    throw std::invalid_argument("two-qubit fault at a one-qubit site");
                }
            }
        }
        site++;
    }
    if (!by_site.empty() && by_site.rbegin()->first >= site) {
        throw std::invalid_argument("fault site out of range");
    }
    for (const auto &d : c.detectors) {
        out.add_detector(d.slots, d.label);
    }
    return out;
}

}  // namespace mbftqc

#endif
