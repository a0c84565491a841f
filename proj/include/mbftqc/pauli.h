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

#ifndef MBFTQC_PAULI_H
#define MBFTQC_PAULI_H

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mbftqc/errors.h"
#include "mbftqc/gate.h"

namespace mbftqc {

/// An n-qubit Pauli product i^log_i * P_0 ⊗ ... ⊗ P_{n-1}.
///
/// Letters are stored as bit-packed (x, z) pairs: X = (1,0), Z = (0,1), Y = (1,1), where Y means
/// the Hermitian Pauli Y (not XZ). Hermitian elements have log_i ∈ {0, 2}.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t n) : n_(n), xs_((n + 63) / 64, 0), zs_((n + 63) / 64, 0) {
    }

    /// Parses "+XIZY", "-XX", "iZ", "-iY" or "X_Z" ('_' and 'I' both mean identity).
    static PauliString from_str(std::string_view text) {
        uint8_t log_i = 0;
        if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
            log_i = text[0] == '-' ? 2 : 0;
            text.remove_prefix(1);
        }
        if (!text.empty() && text[0] == 'i') {
            log_i = (log_i + 1) & 3;
            text.remove_prefix(1);
        }
        PauliString p(text.size());
        p.log_i_ = log_i;
        for (size_t q = 0; q < text.size(); q++) {
            switch (text[q]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    p.set(q, true, false);
                    break;
                case 'Y':
                    p.set(q, true, true);
                    break;
                case 'Z':
                    p.set(q, false, true);
                    break;
                default:
                    throw std::invalid_argument("bad Pauli character '" + std::string(1, text[q]) + "'");
            }
        }
        return p;
    }

    size_t num_qubits() const {
        return n_;
    }
    size_t num_words() const {
        return xs_.size();
    }

    bool x(size_t q) const {
        return (xs_[q >> 6] >> (q & 63)) & 1;
    }
    bool z(size_t q) const {
        return (zs_[q >> 6] >> (q & 63)) & 1;
    }
    void set(size_t q, bool x, bool z) {
        uint64_t m = uint64_t{1} << (q & 63);
        xs_[q >> 6] = x ? (xs_[q >> 6] | m) : (xs_[q >> 6] & ~m);
        zs_[q >> 6] = z ? (zs_[q >> 6] | m) : (zs_[q >> 6] & ~m);
    }
    char letter(size_t q) const {
        return "IXZY"[x(q) | (z(q) << 1)];
    }
    void set_letter(size_t q, char c) {
        set(q, c == 'X' || c == 'Y', c == 'Z' || c == 'Y');
    }

    /// Power of i in front of the letters.
    uint8_t log_i() const {
        return log_i_;
    }
    void set_log_i(uint8_t k) {
        log_i_ = k & 3;
    }
    bool is_hermitian() const {
        return (log_i_ & 1) == 0;
    }
    /// True iff the sign is -1 (only meaningful for Hermitian elements).
    bool negative() const {
        return log_i_ == 2;
    }
    void flip_sign() {
        log_i_ ^= 2;
    }

    std::vector<uint64_t> &xs() {
        return xs_;
    }
    std::vector<uint64_t> &zs() {
        return zs_;
    }
    const std::vector<uint64_t> &xs() const {
        return xs_;
    }
    const std::vector<uint64_t> &zs() const {
        return zs_;
    }

    size_t weight() const {
        size_t w = 0;
        for (size_t k = 0; k < xs_.size(); k++) {
            w += std::popcount(xs_[k] | zs_[k]);
        }
        return w;
    }
    bool is_identity_letters() const {
        return weight() == 0;
    }

    /// In-place right multiplication: *this = *this * rhs.
    void right_mul(const PauliString &rhs) {
        if (rhs.n_ != n_) {
            throw SizeError("Pauli strings have different lengths: " + std::to_string(n_) + " vs " +
                            std::to_string(rhs.n_));
        }
        // Per qubit, two-bit counters (c1 + 2*c2) accumulate the powers of i produced by
        // multiplying the letters.
        uint64_t c1 = 0, c2 = 0;
        size_t total = 0;
        for (size_t k = 0; k < xs_.size(); k++) {
            uint64_t x1 = xs_[k], z1 = zs_[k];
            uint64_t x2 = rhs.xs_[k], z2 = rhs.zs_[k];
            uint64_t nx = x1 ^ x2, nz = z1 ^ z2;
            uint64_t x1z2 = x1 & z2;
            uint64_t anti = (x2 & z1) ^ x1z2;
            c2 = (c2 ^ ((c1 ^ nx ^ nz ^ x1z2) & anti));
            c1 ^= anti;
            xs_[k] = nx;
            zs_[k] = nz;
            total += std::popcount(c1) + 2 * std::popcount(c2);
            c1 = c2 = 0;
        }
        log_i_ = static_cast<uint8_t>((log_i_ + rhs.log_i_ + total) & 3);
    }

    /// Symplectic inner product parity; false means commuting.
    bool anticommutes(const PauliString &other) const {
        if (other.n_ != n_) {
            throw SizeError("Pauli strings have different lengths: " + std::to_string(n_) + " vs " +
                            std::to_string(other.n_));
        }
        uint64_t acc = 0;
        for (size_t k = 0; k < xs_.size(); k++) {
            acc ^= (xs_[k] & other.zs_[k]) ^ (zs_[k] & other.xs_[k]);
        }
        return std::popcount(acc) & 1;
    }

    std::string str() const {
        static constexpr const char *PREFIX[4] = {"+", "+i", "-", "-i"};
        std::string out = PREFIX[log_i_];
        for (size_t q = 0; q < n_; q++) {
            out.push_back(letter(q) == 'I' ? '_' : letter(q));
        }
        return out;
    }

    bool operator==(const PauliString &other) const = default;

   private:
    size_t n_ = 0;
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
    uint8_t log_i_ = 0;
};

inline PauliString pauli_mul(const PauliString &a, const PauliString &b) {
    PauliString out = a;
    out.right_mul(b);
    return out;
}

inline bool commutes(const PauliString &a, const PauliString &b) {
    return !a.anticommutes(b);
}

namespace detail {

inline void conjugate_in_place(PauliString &p, GateKind kind, const uint32_t *t) {
    auto flip_if = [&](bool b) {
        if (b) {
            p.flip_sign();
        }
    };
    uint32_t a = t[0];
    bool x = p.x(a), z = p.z(a);
    switch (kind) {
        case GateKind::H:
            flip_if(x && z);
            p.set(a, z, x);
            break;
        case GateKind::S:
            flip_if(x && z);
            p.set(a, x, z ^ x);
            break;
        case GateKind::S_DAG:
            flip_if(x && !z);
            p.set(a, x, z ^ x);
            break;
        case GateKind::X:
            flip_if(z);
            break;
        case GateKind::Y:
            flip_if(x ^ z);
            break;
        case GateKind::Z:
            flip_if(x);
            break;
        case GateKind::CNOT: {
            uint32_t b = t[1];
            bool xb = p.x(b), zb = p.z(b);
            flip_if(x && zb && !(xb ^ z));
            p.set(a, x, z ^ zb);
            p.set(b, xb ^ x, zb);
            break;
        }
        case GateKind::CZ: {
            uint32_t b = t[1];
            bool xb = p.x(b), zb = p.z(b);
            flip_if(x && xb && (z ^ zb));
            p.set(a, x, z ^ xb);
            p.set(b, xb, zb ^ x);
            break;
        }
        default:
            throw InvalidGateError(std::string(gate_info(kind).name) + " is not a unitary Clifford gate");
    }
}

}  // namespace detail

/// Returns g p g^dagger.
inline PauliString conjugate(const PauliString &p, const Gate &g) {
    if (!gate_info(g.kind).unitary) {
        throw InvalidGateError(std::string(gate_info(g.kind).name) + " is not a unitary Clifford gate");
    }
    g.validate();
    for (auto q : g.targets) {
        if (q >= p.num_qubits()) {
            throw SizeError("gate target " + std::to_string(q) + " out of range for " +
                            std::to_string(p.num_qubits()) + " qubits");
        }
    }
    PauliString out = p;
    detail::conjugate_in_place(out, g.kind, g.targets.data());
    return out;
}

}  // namespace mbftqc

#endif
