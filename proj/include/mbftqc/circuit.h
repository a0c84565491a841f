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

#ifndef MBFTQC_CIRCUIT_H
#define MBFTQC_CIRCUIT_H

#include <charconv>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbftqc/gate.h"

namespace mbftqc {

inline constexpr uint32_t NO_SLOT = std::numeric_limits<uint32_t>::max();

struct Detector {
    std::vector<uint32_t> slots;
    std::string label;
    bool operator==(const Detector &other) const = default;
};

/// An ordered list of gates plus measurement-slot parities (detectors).
///
/// Every MEAS_Z, MEAS_X and OBSERVE produces one measurement slot, numbered in program order.
class Circuit {
   public:
    size_t n_qubits = 0;
    std::vector<Gate> ops;
    std::vector<Detector> detectors;

    size_t num_slots() const {
        return num_slots_;
    }

    /// Labels of the measurement slots in order.
    std::vector<std::string> measurement_slots() const {
        std::vector<std::string> out;
        out.reserve(num_slots_);
        for (const auto &g : ops) {
            if (gate_info(g.kind).measurement) {
                out.push_back(g.label);
            }
        }
        return out;
    }

    /// Appends a gate; returns its measurement slot or NO_SLOT.
    uint32_t append(Gate g) {
        g.validate();
        for (auto q : g.targets) {
            if (q >= n_qubits) {
                n_qubits = size_t{q} + 1;
            }
        }
        uint32_t slot = NO_SLOT;
        if (gate_info(g.kind).measurement) {
            slot = static_cast<uint32_t>(num_slots_++);
        }
        ops.push_back(std::move(g));
        return slot;
    }

    uint32_t append(GateKind kind, std::vector<uint32_t> targets, double p = 0, std::string label = {}) {
        Gate g;
        g.kind = kind;
        g.targets = std::move(targets);
        g.args[0] = p;
        g.label = std::move(label);
        return append(std::move(g));
    }

    void pauli_channel_1(uint32_t q, double px, double py, double pz) {
        Gate g;
        g.kind = GateKind::PAULI_CHANNEL_1;
        g.targets = {q};
        g.args = {px, py, pz};
        append(std::move(g));
    }

    uint32_t observe(const std::vector<std::pair<uint32_t, char>> &terms, std::string label = {}) {
        Gate g;
        g.kind = GateKind::OBSERVE;
        for (const auto &[q, b] : terms) {
            g.targets.push_back(q);
            g.bases.push_back(b);
        }
        g.label = std::move(label);
        return append(std::move(g));
    }

    uint32_t add_detector(std::vector<uint32_t> slots, std::string label = {}) {
        for (auto s : slots) {
            if (s >= num_slots_) {
                throw CircuitError("detector references missing measurement slot " + std::to_string(s));
            }
        }
        detectors.push_back({std::move(slots), std::move(label)});
        return static_cast<uint32_t>(detectors.size() - 1);
    }

    /// Appends another circuit's ops and detectors, shifting detector slot references.
    void append_circuit(const Circuit &other) {
        size_t base = num_slots_;
        for (const auto &g : other.ops) {
            append(g);
        }
        for (auto d : other.detectors) {
            for (auto &s : d.slots) {
                s += static_cast<uint32_t>(base);
            }
            detectors.push_back(std::move(d));
        }
        if (other.n_qubits > n_qubits) {
            n_qubits = other.n_qubits;
        }
    }

    size_t count(GateKind kind) const {
        size_t c = 0;
        for (const auto &g : ops) {
            c += g.kind == kind;
        }
        return c;
    }

    bool operator==(const Circuit &other) const {
        return n_qubits == other.n_qubits && ops == other.ops && detectors == other.detectors;
    }

    std::string str() const;
    static Circuit parse(std::string_view text);

   private:
    size_t num_slots_ = 0;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool valid_label_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
           c == ':' || c == '-';
}

[[noreturn]] inline void parse_fail(size_t line, const std::string &msg) {
    throw CircuitError("line " + std::to_string(line) + ": " + msg);
}

inline uint32_t parse_index(std::string_view tok, size_t line) {
    uint32_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        parse_fail(line, "bad index '" + std::string(tok) + "'");
    }
    return v;
}

}  // namespace detail

inline std::string Circuit::str() const {
    std::ostringstream out;
    out << "QUBITS " << n_qubits << "\n";
    for (const auto &g : ops) {
        const auto &info = gate_info(g.kind);
        out << info.name;
        if (info.num_args) {
            out << "(";
            for (size_t k = 0; k < info.num_args; k++) {
                if (k) {
                    out << ",";
                }
                out << detail::format_double(g.args[k]);
            }
            out << ")";
        }
        if (!g.label.empty()) {
            out << "[" << g.label << "]";
        }
        for (size_t k = 0; k < g.targets.size(); k++) {
            out << " ";
            if (g.kind == GateKind::OBSERVE) {
                out << g.bases[k];
            }
            out << g.targets[k];
        }
        out << "\n";
    }
    for (const auto &d : detectors) {
        out << "DETECTOR";
        if (!d.label.empty()) {
            out << "[" << d.label << "]";
        }
        for (auto s : d.slots) {
            out << " m" << s;
        }
        out << "\n";
    }
    return out.str();
}

inline Circuit Circuit::parse(std::string_view text) {
    using detail::parse_fail;
    Circuit c;
    size_t declared_qubits = 0;
    size_t line_no = 0;
    while (!text.empty()) {
        line_no++;
        size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::vector<std::string_view> toks;
        size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
                i++;
            }
            size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
                j++;
            }
            if (j > i) {
                toks.push_back(line.substr(i, j - i));
            }
            i = j;
        }
        if (toks.empty()) {
            continue;
        }

        // Head token: NAME, optional (args), optional [label].
        std::string_view head = toks[0];
        size_t name_end = head.find_first_of("([");
        std::string_view name = head.substr(0, name_end);
        std::string_view rest = name_end == std::string_view::npos ? std::string_view{} : head.substr(name_end);
        std::vector<double> args;
        std::string label;
        if (!rest.empty() && rest[0] == '(') {
            size_t close = rest.find(')');
            if (close == std::string_view::npos) {
                parse_fail(line_no, "unterminated argument list");
            }
            std::string_view inner = rest.substr(1, close - 1);
            while (true) {
                size_t comma = inner.find(',');
                std::string_view num = inner.substr(0, comma);
                double v = 0;
                auto res = std::from_chars(num.data(), num.data() + num.size(), v);
                if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size()) {
                    parse_fail(line_no, "bad number '" + std::string(num) + "'");
                }
                args.push_back(v);
                if (comma == std::string_view::npos) {
                    break;
                }
                inner = inner.substr(comma + 1);
            }
            rest = rest.substr(close + 1);
        }
        if (!rest.empty() && rest[0] == '[') {
            size_t close = rest.find(']');
            if (close == std::string_view::npos) {
                parse_fail(line_no, "unterminated label");
            }
            label = std::string(rest.substr(1, close - 1));
            for (char ch : label) {
                if (!detail::valid_label_char(ch)) {
                    parse_fail(line_no, "bad label character '" + std::string(1, ch) + "'");
                }
            }
            rest = rest.substr(close + 1);
        }
        if (!rest.empty()) {
            parse_fail(line_no, "unexpected '" + std::string(rest) + "'");
        }

        if (name == "QUBITS") {
            if (toks.size() != 2 || !args.empty() || !label.empty()) {
                parse_fail(line_no, "QUBITS takes one count");
            }
            declared_qubits = detail::parse_index(toks[1], line_no);
            continue;
        }
        if (name == "DETECTOR") {
            if (!args.empty()) {
                parse_fail(line_no, "DETECTOR takes no arguments");
            }
            std::vector<uint32_t> slots;
            for (size_t k = 1; k < toks.size(); k++) {
                if (toks[k].size() < 2 || toks[k][0] != 'm') {
                    parse_fail(line_no, "detector term must look like m<slot>, got '" + std::string(toks[k]) + "'");
                }
                slots.push_back(detail::parse_index(toks[k].substr(1), line_no));
            }
            try {
                c.add_detector(std::move(slots), std::move(label));
            } catch (const CircuitError &e) {
                parse_fail(line_no, e.what());
            }
            continue;
        }
        auto kind = gate_kind_from_name(name);
        if (!kind) {
            parse_fail(line_no, "unknown instruction '" + std::string(name) + "'");
        }
        const auto &info = gate_info(*kind);
        if (args.size() != info.num_args) {
            parse_fail(line_no, std::string(info.name) + " expects " + std::to_string(info.num_args) + " argument(s)");
        }
        Gate g;
        g.kind = *kind;
        for (size_t k = 0; k < args.size(); k++) {
            g.args[k] = args[k];
        }
        g.label = std::move(label);
        for (size_t k = 1; k < toks.size(); k++) {
            std::string_view t = toks[k];
            if (*kind == GateKind::OBSERVE) {
                if (t.empty() || (t[0] != 'X' && t[0] != 'Y' && t[0] != 'Z')) {
                    parse_fail(line_no, "OBSERVE term must look like X3, got '" + std::string(t) + "'");
                }
                g.bases.push_back(t[0]);
                t.remove_prefix(1);
            }
            g.targets.push_back(detail::parse_index(t, line_no));
        }
        try {
            c.append(std::move(g));
        } catch (const CircuitError &e) {
            parse_fail(line_no, e.what());
        }
    }
    if (declared_qubits < c.n_qubits && declared_qubits != 0) {
        throw CircuitError("QUBITS " + std::to_string(declared_qubits) + " is smaller than the largest target");
    }
    if (declared_qubits > c.n_qubits) {
        c.n_qubits = declared_qubits;
    }
    return c;
}

}  // namespace mbftqc

#endif
