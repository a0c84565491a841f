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


#include "mbftqc/circuit.h"

#include <random>

#include "gtest/gtest.h"

using namespace mbftqc;

namespace {

Circuit random_circuit(std::mt19937_64 &rng) {
    Circuit c;
    uint32_t n = 2 + rng() % 6;
    c.n_qubits = n;
    std::uniform_real_distribution<double> prob(0, 0.3);
    auto q = [&] {
        return static_cast<uint32_t>(rng() % n);
    };
    auto pair = [&] {
        uint32_t a = q(), b = q();
        while (b == a) {
            b = q();
        }
        return std::vector<uint32_t>{a, b};
    };
    size_t len = 1 + rng() % 30;
    for (size_t k = 0; k < len; k++) {
        auto kind = static_cast<GateKind>(rng() % GATE_TABLE.size());
        const auto &info = gate_info(kind);
        std::string label = rng() % 3 == 0 ? "g" + std::to_string(k) + ".a_b" : "";
        if (kind == GateKind::OBSERVE) {
            std::vector<std::pair<uint32_t, char>> terms;
            for (uint32_t t = 0; t < n; t++) {
                if (rng() & 1) {
                    terms.push_back({t, "XYZ"[rng() % 3]});
                }
            }
            if (terms.empty()) {
                terms.push_back({0, 'Z'});
            }
            c.observe(terms, label);
        } else if (kind == GateKind::PAULI_CHANNEL_1) {
            c.pauli_channel_1(q(), prob(rng), prob(rng), prob(rng));
        } else {
            auto targets = info.arity == 2 ? pair() : std::vector<uint32_t>{q()};
            c.append(kind, targets, info.num_args ? prob(rng) : 0, label);
        }
    }
    if (c.num_slots() > 0) {
        std::vector<uint32_t> slots;
        for (uint32_t s = 0; s < c.num_slots(); s++) {
            if (rng() & 1) {
                slots.push_back(s);
            }
        }
        c.add_detector(slots, "d0");
        c.add_detector({static_cast<uint32_t>(c.num_slots() - 1)});
    }
    return c;
}

std::string parse_error(std::string_view text) {
    try {
        Circuit::parse(text);
    } catch (const CircuitError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Circuit, append_assigns_measurement_slots) {
    Circuit c;
    ASSERT_EQ(c.append(GateKind::PREP_Z, {0}), NO_SLOT);
    ASSERT_EQ(c.append(GateKind::MEAS_Z, {0}, 0, "a"), 0u);
    ASSERT_EQ(c.append(GateKind::H, {3}), NO_SLOT);
    ASSERT_EQ(c.observe({{0, 'X'}, {3, 'Z'}}, "obs"), 1u);
    ASSERT_EQ(c.append(GateKind::MEAS_X, {3}), 2u);
    ASSERT_EQ(c.num_slots(), 3u);
    ASSERT_EQ(c.n_qubits, 4u);
    ASSERT_EQ(c.measurement_slots(), (std::vector<std::string>{"a", "obs", ""}));
    ASSERT_THROW(c.add_detector({3}), CircuitError);
}

TEST(Circuit, validation) {
    Circuit c;
    ASSERT_THROW(c.append(GateKind::CNOT, {1, 1}), CircuitError);
    ASSERT_THROW(c.append(GateKind::CNOT, {1}), CircuitError);
    ASSERT_THROW(c.append(GateKind::H, {1, 2}), CircuitError);
    ASSERT_THROW(c.append(GateKind::DEPOLARIZE1, {0}, 1.5), CircuitError);
    ASSERT_THROW(c.append(GateKind::DEPOLARIZE2, {0, 0}, 0.1), CircuitError);
    ASSERT_THROW(c.pauli_channel_1(0, 0.5, 0.4, 0.3), CircuitError);
    ASSERT_THROW(c.observe({}), CircuitError);
    ASSERT_THROW(c.observe({{0, 'X'}, {0, 'Z'}}), CircuitError);
    ASSERT_TRUE(c.ops.empty());
}

TEST(Circuit, str_format) {
    Circuit c;
    c.append(GateKind::PREP_Z, {0});
    c.append(GateKind::CNOT, {0, 1});
    c.append(GateKind::DEPOLARIZE2, {0, 1}, 0.001);
    c.pauli_channel_1(1, 0.25, 0, 0.125);
    uint32_t m = c.append(GateKind::MEAS_Z, {1}, 0, "out.0");
    c.observe({{0, 'X'}, {1, 'Z'}}, "v");
    c.add_detector({m, m + 1}, "chk");
    ASSERT_EQ(c.str(),
              "QUBITS 2\n"
              "PREP_Z 0\n"
              "CNOT 0 1\n"
              "DEPOLARIZE2(0.001) 0 1\n"
              "PAULI_CHANNEL_1(0.25,0,0.125) 1\n"
              "MEAS_Z[out.0] 1\n"
              "OBSERVE[v] X0 Z1\n"
              "DETECTOR[chk] m0 m1\n");
}

TEST(Circuit, parse_round_trip_property) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; trial++) {
        auto c = random_circuit(rng);
        auto text = c.str();
        auto back = Circuit::parse(text);
        ASSERT_EQ(back, c) << text;
        ASSERT_EQ(back.str(), text);
        ASSERT_EQ(back.num_slots(), c.num_slots());
    }
}

TEST(Circuit, parse_comments_and_whitespace) {
    auto c = Circuit::parse(
        "# header\n"
        "QUBITS 3\n"
        "\n"
        "  H 0   # trailing\n"
        "\tCNOT 0 2\r\n"
        "MEAS_Z 2\n"
        "DETECTOR m0\n");
    ASSERT_EQ(c.n_qubits, 3u);
    ASSERT_EQ(c.ops.size(), 3u);
    ASSERT_EQ(c.detectors.size(), 1u);
}

TEST(Circuit, parse_errors_carry_line_numbers) {
    ASSERT_NE(parse_error("H 0\nFOO 1\n").find("line 2"), std::string::npos);
    ASSERT_NE(parse_error("H 0\nFOO 1\n").find("unknown instruction 'FOO'"), std::string::npos);
    ASSERT_NE(parse_error("CNOT 1 1\n").find("line 1"), std::string::npos);
    ASSERT_NE(parse_error("H 0\n\nDEPOLARIZE1 0\n").find("line 3"), std::string::npos);
    ASSERT_NE(parse_error("DEPOLARIZE1(0.1,0.2) 0\n").find("argument"), std::string::npos);
    ASSERT_NE(parse_error("DEPOLARIZE1(x) 0\n").find("bad number"), std::string::npos);
    ASSERT_NE(parse_error("DEPOLARIZE1(0.1 0\n").find("unterminated"), std::string::npos);
    ASSERT_NE(parse_error("H[a b] 0\n").find("line 1"), std::string::npos);
    ASSERT_NE(parse_error("H -1\n").find("line 1"), std::string::npos);
    ASSERT_NE(parse_error("MEAS_Z 0\nDETECTOR m1\n").find("line 2"), std::string::npos);
    ASSERT_NE(parse_error("MEAS_Z 0\nDETECTOR 0\n").find("m<slot>"), std::string::npos);
    ASSERT_NE(parse_error("OBSERVE Q1\n").find("OBSERVE term"), std::string::npos);
    ASSERT_NE(parse_error("QUBITS 2\nH 5\n").find("QUBITS"), std::string::npos);
}

TEST(Circuit, append_circuit_shifts_detectors) {
    Circuit a;
    a.append(GateKind::MEAS_Z, {0});
    Circuit b;
    b.append(GateKind::MEAS_Z, {1});
    b.append(GateKind::MEAS_Z, {2});
    b.add_detector({0, 1});
    a.append_circuit(b);
    ASSERT_EQ(a.num_slots(), 3u);
    ASSERT_EQ(a.detectors.size(), 1u);
    ASSERT_EQ(a.detectors[0].slots, (std::vector<uint32_t>{1, 2}));
    ASSERT_EQ(a.n_qubits, 3u);
}
