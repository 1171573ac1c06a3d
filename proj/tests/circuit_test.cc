// Copyright 2026 The dqec Authors
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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dqec/circuit.h"
#include "support/random_circuits.h"

using namespace dqec;

namespace {

const char *kTags[] = {"idle", "nonlocal", "dropout", "swapout", "x-1"};

CircuitProgram with_random_tags(CircuitProgram prog, std::mt19937_64 &rng) {
    for (size_t i = 0; i < prog.instructions.size(); i++) {
        if (rng() % 5 == 0) {
            prog.add_tag(i, kTags[rng() % 5]);
            if (rng() % 3 == 0) {
                prog.add_tag(i, kTags[rng() % 5]);
            }
        }
    }
    return prog;
}

}  // namespace

TEST(Circuit, RoundTripRandomPrograms) {
    std::mt19937_64 rng(7);
    oracle::RandomCircuitOptions opt;
    opt.steps = 30;
    for (int trial = 0; trial < 10000; trial++) {
        auto prog = with_random_tags(oracle::random_deterministic_circuit(rng, opt), rng);
        std::string text = serialize_program(prog);
        CircuitProgram back = parse_program(text);
        ASSERT_EQ(back, prog) << text;
        ASSERT_EQ(serialize_program(back), text);
        auto violations = validate_program(back);
        ASSERT_TRUE(violations.empty()) << violations[0].message() << "\n" << text;
    }
}

TEST(Circuit, ParsesGrammar) {
    auto prog = parse_program(
        "QUBITS 4\n"
        "# comment line\n"
        "RZ 0 1 2 3\n"
        "\n"
        "H 0\n"
        "CX 0 1 2 3\n"
        "DEPOLARIZE2(0.001) 0 1  # tag: nonlocal\n"
        "CORRELATED_ERROR(0.25) X0*Y1*Z3\n"
        "MPP X0*X1 Z2*Z3\n"
        "M 0\n"
        "COND_X rec[-1] 0\n"
        "DETECTOR rec[-2]\n"
        "OBSERVABLE(1) rec[-3] rec[-1]\n"
        "TICK\n");
    EXPECT_EQ(prog.qubit_count, 4u);
    EXPECT_EQ(prog.instructions.size(), 11u);
    EXPECT_EQ(prog.count_measurements(), 3u);
    EXPECT_EQ(prog.count_detectors(), 1u);
    EXPECT_EQ(prog.count_observables(), 2u);
    EXPECT_TRUE(prog.has_tag(3, "nonlocal"));
    const auto &corr = prog.instructions[4];
    ASSERT_EQ(corr.products.size(), 1u);
    EXPECT_EQ(corr.products[0][1].axis, Pauli::Y);
    EXPECT_EQ(corr.products[0][2].qubit, 3u);
    auto res = count_resources(prog);
    EXPECT_EQ(res.gate_counts["CX"], 2u);
    EXPECT_EQ(res.measurements, 3u);
    EXPECT_EQ(res.tag_counts["nonlocal"], 1u);
}

TEST(Circuit, ParseErrorsCarryLineNumbers) {
    struct Case {
        const char *text;
        size_t line;
    };
    std::vector<Case> cases = {
        {"QUBITS 2\nFOO 0\n", 2},
        {"QUBITS 2\nM 0\nDETECTOR rec[-2]\n", 3},
        {"QUBITS 2\nDETECTOR rec[0]\n", 2},
        {"QUBITS 2\nDEPOLARIZE1 0\n", 2},
        {"QUBITS 2\nH 0\nCORRELATED_ERROR(0.1) Q0\n", 3},
        {"M 0\n", 1},
        {"QUBITS 2\nCOND_X 0 1\n", 2},
    };
    for (const auto &c : cases) {
        try {
            parse_program(c.text);
            ADD_FAILURE() << "accepted: " << c.text;
        } catch (const ParseError &e) {
            EXPECT_EQ(e.line(), c.line) << c.text << " -> " << e.what();
        }
    }
}

TEST(Circuit, ValidationFindsViolations) {
    CircuitProgram prog;
    prog.qubit_count = 2;
    prog.instructions.push_back({Opcode::H, {}, {5}, {}, {}});
    prog.instructions.push_back({Opcode::CX, {}, {0, 0}, {}, {}});
    prog.instructions.push_back({Opcode::DEPOLARIZE1, {1.5}, {0}, {}, {}});
    prog.instructions.push_back({Opcode::DETECTOR, {}, {}, {}, {-1}});
    auto v = validate_program(prog);
    std::vector<size_t> where;
    for (const auto &x : v) {
        where.push_back(x.instruction);
    }
    for (size_t i = 0; i < 4; i++) {
        EXPECT_NE(std::find(where.begin(), where.end(), i), where.end()) << "instruction " << i;
    }
}

TEST(Circuit, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; i++) {
        double v = u(rng) * std::pow(10.0, -static_cast<int>(rng() % 12));
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.001), "0.001");
}
