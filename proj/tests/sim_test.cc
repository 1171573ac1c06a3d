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

#include <cmath>
#include <random>
#include <sstream>

#include "dqec/sim.h"
#include "support/random_circuits.h"

using namespace dqec;

TEST(Sim, RandomCircuitsAreDeterministic) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; trial++) {
        auto prog = oracle::random_deterministic_circuit(rng);
        EXPECT_TRUE(nondeterministic_outputs(prog, 256, trial).empty()) << serialize_program(prog);
        ShotOutcomes zeros(8, prog.count_detectors(), prog.count_observables());
        ErrorPattern none(8);
        EXPECT_EQ(stabilizer_oracle_sample(prog, 8, trial, &none), zeros);
    }
}

TEST(Sim, FrameSamplerMatchesTableauOracle) {
    std::mt19937_64 rng(12);
    size_t fired = 0;
    for (int trial = 0; trial < 300; trial++) {
        auto prog = oracle::random_deterministic_circuit(rng);
        size_t shots = 40;
        auto pattern = sample_error_pattern(prog, shots, trial);
        auto frames = sample_frames_with_errors(prog, pattern, trial);
        auto tableau = stabilizer_oracle_sample(prog, shots, trial + 1000, &pattern);
        ASSERT_EQ(frames, tableau) << serialize_program(prog);
        for (size_t s = 0; s < shots; s++) {
            fired += frames.fired_detectors(s).size();
        }
    }
    EXPECT_GT(fired, 1000u);
}

TEST(Sim, PropagatePauliMatchesInjection) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; trial++) {
        auto prog = oracle::random_deterministic_circuit(rng);
        for (uint32_t i = 0; i < prog.instructions.size(); i++) {
            const auto &inst = prog.instructions[i];
            if (!is_noise_channel(inst.op)) {
                continue;
            }
            for (uint32_t g = 0; g < channel_group_count(inst); g++) {
                auto alts = channel_alternatives(inst, g);
                for (size_t a = 0; a < alts.size(); a++) {
                    ErrorPattern one(1);
                    one[0].push_back({i, g, static_cast<uint8_t>(a + 1)});
                    auto shot = sample_frames_with_errors(prog, one, 5);
                    auto sym = propagate_pauli(prog, i, alts[a]);
                    ASSERT_EQ(shot.fired_detectors(0), sym.detectors);
                    ASSERT_EQ(shot.observable_mask(0), sym.observables);
                }
            }
        }
    }
}

TEST(Sim, ChannelAlternatives) {
    Instruction d1{Opcode::DEPOLARIZE1, {0.1}, {3, 4}, {}, {}};
    EXPECT_EQ(channel_group_count(d1), 2u);
    EXPECT_EQ(channel_alternatives(d1, 1).size(), 3u);
    Instruction d2{Opcode::DEPOLARIZE2, {0.1}, {0, 1, 2, 3}, {}, {}};
    EXPECT_EQ(channel_group_count(d2), 2u);
    EXPECT_EQ(channel_alternatives(d2, 0).size(), 15u);
    Instruction corr{Opcode::CORRELATED_ERROR, {0.1}, {}, {{{0, Pauli::X}, {2, Pauli::Y}}}, {}};
    EXPECT_EQ(channel_group_count(corr), 1u);
    ASSERT_EQ(channel_alternatives(corr, 0).size(), 1u);
}

namespace {

double flip_rate(const std::string &text, size_t shots) {
    auto prog = parse_program(text);
    auto out = sample_frames(prog, shots, 99);
    size_t fired = 0;
    for (size_t s = 0; s < shots; s++) {
        fired += out.detector(s, 0);
    }
    return static_cast<double>(fired) / static_cast<double>(shots);
}

void expect_rate(double observed, double expected, size_t shots) {
    double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(shots));
    EXPECT_NEAR(observed, expected, 5 * sigma);
}

}  // namespace

TEST(Sim, ChannelStatistics) {
    size_t shots = 200000;
    expect_rate(flip_rate("QUBITS 1\nRZ 0\nDEPOLARIZE1(0.3) 0\nM 0\nDETECTOR rec[-1]\n", shots), 0.2, shots);
    expect_rate(flip_rate("QUBITS 2\nRZ 0 1\nDEPOLARIZE2(0.15) 0 1\nM 0\nDETECTOR rec[-1]\n", shots), 0.08, shots);
    expect_rate(flip_rate("QUBITS 2\nRX 0 1\nCORRELATED_ERROR(0.05) Z0*X1\nMX 0\nDETECTOR rec[-1]\n", shots), 0.05,
                shots);
    expect_rate(flip_rate("QUBITS 1\nRZ 0\nDEPOLARIZE1(0.001) 0\nM 0\nDETECTOR rec[-1]\n", shots), 2e-3 / 3, shots);
}

TEST(Sim, ThreadCountDoesNotChangeResults) {
    std::mt19937_64 rng(14);
    auto prog = oracle::random_deterministic_circuit(rng, {16, 60, 0.2, true});
    SampleOptions one, four;
    four.threads = 4;
    EXPECT_EQ(sample_frames(prog, 5000, 3, one), sample_frames(prog, 5000, 3, four));
}

TEST(Sim, OutcomeFileRoundTrip) {
    ShotOutcomes o(37, 70, 3);
    std::mt19937_64 rng(15);
    for (size_t s = 0; s < o.shots; s++) {
        for (size_t d = 0; d < 70; d++) {
            o.set_detector(s, d, rng() & 1);
        }
        for (size_t k = 0; k < 3; k++) {
            o.set_observable(s, k, rng() & 1);
        }
    }
    std::stringstream buf;
    write_outcomes(buf, o);
    std::string text = buf.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "DQEC_OUTCOMES v1 shots=37 detectors=70 observables=3");
    EXPECT_EQ(text.size(), text.find('\n') + 1 + 37 * 10);
    EXPECT_EQ(read_outcomes(buf), o);

    std::stringstream truncated(text.substr(0, text.size() - 3));
    EXPECT_THROW(read_outcomes(truncated), SimError);
    std::stringstream garbage("nope\n");
    EXPECT_THROW(read_outcomes(garbage), SimError);
}

TEST(Sim, RejectsInvalidPrograms) {
    CircuitProgram prog;
    prog.qubit_count = 1;
    prog.instructions.push_back({Opcode::H, {}, {4}, {}, {}});
    EXPECT_ANY_THROW(sample_frames(prog, 10, 1));
}
