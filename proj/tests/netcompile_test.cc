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
#include <complex>
#include <json.hpp>
#include <map>
#include <random>
#include <set>

#include "dqec/netcompile.h"
#include "dqec/decode.h"
#include "dqec/sim.h"
#include "support/decode_oracle.h"

using namespace dqec;

namespace {

struct Setup {
    ScheduleTemplate schedule;
    NetworkLayout layout;
};

Setup toric_setup(uint32_t d, uint32_t n_q) {
    Setup s{make_schedule(build_toric(d)), {}};
    s.layout = make_layout(spectral_partition(build_connectivity_graph(s.schedule), n_q, 1), s.schedule, n_q);
    return s;
}

Setup honeycomb_setup(uint32_t a, uint32_t b, uint32_t n_q) {
    Setup s{make_schedule(build_honeycomb(a, b)), {}};
    s.layout = make_layout(spectral_partition(build_connectivity_graph(s.schedule), n_q, 1), s.schedule, n_q);
    return s;
}

CompileOptions opts(uint32_t rounds, bool check = true) {
    CompileOptions o;
    o.rounds = rounds;
    o.check_determinism = check;
    return o;
}

void expect_all_zero(const CompiledExperiment &exp, size_t shots) {
    auto out = sample_frames(exp.program, shots, 17);
    for (size_t s = 0; s < shots; s++) {
        ASSERT_TRUE(out.fired_detectors(s).empty()) << exp.mode << " shot " << s;
        ASSERT_EQ(out.observable_mask(s), 0u) << exp.mode << " shot " << s;
    }
    auto ref = stabilizer_oracle_sample(exp.program, 4, 3);
    for (size_t s = 0; s < 4; s++) {
        ASSERT_TRUE(ref.fired_detectors(s).empty());
    }
}

/// Minimal state-vector simulator for the handful of gates in a teleport block.
class StateVector {
   public:
    explicit StateVector(uint32_t n, uint64_t seed) : n_(n), amp_(size_t{1} << n, 0), rng_(seed) { amp_[0] = 1; }
    using C = std::complex<double>;
    void apply1(uint32_t q, C a, C b, C c, C d) {
        size_t bit = size_t{1} << q;
        for (size_t i = 0; i < amp_.size(); i++) {
            if (!(i & bit)) {
                C x = amp_[i], y = amp_[i | bit];
                amp_[i] = a * x + b * y;
                amp_[i | bit] = c * x + d * y;
            }
        }
    }
    void h(uint32_t q) {
        double r = 1 / std::sqrt(2.0);
        apply1(q, r, r, r, -r);
    }
    void s(uint32_t q) { apply1(q, 1, 0, 0, C(0, 1)); }
    void x(uint32_t q) { apply1(q, 0, 1, 1, 0); }
    void z(uint32_t q) { apply1(q, 1, 0, 0, -1); }
    void cx(uint32_t c, uint32_t t) {
        for (size_t i = 0; i < amp_.size(); i++) {
            if ((i >> c & 1) && !(i >> t & 1)) {
                std::swap(amp_[i], amp_[i | (size_t{1} << t)]);
            }
        }
    }
    /// Z measurement with collapse.
    int m(uint32_t q) {
        size_t bit = size_t{1} << q;
        double p1 = 0;
        for (size_t i = 0; i < amp_.size(); i++) {
            if (i & bit) {
                p1 += std::norm(amp_[i]);
            }
        }
        int outcome = std::uniform_real_distribution<double>(0, 1)(rng_) < p1;
        double keep = outcome ? p1 : 1 - p1;
        for (size_t i = 0; i < amp_.size(); i++) {
            if (((i & bit) != 0) != (outcome != 0)) {
                amp_[i] = 0;
            } else {
                amp_[i] /= std::sqrt(keep);
            }
        }
        return outcome;
    }
    /// Amplitudes of qubit q with every other qubit fixed as in `rest`.
    std::pair<C, C> qubit_state(uint32_t q, size_t rest) const {
        size_t bit = size_t{1} << q;
        return {amp_[rest & ~bit], amp_[rest | bit]};
    }

   private:
    uint32_t n_;
    std::vector<C> amp_;
    std::mt19937_64 rng_;
};

/// Physical time per round: tick intervals in [begin, end).
uint32_t ticks_in(const CircuitProgram &prog, size_t begin, size_t end) {
    uint32_t t = 0;
    for (size_t i = begin; i < end; i++) {
        t += prog.instructions[i].op == Opcode::TICK;
    }
    return t;
}

}  // namespace

TEST(Netcompile, BellFidelity) {
    // Count two-qubit Paulis that disturb |Phi+>: those anticommuting with XX or ZZ.
    int disturbing = 0;
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            if (a == 0 && b == 0) {
                continue;
            }
            auto pa = static_cast<Pauli>(a), pb = static_cast<Pauli>(b);
            bool xx = anticommutes(pa, Pauli::X) != anticommutes(pb, Pauli::X);
            bool zz = anticommutes(pa, Pauli::Z) != anticommutes(pb, Pauli::Z);
            disturbing += xx || zz;
        }
    }
    ASSERT_EQ(disturbing, 12);
    NoiseParams n;
    n.p = 1e-3;
    EXPECT_NEAR(n.p_nonlocal(), 1e-2, 1e-15);
    EXPECT_NEAR(bell_fidelity(n.p_nonlocal()), 1 - n.p_nonlocal() * disturbing / 15.0, 1e-15);
    EXPECT_NEAR(bell_fidelity(n.p_nonlocal()), 0.992, 1e-12);
}

TEST(Netcompile, NoiselessDeterminismAllModes) {
    NoiseParams zero;
    auto t = toric_setup(4, 16);
    expect_all_zero(compile_memory(t.schedule, t.layout, zero, {}, opts(6)), 100);
    expect_all_zero(compile_swapout(t.schedule, t.layout, zero, {}, opts(6), {3, std::nullopt}), 100);
    expect_all_zero(compile_monolithic(t.schedule, zero, {}, opts(6)), 100);
    for (auto [a, b] : {std::pair{2u, 3u}, std::pair{4u, 6u}}) {
        auto h = honeycomb_setup(a, b, 16);
        expect_all_zero(compile_memory(h.schedule, h.layout, zero, {}, opts(6)), 100);
        expect_all_zero(compile_swapout(h.schedule, h.layout, zero, {}, opts(6), {3, std::nullopt}), 100);
        expect_all_zero(compile_monolithic(h.schedule, zero, {}, opts(6)), 100);
    }
}

TEST(Netcompile, LogicalOperatorFlipsOnlyItsObservable) {
    auto code = build_toric(4);
    auto t = toric_setup(4, 16);
    NoiseParams zero;
    for (const auto &exp : {compile_memory(t.schedule, t.layout, zero, {}, opts(4)),
                            compile_monolithic(t.schedule, zero, {}, opts(4))}) {
        // Inject in the middle of the circuit, at a round boundary.
        size_t at = exp.rounds[exp.rounds.size() / 2].begin;
        for (size_t k = 0; k < 2; k++) {
            auto sym = propagate_pauli(exp.program, at, code.logical_x[k]);
            EXPECT_TRUE(sym.detectors.empty()) << exp.mode;
            EXPECT_EQ(sym.observables, uint64_t{1} << k) << exp.mode;
            // A Z logical commutes with the Z readout.
            auto zsym = propagate_pauli(exp.program, at, code.logical_z[k]);
            EXPECT_TRUE(zsym.detectors.empty());
            EXPECT_EQ(zsym.observables, 0u);
        }
    }
}

TEST(Netcompile, IdleTimeIsConservedForDataQubits) {
    // Busy tick intervals plus the idle charge must add up to the round length.
    auto t = toric_setup(4, 16);
    NoiseParams noise;
    noise.p = 1e-3;
    auto exp = compile_memory(t.schedule, t.layout, noise, {}, opts(3));
    const auto &prog = exp.program;
    size_t checked = 0;
    for (const auto &r : exp.rounds) {
        if (!r.noisy || r.swap_block) {
            continue;
        }
        ASSERT_EQ(ticks_in(prog, r.begin, r.end), r.duration);
        std::map<uint32_t, uint32_t> busy, idle;
        std::set<uint32_t> in_interval;
        for (size_t i = r.begin; i < r.end; i++) {
            const auto &inst = prog.instructions[i];
            if (inst.op == Opcode::TICK) {
                for (auto q : in_interval) {
                    busy[q]++;
                }
                in_interval.clear();
            } else if (inst.op == Opcode::DEPOLARIZE1 && prog.has_tag(i, "idle")) {
                double ticks = std::log1p(-inst.params[0]) / std::log1p(-noise.p);
                for (auto q : inst.qubits) {
                    idle[q] += static_cast<uint32_t>(std::lround(ticks));
                }
            } else if (!is_noise_channel(inst.op)) {
                for (auto q : inst.qubits) {
                    in_interval.insert(q);
                }
            }
        }
        for (uint32_t q = 0; q < t.schedule.data_qubits; q++) {
            EXPECT_EQ(busy[q] + idle[q], r.duration) << "data qubit " << q;
            checked++;
        }
    }
    EXPECT_EQ(checked, 3u * t.schedule.data_qubits);
}

TEST(Netcompile, LiveBellHalvesNeverExceedQpiCount) {
    for (auto [d, n_q] : {std::pair{4u, 16u}, std::pair{6u, 16u}, std::pair{4u, 5u}}) {
        auto t = toric_setup(d, n_q);
        NoiseParams noise;
        noise.p = 1e-3;
        auto exp = compile_swapout(t.schedule, t.layout, noise, {}, opts(3, false), {1, std::nullopt});
        std::set<uint32_t> live;
        size_t worst = 0;
        for (const auto &inst : exp.program.instructions) {
            for (auto q : inst.qubits) {
                if (exp.qubit_role[q] != QubitRole::Comm) {
                    continue;
                }
                if (inst.op == Opcode::RZ || inst.op == Opcode::RX) {
                    live.insert(q);
                } else if (inst.op == Opcode::M || inst.op == Opcode::MX) {
                    live.erase(q);
                }
            }
            if (inst.op == Opcode::TICK) {
                std::map<uint32_t, size_t> per_cluster;
                for (auto q : live) {
                    per_cluster[exp.qubit_cluster[q]]++;
                }
                for (auto [c, n] : per_cluster) {
                    worst = std::max(worst, n);
                }
            }
        }
        EXPECT_GT(worst, 0u);
        EXPECT_LE(worst, t.layout.qpi_count) << "d=" << d << " n_q=" << n_q;
    }
}

TEST(Netcompile, MonolithicHasNoNetworkOperations) {
    auto t = toric_setup(4, 16);
    NoiseParams noise;
    noise.p = 1e-3;
    auto exp = compile_monolithic(t.schedule, noise, {}, opts(2));
    for (size_t i = 0; i < exp.program.instructions.size(); i++) {
        EXPECT_FALSE(exp.program.has_tag(i, "nonlocal"));
    }
    for (auto role : exp.qubit_role) {
        EXPECT_NE(role, QubitRole::Comm);
    }
    // A honeycomb that fits in one node needs no Bell pairs either.
    auto h = honeycomb_setup(2, 3, 16);
    EXPECT_EQ(h.layout.cluster_count(), 1u);
    auto local = compile_memory(h.schedule, h.layout, noise, {}, opts(2));
    for (size_t i = 0; i < local.program.instructions.size(); i++) {
        EXPECT_FALSE(local.program.has_tag(i, "nonlocal"));
    }
    for (const auto &r : local.rounds) {
        EXPECT_EQ(r.bell_batches, 0u);
    }
}

TEST(Netcompile, DropoutChannelsCountAndProbability) {
    auto t = toric_setup(4, 16);
    NoiseParams noise;
    noise.p = 1e-3;
    noise.p_dropout = 1e-4;
    auto base = compile_memory(t.schedule, t.layout, noise, {}, opts(4));
    auto exp = attach_node_dropout(base, noise, 5);
    auto idx = exp.dropout_channel_indices();
    EXPECT_EQ(idx.size(), t.layout.cluster_count() * 4u * 512u);
    for (auto i : idx) {
        const auto &inst = exp.program.instructions[i];
        ASSERT_EQ(inst.op, Opcode::CORRELATED_ERROR);
        EXPECT_DOUBLE_EQ(inst.params[0], 1.953125e-7);
    }
    // The decoder never sees them.
    auto without = build_dem(base);
    auto with = build_dem(exp);
    EXPECT_EQ(without.mechanisms.size(), with.mechanisms.size());
    auto meta = nlohmann::json::parse(exp.metadata_json());
    EXPECT_EQ(meta["dropout_channels"].size(), idx.size());

    // Pad rounds carry no dropout, and attach is seed-deterministic.
    auto again = attach_node_dropout(base, noise, 5);
    EXPECT_EQ(serialize_program(again.program), serialize_program(exp.program));
    auto other = attach_node_dropout(base, noise, 6);
    EXPECT_NE(serialize_program(other.program), serialize_program(exp.program));
}

TEST(Netcompile, DropoutSamplesAreUniformOverTwoQubitPaulis) {
    // Clusters of two qubits with e = 15: every non-identity two-qubit Pauli
    // should appear equally often. Weight-two checks keep the QPI demand low.
    auto t = honeycomb_setup(2, 3, 2);
    NoiseParams noise;
    noise.p_dropout = 1e-4;
    noise.dropout_samples = 15;
    auto base = compile_memory(t.schedule, t.layout, {}, {}, opts(32, false));
    std::map<std::pair<int, int>, size_t> counts;
    size_t total = 0;
    for (uint64_t seed = 0; total < 100000; seed++) {
        auto exp = attach_node_dropout(base, noise, seed);
        for (auto i : exp.dropout_channel_indices()) {
            const auto &prod = exp.program.instructions[i].products[0];
            uint32_t c = exp.qubit_cluster[prod[0].qubit];
            std::vector<uint32_t> members;
            for (uint32_t q = 0; q < exp.qubit_cluster.size(); q++) {
                if (exp.qubit_cluster[q] == c && exp.qubit_role[q] != QubitRole::Comm) {
                    members.push_back(q);
                }
            }
            if (members.size() != 2) {
                continue;
            }
            int a = 0, b = 0;
            for (const auto &term : prod) {
                (term.qubit == members[0] ? a : b) = static_cast<int>(term.axis);
            }
            ASSERT_FALSE(a == 0 && b == 0);
            counts[{a, b}]++;
            total++;
        }
    }
    ASSERT_EQ(counts.size(), 15u);
    double expected = static_cast<double>(total) / 15.0, chi2 = 0;
    for (auto [k, n] : counts) {
        chi2 += (static_cast<double>(n) - expected) * (static_cast<double>(n) - expected) / expected;
    }
    // 14 degrees of freedom; 36.12 is the 0.1% critical value.
    EXPECT_LT(chi2, 36.12);
}

TEST(Netcompile, SwapOutBlockTeleportsTheLargestNode) {
    auto t = toric_setup(6, 16);
    NoiseParams zero;
    auto mem = compile_memory(t.schedule, t.layout, zero, {}, opts(4));
    auto swp = compile_swapout(t.schedule, t.layout, zero, {}, opts(4), {2, std::nullopt});
    EXPECT_EQ(swp.program.count_detectors(), mem.program.count_detectors());
    EXPECT_EQ(swp.program.count_observables(), mem.program.count_observables());
    uint32_t target = select_largest_node(t.layout.partition, t.schedule);
    size_t data_on_target = 0;
    for (auto q : t.layout.partition.clusters[target]) {
        data_on_target += q < t.schedule.data_qubits;
    }
    size_t blocks = 0;
    for (const auto &r : swp.rounds) {
        if (r.swap_block) {
            blocks++;
            EXPECT_EQ(r.bell_batches, (data_on_target + t.layout.qpi_count - 1) / t.layout.qpi_count);
        }
    }
    EXPECT_EQ(blocks, 1u);
    // The spare node brings fresh qubits.
    EXPECT_GT(swp.program.qubit_count, mem.program.qubit_count);
    EXPECT_THROW(compile_swapout(t.schedule, t.layout, zero, {}, opts(4), {4, std::nullopt}), CompileError);
    EXPECT_THROW(compile_swapout(t.schedule, t.layout, zero, {}, opts(4), {2, 999u}), CompileError);
}

TEST(Netcompile, TeleportGadgetMovesArbitraryStates) {
    // Same gate sequence as one swap-out batch: source 0, comm 1, fresh 2.
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; trial++) {
        StateVector sv(3, rng());
        // Random single-qubit state from a short H/S word.
        int len = 1 + static_cast<int>(rng() % 6);
        std::vector<int> word;
        for (int i = 0; i < len; i++) {
            word.push_back(static_cast<int>(rng() % 3));
        }
        auto prepare = [&](StateVector &v, uint32_t q) {
            for (int g : word) {
                if (g == 0) {
                    v.h(q);
                } else if (g == 1) {
                    v.s(q);
                } else {
                    v.x(q);
                }
            }
        };
        prepare(sv, 0);
        sv.h(1);
        sv.cx(1, 2);
        sv.cx(0, 1);
        sv.h(0);
        int m0 = sv.m(0);
        int m1 = sv.m(1);
        if (m1) {
            sv.x(2);
        }
        if (m0) {
            sv.z(2);
        }
        StateVector ref(1, 0);
        prepare(ref, 0);
        size_t rest = static_cast<size_t>(m0) | (static_cast<size_t>(m1) << 1);
        auto [a, b] = sv.qubit_state(2, rest);
        auto [ra, rb] = ref.qubit_state(0, 0);
        double overlap = std::norm(std::conj(ra) * a + std::conj(rb) * b);
        ASSERT_NEAR(overlap, 1.0, 1e-12) << "trial " << trial;
    }
}

TEST(Netcompile, EnsembleWeights) {
    double pd = 1e-4;
    uint32_t r = 32;
    double total = ensemble_weight(pd, r, std::nullopt);
    EXPECT_NEAR(total, std::pow(1 - pd, r), 1e-15);
    for (uint32_t i = 1; i <= r; i++) {
        double w = ensemble_weight(pd, r, i);
        EXPECT_NEAR(w, pd * std::pow(1 - pd, i - 1), 1e-18);
        total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    // Mass of two or more failures, from the binomial distribution.
    double two_plus = 1 - std::pow(1 - pd, r) - r * pd * std::pow(1 - pd, r - 1);
    EXPECT_NEAR(ensemble_residual(pd, r), two_plus, 1e-12);
    EXPECT_LT(ensemble_residual(pd, r), 6e-6);

    auto s = make_schedule(build_toric(4));
    NoiseParams noise;
    noise.p = 1e-3;
    noise.p_dropout = pd;
    auto members = compile_monolithic_ensemble(s, noise, {}, opts(6));
    ASSERT_EQ(members.size(), 7u);
    EXPECT_FALSE(members[0].failure_round.has_value());
    for (size_t i = 1; i < members.size(); i++) {
        EXPECT_EQ(members[i].failure_round, std::optional<uint32_t>(static_cast<uint32_t>(i)));
        EXPECT_EQ(members[i].experiment.program.count_detectors(), members[0].experiment.program.count_detectors());
    }
    // The failed round scrambles the logical state: both observables become coin flips.
    auto out = sample_frames(members[3].experiment.program, 4000, 2);
    size_t any = 0;
    for (size_t i = 0; i < out.shots; i++) {
        any += out.observable_mask(i) != 0;
    }
    EXPECT_NEAR(static_cast<double>(any) / 4000.0, 0.75, 0.03);
}

TEST(Netcompile, RejectsBadRequests) {
    auto t = toric_setup(4, 16);
    NoiseParams zero;
    EXPECT_THROW(compile_memory(t.schedule, t.layout, zero, {}, opts(0)), CompileError);
    auto other = toric_setup(2, 16);
    EXPECT_THROW(compile_memory(t.schedule, other.layout, zero, {}, opts(2)), CompileError);
    EXPECT_THROW(compile_monolithic(t.schedule, zero, {}, opts(2), 3u), CompileError);
    NoiseParams bad;
    bad.p_dropout = 1e-4;
    bad.dropout_samples = 0;
    auto base = compile_memory(t.schedule, t.layout, zero, {}, opts(2));
    EXPECT_THROW(attach_node_dropout(base, bad, 1), CompileError);
}

TEST(Netcompile, MetadataDescribesRounds) {
    auto t = toric_setup(4, 16);
    NoiseParams noise;
    noise.p = 1e-3;
    auto exp = compile_memory(t.schedule, t.layout, noise, {}, opts(4));
    auto meta = nlohmann::json::parse(exp.metadata_json());
    EXPECT_EQ(meta["mode"], "memory");
    EXPECT_EQ(meta["k"], 2);
    EXPECT_EQ(meta["rounds"].size(), exp.rounds.size());
    size_t noisy = 0;
    for (const auto &r : exp.rounds) {
        noisy += r.noisy;
    }
    EXPECT_EQ(noisy, 4u);
    EXPECT_EQ(exp.rounds.size(), 4u + 2 * 2);
}

TEST(Netcompile, FullGraphlikeDistanceInEveryMode) {
    for (auto [d, n_q] : {std::pair{4u, 16u}, std::pair{4u, 5u}}) {
        auto t = toric_setup(d, n_q);
        NoiseParams noise;
        noise.p = 1e-3;
        for (const auto &exp : {compile_memory(t.schedule, t.layout, noise, {}, opts(2 * d)),
                                compile_swapout(t.schedule, t.layout, noise, {}, opts(2 * d), {d, std::nullopt}),
                                compile_monolithic(t.schedule, noise, {}, opts(2 * d))}) {
            auto g = to_matching_graph(build_dem(exp));
            for (uint32_t k = 0; k < 2; k++) {
                EXPECT_EQ(oracle::graphlike_distance(g, k), static_cast<int>(d)) << exp.mode << " n_q=" << n_q;
            }
        }
    }
}

TEST(Netcompile, SwapOutLeavesLaterRoundsUnchanged) {
    // Two rounds after the block, the error model must match plain memory
    // detector for detector: the spare node only renames qubits.
    auto t = toric_setup(6, 16);
    NoiseParams noise;
    noise.p = 1e-3;
    auto mem = compile_memory(t.schedule, t.layout, noise, {}, opts(8));
    auto swp = compile_swapout(t.schedule, t.layout, noise, {}, opts(8), {4, std::nullopt});
    size_t block = 0;
    while (!swp.rounds[block].swap_block) {
        block++;
    }
    auto detectors_before = [](const CompiledExperiment &e, size_t end) {
        uint32_t n = 0;
        for (size_t i = 0; i < end; i++) {
            n += e.program.instructions[i].op == Opcode::DETECTOR;
        }
        return n;
    };
    uint32_t from = detectors_before(swp, swp.rounds[block + 3].begin);
    ASSERT_EQ(from, detectors_before(mem, mem.rounds[block + 2].begin));
    auto tail = [&](const CompiledExperiment &e) {
        std::vector<std::tuple<std::vector<uint32_t>, uint64_t, double>> out;
        for (const auto &m : build_dem(e).mechanisms) {
            if (!m.detectors.empty() && m.detectors.front() >= from) {
                out.emplace_back(m.detectors, m.observables, m.probability);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    auto a = tail(mem), b = tail(swp);
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); i++) {
        ASSERT_EQ(std::get<0>(a[i]), std::get<0>(b[i]));
        ASSERT_EQ(std::get<1>(a[i]), std::get<1>(b[i]));
        ASSERT_NEAR(std::get<2>(a[i]), std::get<2>(b[i]), 1e-12);
    }
}
