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

#ifndef DQEC_NETCOMPILE_H
#define DQEC_NETCOMPILE_H

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqec/circuit.h"
#include "dqec/codes.h"
#include "dqec/partition.h"

namespace dqec {

class CompileError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct NoiseParams {
    double p = 0;
    double nonlocal_ratio = 10;
    double p_dropout = 0;
    uint32_t dropout_samples = 512;

    double p_local() const { return p; }
    double p_nonlocal() const;
};

struct TimingModel {
    uint32_t tau_gate = 1;
    uint32_t tau_bell = 5;
};

struct CompileOptions {
    uint32_t rounds = 32;
    uint32_t pad = 2;
    uint64_t seed = 0;
    /// Run the noiseless frame check before returning.
    bool check_determinism = true;
};

enum class QubitRole : uint8_t { Data, Ancilla, Comm };

/// One code round (or the swap-out block) as a half-open instruction range.
struct RoundInfo {
    size_t begin = 0;
    size_t end = 0;
    bool noisy = false;
    /// 1-based index among noisy rounds, 0 for pad rounds and the swap block.
    uint32_t noisy_index = 0;
    bool swap_block = false;
    uint32_t duration = 0;
    uint32_t bell_batches = 0;
    /// Data and ancilla qubits held by each cluster during this round.
    std::vector<std::vector<uint32_t>> cluster_qubits;
};

struct CompiledExperiment {
    CircuitProgram program;
    std::vector<RoundInfo> rounds;
    uint32_t k = 0;
    std::string code_name;
    std::string mode;
    uint32_t n_q = 0;
    uint64_t seed = 0;
    NoiseParams noise;
    std::vector<QubitRole> qubit_role;
    /// Owning cluster of every physical qubit; the swap-out spare gets a new id.
    std::vector<uint32_t> qubit_cluster;

    std::vector<size_t> dropout_channel_indices() const;
    std::string metadata_json() const;
};

CompiledExperiment compile_memory(const ScheduleTemplate &schedule, const NetworkLayout &layout,
                                  const NoiseParams &noise, const TimingModel &timing, const CompileOptions &options);

/// Appends e correlated channels per (cluster, noisy round), tagged "dropout".
CompiledExperiment attach_node_dropout(const CompiledExperiment &exp, const NoiseParams &noise, uint64_t seed);

struct SwapOutOptions {
    uint32_t swap_after_round = 16;
    std::optional<uint32_t> target;
};

CompiledExperiment compile_swapout(const ScheduleTemplate &schedule, const NetworkLayout &layout,
                                   const NoiseParams &noise, const TimingModel &timing, const CompileOptions &options,
                                   const SwapOutOptions &swap);

/// Whole code on one device; optionally fully depolarizes every qubit after
/// noisy round `failure_round` (1-based), tagged "dropout".
CompiledExperiment compile_monolithic(const ScheduleTemplate &schedule, const NoiseParams &noise,
                                      const TimingModel &timing, const CompileOptions &options,
                                      std::optional<uint32_t> failure_round = std::nullopt);

struct EnsembleMember {
    double weight = 0;
    std::optional<uint32_t> failure_round;
    CompiledExperiment experiment;
};

/// Single-failure ensemble: the no-failure circuit plus one circuit per
/// failure round, weighted by the probability of a first failure there.
std::vector<EnsembleMember> compile_monolithic_ensemble(const ScheduleTemplate &schedule, const NoiseParams &noise,
                                                        const TimingModel &timing, const CompileOptions &options);

double ensemble_weight(double p_dropout, uint32_t rounds, std::optional<uint32_t> failure_round);
/// Probability of two or more failures, which the ensemble leaves out.
double ensemble_residual(double p_dropout, uint32_t rounds);

double bell_fidelity(double p_nl);

}  // namespace dqec

#endif
