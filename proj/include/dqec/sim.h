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

#ifndef DQEC_SIM_H
#define DQEC_SIM_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "dqec/circuit.h"

namespace dqec {

class SimError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Shot-major bit-packed rows: detector bits, then observable bits.
struct ShotOutcomes {
    size_t shots = 0;
    size_t num_detectors = 0;
    size_t num_observables = 0;
    size_t row_words = 0;
    std::vector<uint64_t> bits;

    ShotOutcomes() = default;
    ShotOutcomes(size_t shots, size_t detectors, size_t observables);

    bool detector(size_t shot, size_t d) const {
        return (bits[shot * row_words + (d >> 6)] >> (d & 63)) & 1;
    }
    void set_detector(size_t shot, size_t d, bool v);
    bool observable(size_t shot, size_t k) const { return detector(shot, num_detectors + k); }
    void set_observable(size_t shot, size_t k, bool v) { set_detector(shot, num_detectors + k, v); }
    /// Observables as a mask; requires at most 64 observables.
    uint64_t observable_mask(size_t shot) const;
    std::vector<uint32_t> fired_detectors(size_t shot) const;
    /// Appends the rows of another batch with identical dimensions.
    void append(const ShotOutcomes &other);
    bool operator==(const ShotOutcomes &) const = default;
};

/// A forced alternative of one noise channel target group in one shot.
/// Alternatives are numbered from 1 in the order listed by channel_alternatives.
struct InjectedError {
    uint32_t instruction = 0;
    uint32_t group = 0;
    uint8_t alternative = 1;
};

using ErrorPattern = std::vector<std::vector<InjectedError>>;

size_t channel_group_count(const Instruction &inst);
/// Nonidentity Pauli alternatives of one target group, each equally likely
/// given that the channel fires.
std::vector<PauliProduct> channel_alternatives(const Instruction &inst, size_t group);

struct SampleOptions {
    unsigned threads = 1;
    /// Skip every noise channel.
    bool noiseless = false;
};

ShotOutcomes sample_frames(const CircuitProgram &prog, size_t shots, uint64_t seed, const SampleOptions &options = {});

/// Frame sampling with noise replaced by the given per-shot error list.
ShotOutcomes sample_frames_with_errors(const CircuitProgram &prog, const ErrorPattern &pattern, uint64_t seed);

/// Draws which channels fire in each shot with the circuit's own probabilities.
ErrorPattern sample_error_pattern(const CircuitProgram &prog, size_t shots, uint64_t seed);

/// Detector indices (and num_detectors + k for observables) that are not
/// identically zero in noiseless frame sampling.
std::vector<size_t> nondeterministic_outputs(const CircuitProgram &prog, size_t shots = 128, uint64_t seed = 1);

/// Full tableau simulation. Detection events are measured against a noiseless
/// reference run, so they line up with frame sampling bit for bit.
ShotOutcomes stabilizer_oracle_sample(const CircuitProgram &prog, size_t shots, uint64_t seed,
                                      const ErrorPattern *injected = nullptr);

struct Symptom {
    std::vector<uint32_t> detectors;
    uint64_t observables = 0;
    bool operator==(const Symptom &) const = default;
};

/// Pushes a Pauli applied right after instruction `index` through the rest of the circuit.
Symptom propagate_pauli(const CircuitProgram &prog, size_t index, const PauliProduct &error);

void write_outcomes(std::ostream &out, const ShotOutcomes &outcomes);
ShotOutcomes read_outcomes(std::istream &in);

}  // namespace dqec

#endif
