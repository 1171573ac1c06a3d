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

#ifndef DQEC_DECODE_H
#define DQEC_DECODE_H

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqec/circuit.h"
#include "dqec/netcompile.h"
#include "dqec/sim.h"

namespace dqec {

class DecodeError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct ErrorMechanism {
    double probability = 0;
    std::vector<uint32_t> detectors;
    uint64_t observables = 0;
    bool operator==(const ErrorMechanism &) const = default;
};

struct DetectorErrorModel {
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    /// Sorted by (detectors, observables).
    std::vector<ErrorMechanism> mechanisms;
};

/// Mechanisms of every channel not tagged "dropout". Sensitivities are found
/// by one backward sweep; they agree with propagate_pauli.
DetectorErrorModel build_dem(const CircuitProgram &prog);
DetectorErrorModel build_dem(const CompiledExperiment &exp);

/// p1(1-p2) + p2(1-p1).
double xor_probability(double p1, double p2);

void write_dem(std::ostream &out, const DetectorErrorModel &dem);
DetectorErrorModel read_dem(std::istream &in);

constexpr uint32_t kBoundary = UINT32_MAX;

struct MatchingEdge {
    uint32_t u = 0;
    /// kBoundary for edges to the virtual boundary.
    uint32_t v = 0;
    double probability = 0;
    double weight = 0;
    uint64_t observables = 0;
};

struct MatchingGraph {
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::vector<MatchingEdge> edges;
    /// Probability mass of mechanisms that could not be expressed as graph edges.
    double dropped_probability = 0;
    size_t dropped_mechanisms = 0;
    size_t decomposed_mechanisms = 0;
};

/// Edge weight ln((1-p)/p), with p capped at 0.5.
double edge_weight(double p);

/// Graphlike reduction. Throws DecodeError if the dropped mass exceeds
/// `max_dropped_fraction` of the total mechanism probability.
MatchingGraph to_matching_graph(const DetectorErrorModel &dem, double max_dropped_fraction = 1e-3);

std::string matching_graph_to_text(const MatchingGraph &graph);

struct DecoderOptions {
    /// Above this many defects in one sector only the nearest neighbours are offered to the matcher.
    uint32_t exact_limit = 96;
    uint32_t neighbours = 16;
    unsigned threads = 1;
};

/// Exact minimum-weight perfect matching decoder over shortest-path distances.
class MatchingDecoder {
   public:
    explicit MatchingDecoder(MatchingGraph graph, DecoderOptions options = {});
    ~MatchingDecoder();
    MatchingDecoder(const MatchingDecoder &) = delete;
    MatchingDecoder &operator=(const MatchingDecoder &) = delete;

    /// Predicted observable flips for one syndrome (sorted detector indices).
    uint64_t decode(const std::vector<uint32_t> &defects) const;
    std::vector<uint64_t> decode_batch(const ShotOutcomes &outcomes) const;

    const MatchingGraph &graph() const;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<uint64_t> mwpm_decode(const MatchingGraph &graph, const ShotOutcomes &outcomes,
                                  const DecoderOptions &options = {});

struct Score {
    size_t shots = 0;
    size_t errors_any = 0;
    std::vector<size_t> errors_per_observable;
};

Score score_predictions(const std::vector<uint64_t> &corrections, const ShotOutcomes &outcomes);

}  // namespace dqec

#endif
