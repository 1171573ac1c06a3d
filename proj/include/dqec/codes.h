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

#ifndef DQEC_CODES_H
#define DQEC_CODES_H

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dqec/circuit.h"

namespace dqec {

class CodeError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct StabilizerCode {
    std::string name;
    uint32_t n = 0;
    uint32_t k = 0;
    uint32_t d = 0;
    std::vector<PauliProduct> stabilizers;
    std::vector<PauliProduct> logical_x;
    std::vector<PauliProduct> logical_z;
};

/// Unrotated toric code on a d x d torus. Edge h(i,j) joins vertex (i,j) to
/// (i,j+1) and has index i*d+j; edge v(i,j) joins (i,j) to (i+1,j) and has
/// index d*d+i*d+j. Vertex X checks come first, then plaquette Z checks.
StabilizerCode build_toric(uint32_t d);

struct LatticeEdge {
    uint32_t u = 0;
    uint32_t v = 0;
    uint8_t color = 0;
    bool operator==(const LatticeEdge &) const = default;
};

struct FloquetObservableSpec {
    /// Edges whose check outcomes are folded in during every sub-round of each color.
    std::array<std::vector<uint32_t>, 3> phase_updates;
    std::vector<uint32_t> final_support;
    Pauli final_basis = Pauli::Z;
    std::vector<uint32_t> path_edges() const;
    bool operator==(const FloquetObservableSpec &) const = default;
};

struct FloquetLattice {
    std::string name;
    uint32_t vertices = 0;
    std::vector<LatticeEdge> edges;
    std::vector<std::vector<uint32_t>> faces;
    uint32_t genus = 0;
    std::optional<uint32_t> base_n;
    std::optional<uint32_t> fine_f;
    std::vector<FloquetObservableSpec> observables;

    uint32_t k() const { return 2 * genus; }
    bool operator==(const FloquetLattice &) const = default;
};

/// Check Pauli for an edge or plaquette color: 0 -> X, 1 -> Y, 2 -> Z.
Pauli color_pauli(uint8_t color);

/// Honeycomb on a torus built as a brick wall with a rows and 2b columns.
/// The faces must be 3-colorable, which requires a even and b divisible by 3.
FloquetLattice build_honeycomb(uint32_t a, uint32_t b);

/// Throws CodeError on any structural violation; returns the face colors.
std::vector<uint8_t> validate_lattice(const FloquetLattice &lattice);

FloquetLattice load_floquet_lattice(std::string_view document);
std::string export_floquet_lattice(const FloquetLattice &lattice);

/// Solves for k = 2*genus observable rules that are deterministic for an even
/// number of periods started from |0...0> and read out in the Z basis.
std::vector<FloquetObservableSpec> derive_floquet_observables(const FloquetLattice &lattice);

struct Check {
    PauliProduct support;
    std::optional<uint32_t> ancilla;
    /// Pauli type of a homogeneous check (X, Y or Z).
    Pauli basis() const;
};

/// A measurement outcome referenced as (check, period offset).
struct RecordTerm {
    uint32_t check = 0;
    int32_t period_offset = 0;
};

struct DetectorTemplate {
    uint32_t subround = 0;
    std::vector<RecordTerm> terms;
    uint32_t first_period = 0;
    std::optional<uint32_t> only_period;
};

/// Detector closing the experiment: outcomes of the last periods plus final data readouts.
struct FinalDetectorTemplate {
    std::vector<RecordTerm> terms;
    std::vector<uint32_t> data_qubits;
};

struct ObservableTemplate {
    /// Check ids included at the end of each sub-round, every period.
    std::vector<std::vector<uint32_t>> per_subround;
    std::vector<uint32_t> final_support;
};

struct ScheduleTemplate {
    std::string code_name;
    bool floquet = false;
    uint32_t data_qubits = 0;
    uint32_t qubit_count = 0;
    std::vector<Check> checks;
    std::vector<std::vector<uint32_t>> subrounds;
    std::vector<DetectorTemplate> detectors;
    std::vector<FinalDetectorTemplate> final_detectors;
    std::vector<ObservableTemplate> observables;
    Pauli final_basis = Pauli::Z;
    /// The total period count must be a multiple of this.
    uint32_t period_multiple = 1;
    std::vector<std::string> warnings;

    uint32_t period() const { return static_cast<uint32_t>(subrounds.size()); }
};

ScheduleTemplate make_schedule(const StabilizerCode &code);
ScheduleTemplate make_schedule(const FloquetLattice &lattice);

}  // namespace dqec

#endif
