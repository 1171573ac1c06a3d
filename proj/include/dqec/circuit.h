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

#ifndef DQEC_CIRCUIT_H
#define DQEC_CIRCUIT_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dqec {

/// Single-qubit Pauli axis. Bit 0 is the X component, bit 1 the Z component.
enum class Pauli : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

char pauli_char(Pauli p);
inline bool has_x(Pauli p) { return (static_cast<uint8_t>(p) & 1) != 0; }
inline bool has_z(Pauli p) { return (static_cast<uint8_t>(p) & 2) != 0; }
inline Pauli pauli_from_bits(bool x, bool z) { return static_cast<Pauli>((x ? 1 : 0) | (z ? 2 : 0)); }
/// True iff the two single-qubit Paulis anticommute.
inline bool anticommutes(Pauli a, Pauli b) {
    return (has_x(a) && has_z(b)) != (has_z(a) && has_x(b));
}

struct PauliTerm {
    uint32_t qubit = 0;
    Pauli axis = Pauli::X;
    bool operator==(const PauliTerm &) const = default;
};

using PauliProduct = std::vector<PauliTerm>;

enum class Opcode : uint8_t {
    RZ,
    RX,
    H,
    S,
    SDAG,
    X,
    Y,
    Z,
    CX,
    CZ,
    M,
    MX,
    MPP,
    DEPOLARIZE1,
    DEPOLARIZE2,
    CORRELATED_ERROR,
    COND_X,
    COND_Z,
    DETECTOR,
    OBSERVABLE,
    TICK,
};

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);
bool is_noise_channel(Opcode op);
bool is_two_qubit_gate(Opcode op);

struct Instruction {
    Opcode op = Opcode::TICK;
    std::vector<double> params;
    std::vector<uint32_t> qubits;
    std::vector<PauliProduct> products;
    /// Record references as negative offsets; rec[-1] is the latest measurement.
    std::vector<int32_t> records;

    /// Number of measurement records this instruction appends.
    size_t measurement_count() const;
    /// Number of independent operations (targets, pairs or products).
    size_t operation_count() const;
    bool operator==(const Instruction &) const = default;
};

/// Sorted, duplicate-free label list.
using TagSet = std::vector<std::string>;

struct CircuitProgram {
    uint32_t qubit_count = 0;
    std::vector<Instruction> instructions;
    std::map<size_t, TagSet> tags;

    size_t count_measurements() const;
    size_t count_detectors() const;
    /// One past the largest observable index, or zero.
    size_t count_observables() const;
    bool has_tag(size_t index, std::string_view tag) const;
    void add_tag(size_t index, const std::string &tag);
    bool operator==(const CircuitProgram &) const = default;
};

class ParseError : public std::runtime_error {
   public:
    ParseError(size_t line, const std::string &message);
    size_t line() const { return line_; }

   private:
    size_t line_;
};

CircuitProgram parse_program(std::string_view text);
CircuitProgram parse_program(std::istream &in);
std::string serialize_program(const CircuitProgram &prog);
/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

struct Violation {
    size_t instruction = 0;
    std::string rule;
    std::string message() const;
};

std::vector<Violation> validate_program(const CircuitProgram &prog);

struct ResourceSummary {
    std::map<std::string, size_t> gate_counts;
    size_t measurements = 0;
    size_t detectors = 0;
    size_t observables = 0;
    std::map<std::string, size_t> tag_counts;
};

ResourceSummary count_resources(const CircuitProgram &prog);

}  // namespace dqec

#endif
