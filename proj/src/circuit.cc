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

#include "dqec/circuit.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <set>
#include <sstream>

namespace dqec {

namespace {

struct OpInfo {
    Opcode op;
    std::string_view name;
};

constexpr std::array<OpInfo, 21> kOps = {{
    {Opcode::RZ, "RZ"},
    {Opcode::RX, "RX"},
    {Opcode::H, "H"},
    {Opcode::S, "S"},
    {Opcode::SDAG, "SDAG"},
    {Opcode::X, "X"},
    {Opcode::Y, "Y"},
    {Opcode::Z, "Z"},
    {Opcode::CX, "CX"},
    {Opcode::CZ, "CZ"},
    {Opcode::M, "M"},
    {Opcode::MX, "MX"},
    {Opcode::MPP, "MPP"},
    {Opcode::DEPOLARIZE1, "DEPOLARIZE1"},
    {Opcode::DEPOLARIZE2, "DEPOLARIZE2"},
    {Opcode::CORRELATED_ERROR, "CORRELATED_ERROR"},
    {Opcode::COND_X, "COND_X"},
    {Opcode::COND_Z, "COND_Z"},
    {Opcode::DETECTOR, "DETECTOR"},
    {Opcode::OBSERVABLE, "OBSERVABLE"},
    {Opcode::TICK, "TICK"},
}};

enum class TargetKind { Qubits, Products, Records, CondTargets, None };

TargetKind target_kind(Opcode op) {
    switch (op) {
        case Opcode::MPP:
        case Opcode::CORRELATED_ERROR:
            return TargetKind::Products;
        case Opcode::DETECTOR:
        case Opcode::OBSERVABLE:
            return TargetKind::Records;
        case Opcode::COND_X:
        case Opcode::COND_Z:
            return TargetKind::CondTargets;
        case Opcode::TICK:
            return TargetKind::None;
        default:
            return TargetKind::Qubits;
    }
}

size_t expected_params(Opcode op) {
    return (is_noise_channel(op) || op == Opcode::OBSERVABLE) ? 1 : 0;
}

std::string_view trim(std::string_view s) {
    size_t a = 0;
    while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a]))) {
        a++;
    }
    size_t b = s.size();
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        b--;
    }
    return s.substr(a, b - a);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            i++;
        }
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) {
            j++;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

template <typename T>
bool parse_int(std::string_view s, T &out) {
    if (s.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double &out) {
    if (s.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_pauli_term(std::string_view s, PauliTerm &out) {
    if (s.size() < 2) {
        return false;
    }
    switch (s[0]) {
        case 'X':
            out.axis = Pauli::X;
            break;
        case 'Y':
            out.axis = Pauli::Y;
            break;
        case 'Z':
            out.axis = Pauli::Z;
            break;
        default:
            return false;
    }
    return parse_int(s.substr(1), out.qubit);
}

bool parse_product(std::string_view s, PauliProduct &out) {
    out.clear();
    size_t start = 0;
    while (true) {
        size_t star = s.find('*', start);
        PauliTerm t;
        if (!parse_pauli_term(s.substr(start, star == std::string_view::npos ? s.npos : star - start), t)) {
            return false;
        }
        out.push_back(t);
        if (star == std::string_view::npos) {
            return true;
        }
        start = star + 1;
    }
}

bool parse_record(std::string_view s, int32_t &out) {
    if (s.size() < 6 || s.substr(0, 4) != "rec[" || s.back() != ']') {
        return false;
    }
    return parse_int(s.substr(4, s.size() - 5), out);
}

void append_product(std::string &out, const PauliProduct &p) {
    for (size_t i = 0; i < p.size(); i++) {
        if (i) {
            out += '*';
        }
        out += pauli_char(p[i].axis);
        out += std::to_string(p[i].qubit);
    }
}

}  // namespace

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::X:
            return 'X';
        case Pauli::Y:
            return 'Y';
        case Pauli::Z:
            return 'Z';
        default:
            return 'I';
    }
}

std::string_view opcode_name(Opcode op) { return kOps[static_cast<size_t>(op)].name; }

std::optional<Opcode> opcode_from_name(std::string_view name) {
    for (const auto &info : kOps) {
        if (info.name == name) {
            return info.op;
        }
    }
    return std::nullopt;
}

bool is_noise_channel(Opcode op) {
    return op == Opcode::DEPOLARIZE1 || op == Opcode::DEPOLARIZE2 || op == Opcode::CORRELATED_ERROR;
}

bool is_two_qubit_gate(Opcode op) {
    return op == Opcode::CX || op == Opcode::CZ || op == Opcode::DEPOLARIZE2;
}

size_t Instruction::measurement_count() const {
    switch (op) {
        case Opcode::M:
        case Opcode::MX:
            return qubits.size();
        case Opcode::MPP:
            return products.size();
        default:
            return 0;
    }
}

size_t Instruction::operation_count() const {
    switch (target_kind(op)) {
        case TargetKind::Qubits:
            return is_two_qubit_gate(op) ? qubits.size() / 2 : qubits.size();
        case TargetKind::Products:
            return op == Opcode::MPP ? products.size() : 1;
        default:
            return 1;
    }
}

size_t CircuitProgram::count_measurements() const {
    size_t n = 0;
    for (const auto &inst : instructions) {
        n += inst.measurement_count();
    }
    return n;
}

size_t CircuitProgram::count_detectors() const {
    return std::count_if(instructions.begin(), instructions.end(),
                         [](const Instruction &i) { return i.op == Opcode::DETECTOR; });
}

size_t CircuitProgram::count_observables() const {
    size_t n = 0;
    for (const auto &inst : instructions) {
        if (inst.op == Opcode::OBSERVABLE && !inst.params.empty() && inst.params[0] >= 0) {
            n = std::max(n, static_cast<size_t>(inst.params[0]) + 1);
        }
    }
    return n;
}

bool CircuitProgram::has_tag(size_t index, std::string_view tag) const {
    auto it = tags.find(index);
    if (it == tags.end()) {
        return false;
    }
    return std::binary_search(it->second.begin(), it->second.end(), tag);
}

void CircuitProgram::add_tag(size_t index, const std::string &tag) {
    auto &set = tags[index];
    auto pos = std::lower_bound(set.begin(), set.end(), tag);
    if (pos == set.end() || *pos != tag) {
        set.insert(pos, tag);
    }
}

ParseError::ParseError(size_t line, const std::string &message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

CircuitProgram parse_program(std::string_view text) {
    CircuitProgram prog;
    bool have_header = false;
    size_t measurements = 0;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        line_no++;

        TagSet tags;
        size_t hash = raw.find('#');
        if (hash != std::string_view::npos) {
            std::string_view comment = trim(raw.substr(hash + 1));
            if (comment.substr(0, 4) == "tag:") {
                std::string_view list = trim(comment.substr(4));
                size_t start = 0;
                while (start <= list.size()) {
                    size_t comma = list.find(',', start);
                    std::string_view t =
                        trim(list.substr(start, comma == std::string_view::npos ? list.npos : comma - start));
                    if (!t.empty()) {
                        tags.emplace_back(t);
                    }
                    if (comma == std::string_view::npos) {
                        break;
                    }
                    start = comma + 1;
                }
            }
            raw = raw.substr(0, hash);
        }
        std::string_view line = trim(raw);
        if (line.empty()) {
            continue;
        }

        // Split off the opcode and its optional parameter list.
        size_t name_end = 0;
        while (name_end < line.size() && line[name_end] != '(' &&
               !std::isspace(static_cast<unsigned char>(line[name_end]))) {
            name_end++;
        }
        std::string_view name = line.substr(0, name_end);
        std::string_view rest = line.substr(name_end);
        std::vector<double> params;
        if (!rest.empty() && rest[0] == '(') {
            size_t close = rest.find(')');
            if (close == std::string_view::npos) {
                throw ParseError(line_no, "unterminated parameter list");
            }
            std::string_view plist = rest.substr(1, close - 1);
            size_t start = 0;
            while (true) {
                size_t comma = plist.find(',', start);
                std::string_view tok =
                    trim(plist.substr(start, comma == std::string_view::npos ? plist.npos : comma - start));
                double v;
                if (!parse_double(tok, v)) {
                    throw ParseError(line_no, "bad parameter '" + std::string(tok) + "'");
                }
                params.push_back(v);
                if (comma == std::string_view::npos) {
                    break;
                }
                start = comma + 1;
            }
            rest = rest.substr(close + 1);
        }
        auto tokens = split_ws(rest);

        if (name == "QUBITS") {
            if (have_header || !params.empty() || tokens.size() != 1 ||
                !parse_int(tokens[0], prog.qubit_count)) {
                throw ParseError(line_no, "malformed QUBITS header");
            }
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw ParseError(line_no, "missing QUBITS header");
        }
        auto op = opcode_from_name(name);
        if (!op) {
            throw ParseError(line_no, "unknown opcode '" + std::string(name) + "'");
        }
        Instruction inst;
        inst.op = *op;
        inst.params = std::move(params);
        if (inst.params.size() != expected_params(inst.op)) {
            throw ParseError(line_no, "wrong parameter count for " + std::string(name));
        }
        for (auto tok : tokens) {
            int32_t rec;
            PauliProduct prod;
            uint32_t q;
            if (tok.substr(0, 4) == "rec[") {
                if (!parse_record(tok, rec)) {
                    throw ParseError(line_no, "malformed record reference '" + std::string(tok) + "'");
                }
                if (rec >= 0) {
                    throw ParseError(line_no, "record offsets must be negative");
                }
                if (static_cast<size_t>(-static_cast<int64_t>(rec)) > measurements) {
                    throw ParseError(line_no, "record reference out of range");
                }
                inst.records.push_back(rec);
            } else if (parse_int(tok, q)) {
                inst.qubits.push_back(q);
            } else if (parse_product(tok, prod)) {
                inst.products.push_back(std::move(prod));
            } else if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
                throw ParseError(line_no, "malformed Pauli product '" + std::string(tok) + "'");
            } else {
                throw ParseError(line_no, "bad target '" + std::string(tok) + "'");
            }
        }
        bool kinds_ok = false;
        switch (target_kind(inst.op)) {
            case TargetKind::Qubits:
                kinds_ok = inst.products.empty() && inst.records.empty();
                break;
            case TargetKind::Products:
                kinds_ok = inst.qubits.empty() && inst.records.empty();
                break;
            case TargetKind::Records:
                kinds_ok = inst.qubits.empty() && inst.products.empty();
                break;
            case TargetKind::CondTargets:
                kinds_ok = inst.products.empty() && inst.records.size() == 1 && inst.qubits.size() == 1;
                break;
            case TargetKind::None:
                kinds_ok = tokens.empty();
                break;
        }
        if (!kinds_ok) {
            throw ParseError(line_no, "wrong target types for " + std::string(name));
        }
        measurements += inst.measurement_count();
        size_t index = prog.instructions.size();
        prog.instructions.push_back(std::move(inst));
        for (const auto &t : tags) {
            prog.add_tag(index, t);
        }
    }
    if (!have_header) {
        throw ParseError(line_no, "missing QUBITS header");
    }
    return prog;
}

CircuitProgram parse_program(std::istream &in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_program(text);
}

std::string serialize_program(const CircuitProgram &prog) {
    std::string out = "QUBITS " + std::to_string(prog.qubit_count) + "\n";
    for (size_t i = 0; i < prog.instructions.size(); i++) {
        const auto &inst = prog.instructions[i];
        out += opcode_name(inst.op);
        if (!inst.params.empty()) {
            out += '(';
            for (size_t k = 0; k < inst.params.size(); k++) {
                if (k) {
                    out += ',';
                }
                out += format_double(inst.params[k]);
            }
            out += ')';
        }
        if (inst.op == Opcode::COND_X || inst.op == Opcode::COND_Z) {
            out += " rec[" + std::to_string(inst.records.at(0)) + "] " + std::to_string(inst.qubits.at(0));
        } else {
            for (auto q : inst.qubits) {
                out += ' ';
                out += std::to_string(q);
            }
            for (const auto &p : inst.products) {
                out += ' ';
                append_product(out, p);
            }
            for (auto r : inst.records) {
                out += " rec[" + std::to_string(r) + "]";
            }
        }
        auto it = prog.tags.find(i);
        if (it != prog.tags.end() && !it->second.empty()) {
            out += "  # tag: ";
            for (size_t k = 0; k < it->second.size(); k++) {
                if (k) {
                    out += ',';
                }
                out += it->second[k];
            }
        }
        out += '\n';
    }
    return out;
}

std::string Violation::message() const { return "instruction " + std::to_string(instruction) + ": " + rule; }

std::vector<Violation> validate_program(const CircuitProgram &prog) {
    std::vector<Violation> out;
    size_t measurements = 0;
    std::set<int64_t> observables;
    for (size_t i = 0; i < prog.instructions.size(); i++) {
        const auto &inst = prog.instructions[i];
        auto bad = [&](std::string rule) { out.push_back({i, std::move(rule)}); };
        auto check_qubit = [&](uint32_t q) {
            if (q >= prog.qubit_count) {
                bad("qubit " + std::to_string(q) + " out of range");
            }
        };
        if (inst.params.size() != expected_params(inst.op)) {
            bad("wrong parameter count");
        }
        if (is_noise_channel(inst.op)) {
            for (double p : inst.params) {
                if (!(p >= 0 && p <= 1)) {
                    bad("probability outside [0,1]");
                }
            }
        }
        TargetKind kind = target_kind(inst.op);
        if (kind != TargetKind::Qubits && kind != TargetKind::CondTargets && !inst.qubits.empty()) {
            bad("unexpected qubit targets");
        }
        if (kind != TargetKind::Products && !inst.products.empty()) {
            bad("unexpected Pauli product targets");
        }
        if (kind != TargetKind::Records && kind != TargetKind::CondTargets && !inst.records.empty()) {
            bad("unexpected record targets");
        }
        for (auto q : inst.qubits) {
            check_qubit(q);
        }
        switch (kind) {
            case TargetKind::Qubits:
                if (inst.qubits.empty()) {
                    bad("requires at least one target");
                }
                if (is_two_qubit_gate(inst.op)) {
                    if (inst.qubits.size() % 2) {
                        bad(std::string(opcode_name(inst.op)) + " requires an even number of targets");
                    } else {
                        for (size_t k = 0; k < inst.qubits.size(); k += 2) {
                            if (inst.qubits[k] == inst.qubits[k + 1]) {
                                bad(std::string(opcode_name(inst.op)) + " pair qubits must be distinct");
                            }
                        }
                    }
                }
                break;
            case TargetKind::Products:
                if (inst.op == Opcode::MPP) {
                    if (inst.products.empty()) {
                        bad("requires at least one target");
                    }
                    for (const auto &p : inst.products) {
                        if (p.size() != 2) {
                            bad("MPP products must have exactly two terms");
                        } else if (p[0].qubit == p[1].qubit) {
                            bad("MPP qubits must be distinct");
                        }
                    }
                } else {
                    if (inst.products.size() != 1 || inst.products[0].empty()) {
                        bad("CORRELATED_ERROR takes exactly one non-empty Pauli product");
                    } else {
                        std::set<uint32_t> seen;
                        for (const auto &t : inst.products[0]) {
                            if (!seen.insert(t.qubit).second) {
                                bad("CORRELATED_ERROR qubits must be distinct");
                                break;
                            }
                        }
                    }
                }
                for (const auto &p : inst.products) {
                    for (const auto &t : p) {
                        check_qubit(t.qubit);
                        if (t.axis == Pauli::I) {
                            bad("identity term in Pauli product");
                        }
                    }
                }
                break;
            case TargetKind::CondTargets:
                if (inst.records.size() != 1 || inst.qubits.size() != 1) {
                    bad("conditional Pauli takes one record and one qubit");
                }
                break;
            case TargetKind::Records:
                if (inst.op == Opcode::OBSERVABLE && inst.params.size() == 1) {
                    double k = inst.params[0];
                    if (!(k >= 0) || k != std::floor(k) || k > 1e9) {
                        bad("observable index must be a non-negative integer");
                    } else {
                        observables.insert(static_cast<int64_t>(k));
                    }
                }
                break;
            case TargetKind::None:
                break;
        }
        for (auto r : inst.records) {
            if (r >= 0) {
                bad("record offsets must be negative");
            } else if (static_cast<size_t>(-static_cast<int64_t>(r)) > measurements) {
                bad("record reference rec[" + std::to_string(r) + "] out of range");
            }
        }
        measurements += inst.measurement_count();
    }
    if (!observables.empty() && static_cast<size_t>(*observables.rbegin()) + 1 != observables.size()) {
        out.push_back({prog.instructions.size(), "observable indices must be contiguous from 0"});
    }
    return out;
}

ResourceSummary count_resources(const CircuitProgram &prog) {
    ResourceSummary r;
    for (size_t i = 0; i < prog.instructions.size(); i++) {
        const auto &inst = prog.instructions[i];
        size_t n = inst.operation_count();
        r.gate_counts[std::string(opcode_name(inst.op))] += n;
        r.measurements += inst.measurement_count();
        if (inst.op == Opcode::DETECTOR) {
            r.detectors++;
        }
        auto it = prog.tags.find(i);
        if (it != prog.tags.end()) {
            for (const auto &t : it->second) {
                r.tag_counts[t] += n;
            }
        }
    }
    r.observables = prog.count_observables();
    return r;
}

}  // namespace dqec
