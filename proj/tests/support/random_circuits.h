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

#ifndef DQEC_TESTS_RANDOM_CIRCUITS_H
#define DQEC_TESTS_RANDOM_CIRCUITS_H

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dqec/circuit.h"

namespace dqec::oracle {

/// Dense Pauli string kept as x/z bit vectors; signs are ignored because
/// detectors only compare against the noiseless reference.
struct DensePauli {
    std::vector<uint8_t> x, z;
    explicit DensePauli(uint32_t n = 0) : x(n, 0), z(n, 0) {}
    bool commutes(const DensePauli &o) const {
        int acc = 0;
        for (size_t q = 0; q < x.size(); q++) {
            acc ^= (x[q] & o.z[q]) ^ (z[q] & o.x[q]);
        }
        return acc == 0;
    }
    bool touches(uint32_t q) const { return x[q] || z[q]; }
    size_t weight() const {
        size_t w = 0;
        for (size_t q = 0; q < x.size(); q++) {
            w += x[q] || z[q];
        }
        return w;
    }
    PauliProduct product() const {
        PauliProduct p;
        for (uint32_t q = 0; q < x.size(); q++) {
            if (x[q] || z[q]) {
                p.push_back({q, pauli_from_bits(x[q], z[q])});
            }
        }
        return p;
    }
};

/// Heisenberg-picture update of a Pauli under one Clifford gate.
inline void conjugate(DensePauli &p, Opcode op, uint32_t a, uint32_t b = 0) {
    switch (op) {
        case Opcode::H:
            std::swap(p.x[a], p.z[a]);
            break;
        case Opcode::S:
        case Opcode::SDAG:
            p.z[a] ^= p.x[a];
            break;
        case Opcode::CX:
            p.x[b] ^= p.x[a];
            p.z[a] ^= p.z[b];
            break;
        case Opcode::CZ:
            p.z[a] ^= p.x[b];
            p.z[b] ^= p.x[a];
            break;
        default:
            break;
    }
}

struct RandomCircuitOptions {
    uint32_t max_qubits = 16;
    size_t steps = 40;
    double max_p = 0.2;
    bool noise = true;
};

/// Random Clifford circuit whose detectors and observables are deterministic
/// by construction. Each detector closes a tracked Pauli opened by a reset or
/// an earlier measurement and carried through the gates in between.
inline CircuitProgram random_deterministic_circuit(std::mt19937_64 &rng, const RandomCircuitOptions &opt = {}) {
    auto pick = [&](uint64_t n) { return static_cast<uint32_t>(rng() % n); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    uint32_t n = 1 + pick(opt.max_qubits);
    CircuitProgram prog;
    prog.qubit_count = n;
    size_t records = 0;
    uint32_t observables = 0;

    struct Open {
        DensePauli pauli;
        std::optional<size_t> record;
    };
    std::vector<Open> open;
    auto emit = [&](Instruction inst) {
        records += inst.measurement_count();
        prog.instructions.push_back(std::move(inst));
    };
    auto rec_offset = [&](size_t absolute) { return static_cast<int32_t>(absolute) - static_cast<int32_t>(records); };
    auto compatible = [&](const DensePauli &p) {
        return std::all_of(open.begin(), open.end(), [&](const Open &o) { return o.pauli.commutes(p); });
    };
    auto untouched = [&](uint32_t q) {
        return std::none_of(open.begin(), open.end(), [&](const Open &o) { return o.pauli.touches(q); });
    };
    auto shuffled_qubits = [&]() {
        std::vector<uint32_t> qs(n);
        for (uint32_t i = 0; i < n; i++) {
            qs[i] = i;
        }
        std::shuffle(qs.begin(), qs.end(), rng);
        return qs;
    };
    auto random_pauli = [&]() {
        DensePauli p(n);
        uint32_t w = 1 + pick(std::min<uint32_t>(n, 4));
        auto qs = shuffled_qubits();
        for (uint32_t i = 0; i < w; i++) {
            uint32_t a = 1 + pick(3);
            p.x[qs[i]] = a & 1;
            p.z[qs[i]] = (a >> 1) & 1;
        }
        return p;
    };
    // Measure a Pauli: M or MX for single-qubit Z or X, MPP for weight two,
    // otherwise rotate it onto one qubit's Z first and undo that afterwards.
    auto measure = [&](const DensePauli &p) {
        std::vector<uint32_t> support;
        for (uint32_t q = 0; q < n; q++) {
            if (p.touches(q)) {
                support.push_back(q);
            }
        }
        if (support.size() == 2) {
            emit({Opcode::MPP, {}, {}, {p.product()}, {}});
            return records - 1;
        }
        std::vector<uint32_t> xs, ys;
        for (auto q : support) {
            if (p.x[q] && p.z[q]) {
                ys.push_back(q);
            } else if (p.x[q]) {
                xs.push_back(q);
            }
        }
        if (support.size() == 1 && ys.empty()) {
            emit({xs.empty() ? Opcode::M : Opcode::MX, {}, support, {}, {}});
            return records - 1;
        }
        uint32_t last = support.back();
        std::vector<uint32_t> chain;
        for (size_t i = 0; i + 1 < support.size(); i++) {
            chain.push_back(support[i]);
            chain.push_back(last);
        }
        auto h_targets = xs;
        h_targets.insert(h_targets.end(), ys.begin(), ys.end());
        if (!ys.empty()) {
            emit({Opcode::S, {}, ys, {}, {}});
        }
        if (!h_targets.empty()) {
            emit({Opcode::H, {}, h_targets, {}, {}});
        }
        if (!chain.empty()) {
            emit({Opcode::CX, {}, chain, {}, {}});
        }
        emit({Opcode::M, {}, {last}, {}, {}});
        size_t r = records - 1;
        if (!chain.empty()) {
            emit({Opcode::CX, {}, chain, {}, {}});
        }
        if (!h_targets.empty()) {
            emit({Opcode::H, {}, h_targets, {}, {}});
        }
        if (!ys.empty()) {
            emit({Opcode::SDAG, {}, ys, {}, {}});
        }
        return r;
    };
    auto add_noise = [&]() {
        if (!opt.noise) {
            return;
        }
        double p = std::uniform_real_distribution<double>(0, opt.max_p)(rng);
        Instruction inst;
        inst.params = {p};
        switch (pick(3)) {
            case 0: {
                inst.op = Opcode::DEPOLARIZE1;
                auto qs = shuffled_qubits();
                qs.resize(1 + pick(n));
                inst.qubits = qs;
                break;
            }
            case 1: {
                if (n < 2) {
                    return;
                }
                inst.op = Opcode::DEPOLARIZE2;
                auto qs = shuffled_qubits();
                qs.resize(2 * (1 + pick(n / 2)));
                inst.qubits = qs;
                break;
            }
            default:
                inst.op = Opcode::CORRELATED_ERROR;
                inst.products = {random_pauli().product()};
                break;
        }
        emit(std::move(inst));
    };
    auto close = [&](size_t i, bool observable) {
        size_t r = measure(open[i].pauli);
        Instruction inst;
        inst.op = observable ? Opcode::OBSERVABLE : Opcode::DETECTOR;
        if (observable) {
            // Indices must stay contiguous from zero.
            uint32_t k = pick(std::min<uint32_t>(observables + 1, 3));
            observables = std::max(observables, k + 1);
            inst.params = {static_cast<double>(k)};
        }
        inst.records.push_back(rec_offset(r));
        if (open[i].record) {
            inst.records.push_back(rec_offset(*open[i].record));
        }
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
        emit(std::move(inst));
    };

    emit({Opcode::RZ, {}, shuffled_qubits(), {}, {}});
    for (uint32_t q = 0; q < n; q++) {
        DensePauli p(n);
        p.z[q] = 1;
        open.push_back({p, std::nullopt});
    }
    for (size_t step = 0; step < opt.steps; step++) {
        switch (pick(8)) {
            case 0:
            case 1: {
                // A layer of gates on disjoint qubits.
                auto qs = shuffled_qubits();
                size_t at = 0;
                while (at < qs.size()) {
                    Opcode op = std::vector<Opcode>{Opcode::H, Opcode::S, Opcode::SDAG, Opcode::X, Opcode::Y,
                                                    Opcode::Z, Opcode::CX, Opcode::CZ}[pick(8)];
                    if (is_two_qubit_gate(op)) {
                        if (at + 1 >= qs.size()) {
                            break;
                        }
                        for (auto &o : open) {
                            conjugate(o.pauli, op, qs[at], qs[at + 1]);
                        }
                        emit({op, {}, {qs[at], qs[at + 1]}, {}, {}});
                        at += 2;
                    } else {
                        for (auto &o : open) {
                            conjugate(o.pauli, op, qs[at]);
                        }
                        emit({op, {}, {qs[at]}, {}, {}});
                        at += 1;
                    }
                }
                break;
            }
            case 2:
                add_noise();
                break;
            case 3: {
                // Open: measure a Pauli compatible with everything tracked.
                auto p = random_pauli();
                if (compatible(p)) {
                    size_t r = measure(p);
                    open.push_back({p, r});
                }
                break;
            }
            case 4:
                if (!open.empty()) {
                    close(pick(open.size()), coin(0.2));
                }
                break;
            case 5: {
                // Reset an untracked qubit into Z or X.
                uint32_t q = pick(n);
                if (untouched(q)) {
                    bool xb = coin(0.5);
                    emit({xb ? Opcode::RX : Opcode::RZ, {}, {q}, {}, {}});
                    DensePauli p(n);
                    (xb ? p.x : p.z)[q] = 1;
                    open.push_back({p, std::nullopt});
                }
                break;
            }
            case 6: {
                // Measure then fix up: the conditioned flip leaves a known eigenstate.
                uint32_t q = pick(n);
                if (untouched(q)) {
                    bool xb = coin(0.5);
                    emit({xb ? Opcode::MX : Opcode::M, {}, {q}, {}, {}});
                    emit({xb ? Opcode::COND_Z : Opcode::COND_X, {}, {q}, {}, {-1}});
                    DensePauli p(n);
                    (xb ? p.x : p.z)[q] = 1;
                    open.push_back({p, std::nullopt});
                }
                break;
            }
            default:
                emit({Opcode::TICK, {}, {}, {}, {}});
                break;
        }
    }
    while (!open.empty()) {
        add_noise();
        close(pick(open.size()), coin(0.1));
    }
    return prog;
}

}  // namespace dqec::oracle

#endif
