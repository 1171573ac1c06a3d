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

#include "dqec/netcompile.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "dqec/rng.h"
#include "dqec/sim.h"

namespace dqec {

double NoiseParams::p_nonlocal() const { return std::min(1.0, nonlocal_ratio * p); }

double bell_fidelity(double p_nl) { return 1.0 - 12.0 / 15.0 * p_nl; }

std::vector<size_t> CompiledExperiment::dropout_channel_indices() const {
    std::vector<size_t> out;
    for (const auto &[index, tags] : program.tags) {
        if (std::binary_search(tags.begin(), tags.end(), std::string("dropout"))) {
            out.push_back(index);
        }
    }
    return out;
}

std::string CompiledExperiment::metadata_json() const {
    nlohmann::json doc;
    doc["code"] = code_name;
    doc["mode"] = mode;
    doc["n_q"] = n_q;
    doc["seed"] = seed;
    doc["k"] = k;
    doc["qubit_count"] = program.qubit_count;
    doc["noise"] = {{"p", noise.p},
                    {"p_nl", noise.p_nonlocal()},
                    {"p_dropout", noise.p_dropout},
                    {"e", noise.dropout_samples}};
    nlohmann::json rounds_json = nlohmann::json::array();
    for (const auto &r : rounds) {
        rounds_json.push_back({{"begin", r.begin},
                               {"end", r.end},
                               {"noisy", r.noisy},
                               {"noisy_index", r.noisy_index},
                               {"swap_block", r.swap_block},
                               {"duration", r.duration},
                               {"bell_batches", r.bell_batches}});
    }
    doc["rounds"] = rounds_json;
    doc["dropout_channels"] = dropout_channel_indices();
    return doc.dump(1);
}

namespace {

struct Part {
    uint32_t qubit = 0;
    std::vector<uint32_t> data;
};

/// A check measured through comm qubits in one batch.
struct BatchCheck {
    uint32_t check = 0;
    /// Ancilla-like qubit per participating cluster; root first.
    std::vector<Part> parts;
    /// Bell pairs (root half, leaf half); the first root half is the GHZ root.
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    /// Data all in one cluster but its ancilla elsewhere: a single comm qubit.
    bool comm_local = false;
};

struct Gate {
    uint32_t ctrl = 0;
    uint32_t data = 0;
    Pauli type = Pauli::X;
    uint32_t order = 0;
    uint32_t check = 0;
};

enum class Mode { Memory, SwapOut, Monolithic };

class Compiler {
   public:
    Compiler(const ScheduleTemplate &s, const NetworkLayout &layout, const NoiseParams &noise,
             const TimingModel &timing, const CompileOptions &opt)
        : s_(s), layout_(layout), noise_(noise), timing_(timing), opt_(opt) {}

    CompiledExperiment run(Mode mode, std::optional<SwapOutOptions> swap, std::optional<uint32_t> failure_round);

   private:
    // Emission helpers.
    size_t emit(Instruction inst, std::initializer_list<const char *> tags = {}) {
        size_t idx = prog_.instructions.size();
        meas_ += inst.measurement_count();
        prog_.instructions.push_back(std::move(inst));
        for (const char *t : tags) {
            prog_.add_tag(idx, t);
        }
        return idx;
    }
    void gate(Opcode op, const std::vector<uint32_t> &qubits) {
        if (!qubits.empty()) {
            Instruction i;
            i.op = op;
            i.qubits = qubits;
            emit(std::move(i));
        }
    }
    void noise1(const std::vector<uint32_t> &qubits, double p, std::initializer_list<const char *> tags = {}) {
        if (p > 0 && !qubits.empty()) {
            Instruction i;
            i.op = Opcode::DEPOLARIZE1;
            i.params = {p};
            i.qubits = qubits;
            emit(std::move(i), tags);
        }
    }
    void noise2(const std::vector<uint32_t> &pairs, double p, std::initializer_list<const char *> tags = {}) {
        if (p > 0 && !pairs.empty()) {
            Instruction i;
            i.op = Opcode::DEPOLARIZE2;
            i.params = {p};
            i.qubits = pairs;
            emit(std::move(i), tags);
        }
    }
    /// Returns the absolute index of the first record.
    uint64_t measure(Opcode op, const std::vector<uint32_t> &qubits) {
        uint64_t first = meas_;
        gate(op, qubits);
        return first;
    }
    void cond(Opcode op, uint64_t record, uint32_t qubit) {
        Instruction i;
        i.op = op;
        i.records = {static_cast<int32_t>(static_cast<int64_t>(record) - static_cast<int64_t>(meas_))};
        i.qubits = {qubit};
        emit(std::move(i));
    }
    void tick(uint32_t n) {
        for (uint32_t k = 0; k < n; k++) {
            emit(Instruction{});
        }
        now_ += n;
    }
    void busy(const std::vector<uint32_t> &qubits, uint32_t dt) {
        for (auto q : qubits) {
            busy_[q] += dt;
        }
    }
    double idle_probability(uint32_t t) const {
        if (t == 0 || pl_ <= 0) {
            return 0;
        }
        return 1.0 - std::pow(1.0 - pl_, static_cast<double>(t));
    }
    void idle_noise(const std::map<uint32_t, std::vector<uint32_t>> &by_time) {
        for (const auto &[t, qs] : by_time) {
            noise1(qs, idle_probability(t), {"idle"});
        }
    }
    uint32_t new_qubit(QubitRole role, uint32_t cluster) {
        role_.push_back(role);
        cluster_.push_back(cluster);
        busy_.push_back(0);
        live_since_.push_back(0);
        return static_cast<uint32_t>(role_.size() - 1);
    }
    std::vector<uint32_t> data_phys() const {
        std::vector<uint32_t> out;
        for (uint32_t q = 0; q < s_.data_qubits; q++) {
            out.push_back(phys_[q]);
        }
        return out;
    }

    void compile_round(uint32_t t);
    void run_phase(uint32_t t, const std::vector<uint32_t> &checks);
    void local_block(uint32_t t, const std::vector<uint32_t> &local);
    void batch_block(uint32_t t, std::vector<BatchCheck> &batch, const std::vector<uint32_t> &local);
    void interaction(const std::vector<Gate> &gates);
    void floquet_interaction(uint32_t t, const std::vector<Gate> &gates, const std::vector<uint32_t> &local);
    void round_end(uint32_t t);
    void swap_block(uint32_t target);
    void record(uint32_t t, uint32_t check, std::vector<uint64_t> records) { outcomes_[t][check] = std::move(records); }
    std::vector<int32_t> to_offsets(std::vector<uint64_t> abs) const;

    const ScheduleTemplate &s_;
    const NetworkLayout &layout_;
    NoiseParams noise_;
    TimingModel timing_;
    CompileOptions opt_;

    CircuitProgram prog_;
    uint64_t meas_ = 0;
    double pl_ = 0;
    double pnl_ = 0;
    uint32_t now_ = 0;
    uint32_t batches_in_round_ = 0;
    std::vector<uint32_t> busy_;
    std::vector<uint32_t> live_since_;
    std::vector<QubitRole> role_;
    std::vector<uint32_t> cluster_;
    /// Schedule qubit -> physical qubit, and its current cluster.
    std::vector<uint32_t> phys_;
    std::vector<uint32_t> sched_cluster_;
    std::vector<std::vector<uint32_t>> comm_;
    uint32_t qpi_ = 0;
    std::vector<uint32_t> pending_readout_;
    std::vector<uint32_t> pending_check_;
    std::vector<std::vector<std::vector<uint64_t>>> outcomes_;
};

std::vector<int32_t> Compiler::to_offsets(std::vector<uint64_t> abs) const {
    std::sort(abs.begin(), abs.end());
    std::vector<int32_t> out;
    for (size_t i = 0; i < abs.size();) {
        size_t j = i;
        while (j < abs.size() && abs[j] == abs[i]) {
            j++;
        }
        if ((j - i) % 2) {
            out.push_back(static_cast<int32_t>(static_cast<int64_t>(abs[i]) - static_cast<int64_t>(meas_)));
        }
        i = j;
    }
    return out;
}

void Compiler::interaction(const std::vector<Gate> &gates_in) {
    std::vector<Gate> gates = gates_in;
    std::stable_sort(gates.begin(), gates.end(), [](const Gate &a, const Gate &b) {
        return std::tie(a.order, a.check) < std::tie(b.order, b.check);
    });
    std::map<uint32_t, uint32_t> next_free;
    std::vector<std::set<uint32_t>> used;
    std::vector<std::vector<Gate>> layers;
    for (const auto &g : gates) {
        uint32_t L = next_free[g.ctrl];
        while (L < used.size() && (used[L].count(g.data) || used[L].count(g.ctrl))) {
            L++;
        }
        if (L >= used.size()) {
            used.resize(L + 1);
            layers.resize(L + 1);
        }
        used[L].insert(g.data);
        used[L].insert(g.ctrl);
        layers[L].push_back(g);
        next_free[g.ctrl] = L + 1;
    }
    for (const auto &layer : layers) {
        std::vector<uint32_t> cx, cz, touched;
        for (const auto &g : layer) {
            auto &dst = g.type == Pauli::Z ? cz : cx;
            dst.push_back(g.ctrl);
            dst.push_back(g.data);
            touched.push_back(g.ctrl);
            touched.push_back(g.data);
        }
        gate(Opcode::CX, cx);
        gate(Opcode::CZ, cz);
        std::vector<uint32_t> all = cx;
        all.insert(all.end(), cz.begin(), cz.end());
        noise2(all, pl_);
        busy(touched, timing_.tau_gate);
        tick(timing_.tau_gate);
    }
}

void Compiler::floquet_interaction(uint32_t t, const std::vector<Gate> &gates, const std::vector<uint32_t> &local) {
    std::vector<uint32_t> ydata;
    for (const auto &g : gates) {
        if (g.type == Pauli::Y) {
            ydata.push_back(g.data);
        }
    }
    if (!ydata.empty()) {
        gate(Opcode::SDAG, ydata);
        noise1(ydata, pl_);
        busy(ydata, timing_.tau_gate);
        tick(timing_.tau_gate);
    }
    std::vector<uint32_t> cx, cz, touched;
    for (const auto &g : gates) {
        auto &dst = g.type == Pauli::Z ? cz : cx;
        dst.push_back(g.ctrl);
        dst.push_back(g.data);
        touched.push_back(g.ctrl);
        touched.push_back(g.data);
    }
    gate(Opcode::CX, cx);
    gate(Opcode::CZ, cz);
    std::vector<uint32_t> all = cx;
    all.insert(all.end(), cz.begin(), cz.end());
    noise2(all, pl_);
    if (!local.empty()) {
        std::vector<uint32_t> pairs;
        Instruction mpp;
        mpp.op = Opcode::MPP;
        for (auto c : local) {
            PauliProduct prod;
            for (const auto &term : s_.checks[c].support) {
                prod.push_back({phys_[term.qubit], term.axis});
                pairs.push_back(phys_[term.qubit]);
                touched.push_back(phys_[term.qubit]);
            }
            mpp.products.push_back(std::move(prod));
        }
        noise2(pairs, pl_);
        uint64_t first = meas_;
        emit(std::move(mpp));
        for (size_t i = 0; i < local.size(); i++) {
            record(t, local[i], {first + i});
        }
    }
    busy(touched, timing_.tau_gate);
    tick(timing_.tau_gate);
    if (!ydata.empty()) {
        gate(Opcode::S, ydata);
        noise1(ydata, pl_);
        busy(ydata, timing_.tau_gate);
        tick(timing_.tau_gate);
    }
}

void Compiler::local_block(uint32_t t, const std::vector<uint32_t> &local) {
    if (local.empty()) {
        return;
    }
    if (s_.floquet) {
        floquet_interaction(t, {}, local);
        return;
    }
    std::vector<uint32_t> anc;
    std::vector<Gate> gates;
    for (auto c : local) {
        uint32_t a = phys_[*s_.checks[c].ancilla];
        anc.push_back(a);
        for (size_t k = 0; k < s_.checks[c].support.size(); k++) {
            const auto &term = s_.checks[c].support[k];
            gates.push_back({a, phys_[term.qubit], term.axis, static_cast<uint32_t>(k), c});
        }
    }
    gate(Opcode::RX, anc);
    noise1(anc, pl_);
    for (auto a : anc) {
        live_since_[a] = now_;
    }
    busy(anc, timing_.tau_gate);
    tick(timing_.tau_gate);
    interaction(gates);
    for (auto c : local) {
        pending_readout_.push_back(phys_[*s_.checks[c].ancilla]);
        pending_check_.push_back(c);
    }
}

void Compiler::batch_block(uint32_t t, std::vector<BatchCheck> &batch, const std::vector<uint32_t> &local) {
    batches_in_round_++;
    // Entanglement generation: ideal Bell pairs followed by two-qubit depolarizing noise.
    std::vector<uint32_t> reset, roots, pairs, comm_all, comm_local;
    for (auto &bc : batch) {
        if (bc.comm_local) {
            comm_local.push_back(bc.parts[0].qubit);
            continue;
        }
        for (auto [a, b] : bc.pairs) {
            reset.push_back(a);
            reset.push_back(b);
            roots.push_back(a);
            pairs.push_back(a);
            pairs.push_back(b);
        }
    }
    comm_all = reset;
    comm_all.insert(comm_all.end(), comm_local.begin(), comm_local.end());
    for (auto q : comm_all) {
        busy_[q] = 0;
        live_since_[q] = now_;
    }
    gate(Opcode::RZ, reset);
    gate(Opcode::H, roots);
    gate(Opcode::CX, pairs);
    noise2(pairs, pnl_, {"nonlocal"});
    gate(Opcode::RX, comm_local);
    noise1(comm_local, pl_);
    busy(comm_local, timing_.tau_gate);
    std::vector<uint32_t> anc;
    if (!s_.floquet) {
        for (auto c : local) {
            anc.push_back(phys_[*s_.checks[c].ancilla]);
        }
        gate(Opcode::RX, anc);
        noise1(anc, pl_);
        for (auto a : anc) {
            live_since_[a] = now_;
        }
        busy(anc, timing_.tau_gate);
    }
    uint32_t gen_time = pairs.empty() ? timing_.tau_gate : timing_.tau_bell;
    busy(reset, gen_time);
    tick(gen_time);

    // Star fusion of Bell pairs into GHZ states.
    size_t fusion_layers = 0;
    for (const auto &bc : batch) {
        if (bc.pairs.size() > 1) {
            fusion_layers = std::max(fusion_layers, bc.pairs.size() - 1);
        }
    }
    for (size_t layer = 1; layer <= fusion_layers; layer++) {
        std::vector<uint32_t> cx;
        for (const auto &bc : batch) {
            if (layer < bc.pairs.size()) {
                cx.push_back(bc.pairs[0].first);
                cx.push_back(bc.pairs[layer].first);
            }
        }
        gate(Opcode::CX, cx);
        noise2(cx, pl_);
        busy(cx, timing_.tau_gate);
        tick(timing_.tau_gate);
    }
    if (fusion_layers > 0) {
        std::vector<uint32_t> fused;
        std::vector<uint32_t> leaves;
        for (const auto &bc : batch) {
            for (size_t i = 1; i < bc.pairs.size(); i++) {
                fused.push_back(bc.pairs[i].first);
                leaves.push_back(bc.pairs[i].second);
            }
        }
        noise1(fused, pl_);
        uint64_t first = measure(Opcode::M, fused);
        for (size_t i = 0; i < fused.size(); i++) {
            cond(Opcode::COND_X, first + i, leaves[i]);
        }
        busy(fused, timing_.tau_gate);
        tick(timing_.tau_gate);
    }

    // Check interactions.
    std::vector<Gate> gates;
    for (const auto &bc : batch) {
        const auto &support = s_.checks[bc.check].support;
        for (const auto &part : bc.parts) {
            for (auto dq : part.data) {
                uint32_t order = 0;
                Pauli type = Pauli::X;
                for (size_t k = 0; k < support.size(); k++) {
                    if (phys_[support[k].qubit] == dq) {
                        order = static_cast<uint32_t>(k);
                        type = support[k].axis;
                    }
                }
                gates.push_back({part.qubit, dq, type, order, bc.check});
            }
        }
    }
    if (s_.floquet) {
        floquet_interaction(t, gates, local);
    } else {
        for (auto c : local) {
            uint32_t a = phys_[*s_.checks[c].ancilla];
            for (size_t k = 0; k < s_.checks[c].support.size(); k++) {
                const auto &term = s_.checks[c].support[k];
                gates.push_back({a, phys_[term.qubit], term.axis, static_cast<uint32_t>(k), c});
            }
            pending_readout_.push_back(a);
            pending_check_.push_back(c);
        }
        interaction(gates);
    }

    // Release the comm qubits: X-basis readout of every GHZ qubit.
    std::vector<uint32_t> ghz;
    std::map<uint32_t, std::vector<uint32_t>> idle_by_time;
    for (const auto &bc : batch) {
        for (const auto &part : bc.parts) {
            ghz.push_back(part.qubit);
            uint32_t window = now_ - live_since_[part.qubit];
            idle_by_time[window - busy_[part.qubit]].push_back(part.qubit);
        }
    }
    idle_noise(idle_by_time);
    noise1(ghz, pl_);
    uint64_t first = measure(Opcode::MX, ghz);
    size_t pos = 0;
    for (const auto &bc : batch) {
        std::vector<uint64_t> recs;
        for (size_t i = 0; i < bc.parts.size(); i++) {
            recs.push_back(first + pos++);
        }
        record(t, bc.check, std::move(recs));
    }
    busy(ghz, timing_.tau_gate);
    tick(timing_.tau_gate);
}

void Compiler::run_phase(uint32_t t, const std::vector<uint32_t> &checks) {
    std::vector<uint32_t> local;
    std::vector<std::vector<BatchCheck>> batches;
    std::vector<std::vector<uint32_t>> usage;
    size_t nclusters = comm_.size();
    for (auto c : checks) {
        const auto &check = s_.checks[c];
        std::map<uint32_t, std::vector<uint32_t>> by_cluster;
        for (const auto &term : check.support) {
            by_cluster[sched_cluster_[term.qubit]].push_back(phys_[term.qubit]);
        }
        bool foreign_ancilla = by_cluster.size() == 1 && check.ancilla &&
                               sched_cluster_[*check.ancilla] != by_cluster.begin()->first;
        if (by_cluster.size() == 1 && !foreign_ancilla) {
            local.push_back(c);
            continue;
        }
        if (qpi_ == 0) {
            throw CompileError("nonlocal check " + std::to_string(c) + " but the layout has no QPIs");
        }
        // Root: most data qubits, lowest cluster id on ties.
        uint32_t root = by_cluster.begin()->first;
        for (const auto &[cl, qs] : by_cluster) {
            if (qs.size() > by_cluster[root].size()) {
                root = cl;
            }
        }
        std::vector<uint32_t> order = {root};
        for (const auto &[cl, qs] : by_cluster) {
            if (cl != root) {
                order.push_back(cl);
            }
        }
        std::map<uint32_t, uint32_t> need;
        need[root] = std::max<uint32_t>(1, static_cast<uint32_t>(order.size()) - 1);
        for (size_t i = 1; i < order.size(); i++) {
            need[order[i]] = 1;
        }
        if (need[root] > qpi_) {
            throw CompileError("check " + std::to_string(c) + " needs " + std::to_string(need[root]) +
                               " Bell halves at one node but only " + std::to_string(qpi_) + " QPIs exist");
        }
        size_t b = 0;
        for (; b < batches.size(); b++) {
            bool fits = true;
            for (auto [cl, n] : need) {
                fits = fits && usage[b][cl] + n <= qpi_;
            }
            if (fits) {
                break;
            }
        }
        if (b == batches.size()) {
            batches.emplace_back();
            usage.emplace_back(nclusters, 0);
        }
        BatchCheck bc;
        bc.check = c;
        if (order.size() == 1) {
            bc.comm_local = true;
            bc.parts.push_back({comm_[root][usage[b][root]++], by_cluster[root]});
        } else {
            std::vector<uint32_t> root_halves;
            for (uint32_t i = 0; i + 1 < order.size(); i++) {
                root_halves.push_back(comm_[root][usage[b][root]++]);
            }
            bc.parts.push_back({root_halves[0], by_cluster[root]});
            for (size_t i = 1; i < order.size(); i++) {
                uint32_t leaf = comm_[order[i]][usage[b][order[i]]++];
                bc.pairs.push_back({root_halves[i - 1], leaf});
                bc.parts.push_back({leaf, by_cluster[order[i]]});
            }
        }
        batches[b].push_back(std::move(bc));
    }
    if (batches.empty()) {
        local_block(t, local);
        return;
    }
    for (size_t b = 0; b < batches.size(); b++) {
        batch_block(t, batches[b], b == 0 ? local : std::vector<uint32_t>{});
    }
}

void Compiler::compile_round(uint32_t t) {
    for (const auto &sub : s_.subrounds) {
        if (s_.floquet) {
            run_phase(t, sub);
            continue;
        }
        // Stabilizer codes: all X-type checks, then all Z-type checks.
        std::vector<uint32_t> xs, zs;
        for (auto c : sub) {
            (s_.checks[c].basis() == Pauli::Z ? zs : xs).push_back(c);
        }
        run_phase(t, xs);
        run_phase(t, zs);
    }
    round_end(t);
}

void Compiler::round_end(uint32_t t) {
    uint32_t readout = pending_readout_.empty() ? 0 : timing_.tau_gate;
    uint32_t total = now_ + readout;
    std::map<uint32_t, std::vector<uint32_t>> idle_by_time;
    for (uint32_t q = 0; q < s_.data_qubits; q++) {
        uint32_t p = phys_[q];
        idle_by_time[total - busy_[p]].push_back(p);
    }
    for (auto a : pending_readout_) {
        uint32_t window = total - live_since_[a];
        idle_by_time[window - busy_[a] - readout].push_back(a);
    }
    idle_noise(idle_by_time);
    if (!pending_readout_.empty()) {
        noise1(pending_readout_, pl_);
        uint64_t first = measure(Opcode::MX, pending_readout_);
        for (size_t i = 0; i < pending_check_.size(); i++) {
            record(t, pending_check_[i], {first + i});
        }
        busy(pending_readout_, timing_.tau_gate);
        tick(timing_.tau_gate);
    }
    pending_readout_.clear();
    pending_check_.clear();

    for (const auto &tmpl : s_.detectors) {
        if (t < tmpl.first_period || (tmpl.only_period && t != *tmpl.only_period)) {
            continue;
        }
        std::vector<uint64_t> recs;
        bool valid = true;
        for (const auto &term : tmpl.terms) {
            int64_t tt = static_cast<int64_t>(t) + term.period_offset;
            if (tt < 0) {
                valid = false;
                break;
            }
            const auto &r = outcomes_[tt][term.check];
            recs.insert(recs.end(), r.begin(), r.end());
        }
        if (!valid) {
            continue;
        }
        Instruction det;
        det.op = Opcode::DETECTOR;
        det.records = to_offsets(std::move(recs));
        emit(std::move(det));
    }
    for (size_t k = 0; k < s_.observables.size(); k++) {
        std::vector<uint64_t> recs;
        for (const auto &sub : s_.observables[k].per_subround) {
            for (auto c : sub) {
                const auto &r = outcomes_[t][c];
                recs.insert(recs.end(), r.begin(), r.end());
            }
        }
        auto offsets = to_offsets(std::move(recs));
        if (!offsets.empty()) {
            Instruction obs;
            obs.op = Opcode::OBSERVABLE;
            obs.params = {static_cast<double>(k)};
            obs.records = std::move(offsets);
            emit(std::move(obs));
        }
    }
}

void Compiler::swap_block(uint32_t target) {
    uint32_t spare = static_cast<uint32_t>(comm_.size());
    std::vector<uint32_t> moved;
    for (uint32_t q = 0; q < s_.qubit_count; q++) {
        if (sched_cluster_[q] == target) {
            moved.push_back(q);
        }
    }
    std::map<uint32_t, uint32_t> fresh;
    for (auto q : moved) {
        fresh[q] = new_qubit(q < s_.data_qubits ? QubitRole::Data : QubitRole::Ancilla, spare);
    }
    comm_.emplace_back();
    for (uint32_t j = 0; j < qpi_; j++) {
        comm_.back().push_back(new_qubit(QubitRole::Comm, spare));
    }
    std::vector<uint32_t> data;
    for (auto q : moved) {
        if (q < s_.data_qubits) {
            data.push_back(q);
        }
    }
    for (size_t start = 0; start < data.size(); start += qpi_) {
        batches_in_round_++;
        size_t end = std::min(data.size(), start + qpi_);
        std::vector<uint32_t> src, comm, dst, reset, pairs, cx;
        for (size_t j = start; j < end; j++) {
            src.push_back(phys_[data[j]]);
            comm.push_back(comm_[target][j - start]);
            dst.push_back(fresh[data[j]]);
            reset.push_back(comm.back());
            reset.push_back(dst.back());
            pairs.push_back(comm.back());
            pairs.push_back(dst.back());
            cx.push_back(src.back());
            cx.push_back(comm.back());
        }
        for (auto q : dst) {
            live_since_[q] = now_;
        }
        gate(Opcode::RZ, reset);
        gate(Opcode::H, comm);
        gate(Opcode::CX, pairs);
        noise2(pairs, pnl_, {"nonlocal", "swapout"});
        busy(reset, timing_.tau_bell);
        tick(timing_.tau_bell);
        gate(Opcode::CX, cx);
        noise2(cx, pl_);
        busy(cx, timing_.tau_gate);
        tick(timing_.tau_gate);
        gate(Opcode::H, src);
        noise1(src, pl_);
        busy(src, timing_.tau_gate);
        tick(timing_.tau_gate);
        std::vector<uint32_t> both = src;
        both.insert(both.end(), comm.begin(), comm.end());
        noise1(both, pl_);
        uint64_t first = measure(Opcode::M, both);
        for (size_t j = 0; j < src.size(); j++) {
            cond(Opcode::COND_X, first + src.size() + j, dst[j]);
            cond(Opcode::COND_Z, first + j, dst[j]);
        }
        busy(both, timing_.tau_gate);
        tick(timing_.tau_gate);
    }
    // Everything else stalls for the whole block.
    std::map<uint32_t, std::vector<uint32_t>> idle_by_time;
    for (uint32_t q = 0; q < s_.data_qubits; q++) {
        if (sched_cluster_[q] == target) {
            uint32_t p = fresh[q];
            idle_by_time[now_ - live_since_[p] - busy_[p]].push_back(p);
        } else {
            idle_by_time[now_ - busy_[phys_[q]]].push_back(phys_[q]);
        }
    }
    idle_noise(idle_by_time);
    // The spare takes over the target's slot, so later rounds schedule exactly
    // as before and only the physical qubits change.
    for (auto q : moved) {
        phys_[q] = fresh[q];
    }
    comm_[target] = std::move(comm_.back());
    comm_.pop_back();
}

CompiledExperiment Compiler::run(Mode mode, std::optional<SwapOutOptions> swap,
                                 std::optional<uint32_t> failure_round) {
    if (opt_.rounds == 0) {
        throw CompileError("zero-round request");
    }
    if (layout_.partition.cluster_of.size() != s_.qubit_count) {
        throw CompileError("layout does not match the schedule qubits");
    }
    if (failure_round && (*failure_round < 1 || *failure_round > opt_.rounds)) {
        throw CompileError("failure round outside [1, rounds]");
    }
    uint32_t nc = layout_.cluster_count();
    qpi_ = mode == Mode::Monolithic ? 0 : layout_.qpi_count;
    for (uint32_t q = 0; q < s_.qubit_count; q++) {
        new_qubit(q < s_.data_qubits ? QubitRole::Data : QubitRole::Ancilla, layout_.partition.cluster_of[q]);
        phys_.push_back(q);
        sched_cluster_.push_back(layout_.partition.cluster_of[q]);
    }
    comm_.resize(nc);
    for (uint32_t c = 0; c < nc; c++) {
        for (uint32_t j = 0; j < qpi_; j++) {
            comm_[c].push_back(new_qubit(QubitRole::Comm, c));
        }
    }
    uint32_t target = 0;
    if (swap) {
        target = swap->target ? *swap->target : select_largest_node(layout_.partition, s_);
        if (target >= nc) {
            throw CompileError("swap-out target is not a cluster");
        }
        if (qpi_ == 0) {
            throw CompileError("swap-out needs QPIs");
        }
        if (swap->swap_after_round < 1 || swap->swap_after_round >= opt_.rounds) {
            throw CompileError("swap-out must happen between two noisy rounds");
        }
    }

    uint32_t pad_start = opt_.pad;
    uint32_t total = opt_.pad * 2 + opt_.rounds;
    if (total % s_.period_multiple) {
        pad_start += s_.period_multiple - total % s_.period_multiple;
        total = pad_start + opt_.rounds + opt_.pad;
    }
    outcomes_.assign(total, std::vector<std::vector<uint64_t>>(s_.checks.size()));

    auto data = data_phys();
    gate(Opcode::RZ, data);
    tick(1);

    CompiledExperiment exp;
    for (uint32_t t = 0; t < total; t++) {
        bool noisy = t >= pad_start && t < pad_start + opt_.rounds;
        pl_ = noisy ? noise_.p_local() : 0;
        pnl_ = noisy ? noise_.p_nonlocal() : 0;
        RoundInfo info;
        info.begin = prog_.instructions.size();
        info.noisy = noisy;
        info.noisy_index = noisy ? t - pad_start + 1 : 0;
        now_ = 0;
        batches_in_round_ = 0;
        std::fill(busy_.begin(), busy_.end(), 0);
        compile_round(t);
        info.duration = now_;
        info.bell_batches = batches_in_round_;
        if (failure_round && info.noisy_index == *failure_round) {
            std::vector<uint32_t> all;
            for (uint32_t q = 0; q < s_.qubit_count; q++) {
                all.push_back(phys_[q]);
            }
            Instruction dep;
            dep.op = Opcode::DEPOLARIZE1;
            dep.params = {0.75};
            dep.qubits = all;
            emit(std::move(dep), {"dropout"});
        }
        info.end = prog_.instructions.size();
        info.cluster_qubits.resize(comm_.size());
        for (uint32_t q = 0; q < s_.qubit_count; q++) {
            info.cluster_qubits[sched_cluster_[q]].push_back(phys_[q]);
        }
        exp.rounds.push_back(std::move(info));

        if (swap && noisy && t - pad_start + 1 == swap->swap_after_round) {
            RoundInfo block;
            block.begin = prog_.instructions.size();
            block.noisy = true;
            block.swap_block = true;
            now_ = 0;
            batches_in_round_ = 0;
            std::fill(busy_.begin(), busy_.end(), 0);
            swap_block(target);
            block.duration = now_;
            block.bell_batches = batches_in_round_;
            block.end = prog_.instructions.size();
            exp.rounds.push_back(std::move(block));
        }
    }

    // Final transversal readout, noiseless like the closing pad rounds.
    data = data_phys();
    uint64_t first = measure(s_.final_basis == Pauli::X ? Opcode::MX : Opcode::M, data);
    for (const auto &fd : s_.final_detectors) {
        std::vector<uint64_t> recs;
        for (const auto &term : fd.terms) {
            const auto &r = outcomes_[total - 1 + term.period_offset][term.check];
            recs.insert(recs.end(), r.begin(), r.end());
        }
        for (auto q : fd.data_qubits) {
            recs.push_back(first + q);
        }
        Instruction det;
        det.op = Opcode::DETECTOR;
        det.records = to_offsets(std::move(recs));
        emit(std::move(det));
    }
    for (size_t k = 0; k < s_.observables.size(); k++) {
        std::vector<uint64_t> recs;
        for (auto q : s_.observables[k].final_support) {
            recs.push_back(first + q);
        }
        Instruction obs;
        obs.op = Opcode::OBSERVABLE;
        obs.params = {static_cast<double>(k)};
        obs.records = to_offsets(std::move(recs));
        emit(std::move(obs));
    }

    prog_.qubit_count = static_cast<uint32_t>(role_.size());
    exp.program = std::move(prog_);
    exp.k = static_cast<uint32_t>(s_.observables.size());
    exp.code_name = s_.code_name;
    exp.mode = mode == Mode::Memory ? "memory" : mode == Mode::SwapOut ? "swapout" : "monolithic";
    exp.n_q = layout_.n_q;
    exp.seed = opt_.seed;
    exp.noise = noise_;
    exp.qubit_role = role_;
    exp.qubit_cluster = cluster_;
    if (opt_.check_determinism) {
        auto bad = nondeterministic_outputs(exp.program, 128, derive_seed(opt_.seed, {0xDE7}));
        if (!bad.empty()) {
            throw CompileError("compiled circuit has " + std::to_string(bad.size()) +
                               " non-deterministic detectors/observables (first: " + std::to_string(bad[0]) + ")");
        }
    }
    return exp;
}

}  // namespace

CompiledExperiment compile_memory(const ScheduleTemplate &schedule, const NetworkLayout &layout,
                                  const NoiseParams &noise, const TimingModel &timing, const CompileOptions &options) {
    Compiler c(schedule, layout, noise, timing, options);
    return c.run(Mode::Memory, std::nullopt, std::nullopt);
}

CompiledExperiment compile_swapout(const ScheduleTemplate &schedule, const NetworkLayout &layout,
                                   const NoiseParams &noise, const TimingModel &timing, const CompileOptions &options,
                                   const SwapOutOptions &swap) {
    Compiler c(schedule, layout, noise, timing, options);
    return c.run(Mode::SwapOut, swap, std::nullopt);
}

CompiledExperiment compile_monolithic(const ScheduleTemplate &schedule, const NoiseParams &noise,
                                      const TimingModel &timing, const CompileOptions &options,
                                      std::optional<uint32_t> failure_round) {
    NetworkLayout layout = monolithic_layout(schedule);
    Compiler c(schedule, layout, noise, timing, options);
    return c.run(Mode::Monolithic, std::nullopt, failure_round);
}

CompiledExperiment attach_node_dropout(const CompiledExperiment &exp, const NoiseParams &noise, uint64_t seed) {
    if (noise.dropout_samples < 1) {
        throw CompileError("dropout sample count e must be at least 1");
    }
    if (!(noise.p_dropout >= 0 && noise.p_dropout <= 1)) {
        throw CompileError("p_dropout must lie in [0, 1]");
    }
    CompiledExperiment out = exp;
    out.noise.p_dropout = noise.p_dropout;
    out.noise.dropout_samples = noise.dropout_samples;
    if (noise.p_dropout == 0) {
        return out;
    }
    double p_eff = noise.p_dropout / noise.dropout_samples;
    // Channels to insert, keyed by the instruction index they precede.
    std::map<size_t, std::vector<Instruction>> inserts;
    for (size_t r = 0; r < exp.rounds.size(); r++) {
        const auto &info = exp.rounds[r];
        if (!info.noisy || info.swap_block) {
            continue;
        }
        for (size_t c = 0; c < info.cluster_qubits.size(); c++) {
            const auto &qs = info.cluster_qubits[c];
            if (qs.empty()) {
                continue;
            }
            Rng rng = make_rng(seed, {info.noisy_index, c});
            for (uint32_t k = 0; k < noise.dropout_samples; k++) {
                PauliProduct prod;
                while (prod.empty()) {
                    for (auto q : qs) {
                        auto axis = static_cast<Pauli>(rng() & 3);
                        if (axis != Pauli::I) {
                            prod.push_back({q, axis});
                        }
                    }
                }
                Instruction ch;
                ch.op = Opcode::CORRELATED_ERROR;
                ch.params = {p_eff};
                ch.products = {std::move(prod)};
                inserts[info.end].push_back(std::move(ch));
            }
        }
    }
    CircuitProgram prog;
    prog.qubit_count = exp.program.qubit_count;
    std::vector<size_t> new_index(exp.program.instructions.size() + 1);
    auto flush = [&](size_t at) {
        auto it = inserts.find(at);
        if (it == inserts.end()) {
            return;
        }
        for (auto &ch : it->second) {
            prog.instructions.push_back(std::move(ch));
            prog.add_tag(prog.instructions.size() - 1, "dropout");
        }
    };
    for (size_t i = 0; i < exp.program.instructions.size(); i++) {
        flush(i);
        new_index[i] = prog.instructions.size();
        prog.instructions.push_back(exp.program.instructions[i]);
    }
    flush(exp.program.instructions.size());
    new_index[exp.program.instructions.size()] = prog.instructions.size();
    for (const auto &[idx, tags] : exp.program.tags) {
        for (const auto &t : tags) {
            prog.add_tag(new_index[idx], t);
        }
    }
    // Channels inserted at a round's end land inside it, since new_index skips past them.
    for (auto &info : out.rounds) {
        info.begin = new_index[info.begin];
        info.end = new_index[info.end];
    }
    out.program = std::move(prog);
    return out;
}

double ensemble_weight(double p_dropout, uint32_t rounds, std::optional<uint32_t> failure_round) {
    if (!failure_round) {
        return std::pow(1.0 - p_dropout, rounds);
    }
    return p_dropout * std::pow(1.0 - p_dropout, *failure_round - 1);
}

double ensemble_residual(double p_dropout, uint32_t rounds) {
    double none = std::pow(1.0 - p_dropout, rounds);
    double one = rounds * p_dropout * std::pow(1.0 - p_dropout, rounds - 1);
    return std::max(0.0, 1.0 - none - one);
}

std::vector<EnsembleMember> compile_monolithic_ensemble(const ScheduleTemplate &schedule, const NoiseParams &noise,
                                                        const TimingModel &timing, const CompileOptions &options) {
    std::vector<EnsembleMember> out;
    NoiseParams circuit_noise = noise;
    circuit_noise.p_dropout = 0;
    out.push_back({ensemble_weight(noise.p_dropout, options.rounds, std::nullopt), std::nullopt,
                   compile_monolithic(schedule, circuit_noise, timing, options)});
    for (uint32_t i = 1; i <= options.rounds; i++) {
        out.push_back({ensemble_weight(noise.p_dropout, options.rounds, i), i,
                       compile_monolithic(schedule, circuit_noise, timing, options, i)});
    }
    for (auto &m : out) {
        m.experiment.mode = "monolithic-ensemble";
        m.experiment.noise.p_dropout = noise.p_dropout;
    }
    return out;
}

}  // namespace dqec
