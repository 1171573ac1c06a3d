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

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dqec/decode.h"

namespace dqec {

namespace {

using Set = std::vector<uint32_t>;

/// a ^= b on sorted sets.
void xor_into(Set &a, const Set &b) {
    if (b.empty()) {
        return;
    }
    Set out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a.swap(out);
}

using MechKey = std::pair<std::vector<uint32_t>, uint64_t>;

}  // namespace

double xor_probability(double p1, double p2) { return p1 * (1 - p2) + p2 * (1 - p1); }

DetectorErrorModel build_dem(const CircuitProgram &prog) {
    auto violations = validate_program(prog);
    if (!violations.empty()) {
        throw DecodeError("invalid program: " + violations.front().message());
    }
    const uint32_t D = static_cast<uint32_t>(prog.count_detectors());
    const uint32_t K = static_cast<uint32_t>(prog.count_observables());
    if (K > 64) {
        throw DecodeError("more than 64 observables");
    }
    size_t meas = prog.count_measurements();
    std::vector<Set> rec(meas);
    std::vector<Set> xs(prog.qubit_count), zs(prog.qubit_count);
    uint32_t det = D;
    std::map<MechKey, double> merged;

    auto symptom_of = [&](const PauliProduct &p) {
        Set s;
        for (const auto &t : p) {
            if (has_x(t.axis)) {
                xor_into(s, xs[t.qubit]);
            }
            if (has_z(t.axis)) {
                xor_into(s, zs[t.qubit]);
            }
        }
        return s;
    };

    for (size_t i = prog.instructions.size(); i-- > 0;) {
        const auto &inst = prog.instructions[i];
        const auto &q = inst.qubits;
        switch (inst.op) {
            case Opcode::DETECTOR:
                det--;
                for (auto off : inst.records) {
                    xor_into(rec[meas + off], {det});
                }
                break;
            case Opcode::OBSERVABLE:
                for (auto off : inst.records) {
                    xor_into(rec[meas + off], {D + static_cast<uint32_t>(inst.params[0])});
                }
                break;
            case Opcode::M:
                meas -= q.size();
                for (size_t j = q.size(); j-- > 0;) {
                    xor_into(xs[q[j]], rec[meas + j]);
                    zs[q[j]].clear();
                }
                break;
            case Opcode::MX:
                meas -= q.size();
                for (size_t j = q.size(); j-- > 0;) {
                    xor_into(zs[q[j]], rec[meas + j]);
                    xs[q[j]].clear();
                }
                break;
            case Opcode::MPP:
                meas -= inst.products.size();
                for (size_t j = inst.products.size(); j-- > 0;) {
                    for (const auto &t : inst.products[j]) {
                        if (has_x(t.axis)) {
                            xor_into(zs[t.qubit], rec[meas + j]);
                        }
                        if (has_z(t.axis)) {
                            xor_into(xs[t.qubit], rec[meas + j]);
                        }
                    }
                }
                break;
            case Opcode::RZ:
            case Opcode::RX:
                for (auto a : q) {
                    xs[a].clear();
                    zs[a].clear();
                }
                break;
            case Opcode::H:
                for (auto a : q) {
                    xs[a].swap(zs[a]);
                }
                break;
            case Opcode::S:
            case Opcode::SDAG:
                for (auto a : q) {
                    xor_into(xs[a], zs[a]);
                }
                break;
            case Opcode::CX:
                for (size_t j = q.size(); j >= 2; j -= 2) {
                    uint32_t c = q[j - 2], t = q[j - 1];
                    xor_into(xs[c], xs[t]);
                    xor_into(zs[t], zs[c]);
                }
                break;
            case Opcode::CZ:
                for (size_t j = q.size(); j >= 2; j -= 2) {
                    uint32_t a = q[j - 2], b = q[j - 1];
                    xor_into(xs[a], zs[b]);
                    xor_into(xs[b], zs[a]);
                }
                break;
            case Opcode::COND_X:
                xor_into(rec[meas + inst.records[0]], xs[q[0]]);
                break;
            case Opcode::COND_Z:
                xor_into(rec[meas + inst.records[0]], zs[q[0]]);
                break;
            case Opcode::DEPOLARIZE1:
            case Opcode::DEPOLARIZE2:
            case Opcode::CORRELATED_ERROR: {
                if (prog.has_tag(i, "dropout")) {
                    break;
                }
                double p = inst.params[0];
                if (p <= 0) {
                    break;
                }
                size_t groups = channel_group_count(inst);
                for (size_t g = 0; g < groups; g++) {
                    auto alts = channel_alternatives(inst, g);
                    double each = p / static_cast<double>(alts.size());
                    std::map<MechKey, double> local;
                    for (const auto &alt : alts) {
                        Set s = symptom_of(alt);
                        MechKey key;
                        for (auto e : s) {
                            if (e < D) {
                                key.first.push_back(e);
                            } else {
                                key.second |= uint64_t{1} << (e - D);
                            }
                        }
                        if (key.first.empty() && key.second == 0) {
                            continue;
                        }
                        local[key] += each;
                    }
                    for (auto &[key, lp] : local) {
                        auto [it, inserted] = merged.emplace(key, lp);
                        if (!inserted) {
                            it->second = xor_probability(it->second, lp);
                        }
                    }
                }
                break;
            }
            default:
                break;
        }
    }
    DetectorErrorModel dem;
    dem.num_detectors = D;
    dem.num_observables = K;
    for (auto &[key, p] : merged) {
        if (p <= 0) {
            continue;
        }
        dem.mechanisms.push_back({std::min(p, 0.5), key.first, key.second});
    }
    return dem;
}

DetectorErrorModel build_dem(const CompiledExperiment &exp) { return build_dem(exp.program); }

void write_dem(std::ostream &out, const DetectorErrorModel &dem) {
    out << "# dqec dem detectors=" << dem.num_detectors << " observables=" << dem.num_observables << "\n";
    for (const auto &m : dem.mechanisms) {
        out << "error(" << format_double(m.probability) << ")";
        for (auto d : m.detectors) {
            out << " D" << d;
        }
        for (uint32_t k = 0; k < 64; k++) {
            if ((m.observables >> k) & 1) {
                out << " L" << k;
            }
        }
        out << "\n";
    }
}

DetectorErrorModel read_dem(std::istream &in) {
    DetectorErrorModel dem;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            auto grab = [&](const std::string &key) -> std::optional<uint32_t> {
                auto pos = line.find(key + "=");
                if (pos == std::string::npos) {
                    return std::nullopt;
                }
                return static_cast<uint32_t>(std::stoul(line.substr(pos + key.size() + 1)));
            };
            if (auto v = grab("detectors")) {
                dem.num_detectors = *v;
            }
            if (auto v = grab("observables")) {
                dem.num_observables = *v;
            }
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok.rfind("error(", 0) != 0 || tok.back() != ')') {
            throw DecodeError("dem line " + std::to_string(lineno) + ": expected error(p)");
        }
        ErrorMechanism m;
        try {
            m.probability = std::stod(tok.substr(6, tok.size() - 7));
            while (ls >> tok) {
                if (tok.size() < 2 || (tok[0] != 'D' && tok[0] != 'L')) {
                    throw DecodeError("bad target " + tok);
                }
                uint32_t v = static_cast<uint32_t>(std::stoul(tok.substr(1)));
                if (tok[0] == 'D') {
                    m.detectors.push_back(v);
                    dem.num_detectors = std::max(dem.num_detectors, v + 1);
                } else {
                    if (v >= 64) {
                        throw DecodeError("observable index too large");
                    }
                    m.observables ^= uint64_t{1} << v;
                    dem.num_observables = std::max(dem.num_observables, v + 1);
                }
            }
        } catch (const std::logic_error &) {
            throw DecodeError("dem line " + std::to_string(lineno) + ": malformed");
        }
        if (!(m.probability > 0 && m.probability <= 0.5)) {
            throw DecodeError("dem line " + std::to_string(lineno) + ": probability outside (0, 0.5]");
        }
        std::sort(m.detectors.begin(), m.detectors.end());
        if (std::adjacent_find(m.detectors.begin(), m.detectors.end()) != m.detectors.end()) {
            throw DecodeError("dem line " + std::to_string(lineno) + ": repeated detector");
        }
        dem.mechanisms.push_back(std::move(m));
    }
    return dem;
}

double edge_weight(double p) {
    p = std::min(p, 0.5);
    return std::log((1 - p) / p);
}

namespace {

using EdgeKey = std::pair<uint32_t, uint32_t>;

EdgeKey edge_key(uint32_t a, uint32_t b) { return {std::min(a, b), std::max(a, b)}; }

bool decompose(const std::vector<uint32_t> &dets, uint64_t obs, const std::map<EdgeKey, size_t> &index,
               const std::vector<MatchingEdge> &edges, std::vector<size_t> &used) {
    if (dets.empty()) {
        return obs == 0;
    }
    uint32_t d0 = dets[0];
    auto try_edge = [&](uint32_t other, size_t skip) {
        auto it = index.find(edge_key(d0, other));
        if (it == index.end()) {
            return false;
        }
        std::vector<uint32_t> rest;
        for (size_t i = 1; i < dets.size(); i++) {
            if (i != skip) {
                rest.push_back(dets[i]);
            }
        }
        used.push_back(it->second);
        if (decompose(rest, obs ^ edges[it->second].observables, index, edges, used)) {
            return true;
        }
        used.pop_back();
        return false;
    };
    for (size_t i = 1; i < dets.size(); i++) {
        if (try_edge(dets[i], i)) {
            return true;
        }
    }
    return try_edge(kBoundary, 0);
}

}  // namespace

MatchingGraph to_matching_graph(const DetectorErrorModel &dem, double max_dropped_fraction) {
    MatchingGraph g;
    g.num_detectors = dem.num_detectors;
    g.num_observables = dem.num_observables;
    std::map<EdgeKey, size_t> index;
    double total = 0;
    for (const auto &m : dem.mechanisms) {
        total += m.probability;
        if (m.detectors.empty()) {
            g.dropped_probability += m.probability;
            g.dropped_mechanisms++;
            continue;
        }
        if (m.detectors.size() > 2) {
            continue;
        }
        uint32_t u = m.detectors[0];
        uint32_t v = m.detectors.size() == 2 ? m.detectors[1] : kBoundary;
        auto key = edge_key(u, v);
        auto it = index.find(key);
        if (it == index.end()) {
            index[key] = g.edges.size();
            g.edges.push_back({key.first, key.second, m.probability, 0, m.observables});
            continue;
        }
        auto &e = g.edges[it->second];
        if (e.observables == m.observables) {
            e.probability = xor_probability(e.probability, m.probability);
        } else {
            // Parallel edges with different logical effect: keep the likelier one.
            g.dropped_probability += std::min(e.probability, m.probability);
            g.dropped_mechanisms++;
            if (m.probability > e.probability) {
                e.probability = m.probability;
                e.observables = m.observables;
            }
        }
    }
    std::vector<const ErrorMechanism *> hyper;
    for (const auto &m : dem.mechanisms) {
        if (m.detectors.size() > 2) {
            hyper.push_back(&m);
        }
    }
    std::stable_sort(hyper.begin(), hyper.end(), [](const ErrorMechanism *a, const ErrorMechanism *b) {
        return a->detectors.size() > b->detectors.size();
    });
    std::vector<double> extra(g.edges.size(), 0);
    for (const auto *m : hyper) {
        std::vector<size_t> used;
        if (decompose(m->detectors, m->observables, index, g.edges, used)) {
            for (auto e : used) {
                extra[e] = xor_probability(extra[e], m->probability);
            }
            g.decomposed_mechanisms++;
        } else {
            g.dropped_probability += m->probability;
            g.dropped_mechanisms++;
        }
    }
    for (size_t i = 0; i < g.edges.size(); i++) {
        auto &e = g.edges[i];
        e.probability = std::min(0.5, xor_probability(e.probability, extra[i]));
        e.weight = edge_weight(e.probability);
    }
    if (total > 0 && g.dropped_probability > max_dropped_fraction * total) {
        std::ostringstream msg;
        msg << "matching graph drops probability " << g.dropped_probability << " of " << total << " ("
            << g.dropped_mechanisms << " mechanisms)";
        throw DecodeError(msg.str());
    }
    return g;
}

std::string matching_graph_to_text(const MatchingGraph &graph) {
    std::ostringstream out;
    out << "# matching graph detectors=" << graph.num_detectors << " observables=" << graph.num_observables
        << " edges=" << graph.edges.size() << " dropped=" << format_double(graph.dropped_probability) << "\n";
    for (const auto &e : graph.edges) {
        out << "edge D" << e.u << " ";
        if (e.v == kBoundary) {
            out << "B";
        } else {
            out << "D" << e.v;
        }
        out << " p=" << format_double(e.probability) << " w=" << format_double(e.weight) << " L=" << e.observables
            << "\n";
    }
    return out.str();
}

}  // namespace dqec
