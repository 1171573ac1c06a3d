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

#include "dqec/partition.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "dqec/rng.h"

namespace dqec {

ConnectivityGraph build_connectivity_graph(const ScheduleTemplate &schedule) {
    std::map<std::pair<uint32_t, uint32_t>, double> weight;
    auto link = [&](uint32_t a, uint32_t b) {
        if (a != b) {
            weight[{std::min(a, b), std::max(a, b)}] += 1;
        }
    };
    for (const auto &sub : schedule.subrounds) {
        for (auto c : sub) {
            const auto &check = schedule.checks[c];
            if (check.ancilla) {
                for (const auto &t : check.support) {
                    link(*check.ancilla, t.qubit);
                }
            } else {
                for (size_t i = 0; i < check.support.size(); i++) {
                    for (size_t j = i + 1; j < check.support.size(); j++) {
                        link(check.support[i].qubit, check.support[j].qubit);
                    }
                }
            }
        }
    }
    ConnectivityGraph g;
    g.vertex_count = schedule.qubit_count;
    for (const auto &[key, w] : weight) {
        g.edges.push_back({key.first, key.second, w});
    }
    return g;
}

namespace {

struct LocalGraph {
    std::vector<std::vector<std::pair<uint32_t, double>>> adj;
};

LocalGraph restrict(const ConnectivityGraph &g, const std::vector<uint32_t> &vertices) {
    std::vector<int64_t> local(g.vertex_count, -1);
    for (size_t i = 0; i < vertices.size(); i++) {
        local[vertices[i]] = static_cast<int64_t>(i);
    }
    LocalGraph lg;
    lg.adj.resize(vertices.size());
    for (const auto &e : g.edges) {
        if (local[e.u] >= 0 && local[e.v] >= 0) {
            lg.adj[local[e.u]].push_back({static_cast<uint32_t>(local[e.v]), e.weight});
            lg.adj[local[e.v]].push_back({static_cast<uint32_t>(local[e.u]), e.weight});
        }
    }
    return lg;
}

std::vector<uint32_t> components(const LocalGraph &lg) {
    std::vector<uint32_t> comp(lg.adj.size(), UINT32_MAX);
    uint32_t next = 0;
    for (size_t s = 0; s < lg.adj.size(); s++) {
        if (comp[s] != UINT32_MAX) {
            continue;
        }
        std::vector<uint32_t> stack = {static_cast<uint32_t>(s)};
        comp[s] = next;
        while (!stack.empty()) {
            uint32_t v = stack.back();
            stack.pop_back();
            for (auto [w, _] : lg.adj[v]) {
                if (comp[w] == UINT32_MAX) {
                    comp[w] = next;
                    stack.push_back(w);
                }
            }
        }
        next++;
    }
    return comp;
}

void bisect(const ConnectivityGraph &g, std::vector<uint32_t> vertices, uint32_t n_q, uint64_t seed,
            std::vector<std::vector<uint32_t>> &out) {
    std::sort(vertices.begin(), vertices.end());
    if (vertices.size() <= n_q) {
        out.push_back(std::move(vertices));
        return;
    }
    LocalGraph lg = restrict(g, vertices);
    auto comp = components(lg);
    std::vector<double> key(vertices.size());
    if (*std::max_element(comp.begin(), comp.end()) > 0) {
        // Disconnected: order whole components before splitting.
        for (size_t i = 0; i < key.size(); i++) {
            key[i] = comp[i];
        }
    } else {
        key = fiedler_vector(g, vertices, seed);
    }
    std::vector<size_t> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (key[a] != key[b]) {
            return key[a] < key[b];
        }
        return vertices[a] < vertices[b];
    });
    size_t half = vertices.size() / 2;
    std::vector<uint32_t> left, right;
    for (size_t i = 0; i < order.size(); i++) {
        (i < half ? left : right).push_back(vertices[order[i]]);
    }
    bisect(g, std::move(left), n_q, derive_seed(seed, {1}), out);
    bisect(g, std::move(right), n_q, derive_seed(seed, {2}), out);
}

}  // namespace

std::vector<double> fiedler_vector(const ConnectivityGraph &g, const std::vector<uint32_t> &vertices,
                                   uint64_t seed) {
    LocalGraph lg = restrict(g, vertices);
    size_t n = vertices.size();
    std::vector<double> degree(n, 0);
    for (size_t i = 0; i < n; i++) {
        for (auto [_, w] : lg.adj[i]) {
            degree[i] += w;
        }
    }
    double shift = 2 * (*std::max_element(degree.begin(), degree.end())) + 1;
    Rng rng(derive_seed(seed, {0xF1ED}));
    std::normal_distribution<double> normal;
    std::vector<double> v(n), w(n);
    for (auto &x : v) {
        x = normal(rng);
    }
    auto deflate_normalize = [](std::vector<double> &x) {
        double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        double norm = 0;
        for (auto &y : x) {
            y -= mean;
            norm += y * y;
        }
        norm = std::sqrt(norm);
        if (norm > 0) {
            for (auto &y : x) {
                y /= norm;
            }
        }
    };
    deflate_normalize(v);
    for (int iter = 0; iter < 100000; iter++) {
        // w = (shift*I - L) v
        for (size_t i = 0; i < n; i++) {
            double acc = (shift - degree[i]) * v[i];
            for (auto [j, wt] : lg.adj[i]) {
                acc += wt * v[j];
            }
            w[i] = acc;
        }
        deflate_normalize(w);
        double diff = 0;
        for (size_t i = 0; i < n; i++) {
            diff += (w[i] - v[i]) * (w[i] - v[i]);
        }
        v.swap(w);
        if (std::sqrt(diff) < 1e-8) {
            break;
        }
    }
    return v;
}

Partition spectral_partition(const ConnectivityGraph &graph, uint32_t n_q, uint64_t seed) {
    if (n_q < 2) {
        throw std::invalid_argument("n_q must be at least 2");
    }
    std::vector<uint32_t> all(graph.vertex_count);
    std::iota(all.begin(), all.end(), 0);
    Partition p;
    p.cluster_of.assign(graph.vertex_count, 0);
    if (graph.vertex_count == 0) {
        return p;
    }
    bisect(graph, all, n_q, seed, p.clusters);
    for (size_t c = 0; c < p.clusters.size(); c++) {
        for (auto v : p.clusters[c]) {
            p.cluster_of[v] = static_cast<uint32_t>(c);
        }
    }
    return p;
}

double cut_weight(const ConnectivityGraph &graph, const std::vector<uint32_t> &cluster_of) {
    double cut = 0;
    for (const auto &e : graph.edges) {
        if (cluster_of[e.u] != cluster_of[e.v]) {
            cut += e.weight;
        }
    }
    return cut;
}

uint32_t ceil_sqrt(uint32_t n) {
    uint32_t q = 0;
    while (static_cast<uint64_t>(q) * q < n) {
        q++;
    }
    return q;
}

NetworkLayout make_layout(const Partition &partition, const ScheduleTemplate &schedule, uint32_t n_q) {
    if (partition.cluster_of.size() != schedule.qubit_count) {
        throw std::invalid_argument("partition does not cover the schedule qubits");
    }
    NetworkLayout layout;
    layout.partition = partition;
    layout.n_q = n_q;
    layout.qpi_count = ceil_sqrt(n_q);
    uint32_t nc = layout.cluster_count();
    layout.bell_demand.assign(nc, std::vector<uint32_t>(schedule.period(), 0));
    layout.check_mediation.assign(schedule.checks.size(), Mediation::Local);
    for (size_t c = 0; c < partition.clusters.size(); c++) {
        if (partition.clusters[c].size() > n_q) {
            layout.warnings.push_back("cluster " + std::to_string(c) + " exceeds n_q");
        }
    }
    for (uint32_t sub = 0; sub < schedule.period(); sub++) {
        for (auto c : schedule.subrounds[sub]) {
            std::map<uint32_t, uint32_t> count;
            for (const auto &t : schedule.checks[c].support) {
                count[partition.cluster_of[t.qubit]]++;
            }
            if (count.size() == 1) {
                continue;
            }
            NonlocalCheck nl;
            nl.check = c;
            uint32_t root = count.begin()->first;
            for (auto [cl, k] : count) {
                if (k > count[root]) {
                    root = cl;
                }
            }
            nl.clusters.push_back(root);
            for (auto [cl, k] : count) {
                if (cl != root) {
                    nl.clusters.push_back(cl);
                }
            }
            nl.mediation = count.size() == 2 ? Mediation::Bell : Mediation::Ghz;
            layout.check_mediation[c] = nl.mediation;
            uint32_t pairs = static_cast<uint32_t>(count.size()) - 1;
            layout.bell_demand[root][sub] += pairs;
            for (size_t i = 1; i < nl.clusters.size(); i++) {
                layout.bell_demand[nl.clusters[i]][sub] += 1;
            }
            if (pairs > layout.qpi_count) {
                layout.warnings.push_back("check " + std::to_string(c) + " needs " + std::to_string(pairs) +
                                          " Bell halves at its root, more than the QPI count");
            }
            layout.nonlocal_checks.push_back(std::move(nl));
        }
    }
    return layout;
}

NetworkLayout monolithic_layout(const ScheduleTemplate &schedule) {
    Partition p;
    p.cluster_of.assign(schedule.qubit_count, 0);
    p.clusters.emplace_back(schedule.qubit_count);
    std::iota(p.clusters[0].begin(), p.clusters[0].end(), 0);
    NetworkLayout layout = make_layout(p, schedule, std::max<uint32_t>(schedule.qubit_count, 2));
    layout.qpi_count = 0;
    return layout;
}

uint32_t select_largest_node(const Partition &partition, const ScheduleTemplate &schedule) {
    if (partition.clusters.empty()) {
        throw std::invalid_argument("empty partition");
    }
    uint32_t best = 0;
    size_t best_count = 0;
    for (size_t c = 0; c < partition.clusters.size(); c++) {
        size_t n = std::count_if(partition.clusters[c].begin(), partition.clusters[c].end(),
                                 [&](uint32_t q) { return q < schedule.data_qubits; });
        if (c == 0 || n > best_count) {
            best = static_cast<uint32_t>(c);
            best_count = n;
        }
    }
    return best;
}

std::string partition_to_json(const Partition &partition, const ScheduleTemplate &schedule, uint32_t n_q) {
    nlohmann::json doc;
    doc["code"] = schedule.code_name;
    doc["n_q"] = n_q;
    doc["qpi_count"] = ceil_sqrt(n_q);
    doc["cluster_of"] = partition.cluster_of;
    nlohmann::json clusters = nlohmann::json::array();
    for (size_t c = 0; c < partition.clusters.size(); c++) {
        size_t data = std::count_if(partition.clusters[c].begin(), partition.clusters[c].end(),
                                    [&](uint32_t q) { return q < schedule.data_qubits; });
        clusters.push_back({{"id", c},
                            {"size", partition.clusters[c].size()},
                            {"data_qubits", data},
                            {"ancilla_qubits", partition.clusters[c].size() - data}});
    }
    doc["clusters"] = clusters;
    return doc.dump(1);
}

}  // namespace dqec
