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

#ifndef DQEC_PARTITION_H
#define DQEC_PARTITION_H

#include <cstdint>
#include <string>
#include <vector>

#include "dqec/codes.h"

namespace dqec {

struct GraphEdge {
    uint32_t u = 0;
    uint32_t v = 0;
    double weight = 1;
};

struct ConnectivityGraph {
    uint32_t vertex_count = 0;
    std::vector<GraphEdge> edges;
};

/// One vertex per schedule qubit, one edge per interacting pair, weighted by
/// the number of interactions per period.
ConnectivityGraph build_connectivity_graph(const ScheduleTemplate &schedule);

struct Partition {
    std::vector<uint32_t> cluster_of;
    std::vector<std::vector<uint32_t>> clusters;
};

/// Recursive spectral bisection at the median of the Fiedler vector.
Partition spectral_partition(const ConnectivityGraph &graph, uint32_t n_q, uint64_t seed);

/// Fiedler vector of the Laplacian restricted to `vertices` (connected subgraph).
std::vector<double> fiedler_vector(const ConnectivityGraph &graph, const std::vector<uint32_t> &vertices,
                                   uint64_t seed);

double cut_weight(const ConnectivityGraph &graph, const std::vector<uint32_t> &cluster_of);

enum class Mediation { Local, Bell, Ghz };

struct NonlocalCheck {
    uint32_t check = 0;
    /// Participating clusters; the root comes first.
    std::vector<uint32_t> clusters;
    Mediation mediation = Mediation::Bell;
};

struct NetworkLayout {
    Partition partition;
    uint32_t n_q = 0;
    uint32_t qpi_count = 0;
    std::vector<Mediation> check_mediation;
    std::vector<NonlocalCheck> nonlocal_checks;
    /// Bell halves each cluster needs per sub-round, before batching.
    std::vector<std::vector<uint32_t>> bell_demand;
    std::vector<std::string> warnings;

    uint32_t cluster_count() const { return static_cast<uint32_t>(partition.clusters.size()); }
};

/// Smallest q with q*q >= n.
uint32_t ceil_sqrt(uint32_t n);

NetworkLayout make_layout(const Partition &partition, const ScheduleTemplate &schedule, uint32_t n_q);

/// Every qubit in one cluster.
NetworkLayout monolithic_layout(const ScheduleTemplate &schedule);

uint32_t select_largest_node(const Partition &partition, const ScheduleTemplate &schedule);

std::string partition_to_json(const Partition &partition, const ScheduleTemplate &schedule, uint32_t n_q);

}  // namespace dqec

#endif
