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

#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <numeric>
#include <set>

#include "dqec/partition.h"

using namespace dqec;

namespace {

Partition toric_partition(uint32_t d, uint32_t n_q, uint64_t seed = 1) {
    auto s = make_schedule(build_toric(d));
    return spectral_partition(build_connectivity_graph(s), n_q, seed);
}

void expect_well_formed(const Partition &p, uint32_t vertices, uint32_t n_q) {
    ASSERT_EQ(p.cluster_of.size(), vertices);
    size_t total = 0;
    for (size_t c = 0; c < p.clusters.size(); c++) {
        EXPECT_FALSE(p.clusters[c].empty());
        EXPECT_LE(p.clusters[c].size(), n_q);
        for (auto v : p.clusters[c]) {
            EXPECT_EQ(p.cluster_of[v], c);
        }
        total += p.clusters[c].size();
    }
    EXPECT_EQ(total, vertices);
}

}  // namespace

TEST(Partition, CeilSqrt) {
    EXPECT_EQ(ceil_sqrt(1), 1u);
    EXPECT_EQ(ceil_sqrt(2), 2u);
    EXPECT_EQ(ceil_sqrt(16), 4u);
    EXPECT_EQ(ceil_sqrt(17), 5u);
    EXPECT_EQ(ceil_sqrt(48), 7u);
    for (uint32_t n = 1; n < 5000; n++) {
        uint32_t r = ceil_sqrt(n);
        EXPECT_GE(r * r, n);
        EXPECT_LT((r - 1) * (r - 1), n);
    }
}

TEST(Partition, ToricD6AtFortyEightGivesFourClusters) {
    auto p = toric_partition(6, 48);
    expect_well_formed(p, 144, 48);
    EXPECT_EQ(p.clusters.size(), 4u);
}

TEST(Partition, ToricD8AtFortyEightGivesSixToEightClusters) {
    auto p = toric_partition(8, 48);
    expect_well_formed(p, 256, 48);
    EXPECT_GE(p.clusters.size(), 6u);
    EXPECT_LE(p.clusters.size(), 8u);
}

TEST(Partition, SeedsAndSizesStayWithinCapacity) {
    for (uint32_t d : {2u, 4u, 6u}) {
        for (uint32_t n_q : {2u, 5u, 16u, 48u}) {
            for (uint64_t seed : {1u, 2u}) {
                auto p = toric_partition(d, n_q, seed);
                uint32_t v = 4 * d * d;
                expect_well_formed(p, v, n_q);
                EXPECT_GE(p.clusters.size(), (v + n_q - 1) / n_q);
            }
        }
    }
}

TEST(Partition, CutWeightMatchesDirectCount) {
    auto s = make_schedule(build_toric(4));
    auto g = build_connectivity_graph(s);
    auto p = spectral_partition(g, 16, 1);
    double cut = 0;
    for (const auto &e : g.edges) {
        if (p.cluster_of[e.u] != p.cluster_of[e.v]) {
            cut += e.weight;
        }
    }
    EXPECT_DOUBLE_EQ(cut_weight(g, p.cluster_of), cut);
    // A single cluster cuts nothing.
    EXPECT_EQ(cut_weight(g, std::vector<uint32_t>(g.vertex_count, 0)), 0.0);
}

TEST(Partition, FiedlerVectorIsOrthogonalToConstant) {
    auto s = make_schedule(build_toric(4));
    auto g = build_connectivity_graph(s);
    std::vector<uint32_t> all(g.vertex_count);
    std::iota(all.begin(), all.end(), 0);
    auto f = fiedler_vector(g, all, 3);
    ASSERT_EQ(f.size(), all.size());
    double sum = 0, norm = 0;
    for (double x : f) {
        sum += x;
        norm += x * x;
    }
    EXPECT_NEAR(sum, 0.0, 1e-6 * std::sqrt(norm * static_cast<double>(f.size())));
    EXPECT_GT(norm, 0.0);
}

TEST(Partition, ConnectivityGraphOfToric) {
    auto s = make_schedule(build_toric(3));
    auto g = build_connectivity_graph(s);
    EXPECT_EQ(g.vertex_count, s.qubit_count);
    // Each ancilla couples to four data qubits.
    std::vector<double> degree(g.vertex_count, 0);
    for (const auto &e : g.edges) {
        degree[e.u] += e.weight;
        degree[e.v] += e.weight;
    }
    for (uint32_t a = s.data_qubits; a < s.qubit_count; a++) {
        EXPECT_GE(degree[a], 4.0);
    }
}

TEST(Layout, QpiCountAndMediation) {
    auto s = make_schedule(build_toric(4));
    auto p = spectral_partition(build_connectivity_graph(s), 16, 1);
    auto layout = make_layout(p, s, 16);
    EXPECT_EQ(layout.qpi_count, 4u);
    EXPECT_EQ(layout.check_mediation.size(), s.checks.size());
    for (const auto &nl : layout.nonlocal_checks) {
        EXPECT_GE(nl.clusters.size(), 2u);
        EXPECT_EQ(nl.mediation, nl.clusters.size() == 2 ? Mediation::Bell : Mediation::Ghz);
        std::set<uint32_t> touched;
        for (const auto &t : s.checks[nl.check].support) {
            touched.insert(p.cluster_of[t.qubit]);
        }
        EXPECT_EQ(touched.size(), nl.clusters.size());
    }
    auto mono = monolithic_layout(s);
    EXPECT_EQ(mono.cluster_count(), 1u);
    EXPECT_TRUE(mono.nonlocal_checks.empty());
}

TEST(Layout, PartitionJsonListsClusters) {
    auto s = make_schedule(build_toric(4));
    auto p = spectral_partition(build_connectivity_graph(s), 16, 1);
    auto j = nlohmann::json::parse(partition_to_json(p, s, 16));
    EXPECT_TRUE(j.is_object());
    EXPECT_NE(j.dump().find("clusters"), std::string::npos);
}

TEST(Layout, LargestNodeHoldsMostDataQubits) {
    auto s = make_schedule(build_toric(6));
    auto p = spectral_partition(build_connectivity_graph(s), 16, 1);
    uint32_t target = select_largest_node(p, s);
    auto data_in = [&](uint32_t c) {
        size_t n = 0;
        for (auto v : p.clusters[c]) {
            n += v < s.data_qubits;
        }
        return n;
    };
    for (uint32_t c = 0; c < p.clusters.size(); c++) {
        EXPECT_LE(data_in(c), data_in(target));
    }
}
