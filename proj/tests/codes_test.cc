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

#include <set>

#include "dqec/codes.h"
#include "dqec/gf2.h"
#include "support/gf2_oracle.h"

using namespace dqec;
using dqec::oracle::products_commute;
using dqec::oracle::rank_gf2;
using dqec::oracle::symplectic_row;

class ToricValidity : public ::testing::TestWithParam<uint32_t> {};

TEST_P(ToricValidity, StabilizersCommuteWithFullRank) {
    uint32_t d = GetParam();
    auto code = build_toric(d);
    ASSERT_EQ(code.n, 2 * d * d);
    ASSERT_EQ(code.k, 2u);
    for (size_t i = 0; i < code.stabilizers.size(); i++) {
        for (size_t j = i + 1; j < code.stabilizers.size(); j++) {
            ASSERT_TRUE(products_commute(code.stabilizers[i], code.stabilizers[j])) << i << "," << j;
        }
    }
    std::vector<std::vector<uint8_t>> rows;
    for (const auto &s : code.stabilizers) {
        rows.push_back(symplectic_row(s, code.n));
    }
    // Rank n-k, where the torus gives one dependency per check type.
    EXPECT_EQ(rank_gf2(rows), code.n - code.k);
}

TEST_P(ToricValidity, LogicalsPairAndAreIndependent) {
    uint32_t d = GetParam();
    auto code = build_toric(d);
    ASSERT_EQ(code.logical_x.size(), 2u);
    ASSERT_EQ(code.logical_z.size(), 2u);
    std::vector<std::vector<uint8_t>> rows;
    for (const auto &s : code.stabilizers) {
        rows.push_back(symplectic_row(s, code.n));
    }
    std::vector<PauliProduct> logicals = code.logical_x;
    logicals.insert(logicals.end(), code.logical_z.begin(), code.logical_z.end());
    for (const auto &l : logicals) {
        EXPECT_EQ(l.size(), d);
        for (const auto &s : code.stabilizers) {
            EXPECT_TRUE(products_commute(l, s));
        }
        rows.push_back(symplectic_row(l, code.n));
    }
    EXPECT_EQ(rank_gf2(rows), code.n + code.k);
    for (size_t i = 0; i < 2; i++) {
        for (size_t j = 0; j < 2; j++) {
            EXPECT_EQ(!products_commute(code.logical_x[i], code.logical_z[j]), i == j);
        }
    }
    EXPECT_TRUE(products_commute(code.logical_x[0], code.logical_x[1]));
    EXPECT_TRUE(products_commute(code.logical_z[0], code.logical_z[1]));
}

INSTANTIATE_TEST_SUITE_P(Distances, ToricValidity, ::testing::Values(2u, 4u, 6u));

TEST(Toric, RejectsDistanceBelowTwo) {
    EXPECT_THROW(build_toric(1), CodeError);
    EXPECT_THROW(build_toric(0), CodeError);
}

TEST(Toric, LibraryRankAgreesWithOracle) {
    auto code = build_toric(4);
    std::vector<BitVec> rows;
    for (const auto &s : code.stabilizers) {
        rows.push_back(symplectic(s, code.n));
    }
    EXPECT_EQ(gf2_rank(rows), code.n - code.k);
}

class HoneycombValidity : public ::testing::TestWithParam<std::pair<uint32_t, uint32_t>> {};

TEST_P(HoneycombValidity, ThreeRegularColoredGenusOne) {
    auto [a, b] = GetParam();
    auto lat = build_honeycomb(a, b);
    std::vector<std::vector<uint8_t>> colors_at(lat.vertices);
    for (const auto &e : lat.edges) {
        colors_at[e.u].push_back(e.color);
        colors_at[e.v].push_back(e.color);
    }
    for (uint32_t v = 0; v < lat.vertices; v++) {
        ASSERT_EQ(colors_at[v].size(), 3u) << "vertex " << v;
        std::set<uint8_t> distinct(colors_at[v].begin(), colors_at[v].end());
        EXPECT_EQ(distinct.size(), 3u) << "vertex " << v;
    }
    // Euler characteristic of a torus.
    int64_t chi = static_cast<int64_t>(lat.vertices) - static_cast<int64_t>(lat.edges.size()) +
                  static_cast<int64_t>(lat.faces.size());
    EXPECT_EQ(chi, 0);
    EXPECT_EQ(lat.genus, 1u);
    EXPECT_EQ(lat.k(), 2u);
}

TEST_P(HoneycombValidity, InstantaneousGroupLeavesTwoLogicals) {
    // After the checks of one color, the stabilizer group holds those checks
    // and every plaquette; n minus its rank is the logical count.
    auto [a, b] = GetParam();
    auto lat = build_honeycomb(a, b);
    std::vector<PauliProduct> plaquettes;
    for (const auto &f : lat.faces) {
        plaquettes.push_back(oracle::face_operator(lat, f));
    }
    for (uint8_t color = 0; color < 3; color++) {
        std::vector<PauliProduct> group = plaquettes;
        for (const auto &e : lat.edges) {
            if (e.color == color) {
                group.push_back(oracle::lattice_edge_check(e));
            }
        }
        for (size_t i = 0; i < group.size(); i++) {
            for (size_t j = i + 1; j < group.size(); j++) {
                ASSERT_TRUE(products_commute(group[i], group[j]));
            }
        }
        std::vector<std::vector<uint8_t>> rows;
        for (const auto &g : group) {
            rows.push_back(symplectic_row(g, lat.vertices));
        }
        EXPECT_EQ(lat.vertices - rank_gf2(rows), 2u) << "color " << int(color);
    }
}

TEST_P(HoneycombValidity, ExportReloadIsLossless) {
    auto [a, b] = GetParam();
    auto lat = build_honeycomb(a, b);
    auto back = load_floquet_lattice(export_floquet_lattice(lat));
    EXPECT_EQ(back, lat);
    EXPECT_EQ(derive_floquet_observables(back).size(), 2u);
}

INSTANTIATE_TEST_SUITE_P(Sizes, HoneycombValidity,
                         ::testing::Values(std::pair<uint32_t, uint32_t>{2, 3}, std::pair<uint32_t, uint32_t>{4, 6},
                                           std::pair<uint32_t, uint32_t>{2, 6}));

TEST(Honeycomb, SizesWithoutFaceColoringAreRejected) {
    // a*b faces cannot split into three color classes unless b is a multiple of 3.
    EXPECT_THROW(build_honeycomb(2, 2), CodeError);
    EXPECT_THROW(build_honeycomb(4, 4), CodeError);
    EXPECT_THROW(build_honeycomb(3, 3), CodeError);
}

TEST(Lattice, ValidationRejectsBrokenFiles) {
    auto lat = build_honeycomb(2, 3);
    auto recolored = lat;
    auto same_vertex = [&]() {
        auto e0 = lat.edges[0];
        for (size_t i = 1; i < lat.edges.size(); i++) {
            if (lat.edges[i].u == e0.u || lat.edges[i].v == e0.u || lat.edges[i].u == e0.v ||
                lat.edges[i].v == e0.v) {
                return i;
            }
        }
        return size_t{0};
    };
    recolored.edges[0].color = recolored.edges[same_vertex()].color;
    EXPECT_THROW(validate_lattice(recolored), CodeError);

    auto dropped = lat;
    dropped.edges.pop_back();
    EXPECT_THROW(validate_lattice(dropped), CodeError);

    auto wrong_genus = lat;
    wrong_genus.genus = 2;
    EXPECT_THROW(validate_lattice(wrong_genus), CodeError);

    EXPECT_THROW(load_floquet_lattice("{\"vertices\": 4}"), CodeError);
    EXPECT_THROW(load_floquet_lattice("not json"), CodeError);
}

TEST(Schedule, ToricChecksAndDetectors) {
    auto s = make_schedule(build_toric(4));
    EXPECT_EQ(s.data_qubits, 32u);
    EXPECT_EQ(s.qubit_count, 64u);
    EXPECT_EQ(s.checks.size(), 32u);
    EXPECT_EQ(s.period(), 1u);
    EXPECT_EQ(s.observables.size(), 2u);
    std::set<uint32_t> ancillas;
    for (const auto &c : s.checks) {
        ASSERT_TRUE(c.ancilla.has_value());
        ancillas.insert(*c.ancilla);
        EXPECT_EQ(c.support.size(), 4u);
    }
    EXPECT_EQ(ancillas.size(), 32u);
}

TEST(Schedule, FloquetIsDeterministicAndCoversEveryEdge) {
    auto lat = build_honeycomb(4, 6);
    auto s1 = make_schedule(lat);
    auto s2 = make_schedule(lat);
    EXPECT_TRUE(s1.floquet);
    EXPECT_EQ(s1.period(), 3u);
    EXPECT_EQ(s1.qubit_count, lat.vertices);
    std::set<uint32_t> seen;
    for (uint32_t c = 0; c < 3; c++) {
        EXPECT_EQ(s1.subrounds[c], s2.subrounds[c]);
        for (auto e : s1.subrounds[c]) {
            EXPECT_EQ(lat.edges[e].color, c);
            seen.insert(e);
        }
    }
    EXPECT_EQ(seen.size(), lat.edges.size());
    EXPECT_EQ(s1.detectors.size(), s2.detectors.size());
    EXPECT_EQ(s1.observables.size(), 2u);
}
