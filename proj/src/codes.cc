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

#include "dqec/codes.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <json.hpp>

#include "dqec/gf2.h"

namespace dqec {

using nlohmann::json;

StabilizerCode build_toric(uint32_t d) {
    if (d < 2) {
        throw CodeError("toric code needs d >= 2");
    }
    StabilizerCode code;
    code.name = "toric-d" + std::to_string(d);
    code.n = 2 * d * d;
    code.k = 2;
    code.d = d;
    auto h = [d](uint32_t i, uint32_t j) { return (i % d) * d + (j % d); };
    auto v = [d](uint32_t i, uint32_t j) { return d * d + (i % d) * d + (j % d); };
    // Vertex checks list their edges in N, E, S, W order; plaquettes likewise.
    for (uint32_t i = 0; i < d; i++) {
        for (uint32_t j = 0; j < d; j++) {
            code.stabilizers.push_back({{v(i + d - 1, j), Pauli::X},
                                        {h(i, j), Pauli::X},
                                        {v(i, j), Pauli::X},
                                        {h(i, j + d - 1), Pauli::X}});
        }
    }
    for (uint32_t i = 0; i < d; i++) {
        for (uint32_t j = 0; j < d; j++) {
            code.stabilizers.push_back({{h(i, j), Pauli::Z},
                                        {v(i, j + 1), Pauli::Z},
                                        {h(i + 1, j), Pauli::Z},
                                        {v(i, j), Pauli::Z}});
        }
    }
    PauliProduct z1, x1, z2, x2;
    for (uint32_t t = 0; t < d; t++) {
        z1.push_back({h(0, t), Pauli::Z});
        x1.push_back({h(t, 0), Pauli::X});
        z2.push_back({v(t, 0), Pauli::Z});
        x2.push_back({v(0, t), Pauli::X});
    }
    code.logical_x = {x1, x2};
    code.logical_z = {z1, z2};
    return code;
}

Pauli color_pauli(uint8_t color) {
    switch (color) {
        case 0:
            return Pauli::X;
        case 1:
            return Pauli::Y;
        case 2:
            return Pauli::Z;
        default:
            throw CodeError("edge color must be 0, 1 or 2");
    }
}

std::vector<uint32_t> FloquetObservableSpec::path_edges() const {
    std::vector<uint32_t> out;
    for (const auto &v : phase_updates) {
        out.insert(out.end(), v.begin(), v.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

std::vector<uint32_t> face_vertices(const FloquetLattice &lat, const std::vector<uint32_t> &face) {
    std::vector<uint32_t> vs;
    for (auto e : face) {
        vs.push_back(lat.edges[e].u);
        vs.push_back(lat.edges[e].v);
    }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

/// Forces a proper face 3-coloring by propagation around vertices.
std::optional<std::vector<uint8_t>> color_faces(const FloquetLattice &lat) {
    size_t nf = lat.faces.size();
    std::vector<std::vector<uint32_t>> faces_at(lat.vertices);
    for (size_t f = 0; f < nf; f++) {
        for (auto v : face_vertices(lat, lat.faces[f])) {
            faces_at[v].push_back(static_cast<uint32_t>(f));
        }
    }
    for (const auto &fs : faces_at) {
        if (fs.size() != 3) {
            return std::nullopt;
        }
    }
    std::vector<int> color(nf, -1);
    std::deque<uint32_t> queue;
    auto visit_vertex = [&](uint32_t v) -> bool {
        const auto &fs = faces_at[v];
        int known = 0;
        int used = 0;
        for (auto f : fs) {
            if (color[f] >= 0) {
                known++;
                if (used & (1 << color[f])) {
                    return false;
                }
                used |= 1 << color[f];
            }
        }
        if (known == 2) {
            for (auto f : fs) {
                if (color[f] < 0) {
                    color[f] = used == 3 ? 2 : used == 5 ? 1 : 0;
                    for (auto w : face_vertices(lat, lat.faces[f])) {
                        queue.push_back(w);
                    }
                }
            }
        }
        return true;
    };
    for (size_t start = 0; start < nf; start++) {
        if (color[start] >= 0) {
            continue;
        }
        // Seed a new component with a face and one neighbour across an edge.
        color[start] = 0;
        auto vs = face_vertices(lat, lat.faces[start]);
        const auto &fs = faces_at[vs[0]];
        for (auto f : fs) {
            if (f != start && color[f] < 0) {
                color[f] = 1;
                break;
            }
        }
        for (auto v : vs) {
            queue.push_back(v);
        }
        while (!queue.empty()) {
            uint32_t v = queue.front();
            queue.pop_front();
            if (!visit_vertex(v)) {
                return std::nullopt;
            }
        }
    }
    std::vector<uint8_t> out(nf);
    for (size_t f = 0; f < nf; f++) {
        if (color[f] < 0) {
            return std::nullopt;
        }
        out[f] = static_cast<uint8_t>(color[f]);
    }
    // Final verification around every vertex.
    for (const auto &fs : faces_at) {
        if (out[fs[0]] == out[fs[1]] || out[fs[0]] == out[fs[2]] || out[fs[1]] == out[fs[2]]) {
            return std::nullopt;
        }
    }
    return out;
}

}  // namespace

FloquetLattice build_honeycomb(uint32_t a, uint32_t b) {
    if (a < 2 || b < 2) {
        throw CodeError("honeycomb needs a >= 2 and b >= 2 for non-degenerate faces");
    }
    if (a % 2 != 0) {
        throw CodeError("honeycomb brick wall needs an even row count a to be 3-regular");
    }
    if (b % 3 != 0) {
        throw CodeError("honeycomb faces are 3-colorable only when b is a multiple of 3 (a*b faces must split into three equal color classes)");
    }
    FloquetLattice lat;
    lat.name = "honeycomb-" + std::to_string(a) + "x" + std::to_string(b);
    uint32_t cols = 2 * b;
    lat.vertices = a * cols;
    lat.genus = 1;
    auto vid = [&](uint32_t i, uint32_t j) { return (i % a) * cols + (j % cols); };
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> edge_of;
    auto add_edge = [&](uint32_t u, uint32_t v) {
        edge_of[{std::min(u, v), std::max(u, v)}] = static_cast<uint32_t>(lat.edges.size());
        lat.edges.push_back({u, v, 0});
    };
    for (uint32_t i = 0; i < a; i++) {
        for (uint32_t j = 0; j < cols; j++) {
            add_edge(vid(i, j), vid(i, j + 1));
        }
    }
    for (uint32_t i = 0; i < a; i++) {
        for (uint32_t j = 0; j < cols; j++) {
            if ((i + j) % 2 == 0) {
                add_edge(vid(i, j), vid(i + 1, j));
            }
        }
    }
    auto eid = [&](uint32_t u, uint32_t v) { return edge_of.at({std::min(u, v), std::max(u, v)}); };
    for (uint32_t i = 0; i < a; i++) {
        for (uint32_t m = 0; m < b; m++) {
            uint32_t j = 2 * m + (i % 2);
            lat.faces.push_back({eid(vid(i, j), vid(i, j + 1)), eid(vid(i, j + 1), vid(i, j + 2)),
                                 eid(vid(i, j + 2), vid(i + 1, j + 2)), eid(vid(i + 1, j + 2), vid(i + 1, j + 1)),
                                 eid(vid(i + 1, j + 1), vid(i + 1, j)), eid(vid(i + 1, j), vid(i, j))});
        }
    }
    auto colors = color_faces(lat);
    if (!colors) {
        throw CodeError("honeycomb faces are not 3-colorable");
    }
    // An edge takes the one color missing from the two faces that contain it.
    std::vector<int> seen(lat.edges.size(), 0);
    for (size_t f = 0; f < lat.faces.size(); f++) {
        for (auto e : lat.faces[f]) {
            seen[e] += 1 << (*colors)[f];
        }
    }
    for (size_t e = 0; e < lat.edges.size(); e++) {
        int used = seen[e];
        lat.edges[e].color = used == 3 ? 2 : used == 5 ? 1 : 0;
    }
    validate_lattice(lat);
    lat.observables = derive_floquet_observables(lat);
    return lat;
}

std::vector<uint8_t> validate_lattice(const FloquetLattice &lat) {
    uint32_t V = lat.vertices;
    if (V == 0) {
        throw CodeError("lattice has no vertices");
    }
    std::vector<std::vector<uint32_t>> incident(V);
    std::set<std::pair<uint32_t, uint32_t>> pairs;
    for (size_t e = 0; e < lat.edges.size(); e++) {
        const auto &ed = lat.edges[e];
        if (ed.u >= V || ed.v >= V || ed.u == ed.v) {
            throw CodeError("edge " + std::to_string(e) + " has invalid endpoints");
        }
        if (ed.color > 2) {
            throw CodeError("edge " + std::to_string(e) + " has color outside {0,1,2}");
        }
        if (!pairs.insert({std::min(ed.u, ed.v), std::max(ed.u, ed.v)}).second) {
            throw CodeError("edge " + std::to_string(e) + " duplicates another edge");
        }
        incident[ed.u].push_back(static_cast<uint32_t>(e));
        incident[ed.v].push_back(static_cast<uint32_t>(e));
    }
    for (uint32_t v = 0; v < V; v++) {
        if (incident[v].size() != 3) {
            throw CodeError("lattice is not 3-regular at vertex " + std::to_string(v));
        }
        int used = 0;
        for (auto e : incident[v]) {
            int bit = 1 << lat.edges[e].color;
            if (used & bit) {
                throw CodeError("improper edge coloring: color " + std::to_string(lat.edges[e].color) +
                                " repeats at vertex " + std::to_string(v));
            }
            used |= bit;
        }
    }
    std::vector<int> face_count(lat.edges.size(), 0);
    std::vector<uint8_t> colors;
    for (size_t f = 0; f < lat.faces.size(); f++) {
        const auto &face = lat.faces[f];
        if (face.size() < 2) {
            throw CodeError("face " + std::to_string(f) + " is degenerate");
        }
        std::map<uint32_t, int> degree;
        int used = 0;
        for (auto e : face) {
            if (e >= lat.edges.size()) {
                throw CodeError("face " + std::to_string(f) + " references a missing edge");
            }
            face_count[e]++;
            degree[lat.edges[e].u]++;
            degree[lat.edges[e].v]++;
            used |= 1 << lat.edges[e].color;
        }
        for (auto [v, deg] : degree) {
            if (deg != 2) {
                throw CodeError("face " + std::to_string(f) + " is not a closed cycle");
            }
        }
        // Connectivity of the face cycle.
        std::set<uint32_t> reached = {lat.edges[face[0]].u};
        bool grew = true;
        while (grew) {
            grew = false;
            for (auto e : face) {
                bool hu = reached.count(lat.edges[e].u), hv = reached.count(lat.edges[e].v);
                if (hu != hv) {
                    reached.insert(lat.edges[e].u);
                    reached.insert(lat.edges[e].v);
                    grew = true;
                }
            }
        }
        if (reached.size() != degree.size()) {
            throw CodeError("face " + std::to_string(f) + " is not a single cycle");
        }
        if (used == 7) {
            throw CodeError("face " + std::to_string(f) + " uses all three edge colors");
        }
        colors.push_back(used == 3 ? 2 : used == 5 ? 1 : 0);
    }
    for (size_t e = 0; e < lat.edges.size(); e++) {
        if (face_count[e] != 2) {
            throw CodeError("edge " + std::to_string(e) + " borders " + std::to_string(face_count[e]) +
                            " faces; a closed surface needs exactly 2");
        }
    }
    int64_t chi = static_cast<int64_t>(V) - static_cast<int64_t>(lat.edges.size()) +
                  static_cast<int64_t>(lat.faces.size());
    if (chi != 2 - 2 * static_cast<int64_t>(lat.genus)) {
        throw CodeError("Euler characteristic " + std::to_string(chi) + " inconsistent with genus " +
                        std::to_string(lat.genus));
    }
    if (lat.base_n && lat.fine_f) {
        if (static_cast<uint64_t>(*lat.base_n) * *lat.fine_f * *lat.fine_f != V) {
            throw CodeError("vertex count differs from base_n * f^2");
        }
    }
    for (const auto &obs : lat.observables) {
        for (const auto &ph : obs.phase_updates) {
            for (auto e : ph) {
                if (e >= lat.edges.size()) {
                    throw CodeError("observable references a missing edge");
                }
            }
        }
        for (auto q : obs.final_support) {
            if (q >= V) {
                throw CodeError("observable references a missing qubit");
            }
        }
    }
    return colors;
}

FloquetLattice load_floquet_lattice(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception &ex) {
        throw CodeError(std::string("lattice schema violation: ") + ex.what());
    }
    FloquetLattice lat;
    try {
        lat.name = doc.value("name", std::string("lattice"));
        lat.vertices = doc.at("vertices").get<uint32_t>();
        lat.genus = doc.at("genus").get<uint32_t>();
        if (doc.contains("base_n") && !doc["base_n"].is_null()) {
            lat.base_n = doc["base_n"].get<uint32_t>();
        }
        if (doc.contains("f") && !doc["f"].is_null()) {
            lat.fine_f = doc["f"].get<uint32_t>();
        }
        for (const auto &e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 3) {
                throw CodeError("lattice schema violation: edges are [u, v, color] triples");
            }
            lat.edges.push_back({e[0].get<uint32_t>(), e[1].get<uint32_t>(), e[2].get<uint8_t>()});
        }
        lat.faces = doc.at("faces").get<std::vector<std::vector<uint32_t>>>();
        if (doc.contains("observables")) {
            for (const auto &o : doc["observables"]) {
                FloquetObservableSpec spec;
                auto phases = o.at("phase_updates").get<std::vector<std::vector<uint32_t>>>();
                if (phases.size() != 3) {
                    throw CodeError("lattice schema violation: phase_updates needs one list per color");
                }
                for (int c = 0; c < 3; c++) {
                    spec.phase_updates[c] = phases[c];
                }
                spec.final_support = o.at("final_support").get<std::vector<uint32_t>>();
                std::string basis = o.value("final_basis", std::string("Z"));
                if (basis != "Z") {
                    throw CodeError("only Z-basis final readout is supported");
                }
                lat.observables.push_back(std::move(spec));
            }
        }
    } catch (const json::exception &ex) {
        throw CodeError(std::string("lattice schema violation: ") + ex.what());
    }
    validate_lattice(lat);
    return lat;
}

std::string export_floquet_lattice(const FloquetLattice &lat) {
    json doc;
    doc["name"] = lat.name;
    doc["base_n"] = lat.base_n ? json(*lat.base_n) : json(nullptr);
    doc["f"] = lat.fine_f ? json(*lat.fine_f) : json(nullptr);
    doc["genus"] = lat.genus;
    doc["vertices"] = lat.vertices;
    json edges = json::array();
    for (const auto &e : lat.edges) {
        edges.push_back({e.u, e.v, e.color});
    }
    doc["edges"] = edges;
    doc["faces"] = lat.faces;
    json obs = json::array();
    for (const auto &o : lat.observables) {
        json jo;
        jo["path_edges"] = o.path_edges();
        jo["phase_updates"] = {o.phase_updates[0], o.phase_updates[1], o.phase_updates[2]};
        jo["final_basis"] = "Z";
        jo["final_support"] = o.final_support;
        obs.push_back(jo);
    }
    doc["observables"] = obs;
    return doc.dump(1);
}

namespace {

PauliProduct edge_check(const LatticeEdge &e) {
    Pauli p = color_pauli(e.color);
    return {{e.u, p}, {e.v, p}};
}

}  // namespace

std::vector<FloquetObservableSpec> derive_floquet_observables(const FloquetLattice &lat) {
    validate_lattice(lat);
    const size_t n = lat.vertices;
    const size_t E = lat.edges.size();
    std::array<std::vector<uint32_t>, 3> by_color;
    std::vector<BitVec> check_vec(E);
    for (size_t e = 0; e < E; e++) {
        by_color[lat.edges[e].color].push_back(static_cast<uint32_t>(e));
        check_vec[e] = symplectic(edge_check(lat.edges[e]), n);
    }
    // Unknowns: O (Z support, n bits) then the included edge set (E bits).
    // Walking backward from the final readout, the tracked operator must
    // commute with every check of the sub-round it crosses:
    //   O+P2 vs color 1, O+P2+P1 vs color 0, P0+P1 vs 2, P0+P2 vs 1, P1+P2 vs 0.
    const size_t cols = n + E;
    std::vector<BitVec> rows;
    auto add_rows = [&](bool with_o, std::array<bool, 3> with_pi, uint8_t against) {
        for (auto c : by_color[against]) {
            BitVec row(cols);
            Pauli p = color_pauli(against);
            if (with_o && has_x(p)) {
                row.flip(lat.edges[c].u);
                row.flip(lat.edges[c].v);
            }
            for (int col = 0; col < 3; col++) {
                if (!with_pi[col]) {
                    continue;
                }
                for (auto e : by_color[col]) {
                    if (symplectic_anticommutes(check_vec[e], check_vec[c], n)) {
                        row.flip(n + e);
                    }
                }
            }
            rows.push_back(std::move(row));
        }
    };
    add_rows(true, {false, false, true}, 1);
    add_rows(true, {false, true, true}, 0);
    add_rows(false, {true, true, false}, 2);
    add_rows(false, {true, false, true}, 1);
    add_rows(false, {false, true, true}, 0);
    auto solutions = gf2_nullspace(rows, cols);

    // Steady-state group right after a color-2 sub-round.
    PauliGroupTracker isg(n);
    for (int period = 0; period < 4; period++) {
        for (int c = 0; c < 3; c++) {
            for (auto e : by_color[c]) {
                isg.measure(check_vec[e]);
            }
        }
    }
    Gf2Basis span;
    for (const auto &g : isg.generators()) {
        span.add(g);
    }
    // Prefer light solutions so observables touch few checks.
    std::stable_sort(solutions.begin(), solutions.end(),
                     [](const BitVec &x, const BitVec &y) { return x.popcount() < y.popcount(); });
    std::vector<FloquetObservableSpec> out;
    for (const auto &sol : solutions) {
        PauliProduct o;
        for (size_t q = 0; q < n; q++) {
            if (sol.get(q)) {
                o.push_back({static_cast<uint32_t>(q), Pauli::Z});
            }
        }
        if (!span.add(symplectic(o, n))) {
            continue;
        }
        FloquetObservableSpec spec;
        for (size_t e = 0; e < E; e++) {
            if (sol.get(n + e)) {
                spec.phase_updates[lat.edges[e].color].push_back(static_cast<uint32_t>(e));
            }
        }
        for (const auto &t : o) {
            spec.final_support.push_back(t.qubit);
        }
        out.push_back(std::move(spec));
    }
    if (out.size() != lat.k()) {
        throw CodeError("found " + std::to_string(out.size()) + " observable rules, expected k = " +
                        std::to_string(lat.k()));
    }
    return out;
}

Pauli Check::basis() const { return support.empty() ? Pauli::I : support.front().axis; }

ScheduleTemplate make_schedule(const StabilizerCode &code) {
    ScheduleTemplate s;
    s.code_name = code.name;
    s.data_qubits = code.n;
    s.qubit_count = code.n + static_cast<uint32_t>(code.stabilizers.size());
    s.subrounds.emplace_back();
    for (size_t c = 0; c < code.stabilizers.size(); c++) {
        const auto &stab = code.stabilizers[c];
        Pauli b = stab.front().axis;
        for (const auto &t : stab) {
            if (t.axis != b || b == Pauli::Y) {
                throw CodeError("stabilizer schedule needs homogeneous X or Z checks");
            }
        }
        s.checks.push_back({stab, code.n + static_cast<uint32_t>(c)});
        s.subrounds[0].push_back(static_cast<uint32_t>(c));
    }
    for (uint32_t c = 0; c < s.checks.size(); c++) {
        bool z_type = s.checks[c].basis() == Pauli::Z;
        if (z_type) {
            s.detectors.push_back({0, {{c, 0}}, 0, 0});
        }
        s.detectors.push_back({0, {{c, 0}, {c, -1}}, 1, std::nullopt});
        if (z_type) {
            FinalDetectorTemplate fd;
            fd.terms = {{c, 0}};
            for (const auto &t : s.checks[c].support) {
                fd.data_qubits.push_back(t.qubit);
            }
            s.final_detectors.push_back(std::move(fd));
        }
    }
    for (const auto &lz : code.logical_z) {
        ObservableTemplate o;
        o.per_subround.resize(1);
        for (const auto &t : lz) {
            if (t.axis != Pauli::Z) {
                throw CodeError("memory observables must be Z-type");
            }
            o.final_support.push_back(t.qubit);
        }
        s.observables.push_back(std::move(o));
    }
    return s;
}

ScheduleTemplate make_schedule(const FloquetLattice &lat) {
    auto face_colors = validate_lattice(lat);
    ScheduleTemplate s;
    s.code_name = lat.name;
    s.floquet = true;
    s.data_qubits = lat.vertices;
    s.qubit_count = lat.vertices;
    s.period_multiple = 2;
    s.subrounds.resize(3);
    for (uint32_t e = 0; e < lat.edges.size(); e++) {
        s.checks.push_back({edge_check(lat.edges[e]), std::nullopt});
        s.subrounds[lat.edges[e].color].push_back(e);
    }
    for (size_t f = 0; f < lat.faces.size(); f++) {
        uint8_t c = face_colors[f];
        uint8_t early = (c + 1) % 3;
        uint8_t late = (c + 2) % 3;
        // Color-1 plaquettes pair the color-2 edges of the previous period
        // with the color-0 edges of the current one.
        int32_t early_offset = early > late ? -1 : 0;
        std::vector<RecordTerm> inference;
        for (auto e : lat.faces[f]) {
            uint8_t ec = lat.edges[e].color;
            inference.push_back({e, ec == early ? early_offset : 0});
        }
        uint32_t emit = late;
        uint32_t first_inference = early_offset ? 1 : 0;
        std::vector<RecordTerm> both = inference;
        for (auto t : inference) {
            both.push_back({t.check, t.period_offset - 1});
        }
        if (color_pauli(c) == Pauli::Z) {
            s.detectors.push_back({emit, inference, first_inference, first_inference});
        }
        s.detectors.push_back({emit, both, first_inference + 1, std::nullopt});
        if (color_pauli(c) == Pauli::Z) {
            FinalDetectorTemplate fd;
            fd.terms = inference;
            fd.data_qubits = face_vertices(lat, lat.faces[f]);
            s.final_detectors.push_back(std::move(fd));
        }
    }
    for (auto e : s.subrounds[2]) {
        FinalDetectorTemplate fd;
        fd.terms = {{e, 0}};
        fd.data_qubits = {lat.edges[e].u, lat.edges[e].v};
        s.final_detectors.push_back(std::move(fd));
    }
    if (lat.observables.empty()) {
        s.warnings.push_back("lattice has no observable specs; schedule emitted without observables");
    }
    for (const auto &spec : lat.observables) {
        ObservableTemplate o;
        o.per_subround.resize(3);
        for (int c = 0; c < 3; c++) {
            o.per_subround[c] = spec.phase_updates[c];
        }
        o.final_support = spec.final_support;
        s.observables.push_back(std::move(o));
    }
    return s;
}

}  // namespace dqec
