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
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <set>

#include "dqec/blossom.h"
#include "dqec/decode.h"
#include "parallel.h"

namespace dqec {

namespace {

constexpr int32_t kInf = std::numeric_limits<int32_t>::max() / 4;
/// Fixed-point scale for integer path lengths.
constexpr double kScale = 1e4;

struct Arc {
    uint32_t to;
    int32_t weight;
    uint64_t obs;
};

struct Row {
    std::vector<int32_t> dist;
    std::vector<uint64_t> obs;
};

}  // namespace

struct MatchingDecoder::Impl {
    MatchingGraph graph;
    DecoderOptions options;
    std::vector<std::vector<Arc>> adj;
    std::vector<uint32_t> comp;
    /// Index of each node inside its component.
    std::vector<uint32_t> local;
    std::vector<std::vector<uint32_t>> members;
    std::vector<bool> comp_boundary;
    /// Distance and path mask from each node to the boundary.
    std::vector<int32_t> bdist;
    std::vector<uint64_t> bobs;
    mutable std::vector<Row> rows;
    mutable std::unique_ptr<std::once_flag[]> row_once;

    void dijkstra(std::vector<std::pair<uint32_t, int32_t>> sources, const std::vector<uint64_t> &source_obs,
                  std::vector<int32_t> &dist, std::vector<uint64_t> &obs, bool local_index) const {
        // dist/obs are indexed by node, or by component-local index when local_index is set.
        auto slot = [&](uint32_t v) { return local_index ? local[v] : v; };
        using Item = std::pair<int32_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (size_t i = 0; i < sources.size(); i++) {
            auto [v, d] = sources[i];
            if (d < dist[slot(v)]) {
                dist[slot(v)] = d;
                obs[slot(v)] = source_obs[i];
                heap.push({d, v});
            }
        }
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > dist[slot(v)]) {
                continue;
            }
            for (const auto &a : adj[v]) {
                int32_t nd = d + a.weight;
                if (nd < dist[slot(a.to)]) {
                    dist[slot(a.to)] = nd;
                    obs[slot(a.to)] = obs[slot(v)] ^ a.obs;
                    heap.push({nd, a.to});
                }
            }
        }
    }

    const Row &row(uint32_t u) const {
        std::call_once(row_once[u], [&]() {
            Row &r = rows[u];
            size_t n = members[comp[u]].size();
            r.dist.assign(n, kInf);
            r.obs.assign(n, 0);
            dijkstra({{u, 0}}, {0}, r.dist, r.obs, true);
        });
        return rows[u];
    }

    /// Cheapest way to neutralize defects u and v together: a direct path, or both to the boundary.
    std::pair<int64_t, uint64_t> pair_cost(uint32_t u, uint32_t v) const {
        const Row &r = row(u);
        int64_t direct = r.dist[local[v]];
        int64_t via = static_cast<int64_t>(bdist[u]) + bdist[v];
        if (direct <= via) {
            return {direct, r.obs[local[v]]};
        }
        return {via, bobs[u] ^ bobs[v]};
    }

    uint64_t match_sector(const std::vector<uint32_t> &defects, bool boundary, bool sparse) const;
};

MatchingDecoder::MatchingDecoder(MatchingGraph graph, DecoderOptions options) : impl_(std::make_unique<Impl>()) {
    Impl &im = *impl_;
    im.graph = std::move(graph);
    im.options = options;
    uint32_t n = im.graph.num_detectors;
    im.adj.assign(n, {});
    std::vector<uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    im.bdist.assign(n, kInf);
    im.bobs.assign(n, 0);
    std::vector<std::pair<uint32_t, int32_t>> bsources;
    std::vector<uint64_t> bsource_obs;
    for (const auto &e : im.graph.edges) {
        if (e.u >= n || (e.v != kBoundary && e.v >= n)) {
            throw DecodeError("matching edge references a detector out of range");
        }
        auto w = static_cast<int32_t>(std::llround(std::max(0.0, e.weight) * kScale));
        if (e.v == kBoundary) {
            bsources.push_back({e.u, w});
            bsource_obs.push_back(e.observables);
            continue;
        }
        im.adj[e.u].push_back({e.v, w, e.observables});
        im.adj[e.v].push_back({e.u, w, e.observables});
        parent[find(e.u)] = find(e.v);
    }
    im.comp.assign(n, 0);
    im.local.assign(n, 0);
    std::map<uint32_t, uint32_t> ids;
    for (uint32_t v = 0; v < n; v++) {
        uint32_t root = find(v);
        auto [it, inserted] = ids.emplace(root, static_cast<uint32_t>(ids.size()));
        if (inserted) {
            im.members.emplace_back();
        }
        im.comp[v] = it->second;
        im.local[v] = static_cast<uint32_t>(im.members[it->second].size());
        im.members[it->second].push_back(v);
    }
    im.comp_boundary.assign(im.members.size(), false);
    for (const auto &s : bsources) {
        im.comp_boundary[im.comp[s.first]] = true;
    }
    im.dijkstra(bsources, bsource_obs, im.bdist, im.bobs, false);
    im.rows.resize(n);
    im.row_once = std::make_unique<std::once_flag[]>(n);
}

MatchingDecoder::~MatchingDecoder() = default;

const MatchingGraph &MatchingDecoder::graph() const { return impl_->graph; }

uint64_t MatchingDecoder::Impl::match_sector(const std::vector<uint32_t> &defects, bool boundary, bool sparse) const {
    size_t m = defects.size();
    bool virt = m % 2 == 1;
    if (virt && !boundary) {
        throw DecodeError("odd number of defects in a sector without boundary");
    }
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    if (!sparse) {
        for (uint32_t i = 0; i < m; i++) {
            for (uint32_t j = i + 1; j < m; j++) {
                pairs.push_back({i, j});
            }
        }
    } else {
        uint32_t k = std::min<uint32_t>(options.neighbours, static_cast<uint32_t>(m - 1));
        std::vector<std::pair<int64_t, uint32_t>> cand;
        for (uint32_t i = 0; i < m; i++) {
            const Row &r = row(defects[i]);
            int64_t bi = bdist[defects[i]];
            cand.clear();
            for (uint32_t j = 0; j < m; j++) {
                if (j != i) {
                    int64_t c = std::min<int64_t>(r.dist[local[defects[j]]], bi + bdist[defects[j]]);
                    cand.push_back({c, j});
                }
            }
            std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
            for (uint32_t t = 0; t < k; t++) {
                uint32_t j = cand[t].second;
                pairs.push_back({std::min(i, j), std::max(i, j)});
            }
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }
    std::vector<WeightedEdge> edges;
    std::vector<uint64_t> edge_obs;
    edges.reserve(pairs.size() + m);
    for (auto [i, j] : pairs) {
        auto [cost, obs] = pair_cost(defects[i], defects[j]);
        if (cost < kInf) {
            edges.push_back({i, j, cost});
            edge_obs.push_back(obs);
        }
    }
    uint32_t nodes = static_cast<uint32_t>(m);
    if (virt) {
        for (uint32_t i = 0; i < m; i++) {
            if (bdist[defects[i]] < kInf) {
                edges.push_back({i, nodes, bdist[defects[i]]});
            }
        }
        nodes++;
    }
    auto mate = min_weight_perfect_matching(nodes, edges);
    if (mate.empty()) {
        if (sparse) {
            return match_sector(defects, boundary, false);
        }
        throw DecodeError("no perfect matching for the syndrome");
    }
    uint64_t out = 0;
    for (size_t e = 0; e < edges.size(); e++) {
        const auto &we = edges[e];
        if (mate[we.u] != static_cast<int64_t>(we.v)) {
            continue;
        }
        out ^= we.v == m ? bobs[defects[we.u]] : edge_obs[e];
    }
    return out;
}

uint64_t MatchingDecoder::decode(const std::vector<uint32_t> &defects) const {
    const Impl &im = *impl_;
    std::map<uint32_t, std::vector<uint32_t>> by_comp;
    for (auto d : defects) {
        if (d >= im.graph.num_detectors) {
            throw DecodeError("defect index out of range");
        }
        by_comp[im.comp[d]].push_back(d);
    }
    uint64_t out = 0;
    for (const auto &[c, ds] : by_comp) {
        bool sparse = ds.size() > im.options.exact_limit;
        out ^= im.match_sector(ds, im.comp_boundary[c], sparse);
    }
    return out;
}

std::vector<uint64_t> MatchingDecoder::decode_batch(const ShotOutcomes &outcomes) const {
    if (outcomes.num_detectors != impl_->graph.num_detectors) {
        throw DecodeError("outcome detector count does not match the graph");
    }
    std::vector<uint64_t> out(outcomes.shots, 0);
    constexpr size_t kChunk = 256;
    size_t chunks = (outcomes.shots + kChunk - 1) / kChunk;
    parallel_blocks(chunks, impl_->options.threads, [&](size_t b) {
        size_t end = std::min(outcomes.shots, (b + 1) * kChunk);
        for (size_t s = b * kChunk; s < end; s++) {
            out[s] = decode(outcomes.fired_detectors(s));
        }
    });
    return out;
}

std::vector<uint64_t> mwpm_decode(const MatchingGraph &graph, const ShotOutcomes &outcomes,
                                  const DecoderOptions &options) {
    MatchingDecoder decoder(graph, options);
    return decoder.decode_batch(outcomes);
}

Score score_predictions(const std::vector<uint64_t> &corrections, const ShotOutcomes &outcomes) {
    if (corrections.size() != outcomes.shots) {
        throw DecodeError("prediction count does not match the shot count");
    }
    Score s;
    s.shots = outcomes.shots;
    s.errors_per_observable.assign(outcomes.num_observables, 0);
    for (size_t i = 0; i < outcomes.shots; i++) {
        uint64_t diff = corrections[i] ^ outcomes.observable_mask(i);
        if (diff) {
            s.errors_any++;
        }
        for (size_t k = 0; k < outcomes.num_observables; k++) {
            s.errors_per_observable[k] += (diff >> k) & 1;
        }
    }
    return s;
}

}  // namespace dqec
