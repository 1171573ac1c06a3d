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

// Primal-dual blossom algorithm following the structure of Joris van
// Rantwijk's public-domain mwmatching.py, with labels, dual variables and
// least-slack edge tracking kept per vertex and per blossom.

#include "dqec/blossom.h"

#include <algorithm>
#include <stdexcept>

namespace dqec {

namespace {

class Matcher {
   public:
    Matcher(uint32_t n, const std::vector<WeightedEdge> &edges, bool maxcard, bool warm)
        : n_(static_cast<int64_t>(n)), edges_(edges), maxcard_(maxcard), warm_(warm && maxcard) {}

    std::vector<int64_t> solve();

   private:
    int64_t slack(int64_t k) const {
        const auto &e = edges_[k];
        return dual_[e.u] + dual_[e.v] - 2 * e.weight;
    }
    int64_t endpoint(int64_t p) const { return p % 2 == 0 ? edges_[p / 2].u : edges_[p / 2].v; }

    void leaves(int64_t b, std::vector<int64_t> &out) const {
        if (b < n_) {
            out.push_back(b);
            return;
        }
        for (auto t : childs_[b]) {
            leaves(t, out);
        }
    }
    std::vector<int64_t> leaves(int64_t b) const {
        std::vector<int64_t> out;
        leaves(b, out);
        return out;
    }
    static int64_t wrap(int64_t j, size_t len) { return j < 0 ? j + static_cast<int64_t>(len) : j; }

    void assign_label(int64_t w, int t, int64_t p);
    int64_t scan_blossom(int64_t v, int64_t w);
    void add_blossom(int64_t base, int64_t k);
    void expand_blossom(int64_t b, bool endstage);
    void augment_blossom(int64_t b, int64_t v);
    void augment_matching(int64_t k);
    void warm_start();

    int64_t n_;
    const std::vector<WeightedEdge> &edges_;
    bool maxcard_;
    bool warm_;

    std::vector<std::vector<int64_t>> neighbend_;
    std::vector<int64_t> mate_;
    std::vector<int> label_;
    std::vector<int64_t> labelend_;
    std::vector<int64_t> inblossom_;
    std::vector<int64_t> parent_;
    std::vector<std::vector<int64_t>> childs_;
    std::vector<int64_t> base_;
    std::vector<std::vector<int64_t>> endps_;
    std::vector<int64_t> bestedge_;
    std::vector<std::vector<int64_t>> bestedges_;
    std::vector<bool> has_bestedges_;
    std::vector<int64_t> unused_;
    std::vector<int64_t> dual_;
    std::vector<bool> allowedge_;
    std::vector<int64_t> queue_;
};

void Matcher::assign_label(int64_t w, int t, int64_t p) {
    int64_t b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
        leaves(b, queue_);
    } else if (t == 2) {
        int64_t base = base_[b];
        assign_label(endpoint(mate_[base]), 1, mate_[base] ^ 1);
    }
}

int64_t Matcher::scan_blossom(int64_t v, int64_t w) {
    std::vector<int64_t> path;
    int64_t base = -1;
    while (v != -1 || w != -1) {
        int64_t b = inblossom_[v];
        if (label_[b] & 4) {
            base = base_[b];
            break;
        }
        path.push_back(b);
        label_[b] = 5;
        if (labelend_[b] == -1) {
            v = -1;
        } else {
            v = endpoint(labelend_[b]);
            b = inblossom_[v];
            v = endpoint(labelend_[b]);
        }
        if (w != -1) {
            std::swap(v, w);
        }
    }
    for (auto b : path) {
        label_[b] = 1;
    }
    return base;
}

void Matcher::add_blossom(int64_t base, int64_t k) {
    int64_t v = edges_[k].u, w = edges_[k].v;
    int64_t bb = inblossom_[base];
    int64_t bv = inblossom_[v];
    int64_t bw = inblossom_[w];
    int64_t b = unused_.back();
    unused_.pop_back();
    base_[b] = base;
    parent_[b] = -1;
    parent_[bb] = b;
    std::vector<int64_t> path, endps;
    while (bv != bb) {
        parent_[bv] = b;
        path.push_back(bv);
        endps.push_back(labelend_[bv]);
        v = endpoint(labelend_[bv]);
        bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
        parent_[bw] = b;
        path.push_back(bw);
        endps.push_back(labelend_[bw] ^ 1);
        w = endpoint(labelend_[bw]);
        bw = inblossom_[w];
    }
    childs_[b] = path;
    endps_[b] = endps;
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dual_[b] = 0;
    for (auto leaf : leaves(b)) {
        if (label_[inblossom_[leaf]] == 2) {
            queue_.push_back(leaf);
        }
        inblossom_[leaf] = b;
    }
    std::vector<int64_t> bestedgeto(2 * n_, -1);
    for (auto sub : path) {
        std::vector<std::vector<int64_t>> nblists;
        if (!has_bestedges_[sub]) {
            for (auto leaf : leaves(sub)) {
                std::vector<int64_t> lst;
                for (auto p : neighbend_[leaf]) {
                    lst.push_back(p / 2);
                }
                nblists.push_back(std::move(lst));
            }
        } else {
            nblists.push_back(bestedges_[sub]);
        }
        for (const auto &nblist : nblists) {
            for (auto kk : nblist) {
                int64_t i = edges_[kk].u, j = edges_[kk].v;
                if (inblossom_[j] == b) {
                    std::swap(i, j);
                }
                int64_t bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
                    bestedgeto[bj] = kk;
                }
            }
        }
        bestedges_[sub].clear();
        has_bestedges_[sub] = false;
        bestedge_[sub] = -1;
    }
    bestedges_[b].clear();
    for (auto kk : bestedgeto) {
        if (kk != -1) {
            bestedges_[b].push_back(kk);
        }
    }
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (auto kk : bestedges_[b]) {
        if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) {
            bestedge_[b] = kk;
        }
    }
}

void Matcher::expand_blossom(int64_t b, bool endstage) {
    for (auto s : std::vector<int64_t>(childs_[b])) {
        parent_[s] = -1;
        if (s < n_) {
            inblossom_[s] = s;
        } else if (endstage && dual_[s] == 0) {
            expand_blossom(s, endstage);
        } else {
            for (auto leaf : leaves(s)) {
                inblossom_[leaf] = s;
            }
        }
    }
    if (!endstage && label_[b] == 2) {
        const auto &ch = childs_[b];
        const auto &ep = endps_[b];
        size_t len = ch.size();
        int64_t entrychild = inblossom_[endpoint(labelend_[b] ^ 1)];
        int64_t j = std::find(ch.begin(), ch.end(), entrychild) - ch.begin();
        int64_t jstep, endptrick;
        if (j & 1) {
            j -= static_cast<int64_t>(len);
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        int64_t p = labelend_[b];
        while (j != 0) {
            label_[endpoint(p ^ 1)] = 0;
            label_[endpoint(ep[wrap(j - endptrick, len)] ^ endptrick ^ 1)] = 0;
            assign_label(endpoint(p ^ 1), 2, p);
            allowedge_[ep[wrap(j - endptrick, len)] / 2] = true;
            j += jstep;
            p = ep[wrap(j - endptrick, len)] ^ endptrick;
            allowedge_[p / 2] = true;
            j += jstep;
        }
        int64_t bv = ch[wrap(j, len)];
        label_[endpoint(p ^ 1)] = label_[bv] = 2;
        labelend_[endpoint(p ^ 1)] = labelend_[bv] = p;
        bestedge_[bv] = -1;
        j += jstep;
        while (ch[wrap(j, len)] != entrychild) {
            bv = ch[wrap(j, len)];
            if (label_[bv] == 1) {
                j += jstep;
                continue;
            }
            int64_t found = -1;
            for (auto leaf : leaves(bv)) {
                if (label_[leaf] != 0) {
                    found = leaf;
                    break;
                }
            }
            if (found != -1) {
                label_[found] = 0;
                label_[endpoint(mate_[base_[bv]])] = 0;
                assign_label(found, 2, labelend_[found]);
            }
            j += jstep;
        }
    }
    label_[b] = -1;
    labelend_[b] = -1;
    childs_[b].clear();
    endps_[b].clear();
    base_[b] = -1;
    bestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unused_.push_back(b);
}

void Matcher::augment_blossom(int64_t b, int64_t v) {
    int64_t t = v;
    while (parent_[t] != b) {
        t = parent_[t];
    }
    if (t >= n_) {
        augment_blossom(t, v);
    }
    auto &ch = childs_[b];
    auto &ep = endps_[b];
    size_t len = ch.size();
    int64_t i = std::find(ch.begin(), ch.end(), t) - ch.begin();
    int64_t j = i;
    int64_t jstep, endptrick;
    if (i & 1) {
        j -= static_cast<int64_t>(len);
        jstep = 1;
        endptrick = 0;
    } else {
        jstep = -1;
        endptrick = 1;
    }
    while (j != 0) {
        j += jstep;
        t = ch[wrap(j, len)];
        int64_t p = ep[wrap(j - endptrick, len)] ^ endptrick;
        if (t >= n_) {
            augment_blossom(t, endpoint(p));
        }
        j += jstep;
        t = ch[wrap(j, len)];
        if (t >= n_) {
            augment_blossom(t, endpoint(p ^ 1));
        }
        mate_[endpoint(p)] = p ^ 1;
        mate_[endpoint(p ^ 1)] = p;
    }
    std::rotate(ch.begin(), ch.begin() + i, ch.end());
    std::rotate(ep.begin(), ep.begin() + i, ep.end());
    base_[b] = base_[ch[0]];
}

void Matcher::augment_matching(int64_t k) {
    int64_t v = edges_[k].u, w = edges_[k].v;
    std::pair<int64_t, int64_t> starts[2] = {{v, 2 * k + 1}, {w, 2 * k}};
    for (auto [s, p] : starts) {
        while (true) {
            int64_t bs = inblossom_[s];
            if (bs >= n_) {
                augment_blossom(bs, s);
            }
            mate_[s] = p;
            if (labelend_[bs] == -1) {
                break;
            }
            int64_t t = endpoint(labelend_[bs]);
            int64_t bt = inblossom_[t];
            s = endpoint(labelend_[bt]);
            int64_t j = endpoint(labelend_[bt] ^ 1);
            if (bt >= n_) {
                augment_blossom(bt, j);
            }
            mate_[j] = labelend_[bt];
            p = labelend_[bt] ^ 1;
        }
    }
}

// Greedy initial matching on tight edges. Vertex duals are free when the
// matching must be perfect, so each one is lowered until an edge is tight.
// Duals stay even (weights are doubled by the caller) so every free vertex
// keeps the same parity and S-S slacks stay even.
void Matcher::warm_start() {
    for (int64_t v = 0; v < n_; v++) {
        if (neighbend_[v].empty()) {
            continue;
        }
        int64_t top = edges_[neighbend_[v].front() / 2].weight;
        for (auto p : neighbend_[v]) {
            top = std::max(top, edges_[p / 2].weight);
        }
        dual_[v] = top;
    }
    for (int64_t v = 0; v < n_; v++) {
        if (neighbend_[v].empty()) {
            continue;
        }
        int64_t s = slack(neighbend_[v].front() / 2);
        for (auto p : neighbend_[v]) {
            s = std::min(s, slack(p / 2));
        }
        dual_[v] -= s;
        if (mate_[v] != -1) {
            continue;
        }
        for (auto p : neighbend_[v]) {
            int64_t w = endpoint(p);
            if (mate_[w] == -1 && slack(p / 2) == 0) {
                mate_[v] = p;
                mate_[w] = p ^ 1;
                break;
            }
        }
    }
}

std::vector<int64_t> Matcher::solve() {
    int64_t nedge = static_cast<int64_t>(edges_.size());
    if (nedge == 0) {
        return std::vector<int64_t>(n_, -1);
    }
    int64_t maxweight = 0;
    for (const auto &e : edges_) {
        if (e.u >= n_ || e.v >= n_ || e.u == e.v) {
            throw std::invalid_argument("matching edge endpoints out of range or equal");
        }
        maxweight = std::max(maxweight, e.weight);
    }
    neighbend_.assign(n_, {});
    for (int64_t k = 0; k < nedge; k++) {
        neighbend_[edges_[k].u].push_back(2 * k + 1);
        neighbend_[edges_[k].v].push_back(2 * k);
    }
    mate_.assign(n_, -1);
    label_.assign(2 * n_, 0);
    labelend_.assign(2 * n_, -1);
    inblossom_.resize(n_);
    for (int64_t i = 0; i < n_; i++) {
        inblossom_[i] = i;
    }
    parent_.assign(2 * n_, -1);
    childs_.assign(2 * n_, {});
    base_.assign(2 * n_, -1);
    for (int64_t i = 0; i < n_; i++) {
        base_[i] = i;
    }
    endps_.assign(2 * n_, {});
    bestedge_.assign(2 * n_, -1);
    bestedges_.assign(2 * n_, {});
    has_bestedges_.assign(2 * n_, false);
    unused_.clear();
    for (int64_t i = n_; i < 2 * n_; i++) {
        unused_.push_back(i);
    }
    dual_.assign(2 * n_, 0);
    for (int64_t i = 0; i < n_; i++) {
        dual_[i] = maxweight;
    }
    allowedge_.assign(nedge, false);
    if (warm_) {
        warm_start();
    }

    for (int64_t stage = 0; stage < n_; stage++) {
        std::fill(label_.begin(), label_.end(), 0);
        std::fill(bestedge_.begin(), bestedge_.end(), -1);
        for (int64_t b = n_; b < 2 * n_; b++) {
            bestedges_[b].clear();
            has_bestedges_[b] = false;
        }
        std::fill(allowedge_.begin(), allowedge_.end(), false);
        queue_.clear();
        for (int64_t v = 0; v < n_; v++) {
            if (mate_[v] == -1 && label_[inblossom_[v]] == 0) {
                assign_label(v, 1, -1);
            }
        }
        bool augmented = false;
        while (true) {
            while (!queue_.empty() && !augmented) {
                int64_t v = queue_.back();
                queue_.pop_back();
                for (auto p : neighbend_[v]) {
                    int64_t k = p / 2;
                    int64_t w = endpoint(p);
                    if (inblossom_[v] == inblossom_[w]) {
                        continue;
                    }
                    int64_t kslack = 0;
                    if (!allowedge_[k]) {
                        kslack = slack(k);
                        if (kslack <= 0) {
                            allowedge_[k] = true;
                        }
                    }
                    if (allowedge_[k]) {
                        if (label_[inblossom_[w]] == 0) {
                            assign_label(w, 2, p ^ 1);
                        } else if (label_[inblossom_[w]] == 1) {
                            int64_t base = scan_blossom(v, w);
                            if (base >= 0) {
                                add_blossom(base, k);
                            } else {
                                augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if (label_[w] == 0) {
                            label_[w] = 2;
                            labelend_[w] = p ^ 1;
                        }
                    } else if (label_[inblossom_[w]] == 1) {
                        int64_t b = inblossom_[v];
                        if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) {
                            bestedge_[b] = k;
                        }
                    } else if (label_[w] == 0) {
                        if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) {
                            bestedge_[w] = k;
                        }
                    }
                }
            }
            if (augmented) {
                break;
            }
            int deltatype = -1;
            int64_t delta = 0, deltaedge = -1, deltablossom = -1;
            if (!maxcard_) {
                deltatype = 1;
                delta = *std::min_element(dual_.begin(), dual_.begin() + n_);
            }
            for (int64_t v = 0; v < n_; v++) {
                if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                    int64_t d = slack(bestedge_[v]);
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 2;
                        deltaedge = bestedge_[v];
                    }
                }
            }
            for (int64_t b = 0; b < 2 * n_; b++) {
                if (parent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                    int64_t d = slack(bestedge_[b]) / 2;
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 3;
                        deltaedge = bestedge_[b];
                    }
                }
            }
            for (int64_t b = n_; b < 2 * n_; b++) {
                if (base_[b] >= 0 && parent_[b] == -1 && label_[b] == 2 && (deltatype == -1 || dual_[b] < delta)) {
                    delta = dual_[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if (deltatype == -1) {
                deltatype = 1;
                delta = std::max<int64_t>(0, *std::min_element(dual_.begin(), dual_.begin() + n_));
            }
            for (int64_t v = 0; v < n_; v++) {
                int lb = label_[inblossom_[v]];
                if (lb == 1) {
                    dual_[v] -= delta;
                } else if (lb == 2) {
                    dual_[v] += delta;
                }
            }
            for (int64_t b = n_; b < 2 * n_; b++) {
                if (base_[b] >= 0 && parent_[b] == -1) {
                    if (label_[b] == 1) {
                        dual_[b] += delta;
                    } else if (label_[b] == 2) {
                        dual_[b] -= delta;
                    }
                }
            }
            if (deltatype == 1) {
                break;
            } else if (deltatype == 2) {
                allowedge_[deltaedge] = true;
                int64_t i = edges_[deltaedge].u, j = edges_[deltaedge].v;
                if (label_[inblossom_[i]] == 0) {
                    std::swap(i, j);
                }
                queue_.push_back(i);
            } else if (deltatype == 3) {
                allowedge_[deltaedge] = true;
                queue_.push_back(edges_[deltaedge].u);
            } else {
                expand_blossom(deltablossom, false);
            }
        }
        if (!augmented) {
            break;
        }
        for (int64_t b = n_; b < 2 * n_; b++) {
            if (parent_[b] == -1 && base_[b] >= 0 && label_[b] == 1 && dual_[b] == 0) {
                expand_blossom(b, true);
            }
        }
    }
    std::vector<int64_t> out(n_, -1);
    for (int64_t v = 0; v < n_; v++) {
        if (mate_[v] >= 0) {
            out[v] = endpoint(mate_[v]);
        }
    }
    return out;
}

}  // namespace

std::vector<int64_t> max_weight_matching(uint32_t vertex_count, const std::vector<WeightedEdge> &edges,
                                         bool max_cardinality) {
    Matcher m(vertex_count, edges, max_cardinality, false);
    return m.solve();
}

std::vector<int64_t> min_weight_perfect_matching(uint32_t vertex_count, const std::vector<WeightedEdge> &edges) {
    if (vertex_count % 2) {
        return {};
    }
    int64_t big = 1;
    for (const auto &e : edges) {
        big = std::max(big, e.weight + 1);
    }
    std::vector<WeightedEdge> flipped = edges;
    for (auto &e : flipped) {
        e.weight = big - e.weight;
    }
    for (auto &e : flipped) {
        e.weight *= 2;
    }
    Matcher matcher(vertex_count, flipped, true, true);
    auto mate = matcher.solve();
    for (auto m : mate) {
        if (m < 0) {
            return {};
        }
    }
    return mate;
}

}  // namespace dqec
