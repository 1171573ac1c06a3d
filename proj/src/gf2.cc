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

#include "dqec/gf2.h"

#include <bit>
#include <utility>

namespace dqec {

std::vector<BitVec> gf2_nullspace(std::vector<BitVec> rows, size_t ncols) {
    // Reduced row echelon form.
    std::vector<size_t> pivot_cols;
    size_t r = 0;
    for (size_t c = 0; c < ncols && r < rows.size(); c++) {
        size_t sel = r;
        while (sel < rows.size() && !rows[sel].get(c)) {
            sel++;
        }
        if (sel == rows.size()) {
            continue;
        }
        std::swap(rows[r], rows[sel]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != r && rows[i].get(c)) {
                rows[i] ^= rows[r];
            }
        }
        pivot_cols.push_back(c);
        r++;
    }
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : pivot_cols) {
        is_pivot[c] = true;
    }
    std::vector<BitVec> out;
    for (size_t f = 0; f < ncols; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVec x(ncols);
        x.set(f);
        for (size_t i = 0; i < pivot_cols.size(); i++) {
            if (rows[i].get(f)) {
                x.set(pivot_cols[i]);
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

BitVec symplectic(const PauliProduct &p, size_t n) {
    size_t off = symplectic_offset(n);
    BitVec v(2 * off);
    for (const auto &t : p) {
        if (has_x(t.axis)) {
            v.flip(t.qubit);
        }
        if (has_z(t.axis)) {
            v.flip(off + t.qubit);
        }
    }
    return v;
}

PauliProduct from_symplectic(const BitVec &v, size_t n) {
    size_t off = symplectic_offset(n);
    PauliProduct out;
    for (size_t q = 0; q < n; q++) {
        Pauli p = pauli_from_bits(v.get(q), v.get(off + q));
        if (p != Pauli::I) {
            out.push_back({static_cast<uint32_t>(q), p});
        }
    }
    return out;
}

bool symplectic_anticommutes(const BitVec &a, const BitVec &b, size_t n) {
    size_t half = symplectic_offset(n) / 64;
    const auto &wa = a.words();
    const auto &wb = b.words();
    uint64_t acc = 0;
    for (size_t k = 0; k < half; k++) {
        acc ^= (wa[k] & wb[half + k]) ^ (wa[half + k] & wb[k]);
    }
    return std::popcount(acc) & 1;
}

void PauliGroupTracker::measure(const BitVec &p) {
    size_t first = gens_.size();
    for (size_t i = 0; i < gens_.size(); i++) {
        if (symplectic_anticommutes(gens_[i], p, n_)) {
            if (first == gens_.size()) {
                first = i;
            } else {
                gens_[i] ^= gens_[first];
            }
        }
    }
    if (first != gens_.size()) {
        gens_.erase(gens_.begin() + static_cast<std::ptrdiff_t>(first));
    }
    Gf2Basis b;
    for (const auto &g : gens_) {
        b.add(g);
    }
    if (b.add(p)) {
        gens_.push_back(p);
    }
}

bool PauliGroupTracker::contains(const BitVec &p) const {
    Gf2Basis b;
    for (const auto &g : gens_) {
        b.add(g);
    }
    return b.contains(p);
}

}  // namespace dqec
