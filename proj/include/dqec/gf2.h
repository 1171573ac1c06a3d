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

#ifndef DQEC_GF2_H
#define DQEC_GF2_H

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dqec/circuit.h"

namespace dqec {

class BitVec {
   public:
    static constexpr size_t npos = static_cast<size_t>(-1);

    BitVec() = default;
    explicit BitVec(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    size_t size() const { return n_; }
    bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v = true) {
        if (v) {
            w_[i >> 6] |= uint64_t{1} << (i & 63);
        } else {
            w_[i >> 6] &= ~(uint64_t{1} << (i & 63));
        }
    }
    void flip(size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }

    BitVec &operator^=(const BitVec &o) {
        for (size_t k = 0; k < w_.size(); k++) {
            w_[k] ^= o.w_[k];
        }
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec &b) { return a ^= b; }
    bool operator==(const BitVec &) const = default;

    bool any() const {
        for (auto w : w_) {
            if (w) {
                return true;
            }
        }
        return false;
    }
    size_t popcount() const {
        size_t n = 0;
        for (auto w : w_) {
            n += std::popcount(w);
        }
        return n;
    }
    /// Parity of the bitwise AND.
    bool dot(const BitVec &o) const {
        uint64_t acc = 0;
        for (size_t k = 0; k < w_.size(); k++) {
            acc ^= w_[k] & o.w_[k];
        }
        return std::popcount(acc) & 1;
    }
    size_t first_set() const {
        for (size_t k = 0; k < w_.size(); k++) {
            if (w_[k]) {
                return k * 64 + std::countr_zero(w_[k]);
            }
        }
        return npos;
    }
    std::vector<size_t> ones() const {
        std::vector<size_t> out;
        for (size_t k = 0; k < w_.size(); k++) {
            uint64_t w = w_[k];
            while (w) {
                out.push_back(k * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
        return out;
    }
    const std::vector<uint64_t> &words() const { return w_; }

   private:
    size_t n_ = 0;
    std::vector<uint64_t> w_;
};

/// Incrementally built row space with membership and reduction queries.
class Gf2Basis {
   public:
    /// Reduces v against the basis; the result is zero iff v is in the span.
    BitVec reduce(BitVec v) const {
        for (size_t i = 0; i < rows_.size(); i++) {
            if (v.get(pivots_[i])) {
                v ^= rows_[i];
            }
        }
        return v;
    }
    bool contains(const BitVec &v) const { return !reduce(v).any(); }
    /// Adds v; returns false if it was already in the span.
    bool add(const BitVec &v) {
        BitVec r = reduce(v);
        size_t p = r.first_set();
        if (p == BitVec::npos) {
            return false;
        }
        rows_.push_back(std::move(r));
        pivots_.push_back(p);
        return true;
    }
    size_t rank() const { return rows_.size(); }

   private:
    std::vector<BitVec> rows_;
    std::vector<size_t> pivots_;
};

inline size_t gf2_rank(const std::vector<BitVec> &rows) {
    Gf2Basis b;
    for (const auto &r : rows) {
        b.add(r);
    }
    return b.rank();
}

/// Basis of {x : row . x = 0 for every row}, with x of length ncols.
std::vector<BitVec> gf2_nullspace(std::vector<BitVec> rows, size_t ncols);

/// Word-aligned start of the Z half in a symplectic vector over n qubits.
inline size_t symplectic_offset(size_t n) { return (n + 63) / 64 * 64; }
/// Symplectic encoding [x | z] of a Pauli product on n qubits.
BitVec symplectic(const PauliProduct &p, size_t n);
PauliProduct from_symplectic(const BitVec &v, size_t n);
bool symplectic_anticommutes(const BitVec &a, const BitVec &b, size_t n);

/// Stabilizer group tracked under a sequence of Pauli measurements (signs ignored).
class PauliGroupTracker {
   public:
    explicit PauliGroupTracker(size_t n) : n_(n) {}
    void measure(const BitVec &p);
    const std::vector<BitVec> &generators() const { return gens_; }
    bool contains(const BitVec &p) const;
    size_t num_qubits() const { return n_; }

   private:
    size_t n_;
    std::vector<BitVec> gens_;
};

}  // namespace dqec

#endif
