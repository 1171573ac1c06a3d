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

#ifndef DQEC_RNG_H
#define DQEC_RNG_H

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dqec {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a list of keys.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> keys) {
    uint64_t h = splitmix64(master);
    for (uint64_t k : keys) {
        h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, std::initializer_list<uint64_t> keys) {
    return Rng(derive_seed(master, keys));
}

/// Uniform double in [0, 1).
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace dqec

#endif
