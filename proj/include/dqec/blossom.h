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

#ifndef DQEC_BLOSSOM_H
#define DQEC_BLOSSOM_H

#include <cstdint>
#include <vector>

namespace dqec {

struct WeightedEdge {
    uint32_t u = 0;
    uint32_t v = 0;
    int64_t weight = 0;
};

/// Edmonds' blossom algorithm for maximum-weight matching on a general graph,
/// O(n^3), integer arithmetic throughout. Returns mate[v] or -1.
/// With max_cardinality the result is the heaviest among maximum-cardinality matchings.
std::vector<int64_t> max_weight_matching(uint32_t vertex_count, const std::vector<WeightedEdge> &edges,
                                         bool max_cardinality);

/// Minimum-weight perfect matching; returns an empty vector if none exists.
std::vector<int64_t> min_weight_perfect_matching(uint32_t vertex_count, const std::vector<WeightedEdge> &edges);

}  // namespace dqec

#endif
