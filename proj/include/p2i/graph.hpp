// Copyright 2026 The pose2inst Authors.
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

#ifndef P2I_GRAPH_HPP_
#define P2I_GRAPH_HPP_

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "p2i/imageops.hpp"

namespace p2i {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultEdgeEpsilon = 1e-3;
inline constexpr int kDefaultFloydWarshallCap = 2000;

struct Edge {
    int u = 0;
    int v = 0;
    double weight = 0.0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph over superpixels. Each unordered pair appears
/// at most once in edges() (with u < v); neighbors are stored in CSR form
/// sorted by node id.
class Rag {
public:
    Rag() = default;
    /// Throws std::invalid_argument on self loops, duplicate pairs, bad ids
    /// or non-positive weights.
    Rag(int node_count, std::vector<Edge> edges);

    int node_count() const { return node_count_; }
    const std::vector<Edge>& edges() const { return edges_; }

    struct Neighbor {
        int node;
        double weight;
    };
    std::span<const Neighbor> neighbors(int u) const {
        return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
    }

    /// Plain-text dump, one "u v weight" line per edge.
    void write_edge_list(std::ostream& out) const;

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adjacency_;
};

/// Per-node distance to the nearest seed; +inf when unreachable.
using DistanceField = std::vector<double>;

/// Row-major S x S all-pairs table.
struct DistanceTable {
    int node_count = 0;
    std::vector<double> values;

    double operator()(int i, int j) const {
        return values[static_cast<std::size_t>(i) * node_count + j];
    }
};

/// Edge (u,v) for every 4-adjacent pixel pair labeled (u,v); weight is
/// epsilon plus the mean over those pairs of (g(p) + g(q)) / 2.
Rag build_rag(const SuperpixelLabeling& labeling, const GradientMap& gradients,
              double epsilon = kDefaultEdgeEpsilon);

/// All-pairs shortest paths; the relaxation for each pivot is parallelized
/// over rows. Throws CapacityError above node_cap.
DistanceTable floyd_warshall(const Rag& g, int node_cap = kDefaultFloydWarshallCap);

/// Multi-source best-first search from every seed at distance 0. Throws
/// std::invalid_argument for an empty seed set or an invalid id.
DistanceField seeded_distance(const Rag& g, std::span<const int> seeds);

/// Minimum over the seed rows of an all-pairs table.
DistanceField reduce_seed_rows(const DistanceTable& table, std::span<const int> seeds);

}  // namespace p2i

#endif  // P2I_GRAPH_HPP_
