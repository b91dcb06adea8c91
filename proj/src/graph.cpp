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

#include "p2i/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "p2i/errors.hpp"

namespace p2i {

Rag::Rag(int node_count, std::vector<Edge> edges) : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count < 0)
        throw std::invalid_argument("Rag: negative node count");
    for (Edge& e : edges_) {
        if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count)
            throw std::invalid_argument("Rag: node id out of range");
        if (e.u == e.v)
            throw std::invalid_argument("Rag: self loop on node " + std::to_string(e.u));
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("Rag: edge weights must be positive and finite");
        if (e.u > e.v)
            std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
            throw std::invalid_argument("Rag: duplicate edge");

    std::vector<std::size_t> degree(static_cast<std::size_t>(node_count) + 1, 0);
    for (const Edge& e : edges_) {
        ++degree[e.u];
        ++degree[e.v];
    }
    offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    for (int u = 0; u < node_count; ++u)
        offsets_[u + 1] = offsets_[u] + degree[u];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // Edges are sorted by (u, v), so each list comes out sorted by neighbor id.
    for (const Edge& e : edges_)
        adjacency_[fill[e.u]++] = {e.v, e.weight};
    for (const Edge& e : edges_)
        adjacency_[fill[e.v]++] = {e.u, e.weight};
    for (int u = 0; u < node_count; ++u)
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]),
                  [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
}

void Rag::write_edge_list(std::ostream& out) const {
    const auto old = out.precision(17);
    for (const Edge& e : edges_)
        out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
    out.precision(old);
}

Rag build_rag(const SuperpixelLabeling& labeling, const GradientMap& gradients, double epsilon) {
    require_same_shape(labeling.labels, gradients, "build_rag");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("build_rag: epsilon must be positive");
    const int w = labeling.width(), h = labeling.height();
    const auto n = static_cast<std::uint64_t>(labeling.count);

    struct Acc {
        double sum = 0.0;
        std::size_t pairs = 0;
    };
    std::unordered_map<std::uint64_t, Acc> acc;
    auto add = [&](int a, int b, double ga, double gb) {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        Acc& e = acc[lo * n + hi];
        e.sum += 0.5 * (ga + gb);
        ++e.pairs;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int a = labeling.labels(x, y);
            if (x + 1 < w && labeling.labels(x + 1, y) != a)
                add(a, labeling.labels(x + 1, y), gradients(x, y), gradients(x + 1, y));
            if (y + 1 < h && labeling.labels(x, y + 1) != a)
                add(a, labeling.labels(x, y + 1), gradients(x, y), gradients(x, y + 1));
        }
    }
    std::vector<Edge> edges;
    edges.reserve(acc.size());
    for (const auto& [key, e] : acc)
        edges.push_back({static_cast<int>(key / n), static_cast<int>(key % n),
                         epsilon + e.sum / static_cast<double>(e.pairs)});
    return Rag(labeling.count, std::move(edges));
}

DistanceTable floyd_warshall(const Rag& g, int node_cap) {
    const int s = g.node_count();
    if (s > node_cap)
        throw CapacityError("floyd_warshall: " + std::to_string(s) + " nodes exceeds the cap of " +
                            std::to_string(node_cap) + "; use seeded_distance instead");
    DistanceTable t{s, std::vector<double>(static_cast<std::size_t>(s) * s, kInfinity)};
    auto at = [&](int i, int j) -> double& { return t.values[static_cast<std::size_t>(i) * s + j]; };
    for (int i = 0; i < s; ++i)
        at(i, i) = 0.0;
    for (const Edge& e : g.edges()) {
        at(e.u, e.v) = std::min(at(e.u, e.v), e.weight);
        at(e.v, e.u) = std::min(at(e.v, e.u), e.weight);
    }
    for (int k = 0; k < s; ++k) {
        // Row k is invariant during pivot k (d[k][k] = 0), so rows relax independently.
        const double* row_k = t.values.data() + static_cast<std::size_t>(k) * s;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < s; ++i) {
            double* row_i = t.values.data() + static_cast<std::size_t>(i) * s;
            const double dik = row_i[k];
            if (dik == kInfinity)
                continue;
            for (int j = 0; j < s; ++j) {
                const double via = dik + row_k[j];
                if (via < row_i[j])
                    row_i[j] = via;
            }
        }
    }
    return t;
}

DistanceField seeded_distance(const Rag& g, std::span<const int> seeds) {
    if (seeds.empty())
        throw std::invalid_argument("seeded_distance: empty seed set");
    DistanceField dist(static_cast<std::size_t>(g.node_count()), kInfinity);
    using Item = std::pair<double, int>;
    // Min-heap on (distance, node): equal distances pop lowest node id first.
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int s : seeds) {
        if (s < 0 || s >= g.node_count())
            throw std::invalid_argument("seeded_distance: seed id out of range");
        if (dist[s] != 0.0) {
            dist[s] = 0.0;
            heap.emplace(0.0, s);
        }
    }
    std::vector<char> settled(dist.size(), 0);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[u])
            continue;
        settled[u] = 1;
        for (const Rag::Neighbor& nb : g.neighbors(u)) {
            const double nd = d + nb.weight;
            if (nd < dist[nb.node]) {
                dist[nb.node] = nd;
                heap.emplace(nd, nb.node);
            }
        }
    }
    return dist;
}

DistanceField reduce_seed_rows(const DistanceTable& table, std::span<const int> seeds) {
    DistanceField out(static_cast<std::size_t>(table.node_count), kInfinity);
    for (int s : seeds)
        for (int v = 0; v < table.node_count; ++v)
            out[v] = std::min(out[v], table(s, v));
    return out;
}

}  // namespace p2i
