// Shared generators and independent oracles for the test suite.

#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "classcontrast/common.hpp"
#include "classcontrast/graph.hpp"

namespace cctest {

namespace cc = classcontrast;

// Erdos-Renyi graph with the given edge probability.
inline cc::Graph random_graph(int n, double p, bool directed, cc::Rng& rng,
                              bool weighted = false) {
  std::vector<cc::Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = directed ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      if (rng.next_double() < p) {
        double w = weighted ? 0.5 + rng.next_double() * 4.5 : 1.0;
        edges.push_back({u, v, w});
      }
    }
  return cc::Graph(n, std::move(edges), directed, weighted);
}

inline std::vector<int> random_labels(int n, int classes, cc::Rng& rng) {
  std::vector<int> labels(n);
  // guarantee every class appears
  for (int c = 0; c < classes && c < n; ++c) labels[c] = c;
  for (int i = classes; i < n; ++i)
    labels[i] = static_cast<int>(rng.next_below(classes));
  rng.shuffle(labels);
  return labels;
}

// Plain BFS truncated at depth k, written independently of the library's
// adjacency bookkeeping. Direction Any/Incoming/Outgoing over raw edges.
inline std::set<int> bfs_oracle(int n, const std::vector<cc::Edge>& edges,
                                bool directed, int start, int k,
                                cc::Direction dir) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    if (e.src == e.dst) continue;
    bool fwd = dir == cc::Direction::Any || dir == cc::Direction::Outgoing;
    bool bwd = dir == cc::Direction::Any || dir == cc::Direction::Incoming;
    if (!directed) {
      adj[e.src].push_back(e.dst);
      adj[e.dst].push_back(e.src);
    } else {
      if (fwd) adj[e.src].push_back(e.dst);
      if (bwd) adj[e.dst].push_back(e.src);
    }
  }
  std::vector<int> dist(n, -1);
  dist[start] = 0;
  std::queue<int> q;
  q.push(start);
  std::set<int> out;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (dist[v] >= k) continue;
    for (int w : adj[v]) {
      if (dist[w] != -1) continue;
      dist[w] = dist[v] + 1;
      out.insert(w);
      q.push(w);
    }
  }
  return out;
}

// Two-block planted partition: dense within blocks, no cross edges unless
// cross_p > 0. Node features are one-hot in the block index plus noise-free
// padding, so spatial-1 perfectly encodes the class.
struct PlantedGraph {
  cc::Graph graph;
  cc::NodeTable table;
};

inline PlantedGraph planted_partition(int per_block, int blocks,
                                      double within_p, double cross_p,
                                      cc::Rng& rng) {
  const int n = per_block * blocks;
  std::vector<cc::Edge> edges;
  auto block_of = [&](int u) { return u / per_block; };
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      double p = block_of(u) == block_of(v) ? within_p : cross_p;
      if (rng.next_double() < p) edges.push_back({u, v, 1.0});
    }
  cc::NodeTable nt;
  nt.class_count = blocks;
  for (int c = 0; c < blocks; ++c) nt.class_names.push_back("c" + std::to_string(c));
  nt.labels.resize(n);
  nt.features = Eigen::MatrixXd::Zero(n, blocks + 2);
  for (int u = 0; u < n; ++u) {
    nt.labels[u] = block_of(u);
    nt.features(u, block_of(u)) = 1.0;
    // mild per-node variation so centroids are not all identical one-hots
    nt.features(u, blocks) = (u % 3 == 0) ? 1.0 : 0.0;
  }
  return {cc::Graph(n, std::move(edges), false, false), std::move(nt)};
}

}  // namespace cctest
