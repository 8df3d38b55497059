/*
 * spatial.hpp -- class-count vectors over k-hop neighborhoods: directed,
 * weighted, and transductive (unknown-column) variants, assembled into
 * per-node row blocks.
 */

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "classcontrast/graph.hpp"

namespace classcontrast {

enum class WeightMode { SumWeights, SumReciprocals };

struct SpatialRowSpec {
  int k = 1;
  Direction direction = Direction::Any;
};

struct SpatialBlock {
  std::vector<SpatialRowSpec> rows;
  bool transductive = false;   // rows carry a trailing unknown-label column
  int row_width = 0;           // N, or N+1 when transductive
  Eigen::MatrixXd values;      // node_count x (rows * row_width)
};

// Labels as seen by spatial counting: labels[u] in [0, N) when visible,
// -1 when hidden. Validation labels are visible by default (transductive
// convention); strict mode hides them.
inline std::vector<int> visible_labels(
    const NodeTable& nt, const SplitAssignment& split, bool include_val = true,
    const std::unordered_map<int, int>* prediction_map = nullptr) {
  std::vector<int> out(nt.node_count(), -1);
  for (int u = 0; u < nt.node_count(); ++u) {
    if (split.roles[u] == Role::Train || (include_val && split.roles[u] == Role::Val))
      out[u] = nt.labels[u];
    else if (prediction_map) {
      auto it = prediction_map->find(u);
      if (it != prediction_map->end()) out[u] = it->second;
    }
  }
  return out;
}

// Entry j counts label-j members of N_k(u); transductive mode appends the
// count of hidden-label neighbors, so the entries sum to |N_k(u)|.
inline Eigen::VectorXd spatial_counts(const Graph& g,
                                      const std::vector<int>& labels, int u,
                                      int class_count, int k, Direction dir,
                                      bool transductive,
                                      HopMode mode = HopMode::Inclusive) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(class_count + (transductive ? 1 : 0));
  for (int w : k_hop_neighborhood(g, u, k, dir, mode)) {
    int c = labels[w];
    if (c >= 0)
      v[c] += 1.0;
    else if (transductive)
      v[class_count] += 1.0;
  }
  return v;
}

// Weighted variant: each neighbor contributes the weight of the first edge
// on a minimum-total-weight path within k hops (ties broken by lowest
// first-neighbor id), or its reciprocal in SumReciprocals mode. For k=1 this
// is simply the incident edge weight.
inline Eigen::VectorXd spatial_counts_weighted(const Graph& g,
                                               const std::vector<int>& labels,
                                               int u, int class_count, int k,
                                               Direction dir, WeightMode wmode) {
  if (!g.weighted())
    throw config_error("spatial_counts_weighted: graph is unweighted");
  g.check_node(u);
  if (k < 1 || k > 3) throw argument_error("spatial_counts_weighted: k must be in [1,3]");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = g.node_count();
  // best[v] = (path cost, first-edge neighbor id) over paths of <= k edges
  std::vector<double> cost(n, kInf), prev_cost(n, kInf);
  std::vector<int> first(n, -1), prev_first(n, -1);
  prev_cost[u] = 0.0;
  std::vector<double> best_cost(n, kInf);
  std::vector<int> best_first(n, -1);

  auto edges_of = [&](int v) {
    std::vector<std::pair<int, double>> out;
    if (dir == Direction::Any || dir == Direction::Outgoing)
      for (const auto& e : g.out_neighbors(v)) out.push_back(e);
    if (dir == Direction::Any || dir == Direction::Incoming)
      for (const auto& e : g.in_neighbors(v)) out.push_back(e);
    return out;
  };

  for (int hop = 1; hop <= k; ++hop) {
    std::fill(cost.begin(), cost.end(), kInf);
    std::fill(first.begin(), first.end(), -1);
    for (int v = 0; v < n; ++v) {
      if (prev_cost[v] == kInf) continue;
      for (const auto& [w, wt] : edges_of(v)) {
        double c = prev_cost[v] + wt;
        int f = (v == u) ? w : prev_first[v];
        if (c < cost[w] - 1e-15 ||
            (std::abs(c - cost[w]) <= 1e-15 && f < first[w])) {
          cost[w] = c;
          first[w] = f;
        }
      }
    }
    for (int w = 0; w < n; ++w) {
      if (w == u || cost[w] == kInf) continue;
      if (cost[w] < best_cost[w] - 1e-15 ||
          (std::abs(cost[w] - best_cost[w]) <= 1e-15 && first[w] < best_first[w])) {
        best_cost[w] = cost[w];
        best_first[w] = first[w];
      }
    }
    std::swap(cost, prev_cost);
    std::swap(first, prev_first);
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(class_count);
  for (int w = 0; w < n; ++w) {
    if (w == u || best_first[w] < 0) continue;
    int c = labels[w];
    if (c < 0) continue;
    double fw = 0.0;
    for (const auto& [nb, wt] : edges_of(u))
      if (nb == best_first[w]) {
        fw = wt;
        break;
      }
    out[c] += (wmode == WeightMode::SumWeights) ? fw : 1.0 / fw;
  }
  return out;
}

inline SpatialBlock build_spatial_block(const Graph& g,
                                        const std::vector<int>& labels,
                                        int class_count,
                                        const std::vector<SpatialRowSpec>& rows,
                                        bool transductive,
                                        HopMode mode = HopMode::Inclusive) {
  for (const auto& r : rows)
    if (r.direction != Direction::Any && !g.directed())
      throw config_error("build_spatial_block: directional row on an undirected graph");
  SpatialBlock block;
  block.rows = rows;
  block.transductive = transductive;
  block.row_width = class_count + (transductive ? 1 : 0);
  block.values.resize(g.node_count(),
                      static_cast<int>(rows.size()) * block.row_width);
  for (int u = 0; u < g.node_count(); ++u) {
    int off = 0;
    for (const auto& r : rows) {
      block.values.row(u).segment(off, block.row_width) =
          spatial_counts(g, labels, u, class_count, r.k, r.direction,
                         transductive, mode)
              .transpose();
      off += block.row_width;
    }
  }
  return block;
}

}  // namespace classcontrast
