/*
 * graph.hpp -- immutable graph + node table, k-hop neighborhood queries,
 * stratified node splits.
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "classcontrast/common.hpp"

namespace classcontrast {

enum class Direction { Any, Incoming, Outgoing };
enum class HopMode { Inclusive, ExactDistance };
enum class Role { Train, Val, Test };
enum class FeatureKind { BinaryBagOfWords, RealValued };

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;
};

// Immutable adjacency structure. Neighbor lists are sorted by id and
// deduplicated; self-loops are dropped at construction.
class Graph {
 public:
  struct LoadStats {
    int duplicate_edges_dropped = 0;
    int self_loops_dropped = 0;
  };

  Graph(int node_count, std::vector<Edge> edges, bool directed, bool weighted)
      : node_count_(node_count), directed_(directed), weighted_(weighted) {
    out_.assign(node_count_, {});
    in_.assign(node_count_, {});
    std::map<std::pair<int, int>, double> dedup;
    for (const Edge& e : edges) {
      if (e.src < 0 || e.src >= node_count_ || e.dst < 0 || e.dst >= node_count_)
        throw argument_error("Graph: edge endpoint out of range");
      if (e.weight <= 0.0) throw data_error("Graph: non-positive edge weight");
      if (e.src == e.dst) {
        ++stats_.self_loops_dropped;
        continue;
      }
      std::pair<int, int> key =
          directed_ ? std::make_pair(e.src, e.dst)
                    : std::make_pair(std::min(e.src, e.dst), std::max(e.src, e.dst));
      auto [it, inserted] = dedup.emplace(key, e.weight);
      if (!inserted) ++stats_.duplicate_edges_dropped;  // first weight wins
    }
    for (const auto& [key, w] : dedup) {
      out_[key.first].push_back({key.second, w});
      in_[key.second].push_back({key.first, w});
      if (!directed_) {
        out_[key.second].push_back({key.first, w});
        in_[key.first].push_back({key.second, w});
      }
      edges_.push_back({key.first, key.second, w});
    }
    for (auto& l : out_) std::sort(l.begin(), l.end());
    for (auto& l : in_) std::sort(l.begin(), l.end());
  }

  int node_count() const { return node_count_; }
  bool directed() const { return directed_; }
  bool weighted() const { return weighted_; }
  const LoadStats& load_stats() const { return stats_; }

  // unique edges (one entry per undirected edge)
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<std::pair<int, double>>& out_neighbors(int u) const {
    check_node(u);
    return out_[u];
  }
  const std::vector<std::pair<int, double>>& in_neighbors(int u) const {
    check_node(u);
    return in_[u];
  }

  bool has_edge(int u, int v) const {
    check_node(u);
    check_node(v);
    const auto& l = out_[u];
    auto it = std::lower_bound(l.begin(), l.end(), std::make_pair(v, 0.0));
    return it != l.end() && it->first == v;
  }

  void check_node(int u) const {
    if (u < 0 || u >= node_count_) throw argument_error("invalid node id");
  }

 private:
  int node_count_;
  bool directed_;
  bool weighted_;
  std::vector<std::vector<std::pair<int, double>>> out_;
  std::vector<std::vector<std::pair<int, double>>> in_;
  std::vector<Edge> edges_;
  LoadStats stats_;
};

struct NodeTable {
  Eigen::MatrixXd features;   // node_count x n
  std::vector<int> labels;    // class index in [0, class_count)
  int class_count = 0;
  FeatureKind feature_kind = FeatureKind::BinaryBagOfWords;
  std::vector<std::string> class_names;  // lexicographic order

  int node_count() const { return static_cast<int>(labels.size()); }

  void validate() const {
    if (features.rows() != node_count())
      throw data_error("NodeTable: features row count != node count");
    std::vector<int> seen(class_count, 0);
    for (int c : labels) {
      if (c < 0 || c >= class_count) throw data_error("NodeTable: label out of range");
      seen[c] = 1;
    }
    for (int j = 0; j < class_count; ++j)
      if (!seen[j]) throw data_error("NodeTable: empty class " + std::to_string(j));
  }
};

struct SplitAssignment {
  std::vector<Role> roles;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::vector<int> nodes_with(Role r) const {
    std::vector<int> out;
    for (int u = 0; u < static_cast<int>(roles.size()); ++u)
      if (roles[u] == r) out.push_back(u);
    return out;
  }
};

// BFS truncated at depth k, restricted to the requested edge direction.
// The start node itself is excluded. Inclusive mode returns all nodes at
// distance <= k; ExactDistance keeps only distance == k.
inline std::vector<int> k_hop_neighborhood(const Graph& g, int u, int k,
                                           Direction dir,
                                           HopMode mode = HopMode::Inclusive) {
  g.check_node(u);
  if (k < 1 || k > 3) throw argument_error("k_hop_neighborhood: k must be in [1,3]");
  std::vector<int> dist(g.node_count(), -1);
  dist[u] = 0;
  std::queue<int> q;
  q.push(u);
  std::vector<int> result;
  auto visit = [&](int v, int d) {
    if (dist[v] != -1) return;
    dist[v] = d;
    if (mode == HopMode::Inclusive || d == k) result.push_back(v);
    if (d < k) q.push(v);
  };
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    int d = dist[v] + 1;
    if (d > k) break;
    if (dir == Direction::Any || dir == Direction::Outgoing)
      for (const auto& [w, wt] : g.out_neighbors(v)) visit(w, d);
    if (dir == Direction::Any || dir == Direction::Incoming)
      for (const auto& [w, wt] : g.in_neighbors(v)) visit(w, d);
  }
  std::sort(result.begin(), result.end());
  return result;
}

// Per-class shuffle + largest-remainder allocation, so per-class counts are
// exact within +-1 and totals add up. Classes with < 3 members go entirely
// to Train with a warning.
inline SplitAssignment stratified_split(const NodeTable& nt,
                                        double train_frac, double val_frac,
                                        double test_frac, std::uint64_t seed) {
  if (train_frac <= 0 || val_frac <= 0 || test_frac <= 0 ||
      std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw argument_error("stratified_split: fractions must be positive and sum to 1");
  SplitAssignment sp;
  sp.seed = seed;
  sp.roles.assign(nt.node_count(), Role::Train);
  std::vector<std::vector<int>> by_class(nt.class_count);
  for (int u = 0; u < nt.node_count(); ++u) by_class[nt.labels[u]].push_back(u);

  Rng rng(derive_seed(seed, "stratified-split"));
  for (int c = 0; c < nt.class_count; ++c) {
    auto& members = by_class[c];
    if (members.size() < 3) {
      sp.warnings.push_back("class " + std::to_string(c) +
                            " has fewer than 3 members; all assigned to Train");
      continue;
    }
    rng.shuffle(members);
    const int m = static_cast<int>(members.size());
    const double fr[3] = {train_frac, val_frac, test_frac};
    int counts[3];
    double rem[3];
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
      double exact = fr[i] * m;
      counts[i] = static_cast<int>(exact);
      rem[i] = exact - counts[i];
      assigned += counts[i];
    }
    while (assigned < m) {  // largest remainder, ties to earliest role
      int best = 0;
      for (int i = 1; i < 3; ++i)
        if (rem[i] > rem[best]) best = i;
      ++counts[best];
      rem[best] = -1;
      ++assigned;
    }
    int idx = 0;
    const Role order[3] = {Role::Train, Role::Val, Role::Test};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < counts[i]; ++j) sp.roles[members[idx++]] = order[i];
  }
  return sp;
}

}  // namespace classcontrast
