#include "catch_amalgamated.hpp"

#include "classcontrast/graph.hpp"
#include "test_helpers.hpp"

using namespace classcontrast;
using cctest::bfs_oracle;
using cctest::random_graph;

TEST_CASE("path graph 2-hop", "[graph]") {
  Graph g(3, {{0, 1, 1.0}, {1, 2, 1.0}}, false, false);
  CHECK(k_hop_neighborhood(g, 0, 2, Direction::Any) == std::vector<int>{1, 2});
  CHECK(k_hop_neighborhood(g, 0, 1, Direction::Any) == std::vector<int>{1});
}

TEST_CASE("isolated node has empty neighborhood", "[graph]") {
  Graph g(4, {{0, 1, 1.0}}, false, false);
  for (int k = 1; k <= 3; ++k)
    CHECK(k_hop_neighborhood(g, 3, k, Direction::Any).empty());
}

TEST_CASE("invalid node id rejected", "[graph]") {
  Graph g(2, {{0, 1, 1.0}}, false, false);
  CHECK_THROWS_AS(k_hop_neighborhood(g, 5, 1, Direction::Any), argument_error);
  CHECK_THROWS_AS(k_hop_neighborhood(g, -1, 1, Direction::Any), argument_error);
  CHECK_THROWS_AS(k_hop_neighborhood(g, 0, 0, Direction::Any), argument_error);
  CHECK_THROWS_AS(k_hop_neighborhood(g, 0, 4, Direction::Any), argument_error);
}

TEST_CASE("construction dedups and drops self-loops", "[graph]") {
  Graph g(3, {{0, 1, 2.0}, {0, 1, 5.0}, {1, 1, 1.0}, {1, 2, 1.0}}, true, true);
  CHECK(g.edge_count() == 2);
  CHECK(g.load_stats().duplicate_edges_dropped == 1);
  CHECK(g.load_stats().self_loops_dropped == 1);
  CHECK(g.out_neighbors(0).front().second == 2.0);  // first weight wins
  CHECK_THROWS_AS(Graph(2, {{0, 1, -1.0}}, false, true), data_error);
}

TEST_CASE("undirected edges mirror", "[graph]") {
  Graph g(3, {{2, 0, 1.5}}, false, true);
  REQUIRE(g.out_neighbors(0).size() == 1);
  CHECK(g.out_neighbors(0).front().first == 2);
  CHECK(g.out_neighbors(0).front().second == 1.5);
  CHECK(g.in_neighbors(2).front().first == 0);
}

TEST_CASE("k-hop matches BFS oracle on random graphs", "[graph]") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 5 + static_cast<int>(rng.next_below(46));
    bool directed = rng.next_below(2) == 0;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = directed ? 0 : u + 1; v < n; ++v)
        if (u != v && rng.next_double() < 0.15) edges.push_back({u, v, 1.0});
    Graph g(n, edges, directed, false);
    for (int u = 0; u < n; ++u)
      for (int k = 1; k <= 2; ++k)
        for (Direction d : {Direction::Any, Direction::Incoming, Direction::Outgoing}) {
          auto got = k_hop_neighborhood(g, u, k, d);
          auto want = bfs_oracle(n, edges, directed, u, k, d);
          CHECK(std::set<int>(got.begin(), got.end()) == want);
        }
  }
}

TEST_CASE("1-hop equals adjacency union minus self", "[graph]") {
  Rng rng(7);
  Graph g = random_graph(20, 0.2, true, rng);
  for (int u = 0; u < g.node_count(); ++u) {
    std::set<int> expect;
    for (auto [v, w] : g.out_neighbors(u)) expect.insert(v);
    for (auto [v, w] : g.in_neighbors(u)) expect.insert(v);
    expect.erase(u);
    auto got = k_hop_neighborhood(g, u, 1, Direction::Any);
    CHECK(std::set<int>(got.begin(), got.end()) == expect);
  }
}

TEST_CASE("undirected symmetry and hop monotonicity", "[graph]") {
  Rng rng(11);
  Graph g = random_graph(25, 0.12, false, rng);
  for (int u = 0; u < g.node_count(); ++u) {
    auto n1 = k_hop_neighborhood(g, u, 1, Direction::Any);
    auto n2 = k_hop_neighborhood(g, u, 2, Direction::Any);
    CHECK(std::includes(n2.begin(), n2.end(), n1.begin(), n1.end()));
    for (int v : n2) {
      auto back = k_hop_neighborhood(g, v, 2, Direction::Any);
      CHECK(std::binary_search(back.begin(), back.end(), u));
    }
  }
}

TEST_CASE("exact-distance mode excludes closer nodes", "[graph]") {
  Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}}, false, false);
  CHECK(k_hop_neighborhood(g, 0, 2, Direction::Any, HopMode::ExactDistance) ==
        std::vector<int>{2});
}

TEST_CASE("stratified split fractions and determinism", "[graph]") {
  NodeTable nt;
  nt.class_count = 1;
  nt.class_names = {"a"};
  nt.labels.assign(100, 0);
  nt.features = Eigen::MatrixXd::Zero(100, 1);
  auto sp = stratified_split(nt, 0.48, 0.32, 0.20, 3);
  CHECK(sp.nodes_with(Role::Train).size() == 48);
  CHECK(sp.nodes_with(Role::Val).size() == 32);
  CHECK(sp.nodes_with(Role::Test).size() == 20);

  NodeTable nt2;
  nt2.class_count = 2;
  nt2.class_names = {"a", "b"};
  nt2.labels.assign(50, 0);
  nt2.labels.insert(nt2.labels.end(), 50, 1);
  nt2.features = Eigen::MatrixXd::Zero(100, 1);
  auto sp2 = stratified_split(nt2, 0.48, 0.32, 0.20, 1);
  for (int c = 0; c < 2; ++c) {
    int train = 0, val = 0, test = 0;
    for (int u = 0; u < 100; ++u) {
      if (nt2.labels[u] != c) continue;
      if (sp2.roles[u] == Role::Train) ++train;
      else if (sp2.roles[u] == Role::Val) ++val;
      else ++test;
    }
    CHECK(train == 24);
    CHECK(val == 16);
    CHECK(test == 10);
  }

  auto a = stratified_split(nt2, 0.48, 0.32, 0.20, 7);
  auto b = stratified_split(nt2, 0.48, 0.32, 0.20, 7);
  CHECK(a.roles == b.roles);
  auto c = stratified_split(nt2, 0.48, 0.32, 0.20, 8);
  CHECK(a.roles != c.roles);
}

TEST_CASE("tiny class goes to Train with warning", "[graph]") {
  NodeTable nt;
  nt.class_count = 2;
  nt.class_names = {"a", "b"};
  nt.labels = {0, 0, 0, 0, 0, 0, 1, 1};
  nt.features = Eigen::MatrixXd::Zero(8, 1);
  auto sp = stratified_split(nt, 0.48, 0.32, 0.20, 0);
  CHECK(sp.roles[6] == Role::Train);
  CHECK(sp.roles[7] == Role::Train);
  CHECK_FALSE(sp.warnings.empty());
}

TEST_CASE("bad split fractions rejected", "[graph]") {
  NodeTable nt;
  nt.class_count = 1;
  nt.class_names = {"a"};
  nt.labels.assign(10, 0);
  nt.features = Eigen::MatrixXd::Zero(10, 1);
  CHECK_THROWS_AS(stratified_split(nt, 0.5, 0.5, 0.5, 0), argument_error);
  CHECK_THROWS_AS(stratified_split(nt, 1.0, -0.5, 0.5, 0), argument_error);
}
