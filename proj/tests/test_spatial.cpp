#include "catch_amalgamated.hpp"

#include "classcontrast/spatial.hpp"
#include "test_helpers.hpp"

using namespace classcontrast;

namespace {

// count-by-enumeration oracle over the library's own neighborhood query is
// deliberately avoided; this walks raw edges via the test BFS oracle.
Eigen::VectorXd enumeration_oracle(int n, const std::vector<Edge>& edges,
                                   bool directed, const std::vector<int>& labels,
                                   int class_count, int u, int k, Direction dir,
                                   bool transductive) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(class_count + (transductive ? 1 : 0));
  for (int w : cctest::bfs_oracle(n, edges, directed, u, k, dir)) {
    if (labels[w] >= 0)
      v[labels[w]] += 1.0;
    else if (transductive)
      v[class_count] += 1.0;
  }
  return v;
}

}  // namespace

TEST_CASE("toy 1-hop class counts", "[spatial]") {
  // u=0 with neighbors z=1 (class 0) and y=2 (class 1), three classes
  Graph g(3, {{0, 1, 1.0}, {0, 2, 1.0}}, false, false);
  std::vector<int> labels = {2, 0, 1};
  Eigen::VectorXd a = spatial_counts(g, labels, 0, 3, 1, Direction::Any, false);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 1.0);
  CHECK(a[2] == 0.0);
}

TEST_CASE("isolated node gives zero vector", "[spatial]") {
  Graph g(3, {{0, 1, 1.0}}, false, false);
  std::vector<int> labels = {0, 1, 0};
  CHECK(spatial_counts(g, labels, 2, 2, 2, Direction::Any, false).isZero());
}

TEST_CASE("spatial counts match enumeration oracle", "[spatial]") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 15;
    bool directed = trial % 2 == 0;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = directed ? 0 : u + 1; v < n; ++v)
        if (u != v && rng.next_double() < 0.2) edges.push_back({u, v, 1.0});
    Graph g(n, edges, directed, false);
    std::vector<int> labels = cctest::random_labels(n, 3, rng);
    std::vector<int> partial = labels;
    for (int i = 0; i < n; i += 3) partial[i] = -1;  // hide a third

    for (int u = 0; u < n; ++u)
      for (int k = 1; k <= 2; ++k)
        for (Direction d :
             {Direction::Any, Direction::Incoming, Direction::Outgoing}) {
          if (!directed && d != Direction::Any) continue;
          for (bool trans : {false, true}) {
            Eigen::VectorXd got = spatial_counts(g, partial, u, 3, k, d, trans);
            Eigen::VectorXd want = enumeration_oracle(n, edges, directed, partial,
                                                      3, u, k, d, trans);
            CHECK(got == want);
          }
        }
  }
}

TEST_CASE("transductive entries sum to neighborhood size", "[spatial]") {
  Rng rng(33);
  Graph g = cctest::random_graph(20, 0.2, true, rng);
  std::vector<int> labels = cctest::random_labels(20, 4, rng);
  for (int i = 0; i < 20; i += 2) labels[i] = -1;
  for (int u = 0; u < 20; ++u) {
    Eigen::VectorXd a = spatial_counts(g, labels, u, 4, 2, Direction::Any, true);
    CHECK(a.sum() ==
          static_cast<double>(k_hop_neighborhood(g, u, 2, Direction::Any).size()));
  }
}

TEST_CASE("class permutation equivariance", "[spatial]") {
  Rng rng(55);
  Graph g = cctest::random_graph(18, 0.2, false, rng);
  std::vector<int> labels = cctest::random_labels(18, 4, rng);
  std::vector<int> perm = {2, 0, 3, 1};
  std::vector<int> permuted(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) permuted[i] = perm[labels[i]];
  for (int u = 0; u < 18; ++u) {
    Eigen::VectorXd a = spatial_counts(g, labels, u, 4, 1, Direction::Any, false);
    Eigen::VectorXd b = spatial_counts(g, permuted, u, 4, 1, Direction::Any, false);
    for (int c = 0; c < 4; ++c) CHECK(a[c] == b[perm[c]]);
  }
}

TEST_CASE("L1 of 1-hop row equals degree when fully labeled", "[spatial]") {
  Rng rng(66);
  Graph g = cctest::random_graph(25, 0.15, false, rng);
  std::vector<int> labels = cctest::random_labels(25, 3, rng);
  for (int u = 0; u < 25; ++u) {
    Eigen::VectorXd a = spatial_counts(g, labels, u, 3, 1, Direction::Any, false);
    CHECK(a.sum() == static_cast<double>(g.out_neighbors(u).size()));
  }
}

TEST_CASE("weighted 1-hop sums and reciprocals", "[spatial]") {
  Graph g(3, {{0, 1, 2.5}}, false, true);
  std::vector<int> labels = {1, 0, 1};
  Eigen::VectorXd w = spatial_counts_weighted(g, labels, 0, 2, 1, Direction::Any,
                                              WeightMode::SumWeights);
  CHECK(w[0] == 2.5);
  CHECK(w[1] == 0.0);
  Eigen::VectorXd r = spatial_counts_weighted(g, labels, 0, 2, 1, Direction::Any,
                                              WeightMode::SumReciprocals);
  CHECK(r[0] == Catch::Approx(0.4));
}

TEST_CASE("weighted counts match enumeration oracle at k=1", "[spatial]") {
  Rng rng(77);
  Graph g = cctest::random_graph(10, 0.4, false, rng, /*weighted=*/true);
  std::vector<int> labels = cctest::random_labels(10, 3, rng);
  for (int u = 0; u < 10; ++u) {
    Eigen::VectorXd got = spatial_counts_weighted(g, labels, u, 3, 1,
                                                  Direction::Any,
                                                  WeightMode::SumWeights);
    Eigen::VectorXd want = Eigen::VectorXd::Zero(3);
    for (auto [v, w] : g.out_neighbors(u)) want[labels[v]] += w;
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("weighted 2-hop uses first edge of cheapest path", "[spatial]") {
  // 0-1 (w=1), 1-2 (w=1), 0-3 (w=10), 3-2 (w=1): cheapest path to 2 goes via 1
  Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 3, 10.0}, {3, 2, 1.0}}, false, true);
  std::vector<int> labels = {0, 0, 1, 0};
  Eigen::VectorXd w = spatial_counts_weighted(g, labels, 0, 2, 2, Direction::Any,
                                              WeightMode::SumWeights);
  CHECK(w[1] == 1.0);  // first edge 0-1, weight 1, not the 0-3 edge
}

TEST_CASE("weighted requires weighted graph", "[spatial]") {
  Graph g(2, {{0, 1, 1.0}}, false, false);
  std::vector<int> labels = {0, 1};
  CHECK_THROWS_AS(spatial_counts_weighted(g, labels, 0, 2, 1, Direction::Any,
                                          WeightMode::SumWeights),
                  config_error);
}

TEST_CASE("block widths follow recipe and transductive flag", "[spatial]") {
  Rng rng(88);
  Graph g = cctest::random_graph(12, 0.3, true, rng);
  std::vector<int> labels = cctest::random_labels(12, 7, rng);
  std::vector<SpatialRowSpec> rows = {{1, Direction::Incoming},
                                      {1, Direction::Outgoing},
                                      {2, Direction::Incoming},
                                      {2, Direction::Outgoing}};
  SpatialBlock trans = build_spatial_block(g, labels, 7, rows, true);
  CHECK(trans.values.cols() == 32);  // 4 x (7+1)
  SpatialBlock plain = build_spatial_block(g, labels, 7, rows, false);
  CHECK(plain.values.cols() == 28);  // 4 x 7

  Graph ug = cctest::random_graph(10, 0.3, false, rng);
  std::vector<int> ulabels = cctest::random_labels(10, 5, rng);
  SpatialBlock wiki = build_spatial_block(
      ug, ulabels, 5, {{1, Direction::Any}, {2, Direction::Any}}, false);
  CHECK(wiki.values.cols() == 10);  // 2 x 5
  CHECK_THROWS_AS(
      build_spatial_block(ug, ulabels, 5, {{1, Direction::Incoming}}, false),
      config_error);
}

TEST_CASE("prediction map reproduces ground-truth block", "[spatial]") {
  Rng rng(99);
  auto planted = cctest::planted_partition(8, 3, 0.5, 0.1, rng);
  auto split = stratified_split(planted.table, 0.48, 0.32, 0.20, 2);
  std::unordered_map<int, int> truth_map;
  std::vector<int> vis = visible_labels(planted.table, split, true);
  for (int u = 0; u < planted.table.node_count(); ++u)
    if (vis[u] < 0) truth_map[u] = planted.table.labels[u];
  std::vector<int> with_pred = visible_labels(planted.table, split, true, &truth_map);
  CHECK(with_pred == planted.table.labels);
  SpatialBlock a = build_spatial_block(planted.graph, with_pred, 3,
                                       {{1, Direction::Any}}, false);
  SpatialBlock b = build_spatial_block(planted.graph, planted.table.labels, 3,
                                       {{1, Direction::Any}}, false);
  CHECK(a.values == b.values);
}
