/*
 * pipeline.hpp -- end-to-end orchestration: recipes, embedding assembly,
 * iterated transductive node classification, link prediction, and the
 * homophily report.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "classcontrast/contextual.hpp"
#include "classcontrast/dataset_io.hpp"
#include "classcontrast/graph.hpp"
#include "classcontrast/homophily.hpp"
#include "classcontrast/mlp.hpp"
#include "classcontrast/spatial.hpp"

#include "json.hpp"

namespace classcontrast {

enum class AblationMode { SpatialOnly, ContextOnly, Both };

inline std::string ablation_mode_name(AblationMode m) {
  switch (m) {
    case AblationMode::SpatialOnly: return "spatial-only";
    case AblationMode::ContextOnly: return "context-only";
    default: return "both";
  }
}

struct DatasetRecipe {
  std::string name;
  bool directed = true;
  std::vector<SpatialRowSpec> spatial_rows;
  std::vector<ContextualRowSpec> contextual_rows;  // empty when pca_dim > 0
  int pca_dim = 0;                 // raw reduced features instead of landmarks
  bool contextual_at_iteration0 = true;
  int expected_dim_initial = 0;    // gamma^0 width; 0 disables the check
  int expected_dim_iterated = 0;   // gamma^t width for t >= 1

  int contextual_width(int class_count) const {
    if (pca_dim > 0) return pca_dim;
    return static_cast<int>(contextual_rows.size()) * class_count;
  }
  int spatial_width(int class_count, bool transductive) const {
    return static_cast<int>(spatial_rows.size()) *
           (class_count + (transductive ? 1 : 0));
  }
};

inline std::vector<SpatialRowSpec> directed_four_rows() {
  return {{1, Direction::Incoming},
          {1, Direction::Outgoing},
          {2, Direction::Incoming},
          {2, Direction::Outgoing}};
}

inline std::vector<ContextualRowSpec> binary_landmark_rows() {
  return {{LandmarkKind::InclusiveBinary, Measure::CommonCount, 0.10},
          {LandmarkKind::SelectiveBinary, Measure::CommonCount, 0.10}};
}

// Per-dataset embedding recipes for the bundled benchmarks, plus generic
// fallbacks for arbitrary directed/undirected data.
inline std::map<std::string, DatasetRecipe> bundled_recipes() {
  std::map<std::string, DatasetRecipe> r;

  DatasetRecipe cora{"cora", true, directed_four_rows(), binary_landmark_rows(),
                     0, true, 46, 42};
  r["cora"] = cora;

  DatasetRecipe citeseer = cora;
  citeseer.name = "citeseer";
  citeseer.expected_dim_initial = 40;
  citeseer.expected_dim_iterated = 36;
  r["citeseer"] = citeseer;

  DatasetRecipe pubmed{"pubmed", true, directed_four_rows(), {}, 100, false,
                       16, 112};
  r["pubmed"] = pubmed;

  DatasetRecipe webkb = cora;
  webkb.expected_dim_initial = 34;
  webkb.expected_dim_iterated = 30;
  for (const char* name : {"texas", "cornell", "wisconsin"}) {
    webkb.name = name;
    r[name] = webkb;
  }

  DatasetRecipe wiki{"chameleon",
                     false,
                     {{1, Direction::Any}, {2, Direction::Any}},
                     binary_landmark_rows(),
                     0,
                     true,
                     22,
                     20};
  r["chameleon"] = wiki;
  wiki.name = "squirrel";
  r["squirrel"] = wiki;

  DatasetRecipe generic_directed{"generic-directed", true, directed_four_rows(),
                                 binary_landmark_rows(), 0, true, 0, 0};
  r["generic-directed"] = generic_directed;
  DatasetRecipe generic_undirected{"generic-undirected",
                                   false,
                                   {{1, Direction::Any}, {2, Direction::Any}},
                                   binary_landmark_rows(),
                                   0,
                                   true,
                                   0,
                                   0};
  r["generic-undirected"] = generic_undirected;
  return r;
}

inline DatasetRecipe recipe_by_name(const std::string& name) {
  auto all = bundled_recipes();
  auto it = all.find(name);
  if (it == all.end()) throw config_error("unknown recipe: " + name);
  return it->second;
}

struct PipelineConfig {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  int iterations = 2;  // T
  AblationMode mode = AblationMode::Both;
  std::string out_dir;
  bool strict_hide_val = false;  // hide Val labels from spatial counting
  bool write_embeddings = false;
  TrainConfig node_train;       // 700-hidden softmax head defaults
  TrainConfig link_train;
  int parallel_seeds = 0;       // 0 = hardware concurrency

  PipelineConfig() {
    node_train.hidden = {700};
    node_train.epochs = 500;
    node_train.learning_rate = 1e-3;
    node_train.l2 = 1e-5;
    node_train.batch_size = 0;
    link_train.hidden = {16, 16};
    link_train.epochs = 100;
    link_train.learning_rate = 1e-3;
    link_train.l2 = 1e-5;
    link_train.batch_size = 128;
  }

  void validate() const {
    if (seeds.empty()) throw config_error("PipelineConfig: seeds must be non-empty");
    if (iterations < 0) throw config_error("PipelineConfig: iterations must be >= 0");
  }
};

// Row-block concatenation in recipe order; single-block modes emit only the
// respective block.
inline Eigen::MatrixXd assemble_embedding(const Eigen::MatrixXd& spatial,
                                          const Eigen::MatrixXd& contextual,
                                          AblationMode mode,
                                          int expected_dim = 0) {
  Eigen::MatrixXd out;
  switch (mode) {
    case AblationMode::SpatialOnly:
      out = spatial;
      break;
    case AblationMode::ContextOnly:
      out = contextual;
      break;
    case AblationMode::Both:
      if (spatial.rows() != contextual.rows())
        throw config_error("assemble_embedding: blocks cover different node sets");
      out.resize(spatial.rows(), spatial.cols() + contextual.cols());
      out << spatial, contextual;
      break;
  }
  if (expected_dim > 0 && out.cols() != expected_dim)
    throw config_error("assemble_embedding: dimension " +
                       std::to_string(out.cols()) + " does not match recipe's " +
                       std::to_string(expected_dim));
  return out;
}

struct IterationMetrics {
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<IterationMetrics> iterations;  // P_0 .. P_T
  double auc = 0.0;                          // link task
};

struct EvalReport {
  std::string task;
  std::string recipe;
  std::string mode;
  std::vector<SeedResult> per_seed;

  std::vector<double> mean_test_per_iteration() const {
    if (per_seed.empty()) return {};
    std::vector<double> out(per_seed.front().iterations.size(), 0.0);
    for (const auto& s : per_seed)
      for (std::size_t t = 0; t < out.size(); ++t)
        out[t] += s.iterations[t].test_accuracy;
    for (double& v : out) v /= per_seed.size();
    return out;
  }

  std::vector<double> std_test_per_iteration() const {
    auto means = mean_test_per_iteration();
    std::vector<double> out(means.size(), 0.0);
    if (per_seed.size() < 2) return out;
    for (const auto& s : per_seed)
      for (std::size_t t = 0; t < out.size(); ++t) {
        double d = s.iterations[t].test_accuracy - means[t];
        out[t] += d * d;
      }
    for (double& v : out) v = std::sqrt(v / (per_seed.size() - 1));
    return out;
  }

  double mean_auc() const {
    double sum = 0.0;
    for (const auto& s : per_seed) sum += s.auc;
    return per_seed.empty() ? 0.0 : sum / per_seed.size();
  }

  double std_auc() const {
    if (per_seed.size() < 2) return 0.0;
    double mean = mean_auc(), sum = 0.0;
    for (const auto& s : per_seed) {
      double d = s.auc - mean;
      sum += d * d;
    }
    return std::sqrt(sum / (per_seed.size() - 1));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["task"] = task;
    j["recipe"] = recipe;
    j["mode"] = mode;
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : per_seed) {
      nlohmann::json sj;
      sj["seed"] = s.seed;
      if (task == "linkpred") {
        sj["auc"] = s.auc;
      } else {
        nlohmann::json iters = nlohmann::json::array();
        for (const auto& it : s.iterations)
          iters.push_back({{"val_accuracy", it.val_accuracy},
                           {"test_accuracy", it.test_accuracy}});
        sj["iterations"] = iters;
      }
      seeds.push_back(sj);
    }
    j["per_seed"] = seeds;
    if (task == "linkpred") {
      j["mean_auc"] = mean_auc();
      j["std_auc"] = std_auc();
    } else {
      j["mean_test_accuracy_per_iteration"] = mean_test_per_iteration();
      j["std_test_accuracy_per_iteration"] = std_test_per_iteration();
    }
    return j;
  }
};

inline void write_embeddings_csv(const std::string& path,
                                 const Eigen::MatrixXd& emb) {
  std::ofstream f(path);
  if (!f) throw data_error("cannot write " + path);
  f << "id";
  for (int j = 0; j < emb.cols(); ++j) f << ",dim" << j;
  f << "\n";
  f << std::setprecision(17);
  for (int i = 0; i < emb.rows(); ++i) {
    f << i;
    for (int j = 0; j < emb.cols(); ++j) f << "," << emb(i, j);
    f << "\n";
  }
}

namespace detail {

inline ContextualBlock make_contextual_block(const NodeTable& nt,
                                             const SplitAssignment& split,
                                             const DatasetRecipe& recipe) {
  if (recipe.pca_dim > 0) return build_pca_block(nt, split, recipe.pca_dim);
  return build_contextual_block(nt, split, recipe.contextual_rows);
}

inline double accuracy_on(const std::vector<int>& nodes,
                          const Prediction& pred,
                          const std::vector<int>& truth) {
  if (nodes.empty()) return 0.0;
  int correct = 0;
  for (int u : nodes)
    if (pred.classes[u] == truth[u]) ++correct;
  return static_cast<double>(correct) / nodes.size();
}

template <typename Fn>
inline void for_each_seed(const PipelineConfig& config, Fn&& body) {
  const int n = static_cast<int>(config.seeds.size());
  int threads = config.parallel_seeds > 0
                    ? config.parallel_seeds
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Iterated transductive node classification: gamma^0 carries the unknown
// column, predictions P_{t-1} replace it for t >= 1. Test labels are read
// only to compute the reported metrics.
inline EvalReport run_transductive(const Graph& g, const NodeTable& nt,
                                   const DatasetRecipe& recipe,
                                   const PipelineConfig& config) {
  config.validate();
  nt.validate();
  const int n_classes = nt.class_count;
  EvalReport report;
  report.task = "classify";
  report.recipe = recipe.name;
  report.mode = ablation_mode_name(config.mode);
  report.per_seed.resize(config.seeds.size());

  detail::for_each_seed(config, [&](int si) {
    const std::uint64_t seed = config.seeds[si];
    SeedResult& sr = report.per_seed[si];
    sr.seed = seed;

    SplitAssignment split = stratified_split(nt, 0.48, 0.32, 0.20,
                                             derive_seed(seed, "node-split"));
    std::vector<int> val_nodes = split.nodes_with(Role::Val);
    std::vector<int> test_nodes = split.nodes_with(Role::Test);

    ContextualBlock context = detail::make_contextual_block(nt, split, recipe);
    std::vector<int> labels_vis =
        visible_labels(nt, split, !config.strict_hide_val);
    std::vector<int> hidden_nodes;
    for (int u = 0; u < nt.node_count(); ++u)
      if (labels_vis[u] < 0) hidden_nodes.push_back(u);

    const bool check_dims = config.mode == AblationMode::Both;
    std::unordered_map<int, int> predictions;
    for (int t = 0; t <= config.iterations; ++t) {
      Eigen::MatrixXd gamma;
      if (t == 0) {
        SpatialBlock sp = build_spatial_block(g, labels_vis, n_classes,
                                              recipe.spatial_rows, true);
        AblationMode mode0 = config.mode;
        if (!recipe.contextual_at_iteration0 && mode0 == AblationMode::Both)
          mode0 = AblationMode::SpatialOnly;
        gamma = assemble_embedding(sp.values, context.values, mode0,
                                   check_dims ? recipe.expected_dim_initial : 0);
      } else {
        std::vector<int> labels_full =
            visible_labels(nt, split, !config.strict_hide_val, &predictions);
        SpatialBlock sp = build_spatial_block(g, labels_full, n_classes,
                                              recipe.spatial_rows, false);
        gamma = assemble_embedding(sp.values, context.values, config.mode,
                                   check_dims ? recipe.expected_dim_iterated : 0);
      }

      TrainConfig cfg = config.node_train;
      cfg.seed = derive_seed(seed, "node-train-iter" + std::to_string(t));
      TrainResult trained =
          train_node_classifier(gamma, nt.labels, split, n_classes, cfg);
      Prediction pred = predict_classes(trained.model, gamma);

      IterationMetrics im;
      im.val_accuracy = detail::accuracy_on(val_nodes, pred, nt.labels);
      im.test_accuracy = detail::accuracy_on(test_nodes, pred, nt.labels);
      sr.iterations.push_back(im);

      predictions.clear();
      for (int u : hidden_nodes) predictions[u] = pred.classes[u];

      if (config.write_embeddings && !config.out_dir.empty())
        write_embeddings_csv(config.out_dir + "/embeddings_" +
                                 std::to_string(seed) + "_" + std::to_string(t) +
                                 ".csv",
                             gamma);
    }
  });
  return report;
}

// Link prediction: spatial blocks are computed on the train-positive graph
// only; all class labels are visible (they are not the prediction target).
inline EvalReport run_link_prediction(const Graph& g, const NodeTable& nt,
                                      const DatasetRecipe& recipe,
                                      const PipelineConfig& config) {
  config.validate();
  nt.validate();
  EvalReport report;
  report.task = "linkpred";
  report.recipe = recipe.name;
  report.mode = ablation_mode_name(config.mode);
  report.per_seed.resize(config.seeds.size());

  detail::for_each_seed(config, [&](int si) {
    const std::uint64_t seed = config.seeds[si];
    SeedResult& sr = report.per_seed[si];
    sr.seed = seed;

    LinkSplit ls = make_link_split(g, 0.85, 0.05, 0.10,
                                   derive_seed(seed, "link-split-seed"));
    std::vector<Edge> train_edges;
    for (auto [u, v] : ls.train_pos) train_edges.push_back({u, v, 1.0});
    Graph train_graph(g.node_count(), std::move(train_edges), g.directed(),
                      g.weighted());

    SplitAssignment all_train;
    all_train.roles.assign(nt.node_count(), Role::Train);
    ContextualBlock context =
        detail::make_contextual_block(nt, all_train, recipe);
    SpatialBlock sp = build_spatial_block(train_graph, nt.labels,
                                          nt.class_count, recipe.spatial_rows,
                                          false);
    Eigen::MatrixXd gamma =
        assemble_embedding(sp.values, context.values, config.mode, 0);

    TrainConfig cfg = config.link_train;
    cfg.seed = derive_seed(seed, "link-train");
    TrainResult trained = train_link_predictor(gamma, ls, cfg);

    Eigen::MatrixXd normalized = l2_normalize_rows(gamma);
    std::vector<std::pair<int, int>> test_pairs = ls.test_pos;
    std::vector<int> test_labels(ls.test_pos.size(), 1);
    test_pairs.insert(test_pairs.end(), ls.test_neg.begin(), ls.test_neg.end());
    test_labels.insert(test_labels.end(), ls.test_neg.size(), 0);
    sr.auc = auc(link_scores(trained.model, normalized, test_pairs), test_labels);
  });
  return report;
}

// All configured homophily matrices + scalar ratios, rows ordered by class
// index. Distance-like contextual rows are converted via x -> 1/(1+x) and
// the conversion is named in the source descriptor.
inline nlohmann::json run_homophily_report(const Graph& g, const NodeTable& nt,
                                           const DatasetRecipe& recipe) {
  nt.validate();
  const int n_classes = nt.class_count;
  nlohmann::json report;
  report["recipe"] = recipe.name;
  report["class_order"] = nt.class_names;

  nlohmann::json matrices = nlohmann::json::array();
  for (int k : {1, 2}) {
    SpatialBlock sp = build_spatial_block(g, nt.labels, n_classes,
                                          {{k, Direction::Any}}, false);
    HomophilyMatrix m = homophily_matrix(sp.values, nt.labels, n_classes,
                                         "spatial-" + std::to_string(k));
    matrices.push_back(homophily_matrix_to_json(
        m, "spatial-" + std::to_string(k), nt.class_names));
  }

  SplitAssignment all_train;
  all_train.roles.assign(nt.node_count(), Role::Train);
  double context_hom = 0.0;
  bool have_context = false;
  for (std::size_t r = 0; r < recipe.contextual_rows.size(); ++r) {
    const auto& spec = recipe.contextual_rows[r];
    ContextualBlock block = build_contextual_block(nt, all_train, {spec});
    std::string name;
    switch (spec.kind) {
      case LandmarkKind::Centroid: name = "context-centroid"; break;
      case LandmarkKind::InclusiveBinary: name = "context-inclusive"; break;
      case LandmarkKind::SelectiveBinary: name = "context-selective"; break;
    }
    Eigen::MatrixXd rows = block.values;
    std::string source = name;
    if (measure_is_distance(spec.measure)) {
      rows = distance_to_similarity(rows);
      source += " (distance converted via 1/(1+x))";
    }
    HomophilyMatrix m = homophily_matrix(rows, nt.labels, n_classes, source);
    matrices.push_back(homophily_matrix_to_json(m, name, nt.class_names));
    if (!have_context) {
      int excluded = 0;
      context_hom = contextual_homophily(rows, nt.labels, n_classes, &excluded);
      have_context = true;
    }
  }
  report["matrices"] = matrices;

  report["node_homophily"] = node_homophily(g, nt.labels);
  report["edge_homophily"] = edge_homophily(g, nt.labels);
  report["higher_homophily"] = higher_homophily(g, nt.labels);
  if (have_context) report["contextual_homophily"] = context_hom;
  report["theorem1_residual"] = verify_theorem1(g, nt.labels, n_classes);
  report["theorem2_residual"] = verify_theorem2(g, nt.labels, n_classes);
  return report;
}

}  // namespace classcontrast
