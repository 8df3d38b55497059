/*
 * homophily.hpp -- ClassContrast homophily matrices and ratios, classical
 * node/edge homophily, higher and contextual homophily, and machine checks
 * of the two diagonal identities relating them.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "classcontrast/graph.hpp"
#include "classcontrast/spatial.hpp"

#include "json.hpp"

namespace classcontrast {

struct HomophilyMatrix {
  Eigen::MatrixXd values;  // N x N; NaN rows mark classes with no mass
  std::string source;
  std::vector<int> included_per_class;
  int excluded_nodes = 0;
  std::vector<std::string> warnings;
};

// M[i][j] = class-i average of alpha_v[j] / |alpha_v|_1. Nodes with zero L1
// mass are excluded; a class whose every member has zero mass yields a NaN
// row (never silent zeros).
inline HomophilyMatrix homophily_matrix(const Eigen::MatrixXd& rows,
                                        const std::vector<int>& labels,
                                        int class_count,
                                        const std::string& source = "") {
  if (rows.rows() != static_cast<int>(labels.size()))
    throw argument_error("homophily_matrix: row count != label count");
  if (rows.cols() < class_count)
    throw argument_error("homophily_matrix: row width < class count");
  HomophilyMatrix m;
  m.source = source;
  m.values = Eigen::MatrixXd::Zero(class_count, class_count);
  m.included_per_class.assign(class_count, 0);
  for (int u = 0; u < rows.rows(); ++u) {
    double mass = rows.row(u).head(class_count).cwiseAbs().sum();
    if (mass <= 0.0) {
      ++m.excluded_nodes;
      continue;
    }
    m.values.row(labels[u]) += rows.row(u).head(class_count) / mass;
    ++m.included_per_class[labels[u]];
  }
  for (int c = 0; c < class_count; ++c) {
    if (m.included_per_class[c] == 0) {
      m.values.row(c).setConstant(std::numeric_limits<double>::quiet_NaN());
      m.warnings.push_back("class " + std::to_string(c) +
                           " has no nodes with positive mass");
    } else {
      m.values.row(c) /= m.included_per_class[c];
    }
  }
  return m;
}

inline double alpha_homophily_ratio(const HomophilyMatrix& m) {
  return m.values.diagonal().mean();  // NaN rows propagate
}

// mean over nodes of same-class neighbor fraction; degree-0 nodes excluded
inline double node_homophily(const Graph& g, const std::vector<int>& labels) {
  double sum = 0.0;
  int counted = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    auto nbrs = k_hop_neighborhood(g, u, 1, Direction::Any);
    if (nbrs.empty()) continue;
    int same = 0;
    for (int v : nbrs)
      if (labels[v] == labels[u]) ++same;
    sum += static_cast<double>(same) / nbrs.size();
    ++counted;
  }
  return counted ? sum / counted : 0.0;
}

inline double edge_homophily(const Graph& g, const std::vector<int>& labels) {
  if (g.edge_count() == 0) return 0.0;
  int same = 0;
  for (const Edge& e : g.edges())
    if (labels[e.src] == labels[e.dst]) ++same;
  return static_cast<double>(same) / g.edge_count();
}

// phi_2: same-class fraction within the inclusive 2-hop neighborhood
inline double higher_homophily(const Graph& g, const std::vector<int>& labels) {
  double sum = 0.0;
  int counted = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    auto nbrs = k_hop_neighborhood(g, u, 2, Direction::Any);
    if (nbrs.empty()) continue;
    int same = 0;
    for (int v : nbrs)
      if (labels[v] == labels[u]) ++same;
    sum += static_cast<double>(same) / nbrs.size();
    ++counted;
  }
  return counted ? sum / counted : 0.0;
}

// phi_D = 1 - mean of |beta-hat|_1 / |beta|_1, where beta-hat zeroes the
// own-class entry; zero-mass rows excluded.
inline double contextual_homophily(const Eigen::MatrixXd& beta,
                                   const std::vector<int>& labels,
                                   int class_count, int* excluded = nullptr) {
  double sum = 0.0;
  int counted = 0, skipped = 0;
  for (int u = 0; u < beta.rows(); ++u) {
    double mass = beta.row(u).head(class_count).cwiseAbs().sum();
    if (mass <= 0.0) {
      ++skipped;
      continue;
    }
    double hat = mass - std::abs(beta(u, labels[u]));
    sum += hat / mass;
    ++counted;
  }
  if (excluded) *excluded = skipped;
  return counted ? 1.0 - sum / counted : 0.0;
}

// |(1 - H_node) - mean |alpha1-hat|_1/|alpha1|_1|, with alpha1 built from
// fully visible labels, direction Any. Degree-0 nodes drop out of both sides.
inline double verify_theorem1(const Graph& g, const std::vector<int>& labels,
                              int class_count) {
  double sum = 0.0;
  int counted = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    Eigen::VectorXd a =
        spatial_counts(g, labels, u, class_count, 1, Direction::Any, false);
    double mass = a.sum();
    if (mass <= 0.0) continue;
    sum += (mass - a[labels[u]]) / mass;
    ++counted;
  }
  if (counted == 0) return 0.0;  // edgeless graph: both sides are vacuous
  return std::abs((1.0 - node_homophily(g, labels)) - sum / counted);
}

// same identity over alpha2 / N_2
inline double verify_theorem2(const Graph& g, const std::vector<int>& labels,
                              int class_count) {
  double sum = 0.0;
  int counted = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    Eigen::VectorXd a =
        spatial_counts(g, labels, u, class_count, 2, Direction::Any, false);
    double mass = a.sum();
    if (mass <= 0.0) continue;
    sum += (mass - a[labels[u]]) / mass;
    ++counted;
  }
  if (counted == 0) return 0.0;  // edgeless graph: both sides are vacuous
  return std::abs((1.0 - higher_homophily(g, labels)) - sum / counted);
}

// DistanceLike contextual rows convert entrywise via x -> 1/(1+x) before
// averaging, so the matrix stays similarity-oriented.
inline Eigen::MatrixXd distance_to_similarity(const Eigen::MatrixXd& rows) {
  return (1.0 / (rows.array() + 1.0)).matrix();
}

inline nlohmann::json homophily_matrix_to_json(
    const HomophilyMatrix& m, const std::string& name,
    const std::vector<std::string>& class_order) {
  nlohmann::json j;
  j["matrix_name"] = name;
  j["class_order"] = class_order;
  std::vector<std::vector<double>> vals;
  for (int i = 0; i < m.values.rows(); ++i) {
    std::vector<double> row;
    for (int k = 0; k < m.values.cols(); ++k) row.push_back(m.values(i, k));
    vals.push_back(std::move(row));
  }
  j["values"] = vals;
  j["ratio"] = alpha_homophily_ratio(m);
  j["excluded_nodes"] = m.excluded_nodes;
  if (!m.source.empty()) j["source"] = m.source;
  return j;
}

}  // namespace classcontrast
