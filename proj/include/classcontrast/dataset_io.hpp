/*
 * dataset_io.hpp -- loaders for Planetoid-style .content/.cites files and a
 * generic nodes/edges CSV layout, a matching exporter, and link-prediction
 * edge splits with negative sampling.
 */

#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "classcontrast/graph.hpp"

namespace classcontrast {

struct Dataset {
  Graph graph;
  NodeTable table;
  int unknown_edge_endpoints = 0;  // .cites rows referencing unknown ids
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& s, int row, int col) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw data_error("non-numeric value '" + s + "' at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  }
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("cannot open file: " + path);
  return f;
}

}  // namespace detail

// .content rows: "id f_1 ... f_n label"; .cites rows: "cited citing".
// Edge direction is citing -> cited. Label strings map to class indices in
// lexicographic order; string ids map to dense integers in file order.
inline Dataset load_content_cites(const std::string& content_path,
                                  const std::string& cites_path) {
  auto content = detail::open_or_throw(content_path);
  std::vector<std::string> ids;
  std::vector<std::string> label_strs;
  std::vector<std::vector<double>> rows;
  std::map<std::string, int> id_to_idx;
  std::string line;
  int lineno = 0;
  while (std::getline(content, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() < 3)
      throw data_error(content_path + ": row " + std::to_string(lineno) +
                       " has fewer than 3 fields");
    const std::string& id = toks.front();
    if (!id_to_idx.emplace(id, static_cast<int>(ids.size())).second)
      throw data_error(content_path + ": duplicate node id '" + id + "'");
    ids.push_back(id);
    label_strs.push_back(toks.back());
    std::vector<double> feat(toks.size() - 2);
    for (std::size_t i = 1; i + 1 < toks.size(); ++i)
      feat[i - 1] = detail::parse_number(toks[i], lineno,
                                         static_cast<int>(i + 1));  // 1-based field
    rows.push_back(std::move(feat));
  }
  if (rows.empty()) throw data_error(content_path + ": no nodes");
  const std::size_t n_feat = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != n_feat)
      throw data_error(content_path + ": inconsistent feature width");

  std::vector<std::string> classes(label_strs.begin(), label_strs.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::map<std::string, int> class_to_idx;
  for (std::size_t i = 0; i < classes.size(); ++i)
    class_to_idx[classes[i]] = static_cast<int>(i);

  NodeTable nt;
  nt.class_count = static_cast<int>(classes.size());
  nt.class_names = classes;
  nt.features.resize(static_cast<int>(rows.size()), static_cast<int>(n_feat));
  bool binary = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nt.labels.push_back(class_to_idx[label_strs[i]]);
    for (std::size_t j = 0; j < n_feat; ++j) {
      nt.features(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
      if (rows[i][j] != 0.0 && rows[i][j] != 1.0) binary = false;
    }
  }
  nt.feature_kind = binary ? FeatureKind::BinaryBagOfWords : FeatureKind::RealValued;

  auto cites = detail::open_or_throw(cites_path);
  std::vector<Edge> edges;
  int dropped = 0;
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw data_error(cites_path + ": row " + std::to_string(lineno) +
                       " must have exactly 2 fields");
    auto cited = id_to_idx.find(toks[0]);
    auto citing = id_to_idx.find(toks[1]);
    if (cited == id_to_idx.end() || citing == id_to_idx.end()) {
      ++dropped;
      continue;
    }
    edges.push_back({citing->second, cited->second, 1.0});
  }
  Dataset ds{Graph(static_cast<int>(rows.size()), std::move(edges),
                   /*directed=*/true, /*weighted=*/false),
             std::move(nt), dropped};
  ds.table.validate();
  return ds;
}

struct CsvOptions {
  bool undirected = false;
};

// nodes_csv header "id,label,f0,...,f{n-1}"; edges_csv header "src,dst[,weight]".
inline Dataset load_generic_csv(const std::string& nodes_csv,
                                const std::string& edges_csv,
                                CsvOptions options = {}) {
  auto nodes = detail::open_or_throw(nodes_csv);
  std::string line;
  if (!std::getline(nodes, line)) throw data_error(nodes_csv + ": empty file");
  auto header = detail::split_csv(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw data_error(nodes_csv + ": header must be id,label,f0,...");
  const std::size_t n_feat = header.size() - 2;

  std::map<std::string, int> id_to_idx;
  std::vector<std::string> label_strs;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(nodes, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto toks = detail::split_csv(line);
    if (toks.size() != header.size())
      throw data_error(nodes_csv + ": row " + std::to_string(lineno) +
                       " has wrong field count");
    if (!id_to_idx.emplace(toks[0], static_cast<int>(rows.size())).second)
      throw data_error(nodes_csv + ": duplicate node id '" + toks[0] + "'");
    label_strs.push_back(toks[1]);
    std::vector<double> feat(n_feat);
    for (std::size_t j = 0; j < n_feat; ++j)
      feat[j] = detail::parse_number(toks[j + 2], lineno,
                                     static_cast<int>(j + 3));  // 1-based CSV column
    rows.push_back(std::move(feat));
  }
  if (rows.empty()) throw data_error(nodes_csv + ": no nodes");

  std::vector<std::string> classes(label_strs.begin(), label_strs.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::map<std::string, int> class_to_idx;
  for (std::size_t i = 0; i < classes.size(); ++i)
    class_to_idx[classes[i]] = static_cast<int>(i);

  NodeTable nt;
  nt.class_count = static_cast<int>(classes.size());
  nt.class_names = classes;
  nt.features.resize(static_cast<int>(rows.size()), static_cast<int>(n_feat));
  bool binary = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nt.labels.push_back(class_to_idx[label_strs[i]]);
    for (std::size_t j = 0; j < n_feat; ++j) {
      nt.features(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
      if (rows[i][j] != 0.0 && rows[i][j] != 1.0) binary = false;
    }
  }
  nt.feature_kind = binary ? FeatureKind::BinaryBagOfWords : FeatureKind::RealValued;

  auto edges_f = detail::open_or_throw(edges_csv);
  if (!std::getline(edges_f, line)) throw data_error(edges_csv + ": empty file");
  auto eheader = detail::split_csv(line);
  if (eheader.size() < 2 || eheader[0] != "src" || eheader[1] != "dst")
    throw data_error(edges_csv + ": header must be src,dst[,weight]");
  const bool has_weight = eheader.size() == 3;
  std::vector<Edge> edges;
  int dropped = 0;
  lineno = 1;
  while (std::getline(edges_f, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto toks = detail::split_csv(line);
    auto src = id_to_idx.find(toks[0]);
    auto dst = id_to_idx.find(toks[1]);
    if (src == id_to_idx.end() || dst == id_to_idx.end()) {
      ++dropped;
      continue;
    }
    double w = 1.0;
    if (has_weight && toks.size() >= 3) w = detail::parse_number(toks[2], lineno, 3);
    edges.push_back({src->second, dst->second, w});
  }
  Dataset ds{Graph(static_cast<int>(rows.size()), std::move(edges),
                   /*directed=*/!options.undirected, has_weight),
             std::move(nt), dropped};
  ds.table.validate();
  return ds;
}

// Inverse of load_generic_csv: writes id,label,f... and src,dst[,weight].
inline void export_generic_csv(const Graph& g, const NodeTable& nt,
                               const std::string& nodes_csv,
                               const std::string& edges_csv) {
  std::ofstream nodes(nodes_csv);
  if (!nodes) throw data_error("cannot write " + nodes_csv);
  nodes << "id,label";
  for (int j = 0; j < nt.features.cols(); ++j) nodes << ",f" << j;
  nodes << "\n";
  for (int u = 0; u < nt.node_count(); ++u) {
    nodes << u << "," << nt.class_names[nt.labels[u]];
    for (int j = 0; j < nt.features.cols(); ++j) {
      std::ostringstream v;
      v << nt.features(u, j);
      nodes << "," << v.str();
    }
    nodes << "\n";
  }
  std::ofstream edges(edges_csv);
  if (!edges) throw data_error("cannot write " + edges_csv);
  edges << (g.weighted() ? "src,dst,weight" : "src,dst") << "\n";
  for (const Edge& e : g.edges()) {
    edges << e.src << "," << e.dst;
    if (g.weighted()) {
      std::ostringstream v;
      v << e.weight;
      edges << "," << v.str();
    }
    edges << "\n";
  }
}

struct LinkSplit {
  std::vector<std::pair<int, int>> train_pos, val_pos, test_pos;
  std::vector<std::pair<int, int>> train_neg, val_neg, test_neg;
  std::uint64_t seed = 0;
};

// Uniform edge partition at the given ratios plus matched-size negative
// samples drawn uniformly from non-edges, without replacement and disjoint
// across the three sets.
inline LinkSplit make_link_split(const Graph& g, double train_ratio,
                                 double val_ratio, double test_ratio,
                                 std::uint64_t seed) {
  if (g.edge_count() < 20)
    throw argument_error("make_link_split: graph must have >= 20 edges");
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
    throw argument_error("make_link_split: ratios must sum to 1");

  LinkSplit ls;
  ls.seed = seed;
  std::vector<std::pair<int, int>> edges;
  for (const Edge& e : g.edges()) edges.emplace_back(e.src, e.dst);
  Rng rng(derive_seed(seed, "link-split"));
  rng.shuffle(edges);

  const int m = static_cast<int>(edges.size());
  const double fr[3] = {train_ratio, val_ratio, test_ratio};
  int counts[3];
  double rem[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = fr[i] * m;
    counts[i] = static_cast<int>(exact);
    rem[i] = exact - counts[i];
    assigned += counts[i];
  }
  while (assigned < m) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (rem[i] > rem[best]) best = i;
    ++counts[best];
    rem[best] = -1;
    ++assigned;
  }
  ls.train_pos.assign(edges.begin(), edges.begin() + counts[0]);
  ls.val_pos.assign(edges.begin() + counts[0], edges.begin() + counts[0] + counts[1]);
  ls.test_pos.assign(edges.begin() + counts[0] + counts[1], edges.end());

  const long long n = g.node_count();
  const long long pairs = g.directed() ? n * (n - 1) : n * (n - 1) / 2;
  const long long needed = m;
  if (pairs - static_cast<long long>(g.edge_count()) < needed)
    throw data_error("make_link_split: only " +
                     std::to_string(pairs - static_cast<long long>(g.edge_count())) +
                     " non-edges available, need " + std::to_string(needed));

  std::set<std::pair<int, int>> taken;
  Rng neg_rng(derive_seed(seed, "link-negatives"));
  auto sample_neg = [&](int count, std::vector<std::pair<int, int>>& out) {
    while (static_cast<int>(out.size()) < count) {
      int u = static_cast<int>(neg_rng.next_below(n));
      int v = static_cast<int>(neg_rng.next_below(n));
      if (u == v) continue;
      if (!g.directed() && u > v) std::swap(u, v);
      if (g.has_edge(u, v) || (!g.directed() && g.has_edge(v, u))) continue;
      if (!taken.insert({u, v}).second) continue;
      out.emplace_back(u, v);
    }
  };
  sample_neg(counts[0], ls.train_neg);
  sample_neg(counts[1], ls.val_neg);
  sample_neg(counts[2], ls.test_neg);
  return ls;
}

}  // namespace classcontrast
