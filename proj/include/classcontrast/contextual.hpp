/*
 * contextual.hpp -- class landmarks, per-node landmark distance/similarity
 * vectors, and PCA reduction for real-valued features.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "classcontrast/graph.hpp"

namespace classcontrast {

enum class LandmarkKind { Centroid, InclusiveBinary, SelectiveBinary };
enum class Measure { Euclidean, Cosine, CommonCount, Jaccard };

inline bool measure_is_distance(Measure m) { return m == Measure::Euclidean; }

struct Landmark {
  int class_index = 0;
  LandmarkKind kind = LandmarkKind::Centroid;
  Measure measure = Measure::Euclidean;
  Eigen::VectorXd vector;
};

struct ContextualRowSpec {
  LandmarkKind kind = LandmarkKind::Centroid;
  Measure measure = Measure::Euclidean;
  double selective_threshold = 0.10;
};

struct ContextualBlock {
  std::vector<ContextualRowSpec> rows;
  // when raw_features is true the block is a passthrough of (reduced)
  // feature columns rather than landmark rows
  bool raw_features = false;
  Eigen::MatrixXd values;  // node_count x (rows * N), or node_count x pca_dim
};

// Landmarks are fit on Train-role rows only. Centroid = per-class mean;
// InclusiveBinary marks attributes present in any training member;
// SelectiveBinary marks attributes present in at least `threshold` of them.
inline std::vector<Landmark> compute_landmarks(const NodeTable& nt,
                                               const SplitAssignment& split,
                                               LandmarkKind kind,
                                               Measure measure,
                                               double threshold = 0.10) {
  const int n = static_cast<int>(nt.features.cols());
  std::vector<Landmark> landmarks;
  for (int c = 0; c < nt.class_count; ++c) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    int count = 0;
    for (int u = 0; u < nt.node_count(); ++u) {
      if (split.roles[u] != Role::Train || nt.labels[u] != c) continue;
      sum += nt.features.row(u).transpose();
      ++count;
    }
    if (count == 0)
      throw data_error("compute_landmarks: class " + std::to_string(c) +
                       " has no training members");
    Landmark lm;
    lm.class_index = c;
    lm.kind = kind;
    lm.measure = measure;
    switch (kind) {
      case LandmarkKind::Centroid:
        lm.vector = sum / count;
        break;
      case LandmarkKind::InclusiveBinary:
        lm.vector = (sum.array() > 0.0).cast<double>();
        break;
      case LandmarkKind::SelectiveBinary:
        lm.vector = (sum.array() >= threshold * count - 1e-12).cast<double>();
        break;
    }
    landmarks.push_back(std::move(lm));
  }
  return landmarks;
}

// Entry j is d(x, xi_j) for distance measures or sim(x, xi_j) for similarity
// measures. A zero vector under Cosine yields 0 similarity to everything.
inline Eigen::VectorXd contextual_vector(const Eigen::VectorXd& x,
                                         const std::vector<Landmark>& landmarks) {
  if (landmarks.empty()) throw argument_error("contextual_vector: no landmarks");
  const Measure m = landmarks.front().measure;
  for (const auto& lm : landmarks)
    if (lm.measure != m)
      throw argument_error("contextual_vector: landmarks mix measures");
  Eigen::VectorXd out(landmarks.size());
  for (std::size_t j = 0; j < landmarks.size(); ++j) {
    const Eigen::VectorXd& xi = landmarks[j].vector;
    if (xi.size() != x.size())
      throw argument_error("contextual_vector: dimension mismatch");
    switch (m) {
      case Measure::Euclidean:
        out[j] = (x - xi).norm();
        break;
      case Measure::Cosine: {
        double nx = x.norm(), nxi = xi.norm();
        out[j] = (nx == 0.0 || nxi == 0.0) ? 0.0 : x.dot(xi) / (nx * nxi);
        break;
      }
      case Measure::CommonCount: {
        double common = 0;
        for (int i = 0; i < x.size(); ++i)
          if (x[i] != 0.0 && xi[i] != 0.0) common += 1.0;
        out[j] = common;
        break;
      }
      case Measure::Jaccard: {
        double common = 0, uni = 0;
        for (int i = 0; i < x.size(); ++i) {
          bool a = x[i] != 0.0, b = xi[i] != 0.0;
          if (a && b) common += 1.0;
          if (a || b) uni += 1.0;
        }
        out[j] = (uni == 0.0) ? 0.0 : common / uni;
        break;
      }
    }
  }
  return out;
}

inline ContextualBlock build_contextual_block(
    const NodeTable& nt, const SplitAssignment& split,
    const std::vector<ContextualRowSpec>& rows) {
  ContextualBlock block;
  block.rows = rows;
  block.values.resize(nt.node_count(),
                      static_cast<int>(rows.size()) * nt.class_count);
  int off = 0;
  for (const auto& spec : rows) {
    auto landmarks = compute_landmarks(nt, split, spec.kind, spec.measure,
                                       spec.selective_threshold);
    for (int u = 0; u < nt.node_count(); ++u)
      block.values.row(u).segment(off, nt.class_count) =
          contextual_vector(nt.features.row(u).transpose(), landmarks)
              .transpose();
    off += nt.class_count;
  }
  return block;
}

struct PcaModel {
  Eigen::VectorXd mean;        // training mean, length n
  Eigen::MatrixXd components;  // n x target_dim, descending eigenvalue order
  Eigen::VectorXd eigenvalues; // length target_dim
  int zero_padded = 0;         // components beyond numerical rank

  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const {
    return (rows.rowwise() - mean.transpose()) * components;
  }
};

// PCA fit on the given training rows: symmetric eigensolve of the centered
// covariance for n <= 2000, power iteration with deflation above that.
// Components are sign-fixed so their largest-magnitude coordinate is
// positive; columns beyond the numerical rank are zeroed.
inline PcaModel pca_fit(const Eigen::MatrixXd& train_rows, int target_dim) {
  const int n = static_cast<int>(train_rows.cols());
  const int m = static_cast<int>(train_rows.rows());
  if (target_dim < 1 || target_dim > n)
    throw argument_error("pca_fit: target_dim must be in [1, n]");
  if (m < 2) throw argument_error("pca_fit: need at least 2 training rows");

  PcaModel model;
  model.mean = train_rows.colwise().mean();
  Eigen::MatrixXd centered = train_rows.rowwise() - model.mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / (m - 1);

  Eigen::MatrixXd vecs(n, target_dim);
  Eigen::VectorXd vals(target_dim);
  if (n <= 2000) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    // eigenvalues ascending; take the top target_dim in descending order
    for (int i = 0; i < target_dim; ++i) {
      vals[i] = es.eigenvalues()[n - 1 - i];
      vecs.col(i) = es.eigenvectors().col(n - 1 - i);
    }
  } else {
    Eigen::MatrixXd work = cov;
    Rng rng(12345);
    for (int i = 0; i < target_dim; ++i) {
      Eigen::VectorXd v(n);
      for (int j = 0; j < n; ++j) v[j] = rng.next_symmetric(1.0);
      v.normalize();
      double lambda = 0.0;
      for (int iter = 0; iter < 10000; ++iter) {
        Eigen::VectorXd next = work * v;
        double norm = next.norm();
        if (norm < 1e-300) break;
        next /= norm;
        double new_lambda = next.dot(work * next);
        bool converged = std::abs(new_lambda - lambda) <= 1e-10 * std::max(1.0, std::abs(new_lambda));
        v = next;
        lambda = new_lambda;
        if (converged) break;
      }
      vals[i] = lambda;
      vecs.col(i) = v;
      work -= lambda * v * v.transpose();
    }
  }

  const double rank_tol = 1e-10 * std::max(1.0, std::abs(vals[0]));
  for (int i = 0; i < target_dim; ++i) {
    if (vals[i] <= rank_tol) {
      vecs.col(i).setZero();
      vals[i] = 0.0;
      ++model.zero_padded;
      continue;
    }
    int argmax = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(vecs(j, i)) > std::abs(vecs(argmax, i))) argmax = j;
    if (vecs(argmax, i) < 0) vecs.col(i) *= -1.0;
  }
  model.components = std::move(vecs);
  model.eigenvalues = std::move(vals);
  return model;
}

inline ContextualBlock build_pca_block(const NodeTable& nt,
                                       const SplitAssignment& split,
                                       int target_dim) {
  std::vector<int> train_rows;
  for (int u = 0; u < nt.node_count(); ++u)
    if (split.roles[u] == Role::Train) train_rows.push_back(u);
  Eigen::MatrixXd train(train_rows.size(), nt.features.cols());
  for (std::size_t i = 0; i < train_rows.size(); ++i)
    train.row(static_cast<int>(i)) = nt.features.row(train_rows[i]);
  PcaModel model = pca_fit(train, target_dim);
  ContextualBlock block;
  block.raw_features = true;
  block.values = model.transform(nt.features);
  return block;
}

}  // namespace classcontrast
