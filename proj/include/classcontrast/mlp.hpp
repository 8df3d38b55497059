/*
 * mlp.hpp -- from-scratch fully-connected network with seeded deterministic
 * Adam training, softmax and logistic heads, rank-based AUC, and a finite-
 * difference gradient checker.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "classcontrast/common.hpp"
#include "classcontrast/dataset_io.hpp"
#include "classcontrast/graph.hpp"

#include "json.hpp"

namespace classcontrast {

enum class OutputKind { Softmax, Logistic };

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 500;
  double l2 = 1e-5;
  int batch_size = 0;  // 0 = full batch
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {700};

  void validate() const {
    if (learning_rate <= 0) throw argument_error("TrainConfig: learning rate must be > 0");
    if (epochs < 1) throw argument_error("TrainConfig: epochs must be >= 1");
  }
};

class MlpModel {
 public:
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: in x out
  std::vector<Eigen::VectorXd> biases;
  OutputKind output = OutputKind::Softmax;

  MlpModel() = default;

  // Glorot-style symmetric uniform init scaled by fan-in + fan-out.
  MlpModel(int input_dim, const std::vector<int>& hidden, int output_dim,
           OutputKind out_kind, std::uint64_t seed)
      : output(out_kind) {
    std::vector<int> sizes;
    sizes.push_back(input_dim);
    for (int h : hidden) sizes.push_back(h);
    sizes.push_back(output_dim);
    Rng rng(derive_seed(seed, "mlp-init"));
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      double range = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
      Eigen::MatrixXd w(sizes[l], sizes[l + 1]);
      for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.next_symmetric(range);
      weights.push_back(std::move(w));
      biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
    }
  }

  int input_dim() const { return static_cast<int>(weights.front().rows()); }
  int output_dim() const { return static_cast<int>(weights.back().cols()); }
  std::size_t layer_count() const { return weights.size(); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
      n += weights[l].size() + biases[l].size();
    return n;
  }

  bool finite() const {
    for (std::size_t l = 0; l < weights.size(); ++l)
      if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
    return true;
  }

  // hidden activations are rectified; the head applies row softmax or
  // elementwise logistic
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x,
                          std::vector<Eigen::MatrixXd>* activations = nullptr) const {
    Eigen::MatrixXd a = x;
    if (activations) activations->push_back(a);
    for (std::size_t l = 0; l < weights.size(); ++l) {
      Eigen::MatrixXd z =
          (a * weights[l]).rowwise() + biases[l].transpose();
      if (l + 1 < weights.size())
        a = z.cwiseMax(0.0);
      else if (output == OutputKind::Softmax) {
        Eigen::VectorXd rowmax = z.rowwise().maxCoeff();
        Eigen::MatrixXd e = (z.colwise() - rowmax).array().exp();
        a = e.array().colwise() / e.rowwise().sum().array();
      } else {
        a = (1.0 / (1.0 + (-z.array()).exp())).matrix();
      }
      if (activations) activations->push_back(a);
    }
    return a;
  }
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Mean cross-entropy (softmax head) or mean binary cross-entropy (logistic
// head) plus 0.5 * l2 * sum of squared weights; biases unregularized.
inline double mlp_loss_and_gradients(const MlpModel& model,
                                     const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& y, double l2,
                                     Gradients* grads) {
  std::vector<Eigen::MatrixXd> acts;
  Eigen::MatrixXd p = model.forward(x, &acts);
  const double m = static_cast<double>(x.rows());
  constexpr double kTiny = 1e-12;

  double loss = 0.0;
  if (model.output == OutputKind::Softmax) {
    loss = -((y.array() * (p.array() + kTiny).log()).rowwise().sum()).mean();
  } else {
    loss = -(y.array() * (p.array() + kTiny).log() +
             (1.0 - y.array()) * (1.0 - p.array() + kTiny).log())
                .mean();
  }
  for (const auto& w : model.weights) loss += 0.5 * l2 * w.squaredNorm();

  if (grads) {
    grads->weights.resize(model.layer_count());
    grads->biases.resize(model.layer_count());
    // softmax+CE and sigmoid+BCE share the residual form (p - y) / m
    Eigen::MatrixXd delta = (p - y) / m;
    for (int l = static_cast<int>(model.layer_count()) - 1; l >= 0; --l) {
      grads->weights[l] = acts[l].transpose() * delta + l2 * model.weights[l];
      grads->biases[l] = delta.colwise().sum().transpose();
      if (l > 0) {
        delta = (delta * model.weights[l].transpose()).array() *
                (acts[l].array() > 0.0).cast<double>();
      }
    }
  }
  return loss;
}

class AdamOptimizer {
 public:
  AdamOptimizer(const MlpModel& model, const TrainConfig& cfg) : cfg_(cfg) {
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      mw_.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(),
                                          model.weights[l].cols()));
      vw_.push_back(mw_.back());
      mb_.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
      vb_.push_back(mb_.back());
    }
  }

  void step(MlpModel& model, const Gradients& g) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      mw_[l] = cfg_.beta1 * mw_[l] + (1 - cfg_.beta1) * g.weights[l];
      vw_[l] = cfg_.beta2 * vw_[l] +
               (1 - cfg_.beta2) * g.weights[l].array().square().matrix();
      model.weights[l].array() -=
          cfg_.learning_rate * (mw_[l].array() / bc1) /
          ((vw_[l].array() / bc2).sqrt() + cfg_.epsilon);
      mb_[l] = cfg_.beta1 * mb_[l] + (1 - cfg_.beta1) * g.biases[l];
      vb_[l] = cfg_.beta2 * vb_[l] +
               (1 - cfg_.beta2) * g.biases[l].array().square().matrix();
      model.biases[l].array() -=
          cfg_.learning_rate * (mb_[l].array() / bc1) /
          ((vb_[l].array() / bc2).sqrt() + cfg_.epsilon);
    }
  }

 private:
  TrainConfig cfg_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

struct EpochRecord {
  double train_loss = 0.0;
  double val_metric = 0.0;
};

struct TrainResult {
  MlpModel model;  // snapshot from the best-validation epoch
  std::vector<EpochRecord> history;
  double best_val_metric = 0.0;
  int best_epoch = -1;
};

inline Eigen::MatrixXd one_hot(const std::vector<int>& labels, int class_count) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(labels.size(), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<int>(i), labels[i]) = 1.0;
  return y;
}

struct Prediction {
  std::vector<int> classes;
  Eigen::MatrixXd probabilities;
};

// argmax with lowest-index tie-break
inline Prediction predict_classes(const MlpModel& model,
                                  const Eigen::MatrixXd& x) {
  Prediction pred;
  pred.probabilities = model.forward(x);
  pred.classes.resize(x.rows());
  for (int i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < pred.probabilities.cols(); ++j)
      if (pred.probabilities(i, j) > pred.probabilities(i, best)) best = j;
    pred.classes[i] = best;
  }
  return pred;
}

inline void check_finite_or_abort(const MlpModel& model, double loss, int epoch) {
  if (std::isfinite(loss) && model.finite()) return;
  std::string diag = "non-finite state at epoch " + std::to_string(epoch) +
                     "; loss=" + std::to_string(loss);
  for (std::size_t l = 0; l < model.layer_count(); ++l)
    diag += "; |W" + std::to_string(l) + "|=" +
            std::to_string(model.weights[l].norm());
  throw data_error("mlp training aborted: " + diag);
}

// Full-batch training on Train rows; Val rows pick the snapshot by accuracy.
inline TrainResult train_node_classifier(const Eigen::MatrixXd& embeddings,
                                         const std::vector<int>& labels,
                                         const SplitAssignment& split,
                                         int class_count,
                                         const TrainConfig& cfg) {
  cfg.validate();
  if (embeddings.rows() != static_cast<int>(labels.size()))
    throw argument_error("train_node_classifier: embedding row count != node count");

  std::vector<int> train_idx = split.nodes_with(Role::Train);
  std::vector<int> val_idx = split.nodes_with(Role::Val);
  Eigen::MatrixXd x_train(train_idx.size(), embeddings.cols());
  std::vector<int> y_train_labels(train_idx.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    x_train.row(static_cast<int>(i)) = embeddings.row(train_idx[i]);
    y_train_labels[i] = labels[train_idx[i]];
  }
  Eigen::MatrixXd y_train = one_hot(y_train_labels, class_count);
  Eigen::MatrixXd x_val(val_idx.size(), embeddings.cols());
  for (std::size_t i = 0; i < val_idx.size(); ++i)
    x_val.row(static_cast<int>(i)) = embeddings.row(val_idx[i]);

  TrainResult result;
  MlpModel model(static_cast<int>(embeddings.cols()), cfg.hidden, class_count,
                 OutputKind::Softmax, cfg.seed);
  result.model = model;
  AdamOptimizer opt(model, cfg);
  result.best_val_metric = -1.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Gradients grads;
    double loss = mlp_loss_and_gradients(model, x_train, y_train, cfg.l2, &grads);
    check_finite_or_abort(model, loss, epoch);
    opt.step(model, grads);

    double val_acc = 1.0;
    if (!val_idx.empty()) {
      Prediction p = predict_classes(model, x_val);
      int correct = 0;
      for (std::size_t i = 0; i < val_idx.size(); ++i)
        if (p.classes[i] == labels[val_idx[i]]) ++correct;
      val_acc = static_cast<double>(correct) / val_idx.size();
    }
    result.history.push_back({loss, val_acc});
    if (val_acc > result.best_val_metric) {
      result.best_val_metric = val_acc;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

// Rank-based (Mann-Whitney) AUC with half credit for ties.
inline double auc(const std::vector<double>& scores,
                  const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw argument_error("auc: size mismatch");
  std::size_t pos = 0, neg = 0;
  for (int l : labels) (l ? pos : neg)++;
  if (pos == 0 || neg == 0)
    throw argument_error("auc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    i = j;
  }
  return (rank_sum_pos - 0.5 * pos * (pos + 1)) /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

// L2-normalize each row; zero rows stay zero.
inline Eigen::MatrixXd l2_normalize_rows(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (int i = 0; i < out.rows(); ++i) {
    double n = out.row(i).norm();
    if (n > 0) out.row(i) /= n;
  }
  return out;
}

inline Eigen::MatrixXd pair_features(const Eigen::MatrixXd& normalized,
                                     const std::vector<std::pair<int, int>>& pairs) {
  Eigen::MatrixXd x(pairs.size(), normalized.cols());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    x.row(static_cast<int>(i)) =
        normalized.row(pairs[i].first).cwiseProduct(normalized.row(pairs[i].second));
  return x;
}

inline std::vector<double> link_scores(const MlpModel& model,
                                       const Eigen::MatrixXd& normalized,
                                       const std::vector<std::pair<int, int>>& pairs) {
  Eigen::MatrixXd p = model.forward(pair_features(normalized, pairs));
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = p(static_cast<int>(i), 0);
  return out;
}

// Pair (u,v) feeds the elementwise product of the L2-normalized node
// embeddings into a logistic-head MLP; mini-batch Adam, best-validation-AUC
// snapshot.
inline TrainResult train_link_predictor(const Eigen::MatrixXd& embeddings,
                                        const LinkSplit& ls,
                                        const TrainConfig& cfg) {
  cfg.validate();
  Eigen::MatrixXd normalized = l2_normalize_rows(embeddings);

  std::vector<std::pair<int, int>> train_pairs = ls.train_pos;
  std::vector<int> train_labels(ls.train_pos.size(), 1);
  train_pairs.insert(train_pairs.end(), ls.train_neg.begin(), ls.train_neg.end());
  train_labels.insert(train_labels.end(), ls.train_neg.size(), 0);
  Eigen::MatrixXd x_all = pair_features(normalized, train_pairs);

  std::vector<std::pair<int, int>> val_pairs = ls.val_pos;
  std::vector<int> val_labels(ls.val_pos.size(), 1);
  val_pairs.insert(val_pairs.end(), ls.val_neg.begin(), ls.val_neg.end());
  val_labels.insert(val_labels.end(), ls.val_neg.size(), 0);

  TrainResult result;
  MlpModel model(static_cast<int>(embeddings.cols()), cfg.hidden, 1,
                 OutputKind::Logistic, cfg.seed);
  result.model = model;
  AdamOptimizer opt(model, cfg);
  result.best_val_metric = -1.0;

  const int m = static_cast<int>(train_pairs.size());
  const int batch = cfg.batch_size > 0 ? cfg.batch_size : m;
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  Rng shuffle_rng(derive_seed(cfg.seed, "link-batches"));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (int start = 0; start < m; start += batch) {
      int count = std::min(batch, m - start);
      Eigen::MatrixXd xb(count, x_all.cols());
      Eigen::MatrixXd yb(count, 1);
      for (int i = 0; i < count; ++i) {
        xb.row(i) = x_all.row(order[start + i]);
        yb(i, 0) = train_labels[order[start + i]];
      }
      Gradients grads;
      double loss = mlp_loss_and_gradients(model, xb, yb, cfg.l2, &grads);
      check_finite_or_abort(model, loss, epoch);
      opt.step(model, grads);
      epoch_loss += loss;
      ++batches;
    }
    double val_auc = 0.5;
    if (!val_pairs.empty()) {
      val_auc = auc(link_scores(model, normalized, val_pairs), val_labels);
    }
    result.history.push_back({epoch_loss / std::max(1, batches), val_auc});
    if (val_auc > result.best_val_metric) {
      result.best_val_metric = val_auc;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

// Central finite differences (step 1e-5) against the analytic gradient;
// returns the max relative error over all parameters.
inline double gradient_check(MlpModel& model, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& y, double l2 = 1e-5) {
  if (model.param_count() > 10000)
    throw argument_error("gradient_check: model too large (> 1e4 params)");
  Gradients analytic;
  mlp_loss_and_gradients(model, x, y, l2, &analytic);
  constexpr double h = 1e-5;
  double max_rel = 0.0;
  auto probe = [&](double& param, double ga) {
    const double saved = param;
    param = saved + h;
    double lp = mlp_loss_and_gradients(model, x, y, l2, nullptr);
    param = saved - h;
    double lm = mlp_loss_and_gradients(model, x, y, l2, nullptr);
    param = saved;
    double gn = (lp - lm) / (2 * h);
    double rel = std::abs(ga - gn) / std::max(1e-8, std::abs(ga) + std::abs(gn));
    if (rel > max_rel) max_rel = rel;
  };
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    for (int i = 0; i < model.weights[l].rows(); ++i)
      for (int j = 0; j < model.weights[l].cols(); ++j)
        probe(model.weights[l](i, j), analytic.weights[l](i, j));
    for (int i = 0; i < model.biases[l].size(); ++i)
      probe(model.biases[l][i], analytic.biases[l][i]);
  }
  return max_rel;
}

// Checkpoint format: one-line JSON header with shapes and head kind,
// followed by all parameters as little-endian 64-bit floats.
inline void save_model(const MlpModel& model, const std::string& path) {
  nlohmann::json header;
  header["output"] = model.output == OutputKind::Softmax ? "softmax" : "logistic";
  std::vector<std::vector<long>> shapes;
  for (const auto& w : model.weights)
    shapes.push_back({static_cast<long>(w.rows()), static_cast<long>(w.cols())});
  header["weight_shapes"] = shapes;
  header["param_count"] = model.param_count();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot write " + path);
  f << header.dump() << "\n";
  auto write_block = [&](const double* data, std::size_t count) {
    f.write(reinterpret_cast<const char*>(data), count * sizeof(double));
  };
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    write_block(model.weights[l].data(), model.weights[l].size());
    write_block(model.biases[l].data(), model.biases[l].size());
  }
}

inline MlpModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json header = nlohmann::json::parse(line);
  MlpModel model;
  model.output = header.at("output") == "softmax" ? OutputKind::Softmax
                                                  : OutputKind::Logistic;
  for (const auto& shape : header.at("weight_shapes")) {
    long rows = shape[0], cols = shape[1];
    Eigen::MatrixXd w(rows, cols);
    f.read(reinterpret_cast<char*>(w.data()), rows * cols * sizeof(double));
    Eigen::VectorXd b(cols);
    f.read(reinterpret_cast<char*>(b.data()), cols * sizeof(double));
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  if (!f) throw data_error("truncated checkpoint: " + path);
  return model;
}

}  // namespace classcontrast
