#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoml/matrix.hpp"

namespace hemoml {

/// Binary labels: class 0 = healthy (C1), class 1 = diseased (C2, the
/// positive class everywhere).
inline constexpr int kHealthy = 0;
inline constexpr int kDiseased = 1;

struct Dataset {
  Matrix x;
  std::vector<int> labels;
  std::vector<std::uint64_t> subject_ids;

  std::size_t rows() const { return x.rows; }
  std::size_t cols() const { return x.cols; }

  void validate() const {
    if (x.rows == 0 || x.cols == 0)
      throw std::invalid_argument("Dataset: empty matrix");
    if (labels.size() != x.rows || subject_ids.size() != x.rows)
      throw std::invalid_argument("Dataset: row/label/id count mismatch");
    if (!x.all_finite())
      throw std::invalid_argument("Dataset: non-finite feature value");
    for (int y : labels)
      if (y != kHealthy && y != kDiseased)
        throw std::invalid_argument("Dataset: labels must be 0 or 1");
  }

  bool has_both_classes() const {
    bool c0 = false, c1 = false;
    for (int y : labels) (y == kHealthy ? c0 : c1) = true;
    return c0 && c1;
  }
};

/// Rows sorted by subject id (original index breaks ties). Every fitter
/// consumes rows in this order, which makes fitted models independent of the
/// order rows were presented in.
inline std::vector<std::size_t> canonical_row_order(const Dataset& data) {
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (data.subject_ids[a] != data.subject_ids[b])
      return data.subject_ids[a] < data.subject_ids[b];
    return a < b;
  });
  return order;
}

inline Dataset reorder_rows(const Dataset& data,
                            const std::vector<std::size_t>& order) {
  Dataset out;
  out.x = Matrix(data.rows(), data.cols());
  out.labels.resize(data.rows());
  out.subject_ids.resize(data.rows());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = data.x.row(order[i]);
    std::copy(src.begin(), src.end(), out.x.row(i).begin());
    out.labels[i] = data.labels[order[i]];
    out.subject_ids[i] = data.subject_ids[order[i]];
  }
  return out;
}

enum class Method { NB, LR, SVM, MLP, RF, GB };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::NB: return "NB";
    case Method::LR: return "LR";
    case Method::SVM: return "SVM";
    case Method::MLP: return "MLP";
    case Method::RF: return "RF";
    case Method::GB: return "GB";
  }
  return "?";
}

inline Method method_from_string(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), ::toupper);
  if (s == "NB") return Method::NB;
  if (s == "LR") return Method::LR;
  if (s == "SVM") return Method::SVM;
  if (s == "MLP") return Method::MLP;
  if (s == "RF") return Method::RF;
  if (s == "GB") return Method::GB;
  throw std::invalid_argument("unknown method: " + s);
}

struct NbParams {
  double variance_floor_rel = 1e-9; // times the largest pooled feature variance
  double variance_floor_abs = 0.0;  // absolute override, 0 = unused
};

struct LrParams {
  double l2_strength = 1.0;
  int max_iterations = 100;
  double gradient_tolerance = 1e-6;
};

struct SvmParams {
  double c = 1.0;
  double gamma = 0.0; // 0 = 1 / (d * var(X))
  double kkt_tolerance = 1e-3;
  long max_iterations = 0; // 0 = scaled with n
};

struct MlpParams {
  int neurons_per_layer = 20;
  int hidden_layers = 2; // all hidden layers share the same width
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
};

struct RfParams {
  int n_trees = 100;
  int max_depth = 20;
};

struct GbParams {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
};

struct Hyperparams {
  Method method = Method::GB;
  NbParams nb;
  LrParams lr;
  SvmParams svm;
  MlpParams mlp;
  RfParams rf;
  GbParams gb;

  static Hyperparams make(Method m) {
    Hyperparams hp;
    hp.method = m;
    return hp;
  }

  void validate() const {
    switch (method) {
      case Method::NB:
        if (nb.variance_floor_rel < 0.0 || nb.variance_floor_abs < 0.0)
          throw std::invalid_argument("NB: negative variance floor");
        break;
      case Method::LR:
        if (lr.l2_strength < 0.0 || lr.max_iterations < 1)
          throw std::invalid_argument("LR: bad parameters");
        break;
      case Method::SVM:
        if (!(svm.c > 0.0) || svm.gamma < 0.0 || !(svm.kkt_tolerance > 0.0))
          throw std::invalid_argument("SVM: bad parameters");
        break;
      case Method::MLP:
        if (mlp.neurons_per_layer < 1 || mlp.hidden_layers < 1 ||
            mlp.epochs < 1 || mlp.batch_size < 1 || !(mlp.learning_rate > 0.0))
          throw std::invalid_argument("MLP: bad parameters");
        break;
      case Method::RF:
        if (rf.n_trees < 1 || rf.max_depth < 0)
          throw std::invalid_argument("RF: bad parameters");
        break;
      case Method::GB:
        if (gb.n_trees < 1 || gb.max_depth < 0 || !(gb.learning_rate > 0.0))
          throw std::invalid_argument("GB: bad parameters");
        break;
    }
  }
};

} // namespace hemoml
