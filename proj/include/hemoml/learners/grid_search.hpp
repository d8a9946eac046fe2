#pragma once

// Hyperparameter grid search. Cells are evaluated with the caller-supplied
// fold protocol; the argmax by mean F1 wins, first cell on ties. Default
// grids follow the published search ranges for RF, GB and MLP.

#include <functional>
#include <stdexcept>
#include <vector>

#include "hemoml/learners/common.hpp"

namespace hemoml {

struct GridRow {
  Hyperparams hyperparams;
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
};

struct GridResult {
  std::size_t best_index = 0;
  Hyperparams best;
  double best_mean_f1 = 0.0;
  std::vector<GridRow> table;
};

inline GridResult grid_search(
    const std::vector<Hyperparams>& cells,
    const std::function<std::vector<double>(const Hyperparams&)>& eval_folds) {
  if (cells.empty()) throw std::invalid_argument("grid_search: empty grid");
  GridResult result;
  result.table.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    GridRow row;
    row.hyperparams = cells[c];
    row.fold_f1 = eval_folds(cells[c]);
    double mean = 0.0;
    for (double f1 : row.fold_f1) mean += f1;
    row.mean_f1 = row.fold_f1.empty()
                      ? 0.0
                      : mean / static_cast<double>(row.fold_f1.size());
    if (c == 0 || row.mean_f1 > result.best_mean_f1) {
      result.best_index = c;
      result.best = cells[c];
      result.best_mean_f1 = row.mean_f1;
    }
    result.table.push_back(std::move(row));
  }
  return result;
}

/// Trees 10..400 step 10, depth 20..200 step 10 (760 cells).
inline std::vector<Hyperparams> default_rf_grid(const Hyperparams& base) {
  std::vector<Hyperparams> cells;
  for (int trees = 10; trees <= 400; trees += 10)
    for (int depth = 20; depth <= 200; depth += 10) {
      Hyperparams hp = base;
      hp.method = Method::RF;
      hp.rf.n_trees = trees;
      hp.rf.max_depth = depth;
      cells.push_back(hp);
    }
  return cells;
}

/// Trees 10..100 step 10, depth 2..20 step 1 (190 cells).
inline std::vector<Hyperparams> default_gb_grid(const Hyperparams& base) {
  std::vector<Hyperparams> cells;
  for (int trees = 10; trees <= 100; trees += 10)
    for (int depth = 2; depth <= 20; ++depth) {
      Hyperparams hp = base;
      hp.method = Method::GB;
      hp.gb.n_trees = trees;
      hp.gb.max_depth = depth;
      cells.push_back(hp);
    }
  return cells;
}

/// Neurons 10..200 step 10, hidden layers 1..6 (120 cells).
inline std::vector<Hyperparams> default_mlp_grid(const Hyperparams& base) {
  std::vector<Hyperparams> cells;
  for (int neurons = 10; neurons <= 200; neurons += 10)
    for (int layers = 1; layers <= 6; ++layers) {
      Hyperparams hp = base;
      hp.method = Method::MLP;
      hp.mlp.neurons_per_layer = neurons;
      hp.mlp.hidden_layers = layers;
      cells.push_back(hp);
    }
  return cells;
}

inline std::vector<Hyperparams> default_grid(Method method,
                                             const Hyperparams& base) {
  switch (method) {
    case Method::RF: return default_rf_grid(base);
    case Method::GB: return default_gb_grid(base);
    case Method::MLP: return default_mlp_grid(base);
    default:
      throw std::invalid_argument(
          std::string(to_string(method)) +
          " has a problem-independent architecture; no grid is defined");
  }
}

} // namespace hemoml
