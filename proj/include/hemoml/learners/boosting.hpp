#pragma once

// Gradient boosting for binary logistic loss: stagewise depth-capped
// regression trees fitted to the negative gradient, Newton leaf values,
// shrinkage by the learning rate. Fully deterministic given the data.

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hemoml/features.hpp"
#include "hemoml/learners/common.hpp"
#include "hemoml/learners/tree.hpp"

namespace hemoml {

struct GbModel {
  double initial_logit = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  // per-feature split improvement (SSE decrease), accumulated over trees
  std::vector<double> importance_raw;

  double logit(std::span<const double> x) const {
    double f = initial_logit;
    for (const auto& tree : trees) f += learning_rate * tree.predict(x);
    return f;
  }
  double probability(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(-logit(x)));
  }
};

inline GbModel fit_gradient_boosting(const GbParams& params,
                                     const Dataset& data) {
  const std::size_t n = data.rows();
  GbModel model;
  model.learning_rate = params.learning_rate;
  model.n_features = data.cols();
  model.importance_raw.assign(data.cols(), 0.0);

  double p_mean = 0.0;
  for (int y : data.labels) p_mean += y;
  p_mean /= static_cast<double>(n);
  p_mean = std::min(1.0 - 1e-12, std::max(1e-12, p_mean));
  model.initial_logit = std::log(p_mean / (1.0 - p_mean));

  std::vector<double> logits(n, model.initial_logit);
  std::vector<double> residuals(n), hessians(n);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  const tree_detail::PresortedFeatures presorted(data.x);

  model.trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-logits[i]));
      residuals[i] = static_cast<double>(data.labels[i]) - p;
      hessians[i] = std::max(p * (1.0 - p), 1e-12);
    }
    DecisionTree tree = build_regression_tree(
        data.x, presorted, residuals, hessians, rows, params.max_depth,
        &model.importance_raw);
    for (std::size_t i = 0; i < n; ++i)
      logits[i] += params.learning_rate * tree.predict(data.x.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

/// Split-improvement feature importance, normalised to sum 1.
inline std::vector<double> split_improvement_importance(const GbModel& model) {
  double total = 0.0;
  for (double v : model.importance_raw) total += v;
  if (!(total > 0.0))
    throw std::runtime_error(
        "split_improvement_importance: ensemble made no splits");
  std::vector<double> out(model.importance_raw.size());
  for (std::size_t f = 0; f < out.size(); ++f)
    out[f] = model.importance_raw[f] / total;
  return out;
}

/// Sum per-coefficient importances into one share per measurement; a
/// partition of unity over the combination.
inline std::vector<double> aggregate_importance_by_measurement(
    std::span<const double> importance, const MeasurementCombination& combo,
    int truncation = 5) {
  const std::size_t per_series = 2 * static_cast<std::size_t>(truncation) + 1;
  const std::size_t sides = combo.side == Laterality::Bilateral ? 2 : 1;
  const std::size_t block = per_series * sides;
  if (importance.size() != block * combo.included.size())
    throw std::invalid_argument(
        "aggregate_importance_by_measurement: length mismatch");
  std::vector<double> out(combo.included.size(), 0.0);
  for (std::size_t m = 0; m < combo.included.size(); ++m)
    for (std::size_t k = 0; k < block; ++k)
      out[m] += importance[m * block + k];
  return out;
}

} // namespace hemoml
