#pragma once

// Random forest of Gini CART trees. Bootstrap resampling uses per-row
// Poisson(1) counts drawn from streams keyed by (seed, tree, subject id),
// so the ensemble is independent of row presentation order; per-split
// feature subsets of size ceil(sqrt(d)) come from the per-tree stream.

#include <cmath>
#include <span>
#include <vector>

#include "hemoml/learners/common.hpp"
#include "hemoml/learners/tree.hpp"
#include "hemoml/rng.hpp"

namespace hemoml {

struct RfModel {
  std::vector<DecisionTree> trees;
  int max_depth = 0;

  /// Fraction of trees voting diseased.
  double vote_share(std::span<const double> x) const {
    int diseased = 0;
    for (const auto& tree : trees)
      if (tree.predict(x) != 0.0) ++diseased;
    return static_cast<double>(diseased) / static_cast<double>(trees.size());
  }
};

inline RfModel fit_random_forest(const RfParams& params, const Dataset& data,
                                 const RngStream& fit_stream) {
  const std::size_t n = data.rows();
  const int n_candidates = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(data.cols()))));

  RfModel model;
  model.max_depth = params.max_depth;
  model.trees.resize(params.n_trees);
  std::vector<double> weights(n);
  std::vector<std::size_t> rows;
  for (int t = 0; t < params.n_trees; ++t) {
    rows.clear();
    for (std::size_t i = 0; i < n; ++i) {
      RngStream row_stream = fit_stream.child(
          {rng_tag::kTree, static_cast<std::uint64_t>(t), data.subject_ids[i]});
      weights[i] = static_cast<double>(row_stream.poisson_unit());
      if (weights[i] > 0.0) rows.push_back(i);
    }
    if (rows.empty()) { // degenerate bootstrap; fall back to the full sample
      for (std::size_t i = 0; i < n; ++i) {
        weights[i] = 1.0;
        rows.push_back(i);
      }
    }
    RngStream tree_stream =
        fit_stream.child({rng_tag::kNode, static_cast<std::uint64_t>(t)});
    model.trees[t] = build_classification_tree(
        data.x, data.labels, weights, rows, params.max_depth, n_candidates,
        tree_stream);
  }
  return model;
}

} // namespace hemoml
