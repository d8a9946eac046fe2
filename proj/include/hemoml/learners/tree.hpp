#pragma once

// CART-style binary trees. Classification trees (Gini, weighted rows,
// per-node random feature subsets) back the random forest; least-squares
// regression trees on gradient targets back the boosting stages. Splits
// never separate equal feature values and tie-breaks keep the first best
// candidate, so construction is deterministic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "hemoml/learners/common.hpp"
#include "hemoml/matrix.hpp"
#include "hemoml/rng.hpp"

namespace hemoml {

struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0; // leaf payload: class for RF, additive step for GB
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  // random feature subset considered at each internal node (same indexing
  // as nodes; empty entries for leaves); kept for property audits
  std::vector<std::vector<int>> node_feature_subsets;

  double predict(std::span<const double> x) const {
    int at = 0;
    while (nodes[at].feature >= 0)
      at = x[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left
                                                       : nodes[at].right;
    return nodes[at].value;
  }

  int depth() const { return depth_of(0); }

private:
  int depth_of(int at) const {
    if (nodes[at].feature < 0) return 0;
    return 1 + std::max(depth_of(nodes[at].left), depth_of(nodes[at].right));
  }
};

namespace tree_detail {

struct SortedValue {
  double value;
  double weight;
  double target; // class weight share or gradient
};

inline double gini_score(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  return 1.0 - (w0 * w0 + w1 * w1) / (w * w);
}

struct ClassificationBuilder {
  const Matrix& x;
  const std::vector<int>& labels;
  const std::vector<double>& weights; // per dataset row
  int max_depth;
  int n_candidates;
  RngStream* rng;
  DecisionTree* tree;

  int build(const std::vector<std::size_t>& rows, int depth) {
    double w0 = 0.0, w1 = 0.0;
    for (const std::size_t r : rows)
      (labels[r] == kHealthy ? w0 : w1) += weights[r];
    const double w_total = w0 + w1;
    const int node_id = static_cast<int>(tree->nodes.size());
    tree->nodes.emplace_back();
    tree->node_feature_subsets.emplace_back();

    const bool can_split = depth < max_depth && w_total >= 2.0 && w0 > 0.0 &&
                           w1 > 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = 0.0;
    std::vector<int> subset;
    if (can_split) {
      subset = sample_features();
      const double parent_score = w_total * gini_score(w0, w1);
      // impure nodes split on the best candidate even at zero gain; the
      // children may still separate the classes further down
      best_score = parent_score + 1e-9;
      std::vector<SortedValue> column;
      for (const int f : subset) {
        column.clear();
        for (const std::size_t r : rows)
          column.push_back({x.at(r, f), weights[r],
                            labels[r] == kDiseased ? weights[r] : 0.0});
        std::sort(column.begin(), column.end(),
                  [](const SortedValue& a, const SortedValue& b) {
                    return a.value < b.value;
                  });
        double left_w = 0.0, left_w1 = 0.0;
        for (std::size_t k = 0; k + 1 < column.size(); ++k) {
          left_w += column[k].weight;
          left_w1 += column[k].target;
          if (!(column[k].value < column[k + 1].value)) continue;
          const double right_w = w_total - left_w;
          const double right_w1 = w1 - left_w1;
          const double score =
              left_w * gini_score(left_w - left_w1, left_w1) +
              right_w * gini_score(right_w - right_w1, right_w1);
          if (score < best_score) {
            best_score = score;
            best_feature = f;
            best_threshold = 0.5 * (column[k].value + column[k + 1].value);
          }
        }
      }
    }

    if (best_feature < 0) {
      // weighted majority; exact ties resolve to healthy
      tree->nodes[node_id].value = w1 > w0 ? kDiseased : kHealthy;
      return node_id;
    }

    tree->node_feature_subsets[node_id] = std::move(subset);
    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t r : rows)
      (x.at(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    tree->nodes[node_id].feature = best_feature;
    tree->nodes[node_id].threshold = best_threshold;
    tree->nodes[node_id].left = build(left_rows, depth + 1);
    tree->nodes[node_id].right = build(right_rows, depth + 1);
    return node_id;
  }

  std::vector<int> sample_features() {
    const int d = static_cast<int>(x.cols);
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    const int m = std::min(d, n_candidates);
    for (int k = 0; k < m; ++k) {
      const int j =
          k + static_cast<int>(rng->uniform_int(static_cast<std::uint64_t>(d - k)));
      std::swap(all[k], all[j]);
    }
    all.resize(m);
    return all;
  }
};

// Per-feature row orderings computed once per ensemble fit; ties break on
// the (canonical) row index so construction stays permutation-invariant.
struct PresortedFeatures {
  std::vector<std::vector<std::uint32_t>> order; // [feature][rank] -> row

  explicit PresortedFeatures(const Matrix& x) {
    order.assign(x.cols, {});
    for (std::size_t f = 0; f < x.cols; ++f) {
      auto& idx = order[f];
      idx.resize(x.rows);
      std::iota(idx.begin(), idx.end(), 0u);
      std::sort(idx.begin(), idx.end(),
                [&](std::uint32_t a, std::uint32_t b) {
                  const double va = x.at(a, f), vb = x.at(b, f);
                  if (va != vb) return va < vb;
                  return a < b;
                });
    }
  }
};

struct RegressionBuilder {
  const Matrix& x;
  const PresortedFeatures& presorted;
  const std::vector<double>& targets;  // negative gradients
  const std::vector<double>& hessians; // per-row curvature weights
  int max_depth;
  std::vector<double>* importance; // per feature, accumulated SSE decrease
  DecisionTree* tree;
  std::vector<char> in_node;            // scratch membership flags
  std::vector<std::uint32_t> scratch;   // node rows in feature order

  int build(const std::vector<std::size_t>& rows, int depth) {
    double sum = 0.0, sum_sq = 0.0;
    for (const std::size_t r : rows) {
      sum += targets[r];
      sum_sq += targets[r] * targets[r];
    }
    const double n = static_cast<double>(rows.size());
    const double parent_sse = sum_sq - sum * sum / n;

    const int node_id = static_cast<int>(tree->nodes.size());
    tree->nodes.emplace_back();
    tree->node_feature_subsets.emplace_back();

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_improvement = -std::numeric_limits<double>::infinity();
    if (depth < max_depth && rows.size() >= 2 && parent_sse > 1e-12) {
      for (const std::size_t r : rows) in_node[r] = 1;
      for (int f = 0; f < static_cast<int>(x.cols); ++f) {
        scratch.clear();
        for (const std::uint32_t r : presorted.order[f])
          if (in_node[r]) scratch.push_back(r);
        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t k = 0; k + 1 < scratch.size(); ++k) {
          const double t = targets[scratch[k]];
          left_sum += t;
          left_sq += t * t;
          const double vk = x.at(scratch[k], f);
          const double vnext = x.at(scratch[k + 1], f);
          if (!(vk < vnext)) continue;
          const double nl = static_cast<double>(k + 1);
          const double nr = n - nl;
          const double right_sum = sum - left_sum;
          const double right_sq = sum_sq - left_sq;
          const double sse = (left_sq - left_sum * left_sum / nl) +
                             (right_sq - right_sum * right_sum / nr);
          const double improvement = parent_sse - sse;
          if (improvement > best_improvement) {
            best_improvement = improvement;
            best_feature = f;
            best_threshold = 0.5 * (vk + vnext);
          }
        }
      }
      for (const std::size_t r : rows) in_node[r] = 0;
    }

    if (best_feature < 0) {
      double hess = 0.0;
      for (const std::size_t r : rows) hess += hessians[r];
      tree->nodes[node_id].value = sum / std::max(hess, 1e-12);
      return node_id;
    }

    if (importance) (*importance)[best_feature] += std::max(best_improvement, 0.0);
    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t r : rows)
      (x.at(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    tree->nodes[node_id].feature = best_feature;
    tree->nodes[node_id].threshold = best_threshold;
    tree->nodes[node_id].left = build(left_rows, depth + 1);
    tree->nodes[node_id].right = build(right_rows, depth + 1);
    return node_id;
  }
};

} // namespace tree_detail

inline DecisionTree build_classification_tree(const Matrix& x,
                                              const std::vector<int>& labels,
                                              const std::vector<double>& weights,
                                              const std::vector<std::size_t>& rows,
                                              int max_depth, int n_candidates,
                                              RngStream& rng) {
  DecisionTree tree;
  tree_detail::ClassificationBuilder builder{x,       labels, weights, max_depth,
                                             n_candidates, &rng,   &tree};
  builder.build(rows, 0);
  return tree;
}

inline DecisionTree build_regression_tree(
    const Matrix& x, const tree_detail::PresortedFeatures& presorted,
    const std::vector<double>& targets, const std::vector<double>& hessians,
    const std::vector<std::size_t>& rows, int max_depth,
    std::vector<double>* importance) {
  DecisionTree tree;
  tree_detail::RegressionBuilder builder{x,         presorted,  targets,
                                         hessians,  max_depth,  importance,
                                         &tree,     {},         {}};
  builder.in_node.assign(x.rows, 0);
  builder.scratch.reserve(x.rows);
  builder.build(rows, 0);
  return tree;
}

} // namespace hemoml
