#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hemoml/learners/common.hpp"

namespace hemoml {

/// Gaussian naive Bayes: per-class, per-feature means and variances plus
/// log class priors. Variances are floored so constant features cannot
/// produce infinities.
struct NbModel {
  std::vector<double> log_prior;         // [2]
  std::vector<std::vector<double>> mean; // [2][d]
  std::vector<std::vector<double>> var;  // [2][d]

  std::size_t n_features() const { return mean.empty() ? 0 : mean[0].size(); }

  double log_joint(std::span<const double> x, int cls) const {
    constexpr double log_two_pi = 1.8378770664093454836;
    double lj = log_prior[cls];
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double d = x[f] - mean[cls][f];
      lj -= 0.5 * (log_two_pi + std::log(var[cls][f]) + d * d / var[cls][f]);
    }
    return lj;
  }

  /// Posterior probability of the diseased class.
  double posterior_diseased(std::span<const double> x) const {
    const double l0 = log_joint(x, kHealthy);
    const double l1 = log_joint(x, kDiseased);
    const double m = std::max(l0, l1);
    const double e0 = std::exp(l0 - m);
    const double e1 = std::exp(l1 - m);
    return e1 / (e0 + e1);
  }
};

inline NbModel fit_naive_bayes(const NbParams& params, const Dataset& data) {
  const std::size_t d = data.cols();
  const std::size_t n = data.rows();

  NbModel model;
  model.log_prior.assign(2, 0.0);
  model.mean.assign(2, std::vector<double>(d, 0.0));
  model.var.assign(2, std::vector<double>(d, 0.0));

  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int y = data.labels[i];
    ++count[y];
    for (std::size_t f = 0; f < d; ++f) model.mean[y][f] += data.x.at(i, f);
  }
  for (int c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(static_cast<double>(count[c]) /
                                  static_cast<double>(n));
    for (std::size_t f = 0; f < d; ++f)
      model.mean[c][f] /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int y = data.labels[i];
    for (std::size_t f = 0; f < d; ++f) {
      const double dv = data.x.at(i, f) - model.mean[y][f];
      model.var[y][f] += dv * dv;
    }
  }
  double max_pooled_var = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    double pooled_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) pooled_mean += data.x.at(i, f);
    pooled_mean /= static_cast<double>(n);
    double pooled = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = data.x.at(i, f) - pooled_mean;
      pooled += dv * dv;
    }
    max_pooled_var = std::max(max_pooled_var, pooled / static_cast<double>(n));
  }
  double floor = params.variance_floor_rel * max_pooled_var;
  floor = std::max(floor, params.variance_floor_abs);
  floor = std::max(floor, 1e-300); // keep logs finite on all-constant data
  for (int c = 0; c < 2; ++c)
    for (std::size_t f = 0; f < d; ++f) {
      model.var[c][f] /= static_cast<double>(count[c]);
      model.var[c][f] = std::max(model.var[c][f], floor);
    }
  return model;
}

} // namespace hemoml
