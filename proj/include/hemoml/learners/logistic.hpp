#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hemoml/learners/common.hpp"
#include "hemoml/matrix.hpp"

namespace hemoml {

struct LrModel {
  std::vector<double> weights;
  double bias = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;

  double decision(std::span<const double> x) const {
    double z = bias;
    for (std::size_t f = 0; f < x.size(); ++f) z += weights[f] * x[f];
    return z;
  }
};

/// L2-regularised logistic loss and its gradient at wb = (w_1..w_d, bias).
/// The bias is not penalised. Exposed for the finite-difference checks.
inline double logistic_loss_and_gradient(std::span<const double> wb,
                                         const Matrix& x,
                                         const std::vector<int>& labels,
                                         double l2_strength,
                                         std::span<double> grad_out) {
  const std::size_t d = x.cols;
  const std::size_t n = x.rows;
  double loss = 0.0;
  for (double& g : grad_out) g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = wb[d];
    const auto row = x.row(i);
    for (std::size_t f = 0; f < d; ++f) z += wb[f] * row[f];
    const double ysign = labels[i] == kDiseased ? 1.0 : -1.0;
    const double m = ysign * z;
    // log(1 + exp(-m)) without overflow
    loss += m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    const double sig = 1.0 / (1.0 + std::exp(m)); // d loss / d m * (-1)
    const double coeff = -ysign * sig;
    for (std::size_t f = 0; f < d; ++f) grad_out[f] += coeff * row[f];
    grad_out[d] += coeff;
  }
  for (std::size_t f = 0; f < d; ++f) {
    loss += 0.5 * l2_strength * wb[f] * wb[f];
    grad_out[f] += l2_strength * wb[f];
  }
  return loss;
}

/// Damped Newton iteration from w = 0; stops at gradient L2 norm below the
/// tolerance or the iteration cap (non-convergence is flagged, not silent).
inline LrModel fit_logistic(const LrParams& params, const Dataset& data) {
  const std::size_t d = data.cols();
  const std::size_t n = data.rows();

  std::vector<double> wb(d + 1, 0.0);
  std::vector<double> grad(d + 1, 0.0);
  LrModel model;

  double loss = logistic_loss_and_gradient(wb, data.x, data.labels,
                                           params.l2_strength, grad);
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    model.final_gradient_norm = gnorm;
    model.iterations = iter;
    if (gnorm <= params.gradient_tolerance) {
      model.converged = true;
      break;
    }

    // Hessian: X^T S X augmented with the bias column, ridge on weights only
    const std::size_t m = d + 1;
    std::vector<double> hess(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double z = wb[d];
      const auto row = data.x.row(i);
      for (std::size_t f = 0; f < d; ++f) z += wb[f] * row[f];
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double s = std::max(p * (1.0 - p), 1e-12);
      for (std::size_t a = 0; a < m; ++a) {
        const double xa = a < d ? row[a] : 1.0;
        for (std::size_t b = a; b < m; ++b) {
          const double xb = b < d ? row[b] : 1.0;
          hess[a * m + b] += s * xa * xb;
        }
      }
    }
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < a; ++b) hess[a * m + b] = hess[b * m + a];
    for (std::size_t f = 0; f < d; ++f) hess[f * m + f] += params.l2_strength;
    for (std::size_t a = 0; a < m; ++a) hess[a * m + a] += 1e-10;

    std::vector<double> neg_grad(grad.begin(), grad.end());
    for (double& g : neg_grad) g = -g;
    std::vector<double> step = solve_spd(hess, neg_grad, m);

    // backtracking line search on the regularised loss
    double t = 1.0;
    std::vector<double> trial(m);
    std::vector<double> trial_grad(m);
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t a = 0; a < m; ++a) trial[a] = wb[a] + t * step[a];
      const double trial_loss = logistic_loss_and_gradient(
          trial, data.x, data.labels, params.l2_strength, trial_grad);
      if (trial_loss <= loss) {
        wb.swap(trial);
        grad.swap(trial_grad);
        loss = trial_loss;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break; // numerically stuck; flagged below
  }
  if (!model.converged) {
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    model.final_gradient_norm = std::sqrt(gnorm);
    model.converged = model.final_gradient_norm <= params.gradient_tolerance;
  }

  model.weights.assign(wb.begin(), wb.begin() + d);
  model.bias = wb[d];
  return model;
}

} // namespace hemoml
