#pragma once

// Soft-margin SVM with RBF kernel, trained by SMO-style pairwise
// optimisation on the dual with maximal-violating-pair working set
// selection. Stops when the KKT violation gap drops below the tolerance.

#include <cmath>
#include <span>
#include <vector>

#include "hemoml/learners/common.hpp"
#include "hemoml/matrix.hpp"

namespace hemoml {

struct SvmModel {
  Matrix support_vectors;
  std::vector<double> coefficients; // alpha_i * y_i per support vector
  double bias = 0.0;
  double gamma = 0.0;
  bool converged = false;
  long iterations = 0;

  double decision(std::span<const double> x) const {
    double f = bias;
    for (std::size_t s = 0; s < support_vectors.rows; ++s) {
      const auto sv = support_vectors.row(s);
      double dist2 = 0.0;
      for (std::size_t k = 0; k < sv.size(); ++k) {
        const double d = sv[k] - x[k];
        dist2 += d * d;
      }
      f += coefficients[s] * std::exp(-gamma * dist2);
    }
    return f;
  }
};

inline double rbf_kernel(std::span<const double> a, std::span<const double> b,
                         double gamma) {
  double dist2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    dist2 += d * d;
  }
  return std::exp(-gamma * dist2);
}

/// sklearn-style "scale" default: 1 / (d * var of all matrix entries).
inline double default_rbf_gamma(const Matrix& x) {
  double mean = 0.0;
  for (double v : x.values) mean += v;
  mean /= static_cast<double>(x.values.size());
  double var = 0.0;
  for (double v : x.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.values.size());
  if (!(var > 0.0)) return 1.0 / static_cast<double>(x.cols);
  return 1.0 / (static_cast<double>(x.cols) * var);
}

inline SvmModel fit_svm(const SvmParams& params, const Dataset& data) {
  const std::size_t n = data.rows();
  const double c_box = params.c;
  const double gamma =
      params.gamma > 0.0 ? params.gamma : default_rbf_gamma(data.x);

  std::vector<double> ysign(n);
  for (std::size_t i = 0; i < n; ++i)
    ysign[i] = data.labels[i] == kDiseased ? 1.0 : -1.0;

  // full kernel matrix for desk-scale problems, per-row evaluation beyond
  const bool cache_full = n <= 4096;
  Matrix kernel_cache;
  if (cache_full) {
    kernel_cache = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      kernel_cache.at(i, i) = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double k = rbf_kernel(data.x.row(i), data.x.row(j), gamma);
        kernel_cache.at(i, j) = k;
        kernel_cache.at(j, i) = k;
      }
    }
  }
  std::vector<double> row_i(n), row_j(n);
  auto fill_row = [&](std::size_t t, std::vector<double>& row) {
    if (cache_full) {
      const auto src = kernel_cache.row(t);
      std::copy(src.begin(), src.end(), row.begin());
    } else {
      for (std::size_t s = 0; s < n; ++s)
        row[s] = rbf_kernel(data.x.row(t), data.x.row(s), gamma);
    }
  };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0); // d(dual)/d(alpha_t) at alpha = 0

  const long max_iter =
      params.max_iterations > 0
          ? params.max_iterations
          : std::min<long>(2000000, std::max<long>(200 * static_cast<long>(n), 20000));

  SvmModel model;
  model.gamma = gamma;
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    // v_t = -y_t grad_t; maximal violating pair over the feasible directions
    double v_up = -1e300, v_low = 1e300;
    std::ptrdiff_t i = -1, j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -ysign[t] * grad[t];
      const bool in_up = (ysign[t] > 0.0 && alpha[t] < c_box) ||
                         (ysign[t] < 0.0 && alpha[t] > 0.0);
      const bool in_low = (ysign[t] < 0.0 && alpha[t] < c_box) ||
                          (ysign[t] > 0.0 && alpha[t] > 0.0);
      if (in_up && v > v_up) {
        v_up = v;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low && v < v_low) {
        v_low = v;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0 || j < 0 || v_up - v_low <= params.kkt_tolerance) {
      model.converged = true;
      break;
    }

    fill_row(static_cast<std::size_t>(i), row_i);
    fill_row(static_cast<std::size_t>(j), row_j);
    const double quad = row_i[i] + row_j[j] - 2.0 * row_i[j];
    double step = (v_up - v_low) / std::max(quad, 1e-12);
    const double head_i = ysign[i] > 0.0 ? c_box - alpha[i] : alpha[i];
    const double head_j = ysign[j] > 0.0 ? alpha[j] : c_box - alpha[j];
    step = std::min(step, std::min(head_i, head_j));
    if (!(step > 0.0)) {
      model.converged = true; // no feasible progress left
      break;
    }

    alpha[i] = std::min(c_box, std::max(0.0, alpha[i] + ysign[i] * step));
    alpha[j] = std::min(c_box, std::max(0.0, alpha[j] - ysign[j] * step));
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += ysign[t] * step * (row_i[t] - row_j[t]);
  }
  model.iterations = iter;

  // bias from the free support vectors (v_t equals b for each of them)
  double b_sum = 0.0;
  std::size_t b_count = 0;
  const double edge = 1e-8 * c_box;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > edge && alpha[t] < c_box - edge) {
      b_sum += -ysign[t] * grad[t];
      ++b_count;
    }
  }
  if (b_count > 0) {
    model.bias = b_sum / static_cast<double>(b_count);
  } else {
    double v_up = -1e300, v_low = 1e300;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -ysign[t] * grad[t];
      const bool in_up = (ysign[t] > 0.0 && alpha[t] < c_box) ||
                         (ysign[t] < 0.0 && alpha[t] > 0.0);
      const bool in_low = (ysign[t] < 0.0 && alpha[t] < c_box) ||
                          (ysign[t] > 0.0 && alpha[t] > 0.0);
      if (in_up) v_up = std::max(v_up, v);
      if (in_low) v_low = std::min(v_low, v);
    }
    model.bias = 0.5 * (v_up + v_low);
  }

  std::size_t n_sv = 0;
  for (double a : alpha)
    if (a > 0.0) ++n_sv;
  model.support_vectors = Matrix(n_sv, data.cols());
  model.coefficients.reserve(n_sv);
  std::size_t idx = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    const auto src = data.x.row(t);
    std::copy(src.begin(), src.end(), model.support_vectors.row(idx).begin());
    model.coefficients.push_back(alpha[t] * ysign[t]);
    ++idx;
  }
  return model;
}

} // namespace hemoml
