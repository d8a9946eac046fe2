#pragma once

// Fully connected perceptron: equal-width ReLU hidden layers, sigmoid
// output, cross-entropy loss, plain mini-batch gradient descent with a
// fixed epoch budget. All randomness (init, shuffles) comes from the seed.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hemoml/learners/common.hpp"
#include "hemoml/matrix.hpp"
#include "hemoml/rng.hpp"

namespace hemoml {

struct MlpShape {
  int input = 0;
  int hidden_width = 0;
  int hidden_layers = 0;

  int layer_in(int l) const { return l == 0 ? input : hidden_width; }
  int layer_out(int l) const { return l == hidden_layers ? 1 : hidden_width; }
  int n_layers() const { return hidden_layers + 1; }
};

inline std::size_t mlp_parameter_count(const MlpShape& shape) {
  std::size_t count = 0;
  for (int l = 0; l < shape.n_layers(); ++l)
    count += static_cast<std::size_t>(shape.layer_out(l)) *
                 static_cast<std::size_t>(shape.layer_in(l)) +
             static_cast<std::size_t>(shape.layer_out(l));
  return count;
}

namespace detail {

struct MlpWorkspace {
  std::vector<std::vector<double>> activations; // per layer outputs
  std::vector<std::vector<double>> deltas;
};

inline double mlp_forward(const MlpShape& shape, std::span<const double> params,
                          std::span<const double> x, MlpWorkspace* ws = nullptr) {
  std::vector<double> current(x.begin(), x.end());
  if (ws) {
    ws->activations.assign(shape.n_layers() + 1, {});
    ws->activations[0] = current;
  }
  std::size_t offset = 0;
  for (int l = 0; l < shape.n_layers(); ++l) {
    const int in = shape.layer_in(l);
    const int out = shape.layer_out(l);
    std::vector<double> next(out);
    const double* w = params.data() + offset;
    const double* b = params.data() + offset + static_cast<std::size_t>(out) * in;
    for (int o = 0; o < out; ++o) {
      double z = b[o];
      for (int k = 0; k < in; ++k) z += w[static_cast<std::size_t>(o) * in + k] * current[k];
      next[o] = (l == shape.n_layers() - 1) ? z : std::max(z, 0.0);
    }
    offset += static_cast<std::size_t>(out) * in + out;
    current = std::move(next);
    if (ws) ws->activations[l + 1] = current;
  }
  return current[0]; // output logit
}

} // namespace detail

/// Mean cross-entropy over the given rows plus its gradient in the flat
/// parameter vector. Exposed for the finite-difference checks.
inline double mlp_loss_and_gradient(const MlpShape& shape,
                                    std::span<const double> params,
                                    const Matrix& x,
                                    const std::vector<int>& labels,
                                    std::span<const std::size_t> rows,
                                    std::span<double> grad_out) {
  if (params.size() != mlp_parameter_count(shape) ||
      grad_out.size() != params.size())
    throw std::invalid_argument("mlp_loss_and_gradient: parameter size");
  for (double& g : grad_out) g = 0.0;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;

  detail::MlpWorkspace ws;
  for (const std::size_t r : rows) {
    const double z = detail::mlp_forward(shape, params, x.row(r), &ws);
    const double y = labels[r] == kDiseased ? 1.0 : 0.0;
    loss += (std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)))) * inv_n;
    const double p = 1.0 / (1.0 + std::exp(-z));

    // backprop
    std::vector<std::vector<double>> deltas(shape.n_layers());
    deltas[shape.n_layers() - 1] = {(p - y) * inv_n};
    for (int l = shape.n_layers() - 2; l >= 0; --l) {
      const int out = shape.layer_out(l);
      const int next_out = shape.layer_out(l + 1);
      const int next_in = shape.layer_in(l + 1);
      std::size_t next_offset = 0;
      for (int k = 0; k <= l; ++k)
        next_offset += static_cast<std::size_t>(shape.layer_out(k)) *
                           shape.layer_in(k) +
                       shape.layer_out(k);
      const double* w_next = params.data() + next_offset;
      deltas[l].assign(out, 0.0);
      for (int o = 0; o < out; ++o) {
        if (ws.activations[l + 1][o] <= 0.0) continue; // ReLU gate
        double s = 0.0;
        for (int q = 0; q < next_out; ++q)
          s += w_next[static_cast<std::size_t>(q) * next_in + o] *
               deltas[l + 1][q];
        deltas[l][o] = s;
      }
    }
    std::size_t offset = 0;
    for (int l = 0; l < shape.n_layers(); ++l) {
      const int in = shape.layer_in(l);
      const int out = shape.layer_out(l);
      double* gw = grad_out.data() + offset;
      double* gb = grad_out.data() + offset + static_cast<std::size_t>(out) * in;
      for (int o = 0; o < out; ++o) {
        const double dlt = deltas[l][o];
        if (dlt != 0.0) {
          for (int k = 0; k < in; ++k)
            gw[static_cast<std::size_t>(o) * in + k] += dlt * ws.activations[l][k];
          gb[o] += dlt;
        }
      }
      offset += static_cast<std::size_t>(out) * in + out;
    }
  }
  return loss;
}

inline double mlp_loss_and_gradient(const MlpShape& shape,
                                    std::span<const double> params,
                                    const Matrix& x,
                                    const std::vector<int>& labels,
                                    std::span<double> grad_out) {
  std::vector<std::size_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), 0);
  return mlp_loss_and_gradient(shape, params, x, labels, rows, grad_out);
}

struct MlpModel {
  MlpShape shape;
  std::vector<double> params;

  double logit(std::span<const double> x) const {
    return detail::mlp_forward(shape, params, x);
  }
  double probability(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(-logit(x)));
  }
};

inline MlpModel fit_mlp(const MlpParams& hp, const Dataset& data,
                        RngStream rng) {
  MlpModel model;
  model.shape = MlpShape{static_cast<int>(data.cols()), hp.neurons_per_layer,
                         hp.hidden_layers};
  model.params.resize(mlp_parameter_count(model.shape));

  // He initialisation, biases zero
  std::size_t offset = 0;
  for (int l = 0; l < model.shape.n_layers(); ++l) {
    const int in = model.shape.layer_in(l);
    const int out = model.shape.layer_out(l);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (int k = 0; k < out * in; ++k)
      model.params[offset + k] = scale * rng.normal();
    for (int k = 0; k < out; ++k)
      model.params[offset + static_cast<std::size_t>(out) * in + k] = 0.0;
    offset += static_cast<std::size_t>(out) * in + out;
  }

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.params.size());

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    // Fisher-Yates shuffle from the seeded stream
    for (std::size_t k = order.size(); k > 1; --k) {
      const std::size_t j = rng.uniform_int(k);
      std::swap(order[k - 1], order[j]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(hp.batch_size));
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      mlp_loss_and_gradient(model.shape, model.params, data.x, data.labels,
                            batch, grad);
      for (std::size_t k = 0; k < model.params.size(); ++k)
        model.params[k] -= hp.learning_rate * grad[k];
    }
  }
  return model;
}

} // namespace hemoml
