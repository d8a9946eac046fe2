#pragma once

// Versioned JSON serialisation of trained models.

#include <json.hpp>

#include "hemoml/json_io.hpp"
#include "hemoml/learners/model.hpp"

namespace hemoml {

namespace detail {

inline void tree_to_json(JsonBuf& j, const DecisionTree& tree) {
  j.begin_object();
  j.key("nodes").begin_array();
  for (const TreeNode& n : tree.nodes) {
    j.begin_object();
    j.key("f").value(n.feature);
    j.key("t").value(n.threshold);
    j.key("l").value(n.left);
    j.key("r").value(n.right);
    j.key("v").value(n.value);
    j.end_object();
  }
  j.end_array();
  j.end_object();
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree tree;
  for (const auto& nj : j.at("nodes")) {
    TreeNode n;
    n.feature = nj.at("f").get<int>();
    n.threshold = nj.at("t").get<double>();
    n.left = nj.at("l").get<int>();
    n.right = nj.at("r").get<int>();
    n.value = nj.at("v").get<double>();
    tree.nodes.push_back(n);
  }
  tree.node_feature_subsets.assign(tree.nodes.size(), {});
  return tree;
}

inline void doubles_to_json(JsonBuf& j, const std::vector<double>& v) {
  j.begin_array();
  for (double x : v) j.value(x);
  j.end_array();
}

inline void matrix_to_json(JsonBuf& j, const Matrix& m) {
  j.begin_object();
  j.key("rows").value(static_cast<std::uint64_t>(m.rows));
  j.key("cols").value(static_cast<std::uint64_t>(m.cols));
  j.key("values");
  doubles_to_json(j, m.values);
  j.end_object();
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.values = j.at("values").get<std::vector<double>>();
  if (m.values.size() != m.rows * m.cols)
    throw std::invalid_argument("model json: matrix size mismatch");
  return m;
}

} // namespace detail

inline std::string model_to_json(const TrainedModel& model) {
  JsonBuf j;
  j.begin_object();
  j.key("format").value(std::string_view("hemoml-model"));
  j.key("version").value(1);
  j.key("method").value(std::string_view(to_string(model.info.method)));
  j.key("info").begin_object();
  j.key("seed").value(model.info.seed);
  j.key("n_features").value(static_cast<std::uint64_t>(model.info.n_features));
  j.key("n_rows").value(static_cast<std::uint64_t>(model.info.n_rows));
  j.key("converged").value(model.info.converged);
  j.key("warning").value(std::string_view(model.info.warning));
  j.end_object();
  j.key("model");
  switch (model.info.method) {
    case Method::NB: {
      const auto& nb = std::get<NbModel>(model.impl);
      j.begin_object();
      j.key("log_prior");
      detail::doubles_to_json(j, nb.log_prior);
      j.key("mean_healthy");
      detail::doubles_to_json(j, nb.mean[0]);
      j.key("mean_diseased");
      detail::doubles_to_json(j, nb.mean[1]);
      j.key("var_healthy");
      detail::doubles_to_json(j, nb.var[0]);
      j.key("var_diseased");
      detail::doubles_to_json(j, nb.var[1]);
      j.end_object();
      break;
    }
    case Method::LR: {
      const auto& lr = std::get<LrModel>(model.impl);
      j.begin_object();
      j.key("weights");
      detail::doubles_to_json(j, lr.weights);
      j.key("bias").value(lr.bias);
      j.key("converged").value(lr.converged);
      j.end_object();
      break;
    }
    case Method::SVM: {
      const auto& svm = std::get<SvmModel>(model.impl);
      j.begin_object();
      j.key("support_vectors");
      detail::matrix_to_json(j, svm.support_vectors);
      j.key("coefficients");
      detail::doubles_to_json(j, svm.coefficients);
      j.key("bias").value(svm.bias);
      j.key("gamma").value(svm.gamma);
      j.end_object();
      break;
    }
    case Method::MLP: {
      const auto& mlp = std::get<MlpModel>(model.impl);
      j.begin_object();
      j.key("input").value(mlp.shape.input);
      j.key("hidden_width").value(mlp.shape.hidden_width);
      j.key("hidden_layers").value(mlp.shape.hidden_layers);
      j.key("params");
      detail::doubles_to_json(j, mlp.params);
      j.end_object();
      break;
    }
    case Method::RF: {
      const auto& rf = std::get<RfModel>(model.impl);
      j.begin_object();
      j.key("max_depth").value(rf.max_depth);
      j.key("trees").begin_array();
      for (const auto& tree : rf.trees) detail::tree_to_json(j, tree);
      j.end_array();
      j.end_object();
      break;
    }
    case Method::GB: {
      const auto& gb = std::get<GbModel>(model.impl);
      j.begin_object();
      j.key("initial_logit").value(gb.initial_logit);
      j.key("learning_rate").value(gb.learning_rate);
      j.key("n_features").value(static_cast<std::uint64_t>(gb.n_features));
      j.key("importance_raw");
      detail::doubles_to_json(j, gb.importance_raw);
      j.key("trees").begin_array();
      for (const auto& tree : gb.trees) detail::tree_to_json(j, tree);
      j.end_array();
      j.end_object();
      break;
    }
  }
  j.end_object();
  return j.take();
}

inline TrainedModel model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "hemoml-model" || j.value("version", 0) != 1)
    throw std::invalid_argument("model json: unknown format/version");
  TrainedModel model;
  model.info.method = method_from_string(j.at("method").get<std::string>());
  const auto& info = j.at("info");
  model.info.seed = info.at("seed").get<std::uint64_t>();
  model.info.n_features = info.at("n_features").get<std::size_t>();
  model.info.n_rows = info.at("n_rows").get<std::size_t>();
  model.info.converged = info.at("converged").get<bool>();
  model.info.warning = info.at("warning").get<std::string>();
  const auto& mj = j.at("model");
  switch (model.info.method) {
    case Method::NB: {
      NbModel nb;
      nb.log_prior = mj.at("log_prior").get<std::vector<double>>();
      nb.mean = {mj.at("mean_healthy").get<std::vector<double>>(),
                 mj.at("mean_diseased").get<std::vector<double>>()};
      nb.var = {mj.at("var_healthy").get<std::vector<double>>(),
                mj.at("var_diseased").get<std::vector<double>>()};
      model.impl = std::move(nb);
      break;
    }
    case Method::LR: {
      LrModel lr;
      lr.weights = mj.at("weights").get<std::vector<double>>();
      lr.bias = mj.at("bias").get<double>();
      lr.converged = mj.at("converged").get<bool>();
      model.impl = std::move(lr);
      break;
    }
    case Method::SVM: {
      SvmModel svm;
      svm.support_vectors = detail::matrix_from_json(mj.at("support_vectors"));
      svm.coefficients = mj.at("coefficients").get<std::vector<double>>();
      svm.bias = mj.at("bias").get<double>();
      svm.gamma = mj.at("gamma").get<double>();
      svm.converged = true;
      model.impl = std::move(svm);
      break;
    }
    case Method::MLP: {
      MlpModel mlp;
      mlp.shape.input = mj.at("input").get<int>();
      mlp.shape.hidden_width = mj.at("hidden_width").get<int>();
      mlp.shape.hidden_layers = mj.at("hidden_layers").get<int>();
      mlp.params = mj.at("params").get<std::vector<double>>();
      if (mlp.params.size() != mlp_parameter_count(mlp.shape))
        throw std::invalid_argument("model json: MLP parameter count");
      model.impl = std::move(mlp);
      break;
    }
    case Method::RF: {
      RfModel rf;
      rf.max_depth = mj.at("max_depth").get<int>();
      for (const auto& tj : mj.at("trees"))
        rf.trees.push_back(detail::tree_from_json(tj));
      model.impl = std::move(rf);
      break;
    }
    case Method::GB: {
      GbModel gb;
      gb.initial_logit = mj.at("initial_logit").get<double>();
      gb.learning_rate = mj.at("learning_rate").get<double>();
      gb.n_features = mj.at("n_features").get<std::size_t>();
      gb.importance_raw = mj.at("importance_raw").get<std::vector<double>>();
      for (const auto& tj : mj.at("trees"))
        gb.trees.push_back(detail::tree_from_json(tj));
      model.impl = std::move(gb);
      break;
    }
  }
  return model;
}

} // namespace hemoml
