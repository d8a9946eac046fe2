#pragma once

// Uniform fit/predict contract over the six classifier families.
// fit() reorders rows canonically (by subject id) before training, so every
// model is a pure function of (hyperparams, row set, seed) regardless of
// presentation order. predict thresholds probabilistic scores at 0.5 and the
// SVM decision value at 0; exact ties resolve to healthy.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "hemoml/learners/boosting.hpp"
#include "hemoml/learners/common.hpp"
#include "hemoml/learners/logistic.hpp"
#include "hemoml/learners/mlp.hpp"
#include "hemoml/learners/naive_bayes.hpp"
#include "hemoml/learners/random_forest.hpp"
#include "hemoml/learners/svm.hpp"
#include "hemoml/rng.hpp"

namespace hemoml {

struct FitInfo {
  Method method = Method::GB;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::size_t n_rows = 0;
  bool converged = true;
  std::string warning;
};

struct TrainedModel {
  FitInfo info;
  std::variant<NbModel, LrModel, SvmModel, MlpModel, RfModel, GbModel> impl;
};

inline TrainedModel fit(const Hyperparams& hp, const Dataset& data,
                        std::uint64_t seed) {
  hp.validate();
  data.validate();
  if (!data.has_both_classes())
    throw std::invalid_argument("fit: training data contains a single class");

  const Dataset canon = reorder_rows(data, canonical_row_order(data));
  const RngStream fit_stream = RngStream(seed);

  TrainedModel model;
  model.info.method = hp.method;
  model.info.seed = seed;
  model.info.n_features = canon.cols();
  model.info.n_rows = canon.rows();

  switch (hp.method) {
    case Method::NB:
      model.impl = fit_naive_bayes(hp.nb, canon);
      break;
    case Method::LR: {
      LrModel lr = fit_logistic(hp.lr, canon);
      if (!lr.converged) {
        model.info.converged = false;
        model.info.warning = "LR did not reach gradient tolerance (|g| = " +
                             std::to_string(lr.final_gradient_norm) + ")";
      }
      model.impl = std::move(lr);
      break;
    }
    case Method::SVM: {
      SvmModel svm = fit_svm(hp.svm, canon);
      if (!svm.converged) {
        model.info.converged = false;
        model.info.warning = "SVM hit its iteration cap before the KKT gap closed";
      }
      model.impl = std::move(svm);
      break;
    }
    case Method::MLP:
      model.impl = fit_mlp(hp.mlp, canon, fit_stream.child({rng_tag::kMlp}));
      break;
    case Method::RF:
      model.impl = fit_random_forest(hp.rf, canon, fit_stream);
      break;
    case Method::GB:
      model.impl = fit_gradient_boosting(hp.gb, canon);
      break;
  }
  return model;
}

/// Probability of the diseased class for the probabilistic models, raw
/// decision value for the SVM.
inline double predict_score(const TrainedModel& model,
                            std::span<const double> x) {
  if (x.size() != model.info.n_features)
    throw std::invalid_argument("predict: feature count mismatch");
  switch (model.info.method) {
    case Method::NB: return std::get<NbModel>(model.impl).posterior_diseased(x);
    case Method::LR: {
      const double z = std::get<LrModel>(model.impl).decision(x);
      return 1.0 / (1.0 + std::exp(-z));
    }
    case Method::SVM: return std::get<SvmModel>(model.impl).decision(x);
    case Method::MLP: return std::get<MlpModel>(model.impl).probability(x);
    case Method::RF: return std::get<RfModel>(model.impl).vote_share(x);
    case Method::GB: return std::get<GbModel>(model.impl).probability(x);
  }
  throw std::logic_error("predict_score: bad method");
}

inline int predict(const TrainedModel& model, std::span<const double> x) {
  const double score = predict_score(model, x);
  const double threshold = model.info.method == Method::SVM ? 0.0 : 0.5;
  return score > threshold ? kDiseased : kHealthy;
}

/// The paper computes importance only for the boosted ensembles; any other
/// model family is rejected.
inline std::vector<double> split_improvement_importance(
    const TrainedModel& model) {
  if (model.info.method != Method::GB)
    throw std::invalid_argument(
        std::string("split_improvement_importance: not a GB model (") +
        to_string(model.info.method) + ")");
  return split_improvement_importance(std::get<GbModel>(model.impl));
}

} // namespace hemoml
