#pragma once

// Run configuration: one JSON document drives every CLI command. The master
// seed is mandatory (no wall-clock default); every learner default is
// overridable here.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemoml/disease.hpp"
#include "hemoml/json_io.hpp"
#include "hemoml/learners/common.hpp"
#include "hemoml/population.hpp"

namespace hemoml {

struct RunConfig {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
  unsigned jobs = 0; // 0 = available parallelism

  std::uint64_t healthy_count = 1000;
  std::uint64_t per_disease_count = 1000;
  std::uint64_t aaa_low_count = 1000;
  std::vector<DiseaseKind> diseases = {DiseaseKind::CAS, DiseaseKind::SAS,
                                       DiseaseKind::PAD, DiseaseKind::AAA,
                                       DiseaseKind::AAA_L};

  SurrogateParams surrogate;
  std::vector<Method> methods = {Method::NB, Method::LR,  Method::SVM,
                                 Method::MLP, Method::RF, Method::GB};
  Hyperparams learner_defaults; // per-method records; method field unused

  void validate() const {
    if (!seed_set) throw std::invalid_argument("config: seed is mandatory");
    if (healthy_count < 2 || per_disease_count < 2 || aaa_low_count < 2)
      throw std::invalid_argument("config: population counts must be >= 2");
    if (diseases.empty()) throw std::invalid_argument("config: no diseases");
    if (methods.empty()) throw std::invalid_argument("config: no methods");
    surrogate.validate();
  }

  std::uint64_t count_for(DiseaseKind kind) const {
    return kind == DiseaseKind::AAA_L ? aaa_low_count : per_disease_count;
  }

  std::filesystem::path cohort_path(const std::string& tag) const {
    std::string name = "vpd_" + tag;
    for (char& c : name) c = static_cast<char>(::tolower(c));
    return std::filesystem::path(out_dir) / (name + ".jsonl");
  }
};

inline std::string config_to_json(const RunConfig& cfg) {
  JsonBuf j;
  j.begin_object();
  j.key("seed").value(cfg.seed);
  j.key("out_dir").value(std::string_view(cfg.out_dir));
  j.key("jobs").value(static_cast<std::uint64_t>(cfg.jobs));
  j.key("population").begin_object();
  j.key("healthy").value(cfg.healthy_count);
  j.key("per_disease").value(cfg.per_disease_count);
  j.key("aaa_low").value(cfg.aaa_low_count);
  j.key("diseases").begin_array();
  for (const DiseaseKind k : cfg.diseases)
    j.value(std::string_view(to_string(k)));
  j.end_array();
  j.end_object();
  j.key("surrogate").begin_object();
  j.key("truncation").value(cfg.surrogate.truncation);
  j.key("nodes_per_segment").value(cfg.surrogate.nodes_per_segment);
  j.key("scaling_sigma").value(cfg.surrogate.scaling_sigma);
  j.key("period_min").value(cfg.surrogate.period_min);
  j.key("period_max").value(cfg.surrogate.period_max);
  j.key("peak_inflow").value(cfg.surrogate.peak_inflow);
  j.key("viscosity").value(cfg.surrogate.viscosity);
  j.key("cardiac_output").value(cfg.surrogate.cardiac_output);
  j.key("target_pressure_mmhg").value(cfg.surrogate.target_pressure_mmhg);
  j.key("windkessel_tau").value(cfg.surrogate.windkessel_tau);
  j.end_object();
  j.key("methods").begin_array();
  for (const Method m : cfg.methods) j.value(std::string_view(to_string(m)));
  j.end_array();
  const Hyperparams& hp = cfg.learner_defaults;
  j.key("learners").begin_object();
  j.key("nb").begin_object();
  j.key("variance_floor_rel").value(hp.nb.variance_floor_rel);
  j.key("variance_floor_abs").value(hp.nb.variance_floor_abs);
  j.end_object();
  j.key("lr").begin_object();
  j.key("l2_strength").value(hp.lr.l2_strength);
  j.key("max_iterations").value(hp.lr.max_iterations);
  j.key("gradient_tolerance").value(hp.lr.gradient_tolerance);
  j.end_object();
  j.key("svm").begin_object();
  j.key("c").value(hp.svm.c);
  j.key("gamma").value(hp.svm.gamma);
  j.key("kkt_tolerance").value(hp.svm.kkt_tolerance);
  j.end_object();
  j.key("mlp").begin_object();
  j.key("neurons_per_layer").value(hp.mlp.neurons_per_layer);
  j.key("hidden_layers").value(hp.mlp.hidden_layers);
  j.key("epochs").value(hp.mlp.epochs);
  j.key("batch_size").value(hp.mlp.batch_size);
  j.key("learning_rate").value(hp.mlp.learning_rate);
  j.end_object();
  j.key("rf").begin_object();
  j.key("trees").value(hp.rf.n_trees);
  j.key("max_depth").value(hp.rf.max_depth);
  j.end_object();
  j.key("gb").begin_object();
  j.key("trees").value(hp.gb.n_trees);
  j.key("max_depth").value(hp.gb.max_depth);
  j.key("learning_rate").value(hp.gb.learning_rate);
  j.end_object();
  j.end_object();
  j.end_object();
  return j.take();
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("seed")) {
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
  }
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
  if (j.contains("population")) {
    const auto& p = j.at("population");
    cfg.healthy_count = p.value("healthy", cfg.healthy_count);
    cfg.per_disease_count = p.value("per_disease", cfg.per_disease_count);
    cfg.aaa_low_count = p.value("aaa_low", cfg.aaa_low_count);
    if (p.contains("diseases")) {
      cfg.diseases.clear();
      for (const auto& d : p.at("diseases"))
        cfg.diseases.push_back(disease_kind_from_string(d.get<std::string>()));
    }
  }
  if (j.contains("surrogate")) {
    const auto& s = j.at("surrogate");
    auto& sp = cfg.surrogate;
    sp.truncation = s.value("truncation", sp.truncation);
    sp.nodes_per_segment = s.value("nodes_per_segment", sp.nodes_per_segment);
    sp.scaling_sigma = s.value("scaling_sigma", sp.scaling_sigma);
    sp.period_min = s.value("period_min", sp.period_min);
    sp.period_max = s.value("period_max", sp.period_max);
    sp.peak_inflow = s.value("peak_inflow", sp.peak_inflow);
    sp.viscosity = s.value("viscosity", sp.viscosity);
    sp.cardiac_output = s.value("cardiac_output", sp.cardiac_output);
    sp.target_pressure_mmhg =
        s.value("target_pressure_mmhg", sp.target_pressure_mmhg);
    sp.windkessel_tau = s.value("windkessel_tau", sp.windkessel_tau);
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods"))
      cfg.methods.push_back(method_from_string(m.get<std::string>()));
  }
  if (j.contains("learners")) {
    const auto& l = j.at("learners");
    Hyperparams& hp = cfg.learner_defaults;
    if (l.contains("nb")) {
      hp.nb.variance_floor_rel =
          l.at("nb").value("variance_floor_rel", hp.nb.variance_floor_rel);
      hp.nb.variance_floor_abs =
          l.at("nb").value("variance_floor_abs", hp.nb.variance_floor_abs);
    }
    if (l.contains("lr")) {
      hp.lr.l2_strength = l.at("lr").value("l2_strength", hp.lr.l2_strength);
      hp.lr.max_iterations =
          l.at("lr").value("max_iterations", hp.lr.max_iterations);
      hp.lr.gradient_tolerance =
          l.at("lr").value("gradient_tolerance", hp.lr.gradient_tolerance);
    }
    if (l.contains("svm")) {
      hp.svm.c = l.at("svm").value("c", hp.svm.c);
      hp.svm.gamma = l.at("svm").value("gamma", hp.svm.gamma);
      hp.svm.kkt_tolerance =
          l.at("svm").value("kkt_tolerance", hp.svm.kkt_tolerance);
    }
    if (l.contains("mlp")) {
      hp.mlp.neurons_per_layer =
          l.at("mlp").value("neurons_per_layer", hp.mlp.neurons_per_layer);
      hp.mlp.hidden_layers =
          l.at("mlp").value("hidden_layers", hp.mlp.hidden_layers);
      hp.mlp.epochs = l.at("mlp").value("epochs", hp.mlp.epochs);
      hp.mlp.batch_size = l.at("mlp").value("batch_size", hp.mlp.batch_size);
      hp.mlp.learning_rate =
          l.at("mlp").value("learning_rate", hp.mlp.learning_rate);
    }
    if (l.contains("rf")) {
      hp.rf.n_trees = l.at("rf").value("trees", hp.rf.n_trees);
      hp.rf.max_depth = l.at("rf").value("max_depth", hp.rf.max_depth);
    }
    if (l.contains("gb")) {
      hp.gb.n_trees = l.at("gb").value("trees", hp.gb.n_trees);
      hp.gb.max_depth = l.at("gb").value("max_depth", hp.gb.max_depth);
      hp.gb.learning_rate =
          l.at("gb").value("learning_rate", hp.gb.learning_rate);
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg = config_from_json(nlohmann::json::parse(read_file(path)));
  cfg.validate();
  return cfg;
}

} // namespace hemoml
