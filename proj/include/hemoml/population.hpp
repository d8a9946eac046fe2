#pragma once

// Virtual-patient population generation. Each subject gets its own derived
// random stream keyed by (seed, subject index) for physiology and
// (seed, disease kind, subject index) for the disease draw, so cohorts are
// twin-paired and independent of generation order and thread count.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hemoml/disease.hpp"
#include "hemoml/network.hpp"
#include "hemoml/rng.hpp"
#include "hemoml/surrogate.hpp"
#include "hemoml/util.hpp"

namespace hemoml {

struct SurrogateParams {
  int truncation = 5;
  int nodes_per_segment = 32;
  double scaling_sigma = 0.1;   // log-normal sigma for the three scalings
  double period_min = 0.7;      // s
  double period_max = 1.1;      // s
  double peak_inflow = 430.0;   // cm^3/s at the root
  double viscosity = 0.04;      // g/(cm s)
  double cardiac_output = 85.0; // cm^3/s used for load calibration
  double target_pressure_mmhg = 93.0;
  double windkessel_tau = 1.3;  // s

  void validate() const {
    if (truncation < 1 || nodes_per_segment < 1)
      throw std::invalid_argument("SurrogateParams: bad discretisation");
    if (!(scaling_sigma >= 0.0))
      throw std::invalid_argument("SurrogateParams: sigma < 0");
    if (!(0.0 < period_min && period_min <= period_max))
      throw std::invalid_argument("SurrogateParams: bad period range");
    if (!(peak_inflow > 0.0) || !(viscosity > 0.0) || !(cardiac_output > 0.0) ||
        !(target_pressure_mmhg > 0.0) || !(windkessel_tau > 0.0))
      throw std::invalid_argument("SurrogateParams: non-positive parameter");
  }
};

struct SubjectRecord {
  std::uint64_t id = 0;
  std::string cohort = "H"; // H, CAS, SAS, PAD, AAA, AAA_L
  SubjectConfig scalings;
  std::optional<DiseaseSpec> disease;
};

/// Draw order is fixed: period, wave speed, resistance, area.
inline SubjectConfig draw_subject_scalings(const SurrogateParams& params,
                                           RngStream& rng) {
  SubjectConfig cfg;
  cfg.heart_period = rng.uniform(params.period_min, params.period_max);
  cfg.wave_speed_scale = rng.log_normal(params.scaling_sigma);
  cfg.resistance_scale = rng.log_normal(params.scaling_sigma);
  cfg.area_scale = rng.log_normal(params.scaling_sigma);
  return cfg;
}

inline ArterialNetworkModel build_subject_network(const SubjectConfig& cfg,
                                                  const SurrogateParams& params) {
  ArterialNetworkModel net = build_reference_network(
      cfg, params.nodes_per_segment, params.cardiac_output,
      params.target_pressure_mmhg, params.windkessel_tau);
  net.viscosity = params.viscosity;
  return net;
}

inline std::uint64_t disease_stream_tag(DiseaseKind kind) {
  return static_cast<std::uint64_t>(kind) + 1;
}

/// One subject of the population: the healthy network plus, when requested,
/// its diseased twin (same scalings, one sampled DiseaseSpec).
inline std::pair<SubjectRecord, WaveformSet> generate_subject(
    std::uint64_t subject_index, std::optional<DiseaseKind> disease,
    const RngStream& master, const SurrogateParams& params) {
  RngStream phys = master.child({rng_tag::kSubject, subject_index});
  SubjectRecord rec;
  rec.id = subject_index;
  rec.scalings = draw_subject_scalings(params, phys);

  ArterialNetworkModel net = build_subject_network(rec.scalings, params);
  if (disease) {
    RngStream dstream =
        master.child({rng_tag::kDisease, disease_stream_tag(*disease), subject_index});
    DiseaseSpec spec = sample_disease(*disease, dstream);
    spec.validate();
    rec.cohort = to_string(*disease);
    rec.disease = spec;
    net = apply_disease(net, net.chain(chain_for(spec.kind, spec.side)), spec);
  }

  const HeartInflow inflow = make_half_sine_inflow(
      rec.scalings.heart_period, params.peak_inflow, params.truncation);
  WaveformSet waves = solve_network(net, inflow, params.truncation);
  waves.patient_id = subject_index;
  return {std::move(rec), std::move(waves)};
}

/// Population of n subjects, healthy or carrying one disease form each.
/// Diseased populations are twin-paired with the healthy population drawn
/// from the same master stream.
inline std::vector<std::pair<SubjectRecord, WaveformSet>> generate_population(
    std::uint64_t n_subjects, std::optional<DiseaseKind> disease,
    const RngStream& master, const SurrogateParams& params, unsigned jobs = 1) {
  if (n_subjects < 1)
    throw std::invalid_argument("generate_population: n_subjects < 1");
  params.validate();
  std::vector<std::pair<SubjectRecord, WaveformSet>> out(n_subjects);
  parallel_for(n_subjects, jobs, [&](std::size_t i) {
    out[i] = generate_subject(i, disease, master, params);
  });
  return out;
}

} // namespace hemoml
