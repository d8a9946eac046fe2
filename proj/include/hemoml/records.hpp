#pragma once

// Patient record file schema: one JSON object per line, 12 site-keyed
// arrays of 11 Fourier coefficients plus cohort tag, period and (for
// diseased cohorts) the DiseaseSpec.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemoml/disease.hpp"
#include "hemoml/json_io.hpp"
#include "hemoml/population.hpp"
#include "hemoml/surrogate.hpp"

namespace hemoml {

struct PatientRecord {
  std::uint64_t id = 0;
  std::string cohort = "H";
  double period = 1.0;
  std::optional<DiseaseSpec> disease;
  std::array<std::vector<double>, kNumSites> coefficients; // b0,a1..a5,b1..b5

  void validate() const {
    if (cohort != "H") disease_kind_from_string(cohort); // throws if unknown
    if (!(period > 0.0))
      throw std::invalid_argument("PatientRecord: period <= 0");
    if (cohort == "H" && disease.has_value())
      throw std::invalid_argument("PatientRecord: healthy record carries a disease");
    if (cohort != "H" && !disease.has_value())
      throw std::invalid_argument("PatientRecord: diseased record lacks a disease");
    if (disease) disease->validate();
    const std::size_t width = coefficients[0].size();
    for (int s = 0; s < kNumSites; ++s) {
      const auto& c = coefficients[s];
      if (c.empty() || c.size() % 2 == 0)
        throw std::invalid_argument(std::string("PatientRecord: site ") +
                                    kSiteNames[s] + " needs 2N+1 coefficients");
      if (c.size() != width)
        throw std::invalid_argument(
            "PatientRecord: sites carry different truncation orders");
      for (double v : c)
        if (!std::isfinite(v))
          throw std::invalid_argument(std::string("PatientRecord: non-finite "
                                                  "coefficient at site ") +
                                      kSiteNames[s]);
    }
  }

  WaveformSet to_waveforms() const {
    WaveformSet waves;
    waves.patient_id = id;
    for (int s = 0; s < kNumSites; ++s)
      waves.series[s] = FourierSeries::from_flattened(period, coefficients[s]);
    return waves;
  }
};

inline PatientRecord make_patient_record(const SubjectRecord& subject,
                                         const WaveformSet& waves) {
  PatientRecord rec;
  rec.id = subject.id;
  rec.cohort = subject.cohort;
  rec.period = subject.scalings.heart_period;
  rec.disease = subject.disease;
  for (int s = 0; s < kNumSites; ++s)
    rec.coefficients[s] = waves.series[s].flattened();
  return rec;
}

inline void disease_to_json(JsonBuf& j, const DiseaseSpec& spec) {
  j.begin_object();
  j.key("kind").value(std::string_view(to_string(spec.kind)));
  j.key("severity").value(spec.severity);
  j.key("b").value(spec.start);
  j.key("e").value(spec.end);
  j.key("r").value(spec.reference);
  j.key("side").value(std::string_view(to_string(spec.side)));
  j.end_object();
}

inline std::string to_jsonl_line(const PatientRecord& rec) {
  JsonBuf j;
  j.begin_object();
  j.key("id").value(rec.id);
  j.key("cohort").value(std::string_view(rec.cohort));
  j.key("period").value(rec.period);
  if (rec.disease) {
    j.key("disease");
    disease_to_json(j, *rec.disease);
  }
  j.key("sites").begin_object();
  for (int s = 0; s < kNumSites; ++s) {
    j.key(kSiteNames[s]).begin_array();
    for (double v : rec.coefficients[s]) j.value(v);
    j.end_array();
  }
  j.end_object();
  j.end_object();
  return j.take();
}

inline DiseaseSpec disease_from_json(const nlohmann::json& j) {
  DiseaseSpec spec;
  spec.kind = disease_kind_from_string(j.at("kind").get<std::string>());
  spec.severity = j.at("severity").get<double>();
  spec.start = j.at("b").get<double>();
  spec.end = j.at("e").get<double>();
  spec.reference = j.at("r").get<double>();
  spec.side = side_from_string(j.at("side").get<std::string>());
  return spec;
}

inline PatientRecord patient_record_from_json(const nlohmann::json& j) {
  PatientRecord rec;
  rec.id = j.at("id").get<std::uint64_t>();
  rec.cohort = j.at("cohort").get<std::string>();
  rec.period = j.at("period").get<double>();
  if (j.contains("disease")) rec.disease = disease_from_json(j.at("disease"));
  const auto& sites = j.at("sites");
  for (int s = 0; s < kNumSites; ++s) {
    if (!sites.contains(kSiteNames[s]))
      throw std::invalid_argument(std::string("record missing site ") +
                                  kSiteNames[s]);
    rec.coefficients[s] = sites.at(kSiteNames[s]).get<std::vector<double>>();
  }
  rec.validate();
  return rec;
}

inline std::string cohort_to_jsonl(const std::vector<PatientRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    out += to_jsonl_line(rec);
    out += '\n';
  }
  return out;
}

inline void write_cohort_file(const std::filesystem::path& path,
                              const std::vector<PatientRecord>& records) {
  atomic_write_file(path, cohort_to_jsonl(records));
}

inline std::vector<PatientRecord> read_cohort_file(
    const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<PatientRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(patient_record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  if (records.empty())
    throw std::runtime_error(path.string() + ": no records");
  return records;
}

inline std::vector<WaveformSet> cohort_waveforms(
    const std::vector<PatientRecord>& records) {
  std::vector<WaveformSet> waves;
  waves.reserve(records.size());
  for (const auto& rec : records) waves.push_back(rec.to_waveforms());
  return waves;
}

inline std::vector<std::uint64_t> cohort_ids(
    const std::vector<PatientRecord>& records) {
  std::vector<std::uint64_t> ids;
  ids.reserve(records.size());
  for (const auto& rec : records) ids.push_back(rec.id);
  return ids;
}

// --- network model document ------------------------------------------------

inline std::string network_to_json(const ArterialNetworkModel& net) {
  JsonBuf j;
  j.begin_object();
  j.key("format").value(std::string_view("hemoml-network"));
  j.key("version").value(1);
  j.key("viscosity").value(net.viscosity);
  j.key("segments").begin_array();
  for (const Segment& seg : net.segments) {
    j.begin_object();
    j.key("name").value(std::string_view(seg.name));
    j.key("parent").value(seg.parent);
    j.key("length").value(seg.length);
    j.key("wave_speed").value(seg.wave_speed);
    j.key("density").value(seg.density);
    j.key("area").begin_array();
    for (double a : seg.area) j.value(a);
    j.end_array();
    j.key("area_ref").begin_array();
    for (double a : seg.area_ref) j.value(a);
    j.end_array();
    if (seg.terminal) {
      j.key("terminal").begin_object();
      j.key("proximal_resistance").value(seg.terminal->proximal_resistance);
      j.key("distal_resistance").value(seg.terminal->distal_resistance);
      j.key("compliance").value(seg.terminal->compliance);
      j.end_object();
    }
    j.end_object();
  }
  j.end_array();
  j.key("sites").begin_object();
  for (int k = 0; k < kNumSites; ++k) {
    j.key(kSiteNames[k]).begin_object();
    j.key("segment").value(net.sites[k].segment);
    j.key("fraction").value(net.sites[k].fraction);
    j.end_object();
  }
  j.end_object();
  j.key("chains").begin_array();
  for (const VesselChain& chain : net.chains) {
    j.begin_object();
    j.key("id").value(std::string_view(chain.id));
    j.key("segments").begin_array();
    for (int s : chain.segments) j.value(s);
    j.end_array();
    j.key("boundaries").begin_array();
    for (double b : chain.boundaries) j.value(b);
    j.end_array();
    j.end_object();
  }
  j.end_array();
  j.end_object();
  return j.take();
}

inline ArterialNetworkModel network_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "hemoml-network" || j.value("version", 0) != 1)
    throw std::invalid_argument("network json: unknown format/version");
  ArterialNetworkModel net;
  net.viscosity = j.at("viscosity").get<double>();
  for (const auto& sj : j.at("segments")) {
    Segment seg;
    seg.name = sj.at("name").get<std::string>();
    seg.parent = sj.at("parent").get<int>();
    seg.length = sj.at("length").get<double>();
    seg.wave_speed = sj.at("wave_speed").get<double>();
    seg.density = sj.at("density").get<double>();
    seg.area = sj.at("area").get<std::vector<double>>();
    seg.area_ref = sj.at("area_ref").get<std::vector<double>>();
    if (sj.contains("terminal")) {
      Windkessel wk;
      wk.proximal_resistance =
          sj.at("terminal").at("proximal_resistance").get<double>();
      wk.distal_resistance =
          sj.at("terminal").at("distal_resistance").get<double>();
      wk.compliance = sj.at("terminal").at("compliance").get<double>();
      seg.terminal = wk;
    }
    net.segments.push_back(std::move(seg));
  }
  const auto& sites = j.at("sites");
  for (int k = 0; k < kNumSites; ++k) {
    if (!sites.contains(kSiteNames[k]))
      throw std::invalid_argument(std::string("network json: missing site ") +
                                  kSiteNames[k]);
    net.sites[k].segment = sites.at(kSiteNames[k]).at("segment").get<int>();
    net.sites[k].fraction =
        sites.at(kSiteNames[k]).at("fraction").get<double>();
  }
  for (const auto& cj : j.at("chains")) {
    VesselChain chain;
    chain.id = cj.at("id").get<std::string>();
    chain.segments = cj.at("segments").get<std::vector<int>>();
    chain.boundaries = cj.at("boundaries").get<std::vector<double>>();
    net.chains.push_back(std::move(chain));
  }
  net.validate();
  return net;
}

} // namespace hemoml
