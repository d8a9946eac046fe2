#pragma once

// Arterial network model: segment tree with axial area profiles, Windkessel
// terminal loads, named disease chains and the 12 measurement sites.
//
// Units are CGS throughout: cm, cm^2, cm^3/s, g/cm^3, dyn s/cm^5.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoml/disease.hpp"

namespace hemoml {

/// Three-element terminal load closing a truncated branch.
struct Windkessel {
  double proximal_resistance = 0.0; // dyn s / cm^5
  double distal_resistance = 0.0;   // dyn s / cm^5
  double compliance = 0.0;          // cm^5 / dyn
};

struct Segment {
  std::string name;
  int parent = -1; // -1 for the root
  double length = 0.0;
  double wave_speed = 0.0;
  double density = 1.06;
  std::vector<double> area;     // current axial profile, node midpoints
  std::vector<double> area_ref; // healthy baseline profile
  std::optional<Windkessel> terminal;

  bool is_leaf() const { return terminal.has_value(); }
};

/// The six bilateral measurements, right side first within each pair.
enum class SiteId : int {
  Q1R = 0, Q1L, Q2R, Q2L, Q3R, Q3L,
  P1R, P1L, P2R, P2L, P3R, P3L,
};

inline constexpr int kNumSites = 12;

inline constexpr const char* kSiteNames[kNumSites] = {
    "Q1R", "Q1L", "Q2R", "Q2L", "Q3R", "Q3L",
    "P1R", "P1L", "P2R", "P2L", "P3R", "P3L",
};

inline bool site_is_flow(SiteId s) { return static_cast<int>(s) < 6; }

struct SitePlacement {
  int segment = -1;
  double fraction = 0.5; // position along the segment, 0 = inlet
};

/// Contiguous run of segments within which one disease form may be placed.
/// boundaries holds the normalised segment edges: size() == segments + 1,
/// strictly increasing, first 0, last 1, spaced in proportion to length.
struct VesselChain {
  std::string id; // CA_R, CA_L, SA_R, SA_L, PA_R, PA_L, AA
  std::vector<int> segments;
  std::vector<double> boundaries;

  void validate() const {
    if (segments.empty() || boundaries.size() != segments.size() + 1)
      throw std::invalid_argument("VesselChain: boundary count mismatch");
    if (boundaries.front() != 0.0 || boundaries.back() != 1.0)
      throw std::invalid_argument("VesselChain: boundaries must span [0, 1]");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
      if (!(boundaries[i] > boundaries[i - 1]))
        throw std::invalid_argument("VesselChain: boundaries not increasing");
  }
};

struct ArterialNetworkModel {
  std::vector<Segment> segments;
  std::array<SitePlacement, kNumSites> sites{};
  std::vector<VesselChain> chains;
  double viscosity = 0.04; // blood, g/(cm s)

  int root() const {
    int r = -1;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].parent < 0) {
        if (r >= 0) throw std::invalid_argument("network: multiple roots");
        r = static_cast<int>(i);
      }
    }
    if (r < 0) throw std::invalid_argument("network: no root");
    return r;
  }

  std::vector<std::vector<int>> children() const {
    std::vector<std::vector<int>> kids(segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const int p = segments[i].parent;
      if (p >= 0) {
        if (p >= static_cast<int>(segments.size()))
          throw std::invalid_argument("network: parent out of range");
        kids[p].push_back(static_cast<int>(i));
      }
    }
    return kids;
  }

  const VesselChain& chain(const std::string& id) const {
    for (const auto& c : chains)
      if (c.id == id) return c;
    throw std::invalid_argument("network: unknown chain " + id);
  }

  void validate() const {
    const int r = root();
    const auto kids = children();
    // reachability from the root proves the parent map is a tree
    std::vector<int> stack{r};
    std::size_t seen = 0;
    std::vector<bool> visited(segments.size(), false);
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      if (visited[s]) throw std::invalid_argument("network: cycle detected");
      visited[s] = true;
      ++seen;
      for (int c : kids[s]) stack.push_back(c);
    }
    if (seen != segments.size())
      throw std::invalid_argument("network: disconnected segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const Segment& s = segments[i];
      if (!(s.length > 0.0) || !(s.wave_speed > 0.0) || !(s.density > 0.0))
        throw std::invalid_argument("network: non-positive geometry in " + s.name);
      if (s.area.empty() || s.area.size() != s.area_ref.size())
        throw std::invalid_argument("network: bad area profile in " + s.name);
      for (double a : s.area)
        if (!(a > 0.0))
          throw std::invalid_argument("network: non-positive area in " + s.name);
      for (double a : s.area_ref)
        if (!(a > 0.0))
          throw std::invalid_argument("network: non-positive ref area in " + s.name);
      if (kids[i].empty() && !s.terminal.has_value())
        throw std::invalid_argument("network: leaf without terminal load: " + s.name);
    }
    for (int k = 0; k < kNumSites; ++k) {
      const SitePlacement& sp = sites[k];
      if (sp.segment < 0 || sp.segment >= static_cast<int>(segments.size()))
        throw std::invalid_argument(std::string("network: unresolved site ") +
                                    kSiteNames[k]);
      if (!(sp.fraction >= 0.0 && sp.fraction <= 1.0))
        throw std::invalid_argument(std::string("network: site fraction ") +
                                    kSiteNames[k]);
    }
    for (const auto& c : chains) c.validate();
  }
};

/// Chain id hosting a given disease instance.
inline std::string chain_for(DiseaseKind kind, Side side) {
  std::string prefix;
  switch (kind) {
    case DiseaseKind::CAS: prefix = "CA"; break;
    case DiseaseKind::SAS: prefix = "SA"; break;
    case DiseaseKind::PAD: prefix = "PA"; break;
    case DiseaseKind::AAA:
    case DiseaseKind::AAA_L: return "AA";
  }
  if (side == Side::NotApplicable)
    throw std::invalid_argument("chain_for: stenosis requires a side");
  return prefix + (side == Side::Right ? "_R" : "_L");
}

/// Copy of the network whose chain areas are scaled pointwise against the
/// healthy baseline by the disease area profile. Other segments untouched.
inline ArterialNetworkModel apply_disease(const ArterialNetworkModel& network,
                                          const VesselChain& chain,
                                          const DiseaseSpec& spec) {
  chain.validate();
  const std::string expected = chain_for(spec.kind, spec.side);
  if (chain.id != expected)
    throw std::invalid_argument("apply_disease: " + std::string(to_string(spec.kind)) +
                                " cannot be placed on chain " + chain.id);
  ArterialNetworkModel out = network;
  for (std::size_t k = 0; k < chain.segments.size(); ++k) {
    const int seg_id = chain.segments[k];
    if (seg_id < 0 || seg_id >= static_cast<int>(out.segments.size()))
      throw std::invalid_argument("apply_disease: chain references unknown segment");
    Segment& seg = out.segments[seg_id];
    const double lo = chain.boundaries[k];
    const double hi = chain.boundaries[k + 1];
    const std::size_t nodes = seg.area.size();
    for (std::size_t j = 0; j < nodes; ++j) {
      const double local = (static_cast<double>(j) + 0.5) / static_cast<double>(nodes);
      const double x = lo + (hi - lo) * local;
      seg.area[j] = seg.area_ref[j] * area_multiplier(spec, x);
    }
  }
  return out;
}

/// Subject-level scaling knobs for the reference network.
struct SubjectConfig {
  double heart_period = 0.9;     // s; consumed by the inflow, echoed here
  double wave_speed_scale = 1.0; // multiplies every segment wave speed
  double resistance_scale = 1.0; // multiplies terminal resistances
  double area_scale = 1.0;       // multiplies every cross-section

  void validate() const {
    if (!(heart_period > 0.0) || !(wave_speed_scale > 0.0) ||
        !(resistance_scale > 0.0) || !(area_scale > 0.0))
      throw std::invalid_argument("SubjectConfig: scalings must be positive");
  }
};

namespace detail {

struct SegmentSpec {
  const char* name;
  int parent;
  double length;    // cm
  double area_prox; // cm^2
  double area_dist; // cm^2
  double wave_speed; // cm/s
};

// 71-segment reference tree. Dimensions are artifact defaults assembled from
// standard human arterial tables; the abdominal aorta tapers 1.76 -> 1.09 cm^2
// across its four segments.
inline constexpr SegmentSpec kReferenceSegments[] = {
    {"ascending_aorta", -1, 4.0, 5.30, 5.10, 470},      // 0
    {"aortic_arch_a", 0, 2.0, 4.60, 4.40, 480},         // 1
    {"brachiocephalic", 1, 3.4, 1.21, 1.10, 500},       // 2
    {"aortic_arch_b", 1, 3.9, 4.10, 3.90, 490},         // 3
    {"r_subclavian_i", 2, 3.4, 0.62, 0.56, 520},        // 4
    {"r_common_carotid", 2, 17.0, 0.50, 0.40, 550},     // 5
    {"l_common_carotid", 3, 20.8, 0.50, 0.40, 550},     // 6
    {"l_subclavian_i", 3, 3.4, 0.62, 0.56, 520},        // 7
    {"thoracic_aorta_a", 3, 5.2, 3.60, 3.40, 500},      // 8
    {"r_subclavian_ii", 4, 6.8, 0.55, 0.46, 540},       // 9
    {"r_vertebral", 4, 14.8, 0.084, 0.070, 840},        // 10
    {"r_internal_thoracic", 4, 15.0, 0.080, 0.065, 800}, // 11
    {"r_thyrocervical", 4, 5.0, 0.070, 0.060, 800},     // 12
    {"r_internal_carotid", 5, 17.6, 0.24, 0.17, 700},   // 13
    {"r_external_carotid", 5, 17.7, 0.20, 0.14, 700},   // 14
    {"l_internal_carotid", 6, 17.6, 0.24, 0.17, 700},   // 15
    {"l_external_carotid", 6, 17.7, 0.20, 0.14, 700},   // 16
    {"l_subclavian_ii", 7, 6.8, 0.55, 0.46, 540},       // 17
    {"l_vertebral", 7, 14.8, 0.084, 0.070, 840},        // 18
    {"l_internal_thoracic", 7, 15.0, 0.080, 0.065, 800}, // 19
    {"l_thyrocervical", 7, 5.0, 0.070, 0.060, 800},     // 20
    {"r_brachial", 9, 22.3, 0.44, 0.35, 600},           // 21
    {"l_brachial", 17, 22.3, 0.44, 0.35, 600},          // 22
    {"r_radial", 21, 23.5, 0.110, 0.085, 900},          // 23
    {"r_ulnar_i", 21, 6.7, 0.13, 0.12, 900},            // 24
    {"l_radial", 22, 23.5, 0.110, 0.085, 900},          // 25
    {"l_ulnar_i", 22, 6.7, 0.13, 0.12, 900},            // 26
    {"r_ulnar_ii", 24, 17.1, 0.12, 0.095, 950},         // 27
    {"r_interosseous", 24, 7.9, 0.031, 0.028, 1100},    // 28
    {"l_ulnar_ii", 26, 17.1, 0.12, 0.095, 950},         // 29
    {"l_interosseous", 26, 7.9, 0.031, 0.028, 1100},    // 30
    {"r_coronary", 0, 10.0, 0.090, 0.070, 750},         // 31
    {"l_coronary", 0, 11.0, 0.110, 0.085, 750},         // 32
    {"thoracic_aorta_b", 8, 10.4, 3.20, 2.30, 520},     // 33
    {"intercostals", 33, 8.0, 0.40, 0.32, 600},         // 34
    {"abdominal_aorta_i", 33, 5.3, 1.76, 1.58, 540},    // 35
    {"celiac_trunk", 35, 2.0, 1.02, 0.95, 480},         // 36
    {"hepatic_common", 36, 3.4, 0.55, 0.50, 550},       // 37
    {"hepatic_proper", 37, 6.6, 0.25, 0.15, 600},       // 38
    {"gastroduodenal", 37, 5.0, 0.12, 0.10, 650},       // 39
    {"splenic", 36, 6.3, 0.30, 0.22, 600},              // 40
    {"gastric", 36, 7.1, 0.15, 0.12, 650},              // 41
    {"abdominal_aorta_ii", 35, 1.5, 1.58, 1.42, 545},   // 42
    {"superior_mesenteric", 42, 5.9, 0.55, 0.45, 560},  // 43
    {"abdominal_aorta_iii", 42, 1.5, 1.42, 1.26, 550},  // 44
    {"r_renal", 44, 3.2, 0.35, 0.30, 600},              // 45
    {"l_renal", 44, 3.2, 0.35, 0.30, 600},              // 46
    {"abdominal_aorta_iv", 44, 12.5, 1.26, 1.09, 555},  // 47
    {"inferior_mesenteric", 47, 5.0, 0.15, 0.12, 650},  // 48
    {"r_common_iliac", 47, 5.8, 0.55, 0.50, 600},       // 49
    {"l_common_iliac", 47, 5.8, 0.55, 0.50, 600},       // 50
    {"r_external_iliac", 49, 14.4, 0.40, 0.35, 620},    // 51
    {"r_internal_iliac", 49, 5.0, 0.28, 0.22, 650},     // 52
    {"l_external_iliac", 50, 14.4, 0.40, 0.35, 620},    // 53
    {"l_internal_iliac", 50, 5.0, 0.28, 0.22, 650},     // 54
    {"r_femoral_i", 51, 10.0, 0.32, 0.29, 700},         // 55
    {"r_deep_femoral", 55, 12.6, 0.20, 0.16, 750},      // 56
    {"r_femoral_ii", 55, 10.0, 0.29, 0.26, 720},        // 57
    {"l_femoral_i", 53, 10.0, 0.32, 0.29, 700},         // 58
    {"l_deep_femoral", 58, 12.6, 0.20, 0.16, 750},      // 59
    {"l_femoral_ii", 58, 10.0, 0.29, 0.26, 720},        // 60
    {"r_popliteal_i", 57, 9.4, 0.24, 0.22, 750},        // 61
    {"l_popliteal_i", 60, 9.4, 0.24, 0.22, 750},        // 62
    {"r_popliteal_ii", 61, 9.4, 0.22, 0.20, 780},       // 63
    {"l_popliteal_ii", 62, 9.4, 0.22, 0.20, 780},       // 64
    {"r_anterior_tibial", 63, 30.0, 0.055, 0.045, 1000}, // 65
    {"r_posterior_tibial", 63, 31.0, 0.065, 0.055, 1000}, // 66
    {"r_peroneal", 63, 32.0, 0.055, 0.045, 1050},       // 67
    {"l_anterior_tibial", 64, 30.0, 0.055, 0.045, 1000}, // 68
    {"l_posterior_tibial", 64, 31.0, 0.065, 0.055, 1000}, // 69
    {"l_peroneal", 64, 32.0, 0.055, 0.045, 1050},       // 70
};

inline constexpr int kReferenceSegmentCount =
    static_cast<int>(sizeof(kReferenceSegments) / sizeof(SegmentSpec));

inline VesselChain make_chain(const ArterialNetworkModel& net, std::string id,
                              std::vector<int> segs) {
  VesselChain c;
  c.id = std::move(id);
  c.segments = std::move(segs);
  double total = 0.0;
  for (int s : c.segments) total += net.segments[s].length;
  c.boundaries.push_back(0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < c.segments.size(); ++i) {
    acc += net.segments[c.segments[i]].length;
    c.boundaries.push_back(i + 1 == c.segments.size() ? 1.0 : acc / total);
  }
  return c;
}

} // namespace detail

/// Deterministic 71-segment reference network. Terminal loads distribute the
/// target mean pressure over the leaves with Murray-law (A^1.5) flow shares;
/// the proximal Windkessel resistance matches the leaf's characteristic
/// impedance and each load decays with a common RC time constant.
inline ArterialNetworkModel build_reference_network(
    const SubjectConfig& config, int nodes_per_segment = 32,
    double cardiac_output = 85.0, double target_pressure_mmhg = 93.0,
    double windkessel_tau = 1.3) {
  config.validate();
  if (nodes_per_segment < 1)
    throw std::invalid_argument("build_reference_network: nodes_per_segment < 1");

  constexpr double kDensity = 1.06;        // g/cm^3
  constexpr double kMmHg = 1333.22387415;  // dyn/cm^2 per mmHg

  ArterialNetworkModel net;
  net.segments.reserve(detail::kReferenceSegmentCount);
  for (const auto& spec : detail::kReferenceSegments) {
    Segment s;
    s.name = spec.name;
    s.parent = spec.parent;
    s.length = spec.length;
    s.wave_speed = spec.wave_speed * config.wave_speed_scale;
    s.density = kDensity;
    s.area.resize(nodes_per_segment);
    for (int j = 0; j < nodes_per_segment; ++j) {
      const double x = (j + 0.5) / static_cast<double>(nodes_per_segment);
      const double a = spec.area_prox + (spec.area_dist - spec.area_prox) * x;
      s.area[j] = a * config.area_scale;
    }
    s.area_ref = s.area;
    net.segments.push_back(std::move(s));
  }

  const auto kids = net.children();
  double murray_total = 0.0;
  for (std::size_t i = 0; i < net.segments.size(); ++i)
    if (kids[i].empty())
      murray_total += std::pow(net.segments[i].area.back(), 1.5);

  const double p_target = target_pressure_mmhg * kMmHg;
  for (std::size_t i = 0; i < net.segments.size(); ++i) {
    if (!kids[i].empty()) continue;
    Segment& leaf = net.segments[i];
    const double a_dist = leaf.area.back();
    const double flow_share = std::pow(a_dist, 1.5) / murray_total;
    const double r_total =
        p_target / (cardiac_output * flow_share) * config.resistance_scale;
    const double z_char = leaf.density * leaf.wave_speed / a_dist;
    Windkessel wk;
    wk.proximal_resistance = std::min(z_char, 0.2 * r_total);
    wk.distal_resistance = r_total - wk.proximal_resistance;
    wk.compliance = windkessel_tau / wk.distal_resistance;
    leaf.terminal = wk;
  }

  net.chains.push_back(detail::make_chain(net, "CA_R", {5}));
  net.chains.push_back(detail::make_chain(net, "CA_L", {6}));
  net.chains.push_back(detail::make_chain(net, "SA_R", {4, 9}));
  net.chains.push_back(detail::make_chain(net, "SA_L", {7, 17}));
  net.chains.push_back(detail::make_chain(net, "PA_R", {49, 51, 55, 57, 61}));
  net.chains.push_back(detail::make_chain(net, "PA_L", {50, 53, 58, 60, 62}));
  net.chains.push_back(detail::make_chain(net, "AA", {35, 42, 44, 47}));

  auto site = [&](SiteId id, int segment, double fraction) {
    net.sites[static_cast<int>(id)] = SitePlacement{segment, fraction};
  };
  site(SiteId::Q1R, 5, 0.5);
  site(SiteId::Q1L, 6, 0.5);
  site(SiteId::Q2R, 21, 0.5);
  site(SiteId::Q2L, 22, 0.5);
  site(SiteId::Q3R, 55, 0.5);
  site(SiteId::Q3L, 58, 0.5);
  site(SiteId::P1R, 5, 0.5);
  site(SiteId::P1L, 6, 0.5);
  site(SiteId::P2R, 21, 0.5);
  site(SiteId::P2L, 22, 0.5);
  site(SiteId::P3R, 23, 0.5);
  site(SiteId::P3L, 25, 0.5);

  net.validate();
  return net;
}

} // namespace hemoml
