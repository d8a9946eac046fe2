#pragma once

// Parametric arterial disease: the cosine area profile and the sequential
// uniform sampler for its parameters.

#include <cmath>
#include <stdexcept>
#include <string>

#include "hemoml/rng.hpp"

namespace hemoml {

enum class DiseaseKind { CAS, SAS, PAD, AAA, AAA_L };
enum class Side { Left, Right, NotApplicable };

inline bool is_stenosis(DiseaseKind k) {
  return k == DiseaseKind::CAS || k == DiseaseKind::SAS || k == DiseaseKind::PAD;
}
inline bool is_aneurysm(DiseaseKind k) {
  return k == DiseaseKind::AAA || k == DiseaseKind::AAA_L;
}

inline const char* to_string(DiseaseKind k) {
  switch (k) {
    case DiseaseKind::CAS: return "CAS";
    case DiseaseKind::SAS: return "SAS";
    case DiseaseKind::PAD: return "PAD";
    case DiseaseKind::AAA: return "AAA";
    case DiseaseKind::AAA_L: return "AAA_L";
  }
  return "?";
}

inline DiseaseKind disease_kind_from_string(const std::string& s) {
  if (s == "CAS" || s == "cas") return DiseaseKind::CAS;
  if (s == "SAS" || s == "sas") return DiseaseKind::SAS;
  if (s == "PAD" || s == "pad") return DiseaseKind::PAD;
  if (s == "AAA" || s == "aaa") return DiseaseKind::AAA;
  if (s == "AAA_L" || s == "aaa_l" || s == "aaa-l" || s == "AAA-L")
    return DiseaseKind::AAA_L;
  throw std::invalid_argument("unknown disease kind: " + s);
}

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Left: return "L";
    case Side::Right: return "R";
    case Side::NotApplicable: return "NA";
  }
  return "?";
}

inline Side side_from_string(const std::string& s) {
  if (s == "L") return Side::Left;
  if (s == "R") return Side::Right;
  if (s == "NA") return Side::NotApplicable;
  throw std::invalid_argument("unknown side: " + s);
}

/// Severity bounds per kind. Stenosis severity is the fractional area
/// reduction at the profile midpoint; aneurysm severity is the multiple of
/// healthy area added there.
struct SeverityBounds {
  double lo;
  double hi;
};

inline SeverityBounds severity_bounds(DiseaseKind k) {
  switch (k) {
    case DiseaseKind::CAS:
    case DiseaseKind::SAS:
    case DiseaseKind::PAD: return {0.50, 0.95};
    case DiseaseKind::AAA: return {7.13, 25.93};
    case DiseaseKind::AAA_L: return {3.0, 7.0};
  }
  return {0.0, 0.0};
}

/// One sampled disease instance on a vessel chain. Coordinates b, r, e are
/// normalised positions along the chain.
struct DiseaseSpec {
  DiseaseKind kind = DiseaseKind::CAS;
  double severity = 0.0;
  double start = 0.0;     // b
  double end = 0.0;       // e
  double reference = 0.0; // r
  Side side = Side::NotApplicable;

  /// Throws std::invalid_argument on any violated bound. severity == 0 is
  /// accepted as an explicit identity probe used by tests.
  void validate() const {
    if (!(0.2 <= reference && reference <= 0.8))
      throw std::invalid_argument("DiseaseSpec: r outside [0.2, 0.8]");
    if (!(0.1 <= start && start <= reference - 0.05))
      throw std::invalid_argument("DiseaseSpec: b outside [0.1, r-0.05]");
    if (!(reference + 0.05 <= end && end <= 0.9))
      throw std::invalid_argument("DiseaseSpec: e outside [r+0.05, 0.9]");
    if (severity != 0.0) {
      const auto sb = severity_bounds(kind);
      if (!(sb.lo <= severity && severity <= sb.hi))
        throw std::invalid_argument("DiseaseSpec: severity outside bounds");
    }
    const bool wants_side = is_stenosis(kind);
    if (wants_side && side == Side::NotApplicable)
      throw std::invalid_argument("DiseaseSpec: stenosis requires a side");
    if (!wants_side && side != Side::NotApplicable)
      throw std::invalid_argument("DiseaseSpec: aneurysm carries no side");
  }
};

/// Build a spec from uniform quantiles in [0,1], in the sampling order
/// r, b, e, S, side. Exposed so tests can drive degenerate streams.
inline DiseaseSpec disease_from_quantiles(DiseaseKind kind, double qr,
                                          double qb, double qe, double qs,
                                          double qside) {
  DiseaseSpec spec;
  spec.kind = kind;
  spec.reference = 0.2 + qr * (0.8 - 0.2);
  spec.start = 0.1 + qb * ((spec.reference - 0.05) - 0.1);
  spec.end = (spec.reference + 0.05) + qe * (0.9 - (spec.reference + 0.05));
  const auto sb = severity_bounds(kind);
  spec.severity = sb.lo + qs * (sb.hi - sb.lo);
  spec.side = is_stenosis(kind)
                  ? (qside < 0.5 ? Side::Left : Side::Right)
                  : Side::NotApplicable;
  return spec;
}

/// Sequential uniform sampling of r, b, e, S (and a fair side pick for the
/// stenosis kinds). Bounds are constructed valid, so no error path.
inline DiseaseSpec sample_disease(DiseaseKind kind, RngStream& rng) {
  const double qr = rng.u01();
  const double qb = rng.u01();
  const double qe = rng.u01();
  const double qs = rng.u01();
  const double qside = is_stenosis(kind) ? rng.u01() : 0.0;
  return disease_from_quantiles(kind, qr, qb, qe, qs, qside);
}

/// Normalised area ratio at chain coordinate x. Identity outside [b, e];
/// inside, a raised cosine that dips to 1-S (stenosis) or peaks at 1+S
/// (aneurysm) at the profile midpoint and returns to 1 at both edges.
inline double area_multiplier(const DiseaseSpec& spec, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("area_multiplier: x outside [0, 1]");
  if (x < spec.start || x > spec.end) return 1.0;
  const double half = 0.5 * spec.severity;
  const double phase =
      2.0 * (x - spec.start) * M_PI / (spec.end - spec.start);
  if (is_stenosis(spec.kind)) return (1.0 - half) + half * std::cos(phase);
  return (1.0 + half) - half * std::cos(phase);
}

} // namespace hemoml
