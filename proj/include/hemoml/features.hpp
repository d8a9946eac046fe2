#pragma once

// Feature assembly: measurement combinations over the Fourier coefficients,
// and Z-score standardisation fitted on training rows only.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemoml/matrix.hpp"
#include "hemoml/surrogate.hpp"

namespace hemoml {

/// The six bilateral measurements in canonical feature order.
enum class Measurement : int { Q1 = 0, Q2, Q3, P1, P2, P3 };

inline constexpr int kNumMeasurements = 6;

inline const char* to_string(Measurement m) {
  switch (m) {
    case Measurement::Q1: return "Q1";
    case Measurement::Q2: return "Q2";
    case Measurement::Q3: return "Q3";
    case Measurement::P1: return "P1";
    case Measurement::P2: return "P2";
    case Measurement::P3: return "P3";
  }
  return "?";
}

inline Measurement measurement_from_string(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), ::toupper);
  if (s == "Q1") return Measurement::Q1;
  if (s == "Q2") return Measurement::Q2;
  if (s == "Q3") return Measurement::Q3;
  if (s == "P1") return Measurement::P1;
  if (s == "P2") return Measurement::P2;
  if (s == "P3") return Measurement::P3;
  throw std::invalid_argument("unknown measurement: " + s);
}

enum class Laterality { Bilateral, RightOnly, LeftOnly };

/// Non-empty subset of the six measurements; bilateral by default, or a
/// single side for the unilateral studies.
struct MeasurementCombination {
  std::vector<Measurement> included; // stored in canonical order, no dups
  Laterality side = Laterality::Bilateral;

  static MeasurementCombination of(std::vector<Measurement> ms,
                                   Laterality lat = Laterality::Bilateral) {
    if (ms.empty())
      throw std::invalid_argument("MeasurementCombination: empty set");
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    return MeasurementCombination{std::move(ms), lat};
  }

  bool contains(Measurement m) const {
    return std::find(included.begin(), included.end(), m) != included.end();
  }

  std::size_t feature_count(int truncation = 5) const {
    const std::size_t per_series = 2 * truncation + 1;
    const std::size_t sides = side == Laterality::Bilateral ? 2 : 1;
    return included.size() * sides * per_series;
  }

  std::string label() const {
    std::string out;
    for (const Measurement m : included) {
      if (!out.empty()) out += "+";
      out += to_string(m);
    }
    if (side == Laterality::RightOnly) out += " (R)";
    if (side == Laterality::LeftOnly) out += " (L)";
    return out;
  }
};

namespace detail {

inline SiteId site_of(Measurement m, bool right) {
  return static_cast<SiteId>(2 * static_cast<int>(m) + (right ? 0 : 1));
}

} // namespace detail

/// Concatenated coefficients in canonical order:
/// (Q1,Q2,Q3,P1,P2,P3) x (R then L) x (b0, a1..aN, b1..bN).
inline std::vector<double> assemble_features(const WaveformSet& waves,
                                             const MeasurementCombination& combo) {
  std::vector<double> out;
  out.reserve(combo.feature_count(waves.truncation()));
  for (const Measurement m : combo.included) {
    for (const bool right : {true, false}) {
      if (right && combo.side == Laterality::LeftOnly) continue;
      if (!right && combo.side == Laterality::RightOnly) continue;
      const SiteId site = detail::site_of(m, right);
      const FourierSeries& fs = waves.series[static_cast<int>(site)];
      if (fs.a.empty())
        throw std::invalid_argument(std::string("assemble_features: site ") +
                                    kSiteNames[static_cast<int>(site)] +
                                    " missing");
      const auto flat = fs.flattened();
      out.insert(out.end(), flat.begin(), flat.end());
    }
  }
  return out;
}

/// Column names matching assemble_features, e.g. Q1_R_b0, Q1_R_a1, ...
inline std::vector<std::string> feature_names(const MeasurementCombination& combo,
                                              int truncation = 5) {
  std::vector<std::string> names;
  names.reserve(combo.feature_count(truncation));
  for (const Measurement m : combo.included) {
    for (const bool right : {true, false}) {
      if (right && combo.side == Laterality::LeftOnly) continue;
      if (!right && combo.side == Laterality::RightOnly) continue;
      const std::string prefix =
          std::string(to_string(m)) + (right ? "_R_" : "_L_");
      names.push_back(prefix + "b0");
      for (int n = 1; n <= truncation; ++n)
        names.push_back(prefix + "a" + std::to_string(n));
      for (int n = 1; n <= truncation; ++n)
        names.push_back(prefix + "b" + std::to_string(n));
    }
  }
  return names;
}

/// Per-feature Z-score statistics, fitted on training rows only. Population
/// standard deviation (divide by M); degenerate columns get std 1 so the
/// transform stays total.
struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> degenerate;
  bool fitted_on_train = true;

  std::size_t size() const { return mean.size(); }
};

inline StandardizationStats fit_standardizer(const Matrix& train) {
  if (train.rows == 0 || train.cols == 0)
    throw std::invalid_argument("fit_standardizer: empty matrix");
  StandardizationStats stats;
  stats.mean.assign(train.cols, 0.0);
  stats.stddev.assign(train.cols, 1.0);
  stats.degenerate.assign(train.cols, false);
  for (std::size_t c = 0; c < train.cols; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) m += train.at(r, c);
    m /= static_cast<double>(train.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) {
      const double d = train.at(r, c) - m;
      var += d * d;
    }
    var /= static_cast<double>(train.rows);
    stats.mean[c] = m;
    if (var > 0.0) {
      stats.stddev[c] = std::sqrt(var);
    } else {
      stats.stddev[c] = 1.0;
      stats.degenerate[c] = true;
    }
  }
  return stats;
}

inline Matrix apply_standardizer(const StandardizationStats& stats,
                                 const Matrix& x) {
  if (x.cols != stats.size())
    throw std::invalid_argument("apply_standardizer: column mismatch");
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c)
      out.at(r, c) = (x.at(r, c) - stats.mean[c]) / stats.stddev[c];
  return out;
}

inline Matrix invert_standardizer(const StandardizationStats& stats,
                                  const Matrix& z) {
  if (z.cols != stats.size())
    throw std::invalid_argument("invert_standardizer: column mismatch");
  Matrix out = z;
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t c = 0; c < z.cols; ++c)
      out.at(r, c) = z.at(r, c) * stats.stddev[c] + stats.mean[c];
  return out;
}

} // namespace hemoml
