#pragma once

// Frequency-domain waveform generator. Each segment is a lossless
// transmission line chained from its axial nodes (characteristic impedance
// rho c / A per node); terminal Windkessels close the leaves. Per harmonic,
// input impedances are composed leaf-to-root and pressure/flow phasors are
// propagated root-to-leaf. Harmonic zero is a resistive network whose branch
// resistances are Poiseuille integrals with the area clamped at the healthy
// baseline, so narrowing adds DC resistance while dilation leaves it alone.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hemoml/fourier.hpp"
#include "hemoml/network.hpp"

namespace hemoml {

inline constexpr double kMmHgPerCgs = 1.0 / 1333.22387415;

/// Periodic root inflow as complex exponential harmonics c_0..c_M of
/// Q(t) = c_0 + sum_{n>=1} 2 Re[c_n exp(i n w t)], in cm^3/s.
struct HeartInflow {
  double period = 1.0;
  std::vector<std::complex<double>> harmonics;

  int max_harmonic() const { return static_cast<int>(harmonics.size()) - 1; }

  void validate() const {
    if (!(period > 0.0)) throw std::invalid_argument("HeartInflow: period <= 0");
    if (harmonics.empty())
      throw std::invalid_argument("HeartInflow: no harmonics");
    if (!(harmonics[0].real() > 0.0) || harmonics[0].imag() != 0.0)
      throw std::invalid_argument("HeartInflow: mean flow must be real positive");
  }
};

/// Half-sine systolic ejection of duration T/3, expanded analytically.
inline HeartInflow make_half_sine_inflow(double period, double peak_flow,
                                         int n_harmonics) {
  if (!(period > 0.0) || !(peak_flow > 0.0) || n_harmonics < 1)
    throw std::invalid_argument("make_half_sine_inflow: bad arguments");
  HeartInflow inflow;
  inflow.period = period;
  const double tau = period / 3.0;
  const double a = M_PI / tau;
  inflow.harmonics.resize(n_harmonics + 1);
  inflow.harmonics[0] = {peak_flow * 2.0 / (3.0 * M_PI), 0.0};
  for (int n = 1; n <= n_harmonics; ++n) {
    const double b = 2.0 * M_PI * n / period;
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -b * tau));
    inflow.harmonics[n] = (peak_flow / period) * a * (1.0 + phase) / (a * a - b * b);
  }
  return inflow;
}

/// Fourier series of every measurement site for one virtual patient.
/// Pressures in mmHg, flow rates in cm^3/s; all series share period and N.
struct WaveformSet {
  std::uint64_t patient_id = 0;
  std::array<FourierSeries, kNumSites> series;

  double period() const { return series[0].period; }
  int truncation() const { return series[0].truncation(); }
};

/// Per-segment phasor states, kept for invariant tests and debugging.
struct SolveDetail {
  struct SegmentState {
    std::vector<std::complex<double>> z_in;  // per harmonic 0..N
    std::vector<std::complex<double>> p_in, q_in, p_out, q_out;
  };
  std::vector<SegmentState> segments;
};

namespace detail {

using cplx = std::complex<double>;

struct Abcd {
  cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

  Abcd times(const Abcd& o) const {
    return Abcd{a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

inline Abcd line_matrix(double theta, double z_char) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  return Abcd{{ct, 0.0}, {0.0, z_char * st}, {0.0, st / z_char}, {ct, 0.0}};
}

// inverse of a unit-determinant ABCD matrix
inline Abcd inverse(const Abcd& m) { return Abcd{m.d, -m.b, -m.c, m.a}; }

inline Abcd segment_matrix(const Segment& seg, double omega) {
  const std::size_t k = seg.area.size();
  const double dl = seg.length / static_cast<double>(k);
  const double theta = omega * dl / seg.wave_speed;
  Abcd m;
  for (std::size_t j = 0; j < k; ++j) {
    const double zc = seg.density * seg.wave_speed / seg.area[j];
    m = m.times(line_matrix(theta, zc));
  }
  return m;
}

// inverse chain from the segment inlet to fraction f of its length
inline Abcd partial_inverse(const Segment& seg, double omega, double fraction) {
  const std::size_t k = seg.area.size();
  const double dl = seg.length / static_cast<double>(k);
  const double scaled = fraction * static_cast<double>(k);
  std::size_t full = static_cast<std::size_t>(std::floor(scaled + 1e-12));
  if (full > k) full = k;
  const double rem = scaled - static_cast<double>(full);
  Abcd inv;
  for (std::size_t j = 0; j < full; ++j) {
    const double zc = seg.density * seg.wave_speed / seg.area[j];
    const double theta = omega * dl / seg.wave_speed;
    inv = inverse(line_matrix(theta, zc)).times(inv);
  }
  if (rem > 1e-12 && full < k) {
    const double zc = seg.density * seg.wave_speed / seg.area[full];
    const double theta = omega * rem * dl / seg.wave_speed;
    inv = inverse(line_matrix(theta, zc)).times(inv);
  }
  return inv;
}

// Clamped Poiseuille resistance of one subsegment per unit length:
// 8 pi mu / min(A, A_ref)^2.
inline double dc_resistance(const Segment& seg, double viscosity,
                            double fraction = 1.0) {
  const std::size_t k = seg.area.size();
  const double dl = seg.length / static_cast<double>(k);
  const double scaled = fraction * static_cast<double>(k);
  std::size_t full = static_cast<std::size_t>(std::floor(scaled + 1e-12));
  if (full > k) full = k;
  const double rem = scaled - static_cast<double>(full);
  double r = 0.0;
  for (std::size_t j = 0; j < full; ++j) {
    const double a = std::min(seg.area[j], seg.area_ref[j]);
    r += 8.0 * M_PI * viscosity * dl / (a * a);
  }
  if (rem > 1e-12 && full < k) {
    const double a = std::min(seg.area[full], seg.area_ref[full]);
    r += 8.0 * M_PI * viscosity * rem * dl / (a * a);
  }
  return r;
}

inline cplx windkessel_impedance(const Windkessel& wk, double omega) {
  const cplx denom(1.0, omega * wk.distal_resistance * wk.compliance);
  return cplx(wk.proximal_resistance, 0.0) + wk.distal_resistance / denom;
}

} // namespace detail

/// Solve the network for truncation order N and read the 12 sites.
/// Pass a SolveDetail to capture per-segment phasor states.
inline WaveformSet solve_network(const ArterialNetworkModel& network,
                                 const HeartInflow& inflow, int truncation,
                                 SolveDetail* detail = nullptr) {
  using detail::cplx;
  network.validate();
  inflow.validate();
  if (truncation < 1)
    throw std::invalid_argument("solve_network: truncation < 1");
  if (truncation > inflow.max_harmonic())
    throw std::invalid_argument("solve_network: N exceeds inflow harmonics");

  const int root = network.root();
  const auto kids = network.children();
  const std::size_t n_seg = network.segments.size();

  // parents-before-children order
  std::vector<int> topo;
  topo.reserve(n_seg);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    topo.push_back(s);
    for (int c : kids[s]) stack.push_back(c);
  }

  const double two_pi = 6.283185307179586476925286766559;

  std::vector<cplx> z_in(n_seg), p_in(n_seg), q_in(n_seg), p_out(n_seg),
      q_out(n_seg);
  std::vector<detail::Abcd> mats(n_seg);
  std::vector<double> r_dc(n_seg);

  if (detail) {
    detail->segments.assign(n_seg, {});
    for (auto& st : detail->segments) {
      st.z_in.resize(truncation + 1);
      st.p_in.resize(truncation + 1);
      st.q_in.resize(truncation + 1);
      st.p_out.resize(truncation + 1);
      st.q_out.resize(truncation + 1);
    }
  }

  std::array<std::vector<cplx>, kNumSites> site_values;
  for (auto& v : site_values) v.resize(truncation + 1);

  for (int n = 0; n <= truncation; ++n) {
    const double omega = two_pi * n / inflow.period;
    if (n == 0) {
      for (std::size_t i = 0; i < n_seg; ++i)
        r_dc[i] = detail::dc_resistance(network.segments[i], network.viscosity);
      for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const int i = *it;
        if (kids[i].empty()) {
          const Windkessel& wk = *network.segments[i].terminal;
          z_in[i] = r_dc[i] + wk.proximal_resistance + wk.distal_resistance;
        } else {
          cplx sum_inv = 0.0;
          for (int c : kids[i]) sum_inv += 1.0 / z_in[c];
          z_in[i] = r_dc[i] + 1.0 / sum_inv;
        }
      }
      q_in[root] = inflow.harmonics[0];
      p_in[root] = z_in[root] * q_in[root];
      for (int i : topo) {
        q_out[i] = q_in[i];
        p_out[i] = p_in[i] - q_in[i] * r_dc[i];
        for (int c : kids[i]) {
          p_in[c] = p_out[i];
          q_in[c] = p_out[i] / z_in[c];
        }
      }
    } else {
      for (std::size_t i = 0; i < n_seg; ++i)
        mats[i] = detail::segment_matrix(network.segments[i], omega);
      for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const int i = *it;
        cplx z_load;
        if (kids[i].empty()) {
          z_load = detail::windkessel_impedance(*network.segments[i].terminal,
                                                omega);
        } else {
          cplx sum_inv = 0.0;
          for (int c : kids[i]) sum_inv += 1.0 / z_in[c];
          z_load = 1.0 / sum_inv;
        }
        const detail::Abcd& m = mats[i];
        z_in[i] = (m.a * z_load + m.b) / (m.c * z_load + m.d);
      }
      q_in[root] = 2.0 * inflow.harmonics[n];
      p_in[root] = z_in[root] * q_in[root];
      for (int i : topo) {
        const detail::Abcd inv = detail::inverse(mats[i]);
        p_out[i] = inv.a * p_in[i] + inv.b * q_in[i];
        q_out[i] = inv.c * p_in[i] + inv.d * q_in[i];
        for (int c : kids[i]) {
          p_in[c] = p_out[i];
          q_in[c] = p_out[i] / z_in[c];
        }
      }
    }

    if (detail) {
      for (std::size_t i = 0; i < n_seg; ++i) {
        auto& st = detail->segments[i];
        st.z_in[n] = z_in[i];
        st.p_in[n] = p_in[i];
        st.q_in[n] = q_in[i];
        st.p_out[n] = p_out[i];
        st.q_out[n] = q_out[i];
      }
    }

    for (int k = 0; k < kNumSites; ++k) {
      const SitePlacement& sp = network.sites[k];
      const Segment& seg = network.segments[sp.segment];
      cplx p_site, q_site;
      if (n == 0) {
        q_site = q_in[sp.segment];
        p_site = p_in[sp.segment] -
                 q_in[sp.segment] *
                     detail::dc_resistance(seg, network.viscosity, sp.fraction);
      } else {
        const detail::Abcd inv =
            detail::partial_inverse(seg, omega, sp.fraction);
        p_site = inv.a * p_in[sp.segment] + inv.b * q_in[sp.segment];
        q_site = inv.c * p_in[sp.segment] + inv.d * q_in[sp.segment];
      }
      site_values[k][n] = site_is_flow(static_cast<SiteId>(k)) ? q_site : p_site;
    }
  }

  WaveformSet out;
  for (int k = 0; k < kNumSites; ++k) {
    const double unit = site_is_flow(static_cast<SiteId>(k)) ? 1.0 : kMmHgPerCgs;
    FourierSeries fs;
    fs.period = inflow.period;
    fs.b0 = site_values[k][0].real() * unit;
    fs.a.resize(truncation);
    fs.b.resize(truncation);
    for (int n = 1; n <= truncation; ++n) {
      fs.a[n - 1] = -site_values[k][n].imag() * unit;
      fs.b[n - 1] = site_values[k][n].real() * unit;
    }
    out.series[k] = std::move(fs);
  }
  return out;
}

} // namespace hemoml
