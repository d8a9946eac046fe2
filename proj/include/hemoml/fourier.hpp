#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hemoml {

/// Truncated Fourier series of a periodic signal,
///   u(t) = b0 + sum_{n=1..N} a_n sin(n w t) + b_n cos(n w t),  w = 2 pi / T.
/// The zeroth sine coefficient is identically zero and not stored, so a
/// series of order N carries 2N+1 numbers (N=5 -> 11).
struct FourierSeries {
  double period = 1.0;
  double b0 = 0.0;
  std::vector<double> a; // a_1..a_N
  std::vector<double> b; // b_1..b_N

  int truncation() const { return static_cast<int>(a.size()); }
  std::size_t coefficient_count() const { return 2 * a.size() + 1; }

  /// Coefficients in feature order: b0, a_1..a_N, b_1..b_N.
  std::vector<double> flattened() const {
    std::vector<double> out;
    out.reserve(coefficient_count());
    out.push_back(b0);
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  static FourierSeries from_flattened(double period, std::span<const double> c) {
    if (c.empty() || c.size() % 2 == 0)
      throw std::invalid_argument("FourierSeries: need 2N+1 coefficients");
    const std::size_t n = (c.size() - 1) / 2;
    FourierSeries fs;
    fs.period = period;
    fs.b0 = c[0];
    fs.a.assign(c.begin() + 1, c.begin() + 1 + n);
    fs.b.assign(c.begin() + 1 + n, c.end());
    return fs;
  }
};

/// Least-squares fit over one period of uniformly spaced samples
/// (t_j = j T / M). For M >= 2N+1 the trigonometric basis is orthogonal on
/// the sample grid, so the fit reduces to the truncated DFT mapping.
inline FourierSeries fit_fourier(std::span<const double> samples, double period,
                                 int truncation) {
  if (truncation < 1) throw std::invalid_argument("fit_fourier: N < 1");
  const std::size_t m = samples.size();
  if (m < static_cast<std::size_t>(2 * truncation + 1))
    throw std::invalid_argument("fit_fourier: need at least 2N+1 samples");
  if (!(period > 0.0)) throw std::invalid_argument("fit_fourier: period <= 0");
  for (double v : samples)
    if (!std::isfinite(v))
      throw std::invalid_argument("fit_fourier: non-finite sample");

  FourierSeries fs;
  fs.period = period;
  fs.a.assign(truncation, 0.0);
  fs.b.assign(truncation, 0.0);

  double mean = 0.0;
  for (double v : samples) mean += v;
  fs.b0 = mean / static_cast<double>(m);

  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int n = 1; n <= truncation; ++n) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double phase = two_pi * n * static_cast<double>(j) / static_cast<double>(m);
      sa += samples[j] * std::sin(phase);
      sb += samples[j] * std::cos(phase);
    }
    fs.a[n - 1] = 2.0 * sa / static_cast<double>(m);
    fs.b[n - 1] = 2.0 * sb / static_cast<double>(m);
  }
  return fs;
}

/// Exact partial sum at time t (periodic in the series period).
inline double evaluate_fourier(const FourierSeries& fs, double t) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double w = two_pi / fs.period;
  double u = fs.b0;
  for (std::size_t n = 0; n < fs.a.size(); ++n) {
    const double phase = w * static_cast<double>(n + 1) * t;
    u += fs.a[n] * std::sin(phase) + fs.b[n] * std::cos(phase);
  }
  return u;
}

/// Uniform samples of the series over one period; convenience for tests and
/// waveform export.
inline std::vector<double> sample_fourier(const FourierSeries& fs, std::size_t m) {
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j)
    out[j] = evaluate_fourier(fs, fs.period * static_cast<double>(j) /
                                      static_cast<double>(m));
  return out;
}

} // namespace hemoml
