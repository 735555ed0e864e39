#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qspec/error.hpp"
#include "qspec/timeseries.hpp"

namespace qspec {

//=========================================================================
// Power spectra
//=========================================================================

// Two-sided spectrum on the grid omega_k = k * 2pi/(N dt) covering
// [-pi/dt, pi/dt). Magnitudes are |dt * sum_n u_n e^{+i omega t_n}|, the
// discrete stand-in for |integral u(t) e^{+i omega t} dt|, so a component
// e^{-i lambda t} peaks at omega = lambda.
struct PowerSpectrum {
  std::vector<double> frequencies;
  std::vector<double> magnitudes;
  bool max_normalized = false;

  double domega() const {
    return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
  }
};

struct DftOptions {
  bool normalize = false;  // divide magnitudes by the maximum
  bool hann = false;       // apply a Hann window before transforming
};

inline PowerSpectrum dft(const TimeSeries& series, DftOptions opts = {}) {
  const std::size_t n = series.size();
  if (n < 4) throw value_error("dft: needs >= 4 samples");
  const double dt = series.dt();

  std::vector<std::complex<double>> data(series.values());
  if (opts.hann) {
    for (std::size_t i = 0; i < n; ++i)
      data[i] *= 0.5 * (1.0 - std::cos(2.0 * M_PI * double(i) / double(n - 1)));
  }

  // fwd computes sum_n x_n e^{-2pi i kn/N}; conjugation flips the sign.
  for (auto& v : data) v = std::conj(v);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> transformed;
  fft.fwd(transformed, data);

  const double domega = 2.0 * M_PI / (double(n) * dt);
  PowerSpectrum spec;
  spec.frequencies.resize(n);
  spec.magnitudes.resize(n);
  const std::int64_t half = std::int64_t((n + 1) / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t m =
        (std::int64_t(k) < half) ? std::int64_t(k) : std::int64_t(k) - std::int64_t(n);
    const std::size_t pos = std::size_t(m + std::int64_t(n) - half) %
                            n;  // ascending-frequency position
    spec.frequencies[pos] = double(m) * domega;
    spec.magnitudes[pos] = std::abs(transformed[k]) * dt;
  }

  if (opts.normalize) {
    const double mx =
        *std::max_element(spec.magnitudes.begin(), spec.magnitudes.end());
    if (mx > 0.0)
      for (auto& m : spec.magnitudes) m /= mx;
    spec.max_normalized = true;
  }
  return spec;
}

//=========================================================================
// Grid interpolation
//=========================================================================

// Local quadratic through the three source points nearest each target
// time; exact on quadratic polynomials. Targets must lie inside the
// source span.
inline TimeSeries interpolate_quadratic(const TimeSeries& series,
                                        const std::vector<double>& target) {
  const auto& ts = series.times();
  const auto& vs = series.values();
  const double t0 = ts.front(), dt = series.dt();
  const std::size_t n = ts.size();
  if (n < 3) throw value_error("interpolate_quadratic: needs >= 3 points");

  std::vector<std::complex<double>> out;
  out.reserve(target.size());
  const double span_tol = 1e-9 * std::max(1.0, std::abs(ts.back()));
  for (double t : target) {
    if (t < ts.front() - span_tol || t > ts.back() + span_tol)
      throw value_error("interpolate_quadratic: target outside source span");
    auto center = std::int64_t(std::llround((t - t0) / dt));
    center = std::clamp<std::int64_t>(center, 1, std::int64_t(n) - 2);
    const double x = (t - (t0 + double(center) * dt)) / dt;  // in [-1, 1]
    const auto &ym = vs[center - 1], &y0 = vs[center], &yp = vs[center + 1];
    out.push_back(y0 + 0.5 * x * (yp - ym) +
                  0.5 * x * x * (yp - 2.0 * y0 + ym));
  }
  return TimeSeries(target, std::move(out), series.meta());
}

//=========================================================================
// Peak extraction
//=========================================================================

struct Peak {
  double omega;      // sub-bin refined position
  double magnitude;  // magnitude at the bin maximum
  std::size_t bin;
};

struct PeakSet {
  std::vector<Peak> peaks;
  double threshold = 0.0;  // absolute magnitude cutoff used
};

// Local maxima above threshold * max, refined by a quadratic fit through
// the three bins around each maximum.
inline PeakSet find_peaks(const PowerSpectrum& spec, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw value_error("find_peaks: threshold must lie in (0, 1)");
  const auto& mag = spec.magnitudes;
  if (mag.size() < 3) throw value_error("find_peaks: spectrum too short");

  PeakSet out;
  const double mx = *std::max_element(mag.begin(), mag.end());
  out.threshold = threshold * mx;
  if (mx <= 0.0) return out;

  const double domega = spec.domega();
  for (std::size_t i = 1; i + 1 < mag.size(); ++i) {
    if (!(mag[i] > mag[i - 1] && mag[i] > mag[i + 1])) continue;
    if (mag[i] <= out.threshold) continue;
    const double denom = mag[i - 1] - 2.0 * mag[i] + mag[i + 1];
    double shift = 0.0;
    if (denom < 0.0)
      shift = std::clamp(0.5 * (mag[i - 1] - mag[i + 1]) / denom, -0.5, 0.5);
    out.peaks.push_back({spec.frequencies[i] + shift * domega, mag[i], i});
  }
  return out;
}

}  // namespace qspec
