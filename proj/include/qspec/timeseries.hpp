#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qspec/error.hpp"

namespace qspec {

struct SeriesMeta {
  double dt = 0.0;
  double total_time = 0.0;
  std::uint64_t shots = 0;        // 0 = exact expectation values
  std::uint32_t trotter_steps = 0;  // 0 = exact exponential
  char variant = '-';
  std::uint64_t seed = 0;
};

// Complex samples on a uniform time grid 0, dt, ..., T.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> times, std::vector<std::complex<double>> values,
             SeriesMeta meta = {})
      : times_(std::move(times)), values_(std::move(values)), meta_(meta) {
    if (times_.size() != values_.size())
      throw value_error("TimeSeries: times/values length mismatch");
    if (times_.size() < 2) throw value_error("TimeSeries: needs >= 2 points");
    const double dt = (times_.back() - times_.front()) / double(times_.size() - 1);
    if (!(dt > 0.0)) throw value_error("TimeSeries: grid not increasing");
    const double tol = 1e-12 * std::max(1.0, std::abs(times_.back()));
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (std::abs(times_[i] - (times_.front() + double(i) * dt)) > tol)
        throw value_error("TimeSeries: grid not uniform");
      if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
        throw value_error("TimeSeries: non-finite value");
    }
    meta_.dt = dt;
    meta_.total_time = times_.back() - times_.front();
  }

  // Grid 0, dt, ..., T; T must be an integer multiple of dt.
  static std::vector<double> uniform_grid(double total_time, double dt) {
    if (!(total_time > 0.0) || !(dt > 0.0) || dt > total_time)
      throw value_error("uniform_grid: need 0 < dt <= T");
    const double steps_real = total_time / dt;
    const auto steps = std::size_t(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - double(steps)) > 1e-9 * steps_real)
      throw value_error("uniform_grid: T must be a multiple of dt");
    std::vector<double> times(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
      times[i] = total_time * double(i) / double(steps);
    return times;
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::complex<double>>& values() const { return values_; }
  const SeriesMeta& meta() const { return meta_; }
  SeriesMeta& meta() { return meta_; }
  std::size_t size() const { return times_.size(); }
  double dt() const { return meta_.dt; }

 private:
  std::vector<double> times_;
  std::vector<std::complex<double>> values_;
  SeriesMeta meta_;
};

}  // namespace qspec
