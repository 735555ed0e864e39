#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qspec/circuit.hpp"
#include "qspec/error.hpp"
#include "qspec/pauli.hpp"
#include "qspec/rng.hpp"
#include "qspec/simulator.hpp"
#include "qspec/synthesis.hpp"
#include "qspec/timeseries.hpp"

namespace qspec {

//=========================================================================
// Hadamard-test protocol on the maximally mixed state
//=========================================================================

struct Evolution {
  enum class Kind { exact, trotter };
  Kind kind = Kind::exact;
  std::uint32_t trotter_steps = 0;
  SynthesisVariant variant = SynthesisVariant::half_angle;

  static Evolution exact() { return {}; }
  static Evolution trotter(std::uint32_t steps,
                           SynthesisVariant v = SynthesisVariant::half_angle) {
    if (steps == 0) throw value_error("Evolution: trotter steps must be >= 1");
    return {Kind::trotter, steps, v};
  }
};

struct Measurement {
  std::uint64_t shots = 0;  // 0 = exact expectation values

  static Measurement exact() { return {0}; }
  static Measurement sampled(std::uint64_t n) {
    if (n == 0) throw value_error("Measurement: shots must be >= 1");
    return {n};
  }
};

// Two interchangeable realizations of the maximally mixed input: a direct
// I/d density matrix, or Bell-pair purification with garbage qubits held
// in a statevector.
enum class MmsRealization { density_matrix, purified };

// Optional per-gate noise: a depolarizing channel of the given strength
// after every two-qubit gate (density-matrix realization only).
struct NoiseSchedule {
  double depolarizing_after_2q = 0.0;

  bool enabled() const { return depolarizing_after_2q > 0.0; }
};

namespace detail {

inline Circuit repeated_trotter(const Hamiltonian& h, double t,
                                const Evolution& ev, std::uint32_t pointer,
                                std::uint32_t width) {
  Circuit step = controlled_trotter_step(h, t / double(ev.trotter_steps),
                                         ev.variant, pointer,
                                         GateBasis::cx, width);
  Circuit full(width);
  for (std::uint32_t s = 0; s < ev.trotter_steps; ++s) full.append(step);
  return full;
}

inline DensityMatrix apply_with_noise(const DensityMatrix& state,
                                      const Circuit& c,
                                      const NoiseSchedule& noise) {
  DensityMatrix rho = state;
  const QuantumChannel depol =
      QuantumChannel::depolarizing(noise.depolarizing_after_2q, 2);
  for (const auto& g : c.gates()) {
    Circuit one(c.width());
    one.add(g);
    rho = apply_circuit(rho, one);
    if (is_two_qubit(g.kind))
      rho = apply_channel(rho, depol, std::span(g.qubits.data(), 2));
  }
  return rho;
}

template <typename State>
cxd pointer_readout(const State& state, std::uint32_t pointer,
                    const Measurement& mode, std::uint64_t seed) {
  const auto x_obs =
      PauliString::single(state.width(), pointer, PauliOp::X);
  const auto y_obs =
      PauliString::single(state.width(), pointer, PauliOp::Y);
  if (mode.shots == 0)
    return {expectation(state, x_obs), expectation(state, y_obs)};
  const double x =
      sample_expectation(state, x_obs, mode.shots, rng::derive(seed, 1));
  const double y =
      sample_expectation(state, y_obs, mode.shots, rng::derive(seed, 2));
  return {x, y};
}

}  // namespace detail

// One point of the trace-estimation protocol: pointer in |+>, computation
// register maximally mixed, controlled evolution, then <X> + i<Y> on the
// pointer. With exact measurement this equals Tr(U_eff(t)) / d for the
// effective evolution (exact exponential or the Trotter product).
inline cxd hadamard_test_point(const Hamiltonian& h, double t,
                               const Measurement& mode, const Evolution& ev,
                               MmsRealization realization =
                                   MmsRealization::density_matrix,
                               const NoiseSchedule& noise = {},
                               std::uint64_t seed = 0) {
  if (!std::isfinite(t)) throw value_error("hadamard_test_point: bad time");
  const auto n = std::uint32_t(h.num_qubits());
  if (noise.enabled()) {
    if (realization != MmsRealization::density_matrix)
      throw value_error("noise schedule requires the density-matrix backend");
    if (ev.kind != Evolution::Kind::trotter)
      throw value_error("noise schedule requires a gate-level evolution");
  }

  if (realization == MmsRealization::density_matrix) {
    const std::uint32_t width = n + 1, pointer = n;
    const std::uint64_t d = 1ULL << n, dim = 1ULL << width;
    // |+><+| on the pointer (most significant bit) times I/d.
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::uint64_t i = 0; i < d; ++i) {
      rho(i, i) = rho(i, i + d) = rho(i + d, i) = rho(i + d, i + d) =
          1.0 / double(2 * d);
    }
    DensityMatrix state(width, std::move(rho), false);

    if (ev.kind == Evolution::Kind::exact) {
      const Eigen::MatrixXcd u = evolution_operator(h, t);
      Eigen::MatrixXcd cu = Eigen::MatrixXcd::Identity(dim, dim);
      cu.block(d, d, d, d) = u;
      std::vector<std::uint32_t> all(width);
      for (std::uint32_t q = 0; q < width; ++q) all[q] = q;
      state = apply_unitary(state, cu, all);
    } else {
      const Circuit c = detail::repeated_trotter(h, t, ev, pointer, width);
      state = noise.enabled() ? detail::apply_with_noise(state, c, noise)
                              : apply_circuit(state, c);
    }
    return detail::pointer_readout(state, pointer, mode, seed);
  }

  // Purified realization: n Bell pairs plus the pointer.
  const std::uint32_t width = 2 * n + 1, pointer = 2 * n;
  StateVector psi = StateVector::zero(width);
  {
    Circuit prep(width);
    for (std::uint32_t k = 0; k < n; ++k) {
      prep.h(n + k);
      prep.cx(n + k, k);
    }
    prep.h(pointer);
    psi = apply_circuit(psi, prep);
  }
  if (ev.kind == Evolution::Kind::exact) {
    const std::uint64_t d = 1ULL << n;
    const Eigen::MatrixXcd u = evolution_operator(h, t);
    Eigen::MatrixXcd cu = Eigen::MatrixXcd::Identity(2 * d, 2 * d);
    cu.block(d, d, d, d) = u;
    std::vector<std::uint32_t> targets(n + 1);
    for (std::uint32_t q = 0; q < n; ++q) targets[q] = q;
    targets[n] = pointer;  // control bit is the sub-index MSB
    psi = apply_unitary(psi, cu, targets);
  } else {
    psi = apply_circuit(psi, detail::repeated_trotter(h, t, ev, pointer, width));
  }
  return detail::pointer_readout(psi, pointer, mode, seed);
}

// Full series on the grid 0, dt, ..., T; per-point seeds derive from the
// root seed keyed on the grid index.
inline TimeSeries run_hadamard_series(const Hamiltonian& h, double total_time,
                                      double dt, const Measurement& mode,
                                      const Evolution& ev,
                                      MmsRealization realization =
                                          MmsRealization::density_matrix,
                                      const NoiseSchedule& noise = {},
                                      std::uint64_t root_seed = 0) {
  const auto times = TimeSeries::uniform_grid(total_time, dt);
  std::vector<cxd> values(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    values[i] = hadamard_test_point(h, times[i], mode, ev, realization, noise,
                                    rng::derive(root_seed, 0x74696d65ULL, i));
  SeriesMeta meta;
  meta.shots = mode.shots;
  meta.trotter_steps = ev.kind == Evolution::Kind::trotter ? ev.trotter_steps : 0;
  meta.variant = ev.kind == Evolution::Kind::trotter ? variant_tag(ev.variant) : '-';
  meta.seed = root_seed;
  return TimeSeries(times, std::move(values), meta);
}

// Gate-level circuit for one protocol execution: Bell-pair preparation,
// pointer superposition, controlled Trotter evolution, and the X-basis
// readout rotation on the pointer. Logical order: computation 0..n-1,
// garbage n..2n-1, pointer 2n (matching protocol_layout).
inline Circuit protocol_circuit(
    const Hamiltonian& h, double t, std::uint32_t trotter_steps,
    SynthesisVariant variant, GateBasis basis = GateBasis::native_rzz,
    const CouplingGraph* graph = nullptr,
    const std::vector<std::uint32_t>* layout = nullptr) {
  if (trotter_steps == 0)
    throw value_error("protocol_circuit: trotter steps must be >= 1");
  const auto n = std::uint32_t(h.num_qubits());
  const std::uint32_t width = 2 * n + 1, pointer = 2 * n;

  Circuit c(width);
  const Circuit prep = mms_prep_circuit(n);
  for (const auto& g : prep.gates()) c.add(g);
  c.h(pointer);
  const Circuit step =
      controlled_trotter_step(h, t / double(trotter_steps), variant, pointer,
                              basis, width, graph, layout);
  for (std::uint32_t s = 0; s < trotter_steps; ++s) c.append(step);
  c.h(pointer);
  return c;
}

//=========================================================================
// Classical stochastic-sampling baseline
//=========================================================================

// Random-phase state (1/sqrt(S)) sum_j e^{i theta_j} |E_j>, S = 2^n, over
// the computational basis or the eigenbasis of an auxiliary Hamiltonian.
struct StochasticSample {
  StateVector state;
  std::uint64_t seed;
};

inline StochasticSample stochastic_state(std::uint32_t n, std::uint64_t seed,
                                         const Hamiltonian* aux_basis = nullptr) {
  const std::uint64_t d = 1ULL << n;
  auto eng = rng::engine(rng::derive(seed, 0x70686173ULL));
  Eigen::VectorXcd amps(d);
  const double norm = 1.0 / std::sqrt(double(d));
  for (std::uint64_t j = 0; j < d; ++j) {
    const double theta = rng::uniform(eng, 0.0, 2.0 * M_PI);
    amps(j) = norm * std::exp(cxd(0.0, theta));
  }
  if (aux_basis != nullptr) {
    if (aux_basis->num_qubits() != n)
      throw value_error("stochastic_state: auxiliary basis size mismatch");
    amps = (diagonalize(*aux_basis, true).eigenvectors * amps).eval();
  }
  return {StateVector(n, std::move(amps)), seed};
}

struct Propagator {
  enum class Kind { exact, euler };
  Kind kind = Kind::exact;
  double euler_dt = 0.0;

  static Propagator exact() { return {}; }
  // Truncated propagator (I - iH dt)^k, applied without renormalization.
  static Propagator euler(double inner_dt) {
    if (!(inner_dt > 0.0)) throw value_error("Propagator: euler dt must be > 0");
    return {Kind::euler, inner_dt};
  }
};

struct StochasticRun {
  TimeSeries average;
  std::vector<TimeSeries> samples;
  double max_norm_drift = 0.0;
  std::vector<std::string> warnings;
};

// K random-phase autocorrelations <psi| U(t) |psi> on a uniform grid and
// their sample mean. The Euler propagator tracks norm drift and reports a
// warning above 10% instead of silently renormalizing.
inline StochasticRun run_stochastic_series(const Hamiltonian& h, std::size_t K,
                                           double total_time, double dt,
                                           const Propagator& prop,
                                           std::uint64_t root_seed,
                                           bool keep_samples = false) {
  if (K == 0) throw value_error("run_stochastic_series: K must be >= 1");
  const auto times = TimeSeries::uniform_grid(total_time, dt);
  const auto n = std::uint32_t(h.num_qubits());
  const Spectrum spec = diagonalize(h, true);

  Eigen::MatrixXcd h_dense;
  std::size_t inner_steps = 0;
  if (prop.kind == Propagator::Kind::euler) {
    h_dense = to_dense(h);
    const double steps_real = dt / prop.euler_dt;
    inner_steps = std::size_t(std::llround(steps_real));
    if (inner_steps < 1 ||
        std::abs(steps_real - double(inner_steps)) > 1e-9 * steps_real)
      throw value_error("run_stochastic_series: grid dt must be a multiple "
                        "of the euler step");
  }

  StochasticRun run{TimeSeries(times, std::vector<cxd>(times.size(), 1.0)), {}, 0.0, {}};
  std::vector<cxd> mean(times.size(), cxd(0.0, 0.0));

  for (std::size_t k = 0; k < K; ++k) {
    const auto sample =
        stochastic_state(n, rng::derive(root_seed, 0x73746f63ULL, k));
    std::vector<cxd> vals(times.size());

    if (prop.kind == Propagator::Kind::exact) {
      const Eigen::VectorXcd overlap =
          spec.eigenvectors.adjoint() * sample.state.amplitudes();
      const Eigen::VectorXd weights = overlap.cwiseAbs2();
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] == 0.0) {  // U(0) = I for a normalized state
          vals[i] = cxd(1.0, 0.0);
          continue;
        }
        cxd v(0.0, 0.0);
        for (Eigen::Index j = 0; j < weights.size(); ++j)
          v += weights(j) *
               std::exp(cxd(0.0, -spec.all_eigenvalues(j) * times[i]));
        vals[i] = v;
      }
    } else {
      Eigen::VectorXcd phi = sample.state.amplitudes();
      const double step = dt / double(inner_steps);
      vals[0] = cxd(1.0, 0.0);
      for (std::size_t i = 1; i < times.size(); ++i) {
        for (std::size_t s = 0; s < inner_steps; ++s)
          phi = (phi - cxd(0.0, step) * (h_dense * phi)).eval();
        vals[i] = sample.state.amplitudes().dot(phi);
        run.max_norm_drift =
            std::max(run.max_norm_drift, std::abs(phi.norm() - 1.0));
      }
    }

    for (std::size_t i = 0; i < times.size(); ++i) mean[i] += vals[i];
    if (keep_samples) {
      SeriesMeta meta;
      meta.seed = sample.seed;
      run.samples.emplace_back(times, std::move(vals), meta);
    }
  }

  for (auto& v : mean) v /= double(K);
  SeriesMeta meta;
  meta.seed = root_seed;
  run.average = TimeSeries(times, std::move(mean), meta);
  if (run.max_norm_drift > 0.10)
    run.warnings.push_back(
        "euler propagator norm drift exceeded 10%; shrink the inner step");
  return run;
}

//=========================================================================
// Maximally-mixed-state lifetime under relaxation
//=========================================================================

struct MmsLifetimePoint {
  double time;
  double fidelity_mms;  // vs I/2^n after tracing out the garbage register
  double p_all_zeros;
};

// Bell pairs idling under amplitude damping on every qubit; reports the
// fidelity of the reduced computation state with I/d and the probability
// of the all-zeros outcome.
inline std::vector<MmsLifetimePoint> mms_lifetime_experiment(
    std::uint32_t n, std::span<const double> t1_per_qubit,
    std::span<const double> idle_times) {
  if (n == 0) throw value_error("mms_lifetime_experiment: n must be >= 1");
  std::vector<double> t1(t1_per_qubit.begin(), t1_per_qubit.end());
  if (t1.size() == 1) t1.assign(2 * n, t1.front());
  if (t1.size() != 2 * n)
    throw value_error("mms_lifetime_experiment: need one T1 per qubit");
  for (double v : t1)
    if (!(v > 0.0)) throw value_error("mms_lifetime_experiment: T1 must be > 0");

  const StateVector bell =
      apply_circuit(StateVector::zero(2 * n), mms_prep_circuit(n));
  const DensityMatrix fresh = DensityMatrix::from_state(bell);
  std::vector<std::uint32_t> keep(n);
  for (std::uint32_t q = 0; q < n; ++q) keep[q] = q;
  const DensityMatrix target = DensityMatrix::maximally_mixed(n);

  std::vector<MmsLifetimePoint> out;
  for (double t : idle_times) {
    DensityMatrix rho = fresh;
    for (std::uint32_t q = 0; q < 2 * n; ++q) {
      const std::uint32_t target_q[1] = {q};
      rho = apply_channel(
          rho, QuantumChannel::amplitude_damping(damping_strength(t, t1[q])),
          target_q);
    }
    const DensityMatrix reduced = partial_trace(rho, keep);
    out.push_back({t, fidelity(reduced, target), reduced.entries()(0, 0).real()});
  }
  return out;
}

}  // namespace qspec
