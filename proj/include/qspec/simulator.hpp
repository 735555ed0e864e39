#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qspec/circuit.hpp"
#include "qspec/error.hpp"
#include "qspec/pauli.hpp"
#include "qspec/rng.hpp"

namespace qspec {

inline constexpr std::uint32_t kStateVectorWidthGuard = 22;
inline constexpr std::uint32_t kDensityMatrixWidthGuard = 10;

//=========================================================================
// States
//=========================================================================

class StateVector {
 public:
  static StateVector zero(std::uint32_t width) {
    check_width(width);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1LL << width);
    v(0) = 1.0;
    return StateVector(width, std::move(v), false);
  }

  StateVector(std::uint32_t width, Eigen::VectorXcd amplitudes)
      : StateVector(width, std::move(amplitudes), true) {}

  std::uint32_t width() const { return width_; }
  std::uint64_t dim() const { return 1ULL << width_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }

 private:
  StateVector(std::uint32_t width, Eigen::VectorXcd v, bool validate)
      : width_(width), amps_(std::move(v)) {
    check_width(width_);
    if (amps_.size() != Eigen::Index(1LL << width_))
      throw value_error("StateVector: amplitude count != 2^width");
    if (validate && std::abs(amps_.norm() - 1.0) > 1e-10)
      throw value_error("StateVector: not normalized");
  }

  static void check_width(std::uint32_t w) {
    if (w == 0 || w > kStateVectorWidthGuard)
      throw value_error("StateVector width out of supported range");
  }

  std::uint32_t width_;
  Eigen::VectorXcd amps_;
};

class DensityMatrix {
 public:
  static DensityMatrix maximally_mixed(std::uint32_t width) {
    check_width(width);
    const std::uint64_t d = 1ULL << width;
    return DensityMatrix(width,
                         Eigen::MatrixXcd::Identity(d, d) / double(d), false);
  }

  static DensityMatrix from_state(const StateVector& psi) {
    return DensityMatrix(psi.width(),
                         psi.amplitudes() * psi.amplitudes().adjoint(), false);
  }

  DensityMatrix(std::uint32_t width, Eigen::MatrixXcd entries,
                bool validate = true)
      : width_(width), rho_(std::move(entries)) {
    check_width(width_);
    const Eigen::Index d = Eigen::Index(1LL << width_);
    if (rho_.rows() != d || rho_.cols() != d)
      throw value_error("DensityMatrix: dimension != 2^width");
    if (validate) this->validate();
  }

  void validate() const {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw value_error("DensityMatrix: not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho_.trace().imag()) > 1e-10)
      throw value_error("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_,
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
      throw value_error("DensityMatrix: not positive semidefinite");
  }

  std::uint32_t width() const { return width_; }
  std::uint64_t dim() const { return 1ULL << width_; }
  const Eigen::MatrixXcd& entries() const { return rho_; }
  Eigen::MatrixXcd& entries() { return rho_; }

 private:
  static void check_width(std::uint32_t w) {
    if (w == 0 || w > kDensityMatrixWidthGuard)
      throw value_error("DensityMatrix width out of supported range");
  }

  std::uint32_t width_;
  Eigen::MatrixXcd rho_;
};

//=========================================================================
// Channels
//=========================================================================

class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<Eigen::MatrixXcd> kraus_ops)
      : kraus_(std::move(kraus_ops)) {
    if (kraus_.empty()) throw value_error("channel needs >= 1 Kraus operator");
    const Eigen::Index d = kraus_.front().rows();
    if (d < 2 || (d & (d - 1)) != 0)
      throw value_error("Kraus dimension must be a power of two");
    num_qubits_ = 0;
    for (Eigen::Index x = d; x > 1; x >>= 1) ++num_qubits_;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& k : kraus_) {
      if (k.rows() != d || k.cols() != d)
        throw value_error("Kraus operators must share one square dimension");
      sum += k.adjoint() * k;
    }
    if ((sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
      throw value_error("channel is not trace preserving");
  }

  // E(rho) = (1-p) rho + p Tr(rho) I/2^nq.
  static QuantumChannel depolarizing(double p, std::uint32_t nq = 1) {
    if (!(p >= 0.0 && p <= 1.0))
      throw value_error("depolarizing: p must lie in [0, 1]");
    if (nq == 0 || nq > 2) throw value_error("depolarizing: 1 or 2 qubits");
    const std::uint64_t d = 1ULL << nq;
    const double npaulis = double(d * d);
    std::vector<Eigen::MatrixXcd> ops;
    for (std::uint64_t code = 0; code < d * d; ++code) {
      std::vector<PauliOp> letters;
      std::uint64_t c = code;
      for (std::uint32_t q = 0; q < nq; ++q, c /= 4)
        letters.push_back(static_cast<PauliOp>(c % 4));
      const PauliString ps{letters};
      const std::uint64_t mask = ps.flip_mask();
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
      for (std::uint64_t col = 0; col < d; ++col)
        m(col ^ mask, col) = ps.phase(col);
      const double w = (code == 0) ? 1.0 - p * (npaulis - 1.0) / npaulis
                                   : p / npaulis;
      if (w > 0.0) ops.push_back(std::sqrt(w) * m);
    }
    return QuantumChannel(std::move(ops));
  }

  static QuantumChannel amplitude_damping(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw value_error("amplitude_damping: gamma must lie in [0, 1]");
    Eigen::MatrixXcd k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    return QuantumChannel({k0, k1});
  }

  std::uint32_t num_qubits() const { return num_qubits_; }
  const std::vector<Eigen::MatrixXcd>& kraus_ops() const { return kraus_; }

 private:
  std::vector<Eigen::MatrixXcd> kraus_;
  std::uint32_t num_qubits_;
};

// Maps idle time under relaxation to a damping strength.
inline double damping_strength(double idle_time, double t1) {
  if (!(t1 > 0.0)) throw value_error("damping_strength: T1 must be > 0");
  if (idle_time < 0.0) throw value_error("damping_strength: negative time");
  return 1.0 - std::exp(-idle_time / t1);
}

//=========================================================================
// Applying circuits, matrices, channels
//=========================================================================

namespace detail {

// Applies an arbitrary 2^k x 2^k matrix to the listed qubits of an
// amplitude vector. Qubit order in `qubits` maps to sub-index bits, first
// entry least significant.
template <typename Vec>
void apply_matrix(Vec&& v, std::uint32_t width, const Eigen::MatrixXcd& m,
                  std::span<const std::uint32_t> qubits) {
  const std::uint32_t k = std::uint32_t(qubits.size());
  const std::uint64_t sub = 1ULL << k;
  std::uint64_t listed = 0;
  for (auto q : qubits) {
    if (q >= width) throw value_error("apply_matrix: qubit out of range");
    if (listed & (1ULL << q)) throw value_error("apply_matrix: repeated qubit");
    listed |= 1ULL << q;
  }
  if (m.rows() != Eigen::Index(sub) || m.cols() != Eigen::Index(sub))
    throw value_error("apply_matrix: matrix dimension mismatch");

  Eigen::VectorXcd scratch(sub);
  const std::uint64_t dim = 1ULL << width;
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & listed) continue;  // enumerate listed-bits-clear bases
    for (std::uint64_t j = 0; j < sub; ++j) {
      std::uint64_t idx = base;
      for (std::uint32_t b = 0; b < k; ++b)
        if ((j >> b) & 1ULL) idx |= 1ULL << qubits[b];
      scratch(j) = v[idx];
    }
    Eigen::VectorXcd out = m * scratch;
    for (std::uint64_t j = 0; j < sub; ++j) {
      std::uint64_t idx = base;
      for (std::uint32_t b = 0; b < k; ++b)
        if ((j >> b) & 1ULL) idx |= 1ULL << qubits[b];
      v[idx] = out(j);
    }
  }
}

// rho -> A rho A^dagger for a (not necessarily unitary) operator acting on
// a qubit subset, via two column passes: A rho A^+ = (A (A rho)^+)^+.
inline void conjugate_matrix(Eigen::MatrixXcd& rho, std::uint32_t width,
                             const Eigen::MatrixXcd& m,
                             std::span<const std::uint32_t> qubits) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index col = 0; col < rho.cols(); ++col)
      apply_matrix(rho.col(col), width, m, qubits);
    rho.adjointInPlace();
  }
}

inline void conjugate_gate(Eigen::MatrixXcd& rho, std::uint32_t width,
                           const Gate& g) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index col = 0; col < rho.cols(); ++col)
      apply_gate(rho.col(col), width, g);
    rho.adjointInPlace();
  }
}

}  // namespace detail

inline StateVector apply_circuit(const StateVector& state, const Circuit& c) {
  if (state.width() != c.width())
    throw value_error("apply_circuit: width mismatch");
  Eigen::VectorXcd v = state.amplitudes();
  for (const auto& g : c.gates()) detail::apply_gate(v, state.width(), g);
  return StateVector(state.width(), std::move(v));
}

inline DensityMatrix apply_circuit(const DensityMatrix& state,
                                   const Circuit& c) {
  if (state.width() != c.width())
    throw value_error("apply_circuit: width mismatch");
  Eigen::MatrixXcd rho = state.entries();
  for (const auto& g : c.gates())
    detail::conjugate_gate(rho, state.width(), g);
  return DensityMatrix(state.width(), std::move(rho), false);
}

inline StateVector apply_unitary(const StateVector& state,
                                 const Eigen::MatrixXcd& u,
                                 std::span<const std::uint32_t> qubits) {
  Eigen::VectorXcd v = state.amplitudes();
  detail::apply_matrix(v, state.width(), u, qubits);
  return StateVector(state.width(), std::move(v));
}

inline DensityMatrix apply_unitary(const DensityMatrix& state,
                                   const Eigen::MatrixXcd& u,
                                   std::span<const std::uint32_t> qubits) {
  Eigen::MatrixXcd rho = state.entries();
  detail::conjugate_matrix(rho, state.width(), u, qubits);
  return DensityMatrix(state.width(), std::move(rho), false);
}

inline DensityMatrix apply_channel(const DensityMatrix& state,
                                   const QuantumChannel& ch,
                                   std::span<const std::uint32_t> qubits) {
  if (qubits.size() != ch.num_qubits())
    throw value_error("apply_channel: target size != channel size");
  Eigen::MatrixXcd acc =
      Eigen::MatrixXcd::Zero(state.entries().rows(), state.entries().cols());
  for (const auto& k : ch.kraus_ops()) {
    Eigen::MatrixXcd term = state.entries();
    detail::conjugate_matrix(term, state.width(), k, qubits);
    acc += term;
  }
  return DensityMatrix(state.width(), std::move(acc), false);
}

inline DensityMatrix partial_trace(const DensityMatrix& state,
                                   std::span<const std::uint32_t> keep) {
  if (keep.empty()) throw value_error("partial_trace: empty keep set");
  std::vector<std::uint32_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw value_error("partial_trace: repeated qubit");
  if (kept.back() >= state.width())
    throw value_error("partial_trace: qubit out of range");

  std::vector<std::uint32_t> traced;
  for (std::uint32_t q = 0; q < state.width(); ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const std::uint64_t dk = 1ULL << kept.size();
  const std::uint64_t dt = 1ULL << traced.size();
  auto embed = [](std::uint64_t bits, const std::vector<std::uint32_t>& qs) {
    std::uint64_t idx = 0;
    for (std::size_t b = 0; b < qs.size(); ++b)
      if ((bits >> b) & 1ULL) idx |= 1ULL << qs[b];
    return idx;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::uint64_t a = 0; a < dk; ++a) {
    const std::uint64_t ia = embed(a, kept);
    for (std::uint64_t b = 0; b < dk; ++b) {
      const std::uint64_t ib = embed(b, kept);
      cxd sum(0.0, 0.0);
      for (std::uint64_t r = 0; r < dt; ++r) {
        const std::uint64_t ir = embed(r, traced);
        sum += state.entries()(ia | ir, ib | ir);
      }
      out(a, b) = sum;
    }
  }
  return DensityMatrix(std::uint32_t(kept.size()), std::move(out), false);
}

//=========================================================================
// Observables
//=========================================================================

inline double expectation(const StateVector& state, const PauliString& p) {
  if (p.size() != state.width())
    throw value_error("expectation: observable width mismatch");
  const std::uint64_t mask = p.flip_mask();
  const auto& v = state.amplitudes();
  cxd sum(0.0, 0.0);
  for (std::uint64_t i = 0; i < state.dim(); ++i)
    sum += std::conj(v(i ^ mask)) * p.phase(i) * v(i);
  return sum.real();
}

inline double expectation(const DensityMatrix& state, const PauliString& p) {
  if (p.size() != state.width())
    throw value_error("expectation: observable width mismatch");
  const std::uint64_t mask = p.flip_mask();
  cxd sum(0.0, 0.0);
  for (std::uint64_t i = 0; i < state.dim(); ++i)
    sum += p.phase(i) * state.entries()(i, i ^ mask);
  return sum.real();
}

// Finite-shot estimate of <P>: mean of `shots` independent +-1 draws with
// Pr(+1) = (1 + <P>)/2. Deterministic for a given seed.
template <typename State>
double sample_expectation(const State& state, const PauliString& p,
                          std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw value_error("sample_expectation: shots must be >= 1");
  const double mean = std::clamp(expectation(state, p), -1.0, 1.0);
  const double prob_plus = 0.5 * (1.0 + mean);
  auto eng = rng::engine(seed);
  std::int64_t tally = 0;
  for (std::uint64_t s = 0; s < shots; ++s)
    tally += (rng::uniform(eng) < prob_plus) ? 1 : -1;
  return double(tally) / double(shots);
}

//=========================================================================
// Fidelity
//=========================================================================

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.width() != sigma.width())
    throw value_error("fidelity: dimension mismatch");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.entries());
  if (es.info() != Eigen::Success)
    throw numerical_error("fidelity: eigensolver failed");
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw value_error("fidelity: first argument not PSD");
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXcd sqrt_rho =
      es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();

  Eigen::MatrixXcd inner = sqrt_rho * sigma.entries() * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(inner,
                                                      Eigen::EigenvaluesOnly);
  if (es2.info() != Eigen::Success)
    throw numerical_error("fidelity: eigensolver failed");
  if (es2.eigenvalues().minCoeff() < -1e-9)
    throw value_error("fidelity: second argument not PSD");
  const double root_sum = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

}  // namespace qspec
