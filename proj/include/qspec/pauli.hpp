#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qspec/error.hpp"

namespace qspec {

using cxd = std::complex<double>;

//=========================================================================
// Pauli strings and Hamiltonians
//=========================================================================

// Qubit ordering convention, fixed globally: qubit 0 is the least
// significant bit of the computational-basis index. In the text form
// ("XXI") the leftmost letter belongs to qubit 0.

enum class PauliOp : unsigned char { I, X, Y, Z };

inline char pauli_char(PauliOp p) { return "IXYZ"[static_cast<int>(p)]; }

class PauliString {
 public:
  explicit PauliString(std::vector<PauliOp> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw value_error("PauliString must have length >= 1");
  }

  static PauliString identity(std::size_t n) {
    return PauliString(std::vector<PauliOp>(n, PauliOp::I));
  }

  static PauliString single(std::size_t n, std::size_t qubit, PauliOp p) {
    std::vector<PauliOp> ops(n, PauliOp::I);
    if (qubit >= n) throw value_error("PauliString::single: qubit out of range");
    ops[qubit] = p;
    return PauliString(std::move(ops));
  }

  static PauliString parse(std::string_view text) {
    std::vector<PauliOp> ops;
    ops.reserve(text.size());
    for (char c : text) {
      switch (c) {
        case 'I': ops.push_back(PauliOp::I); break;
        case 'X': ops.push_back(PauliOp::X); break;
        case 'Y': ops.push_back(PauliOp::Y); break;
        case 'Z': ops.push_back(PauliOp::Z); break;
        default:
          throw value_error(std::string("invalid Pauli letter '") + c + "'");
      }
    }
    if (ops.empty()) throw value_error("empty Pauli string");
    return PauliString(std::move(ops));
  }

  std::size_t size() const { return ops_.size(); }
  PauliOp op(std::size_t q) const { return ops_.at(q); }
  const std::vector<PauliOp>& ops() const { return ops_; }

  bool is_identity() const {
    for (auto p : ops_)
      if (p != PauliOp::I) return false;
    return true;
  }

  std::size_t weight() const {
    std::size_t w = 0;
    for (auto p : ops_)
      if (p != PauliOp::I) ++w;
    return w;
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t q = 0; q < ops_.size(); ++q)
      if (ops_[q] != PauliOp::I) s.push_back(q);
    return s;
  }

  std::string str() const {
    std::string s;
    s.reserve(ops_.size());
    for (auto p : ops_) s.push_back(pauli_char(p));
    return s;
  }

  // P|i> = phase(i) |i ^ flip_mask()>.
  std::uint64_t flip_mask() const {
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < ops_.size(); ++q)
      if (ops_[q] == PauliOp::X || ops_[q] == PauliOp::Y) m |= 1ULL << q;
    return m;
  }

  cxd phase(std::uint64_t basis_index) const {
    cxd ph(1.0, 0.0);
    for (std::size_t q = 0; q < ops_.size(); ++q) {
      const bool bit = (basis_index >> q) & 1ULL;
      switch (ops_[q]) {
        case PauliOp::I:
        case PauliOp::X: break;
        case PauliOp::Y: ph *= bit ? cxd(0, -1) : cxd(0, 1); break;
        case PauliOp::Z: if (bit) ph = -ph; break;
      }
    }
    return ph;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.ops_ == b.ops_;
  }

 private:
  std::vector<PauliOp> ops_;
};

struct PauliTerm {
  double coefficient;
  PauliString string;
};

class Hamiltonian {
 public:
  Hamiltonian(std::size_t num_qubits, std::vector<PauliTerm> terms)
      : num_qubits_(num_qubits), terms_(std::move(terms)) {
    if (num_qubits_ == 0) throw value_error("Hamiltonian needs >= 1 qubit");
    for (const auto& t : terms_) {
      if (!std::isfinite(t.coefficient))
        throw value_error("Hamiltonian coefficient must be finite");
      if (t.string.size() != num_qubits_)
        throw value_error("Hamiltonian term length mismatch");
    }
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return std::size_t(1) << num_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

 private:
  std::size_t num_qubits_;
  std::vector<PauliTerm> terms_;
};

enum class Boundary { open, periodic };

// Heisenberg chain with a uniform transverse field:
//   -J sum_<ij> (XiXj + YiYj + ZiZj) - B sum_i Zi.
// Bond terms are emitted per bond (XX, YY, ZZ, left to right), then the
// field terms site by site. Terms with zero coefficient are dropped.
inline Hamiltonian build_heisenberg(std::size_t n, double J, double B,
                                    Boundary boundary = Boundary::open) {
  if (n == 0) throw value_error("build_heisenberg: n must be >= 1");
  if (!std::isfinite(J) || !std::isfinite(B))
    throw value_error("build_heisenberg: couplings must be finite");

  std::vector<PauliTerm> terms;
  auto add_bond = [&](std::size_t i, std::size_t j) {
    for (PauliOp p : {PauliOp::X, PauliOp::Y, PauliOp::Z}) {
      std::vector<PauliOp> ops(n, PauliOp::I);
      ops[i] = p;
      ops[j] = p;
      terms.push_back({-J, PauliString(std::move(ops))});
    }
  };
  if (J != 0.0) {
    for (std::size_t i = 0; i + 1 < n; ++i) add_bond(i, i + 1);
    if (boundary == Boundary::periodic && n >= 3) add_bond(n - 1, 0);
  }
  if (B != 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      terms.push_back({-B, PauliString::single(n, i, PauliOp::Z)});
  }
  return Hamiltonian(n, std::move(terms));
}

//=========================================================================
// Dense realization and exact diagonalization
//=========================================================================

inline constexpr std::size_t kDenseQubitGuard = 14;

inline Eigen::MatrixXcd to_dense(const Hamiltonian& h) {
  if (h.num_qubits() > kDenseQubitGuard)
    throw value_error("to_dense: exceeds dense-matrix guard of 14 qubits");
  const std::size_t d = h.dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& term : h.terms()) {
    const std::uint64_t mask = term.string.flip_mask();
    for (std::uint64_t col = 0; col < d; ++col)
      m(col ^ mask, col) += term.coefficient * term.string.phase(col);
  }
  return m;
}

struct Spectrum {
  std::vector<double> eigenvalues;         // grouped representatives, ascending
  std::vector<std::size_t> multiplicities; // one per group, sums to 2^n
  Eigen::VectorXd all_eigenvalues;         // ungrouped, ascending
  Eigen::MatrixXcd eigenvectors;           // orthonormal columns if requested
  bool has_eigenvectors = false;
};

// Exact diagonalization oracle. Degenerate eigenvalues are grouped with a
// relative tolerance of 1e-9 * max(1, ||H||).
inline Spectrum diagonalize(const Hamiltonian& h, bool with_eigenvectors = false) {
  const Eigen::MatrixXcd m = to_dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  solver.compute(m, with_eigenvectors ? Eigen::ComputeEigenvectors
                                      : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numerical_error("diagonalize: eigensolver did not converge");

  Spectrum s;
  s.all_eigenvalues = solver.eigenvalues();
  if (with_eigenvectors) {
    s.eigenvectors = solver.eigenvectors();
    s.has_eigenvectors = true;
  }

  const double scale = std::max(std::abs(s.all_eigenvalues(0)),
                                std::abs(s.all_eigenvalues(s.all_eigenvalues.size() - 1)));
  const double tol = 1e-9 * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < s.all_eigenvalues.size();) {
    Eigen::Index j = i;
    double sum = 0.0;
    while (j < s.all_eigenvalues.size() &&
           s.all_eigenvalues(j) - s.all_eigenvalues(i) <= tol) {
      sum += s.all_eigenvalues(j);
      ++j;
    }
    s.eigenvalues.push_back(sum / double(j - i));
    s.multiplicities.push_back(std::size_t(j - i));
    i = j;
  }
  return s;
}

// u(t) = Tr(e^{-iHt}) = sum_j e^{-i lambda_j t}, the ground-truth series.
inline cxd trace_evolution_exact(const Spectrum& s, double t) {
  cxd sum(0.0, 0.0);
  for (Eigen::Index j = 0; j < s.all_eigenvalues.size(); ++j)
    sum += std::exp(cxd(0.0, -s.all_eigenvalues(j) * t));
  return sum;
}

inline cxd trace_evolution_exact(const Hamiltonian& h, double t) {
  return trace_evolution_exact(diagonalize(h), t);
}

// e^{-iHt} from the eigendecomposition.
inline Eigen::MatrixXcd evolution_operator(const Spectrum& s, double t) {
  if (!s.has_eigenvectors)
    throw value_error("evolution_operator: spectrum lacks eigenvectors");
  const Eigen::Index d = s.all_eigenvalues.size();
  Eigen::VectorXcd phases(d);
  for (Eigen::Index j = 0; j < d; ++j)
    phases(j) = std::exp(cxd(0.0, -s.all_eigenvalues(j) * t));
  return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

inline Eigen::MatrixXcd evolution_operator(const Hamiltonian& h, double t) {
  return evolution_operator(diagonalize(h, true), t);
}

}  // namespace qspec
