#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qspec/error.hpp"

namespace qspec {

using cxd = std::complex<double>;

//=========================================================================
// Gate-level IR
//=========================================================================

// Fixed gate set. Rz is realized virtually via frame changes on hardware,
// so it carries no cost in the noise model. Angle conventions:
//   Rz(theta)  = diag(e^{-i theta/2}, e^{+i theta/2})
//   Rzz(theta) = exp(-i (theta/2) Z (x) Z)
enum class GateKind { H, X, S, Sdg, T, Tdg, Rz, CX, Rzz, Swap };

inline bool is_two_qubit(GateKind k) {
  return k == GateKind::CX || k == GateKind::Rzz || k == GateKind::Swap;
}

inline bool has_angle(GateKind k) {
  return k == GateKind::Rz || k == GateKind::Rzz;
}

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "SDG";
    case GateKind::T: return "T";
    case GateKind::Tdg: return "TDG";
    case GateKind::Rz: return "RZ";
    case GateKind::CX: return "CX";
    case GateKind::Rzz: return "RZZ";
    case GateKind::Swap: return "SWAP";
  }
  return "?";
}

struct Gate {
  GateKind kind;
  std::array<std::uint32_t, 2> qubits{0, 0};
  double angle = 0.0;

  static Gate h(std::uint32_t q) { return {GateKind::H, {q, 0}}; }
  static Gate x(std::uint32_t q) { return {GateKind::X, {q, 0}}; }
  static Gate s(std::uint32_t q) { return {GateKind::S, {q, 0}}; }
  static Gate sdg(std::uint32_t q) { return {GateKind::Sdg, {q, 0}}; }
  static Gate t(std::uint32_t q) { return {GateKind::T, {q, 0}}; }
  static Gate tdg(std::uint32_t q) { return {GateKind::Tdg, {q, 0}}; }
  static Gate rz(std::uint32_t q, double theta) {
    return {GateKind::Rz, {q, 0}, theta};
  }
  static Gate cx(std::uint32_t control, std::uint32_t target) {
    return {GateKind::CX, {control, target}};
  }
  static Gate rzz(std::uint32_t a, std::uint32_t b, double theta) {
    return {GateKind::Rzz, {a, b}, theta};
  }
  static Gate swap(std::uint32_t a, std::uint32_t b) {
    return {GateKind::Swap, {a, b}};
  }

  std::size_t arity() const { return is_two_qubit(kind) ? 2 : 1; }
};

class Circuit {
 public:
  explicit Circuit(std::uint32_t width) : width_(width) {}

  std::uint32_t width() const { return width_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  void add(const Gate& g) {
    for (std::size_t i = 0; i < g.arity(); ++i)
      if (g.qubits[i] >= width_)
        throw value_error("gate operand out of circuit width");
    if (g.arity() == 2 && g.qubits[0] == g.qubits[1])
      throw value_error("two-qubit gate needs distinct operands");
    if (has_angle(g.kind) && !std::isfinite(g.angle))
      throw value_error("gate angle must be finite");
    gates_.push_back(g);
  }

  void h(std::uint32_t q) { add(Gate::h(q)); }
  void x(std::uint32_t q) { add(Gate::x(q)); }
  void s(std::uint32_t q) { add(Gate::s(q)); }
  void sdg(std::uint32_t q) { add(Gate::sdg(q)); }
  void t(std::uint32_t q) { add(Gate::t(q)); }
  void tdg(std::uint32_t q) { add(Gate::tdg(q)); }
  void rz(std::uint32_t q, double theta) { add(Gate::rz(q, theta)); }
  void cx(std::uint32_t c, std::uint32_t t) { add(Gate::cx(c, t)); }
  void rzz(std::uint32_t a, std::uint32_t b, double th) { add(Gate::rzz(a, b, th)); }
  void swap(std::uint32_t a, std::uint32_t b) { add(Gate::swap(a, b)); }

  void append(const Circuit& other) {
    if (other.width_ != width_)
      throw value_error("append: circuit widths differ");
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  }

 private:
  std::uint32_t width_;
  std::vector<Gate> gates_;
};

inline Circuit compose(const Circuit& a, const Circuit& b) {
  if (a.width() != b.width()) throw value_error("compose: widths differ");
  Circuit c = a;
  c.append(b);
  return c;
}

inline Gate inverse_gate(const Gate& g) {
  switch (g.kind) {
    case GateKind::S: return Gate::sdg(g.qubits[0]);
    case GateKind::Sdg: return Gate::s(g.qubits[0]);
    case GateKind::T: return Gate::tdg(g.qubits[0]);
    case GateKind::Tdg: return Gate::t(g.qubits[0]);
    case GateKind::Rz: return Gate::rz(g.qubits[0], -g.angle);
    case GateKind::Rzz: return Gate::rzz(g.qubits[0], g.qubits[1], -g.angle);
    default: return g;  // H, X, CX, SWAP are involutions
  }
}

inline Circuit dagger(const Circuit& c) {
  Circuit out(c.width());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it)
    out.add(inverse_gate(*it));
  return out;
}

//=========================================================================
// Gate application and unitary extraction
//=========================================================================

namespace detail {

inline Eigen::Matrix2cd one_qubit_matrix(const Gate& g) {
  using std::exp;
  const cxd i1(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (g.kind) {
    case GateKind::H:
      m << 1, 1, 1, -1;
      m *= 1.0 / std::sqrt(2.0);
      break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::S: m << 1, 0, 0, i1; break;
    case GateKind::Sdg: m << 1, 0, 0, -i1; break;
    case GateKind::T: m << 1, 0, 0, exp(i1 * (M_PI / 4)); break;
    case GateKind::Tdg: m << 1, 0, 0, exp(-i1 * (M_PI / 4)); break;
    case GateKind::Rz:
      m << exp(-i1 * (g.angle / 2)), 0, 0, exp(i1 * (g.angle / 2));
      break;
    default: throw value_error("not a one-qubit gate");
  }
  return m;
}

// Applies a gate to a 2^width amplitude vector in place.
template <typename Vec>
void apply_gate(Vec&& v, std::uint32_t width, const Gate& g) {
  const std::uint64_t dim = 1ULL << width;
  switch (g.kind) {
    case GateKind::CX: {
      const std::uint64_t cm = 1ULL << g.qubits[0], tm = 1ULL << g.qubits[1];
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & cm) && !(i & tm)) std::swap(v[i], v[i | tm]);
      return;
    }
    case GateKind::Swap: {
      const std::uint64_t am = 1ULL << g.qubits[0], bm = 1ULL << g.qubits[1];
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & am) && !(i & bm)) std::swap(v[i], v[(i ^ am) | bm]);
      return;
    }
    case GateKind::Rzz: {
      const std::uint64_t am = 1ULL << g.qubits[0], bm = 1ULL << g.qubits[1];
      const cxd minus = std::exp(cxd(0.0, -g.angle / 2));
      const cxd plus = std::exp(cxd(0.0, g.angle / 2));
      for (std::uint64_t i = 0; i < dim; ++i)
        v[i] *= (bool(i & am) != bool(i & bm)) ? plus : minus;
      return;
    }
    default: {
      const Eigen::Matrix2cd m = one_qubit_matrix(g);
      const std::uint64_t qm = 1ULL << g.qubits[0];
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & qm) continue;
        const cxd a = v[i], b = v[i | qm];
        v[i] = m(0, 0) * a + m(0, 1) * b;
        v[i | qm] = m(1, 0) * a + m(1, 1) * b;
      }
      return;
    }
  }
}

}  // namespace detail

inline constexpr std::uint32_t kUnitaryWidthGuard = 12;

// Full unitary of the circuit, gates multiplied in application order.
inline Eigen::MatrixXcd unitary_of(const Circuit& c) {
  if (c.width() > kUnitaryWidthGuard)
    throw value_error("unitary_of: exceeds width guard of 12 qubits");
  const std::uint64_t dim = 1ULL << c.width();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : c.gates())
    for (std::uint64_t col = 0; col < dim; ++col)
      detail::apply_gate(u.col(col), c.width(), g);
  return u;
}

//=========================================================================
// Gate counting
//=========================================================================

inline std::size_t count_gates(const Circuit& c, GateKind kind) {
  std::size_t n = 0;
  for (const auto& g : c.gates())
    if (g.kind == kind) ++n;
  return n;
}

// CX-equivalent tallies:
//   raw      - CX gates only
//   expanded - CX basis: RZZ costs 2 CX, SWAP costs 3 CX
//   ecr      - pulse-scaled RZZ counts as one two-qubit pulse, SWAP as 3
enum class CxTally { raw, expanded, ecr };

inline std::size_t count_cx_equivalent(const Circuit& c, CxTally mode) {
  std::size_t n = 0;
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::CX: n += 1; break;
      case GateKind::Swap:
        n += (mode == CxTally::raw) ? 0 : 3;
        break;
      case GateKind::Rzz:
        if (mode == CxTally::expanded) n += 2;
        else if (mode == CxTally::ecr) n += 1;
        break;
      default: break;
    }
  }
  return n;
}

// Entrywise comparison after removing one global phase, fixed from the
// largest-magnitude entry of the reference.
inline bool equal_up_to_global_phase(const Eigen::MatrixXcd& a,
                                     const Eigen::MatrixXcd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  Eigen::Index r = 0, s = 0;
  a.cwiseAbs().maxCoeff(&r, &s);
  if (std::abs(a(r, s)) < tol || std::abs(b(r, s)) < 1e-300) return false;
  const cxd phase = a(r, s) / b(r, s);
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  return (a - phase * b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qspec
