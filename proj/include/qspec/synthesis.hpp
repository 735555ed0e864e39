#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qspec/circuit.hpp"
#include "qspec/error.hpp"
#include "qspec/pauli.hpp"
#include "qspec/rng.hpp"

namespace qspec {

//=========================================================================
// Controlled Pauli-rotation synthesis
//=========================================================================

// Decomposition variants for ctrl-exp(-i theta/2 P):
//   toffoli_based - every ladder CX gains a control (expanded Toffolis),
//                   the central rotation becomes a two-CX controlled Rz
//   nested_rzz    - two half-angle rotations with the sign flipped by CXs
//                   from the pointer
//   half_angle    - uncontrolled Rz(theta/2) plus an Rzz(-theta/2) against
//                   the pointer, inside the CX ladder
enum class SynthesisVariant { toffoli_based, nested_rzz, half_angle };

// cx: everything lowered to the CX + singles basis.
// native_rzz: keep two-qubit Pauli rotations as Rzz gates (pulse-scaled
// on hardware); ladder CXs stay CXs.
enum class GateBasis { cx, native_rzz };

inline char variant_tag(SynthesisVariant v) {
  switch (v) {
    case SynthesisVariant::toffoli_based: return 'a';
    case SynthesisVariant::nested_rzz: return 'b';
    case SynthesisVariant::half_angle: return 'c';
  }
  return '?';
}

inline SynthesisVariant variant_from_tag(char tag) {
  switch (tag) {
    case 'a': return SynthesisVariant::toffoli_based;
    case 'b': return SynthesisVariant::nested_rzz;
    case 'c': return SynthesisVariant::half_angle;
  }
  throw value_error("unknown synthesis variant tag");
}

namespace detail {

// Canonical six-CX Toffoli on (a, b; target).
inline void emit_toffoli(Circuit& c, std::uint32_t a, std::uint32_t b,
                         std::uint32_t target) {
  c.h(target);
  c.cx(b, target);
  c.tdg(target);
  c.cx(a, target);
  c.t(target);
  c.cx(b, target);
  c.tdg(target);
  c.cx(a, target);
  c.t(b);
  c.t(target);
  c.h(target);
  c.cx(a, b);
  c.t(a);
  c.tdg(b);
  c.cx(a, b);
}

inline void emit_basis_change(Circuit& c, const PauliString& p, bool open) {
  for (std::size_t q = 0; q < p.size(); ++q) {
    switch (p.op(q)) {
      case PauliOp::X:
        c.h(std::uint32_t(q));
        break;
      case PauliOp::Y:
        if (open) {
          c.sdg(std::uint32_t(q));
          c.h(std::uint32_t(q));
        } else {
          c.h(std::uint32_t(q));
          c.s(std::uint32_t(q));
        }
        break;
      default:
        break;
    }
  }
}

// exp(-i theta/2 Z...Z) on `supp` with the Rz placed on rz_site; in the
// native basis a weight-2 string becomes a single Rzz.
inline void emit_z_rotation(Circuit& c, std::span<const std::uint32_t> supp,
                            std::uint32_t rz_site, double theta,
                            GateBasis basis) {
  if (supp.size() == 1) {
    c.rz(rz_site, theta);
    return;
  }
  if (supp.size() == 2 && basis == GateBasis::native_rzz) {
    const std::uint32_t other = (supp[0] == rz_site) ? supp[1] : supp[0];
    c.rzz(other, rz_site, theta);
    return;
  }
  for (auto q : supp)
    if (q != rz_site) c.cx(q, rz_site);
  c.rz(rz_site, theta);
  for (auto it = supp.rbegin(); it != supp.rend(); ++it)
    if (*it != rz_site) c.cx(*it, rz_site);
}

}  // namespace detail

// Synthesizes |0><0| (x) I + |1><1| (x) exp(-i theta/2 P) with the pointer
// as control. X/Y letters are rotated into Z by single-qubit basis changes;
// the CX ladder folds the string parity onto rz_site, which must carry a
// non-identity letter.
inline Circuit controlled_pauli_rotation(const PauliString& p, double theta,
                                         SynthesisVariant variant,
                                         std::uint32_t pointer,
                                         std::uint32_t rz_site,
                                         GateBasis basis = GateBasis::cx,
                                         std::uint32_t width = 0) {
  if (p.is_identity())
    throw value_error("controlled_pauli_rotation: identity string");
  if (!std::isfinite(theta))
    throw value_error("controlled_pauli_rotation: non-finite angle");
  if (rz_site >= p.size() || p.op(rz_site) == PauliOp::I)
    throw value_error("controlled_pauli_rotation: rz_site not in support");
  if (pointer < p.size() && p.op(pointer) != PauliOp::I)
    throw value_error("controlled_pauli_rotation: pointer inside support");

  const std::uint32_t min_width =
      std::max<std::uint32_t>(std::uint32_t(p.size()), pointer + 1);
  if (width == 0) width = min_width;
  if (width < min_width)
    throw value_error("controlled_pauli_rotation: width too small");

  const auto supp_sz = p.support();
  std::vector<std::uint32_t> supp(supp_sz.begin(), supp_sz.end());

  Circuit c(width);
  detail::emit_basis_change(c, p, true);

  switch (variant) {
    case SynthesisVariant::toffoli_based: {
      for (auto q : supp)
        if (q != rz_site) detail::emit_toffoli(c, pointer, q, rz_site);
      c.rz(rz_site, theta / 2);
      c.cx(pointer, rz_site);
      c.rz(rz_site, -theta / 2);
      c.cx(pointer, rz_site);
      for (auto it = supp.rbegin(); it != supp.rend(); ++it)
        if (*it != rz_site) detail::emit_toffoli(c, pointer, *it, rz_site);
      break;
    }
    case SynthesisVariant::nested_rzz: {
      detail::emit_z_rotation(c, supp, rz_site, theta / 2, basis);
      c.cx(pointer, rz_site);
      detail::emit_z_rotation(c, supp, rz_site, -theta / 2, basis);
      c.cx(pointer, rz_site);
      break;
    }
    case SynthesisVariant::half_angle: {
      for (auto q : supp)
        if (q != rz_site) c.cx(q, rz_site);
      c.rz(rz_site, theta / 2);
      if (basis == GateBasis::native_rzz) {
        c.rzz(pointer, rz_site, -theta / 2);
      } else {
        c.cx(pointer, rz_site);
        c.rz(rz_site, -theta / 2);
        c.cx(pointer, rz_site);
      }
      for (auto it = supp.rbegin(); it != supp.rend(); ++it)
        if (*it != rz_site) c.cx(*it, rz_site);
      break;
    }
  }

  detail::emit_basis_change(c, p, false);
  return c;
}

//=========================================================================
// Coupling graphs
//=========================================================================

class CouplingGraph {
 public:
  CouplingGraph(std::uint32_t num_nodes,
                std::vector<std::pair<std::uint32_t, std::uint32_t>> edges)
      : adjacency_(num_nodes) {
    if (num_nodes == 0) throw value_error("CouplingGraph: empty graph");
    for (auto [a, b] : edges) {
      if (a >= num_nodes || b >= num_nodes)
        throw value_error("CouplingGraph: edge endpoint out of range");
      if (a == b) throw value_error("CouplingGraph: self loop");
      if (has_edge(a, b)) throw value_error("CouplingGraph: duplicate edge");
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
      edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    if (!connected()) throw value_error("CouplingGraph: not connected");
  }

  std::uint32_t num_nodes() const {
    return std::uint32_t(adjacency_.size());
  }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const {
    return edges_;
  }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t q) const {
    return adjacency_.at(q);
  }
  std::uint32_t max_degree() const {
    std::size_t d = 0;
    for (const auto& n : adjacency_) d = std::max(d, n.size());
    return std::uint32_t(d);
  }

  bool has_edge(std::uint32_t a, std::uint32_t b) const {
    const auto& nbrs = adjacency_.at(a);
    return std::find(nbrs.begin(), nbrs.end(), b) != nbrs.end();
  }

  std::vector<std::uint32_t> distances_from(std::uint32_t src) const {
    constexpr auto inf = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(num_nodes(), inf);
    std::deque<std::uint32_t> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adjacency_[u])
        if (dist[v] == inf) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
    }
    return dist;
  }

  std::uint32_t distance(std::uint32_t a, std::uint32_t b) const {
    return distances_from(a).at(b);
  }

 private:
  bool connected() const {
    const auto dist = distances_from(0);
    return std::find(dist.begin(), dist.end(),
                     std::numeric_limits<std::uint32_t>::max()) == dist.end();
  }

  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

//=========================================================================
// Heavy-hex lattice
//=========================================================================

// Rectangular heavy-hex tiling: `rows` horizontal qubit rows joined by
// bridge qubits on alternating columns, degree <= 3 everywhere. Seven rows
// give the 127-node map.
struct HeavyHexLattice {
  enum class NodeKind { row, bridge };
  struct Node {
    NodeKind kind;
    int row;  // bridge nodes carry the gap index
    int col;
  };

  std::uint32_t num_nodes = 0;
  std::vector<Node> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::vector<int>> row_node;  // [row][col] -> id or -1
  std::vector<std::map<int, std::uint32_t>> bridge_node;  // [gap][col] -> id

  CouplingGraph graph() const { return CouplingGraph(num_nodes, edges); }
};

inline HeavyHexLattice heavy_hex_lattice(int rows) {
  if (rows < 2) throw value_error("heavy_hex_lattice: needs >= 2 rows");
  constexpr int kRowLen = 15;
  auto bridge_cols = [](int gap) {
    return (gap % 2 == 0) ? std::vector<int>{0, 4, 8, 12}
                          : std::vector<int>{2, 6, 10, 14};
  };

  HeavyHexLattice lat;
  lat.row_node.assign(rows, std::vector<int>(kRowLen, -1));
  lat.bridge_node.assign(std::size_t(std::max(rows - 1, 0)), {});

  auto add_node = [&](HeavyHexLattice::NodeKind kind, int row, int col) {
    lat.nodes.push_back({kind, row, col});
    return lat.num_nodes++;
  };

  for (int r = 0; r < rows; ++r) {
    // First row omits the last column; the last row omits whichever end
    // column its bridge set does not use.
    int lo = 0, hi = kRowLen - 1;
    if (r == 0) hi = kRowLen - 2;
    if (r == rows - 1) {
      if (bridge_cols(rows - 2).front() == 0) hi = kRowLen - 2;
      else lo = 1;
    }
    for (int c = lo; c <= hi; ++c) {
      const auto id = add_node(HeavyHexLattice::NodeKind::row, r, c);
      lat.row_node[r][c] = int(id);
      if (c > lo)
        lat.edges.emplace_back(std::uint32_t(lat.row_node[r][c - 1]), id);
    }
    if (r > 0) {
      for (int c : bridge_cols(r - 1)) {
        if (lat.row_node[r - 1][c] < 0 || lat.row_node[r][c] < 0) continue;
        const auto id = add_node(HeavyHexLattice::NodeKind::bridge, r - 1, c);
        lat.bridge_node[r - 1][c] = id;
        lat.edges.emplace_back(std::uint32_t(lat.row_node[r - 1][c]), id);
        lat.edges.emplace_back(std::uint32_t(lat.row_node[r][c]), id);
      }
    }
  }
  return lat;
}

inline CouplingGraph heavy_hex_graph(int rows) {
  return heavy_hex_lattice(rows).graph();
}

// Deterministic placement for the trace-estimation protocol on a heavy-hex
// lattice: the computation chain snakes along even columns of the first
// two rows (crossing through a bridge), each garbage qubit takes a free
// neighbor of its partner, and the pointer starts next to site 0.
// Logical order: computation 0..n-1, garbage n..2n-1, pointer 2n.
inline std::vector<std::uint32_t> protocol_layout(const HeavyHexLattice& lat,
                                                  std::uint32_t n) {
  if (n == 0) throw value_error("protocol_layout: n must be >= 1");

  std::vector<std::uint32_t> spine;
  for (int c = 2; c <= 12 && lat.row_node[0][c] >= 0; c += 2)
    spine.push_back(std::uint32_t(lat.row_node[0][c]));
  if (lat.bridge_node.size() > 0 && lat.bridge_node[0].count(12))
    spine.push_back(lat.bridge_node[0].at(12));
  if (lat.row_node.size() > 1)
    for (int c = 12; c >= 0; c -= 2)
      if (lat.row_node[1][c] >= 0)
        spine.push_back(std::uint32_t(lat.row_node[1][c]));
  if (spine.size() < n)
    throw value_error("protocol_layout: lattice too small for chain");

  const CouplingGraph g = lat.graph();
  std::vector<bool> used(lat.num_nodes, false);
  std::vector<std::uint32_t> comp(spine.begin(), spine.begin() + n);
  for (auto q : comp) used[q] = true;

  const std::uint32_t pointer = std::uint32_t(lat.row_node[0][1]);
  used[pointer] = true;

  // Garbage: nearest free node to its computation partner (BFS, ties by
  // node id through the sorted adjacency).
  std::vector<std::uint32_t> garbage;
  for (auto c : comp) {
    std::uint32_t pick = std::numeric_limits<std::uint32_t>::max();
    std::deque<std::uint32_t> queue{c};
    std::vector<bool> seen(lat.num_nodes, false);
    seen[c] = true;
    while (!queue.empty() && pick == std::numeric_limits<std::uint32_t>::max()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : g.neighbors(u)) {
        if (seen[v]) continue;
        seen[v] = true;
        if (!used[v]) { pick = v; break; }
        queue.push_back(v);
      }
    }
    if (pick == std::numeric_limits<std::uint32_t>::max())
      throw value_error("protocol_layout: no free node for garbage qubit");
    used[pick] = true;
    garbage.push_back(pick);
  }

  std::vector<std::uint32_t> layout;
  layout.insert(layout.end(), comp.begin(), comp.end());
  layout.insert(layout.end(), garbage.begin(), garbage.end());
  layout.push_back(pointer);
  return layout;
}

//=========================================================================
// Trotter-step synthesis
//=========================================================================

// One first-order Trotter step of the controlled evolution: a controlled
// rotation exp(-i c_k dt P_k) per term, in builder order, with rotation
// angle theta_k = 2 c_k dt. Identity terms only shift the global phase and
// are skipped. With a coupling graph the Rz lands on the support qubit
// closest to the pointer under the initial layout.
inline Circuit controlled_trotter_step(
    const Hamiltonian& h, double dt, SynthesisVariant variant,
    std::uint32_t pointer, GateBasis basis = GateBasis::cx,
    std::uint32_t width = 0, const CouplingGraph* graph = nullptr,
    const std::vector<std::uint32_t>* layout = nullptr) {
  if (pointer < h.num_qubits())
    throw value_error("controlled_trotter_step: pointer inside system");
  if (width == 0) width = pointer + 1;

  std::vector<std::uint32_t> pointer_dist;
  if (graph != nullptr) {
    if (layout == nullptr || layout->size() <= pointer)
      throw value_error("controlled_trotter_step: layout missing pointer");
    pointer_dist = graph->distances_from(layout->at(pointer));
  }

  Circuit c(width);
  for (const auto& term : h.terms()) {
    if (term.string.is_identity()) continue;
    const auto supp = term.string.support();
    std::uint32_t rz_site = std::uint32_t(supp.front());
    if (graph != nullptr) {
      std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
      for (auto q : supp) {
        const auto d = pointer_dist.at(layout->at(q));
        if (d < best) {
          best = d;
          rz_site = std::uint32_t(q);
        }
      }
    }
    c.append(controlled_pauli_rotation(term.string, 2.0 * term.coefficient * dt,
                                       variant, pointer, rz_site, basis,
                                       width));
  }
  return c;
}

// Bell-pair preparation: computation qubit k entangled with garbage qubit
// n+k, leaving the computation register maximally mixed once the garbage
// register is discarded.
inline Circuit mms_prep_circuit(std::uint32_t n) {
  Circuit c(2 * n);
  for (std::uint32_t k = 0; k < n; ++k) {
    c.h(n + k);
    c.cx(n + k, k);
  }
  return c;
}

//=========================================================================
// Routing
//=========================================================================

struct RoutedCircuit {
  Circuit circuit;  // physical qubit indices, width = graph node count
  std::vector<std::uint32_t> initial_layout;  // logical -> physical
  std::vector<std::uint32_t> final_layout;
  std::size_t swap_count = 0;
  std::size_t two_qubit_tally = 0;  // ECR-equivalent count
};

// Greedy shortest-path SWAP insertion. Candidate swaps move either gate
// operand one step along a shortest path; ties are broken by a short
// lookahead over upcoming two-qubit gates, then by the seeded stream.
inline RoutedCircuit route(const Circuit& c, const CouplingGraph& g,
                           std::vector<std::uint32_t> layout,
                           std::uint64_t seed = 0) {
  if (layout.size() != c.width())
    throw value_error("route: layout size != circuit width");
  {
    std::vector<bool> seen(g.num_nodes(), false);
    for (auto p : layout) {
      if (p >= g.num_nodes()) throw value_error("route: layout out of range");
      if (seen[p]) throw value_error("route: layout not injective");
      seen[p] = true;
    }
  }

  const std::uint32_t nn = g.num_nodes();
  std::vector<std::vector<std::uint32_t>> dist(nn);
  for (std::uint32_t s = 0; s < nn; ++s) dist[s] = g.distances_from(s);

  constexpr std::uint32_t kFree = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> phys_of = layout;
  std::vector<std::uint32_t> log_at(nn, kFree);
  for (std::uint32_t l = 0; l < phys_of.size(); ++l) log_at[phys_of[l]] = l;

  auto eng = rng::engine(rng::derive(seed, 0x726f7574ULL));
  RoutedCircuit out{Circuit(nn), layout, {}, 0, 0};

  const auto& gates = c.gates();
  // Distance of the next few two-qubit gates under the current mapping.
  auto lookahead_cost = [&](std::size_t gate_idx) {
    double cost = 0.0;
    double weight = 1.0;
    int found = 0;
    for (std::size_t j = gate_idx; j < gates.size() && found < 6; ++j) {
      if (!is_two_qubit(gates[j].kind)) continue;
      cost += weight * double(dist[phys_of[gates[j].qubits[0]]]
                                  [phys_of[gates[j].qubits[1]]]);
      weight *= 0.6;
      ++found;
    }
    return cost;
  };

  // Exchanges the logical occupants of two physical nodes (mapping only).
  auto exchange = [&](std::uint32_t pa, std::uint32_t pb) {
    const std::uint32_t la = log_at[pa], lb = log_at[pb];
    log_at[pa] = lb;
    log_at[pb] = la;
    if (la != kFree) phys_of[la] = pb;
    if (lb != kFree) phys_of[lb] = pa;
  };

  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& gate = gates[i];
    if (!is_two_qubit(gate.kind)) {
      Gate mapped = gate;
      mapped.qubits[0] = phys_of[gate.qubits[0]];
      out.circuit.add(mapped);
      continue;
    }
    const std::uint32_t a = gate.qubits[0], b = gate.qubits[1];
    while (dist[phys_of[a]][phys_of[b]] > 1) {
      const std::uint32_t pa = phys_of[a], pb = phys_of[b];
      const std::uint32_t d = dist[pa][pb];
      std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;
      for (auto x : g.neighbors(pa))
        if (dist[x][pb] < d) candidates.emplace_back(pa, x);
      for (auto y : g.neighbors(pb))
        if (dist[y][pa] < d) candidates.emplace_back(pb, y);

      std::pair<std::uint32_t, std::uint32_t> best = candidates.front();
      double best_cost = std::numeric_limits<double>::infinity();
      std::uint32_t ties = 0;
      for (const auto& cand : candidates) {
        exchange(cand.first, cand.second);
        double cost = lookahead_cost(i);
        // weak preference for moving through unoccupied nodes
        if (log_at[cand.first] != kFree) cost += 0.05;
        exchange(cand.first, cand.second);
        if (cost < best_cost) {
          best = cand;
          best_cost = cost;
          ties = 1;
        } else if (cost == best_cost) {
          ++ties;
          if (rng::uniform(eng) < 1.0 / double(ties)) best = cand;
        }
      }
      exchange(best.first, best.second);
      out.circuit.swap(std::min(best.first, best.second),
                       std::max(best.first, best.second));
      ++out.swap_count;
    }
    Gate mapped = gate;
    mapped.qubits[0] = phys_of[a];
    mapped.qubits[1] = phys_of[b];
    out.circuit.add(mapped);
  }

  out.final_layout = phys_of;
  out.two_qubit_tally = count_cx_equivalent(out.circuit, CxTally::ecr);
  return out;
}

//=========================================================================
// Calibration and fidelity estimation
//=========================================================================

struct CalibrationModel {
  std::vector<double> eps1;   // per-node single-qubit error
  std::vector<double> t1_us;  // per-node relaxation time
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> eps2;
  bool pulse_scaling = false;
  // Pulse-scaled Rzz error is eps2 * |wrapped angle| / divisor.
  double pulse_angle_divisor = M_PI;
};

inline CalibrationModel uniform_calibration(const CouplingGraph& g,
                                            double eps1, double eps2,
                                            double t1_us, bool pulse_scaling) {
  if (!(eps1 >= 0.0 && eps1 < 1.0) || !(eps2 >= 0.0 && eps2 < 1.0))
    throw value_error("uniform_calibration: error rates must lie in [0, 1)");
  if (!(t1_us > 0.0)) throw value_error("uniform_calibration: T1 must be > 0");
  CalibrationModel cal;
  cal.eps1.assign(g.num_nodes(), eps1);
  cal.t1_us.assign(g.num_nodes(), t1_us);
  for (auto [a, b] : g.edges()) cal.eps2[{a, b}] = eps2;
  cal.pulse_scaling = pulse_scaling;
  return cal;
}

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

namespace detail {

inline double edge_eps2(const CalibrationModel& cal, std::uint32_t a,
                        std::uint32_t b) {
  const auto it = cal.eps2.find({std::min(a, b), std::max(a, b)});
  if (it == cal.eps2.end())
    throw value_error("estimate_fidelity: missing edge calibration");
  return it->second;
}

inline double node_eps1(const CalibrationModel& cal, std::uint32_t q) {
  if (q >= cal.eps1.size())
    throw value_error("estimate_fidelity: missing node calibration");
  return cal.eps1[q];
}

}  // namespace detail

// Product-of-error-rates fidelity estimate. Rz gates are virtual frame
// changes and cost nothing; other single-qubit gates cost eps1, CX costs
// eps2, SWAP costs three CXs. Rzz costs two CXs unless pulse scaling is
// enabled, in which case its error scales linearly with the wrapped angle.
inline double estimate_fidelity(const RoutedCircuit& rc,
                                const CalibrationModel& cal) {
  double f = 1.0;
  for (const auto& g : rc.circuit.gates()) {
    switch (g.kind) {
      case GateKind::Rz:
        break;
      case GateKind::CX:
        f *= 1.0 - detail::edge_eps2(cal, g.qubits[0], g.qubits[1]);
        break;
      case GateKind::Swap: {
        const double e = detail::edge_eps2(cal, g.qubits[0], g.qubits[1]);
        f *= (1.0 - e) * (1.0 - e) * (1.0 - e);
        break;
      }
      case GateKind::Rzz: {
        const double e = detail::edge_eps2(cal, g.qubits[0], g.qubits[1]);
        if (cal.pulse_scaling) {
          f *= 1.0 - e * std::abs(wrap_angle(g.angle)) / cal.pulse_angle_divisor;
        } else {
          f *= (1.0 - e) * (1.0 - e);
        }
        break;
      }
      default:
        f *= 1.0 - detail::node_eps1(cal, g.qubits[0]);
        break;
    }
  }
  return f;
}

}  // namespace qspec
