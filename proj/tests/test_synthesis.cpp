#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "qspec/simulator.hpp"
#include "qspec/synthesis.hpp"

using namespace qspec;
using Catch::Approx;

namespace {

// Physical-from-logical basis permutation for a layout.
Eigen::MatrixXcd layout_permutation(const std::vector<std::uint32_t>& layout,
                                    std::uint32_t num_nodes) {
  const std::uint64_t dim = 1ULL << num_nodes;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    std::uint64_t phys = 0;
    std::uint64_t placed = 0;
    for (std::uint32_t l = 0; l < layout.size(); ++l) {
      if ((b >> l) & 1ULL) phys |= 1ULL << layout[l];
      placed |= 1ULL << layout[l];
    }
    (void)placed;
    p(phys, b) = 1.0;
  }
  return p;
}

CouplingGraph line_graph(std::uint32_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return CouplingGraph(n, std::move(edges));
}

PauliString random_string(std::uint32_t n, std::size_t weight,
                          rng::Engine& eng) {
  std::vector<PauliOp> ops(n, PauliOp::I);
  std::vector<std::uint32_t> sites(n);
  for (std::uint32_t i = 0; i < n; ++i) sites[i] = i;
  for (std::size_t w = 0; w < weight; ++w) {
    const auto pick = w + eng() % (n - w);
    std::swap(sites[w], sites[pick]);
    ops[sites[w]] = static_cast<PauliOp>(1 + eng() % 3);
  }
  return PauliString(ops);
}

}  // namespace

TEST_CASE("toffoli decomposition uses six CX", "[synthesis]") {
  Circuit c(3);
  detail::emit_toffoli(c, 0, 1, 2);
  REQUIRE(count_gates(c, GateKind::CX) == 6);
  REQUIRE((unitary_of(c) - oracle::toffoli_matrix()).cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("variant c on ZZ: gate counts and unitary", "[synthesis]") {
  const auto p = PauliString::parse("ZZ");
  const double theta = 0.9;
  const auto c = controlled_pauli_rotation(p, theta,
                                           SynthesisVariant::half_angle, 2, 1);
  REQUIRE(count_gates(c, GateKind::CX) == 4);
  REQUIRE(count_gates(c, GateKind::Rz) == 2);
  REQUIRE(equal_up_to_global_phase(
      unitary_of(c), oracle::controlled_rotation_matrix(p, theta), 1e-10));
}

TEST_CASE("variant b on ZZ: six CX per controlled rotation", "[synthesis]") {
  const auto p = PauliString::parse("ZZ");
  const auto c = controlled_pauli_rotation(p, 1.3,
                                           SynthesisVariant::nested_rzz, 2, 1);
  REQUIRE(count_gates(c, GateKind::CX) == 6);
  REQUIRE(equal_up_to_global_phase(
      unitary_of(c), oracle::controlled_rotation_matrix(p, 1.3), 1e-10));
}

TEST_CASE("variant a on ZZ: two toffolis around the controlled Rz",
          "[synthesis]") {
  const auto p = PauliString::parse("ZZ");
  const auto c = controlled_pauli_rotation(
      p, 0.7, SynthesisVariant::toffoli_based, 2, 1);
  REQUIRE(count_gates(c, GateKind::CX) == 14);
  REQUIRE(equal_up_to_global_phase(
      unitary_of(c), oracle::controlled_rotation_matrix(p, 0.7), 1e-10));
}

TEST_CASE("weight-1 half-angle form", "[synthesis]") {
  const auto p = PauliString::parse("Z");
  const double theta = 1.7;
  const auto native = controlled_pauli_rotation(
      p, theta, SynthesisVariant::half_angle, 1, 0, GateBasis::native_rzz);
  REQUIRE(native.size() == 2);
  REQUIRE(native.gates()[0].kind == GateKind::Rz);
  REQUIRE(native.gates()[0].angle == Approx(theta / 2));
  REQUIRE(native.gates()[1].kind == GateKind::Rzz);
  REQUIRE(native.gates()[1].angle == Approx(-theta / 2));

  const auto expanded = controlled_pauli_rotation(
      p, theta, SynthesisVariant::half_angle, 1, 0, GateBasis::cx);
  REQUIRE(count_gates(expanded, GateKind::CX) == 2);
  for (const auto& c : {native, expanded})
    REQUIRE(equal_up_to_global_phase(
        unitary_of(c), oracle::controlled_rotation_matrix(p, theta), 1e-10));
}

TEST_CASE("zero angle synthesizes the identity", "[synthesis]") {
  for (auto v : {SynthesisVariant::toffoli_based, SynthesisVariant::nested_rzz,
                 SynthesisVariant::half_angle}) {
    const auto c =
        controlled_pauli_rotation(PauliString::parse("ZZ"), 0.0, v, 2, 0);
    REQUIRE(equal_up_to_global_phase(
        unitary_of(c), Eigen::MatrixXcd::Identity(8, 8), 1e-10));
  }
}

TEST_CASE("synthesis argument validation", "[synthesis]") {
  REQUIRE_THROWS_AS(
      controlled_pauli_rotation(PauliString::parse("II"), 1.0,
                                SynthesisVariant::half_angle, 2, 0),
      value_error);
  REQUIRE_THROWS_AS(
      controlled_pauli_rotation(PauliString::parse("ZI"), 1.0,
                                SynthesisVariant::half_angle, 2, 1),
      value_error);
  REQUIRE_THROWS_AS(
      controlled_pauli_rotation(PauliString::parse("ZZ"), 1.0,
                                SynthesisVariant::half_angle, 1, 0),
      value_error);
}

TEST_CASE("random controlled rotations match the exponential", "[synthesis]") {
  auto eng = rng::engine(424242);
  const SynthesisVariant variants[] = {SynthesisVariant::toffoli_based,
                                       SynthesisVariant::nested_rzz,
                                       SynthesisVariant::half_angle};
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t n = 1 + eng() % 3;
    const auto weight = 1 + eng() % n;
    const auto p = random_string(n, weight, eng);
    const double theta = rng::uniform(eng, -2.0 * M_PI, 2.0 * M_PI);
    const auto v = variants[eng() % 3];
    const auto basis = (eng() % 2) ? GateBasis::native_rzz : GateBasis::cx;
    const auto supp = p.support();
    const auto rz_site = std::uint32_t(supp[eng() % supp.size()]);

    const auto c = controlled_pauli_rotation(p, theta, v, n, rz_site, basis);
    INFO("string " << p.str() << " theta " << theta << " variant "
                   << variant_tag(v));
    REQUIRE(equal_up_to_global_phase(
        unitary_of(c), oracle::controlled_rotation_matrix(p, theta), 1e-10));
  }
}

TEST_CASE("dimer trotter step gate counts", "[synthesis]") {
  const auto h = build_heisenberg(2, 1.0, 1.0);
  const double dt = 0.04;

  const auto cx_count = [&](SynthesisVariant v) {
    return count_gates(controlled_trotter_step(h, dt, v, 2), GateKind::CX);
  };
  const auto a = cx_count(SynthesisVariant::toffoli_based);
  const auto b = cx_count(SynthesisVariant::nested_rzz);
  const auto c = cx_count(SynthesisVariant::half_angle);
  REQUIRE(c == 16);
  REQUIRE(b == 22);
  REQUIRE((a >= 40 && a <= 60));
  REQUIRE(a > b);

  // native-Rzz emission tallies identically once Rzz expands to two CX
  const auto native = controlled_trotter_step(
      h, dt, SynthesisVariant::half_angle, 2, GateBasis::native_rzz);
  REQUIRE(count_cx_equivalent(native, CxTally::expanded) == 16);
}

TEST_CASE("trotter step equals the per-term product", "[synthesis]") {
  const auto h = build_heisenberg(2, 0.8, 0.5);
  const double dt = 0.31;
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(4, 4);
  for (const auto& term : h.terms())
    expect = oracle::pauli_rotation_matrix(term.string,
                                           2.0 * term.coefficient * dt) *
             expect;
  Eigen::MatrixXcd controlled = Eigen::MatrixXcd::Identity(8, 8);
  controlled.block(4, 4, 4, 4) = expect;

  for (auto v : {SynthesisVariant::toffoli_based, SynthesisVariant::nested_rzz,
                 SynthesisVariant::half_angle}) {
    const auto c = controlled_trotter_step(h, dt, v, 2);
    REQUIRE(equal_up_to_global_phase(unitary_of(c), controlled, 1e-10));
  }
}

TEST_CASE("deferred control in variant c", "[synthesis]") {
  const auto h = build_heisenberg(3, 1.0, 1.0);
  for (auto basis : {GateBasis::cx, GateBasis::native_rzz}) {
    const auto c = controlled_trotter_step(h, 0.2,
                                           SynthesisVariant::half_angle, 3,
                                           basis);
    for (const auto& g : c.gates()) {
      const bool touches_pointer =
          g.qubits[0] == 3 || (g.arity() == 2 && g.qubits[1] == 3);
      if (touches_pointer) {
        REQUIRE(is_two_qubit(g.kind));
        break;
      }
    }
  }
}

TEST_CASE("mms prep circuit structure", "[synthesis]") {
  const auto c1 = mms_prep_circuit(1);
  REQUIRE(c1.size() == 2);
  REQUIRE(c1.gates()[0].kind == GateKind::H);
  REQUIRE(c1.gates()[0].qubits[0] == 1);
  REQUIRE(c1.gates()[1].kind == GateKind::CX);
  REQUIRE(c1.gates()[1].qubits[0] == 1);
  REQUIRE(c1.gates()[1].qubits[1] == 0);

  REQUIRE(mms_prep_circuit(0).empty());

  const auto state =
      apply_circuit(StateVector::zero(4), mms_prep_circuit(2));
  std::vector<std::uint32_t> keep{0, 1};
  const auto reduced = partial_trace(DensityMatrix::from_state(state), keep);
  REQUIRE((reduced.entries() - Eigen::MatrixXcd::Identity(4, 4) / 4.0)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("heavy-hex lattice properties", "[synthesis]") {
  const auto smallest = heavy_hex_graph(2);
  REQUIRE(smallest.max_degree() == 3);

  for (int rows : {2, 3, 4, 5, 6, 7}) {
    const auto g = heavy_hex_graph(rows);
    REQUIRE(g.max_degree() <= 3);
    const auto dist = g.distances_from(0);
    for (auto d : dist)
      REQUIRE(d != std::numeric_limits<std::uint32_t>::max());
  }

  REQUIRE(heavy_hex_graph(7).num_nodes() == 127);
  REQUIRE_THROWS_AS(heavy_hex_graph(1), value_error);
}

TEST_CASE("protocol layout capacity", "[synthesis]") {
  const auto lat = heavy_hex_lattice(2);
  const auto g = lat.graph();
  const auto layout = protocol_layout(lat, 14);
  REQUIRE(layout.size() == 29);
  // chain stays connected at spacing <= 2 across the row seam
  for (std::uint32_t i = 0; i + 1 < 14; ++i)
    REQUIRE(g.distance(layout[i], layout[i + 1]) <= 2);
  REQUIRE_THROWS_AS(protocol_layout(lat, 15), value_error);
}

TEST_CASE("protocol layout pairs are adjacent where possible", "[synthesis]") {
  const auto lat = heavy_hex_lattice(3);
  const auto g = lat.graph();
  const std::uint32_t n = 4;
  const auto layout = protocol_layout(lat, n);
  REQUIRE(layout.size() == 2 * n + 1);
  std::vector<std::uint32_t> sorted(layout);
  std::sort(sorted.begin(), sorted.end());
  REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  // chain bonds sit at distance <= 2 along the spine
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    REQUIRE(g.distance(layout[i], layout[i + 1]) <= 2);
  // pointer starts adjacent to site 0
  REQUIRE(g.distance(layout[2 * n], layout[0]) == 1);
}

TEST_CASE("routing a conformant circuit inserts nothing", "[synthesis]") {
  const auto g = line_graph(4);
  Circuit c(4);
  c.h(0);
  c.cx(0, 1);
  c.cx(2, 1);
  c.rzz(2, 3, 0.4);
  std::vector<std::uint32_t> layout{0, 1, 2, 3};
  const auto routed = route(c, g, layout, 5);
  REQUIRE(routed.swap_count == 0);
  REQUIRE(routed.circuit.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    REQUIRE(routed.circuit.gates()[i].kind == c.gates()[i].kind);
    REQUIRE(routed.circuit.gates()[i].qubits == c.gates()[i].qubits);
  }
}

TEST_CASE("interleaved line prep needs three swaps", "[synthesis]") {
  // four bell pairs on a line with garbage interleaved, then one gate per
  // chain bond: the three bond gates each cost one swap
  const auto g = line_graph(8);
  Circuit c(8);
  c.append(mms_prep_circuit(4));
  c.cx(0, 1);
  c.cx(1, 2);
  c.cx(2, 3);
  std::vector<std::uint32_t> layout{0, 2, 4, 6, 1, 3, 5, 7};
  const auto routed = route(c, g, layout, 17);
  REQUIRE(routed.swap_count == 3);
}

TEST_CASE("routing soundness up to the output permutation", "[synthesis]") {
  auto eng = rng::engine(31337);
  for (int trial = 0; trial < 9; ++trial) {
    const std::uint32_t n = 4 + trial % 3;
    const auto g = line_graph(n);
    Circuit c(n);
    for (int k = 0; k < 10; ++k) {
      const auto a = std::uint32_t(eng() % n);
      auto b = std::uint32_t(eng() % n);
      while (b == a) b = std::uint32_t(eng() % n);
      switch (eng() % 4) {
        case 0: c.h(a); break;
        case 1: c.cx(a, b); break;
        case 2: c.rzz(a, b, rng::uniform(eng, -1.0, 1.0)); break;
        default: c.t(a); break;
      }
    }
    std::vector<std::uint32_t> layout(n);
    for (std::uint32_t q = 0; q < n; ++q) layout[q] = q;
    for (std::uint32_t q = n; q-- > 1;)
      std::swap(layout[q], layout[eng() % (q + 1)]);

    const auto routed = route(c, g, layout, 1000 + trial);
    const auto e0 = layout_permutation(routed.initial_layout, n);
    const auto ef = layout_permutation(routed.final_layout, n);
    const Eigen::MatrixXcd expect = ef * unitary_of(c) * e0.adjoint();
    REQUIRE((unitary_of(routed.circuit) - expect).cwiseAbs().maxCoeff() <
            1e-10);
  }
}

TEST_CASE("routed dimer protocol keeps at least sixteen CX", "[synthesis]") {
  const auto h = build_heisenberg(2, 1.0, 1.0);
  const auto step =
      controlled_trotter_step(h, 0.04, SynthesisVariant::half_angle, 2);
  const auto g = line_graph(3);
  std::vector<std::uint32_t> layout{0, 2, 1};  // pointer in the middle
  const auto routed = route(step, g, layout, 3);
  REQUIRE(count_gates(routed.circuit, GateKind::CX) +
              3 * routed.swap_count >=
          16);
}

TEST_CASE("fidelity estimate basics", "[synthesis]") {
  const auto g = line_graph(3);
  const auto cal = uniform_calibration(g, 0.0003, 0.01, 100.0, false);

  RoutedCircuit empty{Circuit(3), {0, 1, 2}, {0, 1, 2}, 0, 0};
  REQUIRE(estimate_fidelity(empty, cal) == 1.0);

  RoutedCircuit one_cx{Circuit(3), {0, 1, 2}, {0, 1, 2}, 0, 0};
  one_cx.circuit.cx(0, 1);
  REQUIRE(estimate_fidelity(one_cx, cal) == Approx(0.99).margin(1e-12));

  RoutedCircuit rz_only{Circuit(3), {0, 1, 2}, {0, 1, 2}, 0, 0};
  rz_only.circuit.rz(1, 0.7);
  REQUIRE(estimate_fidelity(rz_only, cal) == 1.0);
}

TEST_CASE("fidelity product cross-check on the dimer protocol", "[synthesis]") {
  const auto h = build_heisenberg(2, 1.0, 1.0);
  const auto step = controlled_trotter_step(
      h, 0.7, SynthesisVariant::half_angle, 2, GateBasis::native_rzz);
  const auto g = line_graph(3);
  std::vector<std::uint32_t> layout{0, 2, 1};
  const auto routed = route(step, g, layout, 11);

  const double eps1 = 0.0003, eps2 = 0.007;
  auto cal = uniform_calibration(g, eps1, eps2, 100.0, true);

  // independent tally over the routed gate list
  double expect = 1.0;
  for (const auto& gate : routed.circuit.gates()) {
    switch (gate.kind) {
      case GateKind::Rz: break;
      case GateKind::CX: expect *= 1.0 - eps2; break;
      case GateKind::Swap: expect *= std::pow(1.0 - eps2, 3); break;
      case GateKind::Rzz:
        expect *= 1.0 - eps2 * std::abs(wrap_angle(gate.angle)) / M_PI;
        break;
      default: expect *= 1.0 - eps1; break;
    }
  }
  REQUIRE(estimate_fidelity(routed, cal) == Approx(expect).epsilon(1e-12));

  // without pulse scaling an Rzz costs two CXs
  cal.pulse_scaling = false;
  double expect_flat = 1.0;
  for (const auto& gate : routed.circuit.gates()) {
    if (gate.kind == GateKind::Rz) continue;
    if (gate.kind == GateKind::CX) expect_flat *= 1.0 - eps2;
    else if (gate.kind == GateKind::Swap) expect_flat *= std::pow(1.0 - eps2, 3);
    else if (gate.kind == GateKind::Rzz) expect_flat *= std::pow(1.0 - eps2, 2);
    else expect_flat *= 1.0 - eps1;
  }
  REQUIRE(estimate_fidelity(routed, cal) == Approx(expect_flat).epsilon(1e-12));
}

TEST_CASE("fidelity monotonicity", "[synthesis]") {
  const auto g = line_graph(3);
  const auto cal = uniform_calibration(g, 0.0003, 0.007, 100.0, true);
  RoutedCircuit rc{Circuit(3), {0, 1, 2}, {0, 1, 2}, 0, 0};
  double prev = estimate_fidelity(rc, cal);
  const Gate gates[] = {Gate::h(0), Gate::cx(0, 1), Gate::swap(1, 2),
                        Gate::rzz(0, 1, 0.9), Gate::x(2)};
  for (const auto& gate : gates) {
    rc.circuit.add(gate);
    const double f = estimate_fidelity(rc, cal);
    REQUIRE(f < prev);
    prev = f;
  }

  // pulse-scaled Rzz error is non-decreasing in |theta| on (0, pi]
  const auto g2 = line_graph(2);
  const auto cal2 = uniform_calibration(g2, 0.0, 0.007, 100.0, true);
  double prev_cost = -1.0;
  for (double theta = 0.1; theta <= M_PI + 1e-12; theta += 0.1) {
    RoutedCircuit one{Circuit(2), {0, 1}, {0, 1}, 0, 0};
    one.circuit.rzz(0, 1, theta);
    const double cost = 1.0 - estimate_fidelity(one, cal2);
    REQUIRE(cost >= prev_cost);
    prev_cost = cost;
  }
}

TEST_CASE("angle wrapping", "[synthesis]") {
  REQUIRE(wrap_angle(0.0) == 0.0);
  REQUIRE(wrap_angle(M_PI) == Approx(M_PI));
  REQUIRE(wrap_angle(-M_PI) == Approx(M_PI));
  REQUIRE(wrap_angle(6.0) == Approx(6.0 - 2.0 * M_PI));
  REQUIRE(wrap_angle(-12.0) == Approx(-12.0 + 4.0 * M_PI));
}

TEST_CASE("missing calibration rejected", "[synthesis]") {
  const auto g = line_graph(3);
  auto cal = uniform_calibration(g, 0.0003, 0.007, 100.0, false);
  cal.eps2.erase({0, 1});
  RoutedCircuit rc{Circuit(3), {0, 1, 2}, {0, 1, 2}, 0, 0};
  rc.circuit.cx(0, 1);
  REQUIRE_THROWS_AS(estimate_fidelity(rc, cal), value_error);
}

TEST_CASE("rz site selection prefers the pointer side", "[synthesis]") {
  // pointer at one end of a line: the bond rotation's Rzz must touch the
  // support qubit closest to the pointer
  const auto g = line_graph(4);
  const auto h = build_heisenberg(3, 1.0, 0.0);
  std::vector<std::uint32_t> layout{0, 1, 2, 3};  // pointer = logical 3
  const auto step = controlled_trotter_step(
      h, 0.2, SynthesisVariant::half_angle, 3, GateBasis::native_rzz, 0, &g,
      &layout);
  // first bond (0,1): site 1 is closer to the pointer at node 3
  bool checked = false;
  for (const auto& gate : step.gates()) {
    if (gate.kind != GateKind::Rzz) continue;
    REQUIRE(gate.qubits[0] == 3);
    REQUIRE(gate.qubits[1] == 1);
    checked = true;
    break;
  }
  REQUIRE(checked);
}
