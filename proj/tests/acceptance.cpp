// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Criteria run end to end against the public interfaces.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

#include "oracle.hpp"
#include "qspec/qspec.hpp"

using namespace qspec;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail = "") {
  std::cout << "[criterion " << (criterion < 10 ? "0" : "") << criterion
            << "] " << name << ": " << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << "  (" << detail << ")";
  std::cout << std::endl;
}

std::vector<double> top_peak_positions(const PeakSet& peaks, std::size_t k) {
  auto sorted = peaks.peaks;
  std::sort(sorted.begin(), sorted.end(),
            [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  sorted.resize(std::min(k, sorted.size()));
  std::vector<double> omegas;
  for (const auto& p : sorted) omegas.push_back(p.omega);
  std::sort(omegas.begin(), omegas.end());
  return omegas;
}

}  // namespace

TEST_CASE("criterion 1: dimer spectrum reproduction", "[acceptance]") {
  const auto start = std::chrono::steady_clock::now();

  const auto h = build_heisenberg(2, 1.0, 1.0);
  const auto series = run_hadamard_series(h, 6.0, 0.04, Measurement::exact(),
                                          Evolution::exact());
  const auto spec = dft(series, {.normalize = true});
  const auto peaks = find_peaks(spec, 0.2);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const double bin = 2.0 * M_PI / 6.0;
  const double expect[4] = {-3.0, -1.0, 1.0, 3.0};
  bool pass = peaks.peaks.size() == 4 && elapsed < 5.0;
  double worst = 0.0;
  if (pass) {
    for (int i = 0; i < 4; ++i) {
      const double err = std::abs(peaks.peaks[i].omega - expect[i]);
      worst = std::max(worst, err);
      pass &= err < bin;
    }
  }
  report(1, "dimer spectrum reproduction", pass,
         std::to_string(peaks.peaks.size()) + " peaks, worst offset " +
             fmt(worst) + " of bin " + fmt(bin) +
             ", runtime " + fmt(elapsed) + " s");
  REQUIRE(pass);
}

TEST_CASE("criterion 2: hadamard test measures Tr(U)/d", "[acceptance]") {
  auto eng = rng::engine(20240102);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t n = 1 + eng() % 3;
    const auto h = oracle::random_hamiltonian(n, 2 + eng() % (3 * n), eng());
    const double t = rng::uniform(eng, 0.0, 2.0 * M_PI);
    const cxd got =
        hadamard_test_point(h, t, Measurement::exact(), Evolution::exact());
    const cxd expect = trace_evolution_exact(h, t) / double(h.dim());
    worst = std::max(worst, std::abs(got - expect));
  }
  const bool pass = worst < 1e-10;
  report(2, "hadamard test equals Tr(U)/d", pass,
         "worst deviation " + fmt(worst));
  REQUIRE(pass);
}

TEST_CASE("criterion 3: synthesis equivalence", "[acceptance]") {
  auto eng = rng::engine(20240103);
  const SynthesisVariant variants[] = {SynthesisVariant::toffoli_based,
                                       SynthesisVariant::nested_rzz,
                                       SynthesisVariant::half_angle};
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t n = 1 + eng() % 3;
    const std::size_t weight = 1 + eng() % n;
    std::vector<PauliOp> ops(n, PauliOp::I);
    std::vector<std::uint32_t> sites(n);
    for (std::uint32_t i = 0; i < n; ++i) sites[i] = i;
    for (std::size_t w = 0; w < weight; ++w) {
      const auto pick = w + eng() % (n - w);
      std::swap(sites[w], sites[pick]);
      ops[sites[w]] = static_cast<PauliOp>(1 + eng() % 3);
    }
    const PauliString p(ops);
    const double theta = rng::uniform(eng, -2.0 * M_PI, 2.0 * M_PI);
    const auto v = variants[trial % 3];
    const auto basis = (eng() % 2) ? GateBasis::native_rzz : GateBasis::cx;
    const auto supp = p.support();
    const auto rz_site = std::uint32_t(supp[eng() % supp.size()]);

    const auto c = controlled_pauli_rotation(p, theta, v, n, rz_site, basis);
    if (!equal_up_to_global_phase(
            unitary_of(c), oracle::controlled_rotation_matrix(p, theta),
            1e-10))
      ++failures;
  }
  const bool pass = failures == 0;
  report(3, "synthesis equivalence over 200 random rotations", pass,
         std::to_string(failures) + " mismatches");
  REQUIRE(pass);
}

TEST_CASE("criterion 4: dimer trotter-step CX counts", "[acceptance]") {
  const auto h = build_heisenberg(2, 1.0, 1.0);
  const auto count = [&](SynthesisVariant v) {
    return count_gates(controlled_trotter_step(h, 0.04, v, 2), GateKind::CX);
  };
  const auto a = count(SynthesisVariant::toffoli_based);
  const auto b = count(SynthesisVariant::nested_rzz);
  const auto c = count(SynthesisVariant::half_angle);
  const bool pass = c == 16 && b == 22 && a >= 40 && a <= 60 && a > b;
  report(4, "trotter-step CX counts", pass,
         "a=" + std::to_string(a) + " b=" + std::to_string(b) +
             " c=" + std::to_string(c));
  REQUIRE(pass);
}

TEST_CASE("criterion 5: garbage-side channels leave I/4", "[acceptance]") {
  const auto bell_pairs =
      apply_circuit(StateVector::zero(4), mms_prep_circuit(2));
  const DensityMatrix fresh = DensityMatrix::from_state(bell_pairs);
  const std::vector<std::uint32_t> keep{0, 1};
  const Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(4, 4) / 4.0;

  auto eng = rng::engine(20240105);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    DensityMatrix rho = fresh;
    const int style = trial % 4;
    if (style == 0) {
      const std::uint32_t g[1] = {std::uint32_t(2 + eng() % 2)};
      rho = apply_channel(
          rho, QuantumChannel::amplitude_damping(rng::uniform(eng)), g);
    } else if (style == 1) {
      const std::uint32_t g[1] = {std::uint32_t(2 + eng() % 2)};
      rho = apply_channel(rho,
                          QuantumChannel::depolarizing(rng::uniform(eng)), g);
    } else if (style == 2) {
      const std::uint32_t g2[1] = {2}, g3[1] = {3};
      rho = apply_channel(
          rho, QuantumChannel(oracle::random_tp_channel(1, 2 + int(eng() % 3),
                                                        eng())),
          g2);
      rho = apply_channel(
          rho, QuantumChannel(oracle::random_tp_channel(1, 2 + int(eng() % 3),
                                                        eng())),
          g3);
    } else {
      const std::uint32_t both[2] = {2, 3};
      rho = apply_channel(
          rho, QuantumChannel(oracle::random_tp_channel(2, 2 + int(eng() % 4),
                                                        eng())),
          both);
    }
    const auto reduced = partial_trace(rho, keep);
    worst = std::max(worst,
                     (reduced.entries() - target).cwiseAbs().maxCoeff());
  }
  const bool pass = worst < 1e-12;
  report(5, "trace-preserving garbage noise leaves I/4", pass,
         "worst entry deviation " + fmt(worst));
  REQUIRE(pass);
}

TEST_CASE("criterion 6: stochastic baseline", "[acceptance]") {
  const auto h = build_heisenberg(2, 1.0, 1.0);

  // peak agreement at the published grid
  const auto run = run_stochastic_series(h, 100, 6.0, 1e-4,
                                         Propagator::exact(), 20240106);
  const auto stoc_peaks =
      top_peak_positions(find_peaks(dft(run.average, {.normalize = true}),
                                    0.2),
                         4);

  const auto exact_series = run_hadamard_series(
      h, 6.0, 0.04, Measurement::exact(), Evolution::exact());
  const auto exact_peaks = top_peak_positions(
      find_peaks(dft(exact_series, {.normalize = true}), 0.2), 4);

  const double bin = 2.0 * M_PI / 6.0;
  bool peaks_ok = stoc_peaks.size() == 4 && exact_peaks.size() == 4;
  double worst = 0.0;
  if (peaks_ok) {
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(stoc_peaks[i] - exact_peaks[i]));
      peaks_ok &= std::abs(stoc_peaks[i] - exact_peaks[i]) < bin;
    }
  }

  // variance of the mean scales as 1/K
  const std::size_t reps = 48;
  const std::vector<std::size_t> ks{10, 100, 1000};
  const std::vector<std::size_t> probes{3, 9, 15, 21};
  std::vector<double> log_k, log_var;
  for (const auto k : ks) {
    std::vector<std::vector<double>> values(probes.size());
    for (std::size_t r = 0; r < reps; ++r) {
      const auto rep = run_stochastic_series(h, k, 6.0, 0.25,
                                             Propagator::exact(),
                                             rng::derive(20240606, k, r));
      for (std::size_t p = 0; p < probes.size(); ++p)
        values[p].push_back(rep.average.values()[probes[p]].real());
    }
    double var = 0.0;
    for (const auto& vs : values) var += oracle::sample_variance(vs);
    log_k.push_back(std::log(double(k)));
    log_var.push_back(std::log(var / double(probes.size())));
  }
  // least-squares slope
  const double mk = oracle::mean(log_k), mv = oracle::mean(log_var);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    num += (log_k[i] - mk) * (log_var[i] - mv);
    den += (log_k[i] - mk) * (log_k[i] - mk);
  }
  const double slope = num / den;
  const bool slope_ok = slope > -1.15 && slope < -0.85;

  const bool pass = peaks_ok && slope_ok;
  report(6, "stochastic baseline peaks and variance decay", pass,
         "worst peak offset " + fmt(worst) + ", variance slope " +
             fmt(slope));
  REQUIRE(pass);
}

TEST_CASE("criterion 7: shot-noise standard deviation", "[acceptance]") {
  // <X> = 0 on |0>, so every draw is a fair coin
  const auto zero = StateVector::zero(1);
  const auto x = PauliString::parse("X");
  const std::uint64_t shots = 8192;
  std::vector<double> estimates(1000);
  for (std::size_t r = 0; r < estimates.size(); ++r)
    estimates[r] =
        sample_expectation(zero, x, shots, rng::derive(20240107, 3, r));
  const double sd = std::sqrt(oracle::sample_variance(estimates));
  const double ideal = 1.0 / std::sqrt(double(shots));
  const bool pass = sd > 0.9 * ideal && sd < 1.1 * ideal;
  report(7, "shot-noise standard deviation", pass,
         "measured " + fmt(sd) + ", ideal " + fmt(ideal));
  REQUIRE(pass);
}

TEST_CASE("criterion 8: maximally-mixed-state lifetime shape", "[acceptance]") {
  std::vector<double> times;
  for (int i = 0; i < 20; ++i) times.push_back(double(i) * 60.0);
  const std::vector<double> t1{90.0};
  const auto points = mms_lifetime_experiment(2, t1, times);

  bool pass = std::abs(points.front().fidelity_mms - 1.0) < 1e-10 &&
              std::abs(points.front().p_all_zeros - 0.25) < 1e-12;
  for (std::size_t i = 1; i < points.size(); ++i) {
    pass &= points[i].fidelity_mms < points[i - 1].fidelity_mms;
    pass &= points[i].p_all_zeros > points[i - 1].p_all_zeros;
  }
  pass &= points.back().p_all_zeros > 0.999;
  report(8, "maximally-mixed-state lifetime shape", pass,
         "P(00) " + fmt(points.front().p_all_zeros) + " -> " +
             fmt(points.back().p_all_zeros));
  REQUIRE(pass);
}

TEST_CASE("criterion 9: fidelity versus chain length", "[acceptance]") {
  const auto lat = heavy_hex_lattice(7);
  const auto graph = lat.graph();
  const auto cal = uniform_calibration(graph, 3e-4, 0.007, 300.0, true);

  std::vector<double> fidelities;
  for (std::uint32_t n = 2; n <= 14; ++n) {
    const auto h = build_heisenberg(n, 1.0, 1.0);
    const auto layout = protocol_layout(lat, n);
    const auto circuit =
        protocol_circuit(h, 6.0, 1, SynthesisVariant::half_angle,
                         GateBasis::native_rzz, &graph, &layout);
    const auto routed = route(circuit, graph, layout, rng::derive(9, n));
    fidelities.push_back(estimate_fidelity(routed, cal));
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < fidelities.size(); ++i)
    decreasing &= fidelities[i] < fidelities[i - 1];
  int crossing = -1;
  for (std::size_t i = 0; i < fidelities.size(); ++i)
    if (fidelities[i] < 0.5) {
      crossing = int(i) + 2;
      break;
    }
  const bool pass = decreasing && crossing >= 6 && crossing <= 14;
  report(9, "fidelity decreases with chain length", pass,
         "F(2)=" + fmt(fidelities.front()) + ", crosses 0.5 at n=" +
             std::to_string(crossing));
  REQUIRE(pass);
}

TEST_CASE("criterion 10: purification equivalence", "[acceptance]") {
  const auto h = build_heisenberg(2, 1.0, 1.0);
  const auto dm = run_hadamard_series(h, 6.0, 0.04, Measurement::exact(),
                                      Evolution::exact(),
                                      MmsRealization::density_matrix);
  const auto pure = run_hadamard_series(h, 6.0, 0.04, Measurement::exact(),
                                        Evolution::exact(),
                                        MmsRealization::purified);
  double worst = 0.0;
  for (std::size_t i = 0; i < dm.size(); ++i)
    worst = std::max(worst, std::abs(dm.values()[i] - pure.values()[i]));
  const bool pass = worst < 1e-12;
  report(10, "purified and direct I/d realizations agree", pass,
         "worst deviation " + fmt(worst));
  REQUIRE(pass);
}

TEST_CASE("criterion 11: first-order trotter convergence on the dimer",
          "[acceptance]") {
  // Asserts the first-order scaling window: halving the step size should
  // shrink the series deviation by about two. For this dimer the grouped
  // term ordering makes the product formula exact (bond terms commute
  // among themselves and with the uniform field), so both deviations sit
  // at roundoff and the ratio is noise. The assertion is kept as stated
  // and is expected to fail; the three-site test in the protocol suite
  // shows the genuine convergence of the trotter path.
  const auto h = build_heisenberg(2, 1.0, 1.0);
  const auto spec = diagonalize(h);
  auto deviation = [&](std::uint32_t steps) {
    double worst = 0.0;
    const auto series = run_hadamard_series(
        h, 6.0, 0.04, Measurement::exact(),
        Evolution::trotter(steps, SynthesisVariant::half_angle));
    for (std::size_t i = 0; i < series.size(); ++i)
      worst = std::max(
          worst, std::abs(series.values()[i] -
                          trace_evolution_exact(spec, series.times()[i]) /
                              4.0));
    return worst;
  };
  const double d16 = deviation(16), d32 = deviation(32);
  const double ratio = d16 / d32;
  const bool pass = ratio >= 1.7 && ratio <= 2.3;
  report(11, "dimer trotter deviation halves with the step", pass,
         "deviation " + fmt(d16) + " -> " + fmt(d32) +
             ", ratio " + fmt(ratio));
  REQUIRE(pass);
}
