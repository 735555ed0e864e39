// Command-line front end: each subcommand reproduces one experiment of the
// pipeline as a deterministic, file-based artifact (CSV/JSON outputs under
// --out). Exit codes: 0 success, 2 configuration error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qspec/qspec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qspec;

namespace {

struct config_error : value_error {
  using value_error::value_error;
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error("config error at " + path + ": " + what);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
}

void require_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed) ok |= key == k;
    if (!ok) fail(path + "." + key, "unknown key");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

double need_number(const json& j, const std::string& path, const char* key) {
  const auto& v = need(j, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

Hamiltonian parse_hamiltonian(const json& j, const std::string& path) {
  require_keys(j, path, {"file", "heisenberg"});
  if (j.contains("file"))
    return io::read_hamiltonian(j.at("file").get<std::string>());
  if (!j.contains("heisenberg")) fail(path, "need `file` or `heisenberg`");
  const auto& hj = j.at("heisenberg");
  require_keys(hj, path + ".heisenberg", {"n", "J", "B", "boundary"});
  const auto boundary_name = hj.value("boundary", "open");
  Boundary boundary;
  if (boundary_name == "open") boundary = Boundary::open;
  else if (boundary_name == "periodic") boundary = Boundary::periodic;
  else fail(path + ".heisenberg.boundary", "expected open|periodic");
  return build_heisenberg(
      std::size_t(need_number(hj, path + ".heisenberg", "n")),
      need_number(hj, path + ".heisenberg", "J"),
      need_number(hj, path + ".heisenberg", "B"), boundary);
}

struct GraphSpec {
  CouplingGraph graph;
  std::optional<HeavyHexLattice> lattice;
};

GraphSpec parse_graph(const json& j, const std::string& path) {
  require_keys(j, path, {"file", "heavy_hex_rows"});
  if (j.contains("file")) {
    return {io::read_coupling_graph(j.at("file").get<std::string>()),
            std::nullopt};
  }
  if (!j.contains("heavy_hex_rows"))
    fail(path, "need `file` or `heavy_hex_rows`");
  auto lat = heavy_hex_lattice(int(need_number(j, path, "heavy_hex_rows")));
  auto graph = lat.graph();
  return {std::move(graph), std::move(lat)};
}

CalibrationModel parse_calibration(const json& j, const std::string& path,
                                   const CouplingGraph& graph) {
  require_keys(j, path, {"file", "uniform"});
  if (j.contains("file"))
    return io::read_calibration(j.at("file").get<std::string>());
  if (!j.contains("uniform")) fail(path, "need `file` or `uniform`");
  const auto& u = j.at("uniform");
  require_keys(u, path + ".uniform",
               {"eps1", "eps2", "t1_us", "pulse_scaling"});
  return uniform_calibration(graph, need_number(u, path + ".uniform", "eps1"),
                             need_number(u, path + ".uniform", "eps2"),
                             u.value("t1_us", 100.0),
                             u.value("pulse_scaling", false));
}

SynthesisVariant parse_variant(const json& j, const std::string& path) {
  const auto tag = j.get<std::string>();
  if (tag.size() != 1) fail(path, "expected a|b|c");
  try {
    return variant_from_tag(tag[0]);
  } catch (const value_error&) {
    fail(path, "expected a|b|c");
  }
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw value_error("cannot write " + (dir / name).string());
  std::cout << "wrote " << (dir / name).string() << "\n";
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

//-------------------------------------------------------------------------
// Subcommands
//-------------------------------------------------------------------------

int cmd_diagonalize(const std::string& ham_file) {
  const auto h = io::read_hamiltonian(ham_file);
  const auto s = diagonalize(h);
  std::cout << "eigenvalue multiplicity\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    std::cout << fmt(s.eigenvalues[i]) << ' ' << s.multiplicities[i] << "\n";
  return 0;
}

int cmd_series(const json& cfg, const fs::path& out_dir,
               std::optional<std::uint64_t> seed_override) {
  require_keys(cfg, "series",
               {"hamiltonian", "T", "dt", "measurement", "evolution",
                "realization", "noise", "seed"});
  const auto h = parse_hamiltonian(need(cfg, "series", "hamiltonian"),
                                   "series.hamiltonian");
  const double total_time = need_number(cfg, "series", "T");
  const double dt = need_number(cfg, "series", "dt");

  Measurement mode = Measurement::exact();
  const auto& mj = need(cfg, "series", "measurement");
  if (mj.is_string()) {
    if (mj.get<std::string>() != "exact")
      fail("series.measurement", "expected \"exact\" or {shots}");
  } else {
    require_keys(mj, "series.measurement", {"shots"});
    mode = Measurement::sampled(
        std::uint64_t(need_number(mj, "series.measurement", "shots")));
  }

  Evolution ev = Evolution::exact();
  const auto& ej = need(cfg, "series", "evolution");
  if (ej.is_string()) {
    if (ej.get<std::string>() != "exact")
      fail("series.evolution", "expected \"exact\" or {trotter_steps, variant}");
  } else {
    require_keys(ej, "series.evolution", {"trotter_steps", "variant"});
    ev = Evolution::trotter(
        std::uint32_t(need_number(ej, "series.evolution", "trotter_steps")),
        parse_variant(need(ej, "series.evolution", "variant"),
                      "series.evolution.variant"));
  }

  auto realization = MmsRealization::density_matrix;
  if (cfg.contains("realization")) {
    const auto name = cfg.at("realization").get<std::string>();
    if (name == "density") realization = MmsRealization::density_matrix;
    else if (name == "purified") realization = MmsRealization::purified;
    else fail("series.realization", "expected density|purified");
  }

  NoiseSchedule noise;
  if (cfg.contains("noise")) {
    require_keys(cfg.at("noise"), "series.noise", {"depolarizing_after_2q"});
    noise.depolarizing_after_2q =
        need_number(cfg.at("noise"), "series.noise", "depolarizing_after_2q");
  }

  const std::uint64_t seed =
      seed_override.value_or(std::uint64_t(cfg.value("seed", 0.0)));
  const auto series = run_hadamard_series(h, total_time, dt, mode, ev,
                                          realization, noise, seed);
  auto out = open_output(out_dir, "series.csv");
  const bool with_err = mode.shots > 0;
  io::write_series(out, series, with_err,
                   with_err ? 1.0 / std::sqrt(double(mode.shots)) : 0.0);
  return 0;
}

int cmd_stochastic(const json& cfg, const fs::path& out_dir,
                   std::optional<std::uint64_t> seed_override) {
  require_keys(cfg, "stochastic",
               {"hamiltonian", "samples", "T", "dt", "propagator", "seed",
                "write_samples"});
  const auto h = parse_hamiltonian(need(cfg, "stochastic", "hamiltonian"),
                                   "stochastic.hamiltonian");
  const auto samples =
      std::size_t(need_number(cfg, "stochastic", "samples"));
  const double total_time = need_number(cfg, "stochastic", "T");
  const double dt = need_number(cfg, "stochastic", "dt");

  Propagator prop = Propagator::exact();
  const auto& pj = need(cfg, "stochastic", "propagator");
  if (pj.is_string()) {
    if (pj.get<std::string>() != "exact")
      fail("stochastic.propagator", "expected \"exact\" or {euler_dt}");
  } else {
    require_keys(pj, "stochastic.propagator", {"euler_dt"});
    prop = Propagator::euler(
        need_number(pj, "stochastic.propagator", "euler_dt"));
  }

  const bool write_samples = cfg.value("write_samples", false);
  const std::uint64_t seed =
      seed_override.value_or(std::uint64_t(cfg.value("seed", 0.0)));
  const auto run = run_stochastic_series(h, samples, total_time, dt, prop,
                                         seed, write_samples);

  auto out = open_output(out_dir, "stochastic.csv");
  io::write_series(out, run.average);
  if (write_samples) {
    for (std::size_t k = 0; k < run.samples.size(); ++k) {
      auto sample_out =
          open_output(out_dir, "sample_" + std::to_string(k) + ".csv");
      io::write_series(sample_out, run.samples[k]);
    }
  }
  auto meta = open_output(out_dir, "stochastic_meta.json");
  meta << json{{"samples", samples},
               {"seed", seed},
               {"max_norm_drift", run.max_norm_drift},
               {"warnings", run.warnings}}
              .dump(2)
       << "\n";
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_spectrum(const json& cfg, const fs::path& out_dir) {
  require_keys(cfg, "spectrum",
               {"series", "interpolate", "window", "normalize", "threshold"});
  auto series = io::read_series(
      need(cfg, "spectrum", "series").get<std::string>());

  if (cfg.contains("interpolate")) {
    require_keys(cfg.at("interpolate"), "spectrum.interpolate", {"dt"});
    const double dt =
        need_number(cfg.at("interpolate"), "spectrum.interpolate", "dt");
    series = interpolate_quadratic(
        series, TimeSeries::uniform_grid(series.times().back(), dt));
  }

  DftOptions opts;
  opts.normalize = cfg.value("normalize", true);
  const auto window = cfg.value("window", "none");
  if (window == "hann") opts.hann = true;
  else if (window != "none") fail("spectrum.window", "expected none|hann");

  const auto spec = dft(series, opts);
  auto spectrum_out = open_output(out_dir, "spectrum.csv");
  io::write_spectrum(spectrum_out, spec);

  const double threshold = cfg.value("threshold", 0.2);
  const auto peaks = find_peaks(spec, threshold);
  auto peaks_out = open_output(out_dir, "peaks.csv");
  io::write_peaks(peaks_out, peaks);
  return 0;
}

int cmd_synth_count(const json& cfg, const fs::path& out_dir,
                    std::optional<std::uint64_t> seed_override) {
  require_keys(cfg, "synth-count", {"hamiltonian", "time", "routing", "seed"});
  const auto h = parse_hamiltonian(need(cfg, "synth-count", "hamiltonian"),
                                   "synth-count.hamiltonian");
  const double t = cfg.value("time", 1.0);
  const auto pointer = std::uint32_t(h.num_qubits());
  const std::uint64_t seed =
      seed_override.value_or(std::uint64_t(cfg.value("seed", 0.0)));

  std::optional<GraphSpec> routing;
  std::vector<std::uint32_t> layout;
  if (cfg.contains("routing")) {
    const auto& rj = cfg.at("routing");
    require_keys(rj, "synth-count.routing", {"graph", "layout"});
    routing = parse_graph(need(rj, "synth-count.routing", "graph"),
                          "synth-count.routing.graph");
    if (rj.contains("layout"))
      layout = rj.at("layout").get<std::vector<std::uint32_t>>();
    else
      for (std::uint32_t q = 0; q <= pointer; ++q) layout.push_back(q);
  }

  auto out = open_output(out_dir, "counts.csv");
  out << "variant,cx,cx_mapped,ecr_equiv\n";
  std::cout << "variant cx cx_mapped ecr_equiv\n";
  for (auto v : {SynthesisVariant::toffoli_based, SynthesisVariant::nested_rzz,
                 SynthesisVariant::half_angle}) {
    const auto cx_circuit = controlled_trotter_step(h, t, v, pointer);
    const auto cx = count_gates(cx_circuit, GateKind::CX);
    std::size_t cx_mapped = cx, ecr = cx;
    if (routing) {
      const auto routed_cx = route(cx_circuit, routing->graph, layout, seed);
      cx_mapped = count_gates(routed_cx.circuit, GateKind::CX) +
                  3 * routed_cx.swap_count;
      const auto native = controlled_trotter_step(h, t, v, pointer,
                                                  GateBasis::native_rzz);
      ecr = route(native, routing->graph, layout, seed).two_qubit_tally;
    }
    out << variant_tag(v) << ',' << cx << ',' << cx_mapped << ',' << ecr
        << '\n';
    std::cout << variant_tag(v) << ' ' << cx << ' ' << cx_mapped << ' ' << ecr
              << "\n";
  }
  return 0;
}

int cmd_route(const json& cfg, const fs::path& out_dir,
              std::optional<std::uint64_t> seed_override) {
  require_keys(cfg, "route", {"circuit", "graph", "layout", "seed"});
  const auto circuit =
      io::read_circuit(need(cfg, "route", "circuit").get<std::string>());
  auto graph_spec =
      parse_graph(need(cfg, "route", "graph"), "route.graph");
  std::vector<std::uint32_t> layout;
  if (cfg.contains("layout"))
    layout = cfg.at("layout").get<std::vector<std::uint32_t>>();
  else
    for (std::uint32_t q = 0; q < circuit.width(); ++q) layout.push_back(q);

  const std::uint64_t seed =
      seed_override.value_or(std::uint64_t(cfg.value("seed", 0.0)));
  const auto routed = route(circuit, graph_spec.graph, layout, seed);

  auto out = open_output(out_dir, "routed.txt");
  io::write_circuit(out, routed.circuit);
  auto stats = open_output(out_dir, "route_stats.json");
  stats << json{{"swap_count", routed.swap_count},
                {"two_qubit_tally", routed.two_qubit_tally},
                {"initial_layout", routed.initial_layout},
                {"final_layout", routed.final_layout}}
               .dump(2)
        << "\n";
  return 0;
}

int cmd_fidelity(const json& cfg, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  require_keys(cfg, "fidelity",
               {"chain", "time", "trotter_steps", "variant", "graph",
                "calibration", "seed"});
  const auto& chain = need(cfg, "fidelity", "chain");
  require_keys(chain, "fidelity.chain", {"from", "to"});
  const auto n_from = std::uint32_t(need_number(chain, "fidelity.chain", "from"));
  const auto n_to = std::uint32_t(need_number(chain, "fidelity.chain", "to"));
  if (n_from < 1 || n_to < n_from) fail("fidelity.chain", "need 1 <= from <= to");

  const double t = need_number(cfg, "fidelity", "time");
  const auto steps = std::uint32_t(cfg.value("trotter_steps", 1.0));
  const auto variant = cfg.contains("variant")
                           ? parse_variant(cfg.at("variant"), "fidelity.variant")
                           : SynthesisVariant::half_angle;

  auto graph_spec = parse_graph(need(cfg, "fidelity", "graph"), "fidelity.graph");
  if (!graph_spec.lattice)
    fail("fidelity.graph", "chain sweep needs a heavy-hex lattice");
  const auto cal = parse_calibration(need(cfg, "fidelity", "calibration"),
                                     "fidelity.calibration", graph_spec.graph);
  const std::uint64_t seed =
      seed_override.value_or(std::uint64_t(cfg.value("seed", 0.0)));

  auto out = open_output(out_dir, "fidelity.csv");
  out << "n,fidelity,cx,rzz,swaps,ecr_equiv\n";
  for (std::uint32_t n = n_from; n <= n_to; ++n) {
    const auto h = build_heisenberg(n, 1.0, 1.0);
    const auto layout = protocol_layout(*graph_spec.lattice, n);
    const auto circuit = protocol_circuit(h, t, steps, variant,
                                          GateBasis::native_rzz,
                                          &graph_spec.graph, &layout);
    const auto routed =
        route(circuit, graph_spec.graph, layout, rng::derive(seed, n));
    const double f = estimate_fidelity(routed, cal);
    out << n << ',' << fmt(f) << ','
        << count_gates(routed.circuit, GateKind::CX) << ','
        << count_gates(routed.circuit, GateKind::Rzz) << ','
        << routed.swap_count << ',' << routed.two_qubit_tally << '\n';
  }
  return 0;
}

int cmd_mms_lifetime(const json& cfg, const fs::path& out_dir) {
  require_keys(cfg, "mms-lifetime", {"n", "t1_us", "times"});
  const auto n = std::uint32_t(need_number(cfg, "mms-lifetime", "n"));

  std::vector<double> t1;
  const auto& tj = need(cfg, "mms-lifetime", "t1_us");
  if (tj.is_number()) t1.push_back(tj.get<double>());
  else t1 = tj.get<std::vector<double>>();

  std::vector<double> times;
  const auto& times_j = need(cfg, "mms-lifetime", "times");
  if (times_j.is_array()) {
    times = times_j.get<std::vector<double>>();
  } else {
    require_keys(times_j, "mms-lifetime.times", {"from", "to", "count"});
    const double from = need_number(times_j, "mms-lifetime.times", "from");
    const double to = need_number(times_j, "mms-lifetime.times", "to");
    const auto count =
        std::size_t(need_number(times_j, "mms-lifetime.times", "count"));
    if (count < 2 || !(to > from)) fail("mms-lifetime.times", "bad range");
    for (std::size_t i = 0; i < count; ++i)
      times.push_back(from + (to - from) * double(i) / double(count - 1));
  }

  const auto points = mms_lifetime_experiment(n, t1, times);
  auto out = open_output(out_dir, "lifetime.csv");
  out << "t,fidelity,p_all_zeros\n";
  for (const auto& p : points)
    out << fmt(p.time) << ',' << fmt(p.fidelity_mms) << ','
        << fmt(p.p_all_zeros) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral estimation of Pauli-string Hamiltonians by time "
               "evolution"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed_value = 0;
  bool seed_given = false;

  std::string ham_file;
  auto* diag = app.add_subcommand("diagonalize",
                                  "print the eigenvalue spectrum of a "
                                  "Hamiltonian file");
  diag->add_option("hamiltonian", ham_file, "Hamiltonian text file")
      ->required();

  const char* names[] = {"series",      "stochastic", "spectrum",
                         "synth-count", "route",      "fidelity",
                         "mms-lifetime"};
  const char* descs[] = {
      "Hadamard-test time series on the maximally mixed state",
      "classical random-phase baseline series",
      "DFT power spectrum and peak extraction from a series CSV",
      "per-variant CX counts for the controlled Trotter step",
      "map a circuit onto a coupling graph with SWAP insertion",
      "estimated protocol fidelity versus chain length",
      "maximally-mixed-state lifetime under relaxation"};
  for (int i = 0; i < 7; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "JSON experiment config")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed_value, "root seed override")
        ->each([&](const std::string&) { seed_given = true; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (diag->parsed()) return cmd_diagonalize(ham_file);
    const json cfg = load_config(config_path);
    std::optional<std::uint64_t> seed;
    if (seed_given) seed.emplace(seed_value);
    if (app.get_subcommand("series")->parsed())
      return cmd_series(cfg, out_dir, seed);
    if (app.get_subcommand("stochastic")->parsed())
      return cmd_stochastic(cfg, out_dir, seed);
    if (app.get_subcommand("spectrum")->parsed())
      return cmd_spectrum(cfg, out_dir);
    if (app.get_subcommand("synth-count")->parsed())
      return cmd_synth_count(cfg, out_dir, seed);
    if (app.get_subcommand("route")->parsed())
      return cmd_route(cfg, out_dir, seed);
    if (app.get_subcommand("fidelity")->parsed())
      return cmd_fidelity(cfg, out_dir, seed);
    if (app.get_subcommand("mms-lifetime")->parsed())
      return cmd_mms_lifetime(cfg, out_dir);
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const value_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
