#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qspec/circuit.hpp"
#include "qspec/error.hpp"
#include "qspec/pauli.hpp"
#include "qspec/spectral.hpp"
#include "qspec/synthesis.hpp"
#include "qspec/timeseries.hpp"

namespace qspec::io {

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw value_error("cannot open file: " + path.string());
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw value_error("cannot write file: " + path.string());
  return out;
}

inline bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

//=========================================================================
// Hamiltonian text format: one `coefficient PAULI_STRING` per line
//=========================================================================

inline Hamiltonian read_hamiltonian(std::istream& in,
                                    const std::string& origin = "<stream>") {
  std::vector<PauliTerm> terms;
  std::size_t num_qubits = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank_or_comment(line)) continue;
    std::istringstream ls(line);
    double coeff = 0.0;
    std::string letters;
    if (!(ls >> coeff >> letters)) {
      throw value_error(origin + ":" + std::to_string(lineno) +
                        ": expected `coefficient PAULI_STRING`");
    }
    std::string rest;
    if (ls >> rest)
      throw value_error(origin + ":" + std::to_string(lineno) +
                        ": trailing content '" + rest + "'");
    try {
      PauliString ps = PauliString::parse(letters);
      if (num_qubits == 0) num_qubits = ps.size();
      if (ps.size() != num_qubits)
        throw value_error("string length differs from previous terms");
      terms.push_back({coeff, std::move(ps)});
    } catch (const value_error& e) {
      throw value_error(origin + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  if (terms.empty())
    throw value_error(origin + ": no terms found");
  return Hamiltonian(num_qubits, std::move(terms));
}

inline Hamiltonian read_hamiltonian(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_hamiltonian(in, path.string());
}

inline void write_hamiltonian(std::ostream& out, const Hamiltonian& h) {
  for (const auto& t : h.terms())
    out << detail::fmt(t.coefficient) << ' ' << t.string.str() << '\n';
}

//=========================================================================
// Circuit text format: `width N` header, one `KIND q0 [q1] [angle]` per line
//=========================================================================

inline void write_circuit(std::ostream& out, const Circuit& c) {
  out << "width " << c.width() << '\n';
  for (const auto& g : c.gates()) {
    out << gate_name(g.kind) << ' ' << g.qubits[0];
    if (g.arity() == 2) out << ' ' << g.qubits[1];
    if (has_angle(g.kind)) out << ' ' << detail::fmt(g.angle);
    out << '\n';
  }
}

inline Circuit read_circuit(std::istream& in,
                            const std::string& origin = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> value_error {
    return value_error(origin + ":" + std::to_string(lineno) + ": " + what);
  };

  std::uint32_t width = 0;
  bool have_width = false;
  std::vector<Gate> gates;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank_or_comment(line)) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (!have_width) {
      if (kind != "width") throw fail("expected `width N` header");
      if (!(ls >> width) || width == 0) throw fail("bad width");
      have_width = true;
      continue;
    }
    GateKind k;
    if (kind == "H") k = GateKind::H;
    else if (kind == "X") k = GateKind::X;
    else if (kind == "S") k = GateKind::S;
    else if (kind == "SDG") k = GateKind::Sdg;
    else if (kind == "T") k = GateKind::T;
    else if (kind == "TDG") k = GateKind::Tdg;
    else if (kind == "RZ") k = GateKind::Rz;
    else if (kind == "CX") k = GateKind::CX;
    else if (kind == "RZZ") k = GateKind::Rzz;
    else if (kind == "SWAP") k = GateKind::Swap;
    else throw fail("unknown gate '" + kind + "'");

    Gate g{k, {0, 0}, 0.0};
    if (!(ls >> g.qubits[0])) throw fail("missing operand");
    if (is_two_qubit(k) && !(ls >> g.qubits[1])) throw fail("missing operand");
    if (has_angle(k) && !(ls >> g.angle)) throw fail("missing angle");
    std::string rest;
    if (ls >> rest) throw fail("trailing content '" + rest + "'");
    gates.push_back(g);
  }
  if (!have_width) throw value_error(origin + ": missing `width N` header");
  Circuit c(width);
  for (const auto& g : gates) c.add(g);
  return c;
}

inline Circuit read_circuit(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_circuit(in, path.string());
}

//=========================================================================
// Coupling graph: `a b` edge list
//=========================================================================

inline CouplingGraph read_coupling_graph(std::istream& in,
                                         const std::string& origin = "<stream>") {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::uint32_t max_node = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank_or_comment(line)) continue;
    std::istringstream ls(line);
    std::uint32_t a, b;
    if (!(ls >> a >> b))
      throw value_error(origin + ":" + std::to_string(lineno) +
                        ": expected `a b` edge");
    edges.emplace_back(a, b);
    max_node = std::max({max_node, a, b});
  }
  if (edges.empty()) throw value_error(origin + ": no edges");
  return CouplingGraph(max_node + 1, std::move(edges));
}

inline CouplingGraph read_coupling_graph(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_coupling_graph(in, path.string());
}

inline void write_coupling_graph(std::ostream& out, const CouplingGraph& g) {
  for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

//=========================================================================
// Calibration JSON
//=========================================================================

inline CalibrationModel calibration_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw value_error("calibration: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "nodes" && key != "edges" && key != "pulse_scaling" &&
        key != "pulse_angle_divisor")
      throw value_error("calibration: unknown key '" + key + "'");
  }
  CalibrationModel cal;
  std::size_t max_node = 0;
  for (const auto& n : j.at("nodes"))
    max_node = std::max<std::size_t>(max_node, n.at("id").get<std::size_t>());
  cal.eps1.assign(max_node + 1, -1.0);
  cal.t1_us.assign(max_node + 1, -1.0);
  for (const auto& n : j.at("nodes")) {
    const auto id = n.at("id").get<std::size_t>();
    cal.eps1[id] = n.at("eps1").get<double>();
    cal.t1_us[id] = n.at("t1_us").get<double>();
    if (!(cal.eps1[id] >= 0.0 && cal.eps1[id] < 1.0))
      throw value_error("calibration: eps1 must lie in [0, 1)");
    if (!(cal.t1_us[id] > 0.0))
      throw value_error("calibration: t1_us must be > 0");
  }
  for (const auto& e : j.at("edges")) {
    const auto a = e.at("a").get<std::uint32_t>();
    const auto b = e.at("b").get<std::uint32_t>();
    const double eps2 = e.at("eps2").get<double>();
    if (!(eps2 >= 0.0 && eps2 < 1.0))
      throw value_error("calibration: eps2 must lie in [0, 1)");
    cal.eps2[{std::min(a, b), std::max(a, b)}] = eps2;
  }
  cal.pulse_scaling = j.value("pulse_scaling", false);
  cal.pulse_angle_divisor = j.value("pulse_angle_divisor", M_PI);
  return cal;
}

inline CalibrationModel read_calibration(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw value_error(path.string() + ": " + e.what());
  }
  return calibration_from_json(j);
}

inline nlohmann::json calibration_to_json(const CalibrationModel& cal) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < cal.eps1.size(); ++i)
    nodes.push_back({{"id", i}, {"eps1", cal.eps1[i]}, {"t1_us", cal.t1_us[i]}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [edge, eps2] : cal.eps2)
    edges.push_back({{"a", edge.first}, {"b", edge.second}, {"eps2", eps2}});
  return {{"nodes", nodes},
          {"edges", edges},
          {"pulse_scaling", cal.pulse_scaling},
          {"pulse_angle_divisor", cal.pulse_angle_divisor}};
}

//=========================================================================
// CSV artifacts
//=========================================================================

inline void write_series(std::ostream& out, const TimeSeries& series,
                         bool with_errors = false, double err = 0.0) {
  out << (with_errors ? "t,re,im,re_err,im_err\n" : "t,re,im\n");
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << detail::fmt(series.times()[i]) << ','
        << detail::fmt(series.values()[i].real()) << ','
        << detail::fmt(series.values()[i].imag());
    if (with_errors) out << ',' << detail::fmt(err) << ',' << detail::fmt(err);
    out << '\n';
  }
}

inline TimeSeries read_series(std::istream& in,
                              const std::string& origin = "<stream>") {
  std::string line;
  if (!std::getline(in, line))
    throw value_error(origin + ": empty series file");
  std::vector<double> times;
  std::vector<cxd> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double t, re, im;
    char c1, c2;
    if (!(ls >> t >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw value_error(origin + ":" + std::to_string(lineno) +
                        ": expected `t,re,im[,...]`");
    times.push_back(t);
    values.emplace_back(re, im);
  }
  return TimeSeries(std::move(times), std::move(values));
}

inline TimeSeries read_series(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_series(in, path.string());
}

inline void write_spectrum(std::ostream& out, const PowerSpectrum& spec) {
  out << "omega,magnitude\n";
  for (std::size_t i = 0; i < spec.frequencies.size(); ++i)
    out << detail::fmt(spec.frequencies[i]) << ','
        << detail::fmt(spec.magnitudes[i]) << '\n';
}

inline void write_peaks(std::ostream& out, const PeakSet& peaks) {
  out << "omega_est,magnitude,bin\n";
  for (const auto& p : peaks.peaks)
    out << detail::fmt(p.omega) << ',' << detail::fmt(p.magnitude) << ','
        << p.bin << '\n';
}

}  // namespace qspec::io
