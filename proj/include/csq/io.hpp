#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csq/circuit.hpp"
#include "csq/noncontextual.hpp"
#include "csq/pauli.hpp"
#include "csq/simulator.hpp"
#include "csq/tapering.hpp"

namespace csq {

using nlohmann::json;

/// Hamiltonian file schema:
///   {"n_qubits": N, "terms": [{"pauli": "<I/X/Y/Z, length N, qubit 0 leftmost>",
///                              "re": float, "im": float}]}
inline json hamiltonian_to_json(const PauliSum& h) {
  const PauliSum hs = h.simplified();
  json terms = json::array();
  for (const auto& [t, c] : hs.terms()) {
    terms.push_back({{"pauli", t.string_part()}, {"re", c.real()}, {"im", c.imag()}});
  }
  return json{{"n_qubits", hs.n_qubits()}, {"terms", terms}};
}

inline PauliSum hamiltonian_from_json(const json& j) {
  if (!j.contains("n_qubits") || !j.contains("terms")) {
    throw std::invalid_argument("hamiltonian: missing n_qubits or terms");
  }
  const auto n = j.at("n_qubits").get<std::int64_t>();
  if (n < 1) throw std::invalid_argument("hamiltonian: n_qubits must be positive");
  PauliSum h(static_cast<std::size_t>(n));
  for (const auto& term : j.at("terms")) {
    const std::string pauli = term.at("pauli").get<std::string>();
    if (pauli.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("hamiltonian: pauli string length != n_qubits: " + pauli);
    }
    for (char ch : pauli) {
      if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z') {
        throw std::invalid_argument("hamiltonian: invalid pauli character in " + pauli);
      }
    }
    const double re = term.at("re").get<double>();
    const double im = term.value("im", 0.0);
    h.add(PauliTerm::from_string(pauli), cplx{re, im});
  }
  return h.simplify();
}

/// Statevector file schema: {"n_qubits": N, "amplitudes": [{"re":., "im":.} x 2^N]}.
inline json state_to_json(const StateVector& s) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < s.amps.size(); ++i) {
    amps.push_back({{"re", s.amps(i).real()}, {"im", s.amps(i).imag()}});
  }
  return json{{"n_qubits", s.n_qubits}, {"amplitudes", amps}};
}

inline StateVector state_from_json(const json& j) {
  const auto n = j.at("n_qubits").get<std::size_t>();
  const auto& amps = j.at("amplitudes");
  if (amps.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("state: amplitude count != 2^n_qubits");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) =
        cplx{amps[i].at("re").get<double>(), amps[i].value("im", 0.0)};
  }
  const double norm = v.norm();
  if (norm < 1e-12) throw std::invalid_argument("state: zero norm");
  v /= norm;
  return StateVector::from_amplitudes(n, std::move(v));
}

inline json rotation_to_json(const Rotation& r) {
  return json{{"pauli", r.generator.string_part()},
              {"angle", r.angle},
              {"clifford", r.clifford}};
}

inline Rotation rotation_from_json(const json& j) {
  return Rotation::make(PauliTerm::from_string(j.at("pauli").get<std::string>()),
                        j.at("angle").get<double>());
}

/// Tapering sidecar: everything needed to reproduce or invert the projection.
inline json taper_sidecar_to_json(const StabilizerMap& map, const Sector& sector) {
  json gens = json::array(), rots = json::array();
  for (const auto& g : map.generators) gens.push_back(g.string_part());
  for (const auto& r : map.rotations) rots.push_back(rotation_to_json(r));
  return json{{"n_qubits", map.n_qubits},
              {"target_pauli", std::string(1, map.target_pauli)},
              {"generators", gens},
              {"rotations", rots},
              {"stab_qubits", map.stab_qubits},
              {"sector", sector.nu},
              {"kept_qubits", map.kept_qubits()}};
}

/// Noncontextual model + optimum report.
inline json noncontextual_report_to_json(const NoncontextualModel& model,
                                         const NoncontextualState& state, double energy) {
  json sym = json::array();
  for (const auto& [t, c] : model.symmetry_terms) {
    sym.push_back({{"pauli", t.string_part()}, {"coeff", c}});
  }
  json classes = json::array();
  for (const auto& cls : model.classes) {
    json members = json::array();
    for (const auto& [t, c] : cls) {
      members.push_back({{"pauli", t.string_part()}, {"coeff", c}});
    }
    classes.push_back(members);
  }
  json gens = json::array();
  for (const auto& g : model.generators) gens.push_back(g.string_part());
  json reps = json::array();
  for (const auto& r : model.class_reps) reps.push_back(r.string_part());
  return json{{"n_qubits", model.n_qubits}, {"symmetry_terms", sym},
              {"classes", classes},        {"generators", gens},
              {"class_reps", reps},        {"nu", state.nu},
              {"r", state.r},              {"energy", energy}};
}

inline json circuit_to_json(const Circuit& c) {
  json gates = json::array();
  for (const Gate& g : c.gates) {
    json jg{{"gate", g.name()}, {"qubits", json::array({g.q0})}};
    if (g.two_qubit()) jg["qubits"] = json::array({g.q0, g.q1});
    if (g.kind == GateKind::RZ) jg["angle"] = g.angle;
    gates.push_back(jg);
  }
  return json{{"n_qubits", c.n_qubits}, {"global_phase", c.global_phase}, {"gates", gates}};
}

/// Operator-with-angles file (ansatz / pool): reuses the Hamiltonian schema; the real
/// part of each coefficient is the angle theta_k.
inline std::vector<std::pair<PauliTerm, double>> angled_terms_from_json(const json& j) {
  const PauliSum s = hamiltonian_from_json(j);
  s.require_hermitian();
  std::vector<std::pair<PauliTerm, double>> out;
  for (const auto& [t, c] : s.terms()) out.emplace_back(t, c.real());
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace csq
