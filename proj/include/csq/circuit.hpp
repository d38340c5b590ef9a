#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csq/pauli.hpp"

namespace csq {

inline constexpr std::size_t kCircuitUnitaryCap = 10;

enum class GateKind { H, S, Sdg, X, CNOT, RZ };

struct Gate {
  GateKind kind;
  std::uint32_t q0 = 0;
  std::uint32_t q1 = 0;     // CNOT target
  double angle = 0.0;       // RZ only

  static Gate h(std::uint32_t q) { return {GateKind::H, q, q, 0.0}; }
  static Gate s(std::uint32_t q) { return {GateKind::S, q, q, 0.0}; }
  static Gate sdg(std::uint32_t q) { return {GateKind::Sdg, q, q, 0.0}; }
  static Gate x(std::uint32_t q) { return {GateKind::X, q, q, 0.0}; }
  static Gate cnot(std::uint32_t control, std::uint32_t target) {
    if (control == target) throw std::invalid_argument("Gate: CNOT needs distinct qubits");
    return {GateKind::CNOT, control, target, 0.0};
  }
  static Gate rz(std::uint32_t q, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("Gate: RZ angle must be finite");
    return {GateKind::RZ, q, q, angle};
  }

  bool two_qubit() const { return kind == GateKind::CNOT; }

  const char* name() const {
    switch (kind) {
      case GateKind::H: return "h";
      case GateKind::S: return "s";
      case GateKind::Sdg: return "sdg";
      case GateKind::X: return "x";
      case GateKind::CNOT: return "cx";
      case GateKind::RZ: return "rz";
    }
    return "?";
  }
};

/// Gate list over {H, S, Sdg, X, CNOT, RZ}. Identity exponentials contribute to
/// global_phase instead of gates, keeping circuit products exact.
struct Circuit {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;
  double global_phase = 0.0;  // e^{i global_phase}

  explicit Circuit(std::size_t n = 0) : n_qubits(n) {}

  void push(const Gate& g) {
    if (g.q0 >= n_qubits || g.q1 >= n_qubits) {
      throw std::invalid_argument("Circuit: qubit index out of range");
    }
    gates.push_back(g);
  }

  void append(const Circuit& other) {
    if (other.n_qubits != n_qubits) throw std::invalid_argument("Circuit: size mismatch");
    for (const Gate& g : other.gates) gates.push_back(g);
    global_phase += other.global_phase;
  }
};

/// Circuit for e^{i theta P}. Basis changes X = H Z H and Y = S H Z H Sdg map onto a
/// Z-string, a CNOT cascade (ascending support, parity on the highest active qubit)
/// accumulates the parity, and RZ(2 theta) applies the phase: even parity -> e^{i theta}.
inline Circuit exp_pauli_circuit(const PauliTerm& p, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("exp_pauli_circuit: bad angle");
  if (!p.is_hermitian()) {
    throw std::invalid_argument("exp_pauli_circuit: generator must be Hermitian");
  }
  Circuit c(p.n_qubits());
  const double sign = p.hermitian_sign();
  if (p.is_identity_string()) {
    c.global_phase = sign * theta;
    return c;
  }
  const std::vector<std::size_t> support = p.support();

  auto basis_in = [&](std::size_t q) {
    switch (p.letter(q)) {
      case 'X': c.push(Gate::h(static_cast<std::uint32_t>(q))); break;
      case 'Y':
        c.push(Gate::sdg(static_cast<std::uint32_t>(q)));
        c.push(Gate::h(static_cast<std::uint32_t>(q)));
        break;
      default: break;
    }
  };
  auto basis_out = [&](std::size_t q) {
    switch (p.letter(q)) {
      case 'X': c.push(Gate::h(static_cast<std::uint32_t>(q))); break;
      case 'Y':
        c.push(Gate::h(static_cast<std::uint32_t>(q)));
        c.push(Gate::s(static_cast<std::uint32_t>(q)));
        break;
      default: break;
    }
  };

  for (std::size_t q : support) basis_in(q);
  for (std::size_t i = 0; i + 1 < support.size(); ++i) {
    c.push(Gate::cnot(static_cast<std::uint32_t>(support[i]),
                      static_cast<std::uint32_t>(support[i + 1])));
  }
  c.push(Gate::rz(static_cast<std::uint32_t>(support.back()), 2.0 * sign * theta));
  for (std::size_t i = support.size() - 1; i-- > 0;) {
    c.push(Gate::cnot(static_cast<std::uint32_t>(support[i]),
                      static_cast<std::uint32_t>(support[i + 1])));
  }
  for (auto it = support.rbegin(); it != support.rend(); ++it) basis_out(*it);
  return c;
}

/// First-order Trotter circuit for e^{i sum_k theta_k P_k}: the exp-Pauli blocks in
/// input order, repeated n_T times with angles theta_k / n_T.
inline Circuit trotter_circuit(std::span<const std::pair<PauliTerm, double>> terms, int n_t) {
  if (n_t < 1) throw std::invalid_argument("trotter_circuit: Trotter number must be >= 1");
  if (terms.empty()) throw std::invalid_argument("trotter_circuit: no terms");
  Circuit c(terms[0].first.n_qubits());
  for (int rep = 0; rep < n_t; ++rep) {
    for (const auto& [p, theta] : terms) {
      c.append(exp_pauli_circuit(p, theta / n_t));
    }
  }
  return c;
}

inline Circuit trotter_circuit(const std::vector<std::pair<PauliTerm, double>>& terms, int n_t) {
  return trotter_circuit(std::span<const std::pair<PauliTerm, double>>(terms), n_t);
}

namespace detail {

inline bool inverse_pair(const Gate& a, const Gate& b) {
  switch (a.kind) {
    case GateKind::H: return b.kind == GateKind::H && a.q0 == b.q0;
    case GateKind::X: return b.kind == GateKind::X && a.q0 == b.q0;
    case GateKind::S: return b.kind == GateKind::Sdg && a.q0 == b.q0;
    case GateKind::Sdg: return b.kind == GateKind::S && a.q0 == b.q0;
    case GateKind::CNOT: return b.kind == GateKind::CNOT && a.q0 == b.q0 && a.q1 == b.q1;
    case GateKind::RZ: return b.kind == GateKind::RZ && a.q0 == b.q0 && a.angle == -b.angle;
  }
  return false;
}

}  // namespace detail

/// Remove adjacent inverse pairs acting on the same qubits (SSdg = H^2 = 1 and the
/// like between neighbouring blocks); cascades like parenthesis matching.
inline Circuit cancel_adjacent(const Circuit& c) {
  Circuit out(c.n_qubits);
  out.global_phase = c.global_phase;
  std::vector<Gate>& stack = out.gates;
  for (const Gate& g : c.gates) {
    // Find the most recent gate sharing a qubit with g; only if it is g's inverse and
    // no later gate touches those qubits may the pair be removed.
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(stack.size()) - 1;
    bool cancelled = false;
    for (; j >= 0; --j) {
      const Gate& h = stack[static_cast<std::size_t>(j)];
      const bool share = h.q0 == g.q0 || h.q1 == g.q0 || h.q0 == g.q1 || h.q1 == g.q1;
      if (!share) continue;
      if (detail::inverse_pair(h, g) &&
          j == static_cast<std::ptrdiff_t>(stack.size()) - 1) {
        stack.pop_back();
        cancelled = true;
      } else if (detail::inverse_pair(h, g)) {
        // Gates between j and the top act on disjoint qubits from g; adjacency on
        // g's qubits still holds, so the pair cancels.
        stack.erase(stack.begin() + j);
        cancelled = true;
      }
      break;
    }
    if (!cancelled) stack.push_back(g);
  }
  return out;
}

/// Dense unitary of the circuit (includes the recorded global phase).
inline Eigen::MatrixXcd circuit_unitary(const Circuit& c, std::size_t cap = kCircuitUnitaryCap) {
  if (c.n_qubits > cap) throw std::invalid_argument("circuit_unitary: qubit cap exceeded");
  const Eigen::Index dim = Eigen::Index{1} << c.n_qubits;
  Eigen::MatrixXcd u =
      Eigen::MatrixXcd::Identity(dim, dim) * std::polar(1.0, c.global_phase);
  const cplx i{0, 1};
  for (const Gate& g : c.gates) {
    const std::uint64_t bit0 = std::uint64_t{1} << (c.n_qubits - 1 - g.q0);
    Eigen::MatrixXcd next = u;
    switch (g.kind) {
      case GateKind::H:
        for (std::uint64_t row = 0; row < static_cast<std::uint64_t>(dim); ++row) {
          const std::uint64_t partner = row ^ bit0;
          const double s0 = (row & bit0) ? -1.0 : 1.0;
          next.row(static_cast<Eigen::Index>(row)) =
              (u.row(static_cast<Eigen::Index>(row)) * s0 +
               u.row(static_cast<Eigen::Index>(partner))) /
              std::sqrt(2.0);
        }
        break;
      case GateKind::S:
      case GateKind::Sdg:
        for (std::uint64_t row = 0; row < static_cast<std::uint64_t>(dim); ++row) {
          if (row & bit0) {
            next.row(static_cast<Eigen::Index>(row)) =
                (g.kind == GateKind::S ? i : -i) * u.row(static_cast<Eigen::Index>(row));
          }
        }
        break;
      case GateKind::X:
        for (std::uint64_t row = 0; row < static_cast<std::uint64_t>(dim); ++row) {
          next.row(static_cast<Eigen::Index>(row)) =
              u.row(static_cast<Eigen::Index>(row ^ bit0));
        }
        break;
      case GateKind::CNOT: {
        const std::uint64_t bit1 = std::uint64_t{1} << (c.n_qubits - 1 - g.q1);
        for (std::uint64_t row = 0; row < static_cast<std::uint64_t>(dim); ++row) {
          const std::uint64_t src = (row & bit0) ? row ^ bit1 : row;
          next.row(static_cast<Eigen::Index>(row)) = u.row(static_cast<Eigen::Index>(src));
        }
        break;
      }
      case GateKind::RZ:
        for (std::uint64_t row = 0; row < static_cast<std::uint64_t>(dim); ++row) {
          const cplx phase = std::polar(1.0, (row & bit0) ? -g.angle / 2 : g.angle / 2);
          next.row(static_cast<Eigen::Index>(row)) =
              phase * u.row(static_cast<Eigen::Index>(row));
        }
        break;
    }
    u = std::move(next);
  }
  return u;
}

/// OpenQASM 2.0 over the gate set {h, s, sdg, x, cx, rz}. The internal RZ convention
/// diag(e^{i phi/2}, e^{-i phi/2}) is qelib1's rz with the angle negated, so emitted
/// angles flip sign; equivalence is up to global phase.
inline std::string to_openqasm2(const Circuit& c) {
  std::ostringstream os;
  os.precision(17);
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  os << "qreg q[" << c.n_qubits << "];\n";
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::CNOT: os << "cx q[" << g.q0 << "],q[" << g.q1 << "];\n"; break;
      case GateKind::RZ: os << "rz(" << -g.angle << ") q[" << g.q0 << "];\n"; break;
      default: os << g.name() << " q[" << g.q0 << "];\n"; break;
    }
  }
  return os.str();
}

}  // namespace csq
