#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "csq/pauli.hpp"

namespace csq {

/// One conjugation step s -> e^{i*angle*generator} s e^{-i*angle*generator}.
/// Clifford rotations have |angle| = pi/4 and map Paulis to single Paulis.
struct Rotation {
  PauliTerm generator;  // Hermitian, phase_exp 0
  double angle = 0.0;
  bool clifford = false;

  static Rotation make(PauliTerm g, double angle) {
    if (!g.is_hermitian()) throw std::invalid_argument("Rotation: generator must be Hermitian");
    // Fold a -1 sign on the generator into the angle so stored generators are plain strings.
    if (g.phase_exp() == 2) angle = -angle;
    const bool cliff = std::abs(std::abs(angle) - std::numbers::pi / 4) < 1e-12;
    return Rotation{g.bare(), angle, cliff};
  }

  static Rotation clifford_quarter(PauliTerm g, bool positive) {
    return make(std::move(g), positive ? std::numbers::pi / 4 : -std::numbers::pi / 4);
  }
};

using RotationSequence = std::vector<Rotation>;

/// Clifford image of a single Pauli: p itself when [p, Q] = 0, otherwise +-i Q p.
inline PauliTerm clifford_image(const PauliTerm& p, const Rotation& rot) {
  if (!rot.clifford) throw std::invalid_argument("clifford_image: rotation is not Clifford");
  if (commutes(p, rot.generator)) return p;
  PauliTerm qp = multiply(rot.generator, p);
  qp.set_phase_exp(qp.phase_exp() + (rot.angle > 0 ? 1 : 3));
  return qp;
}

/// Conjugate one Pauli by e^{i theta Q}. Clifford case: a single term. Generic
/// anticommuting case: cos(2 theta) p + i sin(2 theta) Q p.
inline PauliSum clifford_conjugate(const PauliTerm& p, const Rotation& rot) {
  if (p.n_qubits() != rot.generator.n_qubits()) {
    throw std::invalid_argument("clifford_conjugate: qubit count mismatch");
  }
  PauliSum out(p.n_qubits());
  if (commutes(p, rot.generator)) {
    out.add(p, 1.0);
    return out;
  }
  if (rot.clifford) {
    out.add(clifford_image(p, rot), 1.0);
    return out;
  }
  PauliTerm qp = multiply(rot.generator, p);
  qp.set_phase_exp(qp.phase_exp() + 1);
  out.add(p, std::cos(2 * rot.angle));
  out.add(qp, std::sin(2 * rot.angle));
  return out;
}

/// s -> U s U^dag with U the ordered product of the sequence (first element applied first).
inline PauliSum apply_rotation_sequence(const PauliSum& s, const RotationSequence& seq) {
  PauliSum cur = s;
  for (const Rotation& rot : seq) {
    if (cur.n_qubits() != rot.generator.n_qubits()) {
      throw std::invalid_argument("apply_rotation_sequence: qubit count mismatch");
    }
    PauliSum next(cur.n_qubits());
    for (const auto& [t, c] : cur.terms()) {
      next.add(clifford_conjugate(t, rot), c);
    }
    cur = next.simplify();
  }
  return cur;
}

inline PauliSum apply_rotation_sequence(const PauliTerm& t, const RotationSequence& seq) {
  PauliSum s(t.n_qubits());
  s.add(t, 1.0);
  return apply_rotation_sequence(s, seq);
}

}  // namespace csq
