#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "csq/pauli.hpp"
#include "csq/rotation.hpp"

namespace csq {

/// Normalized anticommuting combination C(r) = sum_i r_i C_i.
struct AnticommutingSet {
  std::vector<PauliTerm> reps;  // pairwise anticommuting Hermitian Paulis
  std::vector<double> weights;  // unit vector r

  void validate() const {
    if (reps.empty()) throw std::invalid_argument("AnticommutingSet: empty");
    if (reps.size() != weights.size()) {
      throw std::invalid_argument("AnticommutingSet: size mismatch");
    }
    for (std::size_t i = 0; i < reps.size(); ++i) {
      if (!reps[i].is_hermitian()) {
        throw std::invalid_argument("AnticommutingSet: representatives must be Hermitian");
      }
      for (std::size_t j = i + 1; j < reps.size(); ++j) {
        if (commutes(reps[i], reps[j])) {
          throw std::invalid_argument("AnticommutingSet: representatives must anticommute");
        }
      }
    }
    double norm2 = 0.0;
    for (double w : weights) norm2 += w * w;
    if (norm2 < 1e-16) throw std::invalid_argument("AnticommutingSet: zero weight vector");
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8) {
      throw std::invalid_argument("AnticommutingSet: weights must be a unit vector");
    }
  }

  PauliSum combination() const {
    PauliSum s(reps[0].n_qubits());
    for (std::size_t i = 0; i < reps.size(); ++i) s.add(reps[i], weights[i]);
    return s.simplify();
  }
};

struct UnitaryPartitioning {
  RotationSequence rotations;  // M-1 generally non-Clifford steps
  PauliTerm target;            // = reps[0]; U_C C(r) U_C^dag = target exactly
};

/// Sequence-of-rotations unitary partitioning: fold each component onto the first
/// representative with generators P_k ~ i C_{k+1} C_1 and an arctan angle cascade.
/// Construction is self-verifying: each step must null the folded component.
inline UnitaryPartitioning build_uc(const AnticommutingSet& set) {
  set.validate();
  UnitaryPartitioning out;
  out.target = set.reps[0].bare();
  const std::size_t m = set.reps.size();
  if (m == 1) {
    if (set.weights[0] < 0) {
      // -C_1 -> C_1 is a pi rotation about an axis anticommuting with C_1,
      // realised as two quarter rotations.
      const std::size_t q = out.target.support().front();
      const char c = out.target.letter(q);
      const PauliTerm gen = PauliTerm::single(out.target.n_qubits(), q, c == 'X' ? 'Z' : 'X');
      out.rotations.push_back(Rotation::clifford_quarter(gen, true));
      out.rotations.push_back(Rotation::clifford_quarter(gen, true));
    }
  }

  std::vector<double> coeff = set.weights;
  for (std::size_t k = 1; k < m; ++k) {
    const double a = coeff[0], b = coeff[k];
    if (std::abs(b) < 1e-15) continue;
    PauliTerm gen = multiply(set.reps[k], set.reps[0]);
    gen.set_phase_exp(gen.phase_exp() + 1);  // i C_{k+1} C_1, Hermitian
    const double theta = 0.5 * std::atan2(b, a);
    Rotation rot = Rotation::make(gen, theta);

    // Fix the rotation direction operationally: the step must rotate (a, b) to
    // (hypot(a, b), 0) on the (C_1, C_{k+1}) plane.
    PauliSum plane(out.target.n_qubits());
    plane.add(set.reps[0], a);
    plane.add(set.reps[k], b);
    PauliSum image = apply_rotation_sequence(plane, {rot});
    if (std::abs(image.coefficient(set.reps[k].bare())) > 1e-10) {
      rot.angle = -rot.angle;
      image = apply_rotation_sequence(plane, {rot});
    }
    if (std::abs(image.coefficient(set.reps[k].bare())) > 1e-10) {
      throw std::logic_error("build_uc: rotation failed to null the folded component");
    }
    coeff[0] = std::hypot(a, b);
    coeff[k] = 0.0;
    out.rotations.push_back(rot);
  }

  // Final check: the full sequence maps C(r) onto exactly 1 * target.
  const PauliSum image = apply_rotation_sequence(set.combination(), out.rotations);
  if (image.size() != 1 || !image.terms()[0].first.same_string(out.target) ||
      std::abs(image.terms()[0].second - cplx{1.0}) > 1e-10) {
    throw std::logic_error("build_uc: image of C(r) is not the single target Pauli");
  }
  return out;
}

/// U s U^dag for the generally non-Clifford partitioning sequence; anticommuting
/// terms split, so the term count grows by at most 2^{M-1}.
inline PauliSum conjugate_sum_by_uc(const PauliSum& s, const RotationSequence& seq) {
  return apply_rotation_sequence(s, seq);
}

}  // namespace csq
