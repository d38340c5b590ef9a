#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csq/dense.hpp"
#include "csq/gf2.hpp"
#include "csq/pauli.hpp"
#include "csq/rotation.hpp"

namespace csq {

// Reference states whose generator expectation lies below this are rejected as
// ambiguous: exact eigenstates give |<G>| = 1 and the margin absorbs float error.
inline constexpr double kSectorAmbiguityThreshold = 0.99;

/// Clifford frame mapping a commuting independent generator set onto distinct
/// single-qubit Paulis: applying `rotations` to generators[k] yields exactly
/// sigma_{target_pauli} on qubit stab_qubits[k] and identity elsewhere.
struct StabilizerMap {
  std::size_t n_qubits = 0;
  char target_pauli = 'Z';
  std::vector<PauliTerm> generators;  // original frame, phase 0
  RotationSequence rotations;
  std::vector<std::size_t> stab_qubits;  // f(generators[k]) = stab_qubits[k]

  std::vector<std::size_t> kept_qubits() const {
    std::vector<bool> fixed(n_qubits, false);
    for (std::size_t q : stab_qubits) fixed[q] = true;
    std::vector<std::size_t> kept;
    for (std::size_t q = 0; q < n_qubits; ++q) {
      if (!fixed[q]) kept.push_back(q);
    }
    return kept;
  }
};

/// Eigenvalue assignment +-1 per generator, aligned with StabilizerMap::generators.
struct Sector {
  std::vector<int> nu;
};

/// GF(2) basis of the full commutant kernel: every Pauli commuting with every term
/// of h is a product of the returned strings. The basis need not be abelian.
inline std::vector<PauliTerm> find_symmetry_generators(const PauliSum& h) {
  if (h.empty()) throw std::invalid_argument("find_symmetry_generators: empty Hamiltonian");
  const PauliSum hs = h.simplified();
  const std::size_t n = hs.n_qubits();
  // Row t of the constraint matrix is (z_t | x_t) so that A g = <t, g> symplectically.
  BitMatrix a(hs.size(), 2 * n);
  for (std::size_t r = 0; r < hs.size(); ++r) {
    const PauliTerm& t = hs.terms()[r].first;
    for (std::size_t q = 0; q < n; ++q) {
      a.set(r, q, t.z_bit(q));
      a.set(r, n + q, t.x_bit(q));
    }
  }
  std::vector<PauliTerm> gens;
  for (const auto& v : gf2_kernel_basis(std::move(a))) {
    gens.push_back(pauli_from_symplectic(v));
  }
  std::sort(gens.begin(), gens.end(),
            [](const PauliTerm& x, const PauliTerm& y) { return canonical_less(x, y); });
  return gens;
}

/// Maximal abelian independent symmetry set, suitable for tapering.
inline std::vector<PauliTerm> abelian_symmetry_generators(const PauliSum& h) {
  std::vector<PauliTerm> gens = symplectic_gram_schmidt(find_symmetry_generators(h));
  std::sort(gens.begin(), gens.end(),
            [](const PauliTerm& x, const PauliTerm& y) { return canonical_less(x, y); });
  return gens;
}

namespace detail {

// Letter choices for the two-step rotation: some axis differing from `p`.
inline char off_axis(char p) { return p == 'X' ? 'Z' : 'X'; }

// Rotation generator +-i * sigma_b^{(q)} * g whose sign is fixed so the pi/4
// conjugation image of g is exactly +sigma_b^{(q)}.
inline Rotation pivot_rotation(const PauliTerm& g, std::size_t q, char b) {
  PauliTerm target = PauliTerm::single(g.n_qubits(), q, b);
  PauliTerm gen = multiply(target, g);
  gen.set_phase_exp(gen.phase_exp() + 1);  // i * sigma_b * g, Hermitian by anticommutation
  Rotation rot = Rotation::clifford_quarter(gen, true);
  if (!(clifford_image(g, rot) == target)) {
    rot.angle = -rot.angle;
  }
  return rot;
}

}  // namespace detail

/// Build the Clifford rotation sequence (at most two pi/4 steps per generator) mapping
/// each generator to +sigma_p on a distinct qubit, lowest-index available qubit first.
inline StabilizerMap build_stabilizer_map(std::vector<PauliTerm> gens, char p = 'Z') {
  if (p != 'X' && p != 'Y' && p != 'Z') {
    throw std::invalid_argument("build_stabilizer_map: target must be X, Y or Z");
  }
  StabilizerMap map;
  map.target_pauli = p;
  if (gens.empty()) return map;
  map.n_qubits = gens[0].n_qubits();
  for (auto& g : gens) {
    if (g.n_qubits() != map.n_qubits) {
      throw std::invalid_argument("build_stabilizer_map: qubit count mismatch");
    }
    if (!g.is_hermitian()) {
      throw std::invalid_argument("build_stabilizer_map: generators must be Hermitian");
    }
  }
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (!commutes(gens[i], gens[j])) {
        throw std::invalid_argument("build_stabilizer_map: generators must pairwise commute");
      }
    }
  }
  if (!gf2_independent(gens)) {
    throw std::invalid_argument("build_stabilizer_map: generators must be GF(2)-independent");
  }

  map.generators = gens;
  std::vector<bool> assigned(map.n_qubits, false);
  for (const PauliTerm& g0 : gens) {
    // Current image of the generator under the rotations accumulated so far.
    PauliTerm g = g0.bare();
    for (const Rotation& r : map.rotations) g = clifford_image(g, r);

    const PauliTerm single_check = g;
    std::optional<std::size_t> done;
    if (single_check.weight() == 1 && single_check.phase_exp() == 0) {
      const std::size_t q = single_check.support()[0];
      if (single_check.letter(q) == p && !assigned[q]) done = q;
    }
    if (!done) {
      std::size_t q = map.n_qubits;
      for (std::size_t cand = 0; cand < map.n_qubits; ++cand) {
        if (!assigned[cand] && g.letter(cand) != 'I') {
          q = cand;
          break;
        }
      }
      if (q == map.n_qubits) {
        throw std::invalid_argument("build_stabilizer_map: generator dependent on prior images");
      }
      if (g.letter(q) == p) {
        const Rotation r1 = detail::pivot_rotation(g, q, detail::off_axis(p));
        map.rotations.push_back(r1);
        g = clifford_image(g, r1);
      }
      const Rotation r2 = detail::pivot_rotation(g, q, p);
      map.rotations.push_back(r2);
      g = clifford_image(g, r2);
      done = q;
    }
    assigned[*done] = true;
    map.stab_qubits.push_back(*done);
  }
  return map;
}

/// Measure each generator in a computational basis state; ambiguous expectations
/// (|<G>| below threshold) are rejected.
inline Sector assign_sector(const StabilizerMap& map, const std::string& ref_bits) {
  if (ref_bits.size() != map.n_qubits) {
    throw std::invalid_argument("assign_sector: reference length mismatch");
  }
  Sector sector;
  for (const PauliTerm& g : map.generators) {
    if (!g.is_diagonal()) {
      throw std::runtime_error("assign_sector: ambiguous sector, generator " + g.str() +
                               " has zero expectation in a basis state");
    }
    double e = g.hermitian_sign();
    for (std::size_t q = 0; q < map.n_qubits; ++q) {
      if (g.z_bit(q)) {
        if (ref_bits[q] != '0' && ref_bits[q] != '1') {
          throw std::invalid_argument("assign_sector: reference must be a 0/1 string");
        }
        if (ref_bits[q] == '1') e = -e;
      }
    }
    sector.nu.push_back(e > 0 ? 1 : -1);
  }
  return sector;
}

/// Statevector overload: nu = round(<ref|G|ref>), rejecting non-eigenstates.
inline Sector assign_sector(const StabilizerMap& map, const Eigen::VectorXcd& ref) {
  const double norm = ref.norm();
  if (norm < 1e-12) throw std::invalid_argument("assign_sector: zero reference state");
  Sector sector;
  for (const PauliTerm& g : map.generators) {
    const cplx e = ref.dot(apply_pauli(g, ref)) / (norm * norm);
    if (std::abs(e.real()) < kSectorAmbiguityThreshold) {
      throw std::runtime_error("assign_sector: ambiguous sector, |<" + g.str() + ">| = " +
                               std::to_string(std::abs(e.real())));
    }
    sector.nu.push_back(e.real() > 0 ? 1 : -1);
  }
  return sector;
}

/// Stabilizer subspace projection pi: rotate, keep terms that are identity or the
/// target Pauli on every stabilized qubit, pick up the sector signs, and drop the
/// stabilized qubit positions.
inline PauliSum project(const PauliSum& s, const StabilizerMap& map, const Sector& sector) {
  const std::size_t n = s.n_qubits();
  if ((!map.generators.empty() || !map.rotations.empty()) && map.n_qubits != n) {
    throw std::invalid_argument("project: qubit count mismatch");
  }
  if (sector.nu.size() != map.generators.size()) {
    throw std::invalid_argument("project: sector size mismatch");
  }
  const PauliSum rotated = apply_rotation_sequence(s, map.rotations);
  if (map.stab_qubits.empty()) return rotated.simplified();
  std::vector<bool> fixed(n, false);
  std::vector<int> nu_at(n, 0);
  for (std::size_t k = 0; k < map.stab_qubits.size(); ++k) {
    fixed[map.stab_qubits[k]] = true;
    nu_at[map.stab_qubits[k]] = sector.nu[k];
  }
  std::vector<std::size_t> kept;
  for (std::size_t q = 0; q < n; ++q) {
    if (!fixed[q]) kept.push_back(q);
  }

  PauliSum out(kept.size());
  for (const auto& [t, c] : rotated.terms()) {
    cplx coeff = c;
    bool survives = true;
    for (std::size_t q : map.stab_qubits) {
      const char l = t.letter(q);
      if (l == 'I') continue;
      if (l != map.target_pauli) {
        survives = false;
        break;
      }
      coeff *= static_cast<double>(nu_at[q]);
    }
    if (!survives) continue;
    PauliTerm red(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
      red.set(j, t.letter(kept[j]));
    }
    out.add(red, coeff);
  }
  return out.simplify();
}

struct TaperResult {
  PauliSum reduced;
  StabilizerMap map;
  Sector sector;
};

/// Full tapering pipeline: abelian symmetry generators -> Clifford map -> sector from
/// the reference -> projection. The reduced Hamiltonian acts on N - |G| qubits.
inline TaperResult taper_hamiltonian(const PauliSum& h, const std::string& ref_bits,
                                     char target_pauli = 'Z') {
  h.require_hermitian();
  std::vector<PauliTerm> gens = abelian_symmetry_generators(h);
  StabilizerMap map = build_stabilizer_map(std::move(gens), target_pauli);
  map.n_qubits = h.n_qubits();  // covers the no-generator case
  const Sector sector = map.generators.empty() ? Sector{} : assign_sector(map, ref_bits);
  return TaperResult{project(h, map, sector), std::move(map), sector};
}

}  // namespace csq
