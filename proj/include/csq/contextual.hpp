#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csq/noncontextual.hpp"
#include "csq/pauli.hpp"
#include "csq/simulator.hpp"
#include "csq/tapering.hpp"
#include "csq/unitary_partitioning.hpp"

namespace csq {

/// Subset F of the extended generator set G~ = G u {C(r)}: generator indices into
/// NoncontextualModel::generators plus the C(r) membership flag.
struct GeneratorSubset {
  std::vector<std::size_t> gen_indices;  // sorted ascending
  bool include_cr = false;

  std::size_t size() const { return gen_indices.size() + (include_cr ? 1 : 0); }
};

/// Stabilizer frames shared by every generator subset of one CS-VQE instance:
/// a Clifford map for the bare generators, and (when classes exist) the unitary
/// partitioning sequence followed by a Clifford map covering C(r)'s image too.
/// Fixing only a subset of the mapped qubits realises any F without rebuilding maps.
struct ContextualFrame {
  PauliSum full_h;
  NoncontextualModel model;
  NoncontextualState nc_state;

  StabilizerMap map_g;  // all generators -> single qubits, Clifford only

  bool has_cr = false;  // M > 0
  UnitaryPartitioning uc;
  StabilizerMap map_gc;  // rotations = uc + Clifford; maps generators then C1

  std::size_t n_qubits() const { return full_h.n_qubits(); }
  std::size_t n_extended() const { return model.generators.size() + (has_cr ? 1 : 0); }

  GeneratorSubset full_subset() const {
    GeneratorSubset f;
    f.gen_indices.resize(model.generators.size());
    for (std::size_t i = 0; i < f.gen_indices.size(); ++i) f.gen_indices[i] = i;
    f.include_cr = has_cr;
    return f;
  }
};

inline ContextualFrame make_contextual_frame(PauliSum full_h, NoncontextualModel model,
                                             NoncontextualState nc_state) {
  if (nc_state.nu.size() != model.generators.size() || nc_state.r.size() != model.n_classes()) {
    throw std::invalid_argument("make_contextual_frame: state does not match model");
  }
  ContextualFrame frame;
  frame.full_h = full_h.simplified();
  frame.model = std::move(model);
  frame.nc_state = std::move(nc_state);
  const std::size_t n = frame.full_h.n_qubits();

  frame.map_g = build_stabilizer_map(frame.model.generators, 'Z');
  frame.map_g.n_qubits = n;

  frame.has_cr = frame.model.n_classes() > 0;
  if (frame.has_cr) {
    AnticommutingSet set{frame.model.class_reps, frame.nc_state.r};
    frame.uc = build_uc(set);
    std::vector<PauliTerm> stab = frame.model.generators;
    stab.push_back(frame.uc.target);
    StabilizerMap cliff = build_stabilizer_map(stab, 'Z');
    cliff.n_qubits = n;
    frame.map_gc = cliff;
    frame.map_gc.rotations.clear();
    for (const auto& r : frame.uc.rotations) frame.map_gc.rotations.push_back(r);
    for (const auto& r : cliff.rotations) frame.map_gc.rotations.push_back(r);
  }
  return frame;
}

/// One contextual subspace instance: the fixed stabilizers F, the rotation frame in
/// effect (U_C is skipped entirely when C(r) is not in F), the fixed qubits and their
/// sector values, and the simulated qubits I_sim.
struct ContextualProblem {
  GeneratorSubset f;
  StabilizerMap map;  // view: full rotation sequence, stab data restricted to F
  Sector sector;
  std::size_t n_full = 0;
  std::vector<std::size_t> sim_qubits;

  std::size_t n_sim() const { return sim_qubits.size(); }
};

inline ContextualProblem make_contextual_problem(const ContextualFrame& frame,
                                                 const GeneratorSubset& f) {
  for (std::size_t i : f.gen_indices) {
    if (i >= frame.model.generators.size()) {
      throw std::invalid_argument("make_contextual_problem: generator index out of range");
    }
  }
  if (f.include_cr && !frame.has_cr) {
    throw std::invalid_argument("make_contextual_problem: model has no anticommuting classes");
  }
  ContextualProblem p;
  p.f = f;
  p.f.gen_indices = f.gen_indices;
  std::sort(p.f.gen_indices.begin(), p.f.gen_indices.end());
  p.n_full = frame.n_qubits();
  p.map.n_qubits = frame.n_qubits();
  p.map.target_pauli = 'Z';

  if (p.f.size() > 0) {
    const StabilizerMap& base = f.include_cr ? frame.map_gc : frame.map_g;
    p.map.rotations = base.rotations;
    for (std::size_t i : p.f.gen_indices) {
      p.map.generators.push_back(frame.model.generators[i]);
      p.map.stab_qubits.push_back(base.stab_qubits[i]);
      p.sector.nu.push_back(frame.nc_state.nu[i]);
    }
    if (f.include_cr) {
      // C(r) is stabilized with eigenvalue +1; its image under U_C is the target rep.
      p.map.generators.push_back(frame.uc.target);
      p.map.stab_qubits.push_back(base.stab_qubits.back());
      p.sector.nu.push_back(1);
    }
  }

  std::vector<bool> fixed(p.n_full, false);
  for (std::size_t q : p.map.stab_qubits) fixed[q] = true;
  for (std::size_t q = 0; q < p.n_full; ++q) {
    if (!fixed[q]) p.sim_qubits.push_back(q);
  }
  return p;
}

/// Contextual subspace Hamiltonian: the stabilizer subspace projection of the full
/// Hamiltonian with the noncontextual sector fixed on F. For F = G~ the result is the
/// scalar eta(nu, r) = eps0_nc; for F = {} it is the full Hamiltonian unchanged.
inline PauliSum build_contextual_hamiltonian(const ContextualFrame& frame,
                                             const ContextualProblem& p) {
  return project(frame.full_h, p.map, p.sector);
}

/// Restrict a full-system ansatz pool to the contextual subspace (the same projection
/// applied term by term; identity images are dropped, duplicates merge).
inline std::vector<std::pair<PauliTerm, double>> project_ansatz_pool(
    std::span<const std::pair<PauliTerm, double>> pool, const ContextualProblem& p) {
  PauliSum a(p.n_full);
  for (const auto& [t, c] : pool) a.add(t, c);
  const PauliSum reduced = project(a, p.map, p.sector);
  std::vector<std::pair<PauliTerm, double>> out;
  for (const auto& [t, c] : reduced.terms()) {
    if (t.is_identity_string()) continue;
    out.emplace_back(t, c.real());
  }
  return out;
}

inline std::vector<std::pair<PauliTerm, double>> project_ansatz_pool(
    const std::vector<std::pair<PauliTerm, double>>& pool, const ContextualProblem& p) {
  return project_ansatz_pool(std::span<const std::pair<PauliTerm, double>>(pool), p);
}

struct ProjectedReference {
  StateVector state;                // normalized post-measurement state on I_sim
  std::optional<std::string> bits;  // set when the state is a basis product
  double overlap2 = 0.0;            // <ref| U^dag P_nu U |ref>
};

namespace detail {

inline Eigen::Vector2cd pauli_eigvec(char letter, int nu) {
  Eigen::Vector2cd v;
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i{0, 1};
  switch (letter) {
    case 'Z': v << (nu > 0 ? 1.0 : 0.0), (nu > 0 ? 0.0 : 1.0); break;
    case 'X': v << s, (nu > 0 ? s : -s); break;
    case 'Y': v << s, (nu > 0 ? i * s : -i * s); break;
    default: throw std::invalid_argument("pauli_eigvec: bad letter");
  }
  return v;
}

}  // namespace detail

/// Partial projective measurement of U_F |ref>: project the rotated reference onto the
/// nu' sector of the fixed qubits, normalize, and peel off the fixed register.
inline ProjectedReference project_reference(const std::string& ref_bits,
                                            const ContextualProblem& p) {
  if (ref_bits.size() != p.n_full) {
    throw std::invalid_argument("project_reference: reference length mismatch");
  }
  StateVector psi = StateVector::from_bits(ref_bits);
  for (const Rotation& r : p.map.rotations) {
    psi = apply_exp_pauli(psi, r.generator, r.angle);
  }

  const std::size_t n_sim = p.sim_qubits.size();
  std::vector<int> role(p.n_full, -1);  // fixed index or -1
  for (std::size_t k = 0; k < p.map.stab_qubits.size(); ++k) {
    role[p.map.stab_qubits[k]] = static_cast<int>(k);
  }
  std::vector<std::size_t> sim_pos(p.n_full, 0);
  for (std::size_t j = 0; j < p.sim_qubits.size(); ++j) sim_pos[p.sim_qubits[j]] = j;

  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_sim);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.amps.size()); ++idx) {
    cplx weight = 1.0;
    std::uint64_t sim_idx = 0;
    for (std::size_t q = 0; q < p.n_full; ++q) {
      const int bit = (idx >> (p.n_full - 1 - q)) & 1;
      if (role[q] >= 0) {
        const auto v = detail::pauli_eigvec(p.map.target_pauli,
                                            p.sector.nu[static_cast<std::size_t>(role[q])]);
        weight *= std::conj(v(bit));
      } else {
        if (bit) sim_idx |= std::uint64_t{1} << (n_sim - 1 - sim_pos[q]);
      }
    }
    if (weight != cplx{0.0}) {
      phi(static_cast<Eigen::Index>(sim_idx)) += weight * psi.amps(static_cast<Eigen::Index>(idx));
    }
  }
  ProjectedReference out;
  out.overlap2 = phi.squaredNorm();
  if (out.overlap2 < 1e-12) {
    throw std::runtime_error("project_reference: reference has zero overlap with the sector");
  }
  phi /= std::sqrt(out.overlap2);
  out.state = StateVector::from_amplitudes(n_sim, std::move(phi));
  out.bits = out.state.as_bits(1e-8);
  return out;
}

/// Basis reference on I_sim encoding the noncontextual ground state: qubits carrying a
/// non-enforced generator image take bit 1 where its nu value is -1.
inline std::string noncontextual_reference_bits(const ContextualFrame& frame,
                                                const ContextualProblem& p) {
  const StabilizerMap& used = (frame.has_cr && p.f.include_cr) ? frame.map_gc : frame.map_g;
  std::vector<int> bit_at(p.n_full, 0);
  for (std::size_t i = 0; i < frame.model.generators.size(); ++i) {
    if (std::binary_search(p.f.gen_indices.begin(), p.f.gen_indices.end(), i)) continue;
    if (frame.nc_state.nu[i] == -1) bit_at[used.stab_qubits[i]] = 1;
  }
  std::string bits;
  for (std::size_t q : p.sim_qubits) bits.push_back(bit_at[q] ? '1' : '0');
  return bits;
}

/// Greedy stabilizer relaxation: starting from the full extended set, repeatedly drop
/// the size-d combination whose removal yields the lowest evaluator energy (ties break
/// to the lexicographically smallest remaining subset). Returns the nested chain
/// F_0 = G~ down to the empty set.
using ContextualEvaluator = std::function<double(const ContextualProblem&)>;

inline ContextualEvaluator exact_diagonalization_evaluator(const ContextualFrame& frame,
                                                           std::size_t cap = kDenseQubitCap) {
  return [&frame, cap](const ContextualProblem& p) {
    const PauliSum h = build_contextual_hamiltonian(frame, p);
    if (h.empty()) return 0.0;
    return dense_ground_energy(h, cap);
  };
}

struct RelaxationStep {
  GeneratorSubset subset;
  double energy = 0.0;
  std::size_t evaluations = 0;  // evaluator calls spent choosing this step
};

inline std::vector<RelaxationStep> relaxation_order(const ContextualFrame& frame, std::size_t d,
                                                    const ContextualEvaluator& evaluator) {
  if (d < 1) throw std::invalid_argument("relaxation_order: depth must be >= 1");
  // Elements of G~: generator indices, then |G| for C(r).
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < frame.model.generators.size(); ++i) current.push_back(i);
  if (frame.has_cr) current.push_back(frame.model.generators.size());

  auto to_subset = [&](const std::vector<std::size_t>& elems) {
    GeneratorSubset f;
    for (std::size_t e : elems) {
      if (e == frame.model.generators.size()) {
        f.include_cr = true;
      } else {
        f.gen_indices.push_back(e);
      }
    }
    std::sort(f.gen_indices.begin(), f.gen_indices.end());
    return f;
  };

  std::vector<RelaxationStep> chain;
  {
    RelaxationStep step;
    step.subset = to_subset(current);
    step.energy = evaluator(make_contextual_problem(frame, step.subset));
    step.evaluations = 1;
    chain.push_back(step);
  }

  while (!current.empty()) {
    const std::size_t remove = std::min(d, current.size());
    // Enumerate all size-`remove` removals.
    std::vector<std::size_t> pick(remove);
    std::vector<std::size_t> best_remaining;
    double best_energy = std::numeric_limits<double>::infinity();
    std::size_t evals = 0;
    std::function<void(std::size_t, std::size_t)> enumerate = [&](std::size_t start,
                                                                  std::size_t depth) {
      if (depth == remove) {
        std::vector<std::size_t> remaining;
        std::size_t pi = 0;
        for (std::size_t i = 0; i < current.size(); ++i) {
          if (pi < pick.size() && pick[pi] == i) {
            ++pi;
          } else {
            remaining.push_back(current[i]);
          }
        }
        const GeneratorSubset f = to_subset(remaining);
        const double e = evaluator(make_contextual_problem(frame, f));
        ++evals;
        const bool better =
            e < best_energy - 1e-15 ||
            (std::abs(e - best_energy) <= 1e-15 && remaining < best_remaining);
        if (better || best_energy == std::numeric_limits<double>::infinity()) {
          best_energy = e;
          best_remaining = remaining;
        }
        return;
      }
      for (std::size_t i = start; i + (remove - depth - 1) < current.size(); ++i) {
        pick[depth] = i;
        enumerate(i + 1, depth + 1);
      }
    };
    enumerate(0, 0);

    current = best_remaining;
    RelaxationStep step;
    step.subset = to_subset(current);
    step.energy = best_energy;
    step.evaluations = evals;
    chain.push_back(step);
  }
  return chain;
}

}  // namespace csq
