// Seeded random problem instances shared by module tests and the acceptance suite.
#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "csq/gf2.hpp"
#include "csq/pauli.hpp"
#include "oracles.hpp"

namespace instances {

/// Random pairwise-commuting GF(2)-independent Pauli strings.
inline std::vector<csq::PauliTerm> random_commuting_independent(std::size_t n, std::size_t k,
                                                                std::mt19937_64& rng) {
  std::vector<csq::PauliTerm> gens;
  std::size_t attempts = 0;
  while (gens.size() < k) {
    if (++attempts > 50000) throw std::runtime_error("random_commuting_independent: stuck");
    csq::PauliTerm cand = oracle::random_pauli(n, rng);
    bool ok = true;
    for (const auto& g : gens) {
      if (!commutes(cand, g)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    gens.push_back(cand);
    if (!csq::gf2_independent(gens)) gens.pop_back();
  }
  return gens;
}

/// Basis of Pauli strings commuting with every element of `gens`.
inline std::vector<csq::PauliTerm> commutant_basis(std::size_t n,
                                                   const std::vector<csq::PauliTerm>& gens) {
  csq::BitMatrix a(gens.size(), 2 * n);
  for (std::size_t r = 0; r < gens.size(); ++r) {
    for (std::size_t q = 0; q < n; ++q) {
      a.set(r, q, gens[r].z_bit(q));
      a.set(r, n + q, gens[r].x_bit(q));
    }
  }
  std::vector<csq::PauliTerm> basis;
  for (const auto& v : csq::gf2_kernel_basis(a)) basis.push_back(csq::pauli_from_symplectic(v));
  return basis;
}

/// Random Hermitian Hamiltonian every term of which commutes with k planted symmetries.
struct PlantedZ2 {
  csq::PauliSum h;
  std::vector<csq::PauliTerm> planted;
};

inline PlantedZ2 planted_z2_hamiltonian(std::size_t n, std::size_t k, std::size_t n_terms,
                                        std::mt19937_64& rng) {
  const auto gens = random_commuting_independent(n, k, rng);
  const auto basis = commutant_basis(n, gens);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> bit(0, 1);
  csq::PauliSum h(n);
  std::size_t attempts = 0;
  while (h.simplified().size() < n_terms) {
    if (++attempts > 50000) throw std::runtime_error("planted_z2_hamiltonian: stuck");
    csq::PauliTerm t = csq::PauliTerm::identity(n);
    for (const auto& b : basis) {
      if (bit(rng)) t = multiply(t, b).bare();
    }
    if (t.is_identity_string()) continue;
    h.add(t, coeff(rng));
    h.simplify();
  }
  return PlantedZ2{h.simplified(), gens};
}

/// Noncontextual instance built around planted structure: S-terms are products of
/// commuting generators, class terms are anticommuting representatives times group
/// elements. Every planted generator appears as a term, so the decomposition spans
/// the planted symmetry exactly.
struct PlantedNoncontextual {
  std::vector<std::pair<csq::PauliTerm, double>> t_nc;
  std::vector<csq::PauliTerm> planted_gens;
  std::vector<csq::PauliTerm> planted_reps;  // empty or pairwise anticommuting
};

inline PlantedNoncontextual planted_noncontextual(std::size_t n, std::size_t n_gens,
                                                  std::size_t n_classes, std::size_t extra_terms,
                                                  std::mt19937_64& rng) {
  if (n_classes == 1) throw std::invalid_argument("planted_noncontextual: M = 1 is impossible");
  PlantedNoncontextual out;
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> bit(0, 1);

  out.planted_gens = random_commuting_independent(n, n_gens, rng);

  // Class representatives: pairwise anticommuting, each commuting with all generators.
  // Build from a hyperbolic pair of the commutant so the construction cannot land in
  // the radical (the planted-generator span itself), where no partner exists.
  if (n_classes > 0) {
    if (n_classes > 3) throw std::invalid_argument("planted_noncontextual: supports M <= 3");
    const auto comm = commutant_basis(n, out.planted_gens);
    auto random_comm = [&]() {
      csq::PauliTerm t = csq::PauliTerm::identity(n);
      for (const auto& b : comm) {
        if (bit(rng)) t = multiply(t, b).bare();
      }
      return t;
    };
    std::size_t attempts = 0;
    csq::PauliTerm u = csq::PauliTerm::identity(n);
    for (;;) {
      if (++attempts > 50000) throw std::runtime_error("planted_noncontextual: stuck on u");
      u = random_comm();
      if (u.is_identity_string()) continue;
      const bool central = std::all_of(comm.begin(), comm.end(),
                                       [&](const csq::PauliTerm& b) { return commutes(u, b); });
      if (!central) break;
    }
    csq::PauliTerm w = csq::PauliTerm::identity(n);
    for (;;) {
      if (++attempts > 100000) throw std::runtime_error("planted_noncontextual: stuck on w");
      w = random_comm();
      if (!w.is_identity_string() && !commutes(u, w)) break;
    }
    out.planted_reps = {u, w};
    if (n_classes == 3) out.planted_reps.push_back(multiply(u, w).bare());
  }

  auto random_gen_product = [&]() {
    csq::PauliTerm t = csq::PauliTerm::identity(n);
    for (const auto& g : out.planted_gens) {
      if (bit(rng)) t = multiply(t, g).bare();
    }
    return t;
  };

  csq::PauliSum acc(n);
  for (const auto& g : out.planted_gens) acc.add(g, coeff(rng));
  for (const auto& r : out.planted_reps) acc.add(r, coeff(rng));
  for (std::size_t e = 0; e < extra_terms; ++e) {
    csq::PauliTerm p = random_gen_product();
    if (out.planted_reps.empty() || bit(rng)) {
      if (p.is_identity_string()) continue;
      acc.add(p, coeff(rng));
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, out.planted_reps.size() - 1);
      csq::PauliTerm w = multiply(out.planted_reps[pick(rng)], p);
      acc.add(w, coeff(rng));  // phase sign folds into the coefficient
    }
  }
  acc.simplify();
  for (const auto& [t, c] : acc.terms()) out.t_nc.emplace_back(t, c.real());
  return out;
}

/// Full CS-VQE test instance: a noncontextual backbone whose extended generator set
/// spans all n qubits (n-1 planted generators + one anticommuting pair), plus
/// contextual terms that each anticommute with at least one planted generator (so the
/// full projection annihilates them and the endpoint identities hold exactly).
struct PlantedCsvqe {
  csq::PauliSum full_h;
  std::vector<std::pair<csq::PauliTerm, double>> t_nc;
  csq::PauliSum contextual;
};

inline PlantedCsvqe planted_csvqe(std::size_t n, std::size_t n_contextual,
                                  std::mt19937_64& rng) {
  PlantedCsvqe out;
  const auto base = planted_noncontextual(n, n - 1, 2, 2 * n, rng);
  out.t_nc = base.t_nc;

  csq::PauliSum nc_sum(n);
  for (const auto& [t, c] : out.t_nc) nc_sum.add(t, c);
  nc_sum.simplify();

  std::uniform_real_distribution<double> coeff(-0.5, 0.5);
  csq::PauliSum ctx(n);
  std::size_t attempts = 0;
  while (ctx.simplified().size() < n_contextual) {
    if (++attempts > 50000) throw std::runtime_error("planted_csvqe: stuck");
    const csq::PauliTerm cand = oracle::random_pauli(n, rng);
    const bool breaks_symmetry = std::any_of(
        base.planted_gens.begin(), base.planted_gens.end(),
        [&](const csq::PauliTerm& g) { return !commutes(cand, g); });
    if (!breaks_symmetry) continue;
    if (std::abs(nc_sum.coefficient(cand)) > 0) continue;  // keep the split clean
    ctx.add(cand, coeff(rng));
    ctx.simplify();
  }
  out.contextual = ctx.simplified();
  out.full_h = (nc_sum + out.contextual).simplified();
  return out;
}

}  // namespace instances
