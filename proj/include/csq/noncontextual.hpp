#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csq/gf2.hpp"
#include "csq/pauli.hpp"

namespace csq {

// Above this many symmetry generators the nu search switches from exhaustive
// enumeration to simulated annealing.
inline constexpr std::size_t kExhaustiveNuCutoff = 24;

namespace detail {

struct CommutationPartition {
  std::vector<std::size_t> symmetry;              // indices commuting with everything
  std::vector<std::vector<std::size_t>> classes;  // commutation classes on the rest
};

/// Partition terms into the universally-commuting part and commutation classes,
/// or nullopt when commutation fails to be an equivalence relation on the rest.
inline std::optional<CommutationPartition> commutation_partition(
    std::span<const PauliTerm> terms) {
  const std::size_t k = terms.size();
  std::vector<std::vector<bool>> comm(k, std::vector<bool>(k, true));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      comm[i][j] = comm[j][i] = commutes(terms[i], terms[j]);
    }
  }
  CommutationPartition part;
  std::vector<bool> universal(k, true);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k && universal[i]; ++j) universal[i] = comm[i][j];
    if (universal[i]) part.symmetry.push_back(i);
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < k; ++i) {
    if (!universal[i]) rest.push_back(i);
  }
  std::vector<bool> assigned(k, false);
  for (std::size_t seed : rest) {
    if (assigned[seed]) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j : rest) {
      if (!assigned[j] && comm[seed][j]) {
        cls.push_back(j);
        assigned[j] = true;
      }
    }
    part.classes.push_back(std::move(cls));
  }
  // Equivalence check: commuting within a class, anticommuting across classes.
  for (std::size_t a = 0; a < part.classes.size(); ++a) {
    for (std::size_t i : part.classes[a]) {
      for (std::size_t b = 0; b < part.classes.size(); ++b) {
        for (std::size_t j : part.classes[b]) {
          if (i == j) continue;
          if (comm[i][j] != (a == b)) return std::nullopt;
        }
      }
    }
  }
  return part;
}

}  // namespace detail

/// Noncontextuality test: commutation must be an equivalence relation once the
/// universally-commuting terms are removed.
inline bool is_noncontextual(std::span<const PauliTerm> terms) {
  return detail::commutation_partition(terms).has_value();
}

inline bool is_noncontextual(const std::vector<PauliTerm>& terms) {
  return is_noncontextual(std::span<const PauliTerm>(terms));
}

/// Decomposition T_nc = S u C_1 u ... u C_M together with the tables behind the
/// classical objective: each retained term is expressed through the independent
/// symmetry generators, with product signs folded into the table coefficients.
struct NoncontextualModel {
  std::size_t n_qubits = 0;
  std::vector<std::pair<PauliTerm, double>> symmetry_terms;
  std::vector<std::vector<std::pair<PauliTerm, double>>> classes;
  std::vector<PauliTerm> generators;  // canonical RREF basis of <S'>
  std::vector<PauliTerm> class_reps;  // largest-|coeff| member per class

  struct Entry {
    double coeff = 0.0;
    std::uint64_t mask = 0;  // generator subset whose nu-product weights this entry
  };
  std::vector<Entry> sym_entries;
  std::vector<std::vector<Entry>> class_entries;  // one list per class

  std::size_t n_classes() const { return classes.size(); }

  PauliSum hamiltonian() const {
    PauliSum h(n_qubits);
    for (const auto& [t, c] : symmetry_terms) h.add(t, c);
    for (const auto& cls : classes) {
      for (const auto& [t, c] : cls) h.add(t, c);
    }
    return h.simplify();
  }
};

/// State (nu, r) of the noncontextual Hamiltonian: generator eigenvalues and unit
/// weights over the class representatives.
struct NoncontextualState {
  std::vector<int> nu;
  std::vector<double> r;
};

namespace detail {

inline double nu_product(std::uint64_t mask, std::uint64_t neg_mask) {
  return (std::popcount(mask & neg_mask) & 1) ? -1.0 : 1.0;
}

// Sign s with  prod_{G in mask} G = s * bare(target); requires exact string match.
inline double generator_product_sign(const std::vector<PauliTerm>& gens, std::uint64_t mask,
                                     const PauliTerm& target) {
  PauliTerm prod = PauliTerm::identity(target.n_qubits());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if ((mask >> i) & 1) prod = multiply(prod, gens[i]);
  }
  if (!prod.same_string(target)) {
    throw std::logic_error("noncontextual: generator decomposition mismatch");
  }
  return prod.hermitian_sign();
}

inline NoncontextualModel::Entry make_entry(const std::vector<PauliTerm>& gens,
                                            const BitMatrix& gen_matrix, const PauliTerm& target,
                                            double coeff) {
  const auto combo = gf2_solve(gen_matrix, symplectic_vector(target));
  if (!combo) throw std::logic_error("noncontextual: term outside generator span");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < combo->size(); ++i) {
    if ((*combo)[i]) mask |= std::uint64_t{1} << i;
  }
  return {coeff * generator_product_sign(gens, mask, target), mask};
}

}  // namespace detail

/// Build the decomposition and objective tables. Throws on contextual input.
inline NoncontextualModel decompose(std::vector<std::pair<PauliTerm, double>> t_nc) {
  if (t_nc.empty()) throw std::invalid_argument("decompose: empty term set");
  NoncontextualModel model;
  model.n_qubits = t_nc[0].first.n_qubits();
  for (auto& [t, c] : t_nc) {
    if (t.n_qubits() != model.n_qubits) {
      throw std::invalid_argument("decompose: qubit count mismatch");
    }
    if (!t.is_hermitian()) throw std::invalid_argument("decompose: terms must be Hermitian");
    c *= t.hermitian_sign();
    t = t.bare();
  }

  std::vector<PauliTerm> strings;
  strings.reserve(t_nc.size());
  for (const auto& [t, c] : t_nc) strings.push_back(t);
  const auto part = detail::commutation_partition(strings);
  if (!part) throw std::invalid_argument("decompose: term set is contextual");

  for (std::size_t i : part->symmetry) model.symmetry_terms.push_back(t_nc[i]);

  // Classes ordered by the canonical key of their representative; representative is
  // the largest-|coeff| member, ties broken canonically.
  std::vector<std::pair<PauliTerm, std::vector<std::size_t>>> reps_and_classes;
  for (const auto& cls : part->classes) {
    std::size_t best = cls[0];
    for (std::size_t i : cls) {
      const bool better = std::abs(t_nc[i].second) > std::abs(t_nc[best].second) + 1e-15 ||
                          (std::abs(std::abs(t_nc[i].second) - std::abs(t_nc[best].second)) <=
                               1e-15 &&
                           canonical_less(t_nc[i].first, t_nc[best].first));
      if (better) best = i;
    }
    reps_and_classes.emplace_back(t_nc[best].first, cls);
  }
  std::sort(reps_and_classes.begin(), reps_and_classes.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  for (auto& [rep, cls] : reps_and_classes) {
    model.class_reps.push_back(rep);
    std::vector<std::pair<PauliTerm, double>> members;
    for (std::size_t i : cls) members.push_back(t_nc[i]);
    std::sort(members.begin(), members.end(),
              [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
    model.classes.push_back(std::move(members));
  }

  // Generators: canonical basis of span{S} + span{C_i C_i'} over GF(2).
  std::vector<std::vector<bool>> span_vecs;
  for (const auto& [t, c] : model.symmetry_terms) span_vecs.push_back(symplectic_vector(t));
  for (std::size_t ci = 0; ci < model.classes.size(); ++ci) {
    const auto rep_vec = symplectic_vector(model.class_reps[ci]);
    for (const auto& [t, c] : model.classes[ci]) {
      auto v = symplectic_vector(t);
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = v[j] ^ rep_vec[j];
      span_vecs.push_back(std::move(v));
    }
  }
  if (!span_vecs.empty()) {
    BitMatrix m(span_vecs.size(), 2 * model.n_qubits);
    for (std::size_t r = 0; r < span_vecs.size(); ++r) {
      for (std::size_t c = 0; c < span_vecs[r].size(); ++c) m.set(r, c, span_vecs[r][c]);
    }
    m.rref();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!m.row_empty(r)) model.generators.push_back(pauli_from_symplectic(m.row(r)));
    }
  }
  if (model.generators.size() > 64) {
    throw std::invalid_argument("decompose: more than 64 symmetry generators unsupported");
  }

  // Objective tables.
  const BitMatrix gen_matrix = model.generators.empty()
                                   ? BitMatrix(0, 2 * model.n_qubits)
                                   : symplectic_matrix(model.generators);
  for (const auto& [t, c] : model.symmetry_terms) {
    if (t.is_identity_string()) {
      model.sym_entries.push_back({c, 0});
      continue;
    }
    model.sym_entries.push_back(detail::make_entry(model.generators, gen_matrix, t, c));
  }
  for (std::size_t ci = 0; ci < model.classes.size(); ++ci) {
    std::vector<NoncontextualModel::Entry> entries;
    for (const auto& [w, h] : model.classes[ci]) {
      const PauliTerm q = multiply(model.class_reps[ci], w);
      const double s_w = q.hermitian_sign();  // rep and member commute
      const PauliTerm r_bare = q.bare();
      if (r_bare.is_identity_string()) {
        entries.push_back({h * s_w, 0});
      } else {
        entries.push_back(detail::make_entry(model.generators, gen_matrix, r_bare, h * s_w));
      }
    }
    model.class_entries.push_back(std::move(entries));
  }
  return model;
}

/// Classical objective eta(nu, r): the noncontextual energy expectation for state (nu, r).
inline double eta(const NoncontextualModel& model, const NoncontextualState& state) {
  if (state.nu.size() != model.generators.size()) {
    throw std::invalid_argument("eta: nu size mismatch");
  }
  if (state.r.size() != model.n_classes()) throw std::invalid_argument("eta: r size mismatch");
  if (!state.r.empty()) {
    double norm2 = 0.0;
    for (double x : state.r) norm2 += x * x;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10) {
      throw std::invalid_argument("eta: r must be a unit vector");
    }
  }
  std::uint64_t neg_mask = 0;
  for (std::size_t i = 0; i < state.nu.size(); ++i) {
    if (state.nu[i] == -1) {
      neg_mask |= std::uint64_t{1} << i;
    } else if (state.nu[i] != 1) {
      throw std::invalid_argument("eta: nu entries must be +-1");
    }
  }
  double val = 0.0;
  for (const auto& e : model.sym_entries) val += e.coeff * detail::nu_product(e.mask, neg_mask);
  for (std::size_t ci = 0; ci < model.class_entries.size(); ++ci) {
    double b = 0.0;
    for (const auto& e : model.class_entries[ci]) {
      b += e.coeff * detail::nu_product(e.mask, neg_mask);
    }
    val += state.r[ci] * b;
  }
  return val;
}

struct NoncontextualOptimum {
  NoncontextualState state;
  double energy = 0.0;
};

struct OptimizeOptions {
  std::size_t exhaustive_cutoff = kExhaustiveNuCutoff;
  std::size_t annealing_proposals = 100000;
  std::uint64_t seed = 0;
};

namespace detail {

// eta minimized in closed form over the unit sphere for fixed nu:
// eta = a(nu) + b(nu) . r  ->  min_r = a - |b| at r = -b / |b|.
inline double eta_min_for_nu(const NoncontextualModel& model, std::uint64_t neg_mask,
                             std::vector<double>* b_out = nullptr) {
  double a = 0.0;
  for (const auto& e : model.sym_entries) a += e.coeff * nu_product(e.mask, neg_mask);
  double b_norm2 = 0.0;
  if (b_out) b_out->assign(model.n_classes(), 0.0);
  for (std::size_t ci = 0; ci < model.class_entries.size(); ++ci) {
    double b = 0.0;
    for (const auto& e : model.class_entries[ci]) b += e.coeff * nu_product(e.mask, neg_mask);
    if (b_out) (*b_out)[ci] = b;
    b_norm2 += b * b;
  }
  return a - std::sqrt(b_norm2);
}

}  // namespace detail

/// Minimize eta over nu in {+-1}^|G| and unit r. Exhaustive below the cutoff,
/// seeded simulated annealing (geometric cooling) above it.
inline NoncontextualOptimum optimize(const NoncontextualModel& model,
                                     const OptimizeOptions& opts = {}) {
  const std::size_t g = model.generators.size();
  std::uint64_t best_mask = 0;
  double best = std::numeric_limits<double>::infinity();
  if (g <= opts.exhaustive_cutoff) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g); ++mask) {
      const double val = detail::eta_min_for_nu(model, mask);
      if (val < best) {
        best = val;
        best_mask = mask;
      }
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> flip(0, g - 1);
    std::uint64_t cur_mask = 0;
    for (std::size_t i = 0; i < g; ++i) {
      if (unif(rng) < 0.5) cur_mask |= std::uint64_t{1} << i;
    }
    double cur = detail::eta_min_for_nu(model, cur_mask);
    best = cur;
    best_mask = cur_mask;
    const double t0 = 1.0, t1 = 1e-4;
    for (std::size_t k = 0; k < opts.annealing_proposals; ++k) {
      const double frac =
          opts.annealing_proposals > 1
              ? static_cast<double>(k) / static_cast<double>(opts.annealing_proposals - 1)
              : 1.0;
      const double temp = t0 * std::pow(t1 / t0, frac);
      const std::uint64_t cand_mask = cur_mask ^ (std::uint64_t{1} << flip(rng));
      const double cand = detail::eta_min_for_nu(model, cand_mask);
      if (cand <= cur || unif(rng) < std::exp((cur - cand) / temp)) {
        cur = cand;
        cur_mask = cand_mask;
        if (cur < best) {
          best = cur;
          best_mask = cur_mask;
        }
      }
    }
  }

  NoncontextualOptimum out;
  std::vector<double> b;
  detail::eta_min_for_nu(model, best_mask, &b);
  out.energy = best;
  out.state.nu.resize(g);
  for (std::size_t i = 0; i < g; ++i) out.state.nu[i] = (best_mask >> i) & 1 ? -1 : 1;
  double b_norm = 0.0;
  for (double x : b) b_norm += x * x;
  b_norm = std::sqrt(b_norm);
  if (model.n_classes() > 0) {
    out.state.r.assign(model.n_classes(), 0.0);
    if (b_norm > 1e-15) {
      for (std::size_t ci = 0; ci < b.size(); ++ci) out.state.r[ci] = -b[ci] / b_norm;
    } else {
      out.state.r[0] = 1.0;
    }
  }
  return out;
}

enum class NcStrategy { DiagGreedy, MagnitudeGreedy };

struct NoncontextualSplit {
  std::vector<std::size_t> indices;  // positions in the simplified Hamiltonian
  PauliSum noncontextual;
  PauliSum contextual;
};

/// Greedy selection of a noncontextual subset. The default strategy seeds with all
/// diagonal terms (mutually commuting by construction), then admits remaining terms
/// in decreasing |coefficient| order whenever noncontextuality is preserved.
inline NoncontextualSplit select_noncontextual_subset(const PauliSum& h,
                                                      NcStrategy strategy = NcStrategy::DiagGreedy) {
  const PauliSum hs = h.simplified();
  if (hs.empty()) throw std::invalid_argument("select_noncontextual_subset: empty Hamiltonian");
  hs.require_hermitian();

  std::vector<std::size_t> order(hs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(hs.terms()[a].second), mb = std::abs(hs.terms()[b].second);
    if (std::abs(ma - mb) > 1e-15) return ma > mb;
    return canonical_less(hs.terms()[a].first, hs.terms()[b].first);
  });

  std::vector<std::size_t> picked;
  std::vector<PauliTerm> cur;
  auto try_add = [&](std::size_t idx) {
    cur.push_back(hs.terms()[idx].first);
    if (is_noncontextual(cur)) {
      picked.push_back(idx);
    } else {
      cur.pop_back();
    }
  };

  if (strategy == NcStrategy::DiagGreedy) {
    for (std::size_t i : order) {
      if (hs.terms()[i].first.is_diagonal()) {
        cur.push_back(hs.terms()[i].first);
        picked.push_back(i);
      }
    }
    for (std::size_t i : order) {
      if (!hs.terms()[i].first.is_diagonal()) try_add(i);
    }
  } else {
    for (std::size_t i : order) try_add(i);
  }
  std::sort(picked.begin(), picked.end());

  NoncontextualSplit split;
  split.indices = picked;
  split.noncontextual = PauliSum(hs.n_qubits());
  split.contextual = PauliSum(hs.n_qubits());
  std::size_t pi = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (pi < picked.size() && picked[pi] == i) {
      split.noncontextual.add(hs.terms()[i].first, hs.terms()[i].second);
      ++pi;
    } else {
      split.contextual.add(hs.terms()[i].first, hs.terms()[i].second);
    }
  }
  split.noncontextual.simplify();
  split.contextual.simplify();
  return split;
}

/// Model terms as (PauliTerm, double) pairs extracted from a Hermitian sum.
inline std::vector<std::pair<PauliTerm, double>> real_terms(const PauliSum& s) {
  s.require_hermitian();
  const PauliSum ss = s.simplified();
  std::vector<std::pair<PauliTerm, double>> out;
  for (const auto& [t, c] : ss.terms()) out.emplace_back(t, c.real());
  return out;
}

}  // namespace csq
