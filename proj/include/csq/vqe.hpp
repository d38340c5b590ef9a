#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csq/circuit.hpp"
#include "csq/pauli.hpp"
#include "csq/simulator.hpp"

namespace csq {

/// Deduplicated, canonically ordered pool of Hermitian Pauli generators.
struct OperatorPool {
  std::size_t n_qubits = 0;
  std::vector<PauliTerm> operators;

  static OperatorPool from_terms(std::size_t n, std::vector<PauliTerm> terms) {
    OperatorPool pool;
    pool.n_qubits = n;
    std::sort(terms.begin(), terms.end(),
              [](const PauliTerm& a, const PauliTerm& b) { return canonical_less(a, b); });
    for (auto& t : terms) {
      if (t.is_identity_string()) continue;
      if (!pool.operators.empty() && pool.operators.back().same_string(t)) continue;
      pool.operators.push_back(t.bare());
    }
    return pool;
  }
};

namespace detail {

// Jordan-Wigner annihilation operator a_i = 1/2 (X_i + i Y_i) (x) Z_{j<i}.
inline PauliSum jw_annihilation(std::size_t i, std::size_t n) {
  PauliSum a(n);
  PauliTerm x(n), y(n);
  for (std::size_t j = 0; j < i; ++j) {
    x.set(j, 'Z');
    y.set(j, 'Z');
  }
  x.set(i, 'X');
  y.set(i, 'Y');
  a.add(x, 0.5);
  a.add(y, cplx{0, 0.5});
  return a;
}

inline PauliSum jw_creation(std::size_t i, std::size_t n) {
  PauliSum a(n);
  PauliTerm x(n), y(n);
  for (std::size_t j = 0; j < i; ++j) {
    x.set(j, 'Z');
    y.set(j, 'Z');
  }
  x.set(i, 'X');
  y.set(i, 'Y');
  a.add(x, 0.5);
  a.add(y, cplx{0, -0.5});
  return a;
}

}  // namespace detail

/// Hermitian Pauli expansion of -i (T - T^dag) for the excitation
/// T = a^dag_{c_1} ... a^dag_{c_s} a_{a_1} ... a_{a_s}; rank-s excitations expand to
/// 2^{2s-1} Pauli terms.
inline PauliSum jw_excitation_terms(const std::vector<std::size_t>& creation,
                                    const std::vector<std::size_t>& annihilation,
                                    std::size_t n_qubits) {
  if (creation.empty() || creation.size() != annihilation.size()) {
    throw std::invalid_argument("jw_excitation_terms: need equal nonempty index lists");
  }
  std::vector<std::size_t> all = creation;
  all.insert(all.end(), annihilation.begin(), annihilation.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument("jw_excitation_terms: overlapping indices");
  }
  if (all.back() >= n_qubits) {
    throw std::invalid_argument("jw_excitation_terms: index out of range");
  }
  PauliSum t(n_qubits);
  t.add(PauliTerm::identity(n_qubits), 1.0);
  for (std::size_t c : creation) t = t * detail::jw_creation(c, n_qubits);
  for (std::size_t a : annihilation) t = t * detail::jw_annihilation(a, n_qubits);
  // B = -i T + i T^dag; stored strings are Hermitian, so (c P)^dag = conj(c) P.
  PauliSum b(n_qubits);
  b.add(t, cplx{0, -1.0});
  for (const auto& [p, c] : t.terms()) {
    b.add(p, cplx{0, 1.0} * std::conj(c));
  }
  return b.simplify();
}

/// Qubit-ADAPT operator pool from Jordan-Wigner single/double/triple excitations
/// between occupied and virtual spin orbitals.
inline OperatorPool jw_excitation_pool(const std::vector<std::size_t>& occupied,
                                       const std::vector<std::size_t>& virtuals,
                                       std::size_t max_rank, std::size_t n_qubits) {
  if (max_rank < 1 || max_rank > 3) {
    throw std::invalid_argument("jw_excitation_pool: rank must be 1..3");
  }
  for (std::size_t o : occupied) {
    for (std::size_t v : virtuals) {
      if (o == v) throw std::invalid_argument("jw_excitation_pool: overlapping indices");
    }
  }
  std::vector<PauliTerm> terms;
  auto absorb = [&](const PauliSum& b) {
    for (const auto& [p, c] : b.terms()) terms.push_back(p);
  };
  for (std::size_t o : occupied) {
    for (std::size_t v : virtuals) {
      absorb(jw_excitation_terms({v}, {o}, n_qubits));
    }
  }
  if (max_rank >= 2) {
    for (std::size_t i = 0; i < occupied.size(); ++i) {
      for (std::size_t j = i + 1; j < occupied.size(); ++j) {
        for (std::size_t a = 0; a < virtuals.size(); ++a) {
          for (std::size_t b2 = a + 1; b2 < virtuals.size(); ++b2) {
            absorb(jw_excitation_terms({virtuals[a], virtuals[b2]},
                                       {occupied[i], occupied[j]}, n_qubits));
          }
        }
      }
    }
  }
  if (max_rank >= 3) {
    for (std::size_t i = 0; i < occupied.size(); ++i) {
      for (std::size_t j = i + 1; j < occupied.size(); ++j) {
        for (std::size_t k = j + 1; k < occupied.size(); ++k) {
          for (std::size_t a = 0; a < virtuals.size(); ++a) {
            for (std::size_t b2 = a + 1; b2 < virtuals.size(); ++b2) {
              for (std::size_t c = b2 + 1; c < virtuals.size(); ++c) {
                absorb(jw_excitation_terms({virtuals[a], virtuals[b2], virtuals[c]},
                                           {occupied[i], occupied[j], occupied[k]}, n_qubits));
              }
            }
          }
        }
      }
    }
  }
  return OperatorPool::from_terms(n_qubits, std::move(terms));
}

/// Product ansatz |psi(theta)> = e^{i theta_L P_L} ... e^{i theta_1 P_1} |ref>, with a
/// first-order Trotter repetition when trotter_number > 1. Repeated pool terms are
/// allowed; the pool is never exhausted.
struct AnsatzState {
  std::vector<PauliTerm> ops;  // applied in list order
  std::vector<double> thetas;
  std::string reference;  // basis bit-string
  int trotter_number = 1;

  std::size_t n_qubits() const { return reference.size(); }

  void validate() const {
    if (ops.size() != thetas.size()) throw std::invalid_argument("AnsatzState: length mismatch");
    if (trotter_number < 1) throw std::invalid_argument("AnsatzState: trotter_number >= 1");
    for (const auto& p : ops) {
      if (p.n_qubits() != n_qubits()) {
        throw std::invalid_argument("AnsatzState: qubit count mismatch");
      }
    }
    for (double th : thetas) {
      if (!std::isfinite(th)) throw std::invalid_argument("AnsatzState: non-finite parameter");
    }
  }
};

namespace detail {

struct ShiftSpec {
  std::size_t rep;
  std::size_t index;
  double delta;
};

// Exact statevector preparation, optionally with one occurrence angle shifted.
inline StateVector prepare_ansatz(const AnsatzState& anz,
                                  const std::optional<ShiftSpec>& shift = std::nullopt) {
  StateVector state = StateVector::from_bits(anz.reference);
  const double inv = 1.0 / anz.trotter_number;
  for (int rep = 0; rep < anz.trotter_number; ++rep) {
    for (std::size_t k = 0; k < anz.ops.size(); ++k) {
      double angle = anz.thetas[k] * inv;
      if (shift && shift->rep == static_cast<std::size_t>(rep) && shift->index == k) {
        angle += shift->delta;
      }
      state = apply_exp_pauli(state, anz.ops[k], angle);
    }
  }
  return state;
}

}  // namespace detail

/// Ansatz circuit: X gates preparing the reference followed by the Trotterized product.
inline Circuit ansatz_circuit(const AnsatzState& anz) {
  anz.validate();
  Circuit c(anz.n_qubits());
  for (std::size_t q = 0; q < anz.n_qubits(); ++q) {
    if (anz.reference[q] == '1') c.push(Gate::x(static_cast<std::uint32_t>(q)));
  }
  if (!anz.ops.empty()) {
    std::vector<std::pair<PauliTerm, double>> terms;
    for (std::size_t k = 0; k < anz.ops.size(); ++k) terms.emplace_back(anz.ops[k], anz.thetas[k]);
    c.append(trotter_circuit(terms, anz.trotter_number));
  }
  return c;
}

/// E(theta) = <H> on the ansatz state; at theta = 0 this is the reference energy.
inline double ansatz_energy(const PauliSum& h, const AnsatzState& anz,
                            std::size_t* eval_counter = nullptr) {
  anz.validate();
  if (h.n_qubits() != anz.n_qubits()) throw std::invalid_argument("ansatz_energy: size mismatch");
  if (eval_counter) ++*eval_counter;
  return expectation(h, detail::prepare_ansatz(anz));
}

/// Same expectation evaluated through the gate-level circuit path (used to cross-check
/// the exact statevector path).
inline double ansatz_energy_via_circuit(const PauliSum& h, const AnsatzState& anz) {
  anz.validate();
  return expectation(h, apply_circuit(StateVector(anz.n_qubits()), ansatz_circuit(anz)));
}

/// Parameter-shift gradient dE/dtheta_k: exact two-point rule per occurrence of the
/// parameter in the Trotter product, averaged with weight 1/n_T.
inline double gradient(const PauliSum& h, const AnsatzState& anz, std::size_t k,
                       std::size_t* eval_counter = nullptr) {
  anz.validate();
  if (k >= anz.ops.size()) throw std::invalid_argument("gradient: parameter index out of range");
  const double shift = std::numbers::pi / 4;
  double grad = 0.0;
  for (int rep = 0; rep < anz.trotter_number; ++rep) {
    const auto r = static_cast<std::size_t>(rep);
    const double ep =
        expectation(h, detail::prepare_ansatz(anz, detail::ShiftSpec{r, k, shift}));
    const double em =
        expectation(h, detail::prepare_ansatz(anz, detail::ShiftSpec{r, k, -shift}));
    if (eval_counter) *eval_counter += 2;
    grad += (ep - em) / anz.trotter_number;
  }
  return grad;
}

struct AdamConfig {
  double step = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double grad_tolerance = 1e-6;  // infinity norm exit
  int max_iterations = 500;
};

struct VqeTracePoint {
  std::size_t nfev;
  double energy;
};

struct VqeResult {
  std::vector<double> thetas;
  double energy = 0.0;
  bool gradient_converged = false;
  std::size_t nfev = 0;
  std::vector<VqeTracePoint> trace;
};

/// Adam minimization of the ansatz energy with parameter-shift gradients. Returns the
/// best iterate visited, so the final energy never exceeds the initial one.
inline VqeResult vqe_minimize(const PauliSum& h, AnsatzState anz, const AdamConfig& cfg = {}) {
  anz.validate();
  VqeResult res;
  std::size_t nfev = 0;
  std::vector<double> m(anz.ops.size(), 0.0), v(anz.ops.size(), 0.0);

  double energy = ansatz_energy(h, anz, &nfev);
  if (!std::isfinite(energy)) throw std::runtime_error("vqe_minimize: non-finite energy");
  res.thetas = anz.thetas;
  res.energy = energy;
  res.trace.push_back({nfev, energy});

  for (int it = 1; it <= cfg.max_iterations && !anz.ops.empty(); ++it) {
    std::vector<double> g(anz.ops.size());
    double g_inf = 0.0;
    for (std::size_t k = 0; k < anz.ops.size(); ++k) {
      g[k] = gradient(h, anz, k, &nfev);
      g_inf = std::max(g_inf, std::abs(g[k]));
    }
    if (g_inf < cfg.grad_tolerance) {
      res.gradient_converged = true;
      break;
    }
    for (std::size_t k = 0; k < anz.ops.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1 - cfg.beta2) * g[k] * g[k];
      const double mhat = m[k] / (1 - std::pow(cfg.beta1, it));
      const double vhat = v[k] / (1 - std::pow(cfg.beta2, it));
      anz.thetas[k] -= cfg.step * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
    energy = ansatz_energy(h, anz, &nfev);
    if (!std::isfinite(energy)) throw std::runtime_error("vqe_minimize: non-finite energy");
    res.trace.push_back({nfev, energy});
    if (energy < res.energy) {
      res.energy = energy;
      res.thetas = anz.thetas;
    }
  }
  res.nfev = nfev;
  return res;
}

struct AdaptConfig {
  AdamConfig adam;
  int max_cycles = 50;
  double gradient_threshold = 1e-3;
  std::optional<double> target_energy;
  double target_tolerance = 1.6e-3;  // chemical accuracy
  int trotter_number = 1;
};

struct AdaptCyclePoint {
  int cycle = 0;
  std::size_t nfev = 0;  // cumulative expectation evaluations
  double energy = 0.0;
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  double max_gradient = 0.0;
  std::size_t chosen_op = 0;
  std::size_t screening_evals = 0;
  bool energy_increased = false;  // warning: inner optimization fell short
};

struct AdaptResult {
  AnsatzState ansatz;
  double energy = 0.0;
  std::vector<AdaptCyclePoint> trace;
  std::string stop_reason;
  std::size_t nfev = 0;
};

/// Qubit-ADAPT-VQE: per cycle, screen the pool with the parameter-shift gradient at
/// theta = 0 (two expectation evaluations per operator), append the largest-|gradient|
/// operator (ties to the lowest pool index), then re-optimize every parameter from the
/// warm start with the new parameter zeroed.
inline AdaptResult adapt_vqe(const PauliSum& h, const OperatorPool& pool,
                             const std::string& reference, const AdaptConfig& cfg = {}) {
  if (pool.operators.empty()) throw std::invalid_argument("adapt_vqe: empty pool");
  if (pool.n_qubits != reference.size()) throw std::invalid_argument("adapt_vqe: size mismatch");

  AdaptResult res;
  res.ansatz.reference = reference;
  res.ansatz.trotter_number = cfg.trotter_number;
  std::size_t nfev = 0;
  res.energy = ansatz_energy(h, res.ansatz, &nfev);
  double prev_energy = res.energy;

  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    // Gradient screening at theta = 0: G_P(0) = g(pi/4) - g(-pi/4) from the current
    // optimized state.
    const StateVector psi = detail::prepare_ansatz(res.ansatz);
    double best_grad = -1.0;
    std::size_t best_op = 0;
    std::size_t screen_evals = 0;
    for (std::size_t pi = 0; pi < pool.operators.size(); ++pi) {
      const double gp =
          expectation(h, apply_exp_pauli(psi, pool.operators[pi], std::numbers::pi / 4));
      const double gm =
          expectation(h, apply_exp_pauli(psi, pool.operators[pi], -std::numbers::pi / 4));
      screen_evals += 2;
      const double mag = std::abs(gp - gm);
      if (mag > best_grad + 1e-15) {
        best_grad = mag;
        best_op = pi;
      }
    }
    nfev += screen_evals;
    if (best_grad < cfg.gradient_threshold) {
      res.stop_reason = "gradient_threshold";
      break;
    }

    res.ansatz.ops.push_back(pool.operators[best_op]);
    res.ansatz.thetas.push_back(0.0);

    VqeResult inner = vqe_minimize(h, res.ansatz, cfg.adam);
    nfev += inner.nfev;
    res.ansatz.thetas = inner.thetas;

    AdaptCyclePoint pt;
    pt.cycle = cycle;
    pt.nfev = nfev;
    pt.energy = inner.energy;
    pt.max_gradient = best_grad;
    pt.chosen_op = best_op;
    pt.screening_evals = screen_evals;
    pt.energy_increased = inner.energy > prev_energy + 1e-12;
    if (cfg.target_energy) pt.abs_error = std::abs(inner.energy - *cfg.target_energy);
    res.trace.push_back(pt);

    res.energy = inner.energy;
    prev_energy = inner.energy;

    if (cfg.target_energy && pt.abs_error < cfg.target_tolerance) {
      res.stop_reason = "target_reached";
      break;
    }
  }
  if (res.stop_reason.empty()) res.stop_reason = "cycle_cap";
  res.nfev = nfev;
  return res;
}

}  // namespace csq
