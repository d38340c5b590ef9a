#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "csq/circuit.hpp"
#include "csq/dense.hpp"
#include "csq/pauli.hpp"

namespace csq {

/// Dense amplitude vector; qubit 0 is the most significant index bit, matching the
/// string form of basis states.
struct StateVector {
  std::size_t n_qubits = 0;
  Eigen::VectorXcd amps;

  explicit StateVector(std::size_t n = 0)
      : n_qubits(n), amps(Eigen::VectorXcd::Zero(Eigen::Index{1} << n)) {
    amps(0) = 1.0;
  }

  static StateVector from_bits(const std::string& bits) {
    StateVector s(bits.size());
    std::uint64_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q) {
      if (bits[q] != '0' && bits[q] != '1') {
        throw std::invalid_argument("StateVector: reference must be a 0/1 string");
      }
      if (bits[q] == '1') idx |= std::uint64_t{1} << (bits.size() - 1 - q);
    }
    s.amps.setZero();
    s.amps(static_cast<Eigen::Index>(idx)) = 1.0;
    return s;
  }

  static StateVector from_amplitudes(std::size_t n, Eigen::VectorXcd v) {
    if (v.size() != Eigen::Index{1} << n) {
      throw std::invalid_argument("StateVector: amplitude length mismatch");
    }
    StateVector s(n);
    s.amps = std::move(v);
    return s;
  }

  double norm() const { return amps.norm(); }

  void check_normalized(double tol = 1e-10) const {
    if (std::abs(norm() - 1.0) > tol) {
      throw std::runtime_error("StateVector: norm drifted from 1");
    }
  }

  /// Bit string when the state is a computational basis vector (up to phase).
  std::optional<std::string> as_bits(double tol = 1e-10) const {
    Eigen::Index idx = -1;
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
      if (std::abs(amps(i)) > tol) {
        if (idx >= 0) return std::nullopt;
        idx = i;
      }
    }
    if (idx < 0) return std::nullopt;
    std::string bits(n_qubits, '0');
    for (std::size_t q = 0; q < n_qubits; ++q) {
      if ((static_cast<std::uint64_t>(idx) >> (n_qubits - 1 - q)) & 1) bits[q] = '1';
    }
    return bits;
  }
};

inline void apply_gate(StateVector& s, const Gate& g) {
  const std::size_t n = s.n_qubits;
  if (g.q0 >= n || g.q1 >= n) throw std::invalid_argument("apply_gate: qubit out of range");
  Eigen::VectorXcd& a = s.amps;
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t bit0 = std::uint64_t{1} << (n - 1 - g.q0);
  const cplx i{0, 1};
  switch (g.kind) {
    case GateKind::H:
      for (std::uint64_t b = 0; b < dim; ++b) {
        if (b & bit0) continue;
        const auto lo = static_cast<Eigen::Index>(b), hi = static_cast<Eigen::Index>(b | bit0);
        const cplx x = a(lo), y = a(hi);
        a(lo) = (x + y) / std::sqrt(2.0);
        a(hi) = (x - y) / std::sqrt(2.0);
      }
      break;
    case GateKind::S:
    case GateKind::Sdg:
      for (std::uint64_t b = 0; b < dim; ++b) {
        if (b & bit0) a(static_cast<Eigen::Index>(b)) *= (g.kind == GateKind::S ? i : -i);
      }
      break;
    case GateKind::X:
      for (std::uint64_t b = 0; b < dim; ++b) {
        if (b & bit0) continue;
        std::swap(a(static_cast<Eigen::Index>(b)), a(static_cast<Eigen::Index>(b | bit0)));
      }
      break;
    case GateKind::CNOT: {
      const std::uint64_t bit1 = std::uint64_t{1} << (n - 1 - g.q1);
      for (std::uint64_t b = 0; b < dim; ++b) {
        if ((b & bit0) && !(b & bit1)) {
          std::swap(a(static_cast<Eigen::Index>(b)), a(static_cast<Eigen::Index>(b | bit1)));
        }
      }
      break;
    }
    case GateKind::RZ:
      for (std::uint64_t b = 0; b < dim; ++b) {
        a(static_cast<Eigen::Index>(b)) *= std::polar(1.0, (b & bit0) ? -g.angle / 2 : g.angle / 2);
      }
      break;
  }
}

inline StateVector apply_circuit(const StateVector& s, const Circuit& c) {
  if (s.n_qubits != c.n_qubits) throw std::invalid_argument("apply_circuit: size mismatch");
  StateVector out = s;
  for (const Gate& g : c.gates) apply_gate(out, g);
  out.amps *= std::polar(1.0, c.global_phase);
  out.check_normalized();
  return out;
}

inline StateVector apply_pauli(const PauliTerm& t, const StateVector& s) {
  return StateVector::from_amplitudes(s.n_qubits, apply_pauli(t, s.amps));
}

/// Exact e^{i theta P}|s> = cos(theta)|s> + i sin(theta) P|s> for Hermitian P.
inline StateVector apply_exp_pauli(const StateVector& s, const PauliTerm& p, double theta) {
  if (!p.is_hermitian()) throw std::invalid_argument("apply_exp_pauli: non-Hermitian generator");
  StateVector out = s;
  out.amps = std::cos(theta) * s.amps + cplx{0, 1} * std::sin(theta) * apply_pauli(p, s.amps);
  return out;
}

inline cplx inner(const StateVector& a, const StateVector& b) {
  if (a.n_qubits != b.n_qubits) throw std::invalid_argument("inner: size mismatch");
  return a.amps.dot(b.amps);
}

/// <s|H|s> for a Hamiltonian-flagged (Hermitian) sum. Real within 1e-10 by construction.
inline double expectation(const PauliSum& h, const StateVector& s) {
  if (h.n_qubits() != s.n_qubits) throw std::invalid_argument("expectation: size mismatch");
  h.require_hermitian();
  const cplx e = dense_expectation(h, s.amps);
  if (std::abs(e.imag()) > 1e-10) {
    throw std::runtime_error("expectation: imaginary residue above tolerance");
  }
  return e.real();
}

/// Qubit-wise commuting measurement groups with a shared per-qubit basis.
struct QWCGrouping {
  std::vector<std::vector<std::size_t>> groups;  // term indices into the simplified sum
  std::vector<std::string> group_basis;          // per-group measurement letter per qubit
};

namespace detail {

inline bool qwc_compatible(const PauliTerm& a, const PauliTerm& b) {
  for (std::size_t q = 0; q < a.n_qubits(); ++q) {
    const char la = a.letter(q), lb = b.letter(q);
    if (la != 'I' && lb != 'I' && la != lb) return false;
  }
  return true;
}

}  // namespace detail

/// Greedy largest-first colouring of the QWC-incompatibility graph; deterministic
/// given the canonical term order of the simplified sum.
inline QWCGrouping qwc_grouping(const PauliSum& h) {
  const PauliSum hs = h.simplified();
  const std::size_t k = hs.size();
  std::vector<std::vector<bool>> incompatible(k, std::vector<bool>(k, false));
  std::vector<std::size_t> degree(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!detail::qwc_compatible(hs.terms()[i].first, hs.terms()[j].first)) {
        incompatible[i][j] = incompatible[j][i] = true;
        ++degree[i];
        ++degree[j];
      }
    }
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return degree[a] != degree[b] ? degree[a] > degree[b] : a < b;
  });

  QWCGrouping out;
  std::vector<int> color(k, -1);
  for (std::size_t idx : order) {
    std::size_t c = 0;
    for (;; ++c) {
      bool ok = true;
      if (c < out.groups.size()) {
        for (std::size_t member : out.groups[c]) {
          if (incompatible[idx][member]) {
            ok = false;
            break;
          }
        }
      }
      if (ok) break;
    }
    if (c == out.groups.size()) out.groups.emplace_back();
    out.groups[c].push_back(idx);
    color[idx] = static_cast<int>(c);
  }
  for (auto& g : out.groups) std::sort(g.begin(), g.end());

  for (const auto& group : out.groups) {
    std::string basis(hs.n_qubits(), 'I');
    for (std::size_t idx : group) {
      const PauliTerm& t = hs.terms()[idx].first;
      for (std::size_t q = 0; q < hs.n_qubits(); ++q) {
        if (t.letter(q) != 'I') basis[q] = t.letter(q);
      }
    }
    out.group_basis.push_back(std::move(basis));
  }
  return out;
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; keeps sampling bit-for-bit
// deterministic across platforms, unlike std::uniform_real_distribution.
inline double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 step on seed + stream index
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e91bull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Shot-sampled energy estimate: per QWC group, rotate into the group basis, draw S
/// multinomial samples and average eigenvalue parities per member term. Unbiased and
/// deterministic for a fixed seed.
inline double sampled_expectation(const PauliSum& h, const StateVector& s,
                                  std::size_t shots_per_group, std::uint64_t seed) {
  if (shots_per_group < 1) throw std::invalid_argument("sampled_expectation: shots must be >= 1");
  const PauliSum hs = h.simplified();
  hs.require_hermitian();
  const QWCGrouping grouping = qwc_grouping(hs);
  std::mt19937_64 rng(seed);
  double estimate = 0.0;
  for (std::size_t gi = 0; gi < grouping.groups.size(); ++gi) {
    const std::string& basis = grouping.group_basis[gi];
    StateVector rotated = s;
    for (std::size_t q = 0; q < basis.size(); ++q) {
      if (basis[q] == 'X') {
        apply_gate(rotated, Gate::h(static_cast<std::uint32_t>(q)));
      } else if (basis[q] == 'Y') {
        apply_gate(rotated, Gate::sdg(static_cast<std::uint32_t>(q)));
        apply_gate(rotated, Gate::h(static_cast<std::uint32_t>(q)));
      }
    }
    // Cumulative distribution over basis outcomes.
    const std::size_t dim = std::size_t{1} << s.n_qubits;
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      acc += std::norm(rotated.amps(static_cast<Eigen::Index>(b)));
      cdf[b] = acc;
    }
    std::vector<std::size_t> counts(dim, 0);
    for (std::size_t shot = 0; shot < shots_per_group; ++shot) {
      const double u = detail::uniform53(rng) * acc;
      const std::size_t b = static_cast<std::size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      ++counts[std::min(b, dim - 1)];
    }
    for (std::size_t idx : grouping.groups[gi]) {
      const auto& [t, c] = hs.terms()[idx];
      std::uint64_t mask = 0;
      for (std::size_t q = 0; q < s.n_qubits; ++q) {
        if (t.letter(q) != 'I') mask |= std::uint64_t{1} << (s.n_qubits - 1 - q);
      }
      double mean = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        if (counts[b] == 0) continue;
        const double eig = (std::popcount(b & mask) & 1) ? -1.0 : 1.0;
        mean += eig * static_cast<double>(counts[b]);
      }
      mean /= static_cast<double>(shots_per_group);
      estimate += c.real() * mean;
    }
  }
  return estimate;
}

/// Minimal eigenpair of the dense Hamiltonian; the epsilon_0 oracle.
inline std::pair<double, StateVector> exact_ground_state(const PauliSum& h,
                                                         std::size_t cap = kDenseQubitCap) {
  auto [energy, vec] = dense_min_eigenpair(h, cap);
  return {energy, StateVector::from_amplitudes(h.n_qubits(), std::move(vec))};
}

struct ShotScanPoint {
  std::size_t shots;
  double rmse;
};

/// RMSE of the sampled estimator over `realizations` independent seed streams for
/// shots 2^0 .. 2^max_pow per group.
inline std::vector<ShotScanPoint> shot_noise_scan(const PauliSum& h, const StateVector& s,
                                                  std::size_t max_pow, std::size_t realizations,
                                                  std::uint64_t seed) {
  const double exact = expectation(h, s);
  std::vector<ShotScanPoint> out;
  for (std::size_t p = 0; p <= max_pow; ++p) {
    const std::size_t shots = std::size_t{1} << p;
    double mse = 0.0;
    for (std::size_t r = 0; r < realizations; ++r) {
      const double est = sampled_expectation(h, s, shots, detail::mix_seed(seed, p * 1000 + r));
      mse += (est - exact) * (est - exact);
    }
    out.push_back({shots, std::sqrt(mse / static_cast<double>(realizations))});
  }
  return out;
}

/// Least-squares slope of log10(rmse) against log10(shots).
inline double fit_loglog_slope(const std::vector<ShotScanPoint>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& p : points) {
    if (p.rmse <= 0) continue;
    const double x = std::log10(static_cast<double>(p.shots));
    const double y = std::log10(p.rmse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_loglog_slope: need at least two points");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace csq
