#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csq/pauli.hpp"

namespace csq {

inline constexpr std::size_t kDenseQubitCap = 12;

inline Eigen::Matrix2cd pauli_matrix_1q(char letter) {
  Eigen::Matrix2cd m;
  const cplx i{0.0, 1.0};
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_matrix_1q: bad letter");
  }
  return m;
}

/// Dense 2^N x 2^N matrix. Qubit 0 is the leftmost tensor factor (most significant bit
/// of the basis index), matching the string form.
inline Eigen::MatrixXcd to_matrix(const PauliTerm& t, std::size_t cap = kDenseQubitCap) {
  if (t.n_qubits() > cap) throw std::invalid_argument("to_matrix: qubit cap exceeded");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Constant(1, 1, t.phase_factor());
  for (std::size_t q = 0; q < t.n_qubits(); ++q) {
    m = Eigen::kroneckerProduct(m, pauli_matrix_1q(t.letter(q))).eval();
  }
  return m;
}

inline Eigen::MatrixXcd to_matrix(const PauliSum& s, std::size_t cap = kDenseQubitCap) {
  if (s.n_qubits() > cap) throw std::invalid_argument("to_matrix: qubit cap exceeded");
  const std::size_t dim = std::size_t{1} << s.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [t, c] : s.terms()) {
    m += c * to_matrix(t, cap);
  }
  return m;
}

/// Ascending eigenvalues of a Hermitian sum.
inline std::vector<double> dense_eigenvalues(const PauliSum& s, std::size_t cap = kDenseQubitCap) {
  s.require_hermitian();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_matrix(s, cap),
                                                     Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

inline std::pair<double, Eigen::VectorXcd> dense_min_eigenpair(const PauliSum& s,
                                                               std::size_t cap = kDenseQubitCap) {
  s.require_hermitian();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_matrix(s, cap));
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

inline double dense_ground_energy(const PauliSum& s, std::size_t cap = kDenseQubitCap) {
  return dense_eigenvalues(s, cap).front();
}

/// Matrix-free P|psi> on a dense amplitude vector (qubit 0 = most significant index bit).
inline Eigen::VectorXcd apply_pauli(const PauliTerm& t, const Eigen::VectorXcd& psi) {
  const std::size_t n = t.n_qubits();
  if (psi.size() != static_cast<Eigen::Index>(std::size_t{1} << n)) {
    throw std::invalid_argument("apply_pauli: dimension mismatch");
  }
  std::uint64_t xm = 0, zm = 0;
  int y_count = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    if (t.x_bit(q)) xm |= bit;
    if (t.z_bit(q)) zm |= bit;
    if (t.x_bit(q) && t.z_bit(q)) ++y_count;
  }
  static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx base = i_pow[(t.phase_exp() + y_count) % 4];
  Eigen::VectorXcd out(psi.size());
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(psi.size()); ++b) {
    const double sign = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(b ^ xm)) = base * sign * psi(static_cast<Eigen::Index>(b));
  }
  return out;
}

inline cplx dense_expectation(const PauliSum& s, const Eigen::VectorXcd& psi) {
  cplx acc = 0.0;
  for (const auto& [t, c] : s.terms()) {
    acc += c * psi.dot(apply_pauli(t, psi));
  }
  return acc;
}

}  // namespace csq
