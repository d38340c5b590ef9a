#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "csq/pauli.hpp"

namespace csq {

/// Dense bit matrix over GF(2), row-major packed words. Used for symmetry kernels,
/// independence checks and generator decompositions.
class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), wpr_(detail::word_count(cols)), data_(rows * wpr_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * wpr_ + c / 64] >> (c % 64)) & 1u;
  }

  void set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (c % 64);
    if (v) {
      data_[r * wpr_ + c / 64] |= mask;
    } else {
      data_[r * wpr_ + c / 64] &= ~mask;
    }
  }

  void xor_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < wpr_; ++w) data_[dst * wpr_ + w] ^= data_[src * wpr_ + w];
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t w = 0; w < wpr_; ++w) {
      std::swap(data_[a * wpr_ + w], data_[b * wpr_ + w]);
    }
  }

  bool row_empty(std::size_t r) const {
    for (std::size_t w = 0; w < wpr_; ++w) {
      if (data_[r * wpr_ + w]) return false;
    }
    return true;
  }

  std::vector<bool> row(std::size_t r) const {
    std::vector<bool> v(cols_);
    for (std::size_t c = 0; c < cols_; ++c) v[c] = get(r, c);
    return v;
  }

  /// In-place reduced row echelon form; returns pivot column per pivot row,
  /// scanning columns lowest index first.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t sel = r;
      while (sel < rows_ && !get(sel, c)) ++sel;
      if (sel == rows_) continue;
      swap_rows(r, sel);
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i != r && get(i, c)) xor_row(i, r);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

 private:
  std::size_t rows_, cols_, wpr_;
  std::vector<std::uint64_t> data_;
};

/// Basis of the null space {v : A v = 0}, one vector per free column, in column order.
inline std::vector<std::vector<bool>> gf2_kernel_basis(BitMatrix a) {
  const std::size_t cols = a.cols();
  const std::vector<std::size_t> pivots = a.rref();
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<bool>> basis;
  for (std::size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    std::vector<bool> v(cols, false);
    v[free_c] = true;
    for (std::size_t pr = 0; pr < pivots.size(); ++pr) {
      if (a.get(pr, free_c)) v[pivots[pr]] = true;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::size_t gf2_rank(BitMatrix a) { return a.rref().size(); }

/// Express `target` over the rows of `basis` (if possible): returns the row subset mask.
inline std::optional<std::vector<bool>> gf2_solve(const BitMatrix& basis,
                                                  const std::vector<bool>& target) {
  if (basis.cols() != target.size()) throw std::invalid_argument("gf2_solve: size mismatch");
  const std::size_t n = basis.rows(), cols = basis.cols();
  // Augment with an identity tail to track the row combination.
  BitMatrix aug(n, cols + n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) aug.set(r, c, basis.get(r, c));
    aug.set(r, cols + r, true);
  }
  std::vector<bool> t = target;
  std::vector<bool> combo(n, false);
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < n; ++c) {
    std::size_t sel = row;
    while (sel < n && !aug.get(sel, c)) ++sel;
    if (sel == n) continue;
    aug.swap_rows(row, sel);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != row && aug.get(i, c)) aug.xor_row(i, row);
    }
    if (t[c]) {
      for (std::size_t cc = 0; cc < cols; ++cc) {
        t[cc] = t[cc] ^ aug.get(row, cc);
      }
      for (std::size_t k = 0; k < n; ++k) {
        combo[k] = combo[k] ^ aug.get(row, cols + k);
      }
    }
    ++row;
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (t[c]) return std::nullopt;
  }
  return combo;
}

/// Symplectic (x|z) row vector of a Pauli string, length 2N: x bits first.
inline std::vector<bool> symplectic_vector(const PauliTerm& t) {
  const std::size_t n = t.n_qubits();
  std::vector<bool> v(2 * n, false);
  for (std::size_t q = 0; q < n; ++q) {
    v[q] = t.x_bit(q);
    v[n + q] = t.z_bit(q);
  }
  return v;
}

inline PauliTerm pauli_from_symplectic(const std::vector<bool>& v) {
  if (v.size() % 2 != 0) throw std::invalid_argument("pauli_from_symplectic: odd length");
  const std::size_t n = v.size() / 2;
  PauliTerm t(n);
  for (std::size_t q = 0; q < n; ++q) {
    const bool x = v[q], z = v[n + q];
    t.set(q, x && z ? 'Y' : x ? 'X' : z ? 'Z' : 'I');
  }
  return t;
}

inline BitMatrix symplectic_matrix(std::span<const PauliTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("symplectic_matrix: no terms");
  const std::size_t n = terms[0].n_qubits();
  BitMatrix m(terms.size(), 2 * n);
  for (std::size_t r = 0; r < terms.size(); ++r) {
    for (std::size_t q = 0; q < n; ++q) {
      m.set(r, q, terms[r].x_bit(q));
      m.set(r, n + q, terms[r].z_bit(q));
    }
  }
  return m;
}

/// GF(2) independence of Pauli strings (ignoring phases).
inline bool gf2_independent(std::span<const PauliTerm> terms) {
  if (terms.empty()) return true;
  return gf2_rank(symplectic_matrix(terms)) == terms.size();
}

/// Maximal pairwise-commuting independent subset of the span of `vecs`, obtained by
/// symplectic Gram-Schmidt: central elements are kept, one member of each hyperbolic
/// pair is kept (the earlier one), and the remainder is orthogonalized against the pair.
inline std::vector<PauliTerm> symplectic_gram_schmidt(std::vector<PauliTerm> vecs) {
  std::vector<PauliTerm> kept;
  while (!vecs.empty()) {
    PauliTerm u = vecs.front();
    vecs.erase(vecs.begin());
    std::size_t partner = vecs.size();
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      if (!commutes(u, vecs[i])) {
        partner = i;
        break;
      }
    }
    if (partner == vecs.size()) {
      kept.push_back(u.bare());
      continue;
    }
    PauliTerm w = vecs[partner];
    vecs.erase(vecs.begin() + static_cast<std::ptrdiff_t>(partner));
    for (auto& v : vecs) {
      const bool au = !commutes(v, u);
      const bool aw = !commutes(v, w);
      if (aw) v = multiply(v, u).bare();
      if (au) v = multiply(v, w).bare();
    }
    kept.push_back(u.bare());
  }
  return kept;
}

}  // namespace csq
