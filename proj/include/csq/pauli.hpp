#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace csq {

using cplx = std::complex<double>;

// Coefficients below this magnitude are dropped by PauliSum::simplify.
inline constexpr double kCoeffDropTol = 1e-12;
// A sum counts as Hermitian when every collected coefficient is real to this tolerance.
inline constexpr double kHermitianTol = 1e-10;

namespace detail {

inline std::size_t word_count(std::size_t n_bits) { return (n_bits + 63) / 64; }

inline int popcount_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  int c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c += std::popcount(a[i] & b[i]);
  }
  return c;
}

}  // namespace detail

/// An N-qubit Pauli operator in symplectic form: i^phase_exp * (P_0 x P_1 x ... x P_{N-1})
/// where P_q is I, X, Y or Z according to the (x, z) bit pair at qubit q.
/// Qubit 0 is the leftmost character in string form.
class PauliTerm {
 public:
  PauliTerm() : n_(0), phase_(0) {}

  explicit PauliTerm(std::size_t n_qubits)
      : n_(n_qubits),
        x_(detail::word_count(n_qubits), 0),
        z_(detail::word_count(n_qubits), 0),
        phase_(0) {}

  static PauliTerm identity(std::size_t n_qubits) { return PauliTerm(n_qubits); }

  /// Parse from a string of I/X/Y/Z characters, qubit 0 leftmost.
  static PauliTerm from_string(std::string_view s) {
    PauliTerm t(s.size());
    for (std::size_t q = 0; q < s.size(); ++q) {
      t.set(q, s[q]);
    }
    return t;
  }

  /// Single-qubit Pauli `letter` acting on qubit q of an n-qubit register.
  static PauliTerm single(std::size_t n_qubits, std::size_t q, char letter) {
    PauliTerm t(n_qubits);
    t.set(q, letter);
    return t;
  }

  std::size_t n_qubits() const { return n_; }
  int phase_exp() const { return phase_; }

  void set_phase_exp(int p) { phase_ = static_cast<std::uint8_t>(((p % 4) + 4) % 4); }

  cplx phase_factor() const {
    static constexpr cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[phase_];
  }

  bool x_bit(std::size_t q) const { return (x_[q / 64] >> (q % 64)) & 1u; }
  bool z_bit(std::size_t q) const { return (z_[q / 64] >> (q % 64)) & 1u; }

  char letter(std::size_t q) const {
    const bool x = x_bit(q), z = z_bit(q);
    if (x && z) return 'Y';
    if (x) return 'X';
    if (z) return 'Z';
    return 'I';
  }

  void set(std::size_t q, char letter) {
    if (q >= n_) throw std::invalid_argument("PauliTerm::set: qubit index out of range");
    const std::uint64_t mask = std::uint64_t{1} << (q % 64);
    x_[q / 64] &= ~mask;
    z_[q / 64] &= ~mask;
    switch (letter) {
      case 'I': break;
      case 'X': x_[q / 64] |= mask; break;
      case 'Y': x_[q / 64] |= mask; z_[q / 64] |= mask; break;
      case 'Z': z_[q / 64] |= mask; break;
      default: throw std::invalid_argument("PauliTerm: letter must be one of I, X, Y, Z");
    }
  }

  /// True when the bare string is identity (any phase).
  bool is_identity_string() const {
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (x_[i] | z_[i]) return false;
    }
    return true;
  }

  bool is_diagonal() const {
    return std::all_of(x_.begin(), x_.end(), [](std::uint64_t w) { return w == 0; });
  }

  bool is_hermitian() const { return phase_ % 2 == 0; }

  /// Hermitian sign: +1 for phase 0, -1 for phase 2. Throws for odd phases.
  double hermitian_sign() const {
    if (!is_hermitian()) throw std::invalid_argument("PauliTerm: operator is not Hermitian");
    return phase_ == 0 ? 1.0 : -1.0;
  }

  int weight() const {
    int w = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      w += std::popcount(x_[i] | z_[i]);
    }
    return w;
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t q = 0; q < n_; ++q) {
      if (x_bit(q) || z_bit(q)) s.push_back(q);
    }
    return s;
  }

  /// Copy with phase_exp forced to zero.
  PauliTerm bare() const {
    PauliTerm t = *this;
    t.phase_ = 0;
    return t;
  }

  friend bool commutes(const PauliTerm& a, const PauliTerm& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("commutes: qubit count mismatch");
    const int s = detail::popcount_and(a.x_, b.z_) + detail::popcount_and(a.z_, b.x_);
    return (s & 1) == 0;
  }

  friend PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("multiply: qubit count mismatch");
    PauliTerm c(a.n_);
    int k = a.phase_ + b.phase_;
    k += detail::popcount_and(a.x_, a.z_);
    k += detail::popcount_and(b.x_, b.z_);
    k += 2 * detail::popcount_and(a.z_, b.x_);
    for (std::size_t i = 0; i < c.x_.size(); ++i) {
      c.x_[i] = a.x_[i] ^ b.x_[i];
      c.z_[i] = a.z_[i] ^ b.z_[i];
    }
    k -= detail::popcount_and(c.x_, c.z_);
    c.phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4);
    return c;
  }

  friend PauliTerm operator*(const PauliTerm& a, const PauliTerm& b) { return multiply(a, b); }

  /// Equal bit pattern and phase.
  friend bool operator==(const PauliTerm& a, const PauliTerm& b) {
    return a.n_ == b.n_ && a.phase_ == b.phase_ && a.x_ == b.x_ && a.z_ == b.z_;
  }

  bool same_string(const PauliTerm& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_;
  }

  /// Canonical order: lexicographic on the (x, z) bit sequences, qubit 0 first; phase last.
  friend bool canonical_less(const PauliTerm& a, const PauliTerm& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    for (std::size_t q = 0; q < a.n_; ++q) {
      if (a.x_bit(q) != b.x_bit(q)) return b.x_bit(q);
    }
    for (std::size_t q = 0; q < a.n_; ++q) {
      if (a.z_bit(q) != b.z_bit(q)) return b.z_bit(q);
    }
    return a.phase_ < b.phase_;
  }

  std::string str() const {
    static constexpr const char* prefix[4] = {"", "i", "-", "-i"};
    std::string s = prefix[phase_];
    for (std::size_t q = 0; q < n_; ++q) s.push_back(letter(q));
    return s;
  }

  /// Just the I/X/Y/Z characters, no phase prefix.
  std::string string_part() const {
    std::string s;
    s.reserve(n_);
    for (std::size_t q = 0; q < n_; ++q) s.push_back(letter(q));
    return s;
  }

  std::span<const std::uint64_t> x_words() const { return x_; }
  std::span<const std::uint64_t> z_words() const { return z_; }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> x_, z_;
  std::uint8_t phase_;  // power of i
};

/// Weighted sum of Pauli terms. Stored terms always carry phase_exp = 0; phases are
/// folded into the complex coefficients on insertion, so (x, z) keys identify terms.
class PauliSum {
 public:
  using Term = std::pair<PauliTerm, cplx>;

  PauliSum() : n_(0) {}
  explicit PauliSum(std::size_t n_qubits) : n_(n_qubits) {}

  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  void add(PauliTerm t, cplx coeff) {
    if (t.n_qubits() != n_) throw std::invalid_argument("PauliSum::add: qubit count mismatch");
    coeff *= t.phase_factor();
    terms_.emplace_back(t.bare(), coeff);
  }

  void add(const PauliSum& other, cplx scale = 1.0) {
    if (other.n_ != n_) throw std::invalid_argument("PauliSum::add: qubit count mismatch");
    for (const auto& [t, c] : other.terms_) terms_.emplace_back(t, c * scale);
  }

  /// Canonical form: terms sorted by (x, z) key, equal keys merged, tiny coefficients dropped.
  PauliSum& simplify(double drop_tol = kCoeffDropTol) {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return canonical_less(a.first, b.first); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& [t, c] : terms_) {
      if (!out.empty() && out.back().first.same_string(t)) {
        out.back().second += c;
      } else {
        out.emplace_back(std::move(t), c);
      }
    }
    std::erase_if(out, [drop_tol](const Term& e) { return std::abs(e.second) < drop_tol; });
    terms_ = std::move(out);
    return *this;
  }

  PauliSum simplified(double drop_tol = kCoeffDropTol) const {
    PauliSum s = *this;
    s.simplify(drop_tol);
    return s;
  }

  /// Largest |Im coeff| after collection; a Hamiltonian requires this below kHermitianTol.
  double max_imag() const {
    double m = 0.0;
    PauliSum s = simplified();
    for (const auto& [t, c] : s.terms_) m = std::max(m, std::abs(c.imag()));
    return m;
  }

  bool is_hermitian(double tol = kHermitianTol) const { return max_imag() <= tol; }

  void require_hermitian(double tol = kHermitianTol) const {
    if (!is_hermitian(tol)) {
      throw std::invalid_argument("PauliSum: expected Hermitian operator (real coefficients)");
    }
  }

  /// Collected coefficient of the (x, z) string of t, or 0 if absent.
  cplx coefficient(const PauliTerm& t) const {
    cplx acc = 0.0;
    for (const auto& [u, c] : terms_) {
      if (u.same_string(t)) acc += c;
    }
    return acc;
  }

  friend PauliSum operator+(const PauliSum& a, const PauliSum& b) {
    PauliSum s = a;
    s.add(b);
    return s.simplify();
  }

  friend PauliSum operator-(const PauliSum& a, const PauliSum& b) {
    PauliSum s = a;
    s.add(b, -1.0);
    return s.simplify();
  }

  friend PauliSum operator*(const PauliSum& a, cplx scale) {
    PauliSum s = a;
    for (auto& [t, c] : s.terms_) c *= scale;
    return s;
  }

  friend PauliSum operator*(cplx scale, const PauliSum& a) { return a * scale; }

  /// Operator product, expanded term by term and collected.
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("PauliSum product: qubit count mismatch");
    PauliSum s(a.n_);
    for (const auto& [ta, ca] : a.terms_) {
      for (const auto& [tb, cb] : b.terms_) {
        s.add(multiply(ta, tb), ca * cb);
      }
    }
    return s.simplify();
  }

  std::string str() const {
    std::string out;
    for (const auto& [t, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + std::to_string(c.real()) + (c.imag() < 0 ? "-" : "+") +
             std::to_string(std::abs(c.imag())) + "i)*" + t.string_part();
    }
    return out.empty() ? "0" : out;
  }

 private:
  std::size_t n_;
  std::vector<Term> terms_;
};

inline bool approx_equal(const PauliSum& a, const PauliSum& b, double tol = 1e-10) {
  PauliSum d = a - b;
  for (const auto& [t, c] : d.terms()) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

}  // namespace csq
