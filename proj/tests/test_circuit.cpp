#include "csq/circuit.hpp"

#include <gtest/gtest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"

using csq::Circuit;
using csq::Gate;
using csq::GateKind;
using csq::PauliTerm;

namespace {

oracle::Mat expm_i_theta(const oracle::Mat& p, double theta) {
  return (oracle::cplx{0, 1} * theta * p).exp();
}

std::size_t expected_gate_bound(const PauliTerm& p) {
  return 6 * p.n_qubits() - 1;
}

}  // namespace

TEST(ExpPauliCircuit, SingleZIsOneRz) {
  const Circuit c = csq::exp_pauli_circuit(PauliTerm::from_string("Z"), 0.37);
  ASSERT_EQ(c.gates.size(), 1u);
  EXPECT_EQ(c.gates[0].kind, GateKind::RZ);
  EXPECT_NEAR(c.gates[0].angle, 2 * 0.37, 1e-15);
  // Even parity picks up e^{+i theta}: exact equality, not just up to phase.
  EXPECT_TRUE(csq::circuit_unitary(c).isApprox(expm_i_theta(oracle::pauli_1q('Z'), 0.37), 1e-14));
}

TEST(ExpPauliCircuit, IdentityBecomesGlobalPhase) {
  const Circuit c = csq::exp_pauli_circuit(PauliTerm::identity(2), 0.81);
  EXPECT_TRUE(c.gates.empty());
  EXPECT_NEAR(c.global_phase, 0.81, 1e-15);
  EXPECT_TRUE(csq::circuit_unitary(c).isApprox(
      std::polar(1.0, 0.81) * oracle::Mat::Identity(4, 4), 1e-14));
  EXPECT_THROW(csq::exp_pauli_circuit(PauliTerm::from_string("X"), std::nan("")),
               std::invalid_argument);
}

TEST(ExpPauliCircuit, AllYSaturatesGateBound) {
  const PauliTerm p = PauliTerm::from_string("YYY");
  const Circuit c = csq::exp_pauli_circuit(p, 0.2);
  EXPECT_EQ(c.gates.size(), 17u);  // 6*3 - 1
  EXPECT_TRUE(csq::circuit_unitary(c).isApprox(expm_i_theta(oracle::term_matrix(p), 0.2), 1e-12));
}

TEST(ExpPauliCircuit, RandomStringsMatchExpmExactly) {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rep % 5;
    const PauliTerm p = oracle::random_pauli(n, rng);
    const double theta = angle(rng);
    const Circuit c = csq::exp_pauli_circuit(p, theta);
    EXPECT_LE(c.gates.size(), expected_gate_bound(p));
    const oracle::Mat u = csq::circuit_unitary(c);
    const oracle::Mat expect = expm_i_theta(oracle::term_matrix(p), theta);
    // The construction is phase-exact, not just fidelity-exact.
    EXPECT_TRUE(u.isApprox(expect, 1e-11)) << p.str() << " theta=" << theta;
  }
}

TEST(ExpPauliCircuit, DiagonalParityPhasesExhaustive) {
  // For diagonal P the circuit acts as |b> -> e^{i theta (-1)^{parity(b)}} |b>.
  std::mt19937_64 rng(707);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 4;
    PauliTerm p(n);
    bool any = false;
    std::uniform_int_distribution<int> bit(0, 1);
    for (std::size_t q = 0; q < n; ++q) {
      if (bit(rng)) {
        p.set(q, 'Z');
        any = true;
      }
    }
    if (!any) continue;
    const double theta = 0.61;
    const oracle::Mat u = csq::circuit_unitary(csq::exp_pauli_circuit(p, theta));
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
      int parity = 0;
      for (std::size_t q = 0; q < n; ++q) {
        if (p.letter(q) == 'Z' && ((b >> (n - 1 - q)) & 1)) parity ^= 1;
      }
      const oracle::cplx expect = std::polar(1.0, parity ? -theta : theta);
      EXPECT_NEAR(std::abs(u(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) -
                           expect),
                  0.0, 1e-12);
    }
  }
}

TEST(TrotterCircuit, SingleTermExactForAnyTrotterNumber) {
  std::vector<std::pair<PauliTerm, double>> terms{{PauliTerm::from_string("XY"), 0.45}};
  const oracle::Mat expect = expm_i_theta(oracle::pauli_string_matrix("XY"), 0.45);
  for (int nt : {1, 3, 7}) {
    EXPECT_TRUE(csq::circuit_unitary(csq::trotter_circuit(terms, nt)).isApprox(expect, 1e-11));
  }
  EXPECT_THROW(csq::trotter_circuit(terms, 0), std::invalid_argument);
}

TEST(TrotterCircuit, CommutingTermsExactAtNtOne) {
  std::vector<std::pair<PauliTerm, double>> terms{{PauliTerm::from_string("ZI"), 0.3},
                                                  {PauliTerm::from_string("IZ"), -0.7}};
  const oracle::Mat expect = expm_i_theta(
      0.3 * oracle::pauli_string_matrix("ZI") - 0.7 * oracle::pauli_string_matrix("IZ"), 1.0);
  EXPECT_TRUE(csq::circuit_unitary(csq::trotter_circuit(terms, 1)).isApprox(expect, 1e-12));
}

TEST(TrotterCircuit, FirstOrderErrorDecay) {
  // Non-commuting pair: error should fall as O(1/n_T).
  std::vector<std::pair<PauliTerm, double>> terms{{PauliTerm::from_string("X"), 0.9},
                                                  {PauliTerm::from_string("Z"), 0.7}};
  const oracle::Mat exact = expm_i_theta(
      0.9 * oracle::pauli_1q('X') + 0.7 * oracle::pauli_1q('Z'), 1.0);
  std::vector<double> errs;
  for (int nt : {1, 2, 4, 8}) {
    const oracle::Mat u = csq::circuit_unitary(csq::trotter_circuit(terms, nt));
    errs.push_back((u - exact).operatorNorm());
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double ratio = errs[i] / errs[i + 1];
    EXPECT_GT(ratio, 1.7) << "step " << i;
    EXPECT_LT(ratio, 2.3) << "step " << i;
  }
}

TEST(CancelAdjacent, BasicPairs) {
  Circuit c(2);
  c.push(Gate::h(0));
  c.push(Gate::h(0));
  EXPECT_TRUE(csq::cancel_adjacent(c).gates.empty());

  Circuit c2(2);
  c2.push(Gate::s(1));
  c2.push(Gate::sdg(1));
  EXPECT_TRUE(csq::cancel_adjacent(c2).gates.empty());

  // Blocked by an intervening gate on the same qubit.
  Circuit c3(2);
  c3.push(Gate::h(0));
  c3.push(Gate::x(0));
  c3.push(Gate::h(0));
  EXPECT_EQ(csq::cancel_adjacent(c3).gates.size(), 3u);

  // A disjoint-qubit gate in between does not block.
  Circuit c4(2);
  c4.push(Gate::h(0));
  c4.push(Gate::x(1));
  c4.push(Gate::h(0));
  EXPECT_EQ(csq::cancel_adjacent(c4).gates.size(), 1u);
}

TEST(CancelAdjacent, AdjacentExpBlocksShareBasisChanges) {
  // Two exp blocks with the same basis structure cancel interior gates and keep the
  // unitary exactly.
  const PauliTerm p = PauliTerm::from_string("XY");
  Circuit c(2);
  c.append(csq::exp_pauli_circuit(p, 0.3));
  c.append(csq::exp_pauli_circuit(p, 0.5));
  const Circuit reduced = csq::cancel_adjacent(c);
  EXPECT_LT(reduced.gates.size(), c.gates.size());
  EXPECT_TRUE(csq::circuit_unitary(reduced).isApprox(csq::circuit_unitary(c), 1e-12));
}

TEST(CancelAdjacent, PreservesRandomCircuitUnitary) {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<std::uint32_t> qubit(0, 3);
  std::uniform_real_distribution<double> angle(-2.0, 2.0);
  for (int rep = 0; rep < 15; ++rep) {
    Circuit c(4);
    for (int g = 0; g < 30; ++g) {
      switch (kind(rng)) {
        case 0: c.push(Gate::h(qubit(rng))); break;
        case 1: c.push(Gate::s(qubit(rng))); break;
        case 2: c.push(Gate::sdg(qubit(rng))); break;
        case 3: c.push(Gate::x(qubit(rng))); break;
        case 4: {
          const auto a = qubit(rng);
          const auto b = qubit(rng);
          if (a != b) c.push(Gate::cnot(a, b));
          break;
        }
        default: c.push(Gate::rz(qubit(rng), angle(rng))); break;
      }
    }
    const Circuit reduced = csq::cancel_adjacent(c);
    EXPECT_LE(reduced.gates.size(), c.gates.size());
    EXPECT_TRUE(csq::circuit_unitary(reduced).isApprox(csq::circuit_unitary(c), 1e-11));
  }
}

TEST(CircuitUnitary, BasicsAndUnitarity) {
  Circuit empty(2);
  EXPECT_TRUE(csq::circuit_unitary(empty).isApprox(oracle::Mat::Identity(4, 4), 1e-15));

  Circuit x0(1);
  x0.push(Gate::x(0));
  EXPECT_TRUE(csq::circuit_unitary(x0).isApprox(oracle::pauli_1q('X'), 1e-15));

  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> angle(-2.0, 2.0);
  Circuit c(4);
  for (int g = 0; g < 25; ++g) {
    c.push(Gate::h(static_cast<std::uint32_t>(g % 4)));
    c.push(Gate::cnot(static_cast<std::uint32_t>(g % 4), static_cast<std::uint32_t>((g + 1) % 4)));
    c.push(Gate::rz(static_cast<std::uint32_t>((g + 2) % 4), angle(rng)));
  }
  const oracle::Mat u = csq::circuit_unitary(c);
  EXPECT_LT((u.adjoint() * u - oracle::Mat::Identity(16, 16)).norm(), 1e-10);

  Circuit big(11);
  EXPECT_THROW(csq::circuit_unitary(big), std::invalid_argument);
}

TEST(CircuitUnitary, GateConventions) {
  // S = diag(1, i); paper convention RZ(phi) = diag(e^{i phi/2}, e^{-i phi/2}).
  Circuit s(1);
  s.push(Gate::s(0));
  oracle::Mat sm(2, 2);
  sm << 1, 0, 0, oracle::cplx{0, 1};
  EXPECT_TRUE(csq::circuit_unitary(s).isApprox(sm, 1e-15));

  Circuit rz(1);
  rz.push(Gate::rz(0, 0.8));
  oracle::Mat rm(2, 2);
  rm << std::polar(1.0, 0.4), 0, 0, std::polar(1.0, -0.4);
  EXPECT_TRUE(csq::circuit_unitary(rz).isApprox(rm, 1e-15));
}

TEST(OpenQasm, EmitsOnlyAllowedGates) {
  const Circuit c = csq::trotter_circuit(
      std::vector<std::pair<PauliTerm, double>>{{PauliTerm::from_string("XYZ"), 0.25}}, 1);
  const std::string qasm = csq::to_openqasm2(c);
  EXPECT_NE(qasm.find("OPENQASM 2.0;"), std::string::npos);
  EXPECT_NE(qasm.find("qreg q[3];"), std::string::npos);
  std::istringstream is(qasm);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const bool ok = line.rfind("h ", 0) == 0 || line.rfind("s ", 0) == 0 ||
                    line.rfind("sdg ", 0) == 0 || line.rfind("x ", 0) == 0 ||
                    line.rfind("cx ", 0) == 0 || line.rfind("rz(", 0) == 0;
    EXPECT_TRUE(ok) << line;
  }
}
