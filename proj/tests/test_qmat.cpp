// Copyright 2026 The qpdext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qpdext/gates.hpp"
#include "qpdext/qmat.hpp"

using namespace qpdext;

namespace {

double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(DimProfile, StridesAndTotal) {
  const DimProfile p({2, 3, 4});
  EXPECT_EQ(p.total(), 24);
  EXPECT_EQ(p.stride(0), 12);
  EXPECT_EQ(p.stride(1), 4);
  EXPECT_EQ(p.stride(2), 1);
  EXPECT_THROW(DimProfile({2, 0}), std::invalid_argument);
}

TEST(Kron, MatchesIndexDefinition) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const auto a = oracle::random_gaussian(rng, 2 + t % 2, 3);
    const auto b = oracle::random_gaussian(rng, 3, 2 + t % 3);
    EXPECT_LT(dist(kron(a, b), oracle::kron(a, b)), 1e-14);
  }
  const std::vector<ComplexMatrix> fs = {gates::pauli_x(), gates::pauli_z(), gates::hadamard()};
  EXPECT_LT(dist(kron_all(fs), oracle::kron(oracle::kron(fs[0], fs[1]), fs[2])), 1e-14);
}

TEST(PartialTrace, MatchesIndexDefinition) {
  std::mt19937_64 rng(2);
  const auto m = oracle::random_gaussian(rng, 6, 6);
  const DimProfile p({2, 3});
  const std::vector<int> keep_a{0}, keep_b{1};
  EXPECT_LT(dist(partial_trace(m, p, keep_a), oracle::trace_b(m, 2, 3)), 1e-13);
  EXPECT_LT(dist(partial_trace(m, p, keep_b), oracle::trace_a(m, 2, 3)), 1e-13);
}

TEST(PartialTrace, ProductStateMarginals) {
  std::mt19937_64 rng(3);
  const auto ra = oracle::random_density(rng, 2, 2);
  const auto rb = oracle::random_density(rng, 3, 3);
  const auto rc = oracle::random_density(rng, 2, 1);
  const ComplexMatrix all = oracle::kron(oracle::kron(ra, rb), rc);
  const DimProfile p({2, 3, 2});
  const std::vector<int> ac{0, 2}, b{1};
  EXPECT_LT(dist(partial_trace(all, p, ac), oracle::kron(ra, rc)), 1e-13);
  EXPECT_LT(dist(partial_trace(all, p, b), rb), 1e-13);
}

TEST(PartialTranspose, MatchesIndexDefinitionAndIsInvolution) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto m = oracle::random_gaussian(rng, 6, 6);
    const DimProfile p({2, 3});
    const std::vector<int> flip{1};
    const auto pt = partial_transpose(m, p, flip);
    EXPECT_LT(dist(pt, oracle::transpose_b(m, 2, 3)), 1e-14);
    EXPECT_LT(dist(partial_transpose(pt, p, flip), m), 1e-14);
  }
  const auto m = oracle::random_gaussian(rng, 12, 12);
  const DimProfile p({2, 3, 2});
  const std::vector<int> all{0, 1, 2};
  EXPECT_LT(dist(partial_transpose(m, p, all), m.transpose()), 1e-14);
}

TEST(PartialTranspose, BellStateHasNegativeEigenvalue) {
  ComplexMatrix v = ComplexMatrix::Zero(4, 1);
  v(0) = v(3) = 1 / std::sqrt(2.0);
  const std::vector<int> flip{1};
  EXPECT_NEAR(min_eigenvalue(partial_transpose(v * v.adjoint(), DimProfile({2, 2}), flip)), -0.5, 1e-12);
}

TEST(PermuteSubsystems, SwapsKroneckerFactors) {
  std::mt19937_64 rng(5);
  const auto a = oracle::random_gaussian(rng, 2, 2);
  const auto b = oracle::random_gaussian(rng, 3, 3);
  const auto c = oracle::random_gaussian(rng, 2, 2);
  const std::vector<int> order{2, 0, 1};
  EXPECT_LT(dist(permute_subsystems(oracle::kron(oracle::kron(a, b), c), DimProfile({2, 3, 2}), order),
                 oracle::kron(oracle::kron(c, a), b)),
            1e-14);
  const auto va = oracle::random_pure(rng, 2), vb = oracle::random_pure(rng, 3);
  const std::vector<int> swap{1, 0};
  EXPECT_LT(dist(permute_subsystems(oracle::kron(va, vb), DimProfile({2, 3}), swap), oracle::kron(vb, va)), 1e-14);
}

TEST(PermuteSubsystems, SwapGateConjugation) {
  std::mt19937_64 rng(6);
  const auto m = oracle::random_gaussian(rng, 4, 4);
  const std::vector<int> swap{1, 0};
  const ComplexMatrix s = gates::swap();
  EXPECT_LT(dist(permute_subsystems(m, DimProfile({2, 2}), swap), s * m * s), 1e-14);
}

TEST(HermEig, ReconstructsAndSorts) {
  std::mt19937_64 rng(7);
  const auto h = oracle::random_hermitian(rng, 5);
  const auto e = herm_eig(h);
  for (int i = 0; i + 1 < 5; ++i) EXPECT_GE(e.values(i), e.values(i + 1));
  const ComplexMatrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LT(dist(rebuilt, h), 1e-12);
  EXPECT_NEAR(max_eigenvalue(h), e.values(0), 1e-14);
  EXPECT_NEAR(min_eigenvalue(h), e.values(4), 1e-14);
  EXPECT_THROW(herm_eig(oracle::random_gaussian(rng, 3, 3)), std::invalid_argument);
}

TEST(HermEig, PauliSpectra) {
  for (const auto& p : {gates::pauli_x(), gates::pauli_y(), gates::pauli_z()}) {
    EXPECT_NEAR(max_eigenvalue(p), 1.0, 1e-14);
    EXPECT_NEAR(min_eigenvalue(p), -1.0, 1e-14);
  }
}

TEST(Schmidt, ProductAndBell) {
  ComplexMatrix v = ComplexMatrix::Zero(4, 1);
  v(0) = 1;
  auto s = schmidt_coefficients(v, 2, 2);
  EXPECT_NEAR(s(0), 1.0, 1e-14);
  EXPECT_NEAR(s(1), 0.0, 1e-14);
  v(0) = v(3) = 1 / std::sqrt(2.0);
  s = schmidt_coefficients(v, 2, 2);
  EXPECT_NEAR(s(0), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(s(1), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_THROW(schmidt_coefficients(2.0 * v, 2, 2), std::invalid_argument);
}

TEST(Schmidt, SquaresMatchReducedSpectrum) {
  std::mt19937_64 rng(8);
  const auto v = oracle::random_pure(rng, 6);
  const auto s = schmidt_coefficients(v, 2, 3);
  const auto e = herm_eig(oracle::trace_b(v * v.adjoint(), 2, 3));
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(s(i) * s(i), e.values(i), 1e-12);
}

TEST(OperatorSchmidt, KnownGates) {
  const auto cnot = operator_schmidt(gates::cnot(), 2, 2).normalized();
  ASSERT_EQ(cnot.size(), 2);
  EXPECT_NEAR(cnot(0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(cnot(1), 1 / std::sqrt(2.0), 1e-12);
  const auto sw = operator_schmidt(gates::swap(), 2, 2).normalized();
  ASSERT_EQ(sw.size(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(sw(i), 0.5, 1e-12);
  // exp(i theta ZZ) = cos(theta) I(x)I + i sin(theta) Z(x)Z.
  const double th = 0.3;
  const auto zz = operator_schmidt(gates::zz(th), 2, 2).normalized();
  ASSERT_EQ(zz.size(), 2);
  EXPECT_NEAR(zz(0), std::cos(th), 1e-12);
  EXPECT_NEAR(zz(1), std::sin(th), 1e-12);
}

TEST(OperatorSchmidt, ToffoliControlSplit) {
  // Toffoli = I (x) (I + CNOT)/2 + Z (x) (I - CNOT)/2 across c1 | c2 t, whose
  // factors have Hilbert-Schmidt norms sqrt(2)*sqrt(3) and sqrt(2)*1.
  const auto t = operator_schmidt(gates::toffoli(), 2, 4).normalized();
  ASSERT_EQ(t.size(), 2);
  EXPECT_NEAR(t(0), std::sqrt(6.0 / 8.0), 1e-12);
  EXPECT_NEAR(t(1), std::sqrt(2.0 / 8.0), 1e-12);
}

TEST(OperatorSchmidt, ReconstructsRandomOperators) {
  std::mt19937_64 rng(9);
  const auto u = oracle::random_unitary(rng, 6);
  const auto os = operator_schmidt(u, 2, 3);
  EXPECT_LT(dist(os.reconstruct(), u), 1e-12);
  for (std::size_t i = 0; i < os.left.size(); ++i)
    for (std::size_t j = 0; j < os.left.size(); ++j) {
      const Complex ip = (os.left[i].adjoint() * os.left[j]).trace();
      EXPECT_NEAR(std::abs(ip), i == j ? 1.0 : 0.0, 1e-12);
    }
  EXPECT_NEAR(os.normalized().squaredNorm(), 1.0, 1e-12);
}

TEST(Gates, BuiltinRoundTrip) {
  for (const std::string s : {"builtin:cnot", "builtin:cz", "builtin:swap", "builtin:toffoli", "builtin:zz(0.39269908169872414)",
                              "builtin:zz(-1e-07)", "builtin:zz(3)"}) {
    const auto g = gates::BuiltinGate::parse(s);
    EXPECT_EQ(g.spec(), s);
    EXPECT_EQ(gates::BuiltinGate::parse(g.spec()).unitary(), g.unitary());
  }
  const double th = 0.1 + 0.2;  // not exactly representable as a short decimal
  const gates::BuiltinGate g{"zz", th};
  EXPECT_EQ(*gates::BuiltinGate::parse(g.spec()).theta, th);
  EXPECT_THROW(gates::BuiltinGate::parse("cnot"), std::invalid_argument);
  EXPECT_THROW(gates::BuiltinGate::parse("builtin:foo"), std::invalid_argument);
  EXPECT_THROW(gates::BuiltinGate::parse("builtin:zz(x)"), std::invalid_argument);
}

TEST(Gates, UnitaryAndDefinitions) {
  for (const auto& u : {gates::cnot(), gates::cz(), gates::swap(), gates::toffoli(), gates::zz(0.7), gates::hadamard()})
    EXPECT_LT(dist(u.adjoint() * u, identity(static_cast<int>(u.rows()))), 1e-14);
  const ComplexMatrix h2 = oracle::kron(identity(2), gates::hadamard());
  EXPECT_LT(dist(h2 * gates::cz() * h2, gates::cnot()), 1e-14);
  const std::vector<int> rev{1, 0};
  // CNOT with control and target exchanged.
  const ComplexMatrix hh = oracle::kron(gates::hadamard(), gates::hadamard());
  EXPECT_LT(dist(gates::permute_qubits(gates::cnot(), rev), hh * gates::cnot() * hh), 1e-14);
}
