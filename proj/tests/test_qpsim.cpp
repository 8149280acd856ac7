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
#include "qpdext/extent.hpp"
#include "qpdext/gates.hpp"
#include "qpdext/philox.hpp"
#include "qpdext/qpsim.hpp"

using namespace qpdext;

namespace {

const ChannelDims kTwo = ChannelDims::bipartite(2, 2);

const Qpd& cnot_qpd() {
  static const Qpd q = *synthesize_qpd_lp(choi_of_unitary(gates::cnot(), kTwo), lo_star_qubit_dictionary()).qpd;
  return q;
}

ComplexMatrix z_on(int n, int q) {
  ComplexMatrix m = identity(1);
  for (int i = 0; i < n; ++i) m = oracle::kron(m, i == q ? gates::pauli_z() : identity(2));
  return m;
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  using P = Philox4x32;
  EXPECT_EQ(P::block({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(P::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(P::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
  const auto u = P::uniforms({1, 2, 3, 4}, P::key_of(99));
  EXPECT_GE(u[0], 0.0);
  EXPECT_LT(u[1], 1.0);
}

TEST(Exact, Examples) {
  Circuit c;
  c.qubit_count = 2;
  c.observable = z_on(2, 0);
  EXPECT_NEAR(exact_expectation(c), 1.0, 1e-12);
  c.ops.push_back(GateOp{gates::hadamard(), {0}});
  EXPECT_NEAR(exact_expectation(c), 0.0, 1e-12);
  c.ops.push_back(GateOp{gates::cnot(), {0, 1}});
  c.observable = oracle::kron(gates::pauli_z(), gates::pauli_z());
  EXPECT_NEAR(exact_expectation(c), 1.0, 1e-12);
}

TEST(Exact, RandomCircuitsMatchStatevector) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 5; ++t) {
    const int n = 3;
    Circuit c;
    c.qubit_count = n;
    ComplexMatrix full = identity(8);
    for (int g = 0; g < 4; ++g) {
      const int q = g % 2;  // adjacent pair (q, q+1)
      const auto u = oracle::random_unitary(rng, 4);
      c.ops.push_back(GateOp{u, {q, q + 1}});
      full = (q == 0 ? oracle::kron(u, identity(2)) : oracle::kron(identity(2), u)) * full;
    }
    c.observable = oracle::random_hermitian(rng, 8);
    const ComplexMatrix psi = full.col(0);
    const double expect = (psi.adjoint() * c.observable * psi)(0, 0).real();
    EXPECT_NEAR(exact_expectation(c), expect, 1e-12);
  }
}

TEST(Circuit, Validation) {
  Circuit c;
  c.qubit_count = 2;
  c.observable = z_on(2, 0);
  c.ops.push_back(GateOp{gates::hadamard(), {2}});
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.ops = {GateOp{2.0 * gates::hadamard(), {0}}};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.ops = {GateOp{gates::cnot(), {0, 0}}};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.ops = {CutOp{cnot_qpd(), {0}, {}}};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.ops = {};
  c.observable = z_on(1, 0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.qubit_count = 11;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  Circuit three;
  three.qubit_count = 3;
  three.observable = z_on(3, 0);
  three.ops = {CutOp{cnot_qpd(), {0}, {1, 2}}};
  EXPECT_THROW(three.validate(), std::invalid_argument);
}

TEST(Estimator, CutChannelExactPathMatchesUncut) {
  Circuit c = bell_cut_circuit(cnot_qpd());
  EXPECT_NEAR(exact_expectation(c), 1.0, 1e-12);
}

TEST(Estimator, DegenerateQpdReproducesExactPerShot) {
  const auto target = choi_of_unitary(gates::cnot(), kTwo);
  const Qpd trivial{target, {QpdTerm(1.0, target)}};
  const Circuit c = bell_cut_circuit(trivial);
  const double exact = exact_expectation(c);
  for (double v : qps_shot_values(c, 0, 1000, 5)) EXPECT_NEAR(v, exact, 1e-9);
  const auto r = qps_estimate(c, 1000, 123);
  EXPECT_NEAR(r.estimate, exact, 1e-9);
  EXPECT_DOUBLE_EQ(r.l1_product, 1.0);
}

TEST(Estimator, DeterministicAndOrderIndependent) {
  const Circuit c = bell_cut_circuit(cnot_qpd());
  EstimatorOptions par, ser;
  ser.parallel = false;
  for (auto mode : {TrajectoryMode::linear, TrajectoryMode::sampled}) {
    par.mode = ser.mode = mode;
    const auto a = qps_estimate(c, 50000, 17, par);
    const auto b = qps_estimate(c, 50000, 17, par);
    const auto s = qps_estimate(c, 50000, 17, ser);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, s);
    EXPECT_NE(a.estimate, qps_estimate(c, 50000, 18, par).estimate);
  }
  // Shot k does not depend on how many shots precede it in the call.
  const auto all = qps_shot_values(c, 0, 100, 9);
  const auto tail = qps_shot_values(c, 60, 40, 9);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(all[60 + i], tail[i]);
}

TEST(Estimator, ShotValuesBoundedAndUnbiased) {
  const Circuit c = bell_cut_circuit(cnot_qpd());
  for (auto mode : {TrajectoryMode::linear, TrajectoryMode::sampled}) {
    EstimatorOptions o;
    o.mode = mode;
    const auto r = qps_estimate(c, 200000, 77, o);
    EXPECT_NEAR(r.l1_product, 3.0, 1e-9);
    EXPECT_NEAR(r.observable_norm, 1.0, 1e-12);
    EXPECT_LE(r.max_abs_value, r.l1_product * r.observable_norm * (1 + 1e-12));
    EXPECT_LE(std::abs(r.estimate - 1.0), 5 * r.empirical_stderr);
    EXPECT_GT(r.empirical_stderr, 0.0);
  }
}

TEST(Estimator, CutNormsMultiply) {
  const Circuit c = cnot_chain_circuit(2, cnot_qpd());
  const auto r = qps_estimate(c, 10, 1);
  EXPECT_NEAR(r.l1_product, 9.0, 1e-9);
}

TEST(Estimator, RejectsInvalidQpd) {
  const auto target = choi_of_unitary(gates::cnot(), kTwo);
  const Qpd wrong{target, {QpdTerm(1.0, choi_of_unitary(identity(4), kTwo))}};
  EXPECT_THROW(qps_estimate(bell_cut_circuit(wrong), 10, 1), std::invalid_argument);
  EXPECT_THROW(qps_estimate(bell_cut_circuit(cnot_qpd()), 0, 1), std::invalid_argument);
}

TEST(ShotsNeeded, Formula) {
  EXPECT_EQ(shots_needed(1.0, 2.0 / std::exp(2.0), 1.0), 4);
  EXPECT_EQ(shots_needed(0.1, 0.05, 3.0), 6640);
  for (double l1 : {1.0, 1.7, 3.0, 10.0}) {
    const auto a = shots_needed(0.05, 0.01, l1), b = shots_needed(0.05, 0.01, 2 * l1);
    EXPECT_LE(std::abs(static_cast<double>(b) - 4.0 * static_cast<double>(a)), 4.0);
  }
  EXPECT_THROW(shots_needed(0.0, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(shots_needed(0.1, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(shots_needed(0.1, 1.5, 1.0), std::invalid_argument);
  EXPECT_THROW(shots_needed(0.1, 0.1, 0.5), std::invalid_argument);
}

TEST(Sweep, NormsAndSlope) {
  const std::vector<int> ns{0, 1, 2, 3};
  EstimatorOptions o;
  o.mode = TrajectoryMode::sampled;
  const auto rows = overhead_sweep([](int n) { return cnot_chain_circuit(n, cnot_qpd()); }, ns, 50000, 3, o);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(rows[0].l1_product, 1.0, 1e-12);
  EXPECT_NEAR(rows[1].l1_product, 3.0, 1e-9);
  EXPECT_NEAR(rows[2].l1_product, 9.0, 1e-9);
  EXPECT_NEAR(rows[3].l1_product, 27.0, 1e-9);
  // Z on |+>: bare shot noise is 1.
  EXPECT_NEAR(rows[0].variance, 1.0, 0.02);
  EXPECT_NEAR(log_variance_slope(rows), 2 * std::log(3.0), 0.15 * 2 * std::log(3.0));
}

TEST(Sweep, SlopeOfExactData) {
  std::vector<SweepRow> rows;
  for (int n = 0; n < 4; ++n) rows.push_back({n, std::pow(3.0, n), 0.0, std::pow(9.0, n), 0.0, 1});
  EXPECT_NEAR(log_variance_slope(rows), std::log(9.0), 1e-12);
}
