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
#include "qpdext/kernels.hpp"
#include "qpdext/sdp.hpp"

using namespace qpdext;

namespace {

SymSparse upper(const RealMatrix& m) {
  SymSparse out;
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r <= c; ++r)
      if (m(r, c) != 0.0) out.push_back({r, c, m(r, c)});
  return out;
}

RealMatrix random_sym(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  RealMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

RealMatrix random_pd(std::mt19937_64& rng, int n) {
  const RealMatrix g = random_sym(rng, n);
  return g * g.transpose() + 0.5 * RealMatrix::Identity(n, n);
}

double inner(const RealMatrix& a, const RealMatrix& b) { return (a.array() * b.array()).sum(); }

}  // namespace

TEST(Sdp, SimpleLp) {
  // min x s.t. x - s = 3, x, s >= 0.
  SdpProblem p;
  p.blocks = {{BlockKind::nonneg, 2}};
  p.objective = {{{0, 0, 1.0}}};
  p.constraints = {{{{0, {{0, 0, 1.0}, {1, 1, -1.0}}}}, 3.0}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.primal_objective, 3.0, 1e-6);
  EXPECT_NEAR(s.dual(0), 1.0, 1e-6);
}

TEST(Sdp, MinEigenvalue) {
  // min <A, X> s.t. tr X = 1, X >= 0 equals the smallest eigenvalue of A.
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    const int n = 3 + t;
    const RealMatrix a = random_sym(rng, n);
    SdpProblem p;
    p.blocks = {{BlockKind::psd, n}};
    p.objective = {upper(a)};
    p.constraints = {{{{0, upper(RealMatrix::Identity(n, n))}}, 1.0}};
    const auto s = solve(p);
    ASSERT_EQ(s.status, SdpStatus::optimal);
    const double expect = Eigen::SelfAdjointEigenSolver<RealMatrix>(a).eigenvalues()(0);
    EXPECT_NEAR(s.dual_objective, expect, 1e-6);
    EXPECT_NEAR(s.primal_objective, expect, 1e-6);
  }
}

TEST(Sdp, TwoByTwoMaxCut) {
  // min <[[0,1],[1,0]], X> with unit diagonal: X = [[1,-1],[-1,1]], value -2.
  RealMatrix c(2, 2);
  c << 0, 1, 1, 0;
  SdpProblem p;
  p.blocks = {{BlockKind::psd, 2}};
  p.objective = {upper(c)};
  p.constraints = {{{{0, {{0, 0, 1.0}}}}, 1.0}, {{{0, {{1, 1, 1.0}}}}, 1.0}};
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.primal_objective, -2.0, 1e-6);
  EXPECT_NEAR(s.primal[0](0, 1), -1.0, 1e-4);
}

TEST(Sdp, DetectsPrimalInfeasibility) {
  SdpProblem p;
  p.blocks = {{BlockKind::nonneg, 1}};
  p.objective = {{{0, 0, 1.0}}};
  p.constraints = {{{{0, {{0, 0, 1.0}}}}, -1.0}};
  EXPECT_EQ(solve(p).status, SdpStatus::infeasible);
}

TEST(Sdp, UnboundedIsNotOptimal) {
  // min -x s.t. x - s = 0: unbounded below.
  SdpProblem p;
  p.blocks = {{BlockKind::nonneg, 2}};
  p.objective = {{{0, 0, -1.0}}};
  p.constraints = {{{{0, {{0, 0, 1.0}, {1, 1, -1.0}}}}, 0.0}};
  EXPECT_NE(solve(p).status, SdpStatus::optimal);
}

// Weak duality on random strictly feasible instances: every dual-feasible y
// bounds every primal-feasible X, and the solver's pair satisfies
// <C, X> - b^T y = <X, Z> >= 0.
TEST(Sdp, WeakDualityProperty) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 8; ++t) {
    const int n = 4 + t % 3, m = 3 + t % 4;
    const RealMatrix x0 = random_pd(rng, n), z0 = random_pd(rng, n);
    std::vector<RealMatrix> a(m);
    RealVector y0(m);
    std::normal_distribution<double> g;
    SdpProblem p;
    p.blocks = {{BlockKind::psd, n}, {BlockKind::nonneg, 2}};
    RealMatrix c = z0;
    RealVector lp_x(2), lp_z(2), lp_c(2);
    lp_x << 1.0, 2.0;
    lp_z << 0.5, 1.5;
    lp_c = lp_z;
    for (int i = 0; i < m; ++i) {
      a[i] = random_sym(rng, n);
      y0(i) = g(rng);
      const double l0 = g(rng), l1 = g(rng);
      c += y0(i) * a[i];
      lp_c(0) += y0(i) * l0;
      lp_c(1) += y0(i) * l1;
      const double b = inner(a[i], x0) + l0 * lp_x(0) + l1 * lp_x(1);
      p.constraints.push_back({{{0, upper(a[i])}, {1, {{0, 0, l0}, {1, 1, l1}}}}, b});
    }
    p.objective = {upper(c), {{0, 0, lp_c(0)}, {1, 1, lp_c(1)}}};
    const auto s = solve(p);
    ASSERT_EQ(s.status, SdpStatus::optimal) << "instance " << t;
    const double b_y0 = [&] {
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += y0(i) * p.constraints[i].rhs;
      return v;
    }();
    const double c_x0 = inner(c, x0) + lp_c.dot(lp_x);
    EXPECT_GE(c_x0, b_y0);  // the planted pair
    EXPECT_GE(c_x0, s.dual_objective - 1e-7 * (1 + std::abs(c_x0)));
    EXPECT_LE(b_y0, s.primal_objective + 1e-7 * (1 + std::abs(b_y0)));
    const double xz = inner(s.primal[0], s.slack[0]) + s.primal[1].col(0).dot(s.slack[1].col(0));
    EXPECT_GE(xz, -1e-10);
    EXPECT_NEAR(s.gap, s.primal_objective - s.dual_objective, 1e-12);
    EXPECT_GE(s.gap, -1e-7 * (1 + std::abs(s.primal_objective)));
  }
}

TEST(Sdp, SerialAndParallelAgree) {
  std::mt19937_64 rng(23);
  const RealMatrix a = random_sym(rng, 6);
  SdpProblem p;
  p.blocks = {{BlockKind::psd, 6}};
  p.objective = {upper(a)};
  p.constraints = {{{{0, upper(RealMatrix::Identity(6, 6))}}, 1.0}};
  SdpOptions serial;
  serial.parallel = false;
  const auto s1 = solve(p), s2 = solve(p, serial);
  EXPECT_EQ(s1.iterations, s2.iterations);
  EXPECT_EQ(s1.primal_objective, s2.primal_objective);
}

TEST(Sdp, ValidateRejectsBadReferences) {
  SdpProblem p;
  p.blocks = {{BlockKind::nonneg, 2}};
  p.objective = {{}};
  p.constraints = {{{{1, {{0, 0, 1.0}}}}, 1.0}};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.constraints = {{{{0, {{0, 1, 1.0}}}}, 1.0}};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.constraints = {{{{0, {{0, 2, 1.0}}}}, 1.0}};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Realify, SpectrumIsDoubled) {
  std::mt19937_64 rng(24);
  const auto h = oracle::random_hermitian(rng, 4);
  const RealMatrix r = realify(h);
  const RealVector ev = Eigen::SelfAdjointEigenSolver<RealMatrix>(r).eigenvalues();
  const RealVector hv = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h).eigenvalues();
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ev(2 * i), hv(i), 1e-12);
    EXPECT_NEAR(ev(2 * i + 1), hv(i), 1e-12);
  }
  RealMatrix dense = RealMatrix::Zero(8, 8);
  for (const auto& e : realify_sparse(hermitian_entries(h), 4)) {
    dense(e.row, e.col) = e.value;
    dense(e.col, e.row) = e.value;
  }
  EXPECT_LT((dense - r).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kernels, SchurSerialMatchesParallelBitwise) {
  std::mt19937_64 rng(25);
  const int n = 10, m = 30;
  std::vector<SymSparse> mats(m);
  for (auto& s : mats) s = upper(random_sym(rng, n));
  std::vector<kernels::BlockConstraint> parts;
  for (int i = 0; i < m; ++i) parts.push_back({i, &mats[i]});
  const RealMatrix x = random_pd(rng, n), zi = random_pd(rng, n);
  RealMatrix a = RealMatrix::Zero(m, m), b = RealMatrix::Zero(m, m);
  kernels::schur_psd_block_serial(parts, x, zi, a);
  kernels::schur_psd_block(parts, x, zi, b);
  EXPECT_EQ(a, b);
  // Dense oracle for a few entries.
  auto dense = [&](int i) {
    RealMatrix d = RealMatrix::Zero(n, n);
    for (const auto& e : mats[i]) d(e.row, e.col) = d(e.col, e.row) = e.value;
    return d;
  };
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) EXPECT_NEAR(a(i, j), (dense(i) * x * dense(j) * zi).trace(), 1e-9 * (1 + std::abs(a(i, j))));
}

TEST(Kernels, ApplySuperopMatchesOracle) {
  std::mt19937_64 rng(26);
  const int nq = 5;
  const auto rho = oracle::random_density(rng, 1 << nq, 4);
  const auto u = oracle::random_unitary(rng, 4);
  const ComplexMatrix s = oracle::kron(u, u.conjugate());
  const std::vector<int> targets{3, 1};
  const auto serial = kernels::apply_superop_serial(rho, nq, targets, s);
  EXPECT_EQ(serial, kernels::apply_superop(rho, nq, targets, s));
  // Full unitary: u on (q3, q1) via an explicit permutation of basis labels.
  const int dim = 1 << nq;
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  auto bit = [&](int x, int q) { return (x >> (nq - 1 - q)) & 1; };
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      bool same = true;
      for (int q : {0, 2, 4}) same = same && bit(r, q) == bit(c, q);
      if (!same) continue;
      full(r, c) = u(bit(r, 3) * 2 + bit(r, 1), bit(c, 3) * 2 + bit(c, 1));
    }
  EXPECT_LT((serial - full * rho * full.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
}
