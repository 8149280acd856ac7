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

#include "qpdext/extent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qpdext/gates.hpp"

namespace qpdext {

std::string to_string(ExtentMethod m) {
  switch (m) {
    case ExtentMethod::analytic: return "analytic";
    case ExtentMethod::sdp: return "sdp";
    case ExtentMethod::lp: return "lp";
  }
  return "unknown";
}

namespace {

double normalized_l1(std::span<const double> c, const char* who) {
  double sq = 0.0, l1 = 0.0;
  for (double x : c) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string(who) + ": coefficients must be finite and nonnegative");
    sq += x * x;
    l1 += x;
  }
  if (c.empty() || std::abs(sq - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": coefficients are not normalized (sum of squares " +
                                std::to_string(sq) + ")");
  return l1;
}

// Full (both triangles) sparse Hermitian matrix.
struct CEntry {
  int row;
  int col;
  Complex value;
};
using HermList = std::vector<CEntry>;

// Units E_pp, E_pq + E_qp and i E_pq - i E_qp.
std::vector<HermList> hermitian_units(int d) {
  std::vector<HermList> out;
  for (int p = 0; p < d; ++p) out.push_back({{p, p, 1.0}});
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) {
      out.push_back({{p, q, 1.0}, {q, p, 1.0}});
      out.push_back({{p, q, Complex(0, 1)}, {q, p, Complex(0, -1)}});
    }
  return out;
}

// Traceless Hermitian units: E_00 - E_kk and the off-diagonal units.
std::vector<HermList> traceless_units(int d) {
  std::vector<HermList> out;
  for (int k = 1; k < d; ++k) out.push_back({{0, 0, 1.0}, {k, k, -1.0}});
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) {
      out.push_back({{p, q, 1.0}, {q, p, 1.0}});
      out.push_back({{p, q, Complex(0, 1)}, {q, p, Complex(0, -1)}});
    }
  return out;
}

std::vector<HermEntry> upper_of(const HermList& h) {
  std::vector<HermEntry> out;
  for (const auto& e : h)
    if (e.row <= e.col) out.push_back({e.row, e.col, e.value});
  return out;
}

SymSparse negated(SymSparse s) {
  for (auto& e : s) e.value = -e.value;
  return s;
}

SymSparse dense_upper(const RealMatrix& m, double scale = 1.0) {
  SymSparse out;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r <= c; ++r)
      if (m(r, c) != 0.0) out.push_back({static_cast<int>(r), static_cast<int>(c), scale * m(r, c)});
  return out;
}

ComplexMatrix unrealify(const RealMatrix& m) {
  const Eigen::Index n = m.rows() / 2;
  const RealMatrix re = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
  const RealMatrix im = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
  ComplexMatrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

ExtentResiduals residuals_of(const SdpSolution& s, int free_vars) {
  ExtentResiduals r;
  r.status = s.status;
  r.primal_objective = s.primal_objective;
  r.dual_objective = s.dual_objective;
  r.gap = s.gap;
  r.primal_infeasibility = s.primal_infeasibility;
  r.dual_infeasibility = s.dual_infeasibility;
  r.iterations = s.iterations;
  r.free_vars = free_vars;
  return r;
}

void check_caps(int hermitian_dim, int free_vars) {
  if (2 * hermitian_dim > kMaxRealBlock)
    throw std::invalid_argument("problem too large: realified block size " +
                                std::to_string(2 * hermitian_dim) + " exceeds the cap of " +
                                std::to_string(kMaxRealBlock));
  if (free_vars > kMaxFreeVars)
    throw std::invalid_argument("problem too large: " + std::to_string(free_vars) +
                                " variables exceed the cap of " + std::to_string(kMaxFreeVars));
}

// Index of |in><in'| (x) |out><out'| in the (A, A', B, B') Choi ordering,
// with in = (a, b) and out = (a', b').
struct ChoiIndexer {
  ChannelDims d;
  int full(int in, int out) const {
    const int ia = in / d.b, ib = in % d.b;
    const int oa = out / d.bp, ob = out % d.bp;
    return ((ia * d.ap + oa) * d.b + ib) * d.bp + ob;
  }
  // Transpose of B and B' jointly.
  std::pair<int, int> pt(int r, int c) const {
    const int bb = d.b * d.bp;
    const int r_hi = r / bb, r_lo = r % bb;
    const int c_hi = c / bb, c_lo = c % bb;
    return {r_hi * bb + c_lo, c_hi * bb + r_lo};
  }
};

}  // namespace

double pure_state_extent(std::span<const double> schmidt) {
  const double l1 = normalized_l1(schmidt, "pure_state_extent");
  return 2.0 * l1 * l1 - 1.0;
}

double kak_unitary_extent(std::span<const double> u) {
  normalized_l1(u, "kak_unitary_extent");
  double cross = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    for (std::size_t l = 0; l < u.size(); ++l)
      if (k != l) cross += u[k] * u[l];
  return 1.0 + 2.0 * cross;
}

ExtentResult gamma_ppt_channel(const ChoiChannel& e, const SdpOptions& opts) {
  const ChannelDims d = e.dims();
  const int n = d.total();
  const int din = d.in(), dout = d.out();
  const int free_vars = 1 + din * din * (dout * dout - 1);
  check_caps(n, free_vars);
  if (!is_hp(e)) throw std::invalid_argument("gamma_ppt_channel: map is not Hermitian preserving");
  if (!is_tp(e)) throw std::invalid_argument("gamma_ppt_channel: map is not trace preserving");

  const ChoiIndexer idx{d};
  const ComplexMatrix j = e.choi_unnormalized();
  const ComplexMatrix j_pt = partial_transpose(j, d.choi_profile(), std::vector<int>{2, 3});

  // X = c 1/d_out + sum_k x_k B_k with B_k = (in unit) (x) (traceless out unit),
  // so tr_{A'B'} X = c 1 holds by construction.
  SdpProblem p;
  p.blocks = {{BlockKind::psd, 2 * n}, {BlockKind::psd, 2 * n}, {BlockKind::psd, 2 * n},
              {BlockKind::nonneg, 1}};
  p.objective = {negated(dense_upper(realify(j))), {}, negated(dense_upper(realify(j_pt))), {}};

  auto add_variable = [&](const HermList& x, double rhs, bool with_sign_block) {
    HermList x_pt;
    x_pt.reserve(x.size());
    for (const auto& en : x) {
      const auto [r, c] = idx.pt(en.row, en.col);
      x_pt.push_back({r, c, en.value});
    }
    const SymSparse a = negated(realify_sparse(upper_of(x), n));
    const SymSparse a_pt = negated(realify_sparse(upper_of(x_pt), n));
    Constraint con;
    con.rhs = rhs;
    con.parts = {{0, a}, {1, a_pt}, {2, a_pt}};
    if (with_sign_block) con.parts.push_back({3, {{0, 0, -1.0}}});
    p.constraints.push_back(std::move(con));
  };

  {
    HermList c_term;
    for (int r = 0; r < n; ++r) c_term.push_back({r, r, 1.0 / dout});
    add_variable(c_term, -2.0, true);
  }
  const auto in_units = hermitian_units(din);
  const auto out_units = traceless_units(dout);
  for (const auto& hu : in_units)
    for (const auto& gu : out_units) {
      HermList x;
      for (const auto& a : hu)
        for (const auto& b : gu) x.push_back({idx.full(a.row, b.row), idx.full(a.col, b.col), a.value * b.value});
      add_variable(x, 0.0, false);
    }

  const SdpSolution s = solve(p, opts);
  ExtentResult out;
  out.method = ExtentMethod::sdp;
  out.residuals = residuals_of(s, p.free_var_count());
  if (s.status != SdpStatus::optimal) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.certified_lower = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  // The extent of a trace-preserving map is at least 1.
  out.value = std::max(1.0, 2.0 * s.dual(0) - 1.0);
  out.certified_lower = -s.primal_objective - 1.0;
  for (int b = 0; b < 3; ++b) out.multipliers.push_back(unrealify(s.primal[b]));
  return out;
}

ExtentResult gamma_ppt_state(const ComplexMatrix& rho, int d_a, int d_b, const SdpOptions& opts) {
  if (d_a < 1 || d_b < 1) throw std::invalid_argument("gamma_ppt_state: dimensions must be positive");
  const int n = d_a * d_b;
  if (rho.rows() != n || rho.cols() != n)
    throw std::invalid_argument("gamma_ppt_state: state size does not match the split");
  if (!all_finite(rho) || !is_hermitian(rho, 1e-8))
    throw std::invalid_argument("gamma_ppt_state: state is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-8)
    throw std::invalid_argument("gamma_ppt_state: state does not have unit trace");
  const ComplexMatrix rho_h = 0.5 * (rho + rho.adjoint());
  if (min_eigenvalue(rho_h) < -1e-8) throw std::invalid_argument("gamma_ppt_state: state is not PSD");
  check_caps(n, n * n);

  const DimProfile prof({d_a, d_b});
  const ComplexMatrix rho_pt = partial_transpose(rho_h, prof, std::vector<int>{1});

  SdpProblem p;
  p.blocks = {{BlockKind::psd, 2 * n}, {BlockKind::psd, 2 * n}, {BlockKind::psd, 2 * n}};
  p.objective = {{}, {}, dense_upper(realify(rho_pt))};
  for (const auto& u : hermitian_units(n)) {
    HermList u_pt;
    Complex tr = 0.0;
    for (const auto& en : u) {
      const int ra = en.row / d_b, rb = en.row % d_b, ca = en.col / d_b, cb = en.col % d_b;
      u_pt.push_back({ra * d_b + cb, ca * d_b + rb, en.value});
      if (en.row == en.col) tr += en.value;
    }
    const SymSparse a = negated(realify_sparse(upper_of(u), n));
    const SymSparse a_pt = negated(realify_sparse(upper_of(u_pt), n));
    p.constraints.push_back({{{0, a}, {1, a_pt}, {2, a_pt}}, -tr.real()});
  }

  const SdpSolution s = solve(p, opts);
  ExtentResult out;
  out.method = ExtentMethod::sdp;
  out.residuals = residuals_of(s, p.free_var_count());
  if (s.status != SdpStatus::optimal) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.certified_lower = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.value = std::max(1.0, 1.0 - 2.0 * s.dual_objective);
  out.certified_lower = 1.0 - 2.0 * s.primal_objective;
  for (int b = 0; b < 3; ++b) out.multipliers.push_back(unrealify(s.primal[b]));
  return out;
}

ChoiChannel DictionaryEntry::effective_map() const {
  if (outcomes.empty()) throw std::invalid_argument("dictionary entry '" + label + "' has no outcomes");
  ChoiChannel s = ChoiChannel::zero(outcomes.front().map.dims());
  for (const auto& o : outcomes) s += o.b() * o.map;
  return s;
}

void Dictionary::validate(double tol) const {
  if (entries.empty()) throw std::invalid_argument("dictionary '" + name + "' is empty");
  for (const auto& e : entries) {
    if (e.outcomes.empty()) throw std::invalid_argument("dictionary entry '" + e.label + "' has no outcomes");
    ChoiChannel sum = ChoiChannel::zero(dims);
    for (const auto& o : e.outcomes) {
      if (!(o.map.dims() == dims))
        throw std::invalid_argument("dictionary entry '" + e.label + "' does not match the dictionary split");
      if (o.b() < -1.0 || o.b() > 1.0)
        throw std::invalid_argument("dictionary entry '" + e.label + "' has a side weight outside [-1, 1]");
      if (!is_cp(o.map, tol)) throw std::invalid_argument("dictionary entry '" + e.label + "' is not CP");
      sum += o.map;
    }
    if (!is_tn(sum, tol))
      throw std::invalid_argument("dictionary entry '" + e.label + "' is not trace nonincreasing");
  }
}

Dictionary lo_star_qubit_dictionary() {
  using namespace gates;
  const ChannelDims local = ChannelDims::local(2, 2);
  struct Factor {
    std::string label;
    std::vector<WeightedMap> outcomes;
  };
  std::vector<Factor> factors;

  const ComplexMatrix paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
  const char* names[3] = {"X", "Y", "Z"};
  factors.push_back({"I", {{choi_of_unitary(identity(2), local), std::nullopt}}});
  for (int k = 0; k < 3; ++k)
    factors.push_back({names[k], {{choi_of_unitary(paulis[k], local), std::nullopt}}});
  for (int k = 0; k < 3; ++k)
    for (int s : {1, -1})
      factors.push_back({std::string(s > 0 ? "R+" : "R-") + names[k],
                         {{choi_of_unitary(pauli_exp(paulis[k], s * std::numbers::pi / 4), local), std::nullopt}}});

  // Eigenstates |+P> and |-P> for P = X, Y, Z.
  std::vector<std::pair<std::string, ComplexMatrix>> states;
  for (int k = 0; k < 3; ++k) {
    const HermEig eig = herm_eig(paulis[k]);
    states.push_back({std::string("+") + names[k], eig.vectors.col(0)});
    states.push_back({std::string("-") + names[k], eig.vectors.col(1)});
  }
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix plus = states[2 * k].second * states[2 * k].second.adjoint();
    const ComplexMatrix minus = states[2 * k + 1].second * states[2 * k + 1].second.adjoint();
    factors.push_back({std::string("M") + names[k],
                       {{choi_of_kraus({plus}, local), 1.0}, {choi_of_kraus({minus}, local), -1.0}}});
  }
  for (const auto& [lv, v] : states)
    for (const auto& [lw, w] : states)
      factors.push_back({"P" + lv + ">" + lw, {{choi_of_kraus({w * v.adjoint()}, local), std::nullopt}}});

  Dictionary dict;
  dict.name = "lo-star";
  dict.dims = ChannelDims::bipartite(2, 2);
  for (const auto& fa : factors)
    for (const auto& fb : factors) {
      DictionaryEntry e;
      e.label = fa.label + "|" + fb.label;
      for (const auto& oa : fa.outcomes)
        for (const auto& ob : fb.outcomes) {
          std::optional<double> w;
          if (oa.weight || ob.weight) w = oa.b() * ob.b();
          e.outcomes.push_back({ChoiChannel(kron(oa.map.choi(), ob.map.choi()), dict.dims), w});
        }
      dict.entries.push_back(std::move(e));
    }
  return dict;
}

namespace {

// Real coordinates of a Hermitian matrix: Re of all entries, then Im of all entries.
RealVector hermitian_coords(const ComplexMatrix& m) {
  const Eigen::Index s = m.size();
  RealVector v(2 * s);
  for (Eigen::Index i = 0; i < s; ++i) {
    v(i) = m.data()[i].real();
    v(s + i) = m.data()[i].imag();
  }
  return v;
}

}  // namespace

ExtentResult synthesize_qpd_lp(const ChoiChannel& target, const Dictionary& dict, const SdpOptions& opts) {
  if (!(target.dims() == dict.dims))
    throw std::invalid_argument("synthesize_qpd_lp: target split does not match the dictionary");
  dict.validate();
  const int k_count = static_cast<int>(dict.entries.size());

  std::vector<ChoiChannel> maps;
  maps.reserve(k_count);
  for (const auto& e : dict.entries) maps.push_back(e.effective_map());
  const RealVector t = hermitian_coords(target.choi());
  RealMatrix f(t.size(), k_count);
  for (int k = 0; k < k_count; ++k) f.col(k) = hermitian_coords(maps[k].choi());

  ExtentResult out;
  out.method = ExtentMethod::lp;

  // Independent equality rows: project onto an orthonormal basis of range(F).
  const Eigen::BDCSVD<RealMatrix> svd(f, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const RealMatrix q = svd.matrixU().leftCols(rank);
  const double outside = (t - q * (q.transpose() * t)).norm();
  if (rank == 0 || outside > 1e-8 * std::max(1.0, t.norm())) {
    out.residuals.status = SdpStatus::infeasible;
    out.residuals.primal_infeasibility = outside;
    out.value = std::numeric_limits<double>::infinity();
    out.certified_lower = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const RealMatrix a_red = q.transpose() * f;
  const RealVector t_red = q.transpose() * t;

  // x = (a+, a-) >= 0, min sum x.
  SdpProblem p;
  p.blocks = {{BlockKind::nonneg, 2 * k_count}};
  SymSparse ones;
  for (int i = 0; i < 2 * k_count; ++i) ones.push_back({i, i, 1.0});
  p.objective = {ones};
  for (int r = 0; r < rank; ++r) {
    SymSparse row;
    for (int k = 0; k < k_count; ++k) {
      const double v = a_red(r, k);
      if (v == 0.0) continue;
      row.push_back({k, k, v});
      row.push_back({k_count + k, k_count + k, -v});
    }
    p.constraints.push_back({{{0, row}}, t_red(r)});
  }

  const SdpSolution s = solve(p, opts);
  out.residuals = residuals_of(s, p.free_var_count());
  if (s.status != SdpStatus::optimal) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.certified_lower = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  RealVector a(k_count);
  for (int k = 0; k < k_count; ++k) a(k) = s.primal[0](k, 0) - s.primal[0](k_count + k, 0);
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  std::vector<int> support;
  for (int k = 0; k < k_count; ++k)
    if (std::abs(a(k)) > 1e-7 * scale) support.push_back(k);

  // Least-norm correction on the support so the reconstruction is exact.
  RealMatrix f_s(f.rows(), support.size());
  RealVector a_s(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    f_s.col(i) = f.col(support[i]);
    a_s(i) = a(support[i]);
  }
  const Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(f_s);
  a_s += cod.solve(t - f_s * a_s);

  Qpd qpd;
  qpd.target = target;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto& e = dict.entries[support[i]];
    qpd.terms.emplace_back(a_s(i), e.outcomes);
    out.labels.push_back(e.label);
  }
  const QpdReport rep = qpd_validate(qpd, 1e-7);
  out.residuals.reconstruction_error = rep.reconstruction_error;
  out.value = rep.l1;
  out.certified_lower = s.dual_objective;
  out.qpd = std::move(qpd);
  return out;
}

ComplexMatrix maximally_entangled_probe(const ChannelDims& dims) {
  auto phi = [](int d) {
    ComplexMatrix v = ComplexMatrix::Zero(d * d, 1);
    for (int i = 0; i < d; ++i) v(i * d + i, 0) = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
  };
  return kron(phi(dims.a), phi(dims.b));
}

double state_based_lower_bound(const ChoiChannel& u, const ComplexMatrix& probe, int anc_a, int anc_b) {
  const ChannelDims d = u.dims();
  if (anc_a < 1 || anc_b < 1) throw std::invalid_argument("state_based_lower_bound: ancilla dimensions must be positive");
  const int n = d.a * anc_a * d.b * anc_b;
  ComplexMatrix v;
  if (probe.cols() == 1) {
    if (probe.rows() != n) throw std::invalid_argument("state_based_lower_bound: probe size mismatch");
    if (std::abs(probe.norm() - 1.0) > 1e-8) throw std::invalid_argument("state_based_lower_bound: probe is not normalized");
    v = probe;
  } else {
    if (probe.rows() != n || probe.cols() != n)
      throw std::invalid_argument("state_based_lower_bound: probe size mismatch");
    if (!is_hermitian(probe, 1e-8) || std::abs(probe.trace() - Complex(1.0)) > 1e-8)
      throw std::invalid_argument("state_based_lower_bound: probe is not a density matrix");
    const HermEig eig = herm_eig(0.5 * (probe + probe.adjoint()));
    if (eig.values(0) < 1.0 - 1e-8) throw std::invalid_argument("state_based_lower_bound: probe is not pure");
    v = eig.vectors.col(0);
  }
  const RealVector sc = schmidt_coefficients(v / v.norm(), d.a * anc_a, d.b * anc_b);
  if (sc.size() > 1 && sc(1) > 1e-6)
    throw std::invalid_argument("state_based_lower_bound: probe is not a product state");

  const int din = d.in(), dout = d.out(), danc = anc_a * anc_b;
  const std::vector<int> swap_mid{0, 2, 1, 3};
  const ComplexMatrix w = permute_subsystems(v, DimProfile({d.a, anc_a, d.b, anc_b}), swap_mid);
  const ComplexMatrix rho = w * w.adjoint();
  const ComplexMatrix jio = u.choi_input_output() * static_cast<double>(din);
  ComplexMatrix sigma = ComplexMatrix::Zero(dout * danc, dout * danc);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j)
      sigma += kron(jio.block(i * dout, j * dout, dout, dout), rho.block(i * danc, j * danc, danc, danc));
  sigma = permute_subsystems(sigma, DimProfile({d.ap, d.bp, anc_a, anc_b}), swap_mid);

  const HermEig eig = herm_eig(0.5 * (sigma + sigma.adjoint()));
  if (std::abs(sigma.trace() - Complex(1.0)) > 1e-8 || eig.values(0) < 1.0 - 1e-8)
    throw std::invalid_argument("state_based_lower_bound: output is not pure; the channel must be unitary");
  const RealVector out_sc = schmidt_coefficients(eig.vectors.col(0), d.ap * anc_a, d.bp * anc_b);
  const std::vector<double> coeffs(out_sc.data(), out_sc.data() + out_sc.size());
  return pure_state_extent(coeffs);
}

}  // namespace qpdext
