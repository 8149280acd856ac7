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

#include "qpdext/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qpdext {

namespace {

// (A, A', B, B') <-> (A, B, A', B') is its own inverse.
constexpr std::array<int, 4> kSwapMiddle{0, 2, 1, 3};
constexpr std::array<int, 2> kInputSystems{0, 2};
constexpr std::array<int, 2> kBobSystems{2, 3};

void require_same_dims(const ChoiChannel& a, const ChoiChannel& b, const char* what) {
  if (!(a.dims() == b.dims()))
    throw std::invalid_argument(std::string(what) + ": channel dimensions differ");
}

}  // namespace

ChoiChannel::ChoiChannel(ComplexMatrix choi, ChannelDims dims, ChoiNormalization norm)
    : choi_(std::move(choi)), dims_(dims) {
  if (dims.a < 1 || dims.ap < 1 || dims.b < 1 || dims.bp < 1)
    throw std::invalid_argument("ChoiChannel: dimensions must be >= 1");
  if (choi_.rows() != dims.total() || choi_.cols() != dims.total())
    throw std::invalid_argument("ChoiChannel: Choi dimension " +
                                std::to_string(choi_.rows()) + " does not match " +
                                std::to_string(dims.total()));
  if (!all_finite(choi_)) throw std::invalid_argument("ChoiChannel: non-finite entries");
  if (!is_hermitian(choi_))
    throw std::invalid_argument("ChoiChannel: Choi operator is not Hermitian within 1e-10");
  if (norm == ChoiNormalization::trace_din) choi_ /= static_cast<double>(dims.in());
}

ChoiChannel ChoiChannel::from_input_output(const ComplexMatrix& j_io, ChannelDims dims) {
  const DimProfile io({dims.a, dims.b, dims.ap, dims.bp});
  if (j_io.rows() != io.total())
    throw std::invalid_argument("ChoiChannel::from_input_output: dimension mismatch");
  return ChoiChannel(permute_subsystems(j_io, io, kSwapMiddle), dims);
}

ChoiChannel ChoiChannel::zero(ChannelDims dims) {
  return ChoiChannel(ComplexMatrix::Zero(dims.total(), dims.total()), dims);
}

ComplexMatrix ChoiChannel::choi_input_output() const {
  return permute_subsystems(choi_, dims_.choi_profile(), kSwapMiddle);
}

ComplexMatrix ChoiChannel::input_marginal() const {
  return partial_trace(choi_, dims_.choi_profile(), kInputSystems);
}

ComplexMatrix ChoiChannel::superoperator() const {
  const int din = dims_.in(), dout = dims_.out();
  const ComplexMatrix jio = choi_input_output();
  ComplexMatrix s(dout * dout, din * din);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j)
      for (int o1 = 0; o1 < dout; ++o1)
        for (int o2 = 0; o2 < dout; ++o2)
          s(o1 * dout + o2, i * din + j) =
              static_cast<double>(din) * jio(i * dout + o1, j * dout + o2);
  return s;
}

ChoiChannel& ChoiChannel::operator+=(const ChoiChannel& other) {
  require_same_dims(*this, other, "ChoiChannel::operator+=");
  choi_ += other.choi_;
  return *this;
}

ChoiChannel& ChoiChannel::operator-=(const ChoiChannel& other) {
  require_same_dims(*this, other, "ChoiChannel::operator-=");
  choi_ -= other.choi_;
  return *this;
}

ChoiChannel& ChoiChannel::operator*=(double s) {
  choi_ *= s;
  return *this;
}

ChoiChannel operator+(ChoiChannel a, const ChoiChannel& b) { return a += b; }
ChoiChannel operator-(ChoiChannel a, const ChoiChannel& b) { return a -= b; }
ChoiChannel operator*(double s, ChoiChannel a) { return a *= s; }

double choi_distance(const ChoiChannel& a, const ChoiChannel& b) {
  require_same_dims(a, b, "choi_distance");
  return (a.choi() - b.choi()).norm();
}

ChoiChannel choi_of_kraus(const std::vector<ComplexMatrix>& kraus, ChannelDims dims) {
  const int din = dims.in(), dout = dims.out();
  ComplexMatrix jio = ComplexMatrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din)
      throw std::invalid_argument("choi_of_kraus: Kraus operator has wrong shape");
    // |v> = sum_i |i> (x) K|i>
    ComplexVector v(din * dout);
    for (int i = 0; i < din; ++i) v.segment(i * dout, dout) = k.col(i);
    jio += v * v.adjoint();
  }
  jio /= static_cast<double>(din);
  jio = 0.5 * (jio + jio.adjoint()).eval();
  return ChoiChannel::from_input_output(jio, dims);
}

ChoiChannel choi_of_unitary(const ComplexMatrix& u, ChannelDims dims) {
  if (u.rows() != u.cols() || u.rows() != dims.in() || dims.in() != dims.out())
    throw std::invalid_argument("choi_of_unitary: matrix does not match channel dims");
  const double defect = (u.adjoint() * u - identity(static_cast<int>(u.rows()))).cwiseAbs().maxCoeff();
  if (defect > 1e-8) throw std::invalid_argument("choi_of_unitary: matrix is not unitary");
  return choi_of_kraus({u}, dims);
}

ChoiChannel depolarizing_channel(ChannelDims dims) {
  const int n = dims.total();
  return ChoiChannel(identity(n) / static_cast<double>(n), dims);
}

ComplexMatrix apply_channel(const ChoiChannel& ch, const ComplexMatrix& rho) {
  const int din = ch.dims().in(), dout = ch.dims().out();
  if (rho.rows() != din || rho.cols() != din)
    throw std::invalid_argument("apply_channel: state dimension " +
                                std::to_string(rho.rows()) + " != channel input " +
                                std::to_string(din));
  const ComplexMatrix jio = ch.choi_input_output();
  ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j)
      if (rho(i, j) != Complex(0.0)) out += rho(i, j) * jio.block(i * dout, j * dout, dout, dout);
  return static_cast<double>(din) * out;
}

bool is_hp(const ChoiChannel& ch, double tol) { return hermiticity_defect(ch.choi()) <= tol; }

bool is_cp(const ChoiChannel& ch, double tol) { return min_eigenvalue(ch.choi()) >= -tol; }

bool is_tp(const ChoiChannel& ch, double tol) {
  const int din = ch.dims().in();
  return (ch.input_marginal() - identity(din) / static_cast<double>(din)).norm() <= tol;
}

bool is_tn(const ChoiChannel& ch, double tol) {
  const int din = ch.dims().in();
  ComplexMatrix gap = ch.input_marginal() - identity(din) / static_cast<double>(din);
  gap = 0.5 * (gap + gap.adjoint()).eval();
  return max_eigenvalue(gap) <= tol;
}

bool is_ppt_choi(const ChoiChannel& ch, double tol) {
  ComplexMatrix pt = partial_transpose(ch.choi(), ch.dims().choi_profile(), kBobSystems);
  return min_eigenvalue(pt) >= -tol;
}

Instrument::Instrument(std::vector<ChoiChannel> elements, double tol) {
  for (auto& e : elements)
    if (std::abs(e.choi().trace()) >= 1e-12) elements_.push_back(std::move(e));
  if (elements_.empty()) throw std::invalid_argument("Instrument: no nonzero elements");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (!(elements_[i].dims() == elements_.front().dims()))
      throw std::invalid_argument("Instrument: elements have different dimensions");
    if (!is_cp(elements_[i], tol))
      throw std::invalid_argument("Instrument: element " + std::to_string(i) + " is not CP");
  }
  if (!is_tp(sum(), tol)) throw std::invalid_argument("Instrument: elements do not sum to a TP map");
}

ChoiChannel Instrument::sum() const {
  ChoiChannel s = ChoiChannel::zero(elements_.front().dims());
  for (const auto& e : elements_) s += e;
  return s;
}

QpdTerm::QpdTerm(double a, ChoiChannel map, std::optional<double> b) : coeff(a) {
  if (b && (*b < -1.0 || *b > 1.0))
    throw std::invalid_argument("QpdTerm: side weight outside [-1, 1]");
  elements.push_back({std::move(map), b});
}

QpdTerm::QpdTerm(double a, std::vector<WeightedMap> outcomes)
    : coeff(a), elements(std::move(outcomes)) {
  if (elements.empty()) throw std::invalid_argument("QpdTerm: no outcomes");
  for (const auto& e : elements) {
    if (e.b() < -1.0 || e.b() > 1.0)
      throw std::invalid_argument("QpdTerm: side weight outside [-1, 1]");
    if (!(e.map.dims() == elements.front().map.dims()))
      throw std::invalid_argument("QpdTerm: outcome maps have different dimensions");
  }
}

ChoiChannel QpdTerm::effective_map() const {
  ChoiChannel s = ChoiChannel::zero(elements.front().map.dims());
  for (const auto& e : elements) s += e.b() * e.map;
  return s;
}

ChoiChannel QpdTerm::instrument_sum() const {
  ChoiChannel s = ChoiChannel::zero(elements.front().map.dims());
  for (const auto& e : elements) s += e.map;
  return s;
}

double Qpd::l1() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return s;
}

ChoiChannel Qpd::reconstruction() const {
  ChoiChannel s = ChoiChannel::zero(target.dims());
  for (const auto& t : terms) s += t.coeff * t.effective_map();
  return s;
}

QpdReport qpd_validate(const Qpd& q, double tol) {
  QpdReport report;
  report.l1 = q.l1();
  report.reconstruction_error = choi_distance(q.reconstruction(), q.target);
  for (const auto& t : q.terms) {
    TermFlags f;
    const ChoiChannel total = t.instrument_sum();
    f.cp = std::all_of(t.elements.begin(), t.elements.end(),
                       [&](const WeightedMap& e) { return is_cp(e.map, tol); });
    f.ppt = std::all_of(t.elements.begin(), t.elements.end(),
                        [&](const WeightedMap& e) { return is_ppt_choi(e.map, tol); });
    f.tp = is_tp(total, tol);
    f.tn = is_tn(total, tol);
    report.terms.push_back(f);
  }
  return report;
}

Qpd hptp_to_cptp_qpd(const ChoiChannel& e) {
  if (!is_hp(e) || !is_tp(e))
    throw std::invalid_argument("hptp_to_cptp_qpd: input is not HPTP within 1e-8");
  const double d_io = static_cast<double>(e.dims().total());
  const double lambda = std::max(max_eigenvalue(e.choi()), 1.0 / d_io);
  const double a = d_io * lambda;
  const ChoiChannel depol = depolarizing_channel(e.dims());

  Qpd q{e, {}};
  q.terms.emplace_back(a, depol);
  if (a - 1.0 > 1e-12) {
    ChoiChannel rest = (a / (a - 1.0)) * depol - (1.0 / (a - 1.0)) * e;
    q.terms.emplace_back(-(a - 1.0), std::move(rest));
  } else {
    q.terms.emplace_back(0.0, depol);
  }
  return q;
}

Qpd hp_to_cptn_qpd(const ChoiChannel& e) {
  if (!is_hp(e)) throw std::invalid_argument("hp_to_cptn_qpd: input is not HP within 1e-8");
  const HermEig eig = herm_eig(e.choi());
  const Eigen::Index n = eig.values.size();
  ComplexMatrix pos = ComplexMatrix::Zero(n, n), neg = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = eig.values(k);
    const ComplexMatrix proj = eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    if (w > 0) pos += w * proj;
    else if (w < 0) neg -= w * proj;
  }
  pos = 0.5 * (pos + pos.adjoint()).eval();
  neg = 0.5 * (neg + neg.adjoint()).eval();

  const auto dims = e.dims();
  const double din = static_cast<double>(dims.in());
  Qpd q{e, {}};
  auto add_part = [&](const ComplexMatrix& part, double sign) {
    ChoiChannel lam(part, dims);
    ComplexMatrix marg = din * lam.input_marginal();
    marg = 0.5 * (marg + marg.adjoint()).eval();
    const double scale = max_eigenvalue(marg);
    if (scale <= 1e-14) return;
    q.terms.emplace_back(sign * scale, (1.0 / scale) * lam);
  };
  add_part(pos, 1.0);
  add_part(neg, -1.0);
  return q;
}

Qpd regroup_star_qpd(double a_plus, const ChoiChannel& g_pp, const ChoiChannel& g_pm,
                     double a_minus, const ChoiChannel& g_mp, const ChoiChannel& g_mm) {
  const auto dims = g_pp.dims();
  for (const ChoiChannel* g : {&g_pm, &g_mp, &g_mm})
    if (!(g->dims() == dims))
      throw std::invalid_argument("regroup_star_qpd: instrument dimensions differ");
  for (const ChoiChannel* g : {&g_pp, &g_pm, &g_mp, &g_mm})
    if (!is_cp(*g)) throw std::invalid_argument("regroup_star_qpd: element is not CP");
  if (!is_tp(g_pp + g_pm) || !is_tp(g_mp + g_mm))
    throw std::invalid_argument("regroup_star_qpd: inputs are not instruments");
  if (a_plus < 0.0 || a_minus < 0.0)
    throw std::invalid_argument("regroup_star_qpd: coefficients must be nonnegative");
  const double total = a_plus + a_minus;
  if (total < 1.0 - 1e-12)
    throw std::invalid_argument("regroup_star_qpd: a_plus + a_minus < 1");

  ChoiChannel target = a_plus * (g_pp - g_pm) - a_minus * (g_mp - g_mm);
  if (!is_tp(target))
    throw std::invalid_argument("regroup_star_qpd: decomposed map is not trace preserving");

  Qpd q{std::move(target), {}};
  const double c_plus = 0.5 * (1.0 + total);
  q.terms.emplace_back(c_plus, (1.0 / c_plus) * (a_plus * g_pp + a_minus * g_mm));
  const double c_minus = 0.5 * (total - 1.0);
  if (c_minus > 1e-12)
    q.terms.emplace_back(-c_minus, (1.0 / c_minus) * (a_plus * g_pm + a_minus * g_mp));
  return q;
}

}  // namespace qpdext
