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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpdext/qmat.hpp"

namespace qpdext {

/// Default tolerance for the channel membership predicates.
inline constexpr double kChannelTol = 1e-8;

/// Dimensions of a bipartite channel AB -> A'B'. Single-system channels use
/// b = bp = 1.
struct ChannelDims {
  int a = 1;
  int ap = 1;
  int b = 1;
  int bp = 1;

  int in() const { return a * b; }
  int out() const { return ap * bp; }
  int total() const { return in() * out(); }

  /// Profile of the Choi operator, ordered (A, A', B, B').
  DimProfile choi_profile() const { return DimProfile({a, ap, b, bp}); }

  static ChannelDims local(int din, int dout) { return {din, dout, 1, 1}; }
  static ChannelDims bipartite(int da, int db) { return {da, da, db, db}; }

  bool operator==(const ChannelDims&) const = default;
};

enum class ChoiNormalization { trace_one, trace_din };

/// A Hermitian-preserving superoperator stored as its trace-one Choi
/// operator J = (1/d_in) sum_ij |i><j| (x) E(|i><j|), with tensor factors
/// reordered to (A, A', B, B').
class ChoiChannel {
 public:
  ChoiChannel() = default;
  ChoiChannel(ComplexMatrix choi, ChannelDims dims,
              ChoiNormalization norm = ChoiNormalization::trace_one);

  /// Builds from a Choi operator ordered (A, B, A', B'), i.e. input then
  /// output, trace-one normalized.
  static ChoiChannel from_input_output(const ComplexMatrix& j_io, ChannelDims dims);

  static ChoiChannel zero(ChannelDims dims);

  const ComplexMatrix& choi() const { return choi_; }
  const ChannelDims& dims() const { return dims_; }

  /// Choi operator ordered (A, B, A', B').
  ComplexMatrix choi_input_output() const;
  /// Choi operator with tr_{A'B'} J = 1_{AB} for trace-preserving maps.
  ComplexMatrix choi_unnormalized() const { return choi_ * static_cast<double>(dims_.in()); }
  /// tr_{A'B'}[J], ordered (A, B).
  ComplexMatrix input_marginal() const;

  /// Row-major vectorized action: vec(E(rho)) = S vec(rho).
  ComplexMatrix superoperator() const;

  ChoiChannel& operator+=(const ChoiChannel& other);
  ChoiChannel& operator-=(const ChoiChannel& other);
  ChoiChannel& operator*=(double s);

 private:
  ComplexMatrix choi_;
  ChannelDims dims_;
};

ChoiChannel operator+(ChoiChannel a, const ChoiChannel& b);
ChoiChannel operator-(ChoiChannel a, const ChoiChannel& b);
ChoiChannel operator*(double s, ChoiChannel a);

/// Frobenius distance between the trace-one Choi operators.
double choi_distance(const ChoiChannel& a, const ChoiChannel& b);

ChoiChannel choi_of_unitary(const ComplexMatrix& u, ChannelDims dims);
ChoiChannel choi_of_kraus(const std::vector<ComplexMatrix>& kraus, ChannelDims dims);

/// rho |-> tr(rho) 1/d_out.
ChoiChannel depolarizing_channel(ChannelDims dims);

ComplexMatrix apply_channel(const ChoiChannel& ch, const ComplexMatrix& rho);

bool is_cp(const ChoiChannel& ch, double tol = kChannelTol);
bool is_tp(const ChoiChannel& ch, double tol = kChannelTol);
bool is_tn(const ChoiChannel& ch, double tol = kChannelTol);
bool is_hp(const ChoiChannel& ch, double tol = kChannelTol);
/// Positivity of the Choi operator after transposing B and B' jointly.
bool is_ppt_choi(const ChoiChannel& ch, double tol = kChannelTol);

/// A finite family of nonzero CP maps whose sum is trace preserving.
class Instrument {
 public:
  /// Elements with trace below 1e-12 are dropped before validation.
  explicit Instrument(std::vector<ChoiChannel> elements, double tol = kChannelTol);

  const std::vector<ChoiChannel>& elements() const { return elements_; }
  ChoiChannel sum() const;

 private:
  std::vector<ChoiChannel> elements_;
};

/// One instrument outcome inside a QPD term: a CP map and the classical
/// weight applied when that outcome occurs. An absent weight means 1.
struct WeightedMap {
  ChoiChannel map;
  std::optional<double> weight;

  double b() const { return weight.value_or(1.0); }
};

/// A coefficient times the side-information-weighted instrument
/// sum_j b_j E_j. A plain CP term is the one-element case.
struct QpdTerm {
  double coeff = 0.0;
  std::vector<WeightedMap> elements;

  QpdTerm() = default;
  QpdTerm(double a, ChoiChannel map, std::optional<double> b = std::nullopt);
  QpdTerm(double a, std::vector<WeightedMap> outcomes);

  /// sum_j b_j E_j.
  ChoiChannel effective_map() const;
  /// sum_j E_j.
  ChoiChannel instrument_sum() const;
};

struct Qpd {
  ChoiChannel target;
  std::vector<QpdTerm> terms;

  double l1() const;
  ChoiChannel reconstruction() const;
};

struct TermFlags {
  bool cp = false;
  bool tp = false;
  bool tn = false;
  bool ppt = false;
};

struct QpdReport {
  double reconstruction_error = 0.0;
  double l1 = 0.0;
  std::vector<TermFlags> terms;
};

QpdReport qpd_validate(const Qpd& q, double tol = kChannelTol);

/// Two-term CPTP decomposition of an HPTP map: d*lambda D - (d*lambda - 1) F
/// with D fully depolarizing.
Qpd hptp_to_cptp_qpd(const ChoiChannel& e);

/// Split of an HP map into at most two CPTN terms via the positive and
/// negative eigenspaces of its Choi operator.
Qpd hp_to_cptn_qpd(const ChoiChannel& e);

/// Regroups a_+ (G_++ - G_+-) - a_- (G_-+ - G_--) into a QPD over two CPTP
/// maps with l1 norm a_+ + a_-.
Qpd regroup_star_qpd(double a_plus, const ChoiChannel& g_pp, const ChoiChannel& g_pm,
                     double a_minus, const ChoiChannel& g_mp, const ChoiChannel& g_mm);

}  // namespace qpdext
