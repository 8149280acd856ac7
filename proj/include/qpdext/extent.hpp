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
#include <span>
#include <string>
#include <vector>

#include "qpdext/channel.hpp"
#include "qpdext/sdp.hpp"

namespace qpdext {

enum class ExtentMethod { analytic, sdp, lp };

std::string to_string(ExtentMethod m);

/// Solver diagnostics attached to every numerical extent.
struct ExtentResiduals {
  SdpStatus status = SdpStatus::optimal;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  int free_vars = 0;
  /// Only set for LP synthesis: reconstruction error of the certificate.
  double reconstruction_error = 0.0;
};

struct ExtentResult {
  double value = 1.0;
  ExtentMethod method = ExtentMethod::analytic;
  ExtentResiduals residuals;
  /// Lower bound implied by the SDP certificate; equals `value` up to the gap.
  double certified_lower = 1.0;
  /// sdp: multipliers of the three matrix inequalities, which certify
  /// `certified_lower`.
  std::vector<ComplexMatrix> multipliers;
  /// lp: the explicit decomposition, with dictionary labels per term.
  std::optional<Qpd> qpd;
  std::vector<std::string> labels;

  bool ok() const { return residuals.status == SdpStatus::optimal; }
};

/// Largest SDP instances accepted by the extent solvers.
inline constexpr int kMaxRealBlock = 128;
inline constexpr int kMaxFreeVars = 5000;

/// 2 (sum a_i)^2 - 1 for normalized Schmidt coefficients.
double pure_state_extent(std::span<const double> schmidt);

/// 1 + 2 sum_{k != k'} |u_k||u_k'| for normalized operator-Schmidt
/// coefficients of a unitary with unitary factors.
double kak_unitary_extent(std::span<const double> u);

/// Minimal 2c - 1 over Hermitian X with X >= J, X^{T_BB'} >= 0,
/// X^{T_BB'} >= J^{T_BB'} and tr_{A'B'} X = c 1, J the unnormalized Choi.
ExtentResult gamma_ppt_channel(const ChoiChannel& e, const SdpOptions& opts = {});

/// 1 + 2 t over sigma >= 0 with sigma^{T_B} >= 0, (rho + sigma)^{T_B} >= 0
/// and t = tr sigma.
ExtentResult gamma_ppt_state(const ComplexMatrix& rho, int d_a, int d_b,
                             const SdpOptions& opts = {});

struct DictionaryEntry {
  std::string label;
  std::vector<WeightedMap> outcomes;

  ChoiChannel effective_map() const;
};

struct Dictionary {
  std::string name;
  ChannelDims dims;
  std::vector<DictionaryEntry> entries;

  /// Every outcome CP, every entry's instrument sum TN, dims consistent.
  void validate(double tol = kChannelTol) const;
};

/// Local operations with side information on a 1|1 qubit cut: all products
/// of single-qubit factors drawn from Pauli conjugations, Clifford
/// pi/4 rotations, signed Pauli measurements and measure-and-prepare maps
/// between Pauli eigenstates.
Dictionary lo_star_qubit_dictionary();

/// min sum |a_k| s.t. sum a_k F_k = target over the dictionary's effective
/// maps. Returns status infeasible when the target is outside their span.
ExtentResult synthesize_qpd_lp(const ChoiChannel& target, const Dictionary& dict,
                               const SdpOptions& opts = {});

/// |Phi_a>_{A anc_A} (x) |Phi_b>_{B anc_B}, ordered (A, anc_A, B, anc_B),
/// as a column vector.
ComplexMatrix maximally_entangled_probe(const ChannelDims& dims);

/// Applies a unitary channel to a pure product probe (ordered
/// (A, anc_A, B, anc_B)) and returns the pure-state extent of the output
/// across (A' anc_A | B' anc_B). The probe may be a vector or a density matrix.
double state_based_lower_bound(const ChoiChannel& u, const ComplexMatrix& probe, int anc_a = 1,
                               int anc_b = 1);

}  // namespace qpdext
