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

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "qpdext/channel.hpp"

namespace qpdext {

/// Largest register the density-matrix backend accepts.
inline constexpr int kMaxQubits = 10;

struct GateOp {
  ComplexMatrix u;
  std::vector<int> qubits;
};

/// A gate replaced by a quasiprobability decomposition; qa addresses the
/// A side of the QPD, qb the B side.
struct CutOp {
  Qpd qpd;
  std::vector<int> qa;
  std::vector<int> qb;
};

using CircuitOp = std::variant<GateOp, CutOp>;

struct Circuit {
  int qubit_count = 1;
  std::vector<CircuitOp> ops;
  ComplexMatrix observable;

  /// Throws std::invalid_argument on any structural problem.
  void validate() const;
};

/// tr[O rho_final] from |0...0>, with every cut replaced by its target.
double exact_expectation(const Circuit& c);

enum class TrajectoryMode {
  /// Carry the unnormalized state through sum_j b_j E_j and evaluate
  /// tr[O rho] at the end; no outcome sampling.
  linear,
  /// Sample instrument outcomes with their Born weights and the final
  /// measurement outcome in the eigenbasis of O.
  sampled,
};

struct EstimatorOptions {
  TrajectoryMode mode = TrajectoryMode::linear;
  bool parallel = true;
  int chunk = 4096;
};

struct EstimatorReport {
  double estimate = 0.0;
  std::int64_t shots = 0;
  double empirical_stderr = 0.0;
  double variance = 0.0;
  double l1_product = 1.0;
  std::uint64_t seed = 0;
  TrajectoryMode mode = TrajectoryMode::linear;
  double observable_norm = 0.0;  // ||O||_inf
  double max_abs_value = 0.0;    // largest |per-shot value|

  bool operator==(const EstimatorReport&) const = default;
};

EstimatorReport qps_estimate(const Circuit& c, std::int64_t shots, std::uint64_t seed,
                             const EstimatorOptions& opts = {});

/// Per-shot values of the estimator, in shot order (test hook).
std::vector<double> qps_shot_values(const Circuit& c, std::int64_t first, std::int64_t count,
                                    std::uint64_t seed, TrajectoryMode mode = TrajectoryMode::linear);

/// ceil(2 l1^2 / eps^2 * ln(2 / delta)).
std::int64_t shots_needed(double epsilon, double delta, double l1);

struct SweepRow {
  int cuts = 0;
  double l1_product = 1.0;
  double estimate = 0.0;
  double variance = 0.0;
  double empirical_stderr = 0.0;
  std::int64_t shots = 0;
};

std::vector<SweepRow> overhead_sweep(const std::function<Circuit(int)>& make_circuit,
                                     std::span<const int> cut_counts, std::int64_t shots_per_point,
                                     std::uint64_t seed, const EstimatorOptions& opts = {});

/// Least-squares slope of log(variance) against the cut count.
double log_variance_slope(std::span<const SweepRow> rows);

/// H on qubit 0, then n cut CNOTs between qubits 0 and 1; observable Z on qubit 0.
Circuit cnot_chain_circuit(int n, const Qpd& cut);

/// H on qubit 0, one cut CNOT (0 -> 1); observable Z (x) Z.
Circuit bell_cut_circuit(const Qpd& cut);

}  // namespace qpdext
