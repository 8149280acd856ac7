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

#include <string>
#include <vector>

#include "qpdext/qmat.hpp"

namespace qpdext {

/// Entry of a sparse symmetric matrix; (row, col, value) with row <= col
/// stands for `value` at both (row, col) and (col, row).
struct SymEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};
using SymSparse = std::vector<SymEntry>;

/// Entry of a sparse Hermitian matrix, upper triangle only (row <= col).
struct HermEntry {
  int row = 0;
  int col = 0;
  Complex value;
};

/// Real symmetric embedding [[Re h, -Im h], [Im h, Re h]] of a Hermitian
/// matrix. Its spectrum is that of h with every multiplicity doubled.
RealMatrix realify(const ComplexMatrix& h);

/// Sparse version of `realify` for an n x n Hermitian matrix given by its
/// upper-triangle entries.
SymSparse realify_sparse(const std::vector<HermEntry>& upper, int n);

/// Upper-triangle nonzeros of a dense Hermitian matrix.
std::vector<HermEntry> hermitian_entries(const ComplexMatrix& h, double drop = 0.0);

enum class BlockKind { psd, nonneg };

struct BlockSpec {
  BlockKind kind = BlockKind::psd;
  int size = 0;
};

struct ConstraintPart {
  int block = 0;
  SymSparse entries;  // for nonneg blocks only diagonal entries are allowed
};

struct Constraint {
  std::vector<ConstraintPart> parts;
  double rhs = 0.0;
};

/// Block-structured conic program in standard primal/dual form:
///
///   primal:  min <C, X>   s.t. <A_i, X> = b_i,  X in K
///   dual:    max b^T y    s.t. Z = C - sum_i y_i A_i in K
///
/// where K is a product of PSD cones and nonnegative orthants. The dual
/// multipliers y are the free variables of the problem.
struct SdpProblem {
  std::vector<BlockSpec> blocks;
  std::vector<SymSparse> objective;  // C, one entry list per block
  std::vector<Constraint> constraints;

  int free_var_count() const { return static_cast<int>(constraints.size()); }
  int scalar_var_count() const;
  /// Throws std::invalid_argument on out-of-range references.
  void validate() const;
};

enum class SdpStatus { optimal, infeasible, iteration_limit, numerical_failure };

std::string to_string(SdpStatus s);

struct SdpOptions {
  double gap_tol = 1e-7;
  double feas_tol = 1e-7;
  int max_iter = 200;
  bool parallel = true;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // primal - dual
  double primal_infeasibility = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_infeasibility = 0.0;    // ||C - Z - A^T y|| / (1 + ||C||)
  int iterations = 0;
  double initial_scale = 0.0;  // big-M used for X0 = Z0 = M*I
  std::vector<RealMatrix> primal;  // X per block; nonneg blocks are columns
  std::vector<RealMatrix> slack;   // Z per block
  RealVector dual;                 // y
};

/// Primal-dual path-following (HKM direction, Mehrotra predictor-corrector)
/// from the infeasible start X0 = Z0 = M*I, M = 1e4 (1 + max |data|).
SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

}  // namespace qpdext
