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

#include <span>
#include <vector>

#include "qpdext/qmat.hpp"
#include "qpdext/sdp.hpp"

/// Data-parallel inner loops. Each OpenMP kernel has a serial reference
/// with the same per-entry summation order, so both produce bit-identical
/// output; the references back the tests and the benchmark.
namespace qpdext::kernels {

/// A constraint matrix restricted to one PSD block.
struct BlockConstraint {
  int index = 0;  // row of the Schur complement
  const SymSparse* entries = nullptr;
};

/// M(i, j) += tr(A_i X A_j Zinv) for all constraint pairs touching a PSD
/// block (upper triangle, i <= j, in the order given).
void schur_psd_block_serial(std::span<const BlockConstraint> parts, const RealMatrix& x,
                            const RealMatrix& z_inv, RealMatrix& m);
void schur_psd_block(std::span<const BlockConstraint> parts, const RealMatrix& x,
                     const RealMatrix& z_inv, RealMatrix& m);

/// Applies a superoperator `s` (row-major vectorization, 4^k x 4^k) to the
/// listed target qubits of a 2^n x 2^n operator. Qubit 0 is the most
/// significant bit; targets[0] is the most significant local qubit.
ComplexMatrix apply_superop_serial(const ComplexMatrix& rho, int qubit_count,
                                   std::span<const int> targets, const ComplexMatrix& s);
ComplexMatrix apply_superop(const ComplexMatrix& rho, int qubit_count,
                            std::span<const int> targets, const ComplexMatrix& s);

}  // namespace qpdext::kernels
