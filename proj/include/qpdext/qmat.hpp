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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qpdext {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Maximum entrywise |m - m^dagger| tolerated before an input is rejected as
/// non-Hermitian. Inputs are never silently symmetrized.
inline constexpr double kHermitianTol = 1e-10;

/// Subsystem dimensions of a tensor-product space. Subsystem 0 is the most
/// significant index in row-major tensor indexing.
class DimProfile {
 public:
  DimProfile() = default;
  explicit DimProfile(std::vector<int> dims);
  DimProfile(std::initializer_list<int> dims)
      : DimProfile(std::vector<int>(dims)) {}

  const std::vector<int>& dims() const { return dims_; }
  int total() const { return total_; }
  std::size_t size() const { return dims_.size(); }
  int operator[](std::size_t i) const { return dims_[i]; }

  /// Row-major stride of subsystem `i`.
  int stride(std::size_t i) const;

  bool operator==(const DimProfile&) const = default;

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

ComplexMatrix identity(int dim);

bool all_finite(const ComplexMatrix& m);

/// Largest entrywise deviation of `m` from its conjugate transpose.
double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product of a list of factors, left to right.
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

/// Traces out every subsystem not listed in `keep`. The kept subsystems
/// retain their relative order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const DimProfile& profile,
                            std::span<const int> keep);

/// Transposes the tensor indices of the subsystems listed in `flip`.
ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const DimProfile& profile,
                                std::span<const int> flip);

/// Reorders tensor factors: subsystem k of the result is subsystem
/// `order[k]` of the input. Works for square operators and column vectors.
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const DimProfile& profile,
                                 std::span<const int> order);

struct HermEig {
  RealVector values;     // descending
  ComplexMatrix vectors; // columns match `values`
};

HermEig herm_eig(const ComplexMatrix& h);
double min_eigenvalue(const ComplexMatrix& h);
double max_eigenvalue(const ComplexMatrix& h);

/// Schmidt coefficients of a unit vector on C^dA (x) C^dB, descending.
RealVector schmidt_coefficients(const ComplexMatrix& v, int dA, int dB);

struct OperatorSchmidt {
  RealVector coeffs;                // descending, strictly positive
  std::vector<ComplexMatrix> left;  // dA x dA, Hilbert-Schmidt orthonormal
  std::vector<ComplexMatrix> right; // dB x dB, Hilbert-Schmidt orthonormal

  /// Coefficients divided by sqrt(dA*dB); for a unitary with unitary
  /// factors these are the |u_k| with sum |u_k|^2 = 1.
  RealVector normalized() const;
  ComplexMatrix reconstruct() const;
};

/// u = sum_k c_k left_k (x) right_k. Coefficients below 1e-10 relative to
/// the largest are dropped.
OperatorSchmidt operator_schmidt(const ComplexMatrix& u, int dA, int dB);

}  // namespace qpdext
