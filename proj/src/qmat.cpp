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

#include "qpdext/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qpdext {

namespace {

void require_square(const ComplexMatrix& m, const DimProfile& profile,
                    const char* what) {
  if (m.rows() != m.cols() || m.rows() != profile.total()) {
    throw std::invalid_argument(std::string(what) + ": matrix is " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) +
                                " but profile total is " +
                                std::to_string(profile.total()));
  }
}

std::vector<bool> subsystem_mask(const DimProfile& profile,
                                 std::span<const int> indices,
                                 const char* what) {
  std::vector<bool> mask(profile.size(), false);
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= profile.size()) {
      throw std::out_of_range(std::string(what) + ": subsystem index " +
                              std::to_string(i) + " out of range for " +
                              std::to_string(profile.size()) + " subsystems");
    }
    mask[i] = true;
  }
  return mask;
}

}  // namespace

DimProfile::DimProfile(std::vector<int> dims) : dims_(std::move(dims)) {
  total_ = 1;
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("DimProfile: dimensions must be >= 1");
    total_ *= d;
  }
}

int DimProfile::stride(std::size_t i) const {
  int s = 1;
  for (std::size_t k = i + 1; k < dims_.size(); ++k) s *= dims_[k];
  return s;
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const DimProfile& profile,
                            std::span<const int> keep) {
  require_square(m, profile, "partial_trace");
  const auto kept = subsystem_mask(profile, keep, "partial_trace");

  // Split each full index into (kept part, traced part).
  const int n = profile.total();
  std::vector<int> kept_idx(n), traced_idx(n);
  int kept_dim = 1;
  for (std::size_t s = 0; s < profile.size(); ++s)
    if (kept[s]) kept_dim *= profile[s];
  for (int i = 0; i < n; ++i) {
    int rem = i, k = 0, t = 0, kmul = 1, tmul = 1;
    for (std::size_t s = profile.size(); s-- > 0;) {
      const int digit = rem % profile[s];
      rem /= profile[s];
      if (kept[s]) {
        k += digit * kmul;
        kmul *= profile[s];
      } else {
        t += digit * tmul;
        tmul *= profile[s];
      }
    }
    kept_idx[i] = k;
    traced_idx[i] = t;
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (traced_idx[i] == traced_idx[j]) out(kept_idx[i], kept_idx[j]) += m(i, j);
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const DimProfile& profile,
                                std::span<const int> flip) {
  require_square(m, profile, "partial_transpose");
  const auto flipped = subsystem_mask(profile, flip, "partial_transpose");

  // f(i) is the part of index i carried by the flipped subsystems; swapping
  // those digits between row and column is i' = i - f(i) + f(j).
  const int n = profile.total();
  std::vector<int> f(n, 0);
  for (int i = 0; i < n; ++i) {
    int rem = i, stride = 1;
    for (std::size_t s = profile.size(); s-- > 0;) {
      const int digit = rem % profile[s];
      rem /= profile[s];
      if (flipped[s]) f[i] += digit * stride;
      stride *= profile[s];
    }
  }
  ComplexMatrix out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i - f[i] + f[j], j - f[j] + f[i]) = m(i, j);
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const DimProfile& profile,
                                 std::span<const int> order) {
  if (order.size() != profile.size())
    throw std::invalid_argument("permute_subsystems: order has wrong length");
  std::vector<int> seen(profile.size(), 0);
  for (int o : order) {
    if (o < 0 || static_cast<std::size_t>(o) >= profile.size() || seen[o]++)
      throw std::invalid_argument("permute_subsystems: order is not a permutation");
  }
  std::vector<int> new_dims(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) new_dims[k] = profile[order[k]];
  const DimProfile target(new_dims);

  const int n = profile.total();
  std::vector<int> to_new(n);
  for (int i = 0; i < n; ++i) {
    int idx = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int s = order[k];
      const int digit = (i / profile.stride(s)) % profile[s];
      idx += digit * target.stride(k);
    }
    to_new[i] = idx;
  }

  if (m.cols() == 1 && m.rows() == n) {
    ComplexMatrix out(n, 1);
    for (int i = 0; i < n; ++i) out(to_new[i], 0) = m(i, 0);
    return out;
  }
  require_square(m, profile, "permute_subsystems");
  ComplexMatrix out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(to_new[i], to_new[j]) = m(i, j);
  return out;
}

HermEig herm_eig(const ComplexMatrix& h) {
  if (!is_hermitian(h))
    throw std::invalid_argument("herm_eig: input is not Hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver did not converge");
  const Eigen::Index n = h.rows();
  HermEig out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& h) {
  if (!is_hermitian(h))
    throw std::invalid_argument("min_eigenvalue: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const ComplexMatrix& h) {
  if (!is_hermitian(h))
    throw std::invalid_argument("max_eigenvalue: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(h.rows() - 1);
}

RealVector schmidt_coefficients(const ComplexMatrix& v, int dA, int dB) {
  if (dA < 1 || dB < 1 || v.size() != static_cast<Eigen::Index>(dA) * dB)
    throw std::invalid_argument("schmidt_coefficients: vector length != dA*dB");
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("schmidt_coefficients: vector is not unit norm");
  ComplexMatrix reshaped(dA, dB);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b) reshaped(a, b) = v(a * dB + b);
  Eigen::JacobiSVD<ComplexMatrix> svd(reshaped);
  return svd.singularValues();
}

RealVector OperatorSchmidt::normalized() const {
  if (left.empty()) return coeffs;
  const double scale =
      std::sqrt(static_cast<double>(left.front().rows() * right.front().rows()));
  return coeffs / scale;
}

ComplexMatrix OperatorSchmidt::reconstruct() const {
  const Eigen::Index dA = left.empty() ? 0 : left.front().rows();
  const Eigen::Index dB = right.empty() ? 0 : right.front().rows();
  ComplexMatrix out = ComplexMatrix::Zero(dA * dB, dA * dB);
  for (std::size_t k = 0; k < left.size(); ++k)
    out += coeffs(k) * kron(left[k], right[k]);
  return out;
}

OperatorSchmidt operator_schmidt(const ComplexMatrix& u, int dA, int dB) {
  const Eigen::Index n = static_cast<Eigen::Index>(dA) * dB;
  if (dA < 1 || dB < 1 || u.rows() != n || u.cols() != n)
    throw std::invalid_argument("operator_schmidt: matrix is not (dA*dB) square");

  // Realignment: R[(a1,a2),(b1,b2)] = u[(a1,b1),(a2,b2)].
  ComplexMatrix r(dA * dA, dB * dB);
  for (int a1 = 0; a1 < dA; ++a1)
    for (int a2 = 0; a2 < dA; ++a2)
      for (int b1 = 0; b1 < dB; ++b1)
        for (int b2 = 0; b2 < dB; ++b2)
          r(a1 * dA + a2, b1 * dB + b2) = u(a1 * dB + b1, a2 * dB + b2);

  Eigen::JacobiSVD<ComplexMatrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  OperatorSchmidt out;
  const double cutoff = s.size() > 0 ? 1e-10 * std::max(s(0), 1e-300) : 0.0;
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > cutoff) ++keep;
  out.coeffs = s.head(keep);
  for (Eigen::Index k = 0; k < keep; ++k) {
    ComplexMatrix a(dA, dA), b(dB, dB);
    for (int a1 = 0; a1 < dA; ++a1)
      for (int a2 = 0; a2 < dA; ++a2) a(a1, a2) = svd.matrixU()(a1 * dA + a2, k);
    for (int b1 = 0; b1 < dB; ++b1)
      for (int b2 = 0; b2 < dB; ++b2)
        b(b1, b2) = std::conj(svd.matrixV()(b1 * dB + b2, k));
    out.left.push_back(std::move(a));
    out.right.push_back(std::move(b));
  }
  return out;
}

}  // namespace qpdext
