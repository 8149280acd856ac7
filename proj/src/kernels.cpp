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

#include "qpdext/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpdext::kernels {

namespace {

// Columns of X A_i times the matching rows of Zinv: G = X A_i Zinv.
RealMatrix left_product(const SymSparse& a, const RealMatrix& x, const RealMatrix& z_inv) {
  const Eigen::Index n = x.rows();
  std::vector<int> cols;
  cols.reserve(2 * a.size());
  for (const auto& e : a) {
    cols.push_back(e.col);
    if (e.row != e.col) cols.push_back(e.row);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  RealMatrix xa = RealMatrix::Zero(n, static_cast<Eigen::Index>(cols.size()));
  auto slot = [&](int c) {
    return static_cast<Eigen::Index>(std::lower_bound(cols.begin(), cols.end(), c) - cols.begin());
  };
  for (const auto& e : a) {
    xa.col(slot(e.col)) += e.value * x.col(e.row);
    if (e.row != e.col) xa.col(slot(e.row)) += e.value * x.col(e.col);
  }
  RealMatrix zrows(static_cast<Eigen::Index>(cols.size()), n);
  for (std::size_t k = 0; k < cols.size(); ++k) zrows.row(static_cast<Eigen::Index>(k)) = z_inv.row(cols[k]);
  return xa * zrows;
}

double trace_product(const SymSparse& a, const RealMatrix& g) {
  double s = 0.0;
  for (const auto& e : a) {
    s += e.value * g(e.col, e.row);
    if (e.row != e.col) s += e.value * g(e.row, e.col);
  }
  return s;
}

void schur_row(std::span<const BlockConstraint> parts, std::size_t p, const RealMatrix& x,
               const RealMatrix& z_inv, RealMatrix& m) {
  const RealMatrix g = left_product(*parts[p].entries, x, z_inv);
  const int i = parts[p].index;
  for (std::size_t q = p; q < parts.size(); ++q) {
    const int j = parts[q].index;
    const double v = trace_product(*parts[q].entries, g);
    if (i <= j) m(i, j) += v;
    else m(j, i) += v;
  }
}

struct SuperopLayout {
  std::vector<int> local_offset;  // full-index offset of each local basis state
  std::vector<int> rest;          // full indices with all target bits cleared
  int din = 0;
};

SuperopLayout layout_for(int qubit_count, std::span<const int> targets, const ComplexMatrix& s) {
  const int k = static_cast<int>(targets.size());
  SuperopLayout l;
  l.din = 1 << k;
  if (s.rows() != l.din * l.din || s.cols() != l.din * l.din)
    throw std::invalid_argument("apply_superop: superoperator shape does not match targets");
  int mask = 0;
  for (int t : targets) {
    if (t < 0 || t >= qubit_count) throw std::out_of_range("apply_superop: qubit out of range");
    const int bit = 1 << (qubit_count - 1 - t);
    if (mask & bit) throw std::invalid_argument("apply_superop: repeated target qubit");
    mask |= bit;
  }
  l.local_offset.resize(l.din);
  for (int loc = 0; loc < l.din; ++loc) {
    int off = 0;
    for (int b = 0; b < k; ++b)
      if (loc & (1 << (k - 1 - b))) off |= 1 << (qubit_count - 1 - targets[b]);
    l.local_offset[loc] = off;
  }
  const int dim = 1 << qubit_count;
  for (int i = 0; i < dim; ++i)
    if ((i & mask) == 0) l.rest.push_back(i);
  return l;
}

void superop_row(const SuperopLayout& l, std::size_t r1, const ComplexMatrix& rho,
                 const ComplexMatrix& s, ComplexMatrix& out) {
  const int d = l.din;
  ComplexVector v(d * d), w(d * d);
  const int base1 = l.rest[r1];
  for (int base2 : l.rest) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        v(a * d + b) = rho(base1 + l.local_offset[a], base2 + l.local_offset[b]);
    w.noalias() = s * v;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out(base1 + l.local_offset[a], base2 + l.local_offset[b]) = w(a * d + b);
  }
}

}  // namespace

void schur_psd_block_serial(std::span<const BlockConstraint> parts, const RealMatrix& x,
                            const RealMatrix& z_inv, RealMatrix& m) {
  for (std::size_t p = 0; p < parts.size(); ++p) schur_row(parts, p, x, z_inv, m);
}

void schur_psd_block(std::span<const BlockConstraint> parts, const RealMatrix& x,
                     const RealMatrix& z_inv, RealMatrix& m) {
  // Rows are disjoint across iterations as long as each constraint index
  // appears once per block, which the solver guarantees.
  const auto count = static_cast<long>(parts.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long p = 0; p < count; ++p) schur_row(parts, static_cast<std::size_t>(p), x, z_inv, m);
}

ComplexMatrix apply_superop_serial(const ComplexMatrix& rho, int qubit_count,
                                   std::span<const int> targets, const ComplexMatrix& s) {
  const SuperopLayout l = layout_for(qubit_count, targets, s);
  ComplexMatrix out(rho.rows(), rho.cols());
  for (std::size_t r1 = 0; r1 < l.rest.size(); ++r1) superop_row(l, r1, rho, s, out);
  return out;
}

ComplexMatrix apply_superop(const ComplexMatrix& rho, int qubit_count,
                            std::span<const int> targets, const ComplexMatrix& s) {
  const SuperopLayout l = layout_for(qubit_count, targets, s);
  ComplexMatrix out(rho.rows(), rho.cols());
  const auto count = static_cast<long>(l.rest.size());
#pragma omp parallel for schedule(static) if (count >= 16)
  for (long r1 = 0; r1 < count; ++r1) superop_row(l, static_cast<std::size_t>(r1), rho, s, out);
  return out;
}

}  // namespace qpdext::kernels
