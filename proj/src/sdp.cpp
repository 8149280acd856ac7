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

#include "qpdext/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "qpdext/kernels.hpp"

namespace qpdext {

RealMatrix realify(const ComplexMatrix& h) {
  if (!is_hermitian(h)) throw std::invalid_argument("realify: input is not Hermitian");
  const Eigen::Index n = h.rows();
  RealMatrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = h.real();
  r.topRightCorner(n, n) = -h.imag();
  r.bottomLeftCorner(n, n) = h.imag();
  r.bottomRightCorner(n, n) = h.real();
  return r;
}

SymSparse realify_sparse(const std::vector<HermEntry>& upper, int n) {
  SymSparse out;
  out.reserve(4 * upper.size());
  for (const auto& e : upper) {
    if (e.row > e.col || e.col >= n || e.row < 0)
      throw std::invalid_argument("realify_sparse: entries must be upper-triangle and in range");
    const double re = e.value.real(), im = e.value.imag();
    if (re != 0.0) {
      out.push_back({e.row, e.col, re});
      out.push_back({e.row + n, e.col + n, re});
    }
    if (e.row != e.col && im != 0.0) {
      out.push_back({e.row, e.col + n, -im});
      out.push_back({e.col, e.row + n, im});
    }
  }
  return out;
}

std::vector<HermEntry> hermitian_entries(const ComplexMatrix& h, double drop) {
  std::vector<HermEntry> out;
  for (Eigen::Index c = 0; c < h.cols(); ++c)
    for (Eigen::Index r = 0; r <= c; ++r)
      if (std::abs(h(r, c)) > drop)
        out.push_back({static_cast<int>(r), static_cast<int>(c), h(r, c)});
  return out;
}

int SdpProblem::scalar_var_count() const {
  int total = 0;
  for (const auto& b : blocks)
    total += b.kind == BlockKind::psd ? b.size * (b.size + 1) / 2 : b.size;
  return total;
}

void SdpProblem::validate() const {
  if (objective.size() != blocks.size())
    throw std::invalid_argument("SdpProblem: objective must have one entry list per block");
  auto check = [&](int block, const SymSparse& entries, const char* what) {
    if (block < 0 || static_cast<std::size_t>(block) >= blocks.size())
      throw std::invalid_argument(std::string("SdpProblem: ") + what + " references unknown block");
    const auto& spec = blocks[block];
    for (const auto& e : entries) {
      if (e.row < 0 || e.col >= spec.size || e.row > e.col)
        throw std::invalid_argument(std::string("SdpProblem: ") + what + " entry out of range");
      if (spec.kind == BlockKind::nonneg && e.row != e.col)
        throw std::invalid_argument(std::string("SdpProblem: ") + what +
                                    " has off-diagonal entry in a nonneg block");
      if (!std::isfinite(e.value))
        throw std::invalid_argument(std::string("SdpProblem: ") + what + " has non-finite entry");
    }
  };
  for (const auto& b : blocks)
    if (b.size < 1) throw std::invalid_argument("SdpProblem: empty block");
  for (std::size_t k = 0; k < blocks.size(); ++k) check(static_cast<int>(k), objective[k], "objective");
  for (const auto& c : constraints) {
    std::vector<int> seen;
    for (const auto& part : c.parts) {
      check(part.block, part.entries, "constraint");
      if (std::find(seen.begin(), seen.end(), part.block) != seen.end())
        throw std::invalid_argument("SdpProblem: constraint lists a block twice");
      seen.push_back(part.block);
    }
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("SdpProblem: non-finite rhs");
  }
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::iteration_limit: return "iterationLimit";
    case SdpStatus::numerical_failure: return "numericalFailure";
  }
  return "unknown";
}

namespace {

RealMatrix sym(const RealMatrix& a) { return 0.5 * (a + a.transpose()); }

double dot(const SymSparse& a, const RealMatrix& x) {
  double s = 0.0;
  for (const auto& e : a) {
    s += e.value * x(e.row, e.col);
    if (e.row != e.col) s += e.value * x(e.col, e.row);
  }
  return s;
}

void axpy(double alpha, const SymSparse& a, RealMatrix& x) {
  for (const auto& e : a) {
    x(e.row, e.col) += alpha * e.value;
    if (e.row != e.col) x(e.col, e.row) += alpha * e.value;
  }
}

// Largest step t <= 1/0 such that x + t dx stays in the cone (unbounded -> inf).
double max_step_psd(const Eigen::LLT<RealMatrix>& chol, const RealMatrix& dx) {
  RealMatrix w = chol.matrixL().solve(dx);
  w = chol.matrixL().solve(w.transpose().eval());
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(sym(w), Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_nonneg(const RealMatrix& x, const RealMatrix& dx) {
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (dx(i, 0) < 0) t = std::min(t, -x(i, 0) / dx(i, 0));
  return t;
}

struct PsdData {
  int block = 0;
  int n = 0;
  RealMatrix c;
  std::vector<kernels::BlockConstraint> parts;
};

struct LpData {
  int block = 0;
  int n = 0;
  RealMatrix c;  // n x 1
  RealMatrix a;  // m x n
};

class Solver {
 public:
  Solver(const SdpProblem& p, const SdpOptions& opts) : p_(p), opts_(opts) {
    p_.validate();
    m_ = p_.free_var_count();
    b_ = RealVector(m_);
    for (int i = 0; i < m_; ++i) b_(i) = p_.constraints[i].rhs;

    const std::size_t nb = p_.blocks.size();
    block_slot_.assign(nb, -1);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& spec = p_.blocks[k];
      if (spec.kind == BlockKind::psd) {
        block_slot_[k] = static_cast<int>(psd_.size());
        PsdData d{static_cast<int>(k), spec.size, RealMatrix::Zero(spec.size, spec.size), {}};
        axpy(1.0, p_.objective[k], d.c);
        psd_.push_back(std::move(d));
      } else {
        block_slot_[k] = static_cast<int>(lp_.size());
        LpData d{static_cast<int>(k), spec.size, RealMatrix::Zero(spec.size, 1),
                 RealMatrix::Zero(m_, spec.size)};
        for (const auto& e : p_.objective[k]) d.c(e.row, 0) += e.value;
        lp_.push_back(std::move(d));
      }
    }
    for (int i = 0; i < m_; ++i) {
      for (const auto& part : p_.constraints[i].parts) {
        const int slot = block_slot_[part.block];
        if (p_.blocks[part.block].kind == BlockKind::psd) {
          psd_[slot].parts.push_back({i, &part.entries});
        } else {
          for (const auto& e : part.entries) lp_[slot].a(i, e.row) += e.value;
        }
      }
    }

    double data_max = b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& d : psd_) data_max = std::max(data_max, d.c.cwiseAbs().maxCoeff());
    for (const auto& d : lp_) {
      data_max = std::max(data_max, d.c.cwiseAbs().maxCoeff());
      if (d.a.size()) data_max = std::max(data_max, d.a.cwiseAbs().maxCoeff());
    }
    for (const auto& c : p_.constraints)
      for (const auto& part : c.parts)
        for (const auto& e : part.entries) data_max = std::max(data_max, std::abs(e.value));
    big_m_ = 1e4 * (1.0 + data_max);
    norm_b_ = b_.norm();
    norm_c_ = 0.0;
    for (const auto& d : psd_) norm_c_ += d.c.squaredNorm();
    for (const auto& d : lp_) norm_c_ += d.c.squaredNorm();
    norm_c_ = std::sqrt(norm_c_);
    cone_dim_ = 0;
    for (const auto& s : p_.blocks) cone_dim_ += s.size;
  }

  SdpSolution run();

 private:
  struct Direction {
    std::vector<RealMatrix> dx_psd, dz_psd, dx_lp, dz_lp;
    RealVector dy;
  };

  void residuals();
  bool factor_schur();
  Direction direction(const std::vector<RealMatrix>& g_psd, const std::vector<RealMatrix>& g_lp);
  double inner_xz() const;
  SdpSolution package(SdpStatus status, int iter) const;

  const SdpProblem& p_;
  SdpOptions opts_;
  int m_ = 0;
  RealVector b_;
  std::vector<int> block_slot_;
  std::vector<PsdData> psd_;
  std::vector<LpData> lp_;
  double big_m_ = 0.0, norm_b_ = 0.0, norm_c_ = 0.0;
  int cone_dim_ = 0;

  std::vector<RealMatrix> x_psd_, z_psd_, zinv_psd_, rd_psd_;
  std::vector<RealMatrix> x_lp_, z_lp_, rd_lp_;
  RealVector y_, rp_;
  double pobj_ = 0.0, dobj_ = 0.0, pinf_ = 0.0, dinf_ = 0.0;
  Eigen::LLT<RealMatrix> schur_llt_;
  Eigen::LDLT<RealMatrix> schur_ldlt_;
  bool use_ldlt_ = false;
};

void Solver::residuals() {
  rp_ = b_;
  pobj_ = 0.0;
  for (std::size_t s = 0; s < psd_.size(); ++s) {
    const auto& d = psd_[s];
    pobj_ += (d.c.array() * x_psd_[s].array()).sum();
    for (const auto& part : d.parts) rp_(part.index) -= dot(*part.entries, x_psd_[s]);
    rd_psd_[s] = d.c - z_psd_[s];
    for (const auto& part : d.parts) axpy(-y_(part.index), *part.entries, rd_psd_[s]);
  }
  for (std::size_t s = 0; s < lp_.size(); ++s) {
    const auto& d = lp_[s];
    pobj_ += d.c.col(0).dot(x_lp_[s].col(0));
    rp_ -= d.a * x_lp_[s];
    rd_lp_[s] = d.c - z_lp_[s] - d.a.transpose() * y_;
  }
  dobj_ = b_.dot(y_);
  pinf_ = rp_.norm() / (1.0 + norm_b_);
  double rd2 = 0.0;
  for (const auto& r : rd_psd_) rd2 += r.squaredNorm();
  for (const auto& r : rd_lp_) rd2 += r.squaredNorm();
  dinf_ = std::sqrt(rd2) / (1.0 + norm_c_);
}

double Solver::inner_xz() const {
  double s = 0.0;
  for (std::size_t k = 0; k < psd_.size(); ++k) s += (x_psd_[k].array() * z_psd_[k].array()).sum();
  for (std::size_t k = 0; k < lp_.size(); ++k) s += x_lp_[k].col(0).dot(z_lp_[k].col(0));
  return s;
}

bool Solver::factor_schur() {
  RealMatrix m = RealMatrix::Zero(m_, m_);
  for (std::size_t s = 0; s < psd_.size(); ++s) {
    if (opts_.parallel)
      kernels::schur_psd_block(psd_[s].parts, x_psd_[s], zinv_psd_[s], m);
    else
      kernels::schur_psd_block_serial(psd_[s].parts, x_psd_[s], zinv_psd_[s], m);
  }
  for (int j = 0; j < m_; ++j)
    for (int i = j + 1; i < m_; ++i) m(i, j) = m(j, i);
  for (std::size_t s = 0; s < lp_.size(); ++s) {
    const RealVector w = x_lp_[s].col(0).cwiseQuotient(z_lp_[s].col(0));
    m.noalias() += lp_[s].a * w.asDiagonal() * lp_[s].a.transpose();
  }
  schur_llt_.compute(m);
  use_ldlt_ = false;
  if (schur_llt_.info() == Eigen::Success) return true;
  // Near a degenerate optimum the Schur matrix loses rank; a tiny diagonal
  // shift only perturbs the search direction, not the residuals.
  const double scale = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (double eps : {1e-14, 1e-12, 1e-10}) {
    RealMatrix shifted = m;
    shifted.diagonal().array() += eps * scale;
    schur_llt_.compute(shifted);
    if (schur_llt_.info() == Eigen::Success) return true;
  }
  use_ldlt_ = true;
  schur_ldlt_.compute(m);
  return schur_ldlt_.info() == Eigen::Success;
}

Solver::Direction Solver::direction(const std::vector<RealMatrix>& g_psd,
                                    const std::vector<RealMatrix>& g_lp) {
  Direction dir;
  RealVector rhs = rp_;
  std::vector<RealMatrix> k_psd(psd_.size());
  for (std::size_t s = 0; s < psd_.size(); ++s) {
    k_psd[s] = g_psd[s] - x_psd_[s] * rd_psd_[s] * zinv_psd_[s];
    for (const auto& part : psd_[s].parts) rhs(part.index) -= dot(*part.entries, k_psd[s]);
  }
  for (std::size_t s = 0; s < lp_.size(); ++s) {
    const RealVector k = g_lp[s].col(0) -
                         x_lp_[s].col(0).cwiseProduct(rd_lp_[s].col(0)).cwiseQuotient(z_lp_[s].col(0));
    rhs -= lp_[s].a * k;
  }
  dir.dy = use_ldlt_ ? RealVector(schur_ldlt_.solve(rhs)) : RealVector(schur_llt_.solve(rhs));

  for (std::size_t s = 0; s < psd_.size(); ++s) {
    RealMatrix dz = rd_psd_[s];
    for (const auto& part : psd_[s].parts) axpy(-dir.dy(part.index), *part.entries, dz);
    dir.dx_psd.push_back(sym(g_psd[s] - x_psd_[s] * dz * zinv_psd_[s]));
    dir.dz_psd.push_back(std::move(dz));
  }
  for (std::size_t s = 0; s < lp_.size(); ++s) {
    RealMatrix dz = rd_lp_[s] - lp_[s].a.transpose() * dir.dy;
    RealMatrix dx = g_lp[s] - RealMatrix(x_lp_[s].cwiseProduct(dz).cwiseQuotient(z_lp_[s]));
    dir.dx_lp.push_back(std::move(dx));
    dir.dz_lp.push_back(std::move(dz));
  }
  return dir;
}

SdpSolution Solver::package(SdpStatus status, int iter) const {
  SdpSolution sol;
  sol.status = status;
  sol.primal_objective = pobj_;
  sol.dual_objective = dobj_;
  sol.gap = pobj_ - dobj_;
  sol.primal_infeasibility = pinf_;
  sol.dual_infeasibility = dinf_;
  sol.iterations = iter;
  sol.initial_scale = big_m_;
  sol.dual = y_;
  sol.primal.resize(p_.blocks.size());
  sol.slack.resize(p_.blocks.size());
  for (std::size_t s = 0; s < psd_.size(); ++s) {
    sol.primal[psd_[s].block] = x_psd_[s];
    sol.slack[psd_[s].block] = z_psd_[s];
  }
  for (std::size_t s = 0; s < lp_.size(); ++s) {
    sol.primal[lp_[s].block] = x_lp_[s];
    sol.slack[lp_[s].block] = z_lp_[s];
  }
  return sol;
}

SdpSolution Solver::run() {
  for (const auto& d : psd_) {
    x_psd_.push_back(big_m_ * RealMatrix::Identity(d.n, d.n));
    z_psd_.push_back(big_m_ * RealMatrix::Identity(d.n, d.n));
  }
  for (const auto& d : lp_) {
    x_lp_.push_back(RealMatrix::Constant(d.n, 1, big_m_));
    z_lp_.push_back(RealMatrix::Constant(d.n, 1, big_m_));
  }
  y_ = RealVector::Zero(m_);
  rd_psd_.resize(psd_.size());
  rd_lp_.resize(lp_.size());
  zinv_psd_.resize(psd_.size());
  const double diverge = 1e10 * big_m_;

  for (int iter = 0; iter <= opts_.max_iter; ++iter) {
    residuals();
    const double rel_gap = std::abs(pobj_ - dobj_) / (1.0 + std::abs(pobj_));
    if (opts_.verbose)
      std::fprintf(stderr, "sdp %3d  pobj % .10e  dobj % .10e  gap %.2e  pinf %.2e  dinf %.2e\n",
                   iter, pobj_, dobj_, rel_gap, pinf_, dinf_);
    if (rel_gap <= opts_.gap_tol && pinf_ <= opts_.feas_tol && dinf_ <= opts_.feas_tol)
      return package(SdpStatus::optimal, iter);
    if (iter == opts_.max_iter) break;

    double size = y_.size() ? y_.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& x : x_psd_) size = std::max(size, x.cwiseAbs().maxCoeff());
    for (const auto& x : x_lp_) size = std::max(size, x.cwiseAbs().maxCoeff());
    if (!std::isfinite(size)) return package(SdpStatus::numerical_failure, iter);
    if (size > diverge) return package(SdpStatus::infeasible, iter);

    std::vector<Eigen::LLT<RealMatrix>> x_chol(psd_.size()), z_chol(psd_.size());
    for (std::size_t s = 0; s < psd_.size(); ++s) {
      z_chol[s].compute(z_psd_[s]);
      x_chol[s].compute(x_psd_[s]);
      if (z_chol[s].info() != Eigen::Success || x_chol[s].info() != Eigen::Success)
        return package(SdpStatus::numerical_failure, iter);
      zinv_psd_[s] = z_chol[s].solve(RealMatrix::Identity(psd_[s].n, psd_[s].n));
      zinv_psd_[s] = sym(zinv_psd_[s]);
    }
    if (!factor_schur()) return package(SdpStatus::numerical_failure, iter);

    const double mu = inner_xz() / cone_dim_;

    // Predictor (affine scaling).
    std::vector<RealMatrix> g_psd(psd_.size()), g_lp(lp_.size());
    for (std::size_t s = 0; s < psd_.size(); ++s) g_psd[s] = -x_psd_[s];
    for (std::size_t s = 0; s < lp_.size(); ++s) g_lp[s] = -x_lp_[s];
    const Direction pred = direction(g_psd, g_lp);

    auto step_lengths = [&](const Direction& d) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (std::size_t s = 0; s < psd_.size(); ++s) {
        ap = std::min(ap, max_step_psd(x_chol[s], d.dx_psd[s]));
        ad = std::min(ad, max_step_psd(z_chol[s], d.dz_psd[s]));
      }
      for (std::size_t s = 0; s < lp_.size(); ++s) {
        ap = std::min(ap, max_step_nonneg(x_lp_[s], d.dx_lp[s]));
        ad = std::min(ad, max_step_nonneg(z_lp_[s], d.dz_lp[s]));
      }
      return std::pair{ap, ad};
    };
    auto [ap_aff, ad_aff] = step_lengths(pred);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);

    double mu_aff = 0.0;
    for (std::size_t s = 0; s < psd_.size(); ++s)
      mu_aff += ((x_psd_[s] + ap_aff * pred.dx_psd[s]).array() *
                 (z_psd_[s] + ad_aff * pred.dz_psd[s]).array()).sum();
    for (std::size_t s = 0; s < lp_.size(); ++s)
      mu_aff += (x_lp_[s] + ap_aff * pred.dx_lp[s]).col(0).dot((z_lp_[s] + ad_aff * pred.dz_lp[s]).col(0));
    mu_aff /= cone_dim_;
    const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
    const double sigma = std::clamp(ratio * ratio * ratio, 0.0, 1.0);

    // Corrector with the second-order term of the predictor.
    for (std::size_t s = 0; s < psd_.size(); ++s)
      g_psd[s] = sigma * mu * zinv_psd_[s] - x_psd_[s] -
                 pred.dx_psd[s] * pred.dz_psd[s] * zinv_psd_[s];
    for (std::size_t s = 0; s < lp_.size(); ++s)
      g_lp[s] = RealMatrix((sigma * mu / z_lp_[s].array() - x_lp_[s].array() -
                            pred.dx_lp[s].array() * pred.dz_lp[s].array() / z_lp_[s].array())
                               .matrix());
    const Direction corr = direction(g_psd, g_lp);

    auto [ap, ad] = step_lengths(corr);
    const double tau = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);

    for (std::size_t s = 0; s < psd_.size(); ++s) {
      x_psd_[s] = sym(x_psd_[s] + ap * corr.dx_psd[s]);
      z_psd_[s] = sym(z_psd_[s] + ad * corr.dz_psd[s]);
    }
    for (std::size_t s = 0; s < lp_.size(); ++s) {
      x_lp_[s] += ap * corr.dx_lp[s];
      z_lp_[s] += ad * corr.dz_lp[s];
    }
    y_ += ad * corr.dy;
  }
  return package(SdpStatus::iteration_limit, opts_.max_iter);
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts) {
  Solver solver(p, opts);
  return solver.run();
}

}  // namespace qpdext
