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

#include "qpdext/qpsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "qpdext/gates.hpp"
#include "qpdext/kernels.hpp"
#include "qpdext/philox.hpp"

namespace qpdext {

namespace {

void check_qubits(const std::vector<int>& qs, int n, const std::string& what) {
  if (qs.empty()) throw std::invalid_argument(what + ": no qubits listed");
  std::set<int> seen;
  for (int q : qs) {
    if (q < 0 || q >= n) throw std::invalid_argument(what + ": qubit " + std::to_string(q) + " out of range");
    if (!seen.insert(q).second) throw std::invalid_argument(what + ": qubit " + std::to_string(q) + " listed twice");
  }
}

std::vector<int> joined(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double op_norm(const ComplexMatrix& o) {
  const HermEig eig = herm_eig(0.5 * (o + o.adjoint()));
  return std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
}

struct Outcome {
  ComplexMatrix superop;
  double b = 1.0;
};

struct CompiledTerm {
  double signed_l1 = 0.0;  // sign(a_i) ||a||_1
  ComplexMatrix effective;  // sum_j b_j E_j
  std::vector<Outcome> outcomes;
};

struct CompiledOp {
  std::vector<int> targets;
  ComplexMatrix superop;  // gates
  std::vector<CompiledTerm> terms;  // cuts
  std::vector<double> cumulative;
  bool is_cut = false;
};

// Circuit lowered to superoperators; immutable once built.
struct Program {
  int n = 0;
  std::vector<CompiledOp> ops;
  ComplexMatrix observable;
  RealVector obs_values;
  ComplexMatrix obs_vectors;
  double l1_product = 1.0;
  double obs_norm = 0.0;

  explicit Program(const Circuit& c) {
    c.validate();
    n = c.qubit_count;
    observable = c.observable;
    const HermEig eig = herm_eig(0.5 * (observable + observable.adjoint()));
    obs_values = eig.values;
    obs_vectors = eig.vectors;
    obs_norm = op_norm(observable);
    for (std::size_t g = 0; g < c.ops.size(); ++g) {
      CompiledOp op;
      if (const auto* gate = std::get_if<GateOp>(&c.ops[g])) {
        op.targets = gate->qubits;
        op.superop = kron(gate->u, gate->u.conjugate());
      } else {
        const auto& cut = std::get<CutOp>(c.ops[g]);
        const QpdReport rep = qpd_validate(cut.qpd);
        if (rep.reconstruction_error >= 1e-6)
          throw std::invalid_argument("cut " + std::to_string(g) + ": QPD does not reconstruct its target");
        for (std::size_t t = 0; t < rep.terms.size(); ++t)
          if (!rep.terms[t].tn)
            throw std::invalid_argument("cut " + std::to_string(g) + ": term " + std::to_string(t) +
                                        " is not a trace-nonincreasing instrument");
        for (const auto& term : cut.qpd.terms)
          for (const auto& e : term.elements)
            if (!is_cp(e.map))
              throw std::invalid_argument("cut " + std::to_string(g) + ": an instrument element is not CP");
        op.is_cut = true;
        op.targets = joined(cut.qa, cut.qb);
        const double l1 = cut.qpd.l1();
        if (!(l1 > 0.0)) throw std::invalid_argument("cut " + std::to_string(g) + ": QPD has zero norm");
        l1_product *= l1;
        double acc = 0.0;
        for (const auto& term : cut.qpd.terms) {
          CompiledTerm ct;
          ct.signed_l1 = (term.coeff < 0 ? -1.0 : 1.0) * l1;
          ct.effective = term.effective_map().superoperator();
          for (const auto& e : term.elements) ct.outcomes.push_back({e.map.superoperator(), e.b()});
          op.terms.push_back(std::move(ct));
          acc += std::abs(term.coeff) / l1;
          op.cumulative.push_back(acc);
        }
      }
      ops.push_back(std::move(op));
    }
  }

  static std::size_t pick(const std::vector<double>& cumulative, double u) {
    const double total = cumulative.back();
    for (std::size_t i = 0; i < cumulative.size(); ++i)
      if (u * total < cumulative[i]) return i;
    return cumulative.size() - 1;
  }

  double shot(std::int64_t index, const Philox4x32::Key& key, TrajectoryMode mode) const {
    const auto lo = static_cast<std::uint32_t>(static_cast<std::uint64_t>(index));
    const auto hi = static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32);
    const int dim = 1 << n;
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    rho(0, 0) = 1.0;
    double weight = 1.0;
    for (std::size_t g = 0; g < ops.size(); ++g) {
      const CompiledOp& op = ops[g];
      if (!op.is_cut) {
        rho = kernels::apply_superop_serial(rho, n, op.targets, op.superop);
        continue;
      }
      const auto u = Philox4x32::uniforms({static_cast<std::uint32_t>(g), lo, hi, 0u}, key);
      const CompiledTerm& term = op.terms[pick(op.cumulative, u[0])];
      weight *= term.signed_l1;
      if (mode == TrajectoryMode::linear) {
        rho = kernels::apply_superop_serial(rho, n, op.targets, term.effective);
        continue;
      }
      // Outcome j with probability tr E_j(rho); the remainder discards the shot.
      double acc = 0.0;
      bool kept = false;
      for (const auto& o : term.outcomes) {
        ComplexMatrix next = kernels::apply_superop_serial(rho, n, op.targets, o.superop);
        const double q = next.trace().real();
        if (q <= 0.0) continue;
        acc += q;
        if (u[1] < acc) {
          rho = next / q;
          weight *= o.b;
          kept = true;
          break;
        }
      }
      if (!kept) return 0.0;
    }
    if (mode == TrajectoryMode::linear) return weight * (observable.cwiseProduct(rho.transpose())).sum().real();

    const auto u = Philox4x32::uniforms({static_cast<std::uint32_t>(ops.size()), lo, hi, 0u}, key);
    const ComplexMatrix in_basis = obs_vectors.adjoint() * rho * obs_vectors;
    double acc = 0.0, total = 0.0;
    for (Eigen::Index k = 0; k < in_basis.rows(); ++k) total += std::max(0.0, in_basis(k, k).real());
    for (Eigen::Index k = 0; k < in_basis.rows(); ++k) {
      acc += std::max(0.0, in_basis(k, k).real());
      if (u[0] * total < acc) return weight * obs_values(k);
    }
    return weight * obs_values(obs_values.size() - 1);
  }
};

struct Moments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double max_abs = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
    max_abs = std::max(max_abs, std::abs(x));
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / n;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
    max_abs = std::max(max_abs, o.max_abs);
  }
};

}  // namespace

void Circuit::validate() const {
  if (qubit_count < 1 || qubit_count > kMaxQubits)
    throw std::invalid_argument("circuit: qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  const int dim = 1 << qubit_count;
  for (std::size_t g = 0; g < ops.size(); ++g) {
    const std::string where = "op " + std::to_string(g);
    if (const auto* gate = std::get_if<GateOp>(&ops[g])) {
      check_qubits(gate->qubits, qubit_count, where);
      const Eigen::Index d = Eigen::Index{1} << gate->qubits.size();
      if (gate->u.rows() != d || gate->u.cols() != d)
        throw std::invalid_argument(where + ": gate size does not match its qubit list");
      if (!all_finite(gate->u) || (gate->u.adjoint() * gate->u - identity(static_cast<int>(d))).norm() > 1e-8)
        throw std::invalid_argument(where + ": gate is not unitary");
    } else {
      const auto& cut = std::get<CutOp>(ops[g]);
      check_qubits(joined(cut.qa, cut.qb), qubit_count, where);
      if (cut.qa.empty() || cut.qb.empty()) throw std::invalid_argument(where + ": both cut sides need qubits");
      const ChannelDims& d = cut.qpd.target.dims();
      const int da = 1 << cut.qa.size(), db = 1 << cut.qb.size();
      if (!(d == ChannelDims::bipartite(da, db)))
        throw std::invalid_argument(where + ": QPD dimensions do not match the addressed qubits");
      if (cut.qpd.terms.empty()) throw std::invalid_argument(where + ": QPD has no terms");
      for (const auto& t : cut.qpd.terms)
        for (const auto& e : t.elements)
          if (!(e.map.dims() == d)) throw std::invalid_argument(where + ": QPD term dimensions differ from target");
    }
  }
  if (observable.rows() != dim || observable.cols() != dim)
    throw std::invalid_argument("circuit: observable dimension must be 2^n");
  if (!all_finite(observable) || !is_hermitian(observable, 1e-10))
    throw std::invalid_argument("circuit: observable is not Hermitian");
}

double exact_expectation(const Circuit& c) {
  c.validate();
  const int dim = 1 << c.qubit_count;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (const auto& op : c.ops) {
    if (const auto* gate = std::get_if<GateOp>(&op)) {
      rho = kernels::apply_superop(rho, c.qubit_count, gate->qubits, kron(gate->u, gate->u.conjugate()));
    } else {
      const auto& cut = std::get<CutOp>(op);
      rho = kernels::apply_superop(rho, c.qubit_count, joined(cut.qa, cut.qb), cut.qpd.target.superoperator());
    }
  }
  const Complex v = (c.observable.cwiseProduct(rho.transpose())).sum();
  if (std::abs(v.imag()) > 1e-9) throw std::runtime_error("exact_expectation: expectation has an imaginary part");
  return v.real();
}

std::vector<double> qps_shot_values(const Circuit& c, std::int64_t first, std::int64_t count,
                                    std::uint64_t seed, TrajectoryMode mode) {
  const Program prog(c);
  const auto key = Philox4x32::key_of(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t s = first; s < first + count; ++s) out.push_back(prog.shot(s, key, mode));
  return out;
}

EstimatorReport qps_estimate(const Circuit& c, std::int64_t shots, std::uint64_t seed,
                             const EstimatorOptions& opts) {
  if (shots < 1) throw std::invalid_argument("qps_estimate: shots must be at least 1");
  if (opts.chunk < 1) throw std::invalid_argument("qps_estimate: chunk must be positive");
  const Program prog(c);
  const auto key = Philox4x32::key_of(seed);
  const std::int64_t chunk = opts.chunk;
  const std::int64_t chunks = (shots + chunk - 1) / chunk;
  std::vector<Moments> parts(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](std::int64_t k) {
    Moments m;
    const std::int64_t end = std::min(shots, (k + 1) * chunk);
    for (std::int64_t s = k * chunk; s < end; ++s) m.add(prog.shot(s, key, opts.mode));
    parts[static_cast<std::size_t>(k)] = m;
  };
  if (opts.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    for (std::int64_t k = 0; k < chunks; ++k) run_chunk(k);
  }

  Moments total;
  for (const auto& m : parts) total.merge(m);
  EstimatorReport r;
  r.estimate = total.mean;
  r.shots = shots;
  r.variance = shots > 1 ? total.m2 / static_cast<double>(shots - 1) : 0.0;
  r.empirical_stderr = std::sqrt(r.variance / static_cast<double>(shots));
  r.l1_product = prog.l1_product;
  r.seed = seed;
  r.mode = opts.mode;
  r.observable_norm = prog.obs_norm;
  r.max_abs_value = total.max_abs;
  return r;
}

std::int64_t shots_needed(double epsilon, double delta, double l1) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("shots_needed: epsilon must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("shots_needed: delta must lie in (0, 1]");
  if (!(l1 >= 1.0) || !std::isfinite(l1)) throw std::invalid_argument("shots_needed: l1 must be at least 1");
  const double n = 2.0 * l1 * l1 / (epsilon * epsilon) * std::log(2.0 / delta);
  // Absorb rounding in log() so exact integers are not bumped up.
  return static_cast<std::int64_t>(std::ceil(n * (1.0 - 1e-12)));
}

std::vector<SweepRow> overhead_sweep(const std::function<Circuit(int)>& make_circuit,
                                     std::span<const int> cut_counts, std::int64_t shots_per_point,
                                     std::uint64_t seed, const EstimatorOptions& opts) {
  std::vector<SweepRow> rows;
  for (int n : cut_counts) {
    if (n < 0) throw std::invalid_argument("overhead_sweep: cut counts must be nonnegative");
    const EstimatorReport r = qps_estimate(make_circuit(n), shots_per_point, seed, opts);
    rows.push_back({n, r.l1_product, r.estimate, r.variance, r.empirical_stderr, r.shots});
  }
  return rows;
}

double log_variance_slope(std::span<const SweepRow> rows) {
  if (rows.size() < 2) throw std::invalid_argument("log_variance_slope: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    if (!(r.variance > 0.0)) throw std::invalid_argument("log_variance_slope: nonpositive variance");
    const double x = r.cuts, y = std::log(r.variance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(rows.size());
  const double den = k * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("log_variance_slope: cut counts are all equal");
  return (k * sxy - sx * sy) / den;
}

Circuit cnot_chain_circuit(int n, const Qpd& cut) {
  Circuit c;
  c.qubit_count = 2;
  c.ops.push_back(GateOp{gates::hadamard(), {0}});
  for (int i = 0; i < n; ++i) c.ops.push_back(CutOp{cut, {0}, {1}});
  c.observable = kron(gates::pauli_z(), identity(2));
  return c;
}

Circuit bell_cut_circuit(const Qpd& cut) {
  Circuit c;
  c.qubit_count = 2;
  c.ops.push_back(GateOp{gates::hadamard(), {0}});
  c.ops.push_back(CutOp{cut, {0}, {1}});
  c.observable = kron(gates::pauli_z(), gates::pauli_z());
  return c;
}

}  // namespace qpdext
