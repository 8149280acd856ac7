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

// Serial references against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "qpdext/kernels.hpp"

using namespace qpdext;

namespace {

RealMatrix random_pd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  RealMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() + n * RealMatrix::Identity(n, n);
}

struct SchurCase {
  std::vector<SymSparse> mats;
  std::vector<kernels::BlockConstraint> parts;
  RealMatrix x, z_inv;

  SchurCase(int n, int m) : mats(m) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> idx(0, n - 1);
    for (auto& s : mats)
      for (int k = 0; k < 4 * n; ++k) {
        int r = idx(rng), c = idx(rng);
        if (r > c) std::swap(r, c);
        s.push_back({r, c, g(rng)});
      }
    for (int i = 0; i < m; ++i) parts.push_back({i, &mats[i]});
    x = random_pd(rng, n);
    z_inv = random_pd(rng, n);
  }
};

template <bool Parallel>
void BM_Schur(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SchurCase c(n, 2 * n);
  RealMatrix m = RealMatrix::Zero(2 * n, 2 * n);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::schur_psd_block(c.parts, c.x, c.z_inv, m);
    else kernels::schur_psd_block_serial(c.parts, c.x, c.z_inv, m);
    benchmark::DoNotOptimize(m.data());
  }
}

template <bool Parallel>
void BM_Superop(benchmark::State& state) {
  const int nq = static_cast<int>(state.range(0));
  const int dim = 1 << nq;
  const ComplexMatrix rho = ComplexMatrix::Random(dim, dim);
  const ComplexMatrix s = ComplexMatrix::Random(16, 16);
  const std::vector<int> targets{0, nq - 1};
  for (auto _ : state) {
    ComplexMatrix out = Parallel ? kernels::apply_superop(rho, nq, targets, s)
                                 : kernels::apply_superop_serial(rho, nq, targets, s);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_Schur<false>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_Schur<true>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_Superop<false>)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_Superop<true>)->Arg(6)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
