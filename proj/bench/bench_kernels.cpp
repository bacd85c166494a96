// Serial reference vs OpenMP kernels for one TGV iteration and the
// gradient operators.
#include <benchmark/benchmark.h>

#include <random>

#include "reference.hpp"
#include "tgvflow/diffops.hpp"
#include "tgvflow/solver.hpp"

using namespace tgvflow;

namespace {

ScalarField noise(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f(w, h);
  for (double& v : f.values()) v = d(rng);
  return f;
}

LinearizedData make_data(int n) {
  std::mt19937_64 rng(1);
  return {noise(n, n, rng), noise(n, n, rng), noise(n, n, rng)};
}

void BM_StepReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto L = make_data(n);
  auto st = SolverState::zeros(n, n);
  const SolverParams p;
  for (auto _ : state) {
    reference::tgv_step(st, L, p);
    benchmark::DoNotOptimize(st.u.u1[0]);
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_StepParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto L = make_data(n);
  auto st = SolverState::zeros(n, n);
  const SolverParams p;
  for (auto _ : state) {
    pdhgmp_tgv_step_inplace(st, L, p);
    benchmark::DoNotOptimize(st.u.u1[0]);
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_GradReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const auto x = reference::flatten(noise(n, n, rng));
  const auto G = reference::forward_gradient(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(G.apply(x));
}

void BM_GradParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const auto p = noise(n, n, rng);
  ScalarField gx(n, n), gy(n, n);
  for (auto _ : state) {
    grad_into(p, gx, gy);
    benchmark::DoNotOptimize(gx[0]);
  }
}

}  // namespace

BENCHMARK(BM_StepReference)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepParallel)->Arg(64)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradReference)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GradParallel)->Arg(256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
