// Serial vs OpenMP kernels. Thread count follows QMITM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "qmitm/kernels.hpp"
#include "qmitm/quantum_simulator.hpp"
#include "qmitm/rng.hpp"

namespace {

using namespace qmitm;
using kernels::Amplitude;

template <bool Parallel>
void BM_FillTables(benchmark::State& state) {
  const auto m = static_cast<std::uint32_t>(state.range(0));
  const std::uint32_t n = 64;
  std::vector<Block> fwd(std::size_t{n} * m), inv(fwd.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::fill_permutation_tables(1, n, m, fwd, inv);
    else kernels::serial::fill_permutation_tables(1, n, m, fwd, inv);
    benchmark::DoNotOptimize(fwd.data());
  }
  state.SetItemsProcessed(state.iterations() * n * m);
}

template <bool Parallel>
void BM_GroverIteration(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<Amplitude> psi(m, Amplitude(1.0 / std::sqrt(double(m))));
  std::vector<std::uint8_t> marked(m, 0);
  marked[m / 3] = 1;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::grover_iteration(psi, marked);
    else kernels::serial::grover_iteration(psi, marked);
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

template <bool Parallel>
void BM_WalkStep(benchmark::State& state) {
  const auto op = build_johnson_walk(static_cast<std::uint32_t>(state.range(0)),
                                     static_cast<std::uint32_t>(state.range(1)), {0, 1});
  std::vector<Amplitude> psi(op.dimension(), Amplitude(1.0 / std::sqrt(double(op.dimension()))));
  std::vector<Amplitude> scratch(op.dimension());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::walk_search_step(op.layout(), op.marked_edges(), psi, scratch);
    else kernels::serial::walk_search_step(op.layout(), op.marked_edges(), psi, scratch);
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(op.dimension()));
}

template <bool Parallel>
void BM_SymmetricMatvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> a(n * n), x(n), y(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a[i * n + j] = a[j * n + i] = rng.uniform01();
  for (auto& v : x) v = rng.uniform01();
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::symmetric_matvec(a.data(), n, x, y);
    else kernels::serial::symmetric_matvec(a.data(), n, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

}  // namespace

BENCHMARK(BM_FillTables<false>)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(BM_FillTables<true>)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(BM_GroverIteration<false>)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(BM_GroverIteration<true>)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(BM_WalkStep<false>)->Args({8, 4})->Args({10, 3});
BENCHMARK(BM_WalkStep<true>)->Args({8, 4})->Args({10, 3});
BENCHMARK(BM_SymmetricMatvec<false>)->Arg(256)->Arg(2048);
BENCHMARK(BM_SymmetricMatvec<true>)->Arg(256)->Arg(2048);

BENCHMARK_MAIN();
