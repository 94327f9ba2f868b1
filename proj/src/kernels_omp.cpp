#include <omp.h>

#include "kernels_detail.hpp"
#include "qmitm/kernels.hpp"

namespace qmitm::kernels::parallel {

namespace {

int threads() {
  const int cap = thread_limit();
  return cap > 0 ? cap : omp_get_max_threads();
}

// Below this size the fork/join overhead dominates.
constexpr std::ptrdiff_t kMinParallel = 4096;

}  // namespace

void fill_permutation_tables(std::uint64_t seed, std::uint32_t n_keys, std::uint32_t block_space,
                             std::span<Block> forward, std::span<Block> inverse) {
  const auto n = static_cast<std::ptrdiff_t>(n_keys);
#pragma omp parallel for schedule(dynamic) num_threads(threads())
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::size_t off = static_cast<std::size_t>(k) * block_space;
    detail::fill_one_key(seed, static_cast<Key>(k), block_space, forward.subspan(off, block_space),
                         inverse.subspan(off, block_space));
  }
}

void grover_iteration(std::span<Amplitude> state, std::span<const std::uint8_t> marked) {
  const auto n = static_cast<std::ptrdiff_t>(state.size());
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for reduction(+ : re, im) if (n >= kMinParallel) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (marked[i]) state[i] = -state[i];
    re += state[i].real();
    im += state[i].imag();
  }
  const Amplitude twice_mean = 2.0 * Amplitude{re, im} / static_cast<double>(n);
#pragma omp parallel for if (n >= kMinParallel) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) state[i] = twice_mean - state[i];
}

double marked_mass(std::span<const Amplitude> state, std::span<const std::uint8_t> marked) {
  const auto n = static_cast<std::ptrdiff_t>(state.size());
  double mass = 0.0;
#pragma omp parallel for reduction(+ : mass) if (n >= kMinParallel) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i)
    if (marked[i]) mass += std::norm(state[i]);
  return mass;
}

double squared_norm(std::span<const Amplitude> state) {
  const auto n = static_cast<std::ptrdiff_t>(state.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) if (n >= kMinParallel) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) s += std::norm(state[i]);
  return s;
}

void walk_search_step(const EdgeLayout& layout, std::span<const std::uint8_t> marked,
                      std::span<Amplitude> state, std::span<Amplitude> scratch) {
  const auto dim = static_cast<std::ptrdiff_t>(layout.dimension());
  const auto d = static_cast<std::ptrdiff_t>(layout.degree);
  const auto blocks = dim / d;
  const bool par = dim >= kMinParallel;
#pragma omp parallel num_threads(threads()) if (par)
  {
#pragma omp for
    for (std::ptrdiff_t v = 0; v < blocks; ++v) {
      auto block = state.subspan(static_cast<std::size_t>(v * d), static_cast<std::size_t>(d));
      for (std::ptrdiff_t j = 0; j < d; ++j)
        if (marked[v * d + j]) block[j] = -block[j];
      detail::reflect_block(block);
    }
#pragma omp for
    for (std::ptrdiff_t e = 0; e < dim; ++e) scratch[e] = state[layout.reverse[e]];
#pragma omp for
    for (std::ptrdiff_t v = 0; v < blocks; ++v)
      detail::reflect_block(scratch.subspan(static_cast<std::size_t>(v * d), static_cast<std::size_t>(d)));
#pragma omp for
    for (std::ptrdiff_t e = 0; e < dim; ++e) state[e] = scratch[layout.reverse[e]];
  }
}

void symmetric_matvec(const double* a, std::size_t n, std::span<const double> x, std::span<double> y) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (nn >= 256) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    const double* col = a + static_cast<std::size_t>(i) * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += col[j] * x[j];
    y[i] = s;
  }
}

}  // namespace qmitm::kernels::parallel
