#include <cstdlib>
#include <numeric>

#include "kernels_detail.hpp"
#include "qmitm/kernels.hpp"

namespace qmitm::kernels {

namespace detail {

void fill_one_key(std::uint64_t seed, Key k, std::uint32_t block_space, std::span<Block> forward,
                  std::span<Block> inverse) {
  std::iota(forward.begin(), forward.end(), Block{0});
  Rng rng(derive_seed(seed, k));
  shuffle(forward, rng);
  for (Block x = 0; x < block_space; ++x) inverse[forward[x]] = x;
}

void reflect_block(std::span<Amplitude> block) {
  Amplitude sum{0.0, 0.0};
  for (const auto& a : block) sum += a;
  const Amplitude twice_mean = 2.0 * sum / static_cast<double>(block.size());
  for (auto& a : block) a = twice_mean - a;
}

}  // namespace detail

namespace serial {

void fill_permutation_tables(std::uint64_t seed, std::uint32_t n_keys, std::uint32_t block_space,
                             std::span<Block> forward, std::span<Block> inverse) {
  for (Key k = 0; k < n_keys; ++k) {
    const std::size_t off = static_cast<std::size_t>(k) * block_space;
    detail::fill_one_key(seed, k, block_space, forward.subspan(off, block_space),
                         inverse.subspan(off, block_space));
  }
}

void grover_iteration(std::span<Amplitude> state, std::span<const std::uint8_t> marked) {
  Amplitude sum{0.0, 0.0};
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (marked[i]) state[i] = -state[i];
    sum += state[i];
  }
  const Amplitude twice_mean = 2.0 * sum / static_cast<double>(state.size());
  for (auto& a : state) a = twice_mean - a;
}

double marked_mass(std::span<const Amplitude> state, std::span<const std::uint8_t> marked) {
  double mass = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (marked[i]) mass += std::norm(state[i]);
  return mass;
}

double squared_norm(std::span<const Amplitude> state) {
  double s = 0.0;
  for (const auto& a : state) s += std::norm(a);
  return s;
}

void walk_search_step(const EdgeLayout& layout, std::span<const std::uint8_t> marked,
                      std::span<Amplitude> state, std::span<Amplitude> scratch) {
  const std::size_t dim = layout.dimension();
  const std::size_t d = layout.degree;
  for (std::size_t e = 0; e < dim; ++e)
    if (marked[e]) state[e] = -state[e];
  for (std::size_t off = 0; off < dim; off += d) detail::reflect_block(state.subspan(off, d));
  for (std::size_t e = 0; e < dim; ++e) scratch[e] = state[layout.reverse[e]];
  for (std::size_t off = 0; off < dim; off += d) detail::reflect_block(scratch.subspan(off, d));
  for (std::size_t e = 0; e < dim; ++e) state[e] = scratch[layout.reverse[e]];
}

void symmetric_matvec(const double* a, std::size_t n, std::span<const double> x, std::span<double> y) {
  // Row i of a symmetric matrix is column i, which is contiguous.
  for (std::size_t i = 0; i < n; ++i) {
    const double* col = a + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += col[j] * x[j];
    y[i] = s;
  }
}

}  // namespace serial

int thread_limit() {
  if (const char* env = std::getenv("QMITM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;
}

}  // namespace qmitm::kernels
