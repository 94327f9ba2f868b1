#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::parallel with the same
// signature; tests hold the two to agreement and bench/ compares their speed.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qmitm/permutation_oracle.hpp"

namespace qmitm::kernels {

using Amplitude = std::complex<double>;

// Directed-edge space of a regular graph with edges grouped by tail vertex:
// edges [v*degree, (v+1)*degree) leave vertex v, and reverse[e] is the index
// of the same edge traversed backwards.
struct EdgeLayout {
  std::size_t degree = 0;
  std::vector<std::uint32_t> reverse;

  std::size_t dimension() const noexcept { return reverse.size(); }
};

namespace serial {

void fill_permutation_tables(std::uint64_t seed, std::uint32_t n_keys, std::uint32_t block_space,
                             std::span<Block> forward, std::span<Block> inverse);

// Phase flip on marked entries followed by inversion about the mean.
void grover_iteration(std::span<Amplitude> state, std::span<const std::uint8_t> marked);

double marked_mass(std::span<const Amplitude> state, std::span<const std::uint8_t> marked);
double squared_norm(std::span<const Amplitude> state);

// One search step: phase flip on marked edges, then W = R_B R_A with
// R_A reflecting each tail block about its uniform vector and R_B = S R_A S.
void walk_search_step(const EdgeLayout& layout, std::span<const std::uint8_t> marked,
                      std::span<Amplitude> state, std::span<Amplitude> scratch);

// y = A x for a dense column-major n x n symmetric matrix.
void symmetric_matvec(const double* a, std::size_t n, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace parallel {

void fill_permutation_tables(std::uint64_t seed, std::uint32_t n_keys, std::uint32_t block_space,
                             std::span<Block> forward, std::span<Block> inverse);
void grover_iteration(std::span<Amplitude> state, std::span<const std::uint8_t> marked);
double marked_mass(std::span<const Amplitude> state, std::span<const std::uint8_t> marked);
double squared_norm(std::span<const Amplitude> state);
void walk_search_step(const EdgeLayout& layout, std::span<const std::uint8_t> marked,
                      std::span<Amplitude> state, std::span<Amplitude> scratch);
void symmetric_matvec(const double* a, std::size_t n, std::span<const double> x, std::span<double> y);

}  // namespace parallel

// Thread cap from QMITM_THREADS (unset or invalid: OpenMP default).
int thread_limit();

}  // namespace qmitm::kernels
