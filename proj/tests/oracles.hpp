#pragma once

// Independent reference computations for the tests. None of these call into
// the code under test beyond reading raw tables.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qmitm/permutation_oracle.hpp"

namespace oracle {

using qmitm::Block;
using qmitm::Key;

// Every key tuple consistent with all pairs, by direct table lookups.
inline std::vector<std::vector<Key>> brute_force_solutions(const qmitm::Instance& inst) {
  const auto& fam = inst.family();
  const std::uint32_t n = fam.n_keys();
  const std::uint32_t depth = inst.depth();
  std::vector<std::vector<Key>> out;
  std::vector<Key> t(depth, 0);
  while (true) {
    bool ok = true;
    for (const auto& pc : inst.pairs()) {
      Block x = pc.plaintext;
      for (Key k : t) x = fam.forward_row(k)[x];
      if (x != pc.ciphertext) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(t);
    int pos = static_cast<int>(depth) - 1;
    while (pos >= 0 && ++t[pos] == n) t[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

// Grover probability by iterating the exact two-dimensional recurrence on the
// (marked, unmarked) amplitudes in long double.
inline double grover_recurrence(std::uint64_t space, std::uint64_t marked, std::uint64_t k) {
  const long double m = static_cast<long double>(space);
  const long double t = static_cast<long double>(marked);
  long double a = 1.0L / std::sqrt(m);  // each marked amplitude
  long double b = a;                    // each unmarked amplitude
  for (std::uint64_t i = 0; i < k; ++i) {
    a = -a;
    const long double mean = (t * a + (m - t) * b) / m;
    a = 2 * mean - a;
    b = 2 * mean - b;
  }
  return static_cast<double>(t * a * a);
}

// Eigenvalues of the J(N, r) random walk: 1 - j(N+1-j)/(r(N-r)), j = 0..r.
inline double johnson_eigenvalue(std::uint32_t n, std::uint32_t r, std::uint32_t j) {
  return 1.0 - static_cast<double>(j) * (n + 1.0 - j) / (static_cast<double>(r) * (n - r));
}

inline std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  std::uint64_t b = 1;
  for (std::uint32_t i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Dense edge-space walk: U = S R S R O with R the blockwise reflection, S the
// edge reversal and O the phase flip on marked edges. The edge basis is built
// here from (tail, head) pairs, independently of the library layout.
struct DenseWalk {
  Eigen::MatrixXd step;
  std::vector<std::uint8_t> marked_edge;
};

inline DenseWalk dense_johnson_walk(std::uint32_t n, std::uint32_t r, std::uint32_t i, std::uint32_t j) {
  std::vector<std::uint32_t> verts;
  for (std::uint32_t s = 0; s < (1u << n); ++s)
    if (static_cast<std::uint32_t>(__builtin_popcount(s)) == r) verts.push_back(s);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (tail mask, head mask)
  std::vector<std::size_t> block_start;
  for (auto v : verts) {
    block_start.push_back(edges.size());
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        if ((v >> a & 1) && !(v >> b & 1)) edges.emplace_back(v, v ^ (1u << a) ^ (1u << b));
  }
  const auto dim = static_cast<Eigen::Index>(edges.size());
  const std::size_t d = static_cast<std::size_t>(r) * (n - r);
  Eigen::MatrixXd refl = -Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t s : block_start)
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q) refl(s + p, s + q) += 2.0 / d;
  Eigen::MatrixXd swap = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index e = 0; e < dim; ++e)
    for (Eigen::Index f = 0; f < dim; ++f)
      if (edges[e].first == edges[f].second && edges[e].second == edges[f].first) swap(e, f) = 1.0;
  DenseWalk w;
  Eigen::MatrixXd phase = Eigen::MatrixXd::Identity(dim, dim);
  const std::uint32_t pair = (1u << i) | (1u << j);
  for (Eigen::Index e = 0; e < dim; ++e) {
    const bool m = (edges[e].first & pair) == pair;
    w.marked_edge.push_back(m);
    if (m) phase(e, e) = -1.0;
  }
  w.step = swap * refl * swap * refl * phase;
  return w;
}

}  // namespace oracle
