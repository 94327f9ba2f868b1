#pragma once

// Exact small-scale simulation backing the cost model: a statevector Grover
// search and a Szegedy-quantized Johnson-graph walk searching for a planted
// collision. Checking is a perfect phase oracle; register costs live in the
// cost model, not here.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qmitm/kernels.hpp"

namespace qmitm {

using Amplitude = kernels::Amplitude;

inline constexpr std::uint64_t kMaxGroverSpace = std::uint64_t{1} << 14;
inline constexpr std::uint64_t kMaxWalkDimension = std::uint64_t{1} << 15;
inline constexpr double kUnitarityTolerance = 1e-9;

struct StateVector {
  std::vector<Amplitude> amplitudes;

  std::size_t dimension() const noexcept { return amplitudes.size(); }
  double squared_norm() const;
};

struct SimulationReport {
  std::uint64_t steps = 0;
  double marked_probability = 0.0;  // after the last step
  double stationary_marked_mass = 0.0;
  std::uint64_t peak_classical_memory = 0;
  std::vector<double> marked_mass_trace;  // entry t: after t steps (entry 0: start)
  double peak_marked_mass = 0.0;
  std::uint64_t peak_step = 0;
  double max_norm_drift = 0.0;
};

// sin^2((2k+1) arcsin sqrt(t/M)).
double grover_success_probability(std::uint64_t space_size, std::uint64_t marked_count, std::uint64_t iterations);

SimulationReport grover_simulate(std::uint64_t space_size, const std::vector<std::uint64_t>& marked,
                                 std::uint64_t iterations);

// Johnson graph J(N, r) with vertices encoded as r-bit masks over [N].
struct JohnsonGraph {
  std::uint32_t n = 0;
  std::uint32_t r = 0;
  std::vector<std::uint32_t> vertices;  // sorted masks

  std::size_t degree() const noexcept { return static_cast<std::size_t>(r) * (n - r); }
  std::size_t vertex_index(std::uint32_t mask) const;
};

JohnsonGraph johnson_graph(std::uint32_t n, std::uint32_t r);

// Uniform random walk on J(N, r): swap one member for one non-member.
Eigen::MatrixXd johnson_transition_matrix(const JohnsonGraph& graph);

// 1 - (second largest |eigenvalue|) of a symmetric stochastic matrix.
double spectral_gap(const Eigen::MatrixXd& transition);

class WalkOperator {
 public:
  WalkOperator(JohnsonGraph graph, std::vector<std::uint8_t> marked_vertices);

  const JohnsonGraph& graph() const noexcept { return graph_; }
  const kernels::EdgeLayout& layout() const noexcept { return layout_; }
  std::size_t dimension() const noexcept { return layout_.dimension(); }
  const std::vector<std::uint8_t>& marked_vertices() const noexcept { return marked_vertices_; }
  const std::vector<std::uint8_t>& marked_edges() const noexcept { return marked_edges_; }
  std::size_t marked_vertex_count() const;

  // R_A: reflection about span{|x> (x) |p_x>}; R_B = S R_A S with S the edge swap.
  const Eigen::SparseMatrix<double>& reflect_tail() const noexcept { return reflect_tail_; }
  const Eigen::SparseMatrix<double>& reflect_head() const noexcept { return reflect_head_; }

  // max |R R^T - I| over both reflections.
  double orthogonality_defect() const;

  WalkOperator without_marks() const;

 private:
  JohnsonGraph graph_;
  kernels::EdgeLayout layout_;
  std::vector<std::uint8_t> marked_vertices_;
  std::vector<std::uint8_t> marked_edges_;
  Eigen::SparseMatrix<double> reflect_tail_;
  Eigen::SparseMatrix<double> reflect_head_;
};

// Vertices containing both i and j are marked. Requires 2 <= r < N <= 12,
// i != j, and an edge space of at most 2^15.
WalkOperator build_johnson_walk(std::uint32_t n, std::uint32_t r, std::pair<std::uint32_t, std::uint32_t> collision);

// From the stationary superposition (uniform over directed edges), applies
// `steps` rounds of marked-phase flip followed by R_B R_A, recording the
// probability that the tail-vertex register is marked.
SimulationReport szegedy_walk_simulate(const WalkOperator& op, std::uint64_t steps);

// ceil(c / sqrt(delta * eps)) using the cost-model parameters of J(N, r).
std::uint64_t walk_step_budget(std::uint32_t n, std::uint32_t r, double c = 3.0);

}  // namespace qmitm
