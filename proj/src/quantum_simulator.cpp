#include "qmitm/quantum_simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>

#include "qmitm/errors.hpp"
#include "qmitm/quantum_cost_model.hpp"

namespace qmitm {

namespace {

void track(SimulationReport& report, double mass, double norm, std::uint64_t step) {
  report.marked_mass_trace.push_back(mass);
  report.max_norm_drift = std::max(report.max_norm_drift, std::abs(norm - 1.0));
  if (mass > report.peak_marked_mass) {
    report.peak_marked_mass = mass;
    report.peak_step = step;
  }
}

// Position of bit `b` among the set (or clear) bits of `mask` below N.
std::uint32_t rank_in(std::uint32_t mask, std::uint32_t b) { return std::popcount(mask & ((1u << b) - 1)); }

kernels::EdgeLayout johnson_layout(const JohnsonGraph& g) {
  kernels::EdgeLayout layout;
  layout.degree = g.degree();
  layout.reverse.resize(g.vertices.size() * layout.degree);
  const std::uint32_t full = (1u << g.n) - 1;
  const std::uint32_t outside = g.n - g.r;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const std::uint32_t mask = g.vertices[v];
    const std::uint32_t comp = full & ~mask;
    std::size_t local = 0;
    for (std::uint32_t a = 0; a < g.n; ++a) {
      if (!(mask >> a & 1)) continue;
      for (std::uint32_t b = 0; b < g.n; ++b) {
        if (!(comp >> b & 1)) continue;
        // Edge v -(drop a, add b)-> w; its reverse drops b and adds a at w.
        const std::uint32_t w = mask ^ (1u << a) ^ (1u << b);
        const std::uint32_t w_comp = full & ~w;
        const std::size_t back_local = static_cast<std::size_t>(rank_in(w, b)) * outside + rank_in(w_comp, a);
        layout.reverse[v * layout.degree + local] =
            static_cast<std::uint32_t>(g.vertex_index(w) * layout.degree + back_local);
        ++local;
      }
    }
  }
  return layout;
}

Eigen::SparseMatrix<double> tail_reflection(const kernels::EdgeLayout& layout) {
  const std::size_t dim = layout.dimension();
  const std::size_t d = layout.degree;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(dim * d);
  const double w = 2.0 / static_cast<double>(d);
  for (std::size_t off = 0; off < dim; off += d)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        entries.emplace_back(static_cast<int>(off + i), static_cast<int>(off + j), w - (i == j ? 1.0 : 0.0));
  Eigen::SparseMatrix<double> r(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  r.setFromTriplets(entries.begin(), entries.end());
  return r;
}

Eigen::SparseMatrix<double> swap_matrix(const kernels::EdgeLayout& layout) {
  const std::size_t dim = layout.dimension();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(dim);
  for (std::size_t e = 0; e < dim; ++e)
    entries.emplace_back(static_cast<int>(e), static_cast<int>(layout.reverse[e]), 1.0);
  Eigen::SparseMatrix<double> s(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

double identity_defect(const Eigen::SparseMatrix<double>& r) {
  Eigen::SparseMatrix<double> p = r * Eigen::SparseMatrix<double>(r.transpose());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < p.outerSize(); ++k) {
    double diag = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(p, k); it; ++it) {
      if (it.row() == it.col())
        diag = it.value();
      else
        worst = std::max(worst, std::abs(it.value()));
    }
    worst = std::max(worst, std::abs(diag - 1.0));
  }
  return worst;
}

}  // namespace

double StateVector::squared_norm() const { return kernels::serial::squared_norm(amplitudes); }

double grover_success_probability(std::uint64_t space_size, std::uint64_t marked_count, std::uint64_t iterations) {
  if (marked_count == 0) throw InfeasibleSearch("Grover search with no marked element");
  if (space_size == 0 || marked_count > space_size) throw ParameterError("need 1 <= marked <= space size");
  const double theta = std::asin(std::sqrt(static_cast<double>(marked_count) / static_cast<double>(space_size)));
  const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
  return s * s;
}

SimulationReport grover_simulate(std::uint64_t space_size, const std::vector<std::uint64_t>& marked,
                                 std::uint64_t iterations) {
  if (marked.empty()) throw InfeasibleSearch("Grover search with no marked element");
  if (space_size == 0) throw ParameterError("Grover search space is empty");
  if (space_size > kMaxGroverSpace)
    throw InfeasibleSize("Grover statevector limited to 2^14 amplitudes, got " + std::to_string(space_size));
  std::vector<std::uint8_t> flags(space_size, 0);
  for (auto m : marked) {
    if (m >= space_size) throw ParameterError("marked element outside the search space");
    if (flags[m]) throw ParameterError("marked element listed twice");
    flags[m] = 1;
  }

  StateVector psi{std::vector<Amplitude>(space_size, Amplitude(1.0 / std::sqrt(static_cast<double>(space_size))))};
  SimulationReport report;
  report.steps = iterations;
  report.stationary_marked_mass = static_cast<double>(marked.size()) / static_cast<double>(space_size);
  report.peak_classical_memory = 0;
  track(report, kernels::parallel::marked_mass(psi.amplitudes, flags), psi.squared_norm(), 0);
  for (std::uint64_t k = 1; k <= iterations; ++k) {
    kernels::parallel::grover_iteration(psi.amplitudes, flags);
    track(report, kernels::parallel::marked_mass(psi.amplitudes, flags),
          kernels::parallel::squared_norm(psi.amplitudes), k);
  }
  report.marked_probability = std::clamp(report.marked_mass_trace.back(), 0.0, 1.0);
  return report;
}

std::size_t JohnsonGraph::vertex_index(std::uint32_t mask) const {
  const auto it = std::lower_bound(vertices.begin(), vertices.end(), mask);
  if (it == vertices.end() || *it != mask) throw ParameterError("mask is not a vertex of the Johnson graph");
  return static_cast<std::size_t>(it - vertices.begin());
}

JohnsonGraph johnson_graph(std::uint32_t n, std::uint32_t r) {
  if (n > 20) throw InfeasibleSize("Johnson graph limited to N <= 20");
  if (r == 0 || r >= n) throw ParameterError("Johnson graph needs 1 <= r < N");
  JohnsonGraph g{n, r, {}};
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    if (static_cast<std::uint32_t>(std::popcount(mask)) == r) g.vertices.push_back(mask);
  return g;
}

Eigen::MatrixXd johnson_transition_matrix(const JohnsonGraph& g) {
  const auto size = static_cast<Eigen::Index>(g.vertices.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(size, size);
  const double w = 1.0 / static_cast<double>(g.degree());
  const std::uint32_t full = (1u << g.n) - 1;
  for (Eigen::Index v = 0; v < size; ++v) {
    const std::uint32_t mask = g.vertices[static_cast<std::size_t>(v)];
    for (std::uint32_t a = 0; a < g.n; ++a) {
      if (!(mask >> a & 1)) continue;
      for (std::uint32_t b = 0; b < g.n; ++b)
        if ((full & ~mask) >> b & 1)
          p(v, static_cast<Eigen::Index>(g.vertex_index(mask ^ (1u << a) ^ (1u << b)))) += w;
    }
  }
  return p;
}

double spectral_gap(const Eigen::MatrixXd& transition) {
  if (transition.rows() != transition.cols() || transition.rows() < 2)
    throw ParameterError("spectral gap needs a square matrix of size >= 2");
  if (!transition.isApprox(transition.transpose(), 1e-12)) throw ParameterError("transition matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(transition, Eigen::EigenvaluesOnly);
  Eigen::VectorXd mags = solver.eigenvalues().cwiseAbs();
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return 1.0 - mags[1];
}

WalkOperator::WalkOperator(JohnsonGraph graph, std::vector<std::uint8_t> marked_vertices)
    : graph_(std::move(graph)), marked_vertices_(std::move(marked_vertices)) {
  if (marked_vertices_.size() != graph_.vertices.size())
    throw ParameterError("marked-vertex flags must cover every vertex");
  const std::uint64_t dim = static_cast<std::uint64_t>(graph_.vertices.size()) * graph_.degree();
  if (dim > kMaxWalkDimension)
    throw InfeasibleSize("walk edge space of " + std::to_string(dim) + " exceeds 2^15");
  layout_ = johnson_layout(graph_);
  marked_edges_.assign(layout_.dimension(), 0);
  for (std::size_t v = 0; v < marked_vertices_.size(); ++v)
    if (marked_vertices_[v])
      std::fill_n(marked_edges_.begin() + static_cast<std::ptrdiff_t>(v * layout_.degree), layout_.degree, 1);
  reflect_tail_ = tail_reflection(layout_);
  const Eigen::SparseMatrix<double> s = swap_matrix(layout_);
  reflect_head_ = s * reflect_tail_ * s;
}

std::size_t WalkOperator::marked_vertex_count() const {
  return static_cast<std::size_t>(std::count(marked_vertices_.begin(), marked_vertices_.end(), 1));
}

double WalkOperator::orthogonality_defect() const {
  return std::max(identity_defect(reflect_tail_), identity_defect(reflect_head_));
}

WalkOperator WalkOperator::without_marks() const {
  return WalkOperator(graph_, std::vector<std::uint8_t>(graph_.vertices.size(), 0));
}

WalkOperator build_johnson_walk(std::uint32_t n, std::uint32_t r, std::pair<std::uint32_t, std::uint32_t> collision) {
  if (n > 12) throw ParameterError("Johnson walk needs N <= 12");
  if (r < 2 || r >= n) throw ParameterError("Johnson walk needs 2 <= r < N");
  const auto [i, j] = collision;
  if (i == j || i >= n || j >= n) throw ParameterError("collision pair must be two distinct keys in [N]");
  JohnsonGraph g = johnson_graph(n, r);
  const std::uint32_t pair_mask = (1u << i) | (1u << j);
  std::vector<std::uint8_t> marked(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v) marked[v] = (g.vertices[v] & pair_mask) == pair_mask;
  return WalkOperator(std::move(g), std::move(marked));
}

SimulationReport szegedy_walk_simulate(const WalkOperator& op, std::uint64_t steps) {
  const std::size_t dim = op.dimension();
  std::vector<Amplitude> state(dim, Amplitude(1.0 / std::sqrt(static_cast<double>(dim))));
  std::vector<Amplitude> scratch(dim);
  const auto& marked = op.marked_edges();

  SimulationReport report;
  report.steps = steps;
  report.stationary_marked_mass =
      static_cast<double>(op.marked_vertex_count()) / static_cast<double>(op.graph().vertices.size());
  report.peak_classical_memory = op.graph().r;
  track(report, kernels::parallel::marked_mass(state, marked), kernels::parallel::squared_norm(state), 0);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    kernels::parallel::walk_search_step(op.layout(), marked, state, scratch);
    track(report, kernels::parallel::marked_mass(state, marked), kernels::parallel::squared_norm(state), t);
  }
  report.marked_probability = std::clamp(report.marked_mass_trace.back(), 0.0, 1.0);
  return report;
}

std::uint64_t walk_step_budget(std::uint32_t n, std::uint32_t r, double c) {
  const WalkSpec w = claw_walk_params(n, r);
  return static_cast<std::uint64_t>(std::ceil(c / std::sqrt(w.spectral_gap * w.marked_fraction)));
}

}  // namespace qmitm
