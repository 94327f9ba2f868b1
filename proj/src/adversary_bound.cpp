#include "qmitm/adversary_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <omp.h>

#include "qmitm/errors.hpp"
#include "qmitm/kernels.hpp"
#include "qmitm/linalg.hpp"
#include "qmitm/rng.hpp"

namespace qmitm {

namespace {

using AnswerString = std::vector<std::uint32_t>;

enum class Verdict { Keep, Multiple, Direct, NonInjective };

bool has_duplicates(std::span<const std::uint32_t> values) {
  std::vector<std::uint32_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

Verdict classify(const AnswerString& cf, std::uint64_t solutions, const ProblemParams& params,
                 const PromiseOptions& promise) {
  const std::uint32_t n = params.n;
  if (solutions > 1) return Verdict::Multiple;
  if (promise.exclude_direct_keys)
    for (std::uint32_t k = 0; k < n; ++k)
      if (cf[k] == params.c || cf[n + k] == params.p) return Verdict::Direct;
  if (promise.require_injective) {
    const std::span<const std::uint32_t> s(cf);
    if (has_duplicates(s.first(n)) || has_duplicates(s.subspan(n, n))) return Verdict::NonInjective;
  }
  return Verdict::Keep;
}

void admit(InputEnumeration& e, AnswerString string, AnswerString projection, std::uint64_t solutions) {
  switch (classify(projection.empty() ? string : projection, solutions, e.params, e.promise)) {
    case Verdict::Multiple: ++e.counts.excluded_multiple; return;
    case Verdict::Direct: ++e.counts.excluded_direct; return;
    case Verdict::NonInjective: ++e.counts.excluded_noninjective; return;
    case Verdict::Keep: break;
  }
  const bool yes = solutions == 1;
  ++(yes ? e.counts.yes : e.counts.no);
  e.strings.push_back(std::move(string));
  e.labels.push_back(yes ? 1 : 0);
  if (!projection.empty()) e.projections.push_back(std::move(projection));
}

std::uint64_t checked_power(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > kMaxRawInputs) throw InfeasibleSize("enumeration exceeds 2^16 raw inputs");
  }
  return r;
}

std::vector<AnswerString> all_permutations(std::uint32_t m) {
  std::vector<AnswerString> perms;
  AnswerString p(m);
  std::iota(p.begin(), p.end(), 0u);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return perms;
}

// Forward rows followed by inverse rows.
AnswerString ke2_string(const AnswerString& forward, std::uint32_t n, std::uint32_t m) {
  AnswerString s(2 * static_cast<std::size_t>(n) * m);
  std::copy(forward.begin(), forward.end(), s.begin());
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t x = 0; x < m; ++x) s[(static_cast<std::size_t>(n) + k) * m + forward[k * m + x]] = x;
  return s;
}

// Calls f(forward) for every N-tuple of permutations of [M], key 0 most significant.
template <typename F>
void for_each_family(std::uint32_t n, std::uint32_t m, F&& f) {
  std::uint64_t factorial = 1;
  for (std::uint32_t i = 2; i <= m; ++i) {
    factorial *= i;
    if (factorial > kMaxRawInputs) throw InfeasibleSize("enumeration exceeds 2^16 raw inputs");
  }
  checked_power(factorial, n);
  const auto perms = all_permutations(m);
  std::vector<std::size_t> digit(n, 0);
  AnswerString forward(static_cast<std::size_t>(n) * m);
  while (true) {
    for (std::uint32_t k = 0; k < n; ++k) std::copy(perms[digit[k]].begin(), perms[digit[k]].end(), forward.begin() + k * m);
    f(forward);
    std::int64_t pos = static_cast<std::int64_t>(n) - 1;
    while (pos >= 0 && ++digit[pos] == perms.size()) digit[pos--] = 0;
    if (pos < 0) break;
  }
}

void require_ke2(const InputEnumeration& e, const char* what) {
  if (e.problem != Problem::KeyExtraction2) throw ParameterError(std::string(what) + " needs a KE2 enumeration");
}

std::vector<std::size_t> group_ids(const std::vector<AnswerString>& keys) {
  std::map<AnswerString, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(ids.emplace(k, ids.size()).first->second);
  return out;
}

// True when a is constant on every (group, group) block; `size` gets the
// common group size or 0 when sizes differ.
bool block_constant(const Eigen::MatrixXd& a, const std::vector<std::size_t>& group, std::size_t& size) {
  const std::size_t groups = group.empty() ? 0 : *std::max_element(group.begin(), group.end()) + 1;
  std::vector<std::size_t> rep(groups, group.size()), count(groups, 0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (rep[group[i]] == group.size()) rep[group[i]] = i;
    ++count[group[i]];
  }
  size = count.empty() ? 0 : count.front();
  for (auto c : count)
    if (c != size) size = 0;
  for (std::size_t i = 0; i < group.size(); ++i)
    for (std::size_t j = 0; j < group.size(); ++j)
      if (std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                   a(static_cast<Eigen::Index>(rep[group[i]]), static_cast<Eigen::Index>(rep[group[j]]))) > 1e-12)
        return false;
  return true;
}

Eigen::MatrixXd masked(const Eigen::MatrixXd& gamma, const InputEnumeration& e, std::size_t query) {
  return gamma.cwiseProduct(delta_mask_at(e, query).mask);
}

}  // namespace

const char* to_string(Problem p) {
  switch (p) {
    case Problem::Or2: return "or2";
    case Problem::ClawFinding: return "cf";
    case Problem::KeyExtraction2: return "ke2";
  }
  return "?";
}

std::size_t query_index(const InputEnumeration& e, const InputQuery& q) {
  if (q.direction != 1 && q.direction != -1) throw ParameterError("query direction must be +1 or -1");
  const std::size_t b_idx = q.direction == 1 ? 0 : 1;
  const auto& prm = e.params;
  switch (e.problem) {
    case Problem::Or2:
      if (q.key >= 2) throw ParameterError("OR2 has two queries");
      return q.key;
    case Problem::ClawFinding:
      if (q.key >= prm.n) throw ParameterError("CF query key outside [N]");
      return b_idx * prm.n + q.key;
    case Problem::KeyExtraction2:
      if (q.key >= prm.n || q.x >= prm.m) throw ParameterError("KE2 query outside [M] x [N]");
      return (b_idx * prm.n + q.key) * prm.m + q.x;
  }
  throw ParameterError("unknown problem");
}

InputQuery query_at(const InputEnumeration& e, std::size_t index) {
  const auto& prm = e.params;
  switch (e.problem) {
    case Problem::Or2: return {0, static_cast<std::uint32_t>(index), 1};
    case Problem::ClawFinding:
      return {0, static_cast<std::uint32_t>(index % prm.n), index < prm.n ? 1 : -1};
    case Problem::KeyExtraction2: {
      const auto x = static_cast<std::uint32_t>(index % prm.m);
      const std::size_t row = index / prm.m;
      return {x, static_cast<std::uint32_t>(row % prm.n), row < prm.n ? 1 : -1};
    }
  }
  throw ParameterError("unknown problem");
}

bool in_query_set(const InputEnumeration& e, const InputQuery& q) {
  if (e.problem != Problem::KeyExtraction2) return true;
  return (q.direction == 1 && q.x == e.params.p) || (q.direction == -1 && q.x == e.params.c);
}

std::vector<std::uint32_t> project_input(const std::vector<std::uint32_t>& forward, std::uint32_t n_keys,
                                         std::uint32_t block_space, Block p, Block c) {
  if (forward.size() != static_cast<std::size_t>(n_keys) * block_space)
    throw ParameterError("family table has the wrong size");
  AnswerString g(2 * static_cast<std::size_t>(n_keys));
  for (std::uint32_t k = 0; k < n_keys; ++k) {
    const auto row = std::span(forward).subspan(static_cast<std::size_t>(k) * block_space, block_space);
    g[k] = row[p];
    g[n_keys + k] = static_cast<std::uint32_t>(std::find(row.begin(), row.end(), c) - row.begin());
  }
  return g;
}

std::uint64_t ke2_solution_count(const std::vector<std::uint32_t>& forward, std::uint32_t n_keys,
                                 std::uint32_t block_space, Block p, Block c) {
  std::uint64_t count = 0;
  for (std::uint32_t k1 = 0; k1 < n_keys; ++k1) {
    const std::uint32_t mid = forward[static_cast<std::size_t>(k1) * block_space + p];
    for (std::uint32_t k2 = 0; k2 < n_keys; ++k2)
      if (forward[static_cast<std::size_t>(k2) * block_space + mid] == c) ++count;
  }
  return count;
}

std::uint64_t claw_count(const std::vector<std::uint32_t>& cf_string, std::uint32_t n_keys) {
  std::uint64_t count = 0;
  for (std::uint32_t a = 0; a < n_keys; ++a)
    for (std::uint32_t b = 0; b < n_keys; ++b)
      if (cf_string[a] == cf_string[n_keys + b]) ++count;
  return count;
}

InputEnumeration or2_inputs() {
  InputEnumeration e;
  e.problem = Problem::Or2;
  e.params = {2, 2, 0, 0};
  e.strings = {{0, 0}, {0, 1}, {1, 0}};
  e.labels = {0, 1, 1};
  e.counts = {3, 2, 1, 0, 0, 0};
  return e;
}

InputEnumeration enumerate_inputs(Problem problem, std::uint32_t n_keys, std::uint32_t block_space, Block p,
                                  Block c, PromiseOptions promise) {
  if (problem == Problem::Or2) return or2_inputs();
  if (n_keys < 1 || block_space < 2) throw ParameterError("enumeration needs N >= 1 and M >= 2");
  if (p >= block_space || c >= block_space) throw ParameterError("P and C must lie in [M]");
  InputEnumeration e;
  e.problem = problem;
  e.params = {n_keys, block_space, p, c};
  e.promise = promise;

  if (problem == Problem::ClawFinding) {
    const std::uint32_t len = 2 * n_keys;
    e.counts.raw = checked_power(block_space, len);
    AnswerString g(len, 0);
    for (std::uint64_t i = 0; i < e.counts.raw; ++i) {
      admit(e, g, {}, claw_count(g, n_keys));
      std::int64_t pos = len - 1;
      while (pos >= 0 && ++g[pos] == block_space) g[pos--] = 0;
    }
    return e;
  }

  for_each_family(n_keys, block_space, [&](const AnswerString& forward) {
    ++e.counts.raw;
    admit(e, ke2_string(forward, n_keys, block_space), project_input(forward, n_keys, block_space, p, c),
          ke2_solution_count(forward, n_keys, block_space, p, c));
  });
  return e;
}

void validate_adversary(const AdversaryMatrix& gamma, const InputEnumeration& e) {
  const auto n = static_cast<Eigen::Index>(e.size());
  if (gamma.matrix.rows() != n || gamma.matrix.cols() != n)
    throw ParameterError("adversary matrix does not match the enumeration");
  if (!is_symmetric(gamma.matrix)) throw ParameterError("adversary matrix is not symmetric");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (e.labels[i] == e.labels[j] && gamma.matrix(i, j) != 0.0)
        throw ParameterError("adversary matrix is non-zero between inputs with equal outputs");
}

AdversaryMatrix uniform_adversary(const InputEnumeration& e) {
  if (e.size() > kMaxMatrixInputs) throw InfeasibleSize("adversary matrix limited to 4096 inputs");
  const auto n = static_cast<Eigen::Index>(e.size());
  AdversaryMatrix g{Eigen::MatrixXd::Zero(n, n), e.problem};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (e.labels[i] != e.labels[j]) g.matrix(i, j) = 1.0;
  return g;
}

DeltaMask delta_mask_at(const InputEnumeration& e, std::size_t index) {
  if (index >= e.query_count()) throw ParameterError("query index out of range");
  const auto n = static_cast<Eigen::Index>(e.size());
  DeltaMask d{index, Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (e.strings[i][index] != e.strings[j][index]) d.mask(i, j) = 1.0;
  return d;
}

DeltaMask delta_mask(const InputEnumeration& e, const InputQuery& q) { return delta_mask_at(e, query_index(e, q)); }

std::vector<DeltaMask> all_delta_masks(const InputEnumeration& e) {
  std::vector<DeltaMask> masks;
  for (std::size_t l = 0; l < e.query_count(); ++l) masks.push_back(delta_mask_at(e, l));
  return masks;
}

std::vector<double> masked_norms(const AdversaryMatrix& gamma, const InputEnumeration& e) {
  if (!is_symmetric(gamma.matrix)) throw ParameterError("adversary matrix is not symmetric");
  const auto queries = static_cast<std::int64_t>(e.query_count());
  std::vector<double> norms(static_cast<std::size_t>(queries));
  const int limit = kernels::thread_limit();
#pragma omp parallel for schedule(dynamic) num_threads(limit > 0 ? limit : omp_get_max_threads())
  for (std::int64_t l = 0; l < queries; ++l)
    norms[l] = spectral_norm(masked(gamma.matrix, e, static_cast<std::size_t>(l)), false);
  return norms;
}

double adv_value(const AdversaryMatrix& gamma, const std::vector<DeltaMask>& masks) {
  const double norm = spectral_norm(gamma.matrix);
  if (norm == 0.0) throw UndefinedValue("adversary value of a zero matrix is undefined");
  double best = -1.0;
  for (const auto& d : masks) {
    const double mn = spectral_norm(gamma.matrix.cwiseProduct(d.mask));
    if (mn <= 1e-12 * norm) continue;
    const double ratio = norm / mn;
    if (best < 0 || ratio < best) best = ratio;
  }
  if (best < 0) throw UndefinedValue("no query separates any weighted pair");
  return best;
}

double adv_value(const AdversaryMatrix& gamma, const InputEnumeration& e) {
  const double norm = spectral_norm(gamma.matrix);
  if (norm == 0.0) throw UndefinedValue("adversary value of a zero matrix is undefined");
  double best = -1.0;
  for (double mn : masked_norms(gamma, e)) {
    if (mn <= 1e-12 * norm) continue;
    if (best < 0 || norm / mn < best) best = norm / mn;
  }
  if (best < 0) throw UndefinedValue("no query separates any weighted pair");
  return best;
}

AdversaryMatrix lift_cf_to_ke2(const AdversaryMatrix& gamma_cf, const InputEnumeration& cf,
                               const InputEnumeration& ke2) {
  require_ke2(ke2, "lift_cf_to_ke2");
  if (cf.problem != Problem::ClawFinding) throw ParameterError("lift_cf_to_ke2 needs a CF enumeration");
  if (ke2.size() > kMaxMatrixInputs) throw InfeasibleSize("adversary matrix limited to 4096 inputs");
  projection_order(cf, ke2);  // throws on a projection outside `cf`
  std::map<AnswerString, Eigen::Index> position;
  for (std::size_t i = 0; i < cf.size(); ++i) position.emplace(cf.strings[i], static_cast<Eigen::Index>(i));
  std::vector<Eigen::Index> proj(ke2.size());
  for (std::size_t i = 0; i < ke2.size(); ++i) proj[i] = position.at(ke2.projections[i]);
  const auto n = static_cast<Eigen::Index>(ke2.size());
  AdversaryMatrix g{Eigen::MatrixXd(n, n), Problem::KeyExtraction2};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g.matrix(i, j) = gamma_cf.matrix(proj[i], proj[j]);
  return g;
}

std::vector<std::size_t> projection_order(const InputEnumeration& cf, const InputEnumeration& ke2) {
  require_ke2(ke2, "projection_order");
  const auto& a = cf.params;
  const auto& b = ke2.params;
  if (a.n != b.n || a.m != b.m || a.p != b.p || a.c != b.c)
    throw ParameterError("CF and KE2 enumerations use different (N, M, P, C)");
  std::map<AnswerString, std::size_t> position;
  for (std::size_t i = 0; i < cf.size(); ++i) position.emplace(cf.strings[i], i);
  std::vector<std::size_t> key(ke2.size());
  for (std::size_t i = 0; i < ke2.size(); ++i) {
    const auto it = position.find(ke2.projections[i]);
    if (it == position.end()) throw ParameterError("a KE2 input projects outside the CF enumeration");
    key[i] = it->second;
  }
  std::vector<std::size_t> order(ke2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });
  return order;
}

FiberReport fiber_sizes(const InputEnumeration& cf, const InputEnumeration& ke2) {
  require_ke2(ke2, "fiber_sizes");
  std::map<AnswerString, std::size_t> fiber;
  for (const auto& s : cf.strings) fiber.emplace(s, 0);
  for (const auto& proj : ke2.projections) {
    const auto it = fiber.find(proj);
    if (it == fiber.end()) throw ParameterError("a KE2 input projects outside the CF enumeration");
    ++it->second;
  }
  FiberReport r;
  for (const auto& [s, count] : fiber) {
    if (count == 0) continue;
    ++r.histogram[count];
    ++r.reached;
  }
  if (r.histogram.size() == 1) r.constant_size = r.histogram.begin()->first;
  return r;
}

FiberReport unrestricted_fiber_sizes(std::uint32_t n_keys, std::uint32_t block_space, Block p, Block c) {
  if (p >= block_space || c >= block_space) throw ParameterError("P and C must lie in [M]");
  std::map<AnswerString, std::size_t> fiber;
  for_each_family(n_keys, block_space, [&](const AnswerString& forward) {
    ++fiber[project_input(forward, n_keys, block_space, p, c)];
  });
  FiberReport r;
  for (const auto& [s, count] : fiber) {
    ++r.histogram[count];
    ++r.reached;
  }
  if (r.histogram.size() == 1) r.constant_size = r.histogram.begin()->first;
  return r;
}

TensorCheck check_tensor_structure(const AdversaryMatrix& gamma_cf, const InputEnumeration& cf,
                                   const AdversaryMatrix& gamma_ke2, const InputEnumeration& ke2,
                                   std::optional<InputQuery> query, double tolerance) {
  validate_adversary(gamma_cf, cf);
  validate_adversary(gamma_ke2, ke2);
  Eigen::MatrixXd a = gamma_ke2.matrix;
  Eigen::MatrixXd b = gamma_cf.matrix;
  if (query) {
    if (!in_query_set(ke2, *query)) throw ParameterError("tensor identity holds only for queries in I");
    a = a.cwiseProduct(delta_mask(ke2, *query).mask);
    b = b.cwiseProduct(delta_mask(cf, InputQuery{0, query->key, query->direction}).mask);
  }

  TensorCheck t;
  const FiberReport fibers = fiber_sizes(cf, ke2);
  t.fibers_constant = fibers.constant_size.has_value();
  t.fiber_size = fibers.constant_size.value_or(0);
  t.covers_cf = fibers.reached == cf.size();
  t.norm_ke2 = spectral_norm(a);
  t.norm_cf = spectral_norm(b);
  if (!t.fibers_constant || !t.covers_cf) return t;

  const auto order = projection_order(cf, ke2);
  const std::size_t d = t.fiber_size;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) {
      const double got = a(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
      const double want = b(static_cast<Eigen::Index>(i / d), static_cast<Eigen::Index>(j / d));
      t.max_abs_difference = std::max(t.max_abs_difference, std::abs(got - want));
    }
  t.pass = t.max_abs_difference <= tolerance &&
           std::abs(t.norm_ke2 - static_cast<double>(d) * t.norm_cf) <= 1e-6;
  return t;
}

QueryReductionReport verify_query_reduction(const AdversaryMatrix& gamma_ke2, const InputEnumeration& ke2,
                                            double tolerance) {
  require_ke2(ke2, "verify_query_reduction");
  validate_adversary(gamma_ke2, ke2);
  const auto& prm = ke2.params;
  const std::size_t table = static_cast<std::size_t>(prm.n) * prm.m;

  QueryReductionReport report;
  const auto norms = masked_norms(gamma_ke2, ke2);
  for (std::size_t l = 0; l < norms.size(); ++l) {
    report.max_all = std::max(report.max_all, norms[l]);
    if (in_query_set(ke2, query_at(ke2, l))) report.max_in_query_set = std::max(report.max_in_query_set, norms[l]);
  }
  const double base_norm = spectral_norm(gamma_ke2.matrix);
  const double tie = 1e-9 * std::max(1.0, report.max_all);

  report.pass = true;
  for (std::size_t l = 0; l < norms.size(); ++l) {
    if (norms[l] < report.max_all - tie) continue;
    ConjugationCheck chk;
    chk.original = query_at(ke2, l);
    chk.original_norm = norms[l];
    const bool fwd = chk.original.direction == 1;
    const Block anchor = fwd ? prm.p : prm.c;
    chk.target = {anchor, chk.original.key, chk.original.direction};
    chk.sigma.resize(prm.m);
    std::iota(chk.sigma.begin(), chk.sigma.end(), 0u);
    std::swap(chk.sigma[chk.original.x], chk.sigma[anchor]);

    // u -> u^sigma: F_k o sigma carries (x*, k, +1) to (P, k, +1); sigma o F_k
    // carries (x*, k, -1) to (C, k, -1).
    std::vector<AnswerString> relabelled(ke2.size());
    for (std::size_t i = 0; i < ke2.size(); ++i) {
      AnswerString forward(table);
      for (std::uint32_t k = 0; k < prm.n; ++k)
        for (std::uint32_t x = 0; x < prm.m; ++x) {
          const std::uint32_t f = ke2.strings[i][k * prm.m + x];
          forward[k * prm.m + x] = fwd ? ke2.strings[i][k * prm.m + chk.sigma[x]] : chk.sigma[f];
        }
      relabelled[i] = ke2_string(forward, prm.n, prm.m);
    }
    std::vector<std::size_t> order(ke2.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return relabelled[a] < relabelled[b]; });

    InputEnumeration conj;
    conj.problem = Problem::KeyExtraction2;
    conj.params = prm;
    conj.promise = ke2.promise;
    const auto n = static_cast<Eigen::Index>(ke2.size());
    AdversaryMatrix gp{Eigen::MatrixXd(n, n), Problem::KeyExtraction2};
    for (Eigen::Index i = 0; i < n; ++i) {
      conj.strings.push_back(relabelled[order[i]]);
      conj.labels.push_back(ke2.labels[order[i]]);
      for (Eigen::Index j = 0; j < n; ++j) gp.matrix(i, j) = gamma_ke2.matrix(order[i], order[j]);
    }

    const auto conj_norms = masked_norms(gp, conj);
    chk.conjugated_norm = conj_norms[query_index(conj, chk.target)];
    for (std::size_t q = 0; q < conj_norms.size(); ++q)
      if (in_query_set(conj, query_at(conj, q))) chk.max_in_query_set = std::max(chk.max_in_query_set, conj_norms[q]);
    chk.isometry_defect = std::abs(spectral_norm(gp.matrix) - base_norm);

    const Block p2 = fwd ? chk.sigma[prm.p] : prm.p;
    const Block c2 = fwd ? prm.c : chk.sigma[prm.c];
    std::vector<AnswerString> at_conjugated, at_literal;
    for (const auto& s : conj.strings) {
      const AnswerString forward(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(table));
      at_conjugated.push_back(project_input(forward, prm.n, prm.m, p2, c2));
      at_literal.push_back(project_input(forward, prm.n, prm.m, prm.p, prm.c));
    }
    chk.block_constant = block_constant(gp.matrix, group_ids(at_conjugated), chk.group_size);
    std::size_t literal_size = 0;
    chk.literal_grouping_block_constant = block_constant(gp.matrix, group_ids(at_literal), literal_size);

    const bool ok = std::abs(chk.conjugated_norm - report.max_all) <= tolerance &&
                    std::abs(chk.max_in_query_set - report.max_all) <= tolerance && chk.block_constant &&
                    chk.group_size > 0 && chk.isometry_defect <= tolerance;
    report.pass = report.pass && ok;
    report.checks.push_back(std::move(chk));
  }
  return report;
}

AdversaryMatrix optimize_adversary(const InputEnumeration& e, std::uint64_t iterations, std::uint64_t seed) {
  if (e.size() > 64) throw InfeasibleSize("optimize_adversary is limited to 64 inputs");
  AdversaryMatrix best = uniform_adversary(e);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < best.size(); ++i)
    for (Eigen::Index j = i + 1; j < best.size(); ++j)
      if (e.labels[i] != e.labels[j]) pairs.emplace_back(i, j);
  if (pairs.empty()) return best;

  const auto masks = all_delta_masks(e);
  double best_value = adv_value(best, masks);
  Rng rng(seed);
  double step = 0.5;
  AdversaryMatrix trial = best;
  for (std::uint64_t it = 0; it < iterations; ++it) {
    const auto [i, j] = pairs[rng.below(pairs.size())];
    const double w = best.matrix(i, j) * std::exp(step * (2.0 * rng.uniform01() - 1.0));
    trial.matrix(i, j) = trial.matrix(j, i) = w;
    const double v = adv_value(trial, masks);
    if (v > best_value) {
      best_value = v;
      best.matrix(i, j) = best.matrix(j, i) = w;
    } else {
      trial.matrix(i, j) = trial.matrix(j, i) = best.matrix(i, j);
      step = std::max(0.05, step * 0.995);
    }
  }
  return best;
}

}  // namespace qmitm
