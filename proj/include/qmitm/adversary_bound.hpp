#pragma once

// Exhaustive tiny-instance machinery for the generalized adversary bound:
// enumerations of claw-finding (CF) and double-encryption key-extraction (KE2)
// inputs, adversary matrices over them, Delta masks, the projection-based lift
// from CF to KE2 and numeric checks of its tensor structure.
//
// Every input is stored as its answer string: the answer to query l on input i
// is strings[i][l].
//   KE2: l = ((b_idx * N) + k) * M + x, answer F_k(x) (b = +1, b_idx = 0) or
//        F_k^-1(x) (b = -1, b_idx = 1).
//   CF:  l = b_idx * N + k, answer G_1(k) (b_idx = 0) or G_2(k) (b_idx = 1).
//   OR2: l = bit index.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qmitm/permutation_oracle.hpp"

namespace qmitm {

enum class Problem { Or2, ClawFinding, KeyExtraction2 };

const char* to_string(Problem p);

struct ProblemParams {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  Block p = 0;
  Block c = 0;
};

// Promise on the projected CF instance. Unique-claw is always imposed; a "direct
// key" is a single k with G_1(k) = C or G_2(k) = P.
struct PromiseOptions {
  bool exclude_direct_keys = true;
  bool require_injective = false;
};

struct EnumerationCounts {
  std::uint64_t raw = 0;
  std::uint64_t yes = 0;
  std::uint64_t no = 0;
  std::uint64_t excluded_multiple = 0;
  std::uint64_t excluded_direct = 0;
  std::uint64_t excluded_noninjective = 0;
};

struct InputEnumeration {
  Problem problem = Problem::Or2;
  ProblemParams params;
  PromiseOptions promise;
  std::vector<std::vector<std::uint32_t>> strings;
  std::vector<std::uint8_t> labels;
  // KE2 only: the CF answer string (G_1 then G_2) of each input.
  std::vector<std::vector<std::uint32_t>> projections;
  EnumerationCounts counts;

  std::size_t size() const noexcept { return strings.size(); }
  std::size_t query_count() const noexcept { return strings.empty() ? 0 : strings.front().size(); }
};

// (x, k, b) for KE2; (k, b) for CF with x ignored; (k) = bit index for OR2.
struct InputQuery {
  std::uint32_t x = 0;
  std::uint32_t key = 0;
  int direction = 1;

  friend bool operator==(const InputQuery&, const InputQuery&) = default;
};

std::size_t query_index(const InputEnumeration& e, const InputQuery& q);
InputQuery query_at(const InputEnumeration& e, std::size_t index);
// The set I: (P, k, +1) and (C, k, -1).
bool in_query_set(const InputEnumeration& e, const InputQuery& q);

inline constexpr std::uint64_t kMaxRawInputs = std::uint64_t{1} << 16;
inline constexpr std::size_t kMaxMatrixInputs = 4096;

InputEnumeration enumerate_inputs(Problem problem, std::uint32_t n_keys, std::uint32_t block_space, Block p,
                                  Block c, PromiseOptions promise = {});
InputEnumeration or2_inputs();

// (G_1, G_2) with G_1(k) = F_k(P), G_2(k) = F_k^-1(C); `forward` holds N rows of M.
std::vector<std::uint32_t> project_input(const std::vector<std::uint32_t>& forward, std::uint32_t n_keys,
                                         std::uint32_t block_space, Block p, Block c);

// Number of (k1, k2) with F_k2(F_k1(P)) = C, by exhaustive key search.
std::uint64_t ke2_solution_count(const std::vector<std::uint32_t>& forward, std::uint32_t n_keys,
                                 std::uint32_t block_space, Block p, Block c);

// Number of (k1, k2) with G_1(k1) = G_2(k2).
std::uint64_t claw_count(const std::vector<std::uint32_t>& cf_string, std::uint32_t n_keys);

struct AdversaryMatrix {
  Eigen::MatrixXd matrix;
  Problem problem = Problem::Or2;

  Eigen::Index size() const noexcept { return matrix.rows(); }
};

// Throws ParameterError unless symmetric and zero on equal-label pairs.
void validate_adversary(const AdversaryMatrix& gamma, const InputEnumeration& e);

// 1 between every yes/no pair.
AdversaryMatrix uniform_adversary(const InputEnumeration& e);

struct DeltaMask {
  std::size_t query = 0;
  Eigen::MatrixXd mask;
};

DeltaMask delta_mask(const InputEnumeration& e, const InputQuery& q);
DeltaMask delta_mask_at(const InputEnumeration& e, std::size_t index);
std::vector<DeltaMask> all_delta_masks(const InputEnumeration& e);

// ||Gamma o Delta_l|| for every query l, computed concurrently.
std::vector<double> masked_norms(const AdversaryMatrix& gamma, const InputEnumeration& e);

// min_l ||Gamma|| / ||Gamma o Delta_l||, skipping queries whose masked matrix
// vanishes. Throws UndefinedValue on a zero Gamma.
double adv_value(const AdversaryMatrix& gamma, const std::vector<DeltaMask>& masks);
double adv_value(const AdversaryMatrix& gamma, const InputEnumeration& e);

// Gamma_KE2[u, v] = Gamma_CF[proj(u), proj(v)].
AdversaryMatrix lift_cf_to_ke2(const AdversaryMatrix& gamma_cf, const InputEnumeration& cf,
                               const InputEnumeration& ke2);

struct FiberReport {
  std::map<std::size_t, std::size_t> histogram;  // fibre size -> number of CF inputs with it
  std::size_t reached = 0;                        // CF inputs with a non-empty fibre
  std::optional<std::size_t> constant_size;       // D, when every reached fibre agrees
};

FiberReport fiber_sizes(const InputEnumeration& cf, const InputEnumeration& ke2);
// Over all (M!)^N families with no promise applied.
FiberReport unrestricted_fiber_sizes(std::uint32_t n_keys, std::uint32_t block_space, Block p, Block c);

// KE2 indices stably sorted by the index of their projection in `cf`.
std::vector<std::size_t> projection_order(const InputEnumeration& cf, const InputEnumeration& ke2);

struct TensorCheck {
  std::size_t fiber_size = 0;
  bool fibers_constant = false;
  bool covers_cf = false;
  double max_abs_difference = 0.0;  // sorted Gamma_KE2 vs Gamma_CF (x) J
  double norm_ke2 = 0.0;
  double norm_cf = 0.0;
  bool pass = false;
};

// Projection-sorted Gamma_KE2 against Gamma_CF (x) J_{DxD}; with `query` set,
// compares Gamma_KE2 o Delta_q against (Gamma_CF o Delta_q~) (x) J for q in I.
TensorCheck check_tensor_structure(const AdversaryMatrix& gamma_cf, const InputEnumeration& cf,
                                   const AdversaryMatrix& gamma_ke2, const InputEnumeration& ke2,
                                   std::optional<InputQuery> query = std::nullopt, double tolerance = 1e-9);

struct ConjugationCheck {
  InputQuery original;
  InputQuery target;  // the query in I it is carried to
  std::vector<std::uint32_t> sigma;
  double original_norm = 0.0;
  double conjugated_norm = 0.0;
  double isometry_defect = 0.0;  // | ||Pi Gamma Pi^T|| - ||Gamma|| |
  double max_in_query_set = 0.0;  // after conjugation
  bool block_constant = false;    // grouped by the projection at the conjugated point
  std::size_t group_size = 0;
  bool literal_grouping_block_constant = false;  // grouped at (P, C); diagnostic only
};

struct QueryReductionReport {
  double max_all = 0.0;
  double max_in_query_set = 0.0;  // before conjugation
  std::vector<ConjugationCheck> checks;  // one per maximiser
  bool pass = false;
};

QueryReductionReport verify_query_reduction(const AdversaryMatrix& gamma_ke2, const InputEnumeration& ke2,
                                            double tolerance = 1e-6);

// Seeded coordinate ascent over the weights of differing-label pairs, starting
// from the uniform matrix. Returns the best matrix seen.
AdversaryMatrix optimize_adversary(const InputEnumeration& e, std::uint64_t iterations, std::uint64_t seed);

}  // namespace qmitm
