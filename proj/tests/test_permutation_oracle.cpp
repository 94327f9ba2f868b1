#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "qmitm/errors.hpp"
#include "qmitm/kernels.hpp"
#include "qmitm/permutation_oracle.hpp"
#include "qmitm/rng.hpp"
#include "qmitm/serialization.hpp"

using namespace qmitm;

namespace {

FamilyPtr family(std::uint64_t seed, std::uint32_t n, std::uint32_t m) {
  return std::make_shared<const PermutationFamily>(generate_family(seed, n, m));
}

FamilyPtr identity_family(std::uint32_t n, std::uint32_t m) {
  std::vector<Block> fwd(static_cast<std::size_t>(n) * m);
  for (std::uint32_t k = 0; k < n; ++k) std::iota(fwd.begin() + k * m, fwd.begin() + (k + 1) * m, 0u);
  return std::make_shared<const PermutationFamily>(n, m, 0, std::move(fwd));
}

}  // namespace

TEST_CASE("generated families are bijections with matching inverses") {
  SUBCASE("N=1, M=4") {
    const auto f = generate_family(42, 1, 4);
    CHECK(is_bijection(f.forward_row(0)));
    for (Block x = 0; x < 4; ++x) CHECK(f.inverse(0, f.forward(0, x)) == x);
  }
  SUBCASE("N=8, M=8, both directions") {
    const auto f = generate_family(7, 8, 8);
    for (Key k = 0; k < 8; ++k)
      for (Block x = 0; x < 8; ++x) {
        CHECK(f.inverse(k, f.forward(k, x)) == x);
        CHECK(f.forward(k, f.inverse(k, x)) == x);
      }
  }
  SUBCASE("exhaustive round trip at M=4096") {
    const auto f = generate_family(3, 4, 4096);
    for (Key k = 0; k < 4; ++k) {
      REQUIRE(is_bijection(f.forward_row(k)));
      for (Block x = 0; x < 4096; ++x) REQUIRE(f.inverse(k, f.forward(k, x)) == x);
    }
  }
}

TEST_CASE("family generation is a pure function of (seed, N, M)") {
  CHECK(serialize_family(generate_family(7, 8, 8)) == serialize_family(generate_family(7, 8, 8)));
  std::set<std::vector<std::uint8_t>> seen;
  for (std::uint64_t s = 0; s < 200; ++s) seen.insert(serialize_family(generate_family(1000 + s, 4, 16)));
  CHECK(seen.size() == 200);
}

TEST_CASE("serial and parallel table fills agree") {
  const std::uint32_t n = 37, m = 1000;
  std::vector<Block> f1(n * m), i1(n * m), f2(n * m), i2(n * m);
  kernels::serial::fill_permutation_tables(99, n, m, f1, i1);
  kernels::parallel::fill_permutation_tables(99, n, m, f2, i2);
  CHECK(f1 == f2);
  CHECK(i1 == i2);
}

TEST_CASE("family size guards") {
  CHECK_THROWS_AS(generate_family(1, 0, 4), ParameterError);
  CHECK_THROWS_AS(generate_family(1, 4, 1), ParameterError);
  CHECK_THROWS_AS(generate_family(1, 1, (1u << 22) + 1), InfeasibleSize);
  CHECK_THROWS_AS(generate_family(1, 1u << 10, 1u << 17), InfeasibleSize);
  CHECK_THROWS_AS(PermutationFamily(1, 3, 0, {0, 0, 1}), ParameterError);
  CHECK_THROWS_AS(PermutationFamily(1, 3, 0, {0, 1}), ParameterError);
}

TEST_CASE("plant_instance computes ciphertexts by chaining") {
  SUBCASE("identity chain") {
    const Instance inst = plant_instance(identity_family(2, 8), 2, {1, 1}, {3});
    CHECK(inst.pairs().front().ciphertext == 3);
  }
  SUBCASE("definitional") {
    const auto fam = family(5, 4, 64);
    const Instance inst = plant_instance(fam, 2, {2, 3}, {17});
    CHECK(inst.pairs().front().ciphertext == fam->forward(3, fam->forward(2, 17)));
  }
  SUBCASE("planted pair is the unique solution at N=16, M=4096, 2 pairs") {
    const Instance inst = plant_instance(family(11, 16, 4096), 2, {5, 9}, {100, 200});
    const auto sols = oracle::brute_force_solutions(inst);
    REQUIRE(sols.size() == 1);
    CHECK(sols.front() == std::vector<Key>{5, 9});
  }
  SUBCASE("errors") {
    const auto fam = family(5, 4, 64);
    CHECK_THROWS_AS(plant_instance(fam, 2, {1}, {3}), ParameterError);
    CHECK_THROWS_AS(plant_instance(fam, 2, {1, 2}, {3, 3}), ParameterError);
    CHECK_THROWS_AS(plant_instance(fam, 3, {1, 2, 3}, {3}), ParameterError);
    CHECK_THROWS_AS(plant_instance(fam, 2, {1, 4}, {3}), ParameterError);
    CHECK_THROWS_AS(plant_instance(fam, 2, {1, 2}, {64}), ParameterError);
    CHECK_THROWS_AS(Instance(fam, 2, {1, 2}, {{3, 3}, {4, 4}}), ParameterError);
  }
}

TEST_CASE("query returns table values and meters exactly") {
  const auto fam = family(21, 8, 256);
  const Instance inst = plant_instance(fam, 2, {1, 2}, {0});
  QueryLedger ledger;
  const Block y = query(inst, {10, 3, Direction::Forward}, ledger);
  CHECK(query(inst, {y, 3, Direction::Inverse}, ledger) == 10);
  CHECK(ledger.forward_queries() == 1);
  CHECK(ledger.inverse_queries() == 1);
  CHECK(ledger.time_units() == 2);

  QueryLedger fresh;
  for (int i = 0; i < 5; ++i) query_forward(inst, 0, static_cast<Block>(i), fresh);
  CHECK(fresh.forward_queries() == 5);
  CHECK(fresh.inverse_queries() == 0);
  CHECK(fresh.total_queries() == 5);

  Rng rng(1);
  QueryLedger probes;
  for (int i = 0; i < 1000; ++i) {
    const auto k = static_cast<Key>(rng.below(8));
    const auto x = static_cast<Block>(rng.below(256));
    REQUIRE(query_forward(inst, k, x, probes) == fam->forward_row(k)[x]);
    REQUIRE(query_inverse(inst, k, x, probes) == fam->inverse_row(k)[x]);
  }
  CHECK(probes.total_queries() == 2000);

  CHECK_THROWS_AS(query(inst, {0, 8, Direction::Forward}, ledger), ParameterError);
  CHECK_THROWS_AS(query(inst, {256, 0, Direction::Forward}, ledger), ParameterError);
  CHECK_THROWS_AS(query(inst, {0, 0, static_cast<Direction>(0)}, ledger), ParameterError);
}

TEST_CASE("ledger memory accounting") {
  QueryLedger l;
  l.record_insert(5);
  l.hold(2);
  l.release(4);
  l.record_insert();
  l.record_probe(3);
  CHECK(l.time_units() == 9);
  CHECK(l.peak_memory_units() == 7);
  CHECK(l.live_memory_units() == 4);
  l.release(100);
  CHECK(l.live_memory_units() == 0);
}

TEST_CASE("conjugate_instance") {
  const auto fam = family(8, 6, 32);
  const Instance inst = plant_instance(fam, 2, {4, 1}, {3, 9});
  std::vector<Block> id(32);
  std::iota(id.begin(), id.end(), 0u);
  CHECK(serialize_instance(conjugate_instance(inst, id)) == serialize_instance(inst));

  std::vector<Block> sigma(32);
  std::iota(sigma.begin(), sigma.end(), 0u);
  Rng rng(4);
  shuffle(std::span<Block>(sigma), rng);
  const Instance conj = conjugate_instance(inst, sigma);
  CHECK(conj.planted_keys() == inst.planted_keys());
  for (Key k = 0; k < 6; ++k) {
    CHECK(is_bijection(conj.family().forward_row(k)));
    for (Block x = 0; x < 32; ++x) CHECK(conj.family().forward(k, sigma[x]) == sigma[fam->forward(k, x)]);
  }
  for (std::size_t i = 0; i < inst.pairs().size(); ++i) {
    CHECK(conj.pairs()[i].plaintext == sigma[inst.pairs()[i].plaintext]);
    CHECK(conj.pairs()[i].ciphertext == sigma[inst.pairs()[i].ciphertext]);
  }
  sigma[0] = sigma[1];
  CHECK_THROWS_AS(conjugate_instance(inst, sigma), ParameterError);
}

TEST_CASE("randomize_instance keeps the planted keys valid and is seeded") {
  const auto fam = family(8, 4, 16);
  const Instance inst = plant_instance(fam, 2, {2, 3}, {5, 6});
  const Instance a = randomize_instance(inst, 77);
  CHECK(a.consistent(a.planted_keys()));
  CHECK(a.planted_keys() == inst.planted_keys());
  CHECK(serialize_instance(a) == serialize_instance(randomize_instance(inst, 77)));
  CHECK_FALSE(serialize_instance(a) == serialize_instance(randomize_instance(inst, 78)));
}

TEST_CASE("randomize_instance: F_1(P_1) is uniform over [M] (chi-square, 1%)") {
  const std::uint32_t m = 16;
  const Instance inst = plant_instance(family(8, 4, m), 2, {2, 3}, {5});
  std::vector<double> counts(m, 0.0);
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const Instance r = randomize_instance(inst, 5000 + t);
    counts[r.family().forward(1, r.pairs()[0].plaintext)] += 1;
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(trials) / m;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 30.578);  // 99th percentile of chi-square with 15 degrees of freedom
}

TEST_CASE("random_instance draws distinct plaintexts deterministically") {
  const auto fam = family(2, 8, 64);
  const Instance a = random_instance(fam, 4, 6, 10);
  std::set<Block> p;
  for (const auto& pc : a.pairs()) p.insert(pc.plaintext);
  CHECK(p.size() == 6);
  CHECK(a.consistent(a.planted_keys()));
  CHECK(a == random_instance(fam, 4, 6, 10));
  CHECK_THROWS_AS(random_instance(fam, 2, 65, 1), ParameterError);
}
