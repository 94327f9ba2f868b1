#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "qmitm/classical_attacks.hpp"
#include "qmitm/errors.hpp"

using namespace qmitm;

namespace {

FamilyPtr family(std::uint64_t seed, std::uint32_t n, std::uint32_t m) {
  return std::make_shared<const PermutationFamily>(generate_family(seed, n, m));
}

AttackFailureKind failure_kind(const Instance& inst, std::string_view algo) {
  try {
    run_attack(algo, inst);
  } catch (const AttackFailure& e) {
    return e.kind();
  }
  FAIL("attack did not fail");
  return AttackFailureKind::NoKeyFound;
}

}  // namespace

TEST_CASE("every attack agrees with the brute-force oracle on unique instances") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    for (std::uint32_t n : {2u, 4u, 8u, 16u}) {
      const Instance d2 = random_instance(family(s * 31 + n, n, n * n * n), 2, 2, s);
      const auto sols2 = oracle::brute_force_solutions(d2);
      REQUIRE(!sols2.empty());
      if (sols2.size() == 1) {
        CHECK(exhaustive_search(d2).keys == sols2.front());
        CHECK(mitm_2(d2).keys == sols2.front());
        ++checked;
      } else {
        CHECK(failure_kind(d2, "mitm2") == AttackFailureKind::AmbiguousKey);
      }
      if (n > 8) continue;
      const Instance d4 = random_instance(family(s * 37 + n, n, n * n), 4, 4, s);
      const auto sols4 = oracle::brute_force_solutions(d4);
      REQUIRE(!sols4.empty());
      if (sols4.size() == 1) {
        const auto r = dissect_4(d4);
        CHECK(r.verified);
        CHECK(r.keys == sols4.front());
        CHECK(mitm_4(d4).keys == sols4.front());
        CHECK(exhaustive_search(d4).keys == sols4.front());
        ++checked;
      } else {
        CHECK(failure_kind(d4, "dissect4") == AttackFailureKind::AmbiguousKey);
        CHECK(failure_kind(d4, "mitm4") == AttackFailureKind::AmbiguousKey);
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("examples at the smallest sizes") {
  SUBCASE("exhaustive N=1 depth 2") {
    const auto r = exhaustive_search(random_instance(family(1, 1, 4), 2, 1, 1));
    CHECK(r.keys == std::vector<Key>{0, 0});
    CHECK(r.candidates == 1);
  }
  SUBCASE("mitm2 N=1") {
    const auto r = mitm_2(random_instance(family(1, 1, 4), 2, 1, 1));
    CHECK(r.keys == std::vector<Key>{0, 0});
    CHECK(r.ledger.total_queries() == 2);
  }
  SUBCASE("dissect4 N=1, M=2") {
    const auto r = dissect_4(random_instance(family(2, 1, 2), 4, 2, 1));
    CHECK(r.keys == std::vector<Key>{0, 0, 0, 0});
  }
  SUBCASE("exhaustive depth 4 at N=6 stores at most a few registers") {
    const auto r = exhaustive_search(random_instance(family(6, 6, 36), 4, 4, 2));
    CHECK(r.verified);
    CHECK(r.ledger.peak_memory_units() <= 8);
  }
}

TEST_CASE("ledger bounds") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::uint32_t n = 16;
    const Instance d2 = random_instance(family(100 + s, n, 4096), 2, 2, s);
    const auto r2 = mitm_2(d2);
    CHECK(r2.ledger.total_queries() <= 2 * n + 2 * r2.candidates);
    CHECK(r2.ledger.peak_memory_units() == n);

    const Instance d4 = random_instance(family(200 + s, n, 256), 4, 4, s);
    const auto r4 = mitm_4(d4);
    CHECK(r4.ledger.peak_memory_units() >= n * n);
    CHECK(r4.ledger.peak_memory_units() <= 2 * n * n);
  }
  for (std::uint32_t n : {4u, 8u, 16u}) {
    const auto r = dissect_4(random_instance(family(300 + n, n, n * n), 4, 4, n));
    CHECK(r.ledger.peak_memory_units() <= 4 * n);
  }
}

TEST_CASE("failure modes") {
  SUBCASE("depth mismatch") {
    const Instance d2 = random_instance(family(1, 4, 16), 2, 2, 1);
    const Instance d4 = random_instance(family(1, 4, 16), 4, 4, 1);
    CHECK_THROWS_AS(mitm_2(d4), ParameterError);
    CHECK_THROWS_AS(dissect_4(d2), ParameterError);
    CHECK_THROWS_AS(mitm_4(d2), ParameterError);
    CHECK_THROWS_AS(run_attack("quantum", d2), ParameterError);
  }
  SUBCASE("one pair at N=16, M=16 leaves ambiguity") {
    int ambiguous = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Instance inst = random_instance(family(s, 16, 16), 2, 1, s);
      if (oracle::brute_force_solutions(inst).size() > 1) {
        CHECK(failure_kind(inst, "mitm2") == AttackFailureKind::AmbiguousKey);
        ++ambiguous;
      }
    }
    CHECK(ambiguous > 0);
  }
  SUBCASE("dissect4 needs two pairs") {
    auto fam = family(3, 4, 16);
    const Instance one(fam, 4, {0, 1, 2, 3}, {{5, fam->forward(3, fam->forward(2, fam->forward(1, fam->forward(0, 5))))}});
    CHECK_THROWS_AS(dissect_4(one), ParameterError);
  }
}

TEST_CASE("middle_check") {
  SUBCASE("lower lists partition all N^2 key pairs") {
    const std::uint32_t n = 4, m = 16;
    const Instance inst = random_instance(family(9, n, m), 4, 4, 9);
    std::set<KeyPair> all;
    std::size_t total = 0;
    for (Block x = 0; x < m; ++x) {
      const auto lower = middle_check(inst, x, Half::Lower);
      total += lower.size();
      for (const auto& kp : lower) {
        CHECK(inst.family().forward(kp.second, inst.family().forward(kp.first, inst.pairs()[0].plaintext)) == x);
        all.insert(kp);
      }
    }
    CHECK(total == n * n);
    CHECK(all.size() == n * n);
  }
  SUBCASE("upper half reaches the ciphertext") {
    const Instance inst = random_instance(family(10, 4, 16), 4, 4, 10);
    for (Block x = 0; x < 16; ++x)
      for (const auto& [a, b] : middle_check(inst, x, Half::Upper))
        CHECK(inst.family().forward(b, inst.family().forward(a, x)) == inst.pairs()[0].ciphertext);
  }
  SUBCASE("most middle values have no lower pair when M >> N^2") {
    const Instance inst = random_instance(family(11, 4, 4096), 4, 4, 11);
    std::size_t empty = 0;
    for (Block x = 0; x < 64; ++x) empty += middle_check(inst, x, Half::Lower).empty();
    CHECK(empty >= 48);
    CHECK_THROWS_AS(middle_check(inst, 4096, Half::Lower), ParameterError);
  }
}

TEST_CASE("collision index") {
  CollisionIndex idx(8);
  idx.insert(3, 10);
  idx.insert(3, 11);
  idx.insert(5, 12);
  std::multiset<std::uint32_t> hits;
  idx.for_each_match(3, [&](std::uint32_t p) { hits.insert(p); });
  CHECK(hits == std::multiset<std::uint32_t>{10, 11});
  idx.clear();
  hits.clear();
  idx.for_each_match(3, [&](std::uint32_t p) { hits.insert(p); });
  CHECK(hits.empty());
  CHECK(idx.size() == 0);
}
