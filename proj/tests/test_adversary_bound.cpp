#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qmitm/adversary_bound.hpp"
#include "qmitm/errors.hpp"
#include "qmitm/linalg.hpp"
#include "qmitm/rng.hpp"

using namespace qmitm;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform01() * 2.0 - 1.0;
  return a;
}

// Random non-negative adversary matrix supported on differing-label pairs.
AdversaryMatrix random_adversary(const InputEnumeration& e, Rng& rng) {
  AdversaryMatrix g{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(e.size()), static_cast<Eigen::Index>(e.size())),
                    e.problem};
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (e.labels[i] != e.labels[j])
        g.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            g.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rng.uniform01();
  return g;
}

}  // namespace

TEST_CASE("spectral norm") {
  for (Eigen::Index d : {1, 2, 5, 40}) CHECK(spectral_norm(Eigen::MatrixXd::Ones(d, d)) == doctest::Approx(double(d)));
  Eigen::VectorXd diag(4);
  diag << 1.0, -7.0, 3.0, 0.5;
  CHECK(spectral_norm(diag.asDiagonal().toDenseMatrix()) == doctest::Approx(7.0));
  CHECK(spectral_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);

  Rng rng(2024);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd a = random_symmetric(2 + static_cast<Eigen::Index>(rng.below(60)), rng);
    const double ref = spectral_norm_reference(a);
    CHECK(std::abs(spectral_norm(a, true) - ref) < 1e-8 * std::max(1.0, ref));
    CHECK(std::abs(spectral_norm(a, false) - ref) < 1e-8 * std::max(1.0, ref));
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(spectral_norm(bad), ParameterError);
  CHECK_THROWS_AS(spectral_norm_reference(bad), ParameterError);
}

TEST_CASE("KE2 enumeration at N=2, M=3") {
  const auto ke2 = enumerate_inputs(Problem::KeyExtraction2, 2, 3, 0, 1);
  const auto& c = ke2.counts;
  CHECK(c.raw == 36);
  CHECK(c.yes == 4);
  CHECK(c.no == 7);
  CHECK(c.excluded_multiple == 9);
  CHECK(c.excluded_direct == 16);
  CHECK(c.raw == c.yes + c.no + c.excluded_multiple + c.excluded_direct + c.excluded_noninjective);
  CHECK(ke2.size() == 11);
  CHECK(ke2.query_count() == 2 * 2 * 3);

  // Each answer string is an honest permutation family: inverse rows invert forward rows.
  for (const auto& s : ke2.strings)
    for (std::uint32_t k = 0; k < 2; ++k)
      for (std::uint32_t x = 0; x < 3; ++x) CHECK(s[(2 + k) * 3 + s[k * 3 + x]] == x);

  // The CF label of every projection equals the KE2 label.
  for (std::size_t i = 0; i < ke2.size(); ++i)
    CHECK((claw_count(ke2.projections[i], 2) == 1) == (ke2.labels[i] == 1));
}

TEST_CASE("enumeration details") {
  SUBCASE("identity family has every key pair as a solution when P = C") {
    const std::vector<std::uint32_t> id = {0, 1, 2, 0, 1, 2};
    CHECK(ke2_solution_count(id, 2, 3, 1, 1) == 4);
    CHECK(ke2_solution_count(id, 2, 3, 0, 1) == 0);
    CHECK(project_input(id, 2, 3, 0, 1) == std::vector<std::uint32_t>{0, 0, 1, 1});
  }
  SUBCASE("P = C leaves no yes-instance once direct keys are excluded") {
    const auto e = enumerate_inputs(Problem::KeyExtraction2, 2, 3, 0, 0);
    CHECK(e.counts.yes == 0);
  }
  SUBCASE("injectivity filter") {
    const auto loose = enumerate_inputs(Problem::ClawFinding, 2, 3, 0, 1);
    const auto strict = enumerate_inputs(Problem::ClawFinding, 2, 3, 0, 1, {true, true});
    CHECK(strict.size() < loose.size());
    CHECK(strict.counts.excluded_noninjective > 0);
  }
  SUBCASE("queries and guards") {
    const auto ke2 = enumerate_inputs(Problem::KeyExtraction2, 2, 3, 0, 1);
    for (std::size_t l = 0; l < ke2.query_count(); ++l) CHECK(query_index(ke2, query_at(ke2, l)) == l);
    CHECK(in_query_set(ke2, {0, 1, 1}));
    CHECK(in_query_set(ke2, {1, 0, -1}));
    CHECK_FALSE(in_query_set(ke2, {1, 0, 1}));
    CHECK_THROWS_AS(query_index(ke2, {3, 0, 1}), ParameterError);
    CHECK_THROWS_AS(enumerate_inputs(Problem::KeyExtraction2, 2, 3, 3, 1), ParameterError);
    CHECK_THROWS_AS(enumerate_inputs(Problem::KeyExtraction2, 2, 9, 0, 1), InfeasibleSize);
  }
}

TEST_CASE("fibre sizes") {
  const auto cf3 = enumerate_inputs(Problem::ClawFinding, 2, 3, 0, 1);
  const auto ke3 = enumerate_inputs(Problem::KeyExtraction2, 2, 3, 0, 1);
  CHECK(cf3.size() == 11);
  const auto f3 = fiber_sizes(cf3, ke3);
  CHECK(f3.constant_size == std::optional<std::size_t>{1});
  CHECK(f3.reached == 11);

  const auto cf4 = enumerate_inputs(Problem::ClawFinding, 2, 4, 0, 1);
  const auto ke4 = enumerate_inputs(Problem::KeyExtraction2, 2, 4, 0, 1);
  CHECK(ke4.counts.raw == 576);
  CHECK(ke4.counts.yes == 96);
  CHECK(ke4.counts.no == 140);
  CHECK(cf4.size() == 59);
  const auto f4 = fiber_sizes(cf4, ke4);
  CHECK(f4.constant_size == std::optional<std::size_t>{4});
  CHECK(f4.reached == 59);

  // Without the promise, fibre sizes depend on whether G_1 collides with P or C.
  const auto u3 = unrestricted_fiber_sizes(2, 3, 0, 1);
  CHECK(u3.histogram == std::map<std::size_t, std::size_t>{{1, 16}, {2, 8}, {4, 1}});
  CHECK_FALSE(u3.constant_size.has_value());
}

TEST_CASE("Delta masks") {
  const auto ke2 = enumerate_inputs(Problem::KeyExtraction2, 2, 3, 0, 1);
  const auto masks = all_delta_masks(ke2);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(11, 11);
  for (const auto& m : masks) {
    CHECK(is_symmetric(m.mask));
    CHECK(m.mask.diagonal().isZero());
    total += m.mask;
  }
  for (Eigen::Index i = 0; i < 11; ++i)
    for (Eigen::Index j = 0; j < 11; ++j)
      if (i != j) CHECK(total(i, j) > 0.0);
}

TEST_CASE("adversary value") {
  SUBCASE("OR2 with the star matrix") {
    const auto e = or2_inputs();
    CHECK(adv_value(uniform_adversary(e), e) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    const auto opt = optimize_adversary(e, 200, 1);
    CHECK(adv_value(opt, e) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("zero matrix is undefined") {
    const auto e = or2_inputs();
    CHECK_THROWS_AS(adv_value(AdversaryMatrix{Eigen::MatrixXd::Zero(3, 3), Problem::Or2}, e), UndefinedValue);
  }
  SUBCASE("invalid matrices") {
    const auto e = or2_inputs();
    AdversaryMatrix g = uniform_adversary(e);
    g.matrix(1, 2) = g.matrix(2, 1) = 1.0;  // both yes-instances
    CHECK_THROWS_AS(validate_adversary(g, e), ParameterError);
    g = uniform_adversary(e);
    g.matrix(0, 1) = 3.0;
    CHECK_THROWS_AS(validate_adversary(g, e), ParameterError);
  }
  SUBCASE("invariant under positive scaling and simultaneous relabeling") {
    const auto e = enumerate_inputs(Problem::ClawFinding, 2, 3, 0, 1);
    const auto masks = all_delta_masks(e);
    Rng rng(77);
    for (int t = 0; t < 10; ++t) {
      const auto g = random_adversary(e, rng);
      const double v = adv_value(g, masks);
      const double s = 0.1 + 10.0 * rng.uniform01();
      CHECK(adv_value(AdversaryMatrix{g.matrix * s, g.problem}, masks) == doctest::Approx(v).epsilon(1e-8));

      std::vector<int> perm(e.size());
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      Eigen::PermutationMatrix<Eigen::Dynamic> p(static_cast<Eigen::Index>(perm.size()));
      for (std::size_t i = 0; i < perm.size(); ++i) p.indices()[static_cast<Eigen::Index>(i)] = perm[i];
      InputEnumeration relabeled = e;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        relabeled.strings[static_cast<std::size_t>(perm[i])] = e.strings[i];
        relabeled.labels[static_cast<std::size_t>(perm[i])] = e.labels[i];
      }
      const AdversaryMatrix pg{p * g.matrix * p.transpose(), g.problem};
      CHECK(adv_value(pg, relabeled) == doctest::Approx(v).epsilon(1e-8));
    }
  }
  SUBCASE("uniform CF matrix norm is sqrt(yes * no)") {
    const auto e = enumerate_inputs(Problem::ClawFinding, 2, 3, 0, 1);
    CHECK(spectral_norm(uniform_adversary(e).matrix) == doctest::Approx(std::sqrt(28.0)));
  }
}

TEST_CASE("lift and tensor structure") {
  for (std::uint32_t m : {3u, 4u}) {
    const auto cf = enumerate_inputs(Problem::ClawFinding, 2, m, 0, 1);
    const auto ke2 = enumerate_inputs(Problem::KeyExtraction2, 2, m, 0, 1);
    const auto gcf = uniform_adversary(cf);
    const auto gke2 = lift_cf_to_ke2(gcf, cf, ke2);
    validate_adversary(gke2, ke2);
    const auto t = check_tensor_structure(gcf, cf, gke2, ke2);
    CHECK(t.pass);
    CHECK(t.fibers_constant);
    CHECK(t.covers_cf);
    CHECK(t.norm_ke2 == doctest::Approx(t.fiber_size * t.norm_cf).epsilon(1e-9));
    for (std::uint32_t k = 0; k < 2; ++k) {
      CHECK(check_tensor_structure(gcf, cf, gke2, ke2, InputQuery{0, k, 1}).pass);
      CHECK(check_tensor_structure(gcf, cf, gke2, ke2, InputQuery{1, k, -1}).pass);
    }
    CHECK_THROWS_AS(check_tensor_structure(gcf, cf, gke2, ke2, InputQuery{2, 0, 1}), ParameterError);
  }
}

TEST_CASE("query reduction by conjugation") {
  for (std::uint32_t m : {3u, 4u}) {
    const auto cf = enumerate_inputs(Problem::ClawFinding, 2, m, 0, 1);
    const auto ke2 = enumerate_inputs(Problem::KeyExtraction2, 2, m, 0, 1);
    const auto gke2 = lift_cf_to_ke2(uniform_adversary(cf), cf, ke2);
    const auto rep = verify_query_reduction(gke2, ke2);
    CHECK(rep.pass);
    CHECK(rep.max_all >= rep.max_in_query_set);
    REQUIRE(!rep.checks.empty());
    for (const auto& c : rep.checks) {
      CHECK(in_query_set(ke2, c.target));
      CHECK(c.isometry_defect < 1e-9);
      CHECK(c.conjugated_norm == doctest::Approx(c.original_norm).epsilon(1e-9));
      CHECK(c.max_in_query_set == doctest::Approx(rep.max_all).epsilon(1e-9));
      CHECK(c.block_constant);
    }
  }
}

TEST_CASE("optimizer") {
  const auto e = enumerate_inputs(Problem::ClawFinding, 2, 3, 0, 1);
  const auto a = optimize_adversary(e, 300, 5);
  CHECK(adv_value(a, e) >= adv_value(uniform_adversary(e), e) - 1e-12);
  CHECK(a.matrix == optimize_adversary(e, 300, 5).matrix);
  validate_adversary(a, e);
  CHECK_THROWS_AS(optimize_adversary(enumerate_inputs(Problem::KeyExtraction2, 2, 4, 0, 1), 10, 1), InfeasibleSize);
}
