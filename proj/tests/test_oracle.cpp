#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alphaproj/divergences.hpp"
#include "alphaproj/instances.hpp"
#include "alphaproj/oracle.hpp"
#include "alphaproj/rng.hpp"

using namespace alphaproj;

namespace {
const std::vector<std::string> kA4{"1", "2", "3", "4"};

LinearFamilySpec example1_family() {
  return LinearFamilySpec::from_constraints(AlphaOrder(0.5), kA4,
                                            {{1, -3, -5, -6}});
}
}  // namespace

TEST_CASE("sampled members satisfy their constraints") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + rng.uniform_int(4);
    const double alpha = rng.uniform() < 0.5 ? 0.4 + 0.5 * rng.uniform()
                                             : 1.2 + 2.0 * rng.uniform();
    const auto fam = instances::random_family_with_member(
        rng, n, AlphaOrder(alpha), 1 + rng.uniform_int(2));
    for (const auto& m : oracle::sample_family_members(fam, 20, 1000 + t)) {
      CHECK(fam.constraint_residual_norm(m) <= 1e-12);
    }
  }
}

TEST_CASE("sampler determinism and degenerate families") {
  const auto fam = example1_family();
  const auto a = oracle::sample_family_members(fam, 25, 99);
  const auto b = oracle::sample_family_members(fam, 25, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].probs() == b[i].probs());
  }

  SUBCASE("the worked-example family contains full-support members") {
    bool full = false;
    for (const auto& m : oracle::sample_family_members(fam, 200, 5)) {
      full = full || m.full_support();
    }
    CHECK(full);
  }

  SUBCASE("zero constraints sample the whole simplex") {
    const auto free_fam = LinearFamilySpec::from_constraints(
        AlphaOrder(2.0), kA4, {});
    const auto ms = oracle::sample_family_members(free_fam, 50, 3);
    CHECK(ms.size() == 50);
    double spread = 0.0;
    for (const auto& m : ms) spread += std::fabs(m[0] - 0.25);
    CHECK(spread > 0.1);  // genuinely random, not a single point
  }

  SUBCASE("a point-mass family returns its single member repeatedly") {
    const auto point_fam = LinearFamilySpec::from_constraints(
        AlphaOrder(2.0), {"a", "b"}, {{0, 1}});
    for (const auto& m : oracle::sample_family_members(point_fam, 10, 4)) {
      CHECK(m[0] == doctest::Approx(1.0));
      CHECK(m[1] == 0.0);
    }
  }

  SUBCASE("an empty family exhausts the attempt budget") {
    const auto empty_fam = LinearFamilySpec::from_constraints(
        AlphaOrder(2.0), kA4, {{1, 1, 1, 1}});
    CHECK_THROWS_AS(oracle::sample_family_members(empty_fam, 5, 6, 2000),
                    EvaluationError);
  }
}

TEST_CASE("estimate_family_support unions member supports") {
  const auto fam = LinearFamilySpec::from_constraints(AlphaOrder(2.0), kA4,
                                                      {{0, 0, 0, 1}});
  const auto mask = oracle::estimate_family_support(fam, 64, 17);
  CHECK(mask == std::vector<bool>{true, true, true, false});
}

TEST_CASE("brute_force_forward agrees between serial and parallel") {
  Rng rng(21);
  const auto q = uniform_distribution(4);
  for (double alpha : {0.5, 2.0}) {
    const auto fam =
        instances::random_family_with_member(rng, 4, AlphaOrder(alpha), 1);
    const auto ser =
        oracle::brute_force_forward(q, fam, 50000, 8, oracle::Exec::serial);
    const auto par =
        oracle::brute_force_forward(q, fam, 50000, 8, oracle::Exec::parallel);
    CHECK(ser.best_value == par.best_value);
    CHECK(ser.samples_used == par.samples_used);
    CHECK(ser.best_member.probs() == par.best_member.probs());
    CHECK(ser.tolerance_band == 0.0);
  }
}

TEST_CASE("brute_force_forward desk checks") {
  const auto q = uniform_distribution(4);

  SUBCASE("worked example at desk scale") {
    const auto report =
        oracle::brute_force_forward(q, example1_family(), 1000000, 7);
    const double target =
        -2.0 * std::log(0.5 * (std::sqrt(0.9) + std::sqrt(0.1)));
    CHECK(report.best_value >= target - 1e-9);
    CHECK(report.best_value <= target + 1e-3);
  }

  SUBCASE("zero-constraint family approaches the reference") {
    const auto free_fam =
        LinearFamilySpec::from_constraints(AlphaOrder(2.0), kA4, {});
    const auto report = oracle::brute_force_forward(q, free_fam, 200000, 9);
    CHECK(report.best_value < 5e-3);
  }
}

TEST_CASE("brute_force_reverse grid oracle") {
  Rng rng(33);
  const auto fam = instances::random_exp_family(rng, 4, AlphaOrder(2.0), 1);

  SUBCASE("the reference is its own best fit") {
    const auto report =
        oracle::brute_force_reverse(fam.reference(), fam, 4001, 3.0);
    CHECK(report.best_value <= 1e-6);
  }

  SUBCASE("grid of one evaluates the single center point") {
    const auto report =
        oracle::brute_force_reverse(fam.reference(), fam, 1, 3.0);
    CHECK(report.samples_used == 1);
    CHECK(report.best_value == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("serial and parallel grids agree") {
    const auto p = instances::random_distribution(rng, 4, 1e-2);
    const auto ser =
        oracle::brute_force_reverse(p, fam, 3000, 4.0, oracle::Exec::serial);
    const auto par =
        oracle::brute_force_reverse(p, fam, 3000, 4.0, oracle::Exec::parallel);
    CHECK(ser.best_value == par.best_value);
    CHECK(ser.best_member.probs() == par.best_member.probs());
  }

  SUBCASE("more than two directions are rejected") {
    const auto wide = instances::random_exp_family(rng, 5, AlphaOrder(2.0), 3);
    CHECK_THROWS_AS(oracle::brute_force_reverse(wide.reference(), wide, 10, 1.0),
                    ValidationError);
  }
}
