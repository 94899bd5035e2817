#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alphaproj/families.hpp"
#include "alphaproj/instances.hpp"
#include "alphaproj/mixtures.hpp"
#include "alphaproj/oracle.hpp"
#include "alphaproj/rng.hpp"

using namespace alphaproj;

namespace {
const std::vector<std::string> kA4{"1", "2", "3", "4"};
const std::vector<double> kExample1F{1, -3, -5, -6};

LinearFamilySpec example1_family() {
  return LinearFamilySpec::from_constraints(AlphaOrder(0.5), kA4,
                                            {kExample1F});
}
}  // namespace

TEST_CASE("orthogonalize") {
  const auto b1 = orthogonalize({{1, 0}, {0, 2}});
  REQUIRE(b1.size() == 2);
  CHECK(b1[0][0] == doctest::Approx(1.0));
  CHECK(b1[1][1] == doctest::Approx(1.0));

  const auto b2 = orthogonalize({{1, 1}, {1, -1}});
  REQUIRE(b2.size() == 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(b2[0][0] == doctest::Approx(inv_sqrt2));
  CHECK(b2[1][0] == doctest::Approx(inv_sqrt2));
  CHECK(b2[1][1] == doctest::Approx(-inv_sqrt2));
  CHECK(b2[0][0] * b2[1][0] + b2[0][1] * b2[1][1] ==
        doctest::Approx(0.0).epsilon(1e-15));

  // near-duplicate is dropped by the rank rule
  const auto b3 = orthogonalize({{1, 0, 0}, {1, 1e-14, 0}});
  CHECK(b3.size() == 1);

  CHECK_THROWS_AS(orthogonalize({{0, 0}, {0, 0}}), ValidationError);
  CHECK_THROWS_AS(orthogonalize({}), ValidationError);
  CHECK_THROWS_AS(orthogonalize({{1, 0}, {1, 0, 0}}), ValidationError);
}

TEST_CASE("orthogonal_complement spans the rest of the space") {
  const auto comp = orthogonal_complement({{1, 1, 1, 1}}, 4);
  REQUIRE(comp.size() == 3);
  for (const auto& v : comp) {
    double dot = 0.0, norm = 0.0;
    for (int i = 0; i < 4; ++i) {
      dot += v[i];
      norm += v[i] * v[i];
    }
    CHECK(dot == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(orthogonal_complement({}, 3).size() == 3);
}

TEST_CASE("linear family construction and membership residual") {
  const auto fam = example1_family();
  REQUIRE(fam.constraints().size() == 1);

  // sqrt(0.9) = 3 sqrt(0.1) makes P* an exact member
  const auto pstar = make_distribution(kA4, {0.9, 0.1, 0, 0});
  CHECK(fam.constraint_residual_norm(pstar) <= 1e-14);

  // the full-support member exhibited alongside the worked example
  const auto p6 =
      make_distribution(kA4, {0.984688, 0.005683, 0.004180, 0.005449});
  CHECK(fam.constraint_residual_norm(p6) <= 1e-5);

  // uniform reference: sum (1/4)^(1/2) f = -6.5, scaled by 1/|f|
  const auto u4 = uniform_distribution(4);
  const double fnorm = std::sqrt(1.0 + 9.0 + 25.0 + 36.0);
  CHECK(fam.constraint_residual(u4)[0] ==
        doctest::Approx(-6.5 / fnorm).epsilon(1e-13));

  const auto other = make_distribution({"a", "b", "c", "d"},
                                       {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(fam.constraint_residual(other), ValidationError);

  // too many independent constraints cannot define a family
  CHECK_THROWS_AS(
      LinearFamilySpec::from_constraints(
          AlphaOrder(0.5), {"a", "b"}, {{1, 0}, {0, 1}}),
      ValidationError);
}

TEST_CASE("generator form converts to the constraint form") {
  // generators spanning {u : u1 = u2} in R^3 -> single constraint (1,-1,0)
  const auto fam = LinearFamilySpec::from_generators(
      AlphaOrder(2.0), {"a", "b", "c"}, {{1, 1, 0}, {0, 0, 1}});
  REQUIRE(fam.constraints().size() == 1);
  const auto& f = fam.constraints()[0];
  CHECK(std::fabs(f[0] + f[1]) <= 1e-14);
  CHECK(std::fabs(f[2]) <= 1e-14);
  // members have equal first two coordinates after the alpha power
  const auto m = make_distribution({"a", "b", "c"}, {0.3, 0.3, 0.4});
  CHECK(fam.constraint_residual_norm(m) <= 1e-14);
}

TEST_CASE("exp_family_member evaluates the deformed exponential form") {
  const auto q = uniform_distribution(4);

  SUBCASE("theta = 0 returns the reference with Z = 1") {
    const ExpFamilySpec fam(AlphaOrder(0.5), q, {kExample1F});
    const auto member = exp_family_member(fam, {0.0});
    CHECK(member.normalizer == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i < 4; ++i) {
      CHECK(member.distribution[i] == doctest::Approx(0.25).epsilon(1e-14));
    }
  }

  SUBCASE("worked example in the raw-f convention") {
    const ExpFamilySpec fam(AlphaOrder(0.5), q, {kExample1F});
    // theta_raw = 1/5 over the unnormalized f scales by |f| internally
    const double fnorm = std::sqrt(71.0);
    const auto member = exp_family_member(fam, {0.2 * fnorm});
    CHECK(member.distribution[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(member.distribution[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(member.distribution[2] == 0.0);
    CHECK(member.distribution[3] == 0.0);
    CHECK(member.normalizer == doctest::Approx(0.4).epsilon(1e-12));
  }

  SUBCASE("alpha = 1 reduces to the classic exponential family") {
    const ExpFamilySpec fam(AlphaOrder(1.0), q, {{1, -1, 1, -1}});
    const auto member = exp_family_member(fam, {0.3});
    double z = 0.0;
    std::vector<double> expect(4);
    for (int i = 0; i < 4; ++i) {
      expect[i] = 0.25 * std::exp(0.3 * 0.5 * (i % 2 ? -1.0 : 1.0));
      z += expect[i];
    }
    for (int i = 0; i < 4; ++i) {
      CHECK(member.distribution[i] ==
            doctest::Approx(expect[i] / z).epsilon(1e-13));
    }
  }

  SUBCASE("alpha > 1 leaves the natural domain when a bracket closes") {
    const ExpFamilySpec fam(AlphaOrder(2.0), q, {{1, -1, 1, -1}});
    // bracket(a) = 4 - theta f(a)/|f| must stay positive
    CHECK_THROWS_AS(exp_family_member(fam, {9.0}), ValidationError);
    CHECK_NOTHROW(exp_family_member(fam, {1.0}));
  }

  SUBCASE("reference must have full support") {
    const auto bad = make_distribution(kA4, {0.5, 0.5, 0, 0});
    CHECK_THROWS_AS(ExpFamilySpec(AlphaOrder(2.0), bad, {kExample1F}),
                    ValidationError);
  }
}

TEST_CASE("fit_theta inverts the member map") {
  const auto q = uniform_distribution(4);
  const ExpFamilySpec fam(AlphaOrder(0.5), q, {kExample1F});

  SUBCASE("reference fits with theta = 0, Z = 1") {
    const auto fit = fit_theta(q, fam);
    REQUIRE(fit.has_value());
    CHECK(std::fabs(fit->theta[0]) <= 1e-10);
    CHECK(fit->normalizer == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("worked-example minimizer recovers theta = 1/5, Z = 2/5") {
    const auto pstar = make_distribution(kA4, {0.9, 0.1, 0, 0});
    const auto fit = fit_theta(pstar, fam);
    REQUIRE(fit.has_value());
    const auto raw = fam.to_raw_convention(fit->theta);
    CHECK(raw[0] == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(fit->normalizer == doctest::Approx(0.4).epsilon(1e-10));
  }

  SUBCASE("a perturbed non-member is rejected") {
    const auto off = make_distribution(kA4, {0.88, 0.12, 0, 0});
    CHECK_FALSE(fit_theta(off, fam).has_value());
    const auto off2 = make_distribution(kA4, {0.7, 0.1, 0.1, 0.1});
    CHECK_FALSE(fit_theta(off2, fam).has_value());
  }
}

TEST_CASE("exp_family_member and fit_theta are mutually inverse") {
  Rng rng(57);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + rng.uniform_int(4);
    const double alpha = rng.uniform() < 0.5 ? 0.3 + 0.6 * rng.uniform()
                                             : 1.2 + 1.5 * rng.uniform();
    const auto fam = instances::random_exp_family(
        rng, n, AlphaOrder(alpha), 1 + rng.uniform_int(2));
    std::vector<double> theta(fam.directions().size());
    for (auto& x : theta) x = 0.2 * rng.gaussian();
    FamilyMember member = [&] {
      for (;;) {
        try {
          return exp_family_member(fam, theta);
        } catch (const ValidationError&) {
          for (auto& x : theta) x *= 0.5;  // walk back into the domain
        }
      }
    }();
    const auto fit = fit_theta(member.distribution, fam);
    REQUIRE(fit.has_value());
    const auto rebuilt = exp_family_member(fam, fit->theta);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(rebuilt.distribution[i] - member.distribution[i]) <=
            1e-9);
    }
  }
}

TEST_CASE("alpha-linear families are alpha-convex") {
  Rng rng(61);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + rng.uniform_int(4);
    const double alpha = rng.uniform() < 0.5 ? 0.3 + 0.6 * rng.uniform()
                                             : 1.2 + 2.0 * rng.uniform();
    const auto fam = instances::random_family_with_member(
        rng, n, AlphaOrder(alpha), 1 + rng.uniform_int(2));
    const auto members = oracle::sample_family_members(fam, 2, rng.next_u64());
    REQUIRE(members.size() == 2);
    const auto mix = alpha_mixture(members[0], members[1], fam.alpha(),
                                   rng.uniform());
    CHECK(fam.constraint_residual_norm(mix.mixture) <= 1e-10);
  }
}

TEST_CASE("any member can serve as the reference of its family") {
  Rng rng(67);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + rng.uniform_int(3);
    const double alpha = rng.uniform() < 0.5 ? 0.4 + 0.5 * rng.uniform()
                                             : 1.2 + 1.5 * rng.uniform();
    const auto fam =
        instances::random_exp_family(rng, n, AlphaOrder(alpha), 1);
    std::vector<double> theta{0.15 * rng.gaussian()};
    FamilyMember member = [&] {
      for (;;) {
        try {
          return exp_family_member(fam, theta);
        } catch (const ValidationError&) {
          theta[0] *= 0.5;
        }
      }
    }();
    if (!member.distribution.full_support()) continue;
    const ExpFamilySpec refit(fam.alpha(), member.distribution,
                              fam.raw_directions());
    CHECK(fit_theta(fam.reference(), refit).has_value());
  }
}

TEST_CASE("members of a super-one family share full support") {
  Rng rng(71);
  for (int t = 0; t < 50; ++t) {
    const auto fam = instances::random_exp_family(rng, 4, AlphaOrder(2.5), 1);
    std::vector<double> theta{0.5 * rng.gaussian()};
    try {
      const auto member = exp_family_member(fam, theta);
      CHECK(member.distribution.full_support());
    } catch (const ValidationError&) {
      // outside the natural domain: no member to check
    }
  }
}

TEST_CASE("restricted families cut constraints down to a subalphabet") {
  const auto fam = LinearFamilySpec::from_constraints(
      AlphaOrder(2.0), kA4, {{0, 0, 0, 1}});
  const auto sub = fam.restricted({0, 1, 2});
  CHECK(sub.alphabet() == std::vector<std::string>{"1", "2", "3"});
  CHECK(sub.constraints().empty());  // e4 restricted to {1,2,3} vanishes

  const auto fam2 = LinearFamilySpec::from_constraints(
      AlphaOrder(2.0), kA4, {{1, -1, 2, 0}});
  const auto sub2 = fam2.restricted({0, 1});
  REQUIRE(sub2.constraints().size() == 1);
  CHECK(std::fabs(sub2.constraints()[0][0] + sub2.constraints()[0][1]) <=
        1e-14);
}
