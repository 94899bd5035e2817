// Acceptance suite: ten quantitative criteria, one pass/fail line each.
// Run all (`acceptance`) or a single one (`acceptance --only N`).
// Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "alphaproj/divergences.hpp"
#include "alphaproj/instances.hpp"
#include "alphaproj/mixtures.hpp"
#include "alphaproj/oracle.hpp"
#include "alphaproj/projection.hpp"
#include "alphaproj/rng.hpp"

using namespace alphaproj;

namespace {

const std::vector<std::string> kA4{"1", "2", "3", "4"};
const std::vector<double> kExample1F{1, -3, -5, -6};

LinearFamilySpec example1_family() {
  return LinearFamilySpec::from_constraints(AlphaOrder(0.5), kA4,
                                            {kExample1F});
}

struct Criterion {
  int id;
  std::string label;
  std::function<bool(std::string&)> run;
};

// --------------------------------------------------------------------- //

bool c1_example1(std::string& detail) {
  const auto q = uniform_distribution(4);
  const auto fam = example1_family();
  const auto r = forward_project(q, fam);
  const double expect[4] = {0.9, 0.1, 0.0, 0.0};
  double dist = 0.0;
  for (int i = 0; i < 4; ++i) {
    dist = std::max(dist, std::fabs(r.minimizer[i] - expect[i]));
  }

  const ExpFamilySpec exp_form(AlphaOrder(0.5), q, {kExample1F});
  const auto fit = fit_theta(r.minimizer, exp_form);
  if (!fit) {
    detail = "fit_theta failed on the minimizer";
    return false;
  }
  const auto raw = exp_form.to_raw_convention(fit->theta);
  const double theta_err = std::fabs(raw[0] - 0.2);
  const double z_err = std::fabs(fit->normalizer - 0.4);

  // clipped coordinate: bracket(4) = Q(4)^(1/2) + (1/2) f(4) theta = -0.1
  const double bracket4 = std::sqrt(0.25) + 0.5 * (-6.0) * raw[0];
  const bool strict = bracket4 < -0.05 && bracket4 > -0.15;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "|P*-target|=%.2e |theta-0.2|=%.2e |Z-0.4|=%.2e bracket4=%.4f",
                dist, theta_err, z_err, bracket4);
  detail = buf;
  return dist <= 1e-6 && theta_err <= 1e-6 && z_err <= 1e-6 && strict;
}

bool c2_example1_member(std::string& detail) {
  const auto q = uniform_distribution(4);
  const auto fam = example1_family();
  const auto p =
      make_distribution(kA4, {0.984688, 0.005683, 0.004180, 0.005449});
  const double residual = fam.constraint_residual_norm(p);

  const auto r = forward_project(q, fam);
  const double ineq = renyi_divergence(p, q, fam.alpha()) -
                      renyi_divergence(p, r.minimizer, fam.alpha()) -
                      r.divergence;
  char buf[120];
  std::snprintf(buf, sizeof buf, "membership=%.2e pythagorean=%+.3e",
                residual, ineq);
  detail = buf;
  return residual <= 1e-5 && ineq >= -1e-5;
}

bool c3_apollonius(std::string& detail) {
  Rng rng(0xA901);
  const double alphas[4] = {0.3, 0.5, 2.0, 3.0};
  double worst = 0.0;
  int sign_violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.uniform_int(5);
    const AlphaOrder alpha(alphas[t % 4]);
    const double lambda = rng.uniform();
    const auto p0 = instances::random_distribution(rng, n, 1e-3);
    const auto p1 = instances::random_distribution(rng, n, 1e-3);
    const auto q = instances::random_distribution(rng, n, 1e-3);
    const auto res = apollonius_residual(p0, p1, q, alpha, lambda);
    if (!res) {
      detail = "unexpected not-evaluable instance";
      return false;
    }
    worst = std::max(worst, std::fabs(*res));

    const auto mix = alpha_mixture(p0, p1, alpha, lambda);
    const double lhs =
        (1.0 - lambda) * (hellinger_divergence(p0, q, alpha) -
                          hellinger_divergence(p0, mix.mixture, alpha)) +
        lambda * (hellinger_divergence(p1, q, alpha) -
                  hellinger_divergence(p1, mix.mixture, alpha));
    const double gap = lhs - hellinger_divergence(mix.mixture, q, alpha);
    const bool ok = alpha.value() > 1.0 ? gap >= -1e-12 : gap <= 1e-12;
    if (!ok) ++sign_violations;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst |residual|=%.3e sign violations=%d",
                worst, sign_violations);
  detail = buf;
  return worst <= 1e-10 && sign_violations == 0;
}

bool c4_pythagorean(std::string& detail) {
  Rng rng(0xC4C4);
  double worst_eq = 0.0, worst_ineq = 0.0;
  for (int t = 0; t < 400; ++t) {
    const bool super = t < 200;
    const double alpha_v =
        super ? 1.0 + 2.0 * rng.uniform_pos() : 0.1 + 0.8 * rng.uniform();
    const AlphaOrder alpha(alpha_v);
    const std::size_t n = 3 + rng.uniform_int(4);
    const auto fam = instances::random_family_with_member(
        rng, n, alpha, 1 + rng.uniform_int(2));
    const auto q = instances::random_distribution(rng, n, 0.05);
    const ProjectionResult result = forward_project(q, fam);
    const auto cert =
        pythagorean_certificate(result, q, fam, 50, rng.next_u64());
    if (super) {
      worst_eq = std::max(
          worst_eq, std::max(cert.max_residual, std::fabs(cert.min_residual)));
    } else {
      worst_ineq = std::max(worst_ineq, cert.max_residual);
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "worst equality=%.3e (alpha>1) worst inequality=%.3e (alpha<1)",
                worst_eq, worst_ineq);
  detail = buf;
  return worst_eq <= 1e-7 && worst_ineq <= 1e-7;
}

bool c5_oracle_equivalence(std::string& detail) {
  Rng rng(0xC5C5);
  const auto q = uniform_distribution(4);
  double worst_gap = 0.0, worst_beat = 0.0;
  for (double alpha_v : {0.5, 2.0}) {
    for (int t = 0; t < 50; ++t) {
      const AlphaOrder alpha(alpha_v);
      const auto fam = instances::random_family_with_member(rng, 4, alpha, 1);
      const auto result = forward_project(q, fam);
      const auto report =
          oracle::brute_force_forward(q, fam, 1000000, rng.next_u64());
      worst_beat = std::max(worst_beat, result.divergence - report.best_value);
      worst_gap = std::max(worst_gap, report.best_value - result.divergence);
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "worst oracle gap=%.3e (<=1e-3) worst beat=%.3e (<=1e-9)",
                worst_gap, worst_beat);
  detail = buf;
  return worst_gap <= 1e-3 && worst_beat <= 1e-9;
}

bool c6_iterative(std::string& detail) {
  Rng rng(0xC6C6);
  double worst_final = 0.0, worst_tel = 0.0, worst_sum = 0.0;
  for (int t = 0; t < 50; ++t) {
    const AlphaOrder alpha(1.0 + rng.uniform_pos());
    // keep the intersection cone at least two-dimensional: a ray-thin
    // intersection contracts arbitrarily slowly under cyclic projections
    const std::size_t n = 4 + rng.uniform_int(3);
    const int m = n == 4 ? 2 : 2 + static_cast<int>(rng.uniform_int(2));
    const auto q = uniform_distribution(n);

    // non-empty intersection by construction: every family contains the
    // anchor member
    const auto anchor = instances::random_distribution(rng, n, 0.2);
    std::vector<double> u(n);
    double un = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = std::pow(anchor[i], alpha.value());
      un += u[i] * u[i];
    }
    std::vector<LinearFamilySpec> fams;
    std::vector<std::vector<double>> all;
    for (int k = 0; k < m; ++k) {
      std::vector<double> f(n);
      double proj = 0.0;
      for (auto& x : f) x = rng.gaussian();
      for (std::size_t i = 0; i < n; ++i) proj += f[i] * u[i];
      for (std::size_t i = 0; i < n; ++i) f[i] -= proj / un * u[i];
      all.push_back(f);
      fams.push_back(LinearFamilySpec::from_constraints(
          alpha, instances::default_alphabet(n), {f}));
    }

    const auto it = iterative_project(q, fams, 1e-14, 5000);
    if (!it.converged) {
      detail = "instance " + std::to_string(t) + " did not converge";
      return false;
    }
    const auto direct = forward_project(
        q, LinearFamilySpec::from_constraints(
               alpha, instances::default_alphabet(n), all));
    for (std::size_t i = 0; i < n; ++i) {
      worst_final = std::max(
          worst_final,
          std::fabs(it.result.minimizer[i] - direct.minimizer[i]));
    }

    // telescoping identity per step, witnessed by the anchor member,
    // re-executing the first steps of the cycle
    FiniteDistribution prev = q;
    const int check_steps =
        std::min<int>(10, static_cast<int>(it.steps.size()));
    for (int s = 1; s <= check_steps; ++s) {
      const auto stage = forward_project(prev, fams[(s - 1) % m]);
      const double lhs = renyi_divergence(anchor, prev, alpha);
      const double rhs = renyi_divergence(anchor, stage.minimizer, alpha) +
                         renyi_divergence(stage.minimizer, prev, alpha);
      worst_tel = std::max(worst_tel, std::fabs(lhs - rhs));
      prev = stage.minimizer;
    }

    // summability: the step divergences telescope to D(P_N || Q)
    double total = 0.0;
    for (const auto& s : it.steps) total += s.step_divergence;
    worst_sum = std::max(worst_sum, std::fabs(total - it.result.divergence));
  }
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "worst |final-direct|=%.3e telescope=%.3e sum-vs-D=%.3e",
                worst_final, worst_tel, worst_sum);
  detail = buf;
  return worst_final <= 1e-6 && worst_tel <= 1e-7 && worst_sum <= 1e-6;
}

bool c7_reverse(std::string& detail) {
  Rng rng(0xC7C7);
  double worst_gap = 0.0;
  int closure_flags = 0, fit_checked = 0, flag_mismatches = 0, done = 0;
  int guard = 0;
  while (done < 50 && guard < 500) {
    ++guard;
    const double alpha_v = done % 2 ? 0.5 : 2.0;
    const AlphaOrder alpha(alpha_v);
    const auto fam = instances::random_exp_family(rng, 4, alpha, 1);
    const auto p_hat =
        rng.uniform() < 0.25
            ? instances::random_sparse_distribution(rng, 4, 0.3)
            : instances::random_distribution(rng, 4, 0.02);
    const auto rev = reverse_project(p_hat, fam);
    if (alpha_v < 1.0 && !rev.hypothesis_ok) {
      continue;  // redraw: the sub-one duality needs a full-support solution
    }
    ++done;

    const double d_solver =
        renyi_divergence(p_hat, rev.projection.minimizer, alpha);
    double radius = 5.0;
    const auto fit_orig = fit_theta(rev.projection.minimizer, fam);
    if (fit_orig) {
      radius = std::max(radius, 2.0 * std::fabs(fit_orig->theta[0]));
    }
    const auto grid = oracle::brute_force_reverse(p_hat, fam, 10000, radius);
    worst_gap = std::max(worst_gap, d_solver - grid.best_value);

    // the closure flag must mirror the shifted family's sampled support
    const auto mask =
        oracle::estimate_family_support(rev.shifted_family, 200, 0xF00D);
    bool full = true;
    for (bool b : mask) full = full && b;
    if (alpha_v > 1.0) {
      if (rev.in_closure_only != !full) ++flag_mismatches;
      if (full) {
        ++fit_checked;
        if (!fit_orig) ++flag_mismatches;  // P* must belong to the family
      } else {
        ++closure_flags;
      }
    }
  }
  char buf[160];
  std::snprintf(
      buf, sizeof buf,
      "worst gap=%.3e flag mismatches=%d closure cases=%d fit confirmations=%d",
      worst_gap, flag_mismatches, closure_flags, fit_checked);
  detail = buf;
  return done == 50 && worst_gap <= 1e-6 && flag_mismatches == 0;
}

bool c8_tsallis(std::string& detail) {
  Rng rng(0xC8C8);
  double worst_mean = 0.0, worst_id = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t w = 3 + rng.uniform_int(4);
    const double alpha_v = t % 2 ? 0.5 : 2.0;
    std::vector<double> energies(w);
    for (auto& e : energies) e = 4.0 * rng.uniform();
    double lo = energies[0], hi = energies[0];
    for (double e : energies) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double target = lo + (0.15 + 0.7 * rng.uniform()) * (hi - lo);
    const auto ts = tsallis_maxent(energies, target, AlphaOrder(alpha_v));

    const auto esc = escort(ts.projection.minimizer, AlphaOrder(alpha_v));
    double mean = 0.0;
    for (std::size_t i = 0; i < w; ++i) mean += esc[i] * energies[i];
    worst_mean = std::max(worst_mean, std::fabs(mean - target));

    const double lhs = ts.projection.divergence;
    const double rhs =
        std::log(double(w)) +
        std::log(1.0 - (alpha_v - 1.0) * ts.tsallis_entropy) /
            (alpha_v - 1.0);
    worst_id = std::max(worst_id, std::fabs(lhs - rhs));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "worst escort-mean residual=%.3e worst identity residual=%.3e",
                worst_mean, worst_id);
  detail = buf;
  return worst_mean <= 1e-9 && worst_id <= 1e-12;
}

bool c9_divergence_properties(std::string& detail) {
  Rng rng(0xC9C9);
  const double grid[8] = {0.0,
                          0.25,
                          0.5,
                          1.0,
                          1.5,
                          2.0,
                          4.0,
                          std::numeric_limits<double>::infinity()};
  double worst_mono = 0.0, worst_pinsker = -1.0, worst_consistency = 0.0;
  int metric_violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.uniform_int(5);
    const auto p = instances::random_sparse_distribution(rng, n, 0.2);
    const auto q = instances::random_distribution(rng, n, 1e-4);

    double prev = 0.0;
    for (double a : grid) {
      const double d = renyi_divergence(p, q, AlphaOrder(a));
      if (std::isfinite(prev) && std::isfinite(d)) {
        worst_mono = std::max(worst_mono, prev - d);
      } else if (std::isinf(prev) && std::isfinite(d)) {
        worst_mono = std::max(worst_mono, 1.0);
      }
      prev = std::max(prev, d);
    }

    const double tv = total_variation(p, q);
    worst_pinsker =
        std::max(worst_pinsker, 0.5 * tv * tv - relative_entropy(p, q));

    const double av = rng.uniform() < 0.5 ? 0.2 + 0.7 * rng.uniform()
                                          : 1.1 + 3.0 * rng.uniform();
    const auto pf = instances::random_distribution(rng, n, 1e-4);
    const double h = hellinger_divergence(pf, q, AlphaOrder(av));
    worst_consistency =
        std::max(worst_consistency,
                 std::fabs(renyi_from_hellinger(h, AlphaOrder(av)) -
                           renyi_divergence(pf, q, AlphaOrder(av))));

    const auto c = instances::random_distribution(rng, n);
    const double ab = total_variation(p, q);
    if (ab != total_variation(q, p)) ++metric_violations;
    if (ab < 0.0 || ab > 2.0 + 1e-15) ++metric_violations;
    if (ab > total_variation(p, c) + total_variation(c, q) + 1e-12) {
      ++metric_violations;
    }
    if (total_variation(p, p) != 0.0) ++metric_violations;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "mono=%.3e pinsker slack=%.3e renyi<->hellinger=%.3e "
                "metric violations=%d",
                worst_mono, worst_pinsker, worst_consistency,
                metric_violations);
  detail = buf;
  return worst_mono <= 1e-12 && worst_pinsker <= 1e-12 &&
         worst_consistency <= 1e-12 && metric_violations == 0;
}

bool c10_support_law(std::string& detail) {
  Rng rng(0xCACA);
  int mismatches = 0;
  int deficient_cases = 0;
  for (int t = 0; t < 100; ++t) {
    const AlphaOrder alpha(1.0 + 2.0 * rng.uniform_pos());
    const std::size_t n = 4 + rng.uniform_int(3);
    const auto q = uniform_distribution(n);

    LinearFamilySpec fam = [&] {
      if (t % 7 == 0) {
        // pin one coordinate to zero so the family support genuinely
        // shrinks and the sub-simplex path is exercised
        const std::size_t dead = rng.uniform_int(n);
        std::vector<double> pin(n, 0.0);
        pin[dead] = 1.0;
        auto anchor = instances::random_distribution(rng, n, 0.15);
        std::vector<double> u(n), f(n);
        double un = 0.0, proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          u[i] = i == dead ? 0.0 : std::pow(anchor[i], alpha.value());
          un += u[i] * u[i];
        }
        for (auto& x : f) x = rng.gaussian();
        for (std::size_t i = 0; i < n; ++i) proj += f[i] * u[i];
        for (std::size_t i = 0; i < n; ++i) f[i] -= proj / un * u[i];
        return LinearFamilySpec::from_constraints(
            alpha, instances::default_alphabet(n), {pin, f});
      }
      return instances::random_family_with_member(rng, n, alpha,
                                                  1 + rng.uniform_int(2));
    }();

    const auto result = forward_project(q, fam);
    const auto members =
        oracle::sample_family_members(fam, 200, rng.next_u64());
    std::vector<bool> family_mask(n, false);
    for (const auto& mem : members) {
      for (std::size_t i = 0; i < n; ++i) {
        if (mem[i] > 1e-12) family_mask[i] = true;
      }
    }
    const auto own = support_mask(result.minimizer, 1e-12);
    if (own != family_mask) ++mismatches;
    bool full = true;
    for (bool b : family_mask) full = full && b;
    if (!full) ++deficient_cases;
  }

  // sub-one counterexample: the worked example shrinks {1,2,3,4} to {1,2}
  const auto q4 = uniform_distribution(4);
  const auto ex1 = forward_project(q4, example1_family());
  const auto ex1_members =
      oracle::sample_family_members(example1_family(), 200, 0xE1);
  std::vector<bool> ex1_mask(4, false);
  for (const auto& mem : ex1_members) {
    for (int i = 0; i < 4; ++i) {
      if (mem[i] > 1e-12) ex1_mask[i] = true;
    }
  }
  const auto ex1_own = support_mask(ex1.minimizer, 1e-12);
  const bool shrunk = ex1_own == std::vector<bool>{true, true, false, false} &&
                      ex1_mask == std::vector<bool>{true, true, true, true};

  char buf[140];
  std::snprintf(buf, sizeof buf,
                "mismatches=%d deficient families exercised=%d "
                "sub-one shrinkage=%s",
                mismatches, deficient_cases, shrunk ? "yes" : "no");
  detail = buf;
  return mismatches == 0 && deficient_cases > 0 && shrunk;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }

  const std::vector<Criterion> criteria{
      {1, "worked-example reproduction (P*, theta, Z, clipped bracket)",
       c1_example1},
      {2, "worked-example membership vector and Pythagorean inequality",
       c2_example1_member},
      {3, "Apollonius identity and inequality, 1000 instances", c3_apollonius},
      {4, "Pythagorean certificate, 200+200 solved instances", c4_pythagorean},
      {5, "oracle equivalence, 1e6-sample brute force vs solver",
       c5_oracle_equivalence},
      {6, "cyclic iterative projections vs direct intersection solve",
       c6_iterative},
      {7, "reverse projection vs parameter-grid oracle", c7_reverse},
      {8, "Tsallis max-ent: escort mean and divergence identity", c8_tsallis},
      {9, "divergence property suite (monotone, Pinsker, consistency, metric)",
       c9_divergence_properties},
      {10, "support law for super-one orders and sub-one shrinkage",
       c10_support_law},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const Error& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", c.id,
                c.label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
