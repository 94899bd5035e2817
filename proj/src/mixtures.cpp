#include "alphaproj/mixtures.hpp"

#include <cmath>
#include <vector>

namespace alphaproj {

MixtureResult alpha_mixture(const FiniteDistribution& p0,
                            const FiniteDistribution& p1,
                            const AlphaOrder& alpha, double lambda) {
  p0.require_same_alphabet(p1, "alpha_mixture");
  alpha.require_finite_positive("alpha_mixture");
  if (std::isnan(lambda) || lambda < 0.0 || lambda > 1.0) {
    throw ValidationError("alpha_mixture: lambda must lie in [0,1], got " +
                          std::to_string(lambda));
  }
  const std::size_t n = p0.size();
  if (lambda == 0.0) return {p0, 1.0};
  if (lambda == 1.0) return {p1, 1.0};
  if (alpha.is_one()) {
    // Plain convex combination; the normalizer is exactly 1.
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = (1.0 - lambda) * p0[i] + lambda * p1[i];
    }
    return {FiniteDistribution(p0.alphabet(), std::move(s), true), 1.0};
  }
  const double a = alpha.value();
  std::vector<double> s(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = p0[i] > 0.0 ? std::pow(p0[i], a) : 0.0;
    const double t1 = p1[i] > 0.0 ? std::pow(p1[i], a) : 0.0;
    const double m = (1.0 - lambda) * t0 + lambda * t1;
    s[i] = m > 0.0 ? std::pow(m, 1.0 / a) : 0.0;
    z += s[i];
  }
  return {FiniteDistribution(p0.alphabet(), std::move(s), true), z};
}

std::optional<double> apollonius_residual(const FiniteDistribution& p0,
                                          const FiniteDistribution& p1,
                                          const FiniteDistribution& q,
                                          const AlphaOrder& alpha,
                                          double lambda) {
  p0.require_same_alphabet(p1, "apollonius_residual");
  p0.require_same_alphabet(q, "apollonius_residual");
  alpha.require_finite_positive("apollonius_residual");
  if (lambda < 0.0 || lambda > 1.0) {
    throw ValidationError("apollonius_residual: lambda outside [0,1]");
  }

  const MixtureResult mix = alpha_mixture(p0, p1, alpha, lambda);
  const auto& s = mix.mixture;
  const std::size_t n = p0.size();

  if (alpha.is_one()) {
    // Parallelogram form: terms ((1-l)p0 + l p1 - s) log(s/q),
    // identically zero with s the convex combination.
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (1.0 - lambda) * p0[i] + lambda * p1[i];
      if (w <= 0.0 && s[i] <= 0.0) continue;
      if (s[i] <= 0.0 || q[i] <= 0.0) return std::nullopt;
      r += (w - s[i]) * std::log(s[i] / q[i]);
    }
    return r;
  }

  const double a = alpha.value();
  const double za = std::pow(mix.normalizer, a);
  // Left side minus right side of the identity, one pass over the
  // alphabet so the large Hellinger terms never meet head on:
  //   [(1-l)p0^a + l p1^a](q^(1-a) - s^(1-a)) - Z^a (s^a q^(1-a) - s)
  // all divided by (a - 1).
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = p0[i] > 0.0 ? std::pow(p0[i], a) : 0.0;
    const double t1 = p1[i] > 0.0 ? std::pow(p1[i], a) : 0.0;
    const double w = (1.0 - lambda) * t0 + lambda * t1;
    const double sa = s[i] > 0.0 ? std::pow(s[i], a) : 0.0;
    if (q[i] <= 0.0) {
      if (a > 1.0 && (w > 0.0 || sa > 0.0)) return std::nullopt;  // inf term
      // a < 1: q^(1-a) = 0 contributions
      r += (-w * (s[i] > 0.0 ? std::pow(s[i], 1.0 - a) : 0.0) -
            za * (0.0 - s[i])) /
           (a - 1.0);
      continue;
    }
    const double q1a = std::pow(q[i], 1.0 - a);
    double s1a;
    if (s[i] > 0.0) {
      s1a = std::pow(s[i], 1.0 - a);
    } else {
      if (a > 1.0 && w > 0.0) return std::nullopt;  // H(P||S) infinite
      s1a = 0.0;
    }
    r += (w * (q1a - s1a) - za * (sa * q1a - s[i])) / (a - 1.0);
  }
  return r;
}

}  // namespace alphaproj
