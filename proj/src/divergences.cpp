#include "alphaproj/divergences.hpp"

#include <cmath>
#include <limits>

namespace alphaproj {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

namespace detail {

namespace {

// The acceptance-scale oracles hammer alpha in {0.5, 2}; special-case the
// cheap exponents.
inline double pow_fast(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 0.5) return std::sqrt(x);
  if (e == -1.0) return 1.0 / x;
  if (e == 1.0) return x;
  return std::pow(x, e);
}

}  // namespace

double power_sum(std::span<const double> p, std::span<const double> q,
                 double alpha) {
  const double beta = 1.0 - alpha;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i], qi = q[i];
    if (pi <= 0.0) continue;  // 0^alpha = 0, term vanishes (covers p=q=0)
    if (qi <= 0.0) {
      if (alpha > 1.0) return kInf;  // p > 0 = q: not absolutely continuous
      continue;                      // alpha < 1: q^(1-alpha) = 0
    }
    s += pow_fast(pi, alpha) * pow_fast(qi, beta);
  }
  return s;
}

double kl_div(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

double renyi_div(std::span<const double> p, std::span<const double> q,
                 const AlphaOrder& alpha) {
  switch (alpha.regime()) {
    case AlphaOrder::Regime::zero: {
      // -log Q(Supp(P))
      double mass = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) mass += q[i];
      }
      return mass > 0.0 ? -std::log(mass) : kInf;
    }
    case AlphaOrder::Regime::infinity: {
      double worst = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInf;
        worst = std::max(worst, p[i] / q[i]);
      }
      return std::log(worst);
    }
    case AlphaOrder::Regime::one:
      return kl_div(p, q);
    default: {
      const double a = alpha.value();
      const double s = power_sum(p, q, a);
      if (std::isinf(s)) return kInf;
      if (s <= 0.0) return kInf;  // disjoint supports
      return std::log(s) / (a - 1.0);
    }
  }
}

}  // namespace detail

double renyi_divergence(const FiniteDistribution& p,
                        const FiniteDistribution& q, const AlphaOrder& alpha) {
  p.require_same_alphabet(q, "renyi_divergence");
  if (p.probs() == q.probs()) return 0.0;
  return detail::renyi_div(p.probs(), q.probs(), alpha);
}

double hellinger_divergence(const FiniteDistribution& p,
                            const FiniteDistribution& q,
                            const AlphaOrder& alpha) {
  p.require_same_alphabet(q, "hellinger_divergence");
  alpha.require_finite_positive("hellinger_divergence");
  if (p.probs() == q.probs()) return 0.0;
  if (alpha.is_one()) return detail::kl_div(p.probs(), q.probs());
  const double a = alpha.value();
  const double s = detail::power_sum(p.probs(), q.probs(), a);
  if (std::isinf(s)) return kInf;
  return (s - 1.0) / (a - 1.0);
}

double renyi_from_hellinger(double h, const AlphaOrder& alpha) {
  alpha.require_finite_positive("renyi_from_hellinger");
  if (alpha.is_one()) {
    throw ValidationError("renyi_from_hellinger: alpha must differ from 1");
  }
  const double a = alpha.value();
  const double arg = 1.0 + (a - 1.0) * h;
  if (arg <= 0.0) {
    throw EvaluationError("renyi_from_hellinger: log argument " +
                          std::to_string(arg) + " is not positive");
  }
  return std::log(arg) / (a - 1.0);
}

double relative_entropy(const FiniteDistribution& p,
                        const FiniteDistribution& q) {
  p.require_same_alphabet(q, "relative_entropy");
  if (p.probs() == q.probs()) return 0.0;
  return detail::kl_div(p.probs(), q.probs());
}

double relative_alpha_entropy(const FiniteDistribution& p,
                              const FiniteDistribution& q,
                              const AlphaOrder& alpha) {
  p.require_same_alphabet(q, "relative_alpha_entropy");
  alpha.require_finite_positive("relative_alpha_entropy");
  const FiniteDistribution pe = escort(p, alpha);
  const FiniteDistribution qe = escort(q, alpha);
  return detail::renyi_div(pe.probs(), qe.probs(),
                           AlphaOrder(1.0 / alpha.value()));
}

double tsallis_entropy(const FiniteDistribution& p, const AlphaOrder& alpha) {
  alpha.require_finite_positive("tsallis_entropy");
  if (alpha.is_one()) {
    // Shannon entropy in nats, the continuous extension.
    double h = 0.0;
    for (double pi : p.probs()) {
      if (pi > 0.0) h -= pi * std::log(pi);
    }
    return h;
  }
  const double a = alpha.value();
  double s = 0.0;
  for (double pi : p.probs()) {
    if (pi > 0.0) s += std::pow(pi, a);
  }
  return (1.0 - s) / (a - 1.0);
}

double alpha_exp(double x, const AlphaOrder& alpha) {
  alpha.require_finite_positive("alpha_exp");
  if (alpha.is_one()) return std::exp(x);
  const double a = alpha.value();
  const double base = 1.0 + (1.0 - a) * x;
  if (base <= 0.0) {
    // max{1+(1-a)x, 0}: clips to 0 for a < 1, diverges for a > 1.
    return a < 1.0 ? 0.0 : kInf;
  }
  return std::pow(base, 1.0 / (1.0 - a));
}

double alpha_log(double x, const AlphaOrder& alpha) {
  alpha.require_finite_positive("alpha_log");
  if (x <= 0.0) {
    throw ValidationError("alpha_log: x must be positive, got " +
                          std::to_string(x));
  }
  if (alpha.is_one()) return std::log(x);
  const double a = alpha.value();
  return (std::pow(x, 1.0 - a) - 1.0) / (1.0 - a);
}

}  // namespace alphaproj
