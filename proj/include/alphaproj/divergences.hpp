#pragma once

#include <span>

#include "alphaproj/alpha.hpp"
#include "alphaproj/measures.hpp"

namespace alphaproj {

/// Renyi divergence D_alpha(P||Q) in nats, for alpha in [0, inf].
///
/// alpha = 1 is relative entropy, alpha = 0 is -log Q(Supp(P)), and
/// alpha = inf is log max_a P(a)/Q(a) over Supp(P). For alpha > 1 the
/// value is +inf when P is not absolutely continuous w.r.t. Q.
double renyi_divergence(const FiniteDistribution& p,
                        const FiniteDistribution& q, const AlphaOrder& alpha);

/// Hellinger divergence of order alpha in (0, inf):
/// (sum p^a q^(1-a) - 1)/(a - 1), relative entropy at alpha = 1.
double hellinger_divergence(const FiniteDistribution& p,
                            const FiniteDistribution& q,
                            const AlphaOrder& alpha);

/// Maps a Hellinger divergence value to the Renyi divergence of the same
/// order: log(1 + (a-1) h)/(a-1). Requires 1 + (a-1) h > 0 and a != 1.
double renyi_from_hellinger(double h, const AlphaOrder& alpha);

/// Relative entropy (KL divergence) in nats.
double relative_entropy(const FiniteDistribution& p,
                        const FiniteDistribution& q);

/// Relative alpha-entropy, computed through the escort identity
/// I_alpha(P,Q) = D_{1/alpha}(P^(alpha) || Q^(alpha)).
double relative_alpha_entropy(const FiniteDistribution& p,
                              const FiniteDistribution& q,
                              const AlphaOrder& alpha);

/// Tsallis entropy (1 - sum p^a)/(a - 1); Shannon entropy in nats at a = 1.
double tsallis_entropy(const FiniteDistribution& p, const AlphaOrder& alpha);

/// Deformed exponential: e_a(x) = max{1+(1-a)x, 0}^(1/(1-a)), exp(x) at a=1.
double alpha_exp(double x, const AlphaOrder& alpha);

/// Deformed logarithm: ln_a(x) = (x^(1-a) - 1)/(1-a) for x > 0, ln(x) at a=1.
double alpha_log(double x, const AlphaOrder& alpha);

namespace detail {

// Span-level kernels shared by the oracle and certificate inner loops.
// Callers guarantee matching lengths; no alphabet checks here.

/// sum_a p^alpha q^(1-alpha) with the zero-mass conventions: 0^alpha = 0,
/// p=q=0 terms dropped, and +inf when alpha > 1 meets p > 0 = q.
double power_sum(std::span<const double> p, std::span<const double> q,
                 double alpha);

double renyi_div(std::span<const double> p, std::span<const double> q,
                 const AlphaOrder& alpha);

double kl_div(std::span<const double> p, std::span<const double> q);

}  // namespace detail

}  // namespace alphaproj
