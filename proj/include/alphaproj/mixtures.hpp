#pragma once

#include <optional>

#include "alphaproj/alpha.hpp"
#include "alphaproj/measures.hpp"

namespace alphaproj {

/// An (alpha,lambda)-mixture together with its normalizer Z.
/// Z lies in (0, 2]; Z <= 1 for alpha < 1, Z >= 1 for alpha > 1, Z = 1 at
/// alpha = 1.
struct MixtureResult {
  FiniteDistribution mixture;
  double normalizer;
};

/// Mixture with mass proportional to ((1-l) P0(a)^a + l P1(a)^a)^(1/a).
/// At alpha = 1 this is the plain convex combination with Z = 1.
MixtureResult alpha_mixture(const FiniteDistribution& p0,
                            const FiniteDistribution& p1,
                            const AlphaOrder& alpha, double lambda);

/// Residual of the Apollonius identity
///   (1-l)(H(P0||Q) - H(P0||S)) + l(H(P1||Q) - H(P1||S)) = Z^a H(S||Q)
/// accumulated termwise in one pass. The identity is exact, so the result
/// is zero up to floating-point error. Returns nullopt when a Hellinger
/// term is infinite (alpha > 1 with a support violation), in which case
/// the two sides are not individually evaluable.
std::optional<double> apollonius_residual(const FiniteDistribution& p0,
                                          const FiniteDistribution& p1,
                                          const FiniteDistribution& q,
                                          const AlphaOrder& alpha,
                                          double lambda);

}  // namespace alphaproj
