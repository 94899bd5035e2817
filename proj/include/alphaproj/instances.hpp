#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alphaproj/families.hpp"
#include "alphaproj/measures.hpp"
#include "alphaproj/rng.hpp"

namespace alphaproj {
namespace instances {

std::vector<std::string> default_alphabet(std::size_t n);

/// Random point of the simplex (exponential spacings). With
/// `min_mass` > 0 every coordinate is bounded away from zero.
FiniteDistribution random_distribution(Rng& rng, std::size_t n,
                                       double min_mass = 0.0);

/// Like random_distribution but each coordinate is zeroed with the given
/// probability (at least one survivor is kept).
FiniteDistribution random_sparse_distribution(Rng& rng, std::size_t n,
                                              double zero_prob);

/// Family built around a sampled full-support member: each constraint is
/// a random vector projected orthogonal to that member's alpha-power (and
/// to the other constraints), so the family is never empty.
LinearFamilySpec random_family_with_member(Rng& rng, std::size_t n,
                                           const AlphaOrder& alpha,
                                           std::size_t n_constraints);

/// Random exponential family on n symbols with the given number of
/// directions; the reference measure has full support.
ExpFamilySpec random_exp_family(Rng& rng, std::size_t n,
                                const AlphaOrder& alpha,
                                std::size_t n_directions);

}  // namespace instances
}  // namespace alphaproj
