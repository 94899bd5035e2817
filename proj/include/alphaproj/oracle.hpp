#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alphaproj/families.hpp"
#include "alphaproj/measures.hpp"

namespace alphaproj {
namespace oracle {

/// Execution policy for the sampling kernels. Both paths draw sample i
/// from a sub-seed derived from (seed, i) and reduce by (value, index),
/// so they return identical results; the serial path is the reference
/// the parallel one is tested against.
enum class Exec { serial, parallel };

struct OracleReport {
  FiniteDistribution best_member;
  double best_value;
  std::uint64_t samples_used;   // accepted (in-domain) samples
  double tolerance_band;        // constraint slack of the sampler (0 here:
                                // members are exact by construction)
};

/// Draws members of an alpha-linear family by sampling generator
/// coefficients, rejecting sign-violating draws, and normalizing so that
/// sum P(a) = 1. Constraint residuals are ~1e-15 by construction.
/// Throws EvaluationError when the rejection rate hits 100% over the
/// attempt budget (empty family or measure-zero sampler reach).
std::vector<FiniteDistribution> sample_family_members(
    const LinearFamilySpec& fam, std::size_t n, std::uint64_t seed,
    std::size_t max_attempts_per_member = 20000);

/// Estimated support of the family: union of supports of `n` sampled
/// members. Empty when the sampler finds nothing.
std::vector<bool> estimate_family_support(const LinearFamilySpec& fam,
                                          std::size_t n, std::uint64_t seed);

/// Brute-force forward projection: minimizes D_alpha(P||Q) over sampled
/// family members. The report's best_value upper-bounds the true minimum.
OracleReport brute_force_forward(const FiniteDistribution& q,
                                 const LinearFamilySpec& fam,
                                 std::uint64_t n_samples, std::uint64_t seed,
                                 Exec exec = Exec::parallel);

/// Grid search for the reverse projection: evaluates D_alpha(P_hat ||
/// member(theta)) on a uniform grid over [-radius, radius]^dim (dim <= 2),
/// skipping out-of-domain theta. Throws EvaluationError if every grid
/// point is out of domain.
OracleReport brute_force_reverse(const FiniteDistribution& p_hat,
                                 const ExpFamilySpec& fam,
                                 std::size_t grid_per_dim, double radius,
                                 Exec exec = Exec::parallel);

}  // namespace oracle
}  // namespace alphaproj
