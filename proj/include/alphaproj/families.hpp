#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alphaproj/alpha.hpp"
#include "alphaproj/measures.hpp"

namespace alphaproj {

/// Gram-Schmidt orthonormalization. Vectors whose residual after
/// projecting out the previous ones falls below 1e-10 of their original
/// norm are dropped as dependent. Throws on an all-zero input.
std::vector<std::vector<double>> orthogonalize(
    const std::vector<std::vector<double>>& vectors);

/// Orthonormal basis of the orthogonal complement of span(vectors) in
/// R^dim. `vectors` may be empty (the complement is then all of R^dim).
std::vector<std::vector<double>> orthogonal_complement(
    const std::vector<std::vector<double>>& vectors, std::size_t dim);

/// An alpha-linear family: distributions P with sum_a P(a)^alpha f_i(a) = 0
/// for every constraint function f_i.
///
/// User-supplied vectors are kept for reporting; all internal math runs on
/// an orthonormalized copy. A family can also be built from generator
/// functions spanning the allowed P^alpha subspace, in which case the
/// constraints are the orthogonal complement of that span.
class LinearFamilySpec {
 public:
  static LinearFamilySpec from_constraints(
      const AlphaOrder& alpha, std::vector<std::string> alphabet,
      std::vector<std::vector<double>> constraints);

  static LinearFamilySpec from_generators(
      const AlphaOrder& alpha, std::vector<std::string> alphabet,
      const std::vector<std::vector<double>>& generators);

  const AlphaOrder& alpha() const { return alpha_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t dim() const { return alphabet_.size(); }

  /// Orthonormal constraint functions (possibly empty).
  const std::vector<std::vector<double>>& constraints() const {
    return constraints_;
  }
  /// Raw constraint vectors as supplied (empty for generator-form input).
  const std::vector<std::vector<double>>& raw_constraints() const {
    return raw_constraints_;
  }
  /// Orthonormal basis of the generator span (complement of constraints).
  const std::vector<std::vector<double>>& generator_basis() const {
    return generator_basis_;
  }

  /// Membership coefficients sum_a P(a)^alpha f_i(a) per constraint.
  std::vector<double> constraint_residual(const FiniteDistribution& p) const;
  /// Infinity norm of the residual vector; membership means <= 1e-9.
  double constraint_residual_norm(const FiniteDistribution& p) const;

  /// Residual over a raw probability vector (inner-loop form).
  double residual_norm_raw(std::span<const double> probs) const;

  /// Same family restricted to the given coordinate subset; constraint
  /// rows are cut down and re-orthonormalized (dependent rows drop out).
  LinearFamilySpec restricted(const std::vector<std::size_t>& keep) const;

  /// Coefficients of span{orthonormal constraints} expressed in the raw
  /// constraint basis, for reporting in the user's convention. Requires
  /// raw constraints with independent rows.
  std::vector<double> to_raw_convention(const std::vector<double>& theta) const;

 private:
  LinearFamilySpec(AlphaOrder alpha, std::vector<std::string> alphabet)
      : alpha_(alpha), alphabet_(std::move(alphabet)) {}

  AlphaOrder alpha_;
  std::vector<std::string> alphabet_;
  std::vector<std::vector<double>> raw_constraints_;
  std::vector<std::vector<double>> constraints_;
  std::vector<std::vector<double>> generator_basis_;
};

/// An alpha-exponential family: reference measure Q with full support plus
/// direction functions f_i; members are
///   P(a) = Z(theta)^-1 e_alpha( ln_alpha Q(a) + sum_i theta_i f_i(a) ).
class ExpFamilySpec {
 public:
  ExpFamilySpec(const AlphaOrder& alpha, FiniteDistribution reference,
                std::vector<std::vector<double>> directions);

  const AlphaOrder& alpha() const { return alpha_; }
  const FiniteDistribution& reference() const { return reference_; }
  const std::vector<std::string>& alphabet() const {
    return reference_.alphabet();
  }
  std::size_t dim() const { return reference_.size(); }

  const std::vector<std::vector<double>>& directions() const {
    return directions_;
  }
  const std::vector<std::vector<double>>& raw_directions() const {
    return raw_directions_;
  }

  /// theta re-expressed over the raw (user-supplied) directions.
  std::vector<double> to_raw_convention(const std::vector<double>& theta) const;

 private:
  AlphaOrder alpha_;
  FiniteDistribution reference_;
  std::vector<std::vector<double>> raw_directions_;
  std::vector<std::vector<double>> directions_;  // orthonormal
};

/// A family member together with its normalizer.
struct FamilyMember {
  FiniteDistribution distribution;
  double normalizer;
};

/// Evaluates the theta-indexed member of an alpha-exponential family.
///
/// theta is over the orthonormal directions. For alpha < 1 negative
/// brackets clip to zero mass; for alpha > 1 every bracket must stay
/// strictly positive or theta is outside the natural domain (throws
/// ValidationError). Throws as well when the total mass vanishes.
FamilyMember exp_family_member(const ExpFamilySpec& fam,
                               const std::vector<double>& theta);

struct ThetaFit {
  std::vector<double> theta;  // orthonormal-direction convention
  double normalizer;
};

/// Inverse of exp_family_member: recovers (theta, Z) for a member, or
/// nullopt when P does not lie in the family (linear-system residual
/// above 1e-8, reconstruction mismatch, or a clipping condition violated).
std::optional<ThetaFit> fit_theta(const FiniteDistribution& p,
                                  const ExpFamilySpec& fam);

namespace detail {

/// Unnormalized member masses for a linear family's exponential-form
/// solve: m(a) = bracket(a)^(1/(1-alpha)) over orthonormal directions.
/// Returns false when theta is outside the domain (alpha > 1 bracket <= 0
/// somewhere, or zero total mass). On success fills masses and Z.
bool member_masses(std::span<const double> q, double alpha,
                   const std::vector<std::vector<double>>& directions,
                   std::span<const double> theta, std::span<double> masses,
                   double& z);

}  // namespace detail

}  // namespace alphaproj
