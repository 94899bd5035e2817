#pragma once

#include <span>
#include <string>
#include <vector>

#include "alphaproj/alpha.hpp"
#include "alphaproj/errors.hpp"

namespace alphaproj {

/// Probability measure on a named finite alphabet.
///
/// Entries are non-negative and renormalized at construction so they sum
/// to 1 up to machine precision. Immutable after construction.
class FiniteDistribution {
 public:
  FiniteDistribution(std::vector<std::string> alphabet,
                     std::vector<double> probs, bool normalize = false);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool same_alphabet(const FiniteDistribution& other) const {
    return alphabet_ == other.alphabet_;
  }
  void require_same_alphabet(const FiniteDistribution& other,
                             const char* where) const;

  bool full_support() const;

 private:
  std::vector<std::string> alphabet_;
  std::vector<double> probs_;
};

/// Validates and builds a distribution. With `normalize` the weights may
/// sum to anything positive; otherwise the sum must be within 1e-9 of 1.
FiniteDistribution make_distribution(std::vector<std::string> labels,
                                     std::vector<double> weights,
                                     bool normalize = false);

/// Uniform measure on labels "1".."n".
FiniteDistribution uniform_distribution(std::size_t n);

/// Total variation distance sum_a |P(a) - Q(a)|, in [0, 2].
double total_variation(const FiniteDistribution& p,
                       const FiniteDistribution& q);

/// Escort measure: P^(alpha)(a) = P(a)^alpha / sum_b P(b)^alpha.
FiniteDistribution escort(const FiniteDistribution& p, const AlphaOrder& alpha);

/// Symbols with probability strictly greater than tol.
std::vector<std::string> support(const FiniteDistribution& p, double tol = 0.0);

/// Index mask of the support (probability > tol).
std::vector<bool> support_mask(const FiniteDistribution& p, double tol = 0.0);

namespace detail {

/// Raw-vector escort used by inner loops; writes into out.
void escort_into(std::span<const double> p, double alpha,
                 std::span<double> out);

}  // namespace detail

}  // namespace alphaproj
