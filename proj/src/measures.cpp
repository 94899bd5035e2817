#include "alphaproj/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace alphaproj {

namespace {
constexpr double kMassTolerance = 1e-9;
}

FiniteDistribution::FiniteDistribution(std::vector<std::string> alphabet,
                                       std::vector<double> probs,
                                       bool normalize)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (alphabet_.size() != probs_.size()) {
    throw ValidationError("alphabet and probability vector lengths differ (" +
                          std::to_string(alphabet_.size()) + " vs " +
                          std::to_string(probs_.size()) + ")");
  }
  if (alphabet_.empty()) {
    throw ValidationError("empty alphabet");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : alphabet_) {
    if (!seen.insert(label).second) {
      throw ValidationError("duplicate alphabet label '" + label + "'");
    }
  }
  double total = 0.0;
  for (double w : probs_) {
    if (std::isnan(w) || w < 0.0) {
      throw ValidationError("negative or NaN weight " + std::to_string(w));
    }
    total += w;
  }
  if (total <= 0.0) {
    throw ValidationError("zero total mass");
  }
  if (!normalize && std::fabs(total - 1.0) > kMassTolerance) {
    throw ValidationError("mass " + std::to_string(total) +
                          " differs from 1 beyond tolerance 1e-9");
  }
  for (double& w : probs_) w /= total;
}

void FiniteDistribution::require_same_alphabet(const FiniteDistribution& other,
                                               const char* where) const {
  if (!same_alphabet(other)) {
    throw ValidationError(std::string(where) + ": alphabet mismatch");
  }
}

bool FiniteDistribution::full_support() const {
  return std::all_of(probs_.begin(), probs_.end(),
                     [](double p) { return p > 0.0; });
}

FiniteDistribution make_distribution(std::vector<std::string> labels,
                                     std::vector<double> weights,
                                     bool normalize) {
  return FiniteDistribution(std::move(labels), std::move(weights), normalize);
}

FiniteDistribution uniform_distribution(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i + 1);
  return FiniteDistribution(std::move(labels),
                            std::vector<double>(n, 1.0 / double(n)), true);
}

double total_variation(const FiniteDistribution& p,
                       const FiniteDistribution& q) {
  p.require_same_alphabet(q, "total_variation");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return s;
}

namespace detail {

void escort_into(std::span<const double> p, double alpha,
                 std::span<double> out) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] > 0.0 ? std::pow(p[i], alpha) : 0.0;
    total += out[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) out[i] /= total;
}

}  // namespace detail

FiniteDistribution escort(const FiniteDistribution& p,
                          const AlphaOrder& alpha) {
  alpha.require_finite_positive("escort");
  std::vector<double> e(p.size());
  detail::escort_into(p.probs(), alpha.value(), e);
  return FiniteDistribution(p.alphabet(), std::move(e), true);
}

std::vector<std::string> support(const FiniteDistribution& p, double tol) {
  if (tol < 0.0) throw ValidationError("support: tol must be >= 0");
  std::vector<std::string> result;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > tol) result.push_back(p.alphabet()[i]);
  }
  return result;
}

std::vector<bool> support_mask(const FiniteDistribution& p, double tol) {
  std::vector<bool> mask(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mask[i] = p[i] > tol;
  return mask;
}

}  // namespace alphaproj
