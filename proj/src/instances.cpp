#include "alphaproj/instances.hpp"

#include <cmath>

namespace alphaproj {
namespace instances {

std::vector<std::string> default_alphabet(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i + 1);
  return labels;
}

FiniteDistribution random_distribution(Rng& rng, std::size_t n,
                                       double min_mass) {
  std::vector<double> w(n);
  for (auto& x : w) x = -std::log(rng.uniform_pos()) + min_mass;
  return FiniteDistribution(default_alphabet(n), std::move(w), true);
}

FiniteDistribution random_sparse_distribution(Rng& rng, std::size_t n,
                                              double zero_prob) {
  std::vector<double> w(n, 0.0);
  bool any = false;
  for (auto& x : w) {
    if (rng.uniform() >= zero_prob) {
      x = -std::log(rng.uniform_pos());
      any = any || x > 0.0;
    }
  }
  if (!any) w[rng.uniform_int(n)] = 1.0;
  return FiniteDistribution(default_alphabet(n), std::move(w), true);
}

LinearFamilySpec random_family_with_member(Rng& rng, std::size_t n,
                                           const AlphaOrder& alpha,
                                           std::size_t n_constraints) {
  // Anchor member with mass bounded away from zero, so the family keeps a
  // comfortably interior point.
  const FiniteDistribution anchor = random_distribution(rng, n, 0.2);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::pow(anchor[i], alpha.value());
  }
  const double unorm2 = [&] {
    double s = 0.0;
    for (double x : u) s += x * x;
    return s;
  }();

  std::vector<std::vector<double>> constraints;
  for (std::size_t k = 0; k < n_constraints; ++k) {
    std::vector<double> f(n);
    for (auto& x : f) x = rng.gaussian();
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += f[i] * u[i];
    for (std::size_t i = 0; i < n; ++i) f[i] -= proj / unorm2 * u[i];
    constraints.push_back(std::move(f));
  }
  return LinearFamilySpec::from_constraints(alpha, default_alphabet(n),
                                            std::move(constraints));
}

ExpFamilySpec random_exp_family(Rng& rng, std::size_t n,
                                const AlphaOrder& alpha,
                                std::size_t n_directions) {
  const FiniteDistribution reference = random_distribution(rng, n, 0.15);
  // Directions orthogonal to an anchor member's alpha-power, so the
  // associated alpha-linear family (the estimation-side constraint set)
  // is never empty. All-one-sign directions would make it empty and the
  // exponential-family parametrization degenerate.
  const FiniteDistribution anchor = random_distribution(rng, n, 0.2);
  std::vector<double> u(n);
  double unorm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::pow(anchor[i], alpha.value());
    unorm2 += u[i] * u[i];
  }
  std::vector<std::vector<double>> dirs(n_directions);
  for (auto& d : dirs) {
    d.resize(n);
    double proj = 0.0;
    for (auto& x : d) x = rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) proj += d[i] * u[i];
    for (std::size_t i = 0; i < n; ++i) d[i] -= proj / unorm2 * u[i];
  }
  return ExpFamilySpec(alpha, reference, std::move(dirs));
}

}  // namespace instances
}  // namespace alphaproj
