#include "alphaproj/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace alphaproj {

namespace {

constexpr double kRankTolerance = 1e-10;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void subtract_projection(std::vector<double>& w,
                         const std::vector<double>& u) {
  const double c = dot(w, u);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * u[i];
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows,
                               std::size_t dim) {
  Eigen::MatrixXd m(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<double> convention_map(
    const std::vector<std::vector<double>>& raw,
    const std::vector<std::vector<double>>& orthonormal,
    const std::vector<double>& theta, std::size_t dim) {
  if (raw.empty() || theta.empty()) return theta;
  Eigen::VectorXd target = Eigen::VectorXd::Zero(dim);
  for (std::size_t j = 0; j < orthonormal.size(); ++j) {
    for (std::size_t a = 0; a < dim; ++a)
      target(a) += theta[j] * orthonormal[j][a];
  }
  const Eigen::MatrixXd ft = rows_to_matrix(raw, dim).transpose();
  Eigen::VectorXd sol =
      ft.completeOrthogonalDecomposition().solve(target);
  return std::vector<double>(sol.data(), sol.data() + sol.size());
}

}  // namespace

std::vector<std::vector<double>> orthogonalize(
    const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) {
    throw ValidationError("orthogonalize: empty input");
  }
  const std::size_t dim = vectors.front().size();
  std::vector<std::vector<double>> basis;
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      throw ValidationError("orthogonalize: vectors of unequal length");
    }
    const double orig = norm(v);
    if (orig == 0.0) continue;
    std::vector<double> w = v;
    // Two Gram-Schmidt sweeps keep the basis orthogonal to ~1e-16.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : basis) subtract_projection(w, u);
    }
    const double rest = norm(w);
    if (rest < kRankTolerance * orig) continue;  // dependent, drop
    for (double& x : w) x /= rest;
    basis.push_back(std::move(w));
  }
  if (basis.empty()) {
    throw ValidationError("orthogonalize: all-zero input");
  }
  return basis;
}

std::vector<std::vector<double>> orthogonal_complement(
    const std::vector<std::vector<double>>& vectors, std::size_t dim) {
  std::vector<std::vector<double>> basis =
      vectors.empty() ? std::vector<std::vector<double>>{}
                      : orthogonalize(vectors);
  std::vector<std::vector<double>> complement;
  const std::size_t want = dim - basis.size();
  for (std::size_t i = 0; i < dim && complement.size() < want; ++i) {
    std::vector<double> w(dim, 0.0);
    w[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : basis) subtract_projection(w, u);
      for (const auto& u : complement) subtract_projection(w, u);
    }
    const double rest = norm(w);
    if (rest < kRankTolerance) continue;
    for (double& x : w) x /= rest;
    complement.push_back(std::move(w));
  }
  return complement;
}

LinearFamilySpec LinearFamilySpec::from_constraints(
    const AlphaOrder& alpha, std::vector<std::string> alphabet,
    std::vector<std::vector<double>> constraints) {
  alpha.require_finite_positive("LinearFamilySpec");
  LinearFamilySpec fam(alpha, std::move(alphabet));
  const std::size_t dim = fam.dim();
  for (const auto& c : constraints) {
    if (c.size() != dim) {
      throw ValidationError(
          "LinearFamilySpec: constraint length differs from alphabet size");
    }
  }
  fam.raw_constraints_ = std::move(constraints);
  if (!fam.raw_constraints_.empty()) {
    bool any_nonzero = false;
    for (const auto& c : fam.raw_constraints_) {
      if (norm(c) > 0.0) any_nonzero = true;
    }
    if (any_nonzero) fam.constraints_ = orthogonalize(fam.raw_constraints_);
  }
  if (fam.constraints_.size() > dim - 1) {
    throw ValidationError(
        "LinearFamilySpec: more independent constraints than alphabet size "
        "minus one");
  }
  fam.generator_basis_ = orthogonal_complement(fam.constraints_, dim);
  return fam;
}

LinearFamilySpec LinearFamilySpec::from_generators(
    const AlphaOrder& alpha, std::vector<std::string> alphabet,
    const std::vector<std::vector<double>>& generators) {
  alpha.require_finite_positive("LinearFamilySpec");
  if (generators.empty()) {
    throw ValidationError("LinearFamilySpec: no generator functions");
  }
  LinearFamilySpec fam(alpha, std::move(alphabet));
  const std::size_t dim = fam.dim();
  for (const auto& g : generators) {
    if (g.size() != dim) {
      throw ValidationError(
          "LinearFamilySpec: generator length differs from alphabet size");
    }
  }
  fam.generator_basis_ = orthogonalize(generators);
  fam.constraints_ = orthogonal_complement(fam.generator_basis_, dim);
  return fam;
}

std::vector<double> LinearFamilySpec::constraint_residual(
    const FiniteDistribution& p) const {
  if (p.alphabet() != alphabet_) {
    throw ValidationError("constraint_residual: alphabet mismatch");
  }
  const double a = alpha_.value();
  std::vector<double> pa(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    pa[i] = p[i] > 0.0 ? std::pow(p[i], a) : 0.0;
  }
  std::vector<double> r(constraints_.size());
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    r[k] = dot(pa, constraints_[k]);
  }
  return r;
}

double LinearFamilySpec::constraint_residual_norm(
    const FiniteDistribution& p) const {
  double worst = 0.0;
  for (double r : constraint_residual(p)) worst = std::max(worst, std::fabs(r));
  return worst;
}

double LinearFamilySpec::residual_norm_raw(std::span<const double> probs) const {
  const double a = alpha_.value();
  double worst = 0.0;
  for (const auto& f : constraints_) {
    double s = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) s += std::pow(probs[i], a) * f[i];
    }
    worst = std::max(worst, std::fabs(s));
  }
  return worst;
}

LinearFamilySpec LinearFamilySpec::restricted(
    const std::vector<std::size_t>& keep) const {
  std::vector<std::string> sub_alphabet;
  sub_alphabet.reserve(keep.size());
  for (std::size_t i : keep) sub_alphabet.push_back(alphabet_[i]);
  std::vector<std::vector<double>> cut;
  for (const auto& f : constraints_) {
    std::vector<double> row;
    row.reserve(keep.size());
    for (std::size_t i : keep) row.push_back(f[i]);
    if (norm(row) > 1e-14) cut.push_back(std::move(row));
  }
  return from_constraints(alpha_, std::move(sub_alphabet), std::move(cut));
}

std::vector<double> LinearFamilySpec::to_raw_convention(
    const std::vector<double>& theta) const {
  return convention_map(raw_constraints_, constraints_, theta, dim());
}

ExpFamilySpec::ExpFamilySpec(const AlphaOrder& alpha,
                             FiniteDistribution reference,
                             std::vector<std::vector<double>> directions)
    : alpha_(alpha), reference_(std::move(reference)) {
  alpha_.require_finite_positive("ExpFamilySpec");
  if (!reference_.full_support()) {
    throw ValidationError("ExpFamilySpec: reference measure must have full "
                          "support");
  }
  for (const auto& d : directions) {
    if (d.size() != reference_.size()) {
      throw ValidationError(
          "ExpFamilySpec: direction length differs from alphabet size");
    }
  }
  raw_directions_ = std::move(directions);
  if (!raw_directions_.empty()) directions_ = orthogonalize(raw_directions_);
}

std::vector<double> ExpFamilySpec::to_raw_convention(
    const std::vector<double>& theta) const {
  return convention_map(raw_directions_, directions_, theta, dim());
}

namespace detail {

bool member_masses(std::span<const double> q, double alpha,
                   const std::vector<std::vector<double>>& directions,
                   std::span<const double> theta, std::span<double> masses,
                   double& z) {
  const std::size_t n = q.size();
  z = 0.0;
  if (alpha == 1.0) {
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0.0;
      for (std::size_t j = 0; j < directions.size(); ++j) {
        s += theta[j] * directions[j][a];
      }
      masses[a] = q[a] * std::exp(s);
      z += masses[a];
    }
    return std::isfinite(z) && z > 0.0;
  }
  const double exponent = 1.0 / (1.0 - alpha);
  for (std::size_t a = 0; a < n; ++a) {
    double bracket = std::pow(q[a], 1.0 - alpha);
    for (std::size_t j = 0; j < directions.size(); ++j) {
      bracket += (1.0 - alpha) * theta[j] * directions[j][a];
    }
    if (bracket <= 0.0) {
      if (alpha > 1.0) return false;  // outside the natural domain
      masses[a] = 0.0;                // clipped coordinate
      continue;
    }
    masses[a] = std::pow(bracket, exponent);
    z += masses[a];
  }
  return std::isfinite(z) && z > 0.0;
}

}  // namespace detail

FamilyMember exp_family_member(const ExpFamilySpec& fam,
                               const std::vector<double>& theta) {
  if (theta.size() != fam.directions().size()) {
    throw ValidationError("exp_family_member: theta length differs from the "
                          "number of directions");
  }
  const std::size_t n = fam.dim();
  std::vector<double> masses(n);
  double z = 0.0;
  if (!detail::member_masses(fam.reference().probs(), fam.alpha().value(),
                             fam.directions(), theta, masses, z)) {
    throw ValidationError(
        "exp_family_member: theta outside the natural domain");
  }
  std::vector<double> probs(n);
  for (std::size_t a = 0; a < n; ++a) probs[a] = masses[a] / z;
  return {FiniteDistribution(fam.alphabet(), std::move(probs), true), z};
}

std::optional<ThetaFit> fit_theta(const FiniteDistribution& p,
                                  const ExpFamilySpec& fam) {
  if (p.alphabet() != fam.alphabet()) {
    throw ValidationError("fit_theta: alphabet mismatch");
  }
  constexpr double kFitTol = 1e-8;
  const std::size_t n = fam.dim();
  const std::size_t m = fam.directions().size();
  const auto& q = fam.reference();
  const double alpha = fam.alpha().value();

  std::vector<std::size_t> supp;
  for (std::size_t a = 0; a < n; ++a) {
    if (p[a] > 0.0) supp.push_back(a);
  }
  if (alpha >= 1.0 && supp.size() != n) {
    // Members all share the full support of the reference.
    return std::nullopt;
  }

  Eigen::MatrixXd A(supp.size(), m + 1);
  Eigen::VectorXd b(supp.size());
  if (fam.alpha().is_one()) {
    // log P - log Q = sum theta_j u_j - log Z over the support.
    for (std::size_t r = 0; r < supp.size(); ++r) {
      const std::size_t a = supp[r];
      A(r, 0) = -1.0;
      for (std::size_t j = 0; j < m; ++j) A(r, j + 1) = fam.directions()[j][a];
      b(r) = std::log(p[a]) - std::log(q[a]);
    }
  } else {
    // P^(1-alpha) = c Q^(1-alpha) + (1-alpha) sum phi_j u_j, c = Z^(alpha-1).
    for (std::size_t r = 0; r < supp.size(); ++r) {
      const std::size_t a = supp[r];
      A(r, 0) = std::pow(q[a], 1.0 - alpha);
      for (std::size_t j = 0; j < m; ++j) {
        A(r, j + 1) = (1.0 - alpha) * fam.directions()[j][a];
      }
      b(r) = std::pow(p[a], 1.0 - alpha);
    }
  }
  // Rows scale like P^(1-alpha), so the residual test is per-row relative;
  // small-mass coordinates would otherwise dominate the absolute norm.
  for (std::size_t r = 0; r < supp.size(); ++r) {
    const double scale = std::max(1.0, std::fabs(b(r)));
    A.row(r) /= scale;
    b(r) /= scale;
  }
  const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(b);
  if ((A * x - b).lpNorm<Eigen::Infinity>() > kFitTol) return std::nullopt;

  ThetaFit fit;
  fit.theta.resize(m);
  if (fam.alpha().is_one()) {
    fit.normalizer = std::exp(x(0));
    for (std::size_t j = 0; j < m; ++j) fit.theta[j] = x(j + 1);
  } else {
    const double c = x(0);
    if (!(c > 0.0)) return std::nullopt;
    fit.normalizer = std::pow(c, 1.0 / (alpha - 1.0));
    for (std::size_t j = 0; j < m; ++j) fit.theta[j] = x(j + 1) / c;
    if (alpha < 1.0) {
      // Clipped coordinates must sit on the non-positive side.
      for (std::size_t a = 0; a < n; ++a) {
        if (p[a] > 0.0) continue;
        double bracket = std::pow(q[a], 1.0 - alpha);
        for (std::size_t j = 0; j < m; ++j) {
          bracket += (1.0 - alpha) * fit.theta[j] * fam.directions()[j][a];
        }
        if (bracket > 1e-10) return std::nullopt;
      }
    }
  }

  // The fitted parameters must reproduce P.
  try {
    const FamilyMember member = exp_family_member(fam, fit.theta);
    for (std::size_t a = 0; a < n; ++a) {
      if (std::fabs(member.distribution[a] - p[a]) > kFitTol) {
        return std::nullopt;
      }
    }
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  return fit;
}

}  // namespace alphaproj
