#include "alphaproj/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "alphaproj/oracle.hpp"

namespace alphaproj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSupportSeed = 0xfa417a11ULL;
constexpr int kSupportSamples = 256;
constexpr double kCertTolerance = 1e-7;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Problem {
  std::vector<double> q;                            // reference, full support
  double alpha;
  const std::vector<std::vector<double>>* constraints;  // orthonormal
  std::size_t n() const { return q.size(); }
  std::size_t m() const { return constraints->size(); }
};

// Residual map R(theta)_i = sum_a P_theta(a)^alpha u_i(a). Returns false
// when theta leaves the natural domain.
bool residual_at(const Problem& pb, std::span<const double> theta,
                 std::vector<double>& masses, double& z,
                 std::vector<double>& residual) {
  masses.resize(pb.n());
  if (!detail::member_masses(pb.q, pb.alpha, *pb.constraints, theta, masses,
                             z)) {
    return false;
  }
  residual.assign(pb.m(), 0.0);
  for (std::size_t a = 0; a < pb.n(); ++a) {
    const double pa = masses[a] / z;
    if (pa <= 0.0) continue;
    const double paw = std::pow(pa, pb.alpha);
    for (std::size_t i = 0; i < pb.m(); ++i) {
      residual[i] += paw * (*pb.constraints)[i][a];
    }
  }
  return true;
}

double inf_norm(const std::vector<double>& v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::fabs(x));
  return worst;
}

double divergence_of_masses(const Problem& pb,
                            const std::vector<double>& masses, double z) {
  std::vector<double> p(pb.n());
  for (std::size_t a = 0; a < pb.n(); ++a) p[a] = masses[a] / z;
  return detail::renyi_div(p, pb.q, AlphaOrder(pb.alpha));
}

struct NewtonOutcome {
  bool converged = false;
  std::vector<double> theta;
  std::vector<double> masses;
  double z = 1.0;
  double residual_norm = kInf;
  int iterations = 0;
};

// Analytic Jacobian J_ij = a [Z^-a sum_a m^(2a-1) u_i u_j - Z^(a-1) R_i R_j];
// clipped coordinates contribute nothing.
Matrix analytic_jacobian(const Problem& pb, const std::vector<double>& masses,
                         double z, const std::vector<double>& residual) {
  const double a = pb.alpha;
  const std::size_t m = pb.m();
  Matrix j = Matrix::Zero(m, m);
  const double za = std::pow(z, -a);
  for (std::size_t idx = 0; idx < pb.n(); ++idx) {
    if (masses[idx] <= 0.0) continue;
    const double w = std::pow(masses[idx], 2.0 * a - 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        j(i, k) += za * w * (*pb.constraints)[i][idx] *
                   (*pb.constraints)[k][idx];
      }
    }
  }
  const double zb = std::pow(z, a - 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      j(i, k) = a * (j(i, k) - zb * residual[i] * residual[k]);
    }
  }
  return j;
}

NewtonOutcome newton_solve(const Problem& pb, std::vector<double> theta,
                           const SolverOptions& opts,
                           std::vector<TraceEntry>& trace) {
  NewtonOutcome out;
  const std::size_t m = pb.m();
  std::vector<double> masses, residual;
  double z = 1.0;
  if (theta.size() != m || !residual_at(pb, theta, masses, z, residual)) {
    theta.assign(m, 0.0);
    if (!residual_at(pb, theta, masses, z, residual)) return out;
  }
  double rnorm = inf_norm(residual);

  std::vector<double> theta_try(m), masses_try, residual_try;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    trace.push_back({static_cast<int>(trace.size()), rnorm,
                     divergence_of_masses(pb, masses, z)});
    if (rnorm <= opts.tolerance) {
      out.converged = true;
      break;
    }

    Matrix jac(m, m);
    if (opts.jacobian == SolverOptions::Jacobian::analytic) {
      jac = analytic_jacobian(pb, masses, z, residual);
    } else {
      bool ok = true;
      for (std::size_t jcol = 0; jcol < m && ok; ++jcol) {
        double step = opts.fd_step;
        theta_try = theta;
        theta_try[jcol] += step;
        double z_try;
        if (!residual_at(pb, theta_try, masses_try, z_try, residual_try)) {
          step = -step;
          theta_try[jcol] = theta[jcol] + step;
          if (!residual_at(pb, theta_try, masses_try, z_try, residual_try)) {
            ok = false;
            break;
          }
        }
        for (std::size_t i = 0; i < m; ++i) {
          jac(i, jcol) = (residual_try[i] - residual[i]) / step;
        }
      }
      if (!ok) break;
    }

    Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) break;
    const Vector r = Eigen::Map<const Vector>(residual.data(), m);
    const Vector delta = lu.solve(-r);
    if (!delta.allFinite()) break;

    // Step halving until the residual norm drops and theta stays in the
    // natural domain.
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h < opts.damping_max_halvings; ++h, scale *= 0.5) {
      for (std::size_t jcol = 0; jcol < m; ++jcol) {
        theta_try[jcol] = theta[jcol] + scale * delta(jcol);
      }
      double z_try;
      if (!residual_at(pb, theta_try, masses_try, z_try, residual_try)) {
        continue;
      }
      const double rnorm_try = inf_norm(residual_try);
      if (rnorm_try < rnorm) {
        theta = theta_try;
        masses = masses_try;
        residual = residual_try;
        z = z_try;
        rnorm = rnorm_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  if (!out.converged && rnorm <= opts.tolerance) out.converged = true;
  out.theta = std::move(theta);
  out.masses = std::move(masses);
  out.z = z;
  out.residual_norm = rnorm;
  out.iterations = static_cast<int>(trace.size());
  return out;
}

// ---------------------------------------------------------------------------
// Convex fallback in u-coordinates: optimize sum u(a) Q(a)^(1-alpha) over
// the cone {u >= 0, <u, f_i> = 0} with the scale fixed by sum u^(1/a) = 1
// (minimize for alpha > 1, maximize for alpha < 1), by projected gradient.
// ---------------------------------------------------------------------------

void project_cone(const std::vector<std::vector<double>>& constraints,
                  std::vector<double>& x) {
  // Dykstra's alternating projections: nullspace of the constraints,
  // then the nonnegative orthant.
  const std::size_t n = x.size();
  std::vector<double> pinc(n, 0.0), qinc(n, 0.0), y1(n);
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < n; ++i) y1[i] = x[i] + pinc[i];
    for (const auto& f : constraints) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += y1[i] * f[i];
      for (std::size_t i = 0; i < n; ++i) y1[i] -= c * f[i];
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pinc[i] = (x[i] + pinc[i]) - y1[i];
      const double t = y1[i] + qinc[i];
      const double zi = t > 0.0 ? t : 0.0;
      qinc[i] = t - zi;
      delta = std::max(delta, std::fabs(zi - x[i]));
      x[i] = zi;
    }
    if (delta < 1e-16) break;
  }
}

// Rescales u so that sum u^(1/alpha) = 1. Returns false on zero mass.
bool normalize_u(std::vector<double>& u, double alpha) {
  double msum = 0.0;
  for (double v : u) {
    if (v > 0.0) msum += std::pow(v, 1.0 / alpha);
  }
  if (!(msum > 0.0) || !std::isfinite(msum)) return false;
  const double t = std::pow(msum, -alpha);
  for (double& v : u) v = v > 0.0 ? v * t : 0.0;
  return true;
}

bool projected_gradient(const Problem& pb, const LinearFamilySpec& fam,
                        std::vector<double>& u_out) {
  const std::size_t n = pb.n();
  const double a = pb.alpha;
  const bool maximize = a < 1.0;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(pb.q[i], 1.0 - a);

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::pow(pb.q[i], a);
  project_cone(*pb.constraints, u);
  if (!normalize_u(u, a)) {
    // The reference projects to nothing useful; seed from a sampled member.
    try {
      const auto members = oracle::sample_family_members(fam, 1, kSupportSeed);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = members[0][i] > 0.0 ? std::pow(members[0][i], a) : 0.0;
      }
    } catch (const EvaluationError&) {
      return false;
    }
    if (!normalize_u(u, a)) return false;
  }

  const auto objective = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * w[i];
    return s;
  };

  double f = objective(u);
  const double grad_exp = (1.0 - a) / a;
  std::vector<double> grad(n), cand(n);
  double step = 0.5;
  int stagnations = 0;
  for (int iter = 0; iter < 4000 && stagnations < 5; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = std::max(u[i], 1e-16);
      double g = w[i] - f * std::pow(ui, grad_exp);
      g = std::clamp(g, -1e8, 1e8);
      grad[i] = maximize ? g : -g;
    }
    bool improved = false;
    double eta = step;
    for (int bt = 0; bt < 50; ++bt, eta *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) cand[i] = u[i] + eta * grad[i];
      project_cone(*pb.constraints, cand);
      if (!normalize_u(cand, a)) continue;
      const double fc = objective(cand);
      const bool better = maximize ? fc > f * (1.0 + 1e-15) + 1e-18
                                   : fc < f * (1.0 - 1e-15) - 1e-18;
      if (better) {
        u = cand;
        f = fc;
        step = std::min(eta * 2.0, 1e3);
        improved = true;
        break;
      }
    }
    stagnations = improved ? 0 : stagnations + 1;
  }
  u_out = std::move(u);
  return true;
}

// Least-squares warm start: fit theta to P = u^(1/alpha) over the
// coordinates carrying mass. No membership tolerance here; Newton
// polishes afterwards.
std::vector<double> warm_theta_from_u(const Problem& pb,
                                      const std::vector<double>& u) {
  const std::size_t n = pb.n();
  const std::size_t m = pb.m();
  const double a = pb.alpha;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = u[i] > 0.0 ? std::pow(u[i], 1.0 / a) : 0.0;
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 1e-9) rows.push_back(i);
  }
  if (rows.size() < 1) return std::vector<double>(m, 0.0);
  Matrix A(rows.size(), m + 1);
  Vector b(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    if (a == 1.0) {
      A(r, 0) = -1.0;
      for (std::size_t j = 0; j < m; ++j) A(r, j + 1) = (*pb.constraints)[j][i];
      b(r) = std::log(p[i]) - std::log(pb.q[i]);
    } else {
      A(r, 0) = std::pow(pb.q[i], 1.0 - a);
      for (std::size_t j = 0; j < m; ++j) {
        A(r, j + 1) = (1.0 - a) * (*pb.constraints)[j][i];
      }
      b(r) = std::pow(p[i], 1.0 - a);
    }
  }
  const Vector x = A.completeOrthogonalDecomposition().solve(b);
  std::vector<double> theta(m, 0.0);
  if (a == 1.0) {
    for (std::size_t j = 0; j < m; ++j) theta[j] = x(j + 1);
  } else {
    const double c = x(0);
    if (!(c > 0.0) || !std::isfinite(c)) return std::vector<double>(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) theta[j] = x(j + 1) / c;
  }
  return theta;
}

std::optional<std::vector<bool>> try_family_support(
    const LinearFamilySpec& fam) {
  try {
    return oracle::estimate_family_support(fam, kSupportSamples, kSupportSeed);
  } catch (const EvaluationError&) {
    return std::nullopt;  // sampler blind spot or empty family
  }
}

ProjectionResult finish_result(const Problem& pb, const LinearFamilySpec& fam,
                               const std::optional<std::vector<bool>>& fam_mask,
                               std::vector<double> theta,
                               const std::vector<double>& masses, double z,
                               std::vector<TraceEntry> trace,
                               bool theta_valid) {
  const std::size_t n = pb.n();
  std::vector<double> probs(n);
  for (std::size_t a = 0; a < n; ++a) probs[a] = masses[a] / z;
  FiniteDistribution minimizer(fam.alphabet(), probs, true);

  ProjectionResult result{std::move(minimizer), {}, z, 0.0, 0.0, true, true,
                          false, static_cast<int>(trace.size()),
                          std::move(trace)};
  if (theta_valid) result.theta = std::move(theta);
  result.divergence =
      detail::renyi_div(result.minimizer.probs(), pb.q, AlphaOrder(pb.alpha));
  result.constraint_residual_norm =
      fam.residual_norm_raw(result.minimizer.probs());

  if (pb.alpha < 1.0 && theta_valid) {
    // KKT sign condition on clipped coordinates:
    // P*(a) = 0 implies Q(a)^(1-a) + (1-a) sum theta_i f_i(a) <= 0.
    for (std::size_t a = 0; a < n; ++a) {
      if (result.minimizer[a] > 0.0) continue;
      double bracket = std::pow(pb.q[a], 1.0 - pb.alpha);
      for (std::size_t j = 0; j < pb.m(); ++j) {
        bracket += (1.0 - pb.alpha) * result.theta[j] * (*pb.constraints)[j][a];
      }
      if (bracket > 1e-10) result.kkt_clipping_ok = false;
    }
  }

  const std::vector<bool> own_mask = support_mask(result.minimizer, 1e-12);
  // Against the sampled member supports; a blind sampler falls back to
  // the solution's own support (the one member it certainly has).
  result.support_equals_family_support =
      fam_mask.has_value() ? *fam_mask == own_mask : true;
  return result;
}

ProjectionResult solve_impl(const FiniteDistribution& q,
                            const LinearFamilySpec& fam,
                            const SolverOptions& opts, int depth);

// alpha > 1 with a support-deficient family: the minimizer lives on the
// sub-simplex, where the restricted problem is smooth again.
ProjectionResult solve_on_subalphabet(const FiniteDistribution& q,
                                      const LinearFamilySpec& fam,
                                      const SolverOptions& opts, int depth,
                                      const std::vector<bool>& support,
                                      std::vector<TraceEntry> trace) {
  std::vector<std::size_t> keep;
  for (std::size_t a = 0; a < support.size(); ++a) {
    if (support[a]) keep.push_back(a);
  }
  if (keep.empty() || keep.size() == support.size()) {
    throw SolverError("forward_project: could not isolate the family support",
                      std::move(trace));
  }
  const LinearFamilySpec sub_fam = fam.restricted(keep);
  std::vector<std::string> sub_labels;
  std::vector<double> sub_q;
  for (std::size_t a : keep) {
    sub_labels.push_back(q.alphabet()[a]);
    sub_q.push_back(q[a]);
  }
  SolverOptions sub_opts = opts;
  sub_opts.tolerance = opts.tolerance / 10.0;
  sub_opts.initial_theta.clear();
  const ProjectionResult sub = solve_impl(
      FiniteDistribution(std::move(sub_labels), std::move(sub_q), true),
      sub_fam, sub_opts, depth + 1);

  std::vector<double> probs(q.size(), 0.0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    probs[keep[i]] = sub.minimizer[i];
  }
  for (const auto& entry : sub.trace) trace.push_back(entry);

  Problem pb{q.probs(), fam.alpha().value(), &fam.constraints()};
  ProjectionResult result{
      FiniteDistribution(q.alphabet(), std::move(probs), true),
      {},
      sub.normalizer,
      0.0,
      0.0,
      sub.kkt_clipping_ok,
      true,
      false,
      static_cast<int>(trace.size()),
      std::move(trace)};
  result.divergence =
      detail::renyi_div(result.minimizer.probs(), pb.q, fam.alpha());
  result.constraint_residual_norm =
      fam.residual_norm_raw(result.minimizer.probs());
  result.support_equals_family_support =
      support == support_mask(result.minimizer, 1e-12);
  return result;
}

ProjectionResult solve_impl(const FiniteDistribution& q,
                            const LinearFamilySpec& fam,
                            const SolverOptions& opts, int depth) {
  if (q.alphabet() != fam.alphabet()) {
    throw ValidationError("forward_project: alphabet mismatch");
  }
  fam.alpha().require_finite_positive("forward_project");
  if (!q.full_support()) {
    throw ValidationError(
        "forward_project: reference measure must have full support");
  }
  if (depth > 4) {
    throw SolverError("forward_project: support-restriction recursion failed",
                      {});
  }

  Problem pb{q.probs(), fam.alpha().value(), &fam.constraints()};
  std::vector<TraceEntry> trace;

  if (pb.m() == 0) {
    // Unconstrained: the minimizer is the reference itself.
    std::vector<double> masses = pb.q;
    return finish_result(pb, fam, std::vector<bool>(pb.n(), true), {}, masses,
                         1.0, std::move(trace), true);
  }

  const std::optional<std::vector<bool>> fam_mask = try_family_support(fam);
  if (pb.alpha > 1.0) {
    // For alpha > 1 the projection's support equals the family support, so
    // a support-deficient family has no exponential-form solution at all;
    // Newton would chase an infinite parameter. Solve on the sub-simplex.
    if (!fam_mask.has_value()) {
      throw SolverError(
          "forward_project: family appears empty or unreachable "
          "(sampler found no member)",
          std::move(trace));
    }
    const bool full = std::all_of(fam_mask->begin(), fam_mask->end(),
                                  [](bool b) { return b; });
    if (!full) {
      return solve_on_subalphabet(q, fam, opts, depth, *fam_mask,
                                  std::move(trace));
    }
  }

  NewtonOutcome newton = newton_solve(pb, opts.initial_theta, opts, trace);
  if (newton.converged) {
    return finish_result(pb, fam, fam_mask, std::move(newton.theta),
                         newton.masses, newton.z, std::move(trace), true);
  }
  if (!opts.fallback_enabled) {
    throw SolverError("forward_project: Newton failed to converge (residual " +
                          std::to_string(newton.residual_norm) + ")",
                      std::move(trace));
  }

  // Convex program in u-coordinates, then a Newton polish from the fitted
  // natural parameters.
  std::vector<double> u;
  if (!projected_gradient(pb, fam, u)) {
    throw SolverError(
        "forward_project: family appears empty or infeasible "
        "(no feasible point found)",
        std::move(trace));
  }
  NewtonOutcome polished =
      newton_solve(pb, warm_theta_from_u(pb, u), opts, trace);
  if (polished.converged) {
    return finish_result(pb, fam, fam_mask, std::move(polished.theta),
                         polished.masses, polished.z, std::move(trace), true);
  }

  if (pb.alpha < 1.0) {
    // The projected-gradient support pattern may pin coordinates whose
    // brackets sit exactly at the clip boundary; retry on the support.
    std::vector<bool> mask(pb.n(), false);
    bool shrunk = false;
    for (std::size_t a = 0; a < pb.n(); ++a) {
      mask[a] = u[a] > 1e-10;
      shrunk = shrunk || !mask[a];
    }
    if (shrunk) {
      return solve_on_subalphabet(q, fam, opts, depth, mask, std::move(trace));
    }
  }
  throw SolverError(
      "forward_project: solver failed (Newton residual " +
          std::to_string(newton.residual_norm) + ", polish residual " +
          std::to_string(polished.residual_norm) +
          "); family may be empty or the projection may not exist",
      std::move(trace));
}

}  // namespace

CertificateReport pythagorean_certificate(const ProjectionResult& result,
                                          const FiniteDistribution& q,
                                          const LinearFamilySpec& fam,
                                          int n_test_points,
                                          std::uint64_t seed) {
  if (n_test_points <= 0) {
    throw ValidationError("pythagorean_certificate: need at least one point");
  }
  const AlphaOrder alpha = fam.alpha();
  const auto members = oracle::sample_family_members(
      fam, static_cast<std::size_t>(n_test_points), seed);
  const double d_star_q =
      detail::renyi_div(result.minimizer.probs(), q.probs(), alpha);
  CertificateReport report{-kInf, kInf, 0, 0};
  for (const auto& p : members) {
    const double d_p_q = detail::renyi_div(p.probs(), q.probs(), alpha);
    const double d_p_star =
        detail::renyi_div(p.probs(), result.minimizer.probs(), alpha);
    if (std::isinf(d_p_star) || std::isinf(d_p_q)) {
      ++report.skipped_infinite;
      continue;
    }
    const double residual = d_p_star + d_star_q - d_p_q;
    report.max_residual = std::max(report.max_residual, residual);
    report.min_residual = std::min(report.min_residual, residual);
    ++report.samples;
  }
  if (report.samples == 0) {
    report.max_residual = 0.0;
    report.min_residual = 0.0;
  }
  return report;
}

namespace {

void certificate_gate(ProjectionResult& result, const FiniteDistribution& q,
                      const LinearFamilySpec& fam, const SolverOptions& opts) {
  if (opts.certificate_points <= 0) return;
  CertificateReport cert;
  try {
    cert = pythagorean_certificate(result, q, fam, opts.certificate_points,
                                   opts.certificate_seed);
  } catch (const EvaluationError&) {
    return;  // degenerate family: nothing to sample beyond the solution
  }
  bool ok = cert.max_residual <= kCertTolerance;
  if (fam.alpha().value() > 1.0) {
    ok = ok && cert.min_residual >= -kCertTolerance;
  }
  if (!ok) {
    throw CertificateError(
        "forward_project: Pythagorean certificate failed (max residual " +
            std::to_string(cert.max_residual) + ", min residual " +
            std::to_string(cert.min_residual) + ")",
        std::move(result), cert.max_residual);
  }
}

}  // namespace

ProjectionResult forward_project(const FiniteDistribution& q,
                                 const LinearFamilySpec& fam,
                                 const SolverOptions& opts) {
  ProjectionResult result = solve_impl(q, fam, opts, 0);
  if (result.constraint_residual_norm > opts.tolerance) {
    throw SolverError("forward_project: converged point misses the family "
                      "(residual " +
                          std::to_string(result.constraint_residual_norm) +
                          ")",
                      result.trace);
  }
  certificate_gate(result, q, fam, opts);
  return result;
}

IterativeResult iterative_project(const FiniteDistribution& q,
                                  const std::vector<LinearFamilySpec>& fams,
                                  double tol, int max_cycles,
                                  const SolverOptions& opts) {
  if (fams.empty()) {
    throw ValidationError("iterative_project: no families given");
  }
  const AlphaOrder alpha = fams.front().alpha();
  if (!(alpha.value() > 1.0) || !alpha.is_finite_positive()) {
    throw ValidationError(
        "iterative_project: requires alpha in (1, inf), got " +
        std::to_string(alpha.value()));
  }
  for (const auto& fam : fams) {
    if (fam.alphabet() != q.alphabet()) {
      throw ValidationError("iterative_project: alphabet mismatch");
    }
    if (fam.alpha().value() != alpha.value()) {
      throw ValidationError("iterative_project: families must share alpha");
    }
  }
  if (tol <= 0.0 || max_cycles < 1) {
    throw ValidationError("iterative_project: bad stopping parameters");
  }

  // The intersection is itself an alpha-linear family with the
  // concatenated constraints; the final iterate is certified against it.
  std::vector<std::vector<double>> all_constraints;
  for (const auto& fam : fams) {
    for (const auto& f : fam.constraints()) all_constraints.push_back(f);
  }
  const LinearFamilySpec intersection = LinearFamilySpec::from_constraints(
      alpha, q.alphabet(), std::move(all_constraints));

  const auto certified = [&](const FiniteDistribution& p) {
    ProjectionResult probe{p,    {},   1.0, renyi_divergence(p, q, alpha),
                           0.0,  true, true, false,
                           0,    {}};
    try {
      const CertificateReport cert = pythagorean_certificate(
          probe, q, intersection, opts.certificate_points,
          opts.certificate_seed);
      return cert.max_residual <= kCertTolerance &&
             cert.min_residual >= -kCertTolerance;
    } catch (const EvaluationError&) {
      return true;  // nothing to sample against
    }
  };

  const int m = static_cast<int>(fams.size());
  std::vector<IterationStep> steps;
  FiniteDistribution current = q;
  int consecutive_small = 0;
  bool converged = false;
  int step = 0;
  // Per-stage solves skip their own member-sampling certificate; the
  // intersection-level certificate below gates the final iterate.
  SolverOptions stage_opts = opts;
  stage_opts.certificate_points = 0;
  for (int cycle = 0; cycle < max_cycles && !converged; ++cycle) {
    for (int k = 0; k < m; ++k) {
      ++step;
      const int fam_index = (step - 1) % m;  // i_n = n mod m, cyclic
      const ProjectionResult stage =
          forward_project(current, fams[fam_index], stage_opts);
      const double d_step = renyi_divergence(stage.minimizer, current, alpha);
      steps.push_back(
          {step, fam_index, d_step, stage.constraint_residual_norm});
      current = stage.minimizer;
      consecutive_small = d_step < tol ? consecutive_small + 1 : 0;
      // The step rule alone can fire while the iterate is still far from
      // the intersection projection (slow cyclic contraction), so the
      // Pythagorean certificate arbitrates the actual stop.
      if (consecutive_small >= m) {
        if (certified(current)) {
          converged = true;
          break;
        }
        consecutive_small = 0;
      }
    }
  }

  std::vector<TraceEntry> trace;
  for (const auto& s : steps) {
    trace.push_back({s.step, s.stage_residual_norm, s.step_divergence});
  }
  ProjectionResult final_result{current,
                                {},
                                1.0,
                                renyi_divergence(current, q, alpha),
                                intersection.residual_norm_raw(current.probs()),
                                true,
                                true,
                                false,
                                step,
                                std::move(trace)};
  const ExpFamilySpec exp_form(alpha, q, intersection.constraints());
  if (const auto fit = fit_theta(current, exp_form)) {
    final_result.theta = fit->theta;
    final_result.normalizer = fit->normalizer;
  }
  std::vector<bool> fam_mask(q.size(), false);
  try {
    fam_mask = oracle::estimate_family_support(intersection, kSupportSamples,
                                               kSupportSeed);
  } catch (const EvaluationError&) {
  }
  for (std::size_t a = 0; a < current.size(); ++a) {
    if (current[a] > 1e-12) fam_mask[a] = true;
  }
  final_result.support_equals_family_support =
      fam_mask == support_mask(current, 1e-12);

  if (converged) {
    certificate_gate(final_result, q, intersection, opts);
  }
  return IterativeResult{std::move(final_result), std::move(steps), converged};
}

ReverseResult reverse_project(const FiniteDistribution& p_hat,
                              const ExpFamilySpec& fam,
                              const SolverOptions& opts) {
  if (p_hat.alphabet() != fam.alphabet()) {
    throw ValidationError("reverse_project: alphabet mismatch");
  }
  const AlphaOrder alpha = fam.alpha();
  alpha.require_finite_positive("reverse_project");
  if (alpha.is_one()) {
    throw ValidationError(
        "reverse_project: requires alpha in (0,1) or (1,inf)");
  }
  const double a = alpha.value();
  const auto& q = fam.reference();
  const std::size_t n = fam.dim();

  double denom = 0.0;
  std::vector<double> p_alpha(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (p_hat[i] > 0.0) {
      p_alpha[i] = std::pow(p_hat[i], a);
      denom += p_alpha[i] * std::pow(q[i], 1.0 - a);
    }
  }
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw EvaluationError(
        "reverse_project: degenerate normalization sum "
        "sum P_hat^alpha Q^(1-alpha)");
  }

  const auto& dirs = fam.directions();
  std::vector<double> eta(dirs.size());
  std::vector<std::vector<double>> shifted(dirs.size());
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += p_alpha[i] * dirs[j][i];
    eta[j] = num / denom;
    shifted[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      shifted[j][i] = dirs[j][i] - eta[j] * std::pow(q[i], 1.0 - a);
    }
  }

  LinearFamilySpec shifted_family = LinearFamilySpec::from_constraints(
      alpha, fam.alphabet(), std::move(shifted));
  ProjectionResult proj = forward_project(q, shifted_family, opts);
  ReverseResult out{std::move(proj), std::move(eta), std::move(shifted_family),
                    false, true};
  const bool full_support = out.projection.minimizer.full_support();
  if (a > 1.0) {
    // Supp(P*) = Supp(shifted family) by the support law; the minimum is
    // attained inside the exponential family only when both fill the
    // alphabet, otherwise only on its closure.
    out.in_closure_only = !full_support;
    out.projection.in_closure_only = out.in_closure_only;
  } else {
    out.hypothesis_ok =
        full_support && out.projection.support_equals_family_support;
  }
  return out;
}

TsallisResult tsallis_maxent(const std::vector<double>& energies,
                             double target, const AlphaOrder& alpha,
                             const SolverOptions& opts) {
  alpha.require_finite_positive("tsallis_maxent");
  if (alpha.is_one()) {
    throw ValidationError("tsallis_maxent: requires alpha in (0,1) or (1,inf)");
  }
  if (energies.size() < 2) {
    throw ValidationError("tsallis_maxent: need at least two states");
  }
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  if (!(target > *lo) || !(target < *hi)) {
    throw ValidationError(
        "tsallis_maxent: target energy must lie strictly between min and max "
        "state energies");
  }
  const std::size_t w = energies.size();
  std::vector<double> constraint(w);
  for (std::size_t i = 0; i < w; ++i) constraint[i] = energies[i] - target;
  const FiniteDistribution uniform = uniform_distribution(w);
  const LinearFamilySpec fam = LinearFamilySpec::from_constraints(
      alpha, uniform.alphabet(), {constraint});
  TsallisResult out{forward_project(uniform, fam, opts), 0.0};
  out.tsallis_entropy = tsallis_entropy(out.projection.minimizer, alpha);
  return out;
}

}  // namespace alphaproj
