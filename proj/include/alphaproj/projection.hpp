#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alphaproj/divergences.hpp"
#include "alphaproj/families.hpp"
#include "alphaproj/measures.hpp"

namespace alphaproj {

struct TraceEntry {
  int iteration;
  double residual_norm;
  double divergence;
};

/// Outcome of a forward/reverse projection solve.
struct ProjectionResult {
  FiniteDistribution minimizer;
  /// Natural parameters over the orthonormal constraint basis; empty when
  /// the minimizer has no exponential-form representation (alpha > 1 with
  /// a support-deficient family: the minimum sits on the family closure).
  std::vector<double> theta;
  double normalizer = 1.0;
  double divergence = 0.0;
  double constraint_residual_norm = 0.0;
  bool kkt_clipping_ok = true;  // alpha < 1 only; true elsewhere
  bool support_equals_family_support = true;
  bool in_closure_only = false;  // reverse projection, alpha > 1
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

struct SolverOptions {
  double tolerance = 1e-10;       // infinity norm of the constraint residual
  int max_iterations = 200;
  int damping_max_halvings = 60;
  enum class Jacobian { finite_difference, analytic };
  Jacobian jacobian = Jacobian::finite_difference;
  double fd_step = 1e-7;
  bool fallback_enabled = true;
  /// Newton start; zeros when empty.
  std::vector<double> initial_theta;
  /// Pythagorean certificate run on every successful solve.
  int certificate_points = 50;
  std::uint64_t certificate_seed = 0x5eedULL;
};

/// Solver could not produce a minimizer (non-convergence, infeasible or
/// empty family, invalid reference). Carries the iteration trace.
struct SolverError : Error {
  SolverError(const std::string& what, std::vector<TraceEntry> trace_)
      : Error(what), trace(std::move(trace_)) {}
  std::vector<TraceEntry> trace;
};

/// Solver converged but the Pythagorean certificate rejected the result.
struct CertificateError : Error {
  CertificateError(const std::string& what, ProjectionResult result_,
                   double residual_)
      : Error(what), result(std::move(result_)), residual(residual_) {}
  ProjectionResult result;
  double residual;
};

struct CertificateReport {
  double max_residual;   // max over samples of D(P||P*)+D(P*||Q)-D(P||Q)
  double min_residual;
  int samples;
  int skipped_infinite;  // samples with D(P||P*) = inf, reported apart
};

/// Forward D_alpha-projection of Q on an alpha-linear family.
///
/// Damped Newton on the natural parameters, with an active-set treatment
/// of clipped coordinates for alpha < 1 and a projected-gradient convex
/// fallback when Newton stalls. Success requires the constraint residual
/// below opts.tolerance and a passing Pythagorean certificate.
ProjectionResult forward_project(const FiniteDistribution& q,
                                 const LinearFamilySpec& fam,
                                 const SolverOptions& opts = {});

/// Samples family members and evaluates the Pythagorean identity
/// D(P||Q) = D(P||P*) + D(P*||Q) against them. The residual max must stay
/// below 1e-7 (inequality direction); for alpha > 1 the equality form also
/// bounds it from below.
CertificateReport pythagorean_certificate(const ProjectionResult& result,
                                          const FiniteDistribution& q,
                                          const LinearFamilySpec& fam,
                                          int n_test_points,
                                          std::uint64_t seed);

struct IterationStep {
  int step;
  int family_index;
  double step_divergence;  // D_alpha(P_n || P_{n-1})
  double stage_residual_norm;
};

struct IterativeResult {
  ProjectionResult result;  // certified against the concatenated family
  std::vector<IterationStep> steps;
  bool converged = true;
};

/// Cyclic iterative projections on an intersection of alpha-linear
/// families sharing alphabet and alpha (alpha > 1 required). Stops when
/// D_alpha(P_n||P_{n-1}) < tol for m consecutive steps.
IterativeResult iterative_project(const FiniteDistribution& q,
                                  const std::vector<LinearFamilySpec>& fams,
                                  double tol = 1e-12, int max_cycles = 1000,
                                  const SolverOptions& opts = {});

struct ReverseResult {
  ProjectionResult projection;
  std::vector<double> eta;  // over the orthonormal directions
  LinearFamilySpec shifted_family;
  bool in_closure_only = false;
  /// The forward-reverse duality needs Supp(P*) = Supp(shifted family) =
  /// alphabet when alpha < 1; false means the returned minimizer is the
  /// projection on the shifted family but not certified as the reverse
  /// projection. Always true for alpha > 1.
  bool hypothesis_ok = true;
};

/// Reverse D_alpha-projection of P_hat on an alpha-exponential family,
/// computed as a forward projection on the eta-shifted alpha-linear
/// family f_i - eta_i Q^(1-alpha).
ReverseResult reverse_project(const FiniteDistribution& p_hat,
                              const ExpFamilySpec& fam,
                              const SolverOptions& opts = {});

struct TsallisResult {
  ProjectionResult projection;
  double tsallis_entropy;
};

/// Tsallis maximum-entropy distribution: maximizes S_alpha subject to the
/// escort-mean constraint sum P^(alpha)(a) energies[a] = target, solved as
/// the forward projection of the uniform measure on the single-constraint
/// family f(a) = energies[a] - target.
TsallisResult tsallis_maxent(const std::vector<double>& energies,
                             double target, const AlphaOrder& alpha,
                             const SolverOptions& opts = {});

}  // namespace alphaproj
