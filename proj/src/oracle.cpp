#include "alphaproj/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "alphaproj/divergences.hpp"
#include "alphaproj/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace alphaproj {
namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  std::vector<double> coeff;
  std::vector<double> v;
  std::vector<double> probs;
  std::vector<std::size_t> pinned;
  std::vector<std::vector<double>> face_basis;  // theta-space rows
};

// Local-refinement parameters for a sampling phase: draws perturb the
// center coefficients instead of sampling the whole cone.
struct PhaseParams {
  const std::vector<double>* center = nullptr;
  double sigma = 0.0;
  std::vector<std::size_t> center_pins;  // zero pattern of the center
};

// Draws generator coefficients for attempt `index`, forms
// v = sum_j coeff_j g_j, rejects sign violations and rescales to a
// probability vector via P = v^(1/alpha) / sum v^(1/alpha). Probability-
// vector output lands in ws.probs.
//
// A quarter of the draws are confined to faces of the cone (one or two
// coordinates pinned to zero): minimizers routinely sit on the boundary,
// where plain interior sampling approaches only at the square-root rate.
bool draw_member(const LinearFamilySpec& fam, std::uint64_t seed,
                 std::uint64_t index, Workspace& ws,
                 const PhaseParams* phase = nullptr) {
  const auto& gens = fam.generator_basis();
  const std::size_t gdim = gens.size();
  const std::size_t n = fam.dim();
  ws.coeff.resize(gdim);
  ws.v.assign(n, 0.0);
  ws.probs.resize(n);
  Rng rng(Rng::derive(seed, index));

  std::size_t pins = 0;
  ws.pinned.clear();
  if (phase == nullptr) {
    const double mode = rng.uniform();
    if (mode < 0.15 && gdim >= 2) pins = 1;
    else if (mode < 0.25 && gdim >= 3) pins = 2;
    for (std::size_t k = 0; k < pins; ++k) {
      std::size_t a;
      do {
        a = static_cast<std::size_t>(rng.uniform_int(n));
      } while (std::find(ws.pinned.begin(), ws.pinned.end(), a) !=
               ws.pinned.end());
      ws.pinned.push_back(a);
    }
    for (std::size_t j = 0; j < gdim; ++j) ws.coeff[j] = rng.gaussian();
  } else {
    // Refinement draw around the phase center; half the draws keep the
    // center's zero pattern so boundary optima refine along their face.
    const bool keep_face = rng.uniform() < 0.5;
    for (std::size_t j = 0; j < gdim; ++j) {
      ws.coeff[j] = (*phase->center)[j] + phase->sigma * rng.gaussian();
    }
    if (keep_face) {
      ws.pinned = phase->center_pins;
      pins = ws.pinned.size();
    }
  }
  if (!ws.pinned.empty()) {
    // Project the coefficients onto {theta : v(a) = 0 for pinned a}; the
    // constraint rows in theta-space are c_a(j) = g_j(a).
    ws.face_basis.clear();
    for (const std::size_t a : ws.pinned) {
      std::vector<double> c(gdim);
      for (std::size_t j = 0; j < gdim; ++j) c[j] = gens[j][a];
      for (const auto& u : ws.face_basis) {
        double d = 0.0;
        for (std::size_t j = 0; j < gdim; ++j) d += c[j] * u[j];
        for (std::size_t j = 0; j < gdim; ++j) c[j] -= d * u[j];
      }
      double norm = 0.0;
      for (double x : c) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-13) continue;  // coordinate already forced to zero
      for (double& x : c) x /= norm;
      ws.face_basis.push_back(std::move(c));
    }
    for (const auto& u : ws.face_basis) {
      double d = 0.0;
      for (std::size_t j = 0; j < gdim; ++j) d += ws.coeff[j] * u[j];
      for (std::size_t j = 0; j < gdim; ++j) ws.coeff[j] -= d * u[j];
    }
  }

  double scale = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t j = 0; j < gdim; ++j) {
      s += ws.coeff[j] * gens[j][a];
    }
    ws.v[a] = s;
    scale = std::max(scale, std::fabs(s));
  }
  for (const std::size_t a : ws.pinned) ws.v[a] = 0.0;
  if (scale <= 0.0) return false;
  double total = 0.0;
  const double inv_alpha = 1.0 / fam.alpha().value();
  const bool square = inv_alpha == 2.0;
  const bool root = inv_alpha == 0.5;
  for (std::size_t a = 0; a < n; ++a) {
    double va = ws.v[a];
    if (std::fabs(va) < 1e-12 * scale) {
      va = 0.0;  // dust on coordinates the span pins to zero
    } else if (va < 0.0) {
      return false;
    }
    ws.probs[a] = va > 0.0
                      ? (square ? va * va
                                : (root ? std::sqrt(va)
                                        : std::pow(va, inv_alpha)))
                      : 0.0;
    total += ws.probs[a];
  }
  if (total <= 0.0) return false;
  for (std::size_t a = 0; a < n; ++a) ws.probs[a] /= total;
  return true;
}

}  // namespace

std::vector<FiniteDistribution> sample_family_members(
    const LinearFamilySpec& fam, std::size_t n, std::uint64_t seed,
    std::size_t max_attempts_per_member) {
  std::vector<FiniteDistribution> members;
  members.reserve(n);
  Workspace ws;
  const std::uint64_t budget =
      static_cast<std::uint64_t>(n) * max_attempts_per_member;
  for (std::uint64_t attempt = 0; attempt < budget && members.size() < n;
       ++attempt) {
    if (draw_member(fam, seed, attempt, ws)) {
      members.emplace_back(fam.alphabet(), ws.probs, true);
    }
  }
  if (members.empty()) {
    throw EvaluationError(
        "sample_family_members: no member found within the attempt budget "
        "(family empty or outside the sampler's reach)");
  }
  return members;
}

std::vector<bool> estimate_family_support(const LinearFamilySpec& fam,
                                          std::size_t n, std::uint64_t seed) {
  std::vector<bool> mask(fam.dim(), false);
  const auto members = sample_family_members(fam, n, seed);
  for (const auto& m : members) {
    for (std::size_t a = 0; a < m.size(); ++a) {
      if (m[a] > 1e-12) mask[a] = true;
    }
  }
  return mask;
}

namespace {

struct PhaseOutcome {
  bool found = false;
  double best_value = kInf;
  std::uint64_t best_index = 0;
  std::uint64_t used = 0;
};

PhaseOutcome run_sampling_phase(const FiniteDistribution& q,
                                const LinearFamilySpec& fam,
                                std::uint64_t seed, std::uint64_t begin,
                                std::uint64_t end, const PhaseParams* params,
                                bool parallel) {
  const AlphaOrder alpha = fam.alpha();
  const std::span<const double> qp = q.probs();
  PhaseOutcome out;
  if (!parallel) {
    Workspace ws;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (!draw_member(fam, seed, i, ws, params)) continue;
      ++out.used;
      const double d = detail::renyi_div(ws.probs, qp, alpha);
      if (!out.found || d < out.best_value ||
          (d == out.best_value && i < out.best_index)) {
        out.best_value = d;
        out.best_index = i;
        out.found = true;
      }
    }
    return out;
  }
#ifdef _OPENMP
#pragma omp parallel
  {
    Workspace ws;
    PhaseOutcome local;
#pragma omp for schedule(static)
    for (std::int64_t i = static_cast<std::int64_t>(begin);
         i < static_cast<std::int64_t>(end); ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      if (!draw_member(fam, seed, idx, ws, params)) continue;
      ++local.used;
      const double d = detail::renyi_div(ws.probs, qp, alpha);
      if (!local.found || d < local.best_value ||
          (d == local.best_value && idx < local.best_index)) {
        local.best_value = d;
        local.best_index = idx;
        local.found = true;
      }
    }
#pragma omp critical
    {
      out.used += local.used;
      // Lexicographic (value, index) merge keeps the reduction
      // schedule-independent, hence bit-identical to the serial path.
      if (local.found &&
          (!out.found || local.best_value < out.best_value ||
           (local.best_value == out.best_value &&
            local.best_index < out.best_index))) {
        out.best_value = local.best_value;
        out.best_index = local.best_index;
        out.found = true;
      }
    }
  }
#endif
  return out;
}

}  // namespace

OracleReport brute_force_forward(const FiniteDistribution& q,
                                 const LinearFamilySpec& fam,
                                 std::uint64_t n_samples, std::uint64_t seed,
                                 Exec exec) {
  if (q.alphabet() != fam.alphabet()) {
    throw ValidationError("brute_force_forward: alphabet mismatch");
  }
#ifdef _OPENMP
  const bool parallel = exec == Exec::parallel;
#else
  const bool parallel = false;
  (void)exec;
#endif

  // Half the budget scans the whole cone; the rest refines around the
  // running best at two shrinking scales. Thin cones accept only a small
  // fraction of global draws, so pure global sampling resolves poorly.
  const bool tiny = n_samples < 16;
  const std::uint64_t n1 = tiny ? n_samples : n_samples / 2;
  const std::uint64_t n2 = tiny ? n_samples : n1 + n_samples / 4;
  const double sigmas[2] = {0.05, 0.002};

  PhaseOutcome global = run_sampling_phase(q, fam, seed, 0, n1, nullptr,
                                           parallel);
  std::uint64_t used = global.used;
  double best_value = global.best_value;
  bool found = global.found;
  int best_phase = 0;
  std::uint64_t best_index = global.best_index;

  PhaseParams phase_params[2];
  std::vector<double> centers[2];
  if (found && n_samples > n1) {
    Workspace ws;
    for (int phase = 0; phase < 2; ++phase) {
      const std::uint64_t begin = phase == 0 ? n1 : n2;
      const std::uint64_t end = phase == 0 ? n2 : n_samples;
      if (begin >= end) break;
      // rebuild the incumbent's coefficients as the refinement center
      const PhaseParams* prev =
          best_phase == 0 ? nullptr : &phase_params[best_phase - 1];
      draw_member(fam, seed, best_index, ws, prev);
      centers[phase] = ws.coeff;
      double cnorm = 0.0;
      for (double x : centers[phase]) cnorm += x * x;
      cnorm = std::sqrt(cnorm);
      phase_params[phase].center = &centers[phase];
      phase_params[phase].sigma = sigmas[phase] * (cnorm > 0 ? cnorm : 1.0);
      phase_params[phase].center_pins.clear();
      double vscale = 0.0;
      for (double x : ws.v) vscale = std::max(vscale, std::fabs(x));
      for (std::size_t a = 0; a < ws.v.size(); ++a) {
        if (std::fabs(ws.v[a]) <= 1e-12 * vscale) {
          phase_params[phase].center_pins.push_back(a);
        }
      }
      const PhaseOutcome refined = run_sampling_phase(
          q, fam, seed, begin, end, &phase_params[phase], parallel);
      used += refined.used;
      if (refined.found && refined.best_value < best_value) {
        best_value = refined.best_value;
        best_index = refined.best_index;
        best_phase = phase + 1;
      }
    }
  }

  if (used == 0) {
    throw EvaluationError("brute_force_forward: sampler found no member");
  }
  Workspace ws;
  const PhaseParams* winner =
      best_phase == 0 ? nullptr : &phase_params[best_phase - 1];
  draw_member(fam, seed, best_index, ws, winner);
  return OracleReport{FiniteDistribution(fam.alphabet(), ws.probs, true),
                      best_value, used, 0.0};
}

OracleReport brute_force_reverse(const FiniteDistribution& p_hat,
                                 const ExpFamilySpec& fam,
                                 std::size_t grid_per_dim, double radius,
                                 Exec exec) {
  if (p_hat.alphabet() != fam.alphabet()) {
    throw ValidationError("brute_force_reverse: alphabet mismatch");
  }
  const std::size_t dim = fam.directions().size();
  if (dim == 0 || dim > 2) {
    throw ValidationError(
        "brute_force_reverse: grid oracle supports one or two directions");
  }
  if (grid_per_dim == 0) {
    throw ValidationError("brute_force_reverse: empty grid");
  }
  const std::size_t total =
      dim == 1 ? grid_per_dim : grid_per_dim * grid_per_dim;
  const double a = fam.alpha().value();
  const std::span<const double> qp = fam.reference().probs();
  const std::span<const double> pp = p_hat.probs();
  const std::size_t n = fam.dim();
  const AlphaOrder alpha = fam.alpha();

  const auto theta_at = [&](std::size_t flat, std::vector<double>& theta) {
    theta.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t k = d == 0 ? flat % grid_per_dim : flat / grid_per_dim;
      theta[d] = grid_per_dim == 1
                     ? 0.0
                     : -radius + 2.0 * radius * double(k) /
                                     double(grid_per_dim - 1);
    }
  };

  const auto evaluate = [&](std::size_t flat, std::vector<double>& theta,
                            std::vector<double>& masses,
                            std::vector<double>& probs) -> double {
    theta_at(flat, theta);
    double z = 0.0;
    if (!detail::member_masses(qp, a, fam.directions(), theta, masses, z)) {
      return kInf;  // out of the natural domain
    }
    if (a < 1.0) {
      // The grid ranges over the exponential family proper: every bracket
      // positive. Clipped parameters describe boundary measures the
      // orthogonality theory does not reach.
      for (std::size_t i = 0; i < n; ++i) {
        if (masses[i] <= 0.0) return kInf;
      }
    }
    for (std::size_t i = 0; i < n; ++i) probs[i] = masses[i] / z;
    return detail::renyi_div(pp, probs, alpha);
  };

  double best_value = kInf;
  std::size_t best_index = 0;
  bool found = false;

#ifdef _OPENMP
  const bool parallel = exec == Exec::parallel && total > 64;
#else
  const bool parallel = false;
  (void)exec;
#endif

  if (!parallel) {
    std::vector<double> theta, masses(n), probs(n);
    for (std::size_t i = 0; i < total; ++i) {
      const double d = evaluate(i, theta, masses, probs);
      if (std::isinf(d)) continue;
      if (!found || d < best_value || (d == best_value && i < best_index)) {
        best_value = d;
        best_index = i;
        found = true;
      }
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel
    {
      std::vector<double> theta, masses(n), probs(n);
      double local_best = kInf;
      std::size_t local_index = 0;
      bool local_found = false;
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i) {
        const double d =
            evaluate(static_cast<std::size_t>(i), theta, masses, probs);
        if (std::isinf(d)) continue;
        const auto idx = static_cast<std::size_t>(i);
        if (!local_found || d < local_best ||
            (d == local_best && idx < local_index)) {
          local_best = d;
          local_index = idx;
          local_found = true;
        }
      }
#pragma omp critical
      {
        if (local_found &&
            (!found || local_best < best_value ||
             (local_best == best_value && local_index < best_index))) {
          best_value = local_best;
          best_index = local_index;
          found = true;
        }
      }
    }
#endif
  }

  if (!found) {
    throw EvaluationError(
        "brute_force_reverse: every grid point is outside the natural domain");
  }
  std::vector<double> theta, masses(n), probs(n);
  evaluate(best_index, theta, masses, probs);
  return OracleReport{FiniteDistribution(fam.alphabet(), probs, true),
                      best_value, total, 0.0};
}

}  // namespace oracle
}  // namespace alphaproj
