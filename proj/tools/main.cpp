// Command-line front end: divergence evaluation, forward/iterative/reverse
// projections, Tsallis max-ent, and randomized property verification.
//
// Exit codes: 0 success, 1 runtime/solver failure, 2 usage or validation
// error, 3 solver converged but the certificate failed. Results go to
// stdout as JSON; human-readable traces go to stderr.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alphaproj/divergences.hpp"
#include "alphaproj/instances.hpp"
#include "alphaproj/io.hpp"
#include "alphaproj/mixtures.hpp"
#include "alphaproj/oracle.hpp"
#include "alphaproj/projection.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;
using namespace alphaproj;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCertificate = 3;

double parse_alpha(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse alpha value '" + text + "'");
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ALPHA_PROJ_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("ALPHA_PROJ_SEED is not an unsigned integer");
    }
  }
  return 0x5eedULL;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open output path " + out_path);
    out << j.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------- //
// divergence                                                             //
// ---------------------------------------------------------------------- //

struct DivergenceArgs {
  std::string kind;
  std::string alpha_text;
  std::string p_path, q_path, out_path;
};

int run_divergence(const DivergenceArgs& args) {
  const bool needs_alpha = args.kind == "renyi" || args.kind == "hellinger" ||
                           args.kind == "relative-alpha" ||
                           args.kind == "tsallis-entropy";
  const bool needs_q = args.kind != "tsallis-entropy";
  if (needs_alpha && args.alpha_text.empty()) {
    throw ValidationError("--alpha is required for kind " + args.kind);
  }
  if (needs_q && args.q_path.empty()) {
    throw ValidationError("--q is required for kind " + args.kind);
  }
  const FiniteDistribution p = load_distribution(args.p_path);
  std::optional<AlphaOrder> alpha;
  if (needs_alpha) alpha.emplace(parse_alpha(args.alpha_text));

  double value = 0.0;
  if (args.kind == "renyi") {
    value = renyi_divergence(p, load_distribution(args.q_path), *alpha);
  } else if (args.kind == "hellinger") {
    value = hellinger_divergence(p, load_distribution(args.q_path), *alpha);
  } else if (args.kind == "kl") {
    value = relative_entropy(p, load_distribution(args.q_path));
  } else if (args.kind == "tv") {
    value = total_variation(p, load_distribution(args.q_path));
  } else if (args.kind == "relative-alpha") {
    value = relative_alpha_entropy(p, load_distribution(args.q_path), *alpha);
  } else if (args.kind == "tsallis-entropy") {
    value = tsallis_entropy(p, *alpha);
  } else {
    throw ValidationError("unknown divergence kind '" + args.kind + "'");
  }

  json j{{"kind", args.kind},
         {"alpha", alpha ? json(alpha->value()) : json(nullptr)},
         {"value_nats", number_or_inf(value)}};
  emit(j, args.out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------- //
// project                                                                //
// ---------------------------------------------------------------------- //

struct ProjectArgs {
  std::string mode;
  std::string alpha_text;
  std::string q_path, family_path, p_hat_path, out_path;
  std::vector<std::string> family_paths;
  std::vector<double> energies;
  double target = 0.0;
  double tolerance = 1e-10;
  int max_iterations = 200;
  double iterate_tol = 1e-12;
  int max_cycles = 1000;
  bool trace = false;
};

void check_family_alpha(double cli_alpha, double family_alpha) {
  if (cli_alpha != family_alpha) {
    throw ValidationError("--alpha " + std::to_string(cli_alpha) +
                          " does not match the family file's alpha " +
                          std::to_string(family_alpha));
  }
}

int run_project(const ProjectArgs& args) {
  const AlphaOrder alpha(parse_alpha(args.alpha_text));
  alpha.require_finite_positive("project");
  SolverOptions opts;
  opts.tolerance = args.tolerance;
  opts.max_iterations = args.max_iterations;

  if (args.mode == "forward") {
    const FiniteDistribution q = load_distribution(args.q_path);
    const LinearFamilySpec fam = load_linear_family(args.family_path);
    check_family_alpha(alpha.value(), fam.alpha().value());
    const ProjectionResult result = forward_project(q, fam, opts);
    emit(projection_result_to_json(result, args.trace), args.out_path);
    return kExitOk;
  }

  if (args.mode == "iterate") {
    if (args.family_paths.size() < 2) {
      throw ValidationError("project iterate needs at least two --families");
    }
    const FiniteDistribution q = load_distribution(args.q_path);
    std::vector<LinearFamilySpec> fams;
    for (const auto& path : args.family_paths) {
      fams.push_back(load_linear_family(path));
      check_family_alpha(alpha.value(), fams.back().alpha().value());
    }
    const IterativeResult it =
        iterative_project(q, fams, args.iterate_tol, args.max_cycles, opts);
    for (const auto& s : it.steps) {
      std::cerr << "step " << s.step << " family " << s.family_index
                << " D_step " << s.step_divergence << "\n";
    }
    if (!it.converged) {
      std::cerr << "did not converge within " << args.max_cycles
                << " cycles\n";
      return kExitRuntime;
    }
    emit(projection_result_to_json(it.result, args.trace), args.out_path);
    return kExitOk;
  }

  if (args.mode == "reverse") {
    const FiniteDistribution p_hat = load_distribution(args.p_hat_path);
    const ExpFamilySpec fam = load_exp_family(args.family_path);
    check_family_alpha(alpha.value(), fam.alpha().value());
    const ReverseResult rev = reverse_project(p_hat, fam, opts);
    json j = projection_result_to_json(rev.projection, args.trace);
    j["flags"]["in_closure_only"] = rev.in_closure_only;
    j["eta"] = rev.eta;
    j["hypothesis_ok"] = rev.hypothesis_ok;
    j["shifted_family"] = linear_family_to_json(rev.shifted_family);
    emit(j, args.out_path);
    return kExitOk;
  }

  if (args.mode == "tsallis") {
    if (args.energies.size() < 2) {
      throw ValidationError("project tsallis needs --energies e1,e2,...");
    }
    const TsallisResult ts =
        tsallis_maxent(args.energies, args.target, alpha, opts);
    json j = projection_result_to_json(ts.projection, args.trace);
    j["tsallis_entropy"] = ts.tsallis_entropy;
    emit(j, args.out_path);
    return kExitOk;
  }

  throw ValidationError("unknown project mode '" + args.mode + "'");
}

// ---------------------------------------------------------------------- //
// verify                                                                 //
// ---------------------------------------------------------------------- //

struct VerifyArgs {
  std::string property;
  int instances = 0;
  std::uint64_t seed = 0;
  std::uint64_t oracle_samples = 1000000;
  std::string out_path;
};

struct InstanceOutcome {
  bool pass = true;
  double residual = 0.0;  // property-specific figure of merit
  std::string note;
};

constexpr double kAlphaPool[] = {0.3, 0.5, 2.0, 3.0};

InstanceOutcome verify_apollonius(Rng& rng) {
  const std::size_t n = 2 + rng.uniform_int(5);
  const AlphaOrder alpha(kAlphaPool[rng.uniform_int(4)]);
  const double lambda = rng.uniform();
  const auto p0 = instances::random_distribution(rng, n, 1e-3);
  const auto p1 = instances::random_distribution(rng, n, 1e-3);
  const auto q = instances::random_distribution(rng, n, 1e-3);
  const auto res = apollonius_residual(p0, p1, q, alpha, lambda);
  if (!res) return {false, 0.0, "not evaluable"};
  InstanceOutcome out;
  out.residual = std::fabs(*res);
  if (out.residual > 1e-10) {
    return {false, out.residual, "identity residual above 1e-10"};
  }
  // Lemma inequality direction: the left side vs H(S||Q) flips with the
  // alpha regime.
  const auto mix = alpha_mixture(p0, p1, alpha, lambda);
  const double lhs =
      (1.0 - lambda) * (hellinger_divergence(p0, q, alpha) -
                        hellinger_divergence(p0, mix.mixture, alpha)) +
      lambda * (hellinger_divergence(p1, q, alpha) -
                hellinger_divergence(p1, mix.mixture, alpha));
  const double rhs = hellinger_divergence(mix.mixture, q, alpha);
  const double gap = lhs - rhs;
  const bool sign_ok = alpha.value() > 1.0 ? gap >= -1e-12 : gap <= 1e-12;
  if (!sign_ok) return {false, out.residual, "inequality sign violated"};
  return out;
}

InstanceOutcome verify_pinsker(Rng& rng) {
  const std::size_t n = 2 + rng.uniform_int(5);
  const auto p = instances::random_sparse_distribution(rng, n, 0.15);
  const auto q = instances::random_distribution(rng, n, 1e-4);
  const double tv = total_variation(p, q);
  const double kl = relative_entropy(p, q);
  const double slack = 0.5 * tv * tv - kl;  // must be <= 0
  if (slack > 1e-12) return {false, slack, "Pinsker violated"};
  return {true, slack, ""};
}

InstanceOutcome verify_monotonicity(Rng& rng) {
  const std::size_t n = 2 + rng.uniform_int(5);
  const auto p = instances::random_sparse_distribution(rng, n, 0.2);
  const auto q = instances::random_distribution(rng, n, 1e-4);
  const double grid[] = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 4.0,
                         std::numeric_limits<double>::infinity()};
  double prev = 0.0;
  double worst = 0.0;
  for (double a : grid) {
    const double d = renyi_divergence(p, q, AlphaOrder(a));
    if (std::isinf(prev) && std::isfinite(d)) {
      return {false, 1.0, "decrease from +inf"};
    }
    if (std::isfinite(prev) && std::isfinite(d)) {
      worst = std::max(worst, prev - d);
    }
    prev = std::max(prev, d);
  }
  if (worst > 1e-12) return {false, worst, "monotonicity violated"};
  return {true, worst, ""};
}

InstanceOutcome verify_pythagorean(Rng& rng) {
  const std::size_t n = 3 + rng.uniform_int(4);
  const double pool[] = {0.5, 1.5, 2.0, 3.0};
  const AlphaOrder alpha(pool[rng.uniform_int(4)]);
  const auto fam = instances::random_family_with_member(
      rng, n, alpha, 1 + rng.uniform_int(2));
  const auto q = instances::random_distribution(rng, n, 0.05);
  try {
    const ProjectionResult result = forward_project(q, fam);
    const CertificateReport cert =
        pythagorean_certificate(result, q, fam, 50, rng.next_u64());
    const double worst =
        std::max(cert.max_residual,
                 alpha.value() > 1.0 ? std::fabs(cert.min_residual) : 0.0);
    if (cert.max_residual > 1e-7) {
      return {false, worst, "inequality residual above 1e-7"};
    }
    if (alpha.value() > 1.0 && cert.min_residual < -1e-7) {
      return {false, worst, "equality residual below -1e-7"};
    }
    return {true, worst, ""};
  } catch (const Error& e) {
    return {false, 0.0, e.what()};
  }
}

InstanceOutcome verify_oracle_equivalence(Rng& rng, std::uint64_t samples) {
  const AlphaOrder alpha(rng.uniform() < 0.5 ? 0.5 : 2.0);
  const auto fam = instances::random_family_with_member(rng, 4, alpha, 1);
  const auto q = instances::random_distribution(rng, 4, 0.05);
  try {
    const ProjectionResult result = forward_project(q, fam);
    const auto report =
        oracle::brute_force_forward(q, fam, samples, rng.next_u64());
    const double beat = result.divergence - report.best_value;
    if (beat > 1e-9) {
      return {false, beat, "solver exceeds the oracle's best member"};
    }
    const double gap = report.best_value - result.divergence;
    if (gap > 1e-3) {
      return {false, gap, "oracle best not within 1e-3 of the solver"};
    }
    return {true, std::max(beat, gap), ""};
  } catch (const Error& e) {
    return {false, 0.0, e.what()};
  }
}

int run_verify(const VerifyArgs& args) {
  if (args.instances <= 0) {
    throw ValidationError("verify needs --instances >= 1");
  }
  const bool known =
      args.property == "apollonius" || args.property == "pinsker" ||
      args.property == "monotonicity" || args.property == "pythagorean" ||
      args.property == "oracle-equivalence";
  if (!known) {
    throw ValidationError("unknown verify property '" + args.property + "'");
  }
  const int n = args.instances;
  std::vector<InstanceOutcome> outcomes(n);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    Rng rng(Rng::derive(args.seed, static_cast<std::uint64_t>(i)));
    if (args.property == "apollonius") {
      outcomes[i] = verify_apollonius(rng);
    } else if (args.property == "pinsker") {
      outcomes[i] = verify_pinsker(rng);
    } else if (args.property == "monotonicity") {
      outcomes[i] = verify_monotonicity(rng);
    } else if (args.property == "pythagorean") {
      outcomes[i] = verify_pythagorean(rng);
    } else {
      outcomes[i] = verify_oracle_equivalence(rng, args.oracle_samples);
    }
  }

  int failures = 0;
  double worst = 0.0;
  int first_failure = -1;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::fabs(outcomes[i].residual));
    if (!outcomes[i].pass) {
      ++failures;
      if (first_failure < 0) first_failure = i;
      std::cerr << "instance " << i << " FAILED: " << outcomes[i].note
                << " (residual " << outcomes[i].residual << ")\n";
    }
  }
  if (first_failure >= 0) {
    std::cerr << "replay: --seed " << args.seed << " failing sub-seed "
              << Rng::derive(args.seed, first_failure) << " index "
              << first_failure << "\n";
  }

  json summary{{"property", args.property},
               {"instances", n},
               {"failures", failures},
               {"worst_residual", worst},
               {"seed", args.seed}};
  emit(summary, args.out_path);
  return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi-divergence projections on alpha-convex families"};
  app.require_subcommand(1);

  DivergenceArgs div_args;
  auto* div = app.add_subcommand("divergence", "evaluate a divergence");
  div->add_option("--kind", div_args.kind,
                  "renyi|hellinger|kl|tv|relative-alpha|tsallis-entropy")
      ->required();
  div->add_option("--alpha", div_args.alpha_text, "divergence order");
  div->add_option("--p", div_args.p_path, "first distribution (JSON)")
      ->required();
  div->add_option("--q", div_args.q_path, "second distribution (JSON)");
  div->add_option("--out", div_args.out_path, "output path (default stdout)");

  ProjectArgs proj_args;
  auto* proj = app.add_subcommand("project", "projection solvers");
  proj->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", proj_args.alpha_text)->required();
    sub->add_option("--tolerance", proj_args.tolerance);
    sub->add_option("--max-iterations", proj_args.max_iterations);
    sub->add_flag("--trace", proj_args.trace, "include the iteration trace");
    sub->add_option("--out", proj_args.out_path);
  };
  auto* fwd = proj->add_subcommand("forward", "forward projection");
  add_common(fwd);
  fwd->add_option("--q", proj_args.q_path)->required();
  fwd->add_option("--family", proj_args.family_path)->required();
  auto* itr = proj->add_subcommand("iterate", "cyclic iterative projections");
  add_common(itr);
  itr->add_option("--q", proj_args.q_path)->required();
  itr->add_option("--families", proj_args.family_paths)->required();
  itr->add_option("--tol", proj_args.iterate_tol, "per-step stopping rule");
  itr->add_option("--max-cycles", proj_args.max_cycles);
  auto* rev = proj->add_subcommand("reverse", "reverse projection");
  add_common(rev);
  rev->add_option("--p-hat", proj_args.p_hat_path)->required();
  rev->add_option("--family", proj_args.family_path,
                  "exponential family (JSON)")
      ->required();
  auto* tsl = proj->add_subcommand("tsallis", "Tsallis maximum entropy");
  add_common(tsl);
  tsl->add_option("--energies", proj_args.energies, "state energies")
      ->required()
      ->delimiter(',');
  tsl->add_option("--target", proj_args.target, "target escort-mean energy")
      ->required();

  VerifyArgs ver_args;
  bool seed_given = false;
  auto* ver = app.add_subcommand("verify", "randomized property checks");
  ver->add_option("property", ver_args.property,
                  "pythagorean|apollonius|monotonicity|pinsker|"
                  "oracle-equivalence")
      ->required();
  ver->add_option("--instances", ver_args.instances)->required();
  ver->add_option("--seed", ver_args.seed)->each([&](const std::string&) {
    seed_given = true;
  });
  ver->add_option("--samples", ver_args.oracle_samples,
                  "oracle sample budget (oracle-equivalence)");
  ver->add_option("--out", ver_args.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (div->parsed()) return run_divergence(div_args);
    if (proj->parsed()) {
      proj_args.mode = proj->get_subcommands().front()->get_name();
      return run_project(proj_args);
    }
    if (ver->parsed()) {
      if (!seed_given) ver_args.seed = default_seed();
      return run_verify(ver_args);
    }
  } catch (const CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    std::cout << projection_result_to_json(e.result, false).dump(2) << "\n";
    return kExitCertificate;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    for (const auto& t : e.trace) {
      std::cerr << "  iter " << t.iteration << " residual " << t.residual_norm
                << " divergence " << t.divergence << "\n";
    }
    return kExitRuntime;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
