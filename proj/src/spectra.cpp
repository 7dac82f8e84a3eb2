#include "coopeig/spectra.hpp"
#include <limits>

#include <algorithm>
#include <cmath>
#include <map>

namespace coopeig {

namespace {

struct PowerOutcome {
  double rho = 0.0;
  StateVector vec;
  double residual = 0.0;
  long iterations = 0;
};

/// Power iteration on a positive one-period map. Convergence needs the
/// Rayleigh-quotient drift below opts.drift_tol over opts.drift_run
/// consecutive iterations and the eigen residual below opts.residual_tol;
/// the residual comes free from the pre-normalization iterate.
PowerOutcome power_iterate(const MonodromyContext& ctx, bool adjoint, const EigenOptions& opts) {
  const int N = ctx.species(), K = ctx.nodes();
  StateVector u = opts.warm_start && opts.warm_start->N == N && opts.warm_start->nx == K
                      ? *opts.warm_start
                      : StateVector::ones(N, K);
  double m0 = u.max_abs();
  if (m0 <= 0.0) u = StateVector::ones(N, K);
  else
    for (double& v : u.values) v /= m0;

  PowerOutcome out;
  double rho = 0.0;
  int stable = 0;
  double checkpoint_res = std::numeric_limits<double>::infinity();
  for (long it = 0; it < opts.max_iterations; ++it) {
    StateVector w = adjoint ? ctx.apply_adjoint(u) : ctx.apply(u);
    double num = 0.0, den = 0.0;
    for (size_t e = 0; e < w.values.size(); ++e) {
      num += w.values[e] * u.values[e];
      den += u.values[e] * u.values[e];
    }
    const double estimate = num / den;
    // residual of the normalized map: ||G u - rho u|| / (|rho| ||u||)
    double res = 0.0;
    for (size_t e = 0; e < w.values.size(); ++e)
      res = std::max(res, std::abs(w.values[e] - estimate * u.values[e]));
    res /= std::max(std::abs(estimate), 1e-300) * u.max_abs();

    const double norm = w.max_abs();
    if (!(norm > 0.0)) fail(ErrorCode::no_convergence, "monodromy annihilated the iterate");
    for (double& v : w.values) v /= norm;
    stable = std::abs(estimate - rho) <= opts.drift_tol * std::max(1.0, std::abs(estimate))
                 ? stable + 1
                 : 0;
    rho = estimate;
    u = std::move(w);
    if (stable >= opts.drift_run && res <= opts.residual_tol) {
      out.rho = rho;
      out.vec = std::move(u);
      out.residual = res;
      out.iterations = it + 1;
      return out;
    }
    // stalled residual with settled drift signals a genuinely degenerate pair
    if ((it & 511) == 511) {
      if (stable >= opts.drift_run && res > opts.residual_tol && res > 0.95 * checkpoint_res) break;
      checkpoint_res = res;
    }
  }
  fail(ErrorCode::no_convergence,
       "power iteration did not reach the drift and residual targets (near-degenerate dominant pair)");
}

/// Floquet relation on the shift-normalized map G~ = e^{-cT} G_c: the
/// multiplier is rho~ = e^{-cT} rho, so lambda = c - (1/T) ln rho becomes
/// -(1/T) ln rho~. For a time-independent context the scalar substep map
/// rho_c = (e^{c dt}(1 - dt alpha))^{-M} is inverted exactly instead, which
/// removes the dt error entirely.
double lambda_from_multiplier(const MonodromyContext& ctx, double rho_scaled) {
  if (ctx.time_independent()) {
    const double alpha =
        (1.0 - std::exp(-ctx.shift() * ctx.dt() - std::log(rho_scaled) / ctx.substeps())) /
        ctx.dt();
    return ctx.shift() - alpha;
  }
  return -std::log(rho_scaled) / ctx.period();
}

EigenResult finish(const MonodromyContext& ctx, const PowerOutcome& po, double z) {
  EigenResult r;
  r.lambda = lambda_from_multiplier(ctx, po.rho);
  r.z = z;
  r.eigenfunction = po.vec;
  r.residual = po.residual;
  r.iterations = po.iterations;
  r.multiplier = po.rho;
  r.substeps_used = ctx.substeps();
  r.exact_in_time = ctx.time_independent();
  return r;
}

EigenResult eigenpair_impl(const SystemSpec& spec, double z, bool adjoint,
                           const EigenOptions& opts) {
  ValidationReport report = validate_system(spec);
  if (!report.irreducible)
    fail(ErrorCode::reducible_spec,
         "spec is reducible; use reducible_extension for per-block eigenvalues");

  AssembleOptions aopts;
  aopts.substeps = opts.substeps;
  MonodromyContext ctx = MonodromyContext::assemble(spec, z, aopts);
  PowerOutcome base = power_iterate(ctx, adjoint, opts);
  EigenResult result = finish(ctx, base, z);

  if (opts.extrapolate && !ctx.time_independent()) {
    AssembleOptions afine = aopts;
    afine.substeps = ctx.substeps() * 2;
    MonodromyContext fine = MonodromyContext::assemble(spec, z, afine);
    EigenOptions fopts = opts;
    fopts.warm_start = &base.vec;
    PowerOutcome fo = power_iterate(fine, adjoint, fopts);
    EigenResult fine_result = finish(fine, fo, z);
    const double extrapolated = 2.0 * fine_result.lambda - result.lambda;
    result = fine_result;
    result.lambda = extrapolated;
    result.extrapolated = true;
    result.iterations += base.iterations;
  }

  if (result.residual > opts.residual_tol)
    fail(ErrorCode::no_convergence, "monodromy eigenpair residual above tolerance");
  return result;
}

}  // namespace

EigenResult principal_eigenpair(const SystemSpec& spec, double z, const EigenOptions& opts) {
  return eigenpair_impl(spec, z, /*adjoint=*/false, opts);
}

EigenResult adjoint_eigenpair(const SystemSpec& spec, double z, const EigenOptions& opts) {
  return eigenpair_impl(spec, z, /*adjoint=*/true, opts);
}

EigenResult lambda_prime(const SystemSpec& spec, const EigenOptions& opts) {
  return principal_eigenpair(spec, 0.0, opts);
}

ZMaximum maximize_concave(const std::function<double(double)>& value, const ZSearchOptions& opts) {
  std::map<double, double> cache;
  int evaluations = 0;
  auto f = [&](double zv) {
    auto it = cache.find(zv);
    if (it != cache.end()) return it->second;
    ++evaluations;
    double v = value(zv);
    cache.emplace(zv, v);
    return v;
  };

  // Bracket by doubling from 0 until both ends decrease.
  double a = 0.0, b = 0.0, c = 0.0;
  const double f0 = f(0.0);
  double step = opts.initial_step;
  double fr = f(step), fl = f(-step);
  if (fr <= f0 && fl <= f0) {
    a = -step;
    b = 0.0;
    c = step;
  } else {
    const int dir = fr > f0 ? +1 : -1;
    double prev = 0.0, cur = dir * step, fprev = f0, fcur = dir > 0 ? fr : fl;
    double next = cur * 2.0;
    while (true) {
      if (std::abs(next) > opts.z_limit)
        fail(ErrorCode::bracket_failure,
             "no decrease of the z-family found within |z| <= 64; coefficients violate the "
             "quadratic decay bound");
      const double fnext = f(next);
      if (fnext <= fcur) {
        a = std::min(prev, next);
        b = cur;
        c = std::max(prev, next);
        break;
      }
      prev = cur;
      fprev = fcur;
      cur = next;
      fcur = fnext;
      next = cur * 2.0;
      (void)fprev;
    }
  }

  // Golden-section maximization on [a, c].
  constexpr double invphi = 0.6180339887498949;
  double x1 = c - invphi * (c - a);
  double x2 = a + invphi * (c - a);
  double f1 = f(x1), f2 = f(x2);
  while (c - a > opts.z_tol) {
    if (f1 >= f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - invphi * (c - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (c - a);
      f2 = f(x2);
    }
  }
  (void)b;

  ZMaximum out;
  out.bracket = {a, c};
  out.z_star = f1 >= f2 ? x1 : x2;
  out.lambda_1 = std::max(f1, f2);
  out.evaluations = evaluations;
  return out;
}

ZMaximum lambda_one(const SystemSpec& spec, const ZSearchOptions& opts) {
  ValidationReport report = validate_system(spec);
  if (!report.irreducible)
    fail(ErrorCode::reducible_spec, "spec is reducible; use reducible_extension");

  StateVector warm;
  bool have_warm = false;
  auto value = [&](double z) {
    EigenOptions eo = opts.eigen;
    if (have_warm) eo.warm_start = &warm;
    EigenResult r = principal_eigenpair(spec, z, eo);
    warm = r.eigenfunction;
    have_warm = true;
    return r.lambda;
  };
  return maximize_concave(value, opts);
}

EigenResult dirichlet_eigenvalue(const SystemSpec& spec, int radius_periods,
                                 const EigenOptions& opts) {
  ValidationReport report = validate_system(spec);
  if (!report.irreducible)
    fail(ErrorCode::reducible_spec, "spec is reducible; use reducible_extension");

  AssembleOptions aopts;
  aopts.substeps = opts.substeps;
  MonodromyContext ctx = MonodromyContext::assemble_dirichlet(spec, radius_periods, aopts);
  PowerOutcome base = power_iterate(ctx, /*adjoint=*/false, opts);
  EigenResult result = finish(ctx, base, 0.0);

  if (opts.extrapolate && !ctx.time_independent()) {
    AssembleOptions afine = aopts;
    afine.substeps = ctx.substeps() * 2;
    MonodromyContext fine = MonodromyContext::assemble_dirichlet(spec, radius_periods, afine);
    EigenOptions fopts = opts;
    fopts.warm_start = &base.vec;
    PowerOutcome fo = power_iterate(fine, /*adjoint=*/false, fopts);
    EigenResult fine_result = finish(fine, fo, 0.0);
    const double extrapolated = 2.0 * fine_result.lambda - result.lambda;
    result = fine_result;
    result.lambda = extrapolated;
    result.extrapolated = true;
    result.iterations += base.iterations;
  }
  if (result.residual > opts.residual_tol)
    fail(ErrorCode::no_convergence, "Dirichlet eigenpair residual above tolerance");
  return result;
}

ReducibleExtension reducible_extension(const SystemSpec& spec, const ZSearchOptions& opts) {
  validate_system(spec);
  ReducibleExtension out;
  out.blocks = block_decompose(spec);
  const int B = out.blocks.block_count();

  std::vector<SystemSpec> subs;
  for (int b = 0; b < B; ++b) subs.push_back(block_subsystem(spec, out.blocks, b));

  for (int b = 0; b < B; ++b) {
    out.block_lambda_prime.push_back(lambda_prime(subs[b], opts.eigen));
    out.block_maxima.push_back(lambda_one(subs[b], opts));
  }

  out.lambda0 = out.block_maxima[0].lambda_1;
  for (int b = 1; b < B; ++b) out.lambda0 = std::min(out.lambda0, out.block_maxima[b].lambda_1);

  if (B == 1) {
    out.lambda1_tilde = out.block_maxima[0].lambda_1;
    out.z_tilde = out.block_maxima[0].z_star;
    out.evaluations = out.block_maxima[0].evaluations;
    return out;
  }

  std::vector<StateVector> warms(B);
  std::vector<bool> have(B, false);
  auto min_over_blocks = [&](double z) {
    double m = std::numeric_limits<double>::infinity();
    for (int b = 0; b < B; ++b) {
      EigenOptions eo = opts.eigen;
      if (have[b]) eo.warm_start = &warms[b];
      EigenResult r = principal_eigenpair(subs[b], z, eo);
      warms[b] = r.eigenfunction;
      have[b] = true;
      m = std::min(m, r.lambda);
    }
    return m;
  };
  ZMaximum tilde = maximize_concave(min_over_blocks, opts);
  out.lambda1_tilde = tilde.lambda_1;
  out.z_tilde = tilde.z_star;
  out.evaluations = tilde.evaluations;
  return out;
}

double lambda_prime_extended(const SystemSpec& spec, const EigenOptions& opts) {
  BlockStructure blocks = block_decompose(spec);
  if (blocks.block_count() == 1) return lambda_prime(spec, opts).lambda;
  double m = std::numeric_limits<double>::infinity();
  for (int b = 0; b < blocks.block_count(); ++b)
    m = std::min(m, lambda_prime(block_subsystem(spec, blocks, b), opts).lambda);
  return m;
}

}  // namespace coopeig
