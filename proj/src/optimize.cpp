#include "coopeig/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace coopeig {

namespace {

constexpr double kKarlinTol = 1e-8;

SystemSpec spec_with_coupling_field(const SystemSpec& base, const MatrixField& L) {
  SystemSpec out = base;
  out.coupling.clear();
  for (int i = 0; i < base.N; ++i)
    for (int j = 0; j < base.N; ++j) {
      std::vector<double> vals(static_cast<size_t>(L.nt) * L.nx);
      for (int jt = 0; jt < L.nt; ++jt)
        for (int k = 0; k < L.nx; ++k) vals[static_cast<size_t>(jt) * L.nx + k] = L.at(jt, k, i, j);
      out.coupling.push_back(CoefficientDescriptor::grid(L.nt, L.nx, std::move(vals)));
    }
  out.reducible_flag = true;  // permutation choices may disconnect species
  return out;
}

double wrap_into(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0) r += period;
  return r;
}

}  // namespace

ScanTable karlin_scan(const SystemSpec& spec, const MutationDecomposition& dec,
                      const std::vector<double>& s_grid, const ScanOptions& opts) {
  spec.check_shapes();
  MatrixField L = spec.sample_coupling();
  DecompositionCheck check = check_decomposition(dec, L);
  if (!check.valid)
    fail(ErrorCode::invalid_decomposition,
         "decomposition does not reproduce the coupling (deviation " +
             format_double(check.max_deviation) + ")");

  // s*(P - (S - I) diag(mu)) - diag(r) has the eigenvalues of
  // s * (P - (S - I) diag(mu) - (1/s) diag(r)).
  ScanTable table;
  table.parameter = "s";
  std::vector<double> grid = s_grid;
  std::sort(grid.begin(), grid.end());
  for (double s : grid) {
    if (!(s > 0.0) || s > 1.0) fail(ErrorCode::schema_error, "karlin grid must lie in (0, 1]");
    MatrixField Ls = MatrixField::zeros(dec.N, dec.nt, dec.nx);
    for (int j = 0; j < dec.nt; ++j)
      for (int k = 0; k < dec.nx; ++k)
        for (int r = 0; r < dec.N; ++r)
          for (int c = 0; c < dec.N; ++c)
            Ls.at(j, k, r, c) = (r == c ? dec.r_at(j, k, r) / s - dec.mu_at(j, k, c) : 0.0) +
                                dec.S.at(j, k, r, c) * dec.mu_at(j, k, c);
    SystemSpec scaled = spec_with_coupling_field(spec, Ls);
    ScanRow row;
    row.param = s;
    row.lambda = s * lambda_prime_extended(scaled, opts.eigen);
    table.rows.push_back(row);
  }

  double min_diff = std::numeric_limits<double>::infinity();
  for (size_t r = 0; r + 1 < table.rows.size(); ++r) {
    const double diff = table.rows[r + 1].lambda - table.rows[r].lambda;
    min_diff = std::min(min_diff, diff);
    table.rows[r + 1].verdict = diff >= -kKarlinTol ? "nondecreasing_ok" : "monotonicity_violation";
  }
  if (!table.rows.empty()) table.rows[0].verdict = "first";
  table.summary = min_diff >= -kKarlinTol
                      ? "nondecreasing min_diff=" + format_double(min_diff)
                      : "violation min_diff=" + format_double(min_diff);
  return table;
}

double eigen_derivative(const SystemSpec& spec, double z, const MatrixField& dL,
                        const DerivativeOptions& opts) {
  spec.check_shapes();
  if (dL.N != spec.N || dL.nt != spec.cell.nt || dL.nx != spec.cell.nx)
    fail(ErrorCode::shape_mismatch, "perturbation field shape mismatch");

  auto derivative_at = [&](int substeps) {
    EigenOptions eo = opts.eigen;
    eo.substeps = substeps;
    eo.extrapolate = false;

    AssembleOptions ao;
    ao.substeps = substeps;
    MonodromyContext ctx = MonodromyContext::assemble(spec, z, ao);

    EigenResult direct = principal_eigenpair(spec, z, eo);
    EigenResult adj = adjoint_eigenpair(spec, z, eo);
    const StateVector& u0 = direct.eigenfunction;
    const StateVector& w = adj.eigenfunction;

    std::vector<StateVector> us, vs;
    ctx.apply_tracking(u0, us);
    ctx.apply_adjoint_tracking(w, vs);

    const int M = ctx.substeps();
    const double dt = ctx.dt();
    const double rho = direct.multiplier;

    double wu0 = 0.0;
    for (size_t e = 0; e < u0.values.size(); ++e) wu0 += w.values[e] * u0.values[e];

    double sum = 0.0;
    for (int m = 0; m < M; ++m) {
      std::vector<double> dLm = ctx.midpoint_matrix_field(dL, m);
      const StateVector& um = us[m];
      const StateVector& vm = vs[m];
      double acc = 0.0;
      for (int k = 0; k < ctx.nodes(); ++k)
        for (int i = 0; i < ctx.species(); ++i) {
          double row = 0.0;
          for (int j = 0; j < ctx.species(); ++j)
            row += dLm[(static_cast<size_t>(k) * ctx.species() + i) * ctx.species() + j] * um.at(j, k);
          acc += vm.at(i, k) * row;
        }
      // each differentiated substep factor contributes dt e^{c dt} F~ dL F~
      sum += dt * acc;
    }
    sum *= std::exp(ctx.shift() * dt);

    const double drho = sum / wu0;  // derivative of the scaled multiplier
    if (ctx.time_independent()) {
      // lambda = c - (1 - rho_c^{-1/M})/dt with rho_c = e^{cT} rho~
      const double rho_c_pow = std::exp(-(std::log(rho) + ctx.shift() * ctx.period()) / M);
      return -(rho_c_pow / ctx.period()) * (drho / rho);
    }
    return -(1.0 / ctx.period()) * (drho / rho);
  };

  double d0 = derivative_at(opts.eigen.substeps);
  if (!opts.extrapolate) return d0;
  double d1 = derivative_at(opts.eigen.substeps * 2);
  return 2.0 * d1 - d0;
}

std::vector<SquareMatrix> permutation_matrices(int N) {
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<SquareMatrix> out;
  do {
    SquareMatrix P(N);
    for (int i = 0; i < N; ++i) P.at(idx[i], i) = 1.0;  // column i feeds row idx[i]
    out.push_back(std::move(P));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

SystemSpec mutation_spec(const MutationTemplate& tmpl, const std::vector<PartitionCell>& partition,
                         const std::vector<SquareMatrix>& S_per_cell) {
  const SystemSpec& base = tmpl.base;
  const int N = base.N, nt = base.cell.nt, nx = base.cell.nx;
  if (partition.size() != S_per_cell.size())
    fail(ErrorCode::shape_mismatch, "one mutation matrix per partition cell required");

  std::vector<ScalarFieldSamples> r, mu;
  for (int i = 0; i < N; ++i) {
    r.push_back(sample(tmpl.r[i], base.cell));
    mu.push_back(sample(tmpl.mu[i], base.cell));
  }

  MatrixField L = MatrixField::zeros(N, nt, nx);
  for (int jt = 0; jt < nt; ++jt)
    for (int k = 0; k < nx; ++k) {
      const double t = wrap_into(jt * base.cell.dt_node(), base.cell.period_T);
      const double x = wrap_into(k * base.cell.dx(), base.cell.period_L);
      int cell_index = -1;
      for (size_t ci = 0; ci < partition.size(); ++ci)
        if (t >= partition[ci].t_lo && t < partition[ci].t_hi && x >= partition[ci].x_lo &&
            x < partition[ci].x_hi)
          cell_index = static_cast<int>(ci);
      if (cell_index < 0)
        fail(ErrorCode::schema_error, "partition does not cover the periodicity cell");
      const SquareMatrix& S = S_per_cell[cell_index];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          L.at(jt, k, i, j) = (i == j ? r[i].at(jt, k) - mu[j].at(jt, k) : 0.0) +
                              S.at(i, j) * mu[j].at(jt, k);
    }
  return spec_with_coupling_field(base, L);
}

MutationOptimum optimize_mutation(const MutationTemplate& tmpl,
                                  const std::vector<PartitionCell>& partition,
                                  const MutationSearchOptions& opts) {
  const int N = tmpl.base.N;
  const size_t P = partition.size();
  if (P == 0) fail(ErrorCode::schema_error, "empty partition");

  std::vector<SquareMatrix> perms = permutation_matrices(N);
  const size_t nperm = perms.size();

  double total = 1.0;
  for (size_t p = 0; p < P; ++p) total *= static_cast<double>(nperm);

  auto objective = [&](const std::vector<SquareMatrix>& assignment) {
    SystemSpec s = mutation_spec(tmpl, partition, assignment);
    return lambda_prime_extended(s, opts.eigen);
  };
  const bool minimizing = opts.objective == MutationObjective::minimize;
  auto better = [&](double a, double b) { return minimizing ? a < b : a > b; };

  MutationOptimum out;

  if (!opts.local_search && total > static_cast<double>(opts.enumeration_limit))
    fail(ErrorCode::enumeration_too_large,
         "permutation assignments exceed the enumeration limit; use local-search mode");

  std::vector<int> assignment(P, 0);
  std::vector<SquareMatrix> chosen(P, perms[0]);

  if (!opts.local_search) {
    std::vector<int> best_assignment(P, 0);
    double best = minimizing ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    while (true) {
      for (size_t p = 0; p < P; ++p) chosen[p] = perms[assignment[p]];
      const double value = objective(chosen);
      out.all_values.push_back(value);
      if (better(value, best)) {
        best = value;
        best_assignment = assignment;
      }
      size_t p = 0;
      for (; p < P; ++p) {
        if (++assignment[p] < static_cast<int>(nperm)) break;
        assignment[p] = 0;
      }
      if (p == P) break;
    }
    out.permutation_index = best_assignment;
    out.objective_value = best;
  } else {
    // single-cell permutation swaps until no improving move; heuristic only
    std::vector<int> current(P, 0);
    for (size_t p = 0; p < P; ++p) chosen[p] = perms[current[p]];
    double value = objective(chosen);
    bool improved = true;
    while (improved) {
      improved = false;
      for (size_t p = 0; p < P; ++p)
        for (size_t q = 0; q < nperm; ++q) {
          if (static_cast<int>(q) == current[p]) continue;
          std::vector<SquareMatrix> trial = chosen;
          trial[p] = perms[q];
          const double tv = objective(trial);
          if (better(tv, value)) {
            value = tv;
            current[p] = static_cast<int>(q);
            chosen = std::move(trial);
            improved = true;
          }
        }
    }
    out.permutation_index = current;
    out.objective_value = value;
    out.heuristic = true;
  }

  out.field.partition = partition;
  out.field.S.clear();
  for (size_t p = 0; p < P; ++p) out.field.S.push_back(perms[out.permutation_index[p]]);

  // Certificate: seeded random interior Birkhoff fields must not beat the
  // permutation optimum beyond 1e-6.
  std::mt19937_64 rng(opts.seed);
  std::exponential_distribution<double> expo(1.0);
  for (int c = 0; c < opts.certificate_samples; ++c) {
    std::vector<SquareMatrix> sample_field;
    for (size_t p = 0; p < P; ++p) {
      std::vector<double> weights(nperm);
      double sum = 0.0;
      for (auto& wgt : weights) {
        wgt = expo(rng) + 1e-6;
        sum += wgt;
      }
      SquareMatrix S(N);
      for (size_t q = 0; q < nperm; ++q)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) S.at(i, j) += (weights[q] / sum) * perms[q].at(i, j);
      sample_field.push_back(std::move(S));
    }
    CertificateSample cs;
    cs.seed_index = static_cast<std::uint64_t>(c);
    cs.lambda = objective(sample_field);
    cs.beats_optimum = minimizing ? cs.lambda < out.objective_value - 1e-6
                                  : cs.lambda > out.objective_value + 1e-6;
    out.certificate.push_back(cs);
  }
  return out;
}

std::vector<double> periodic_rearrangement(std::vector<double> samples) {
  const int n = static_cast<int>(samples.size());
  std::sort(samples.begin(), samples.end(), std::greater<double>());
  std::vector<double> out(n, 0.0);
  const int mid = n / 2;
  int next = 0;
  out[mid] = samples[next++];
  for (int d = 1; next < n; ++d) {
    if (mid - d >= 0 && next < n) out[mid - d] = samples[next++];
    if (mid + d < n && next < n) out[mid + d] = samples[next++];
  }
  return out;
}

RearrangedField rearrange(const SystemSpec& spec, const EigenOptions& opts) {
  spec.check_shapes();
  for (int i = 0; i < spec.N; ++i) {
    ScalarFieldSamples a = spec.sample_diffusion(i);
    if (std::abs(a.max() - a.min()) > 0)
      fail(ErrorCode::hypothesis_not_met, "rearrangement needs constant diffusion per species");
    ScalarFieldSamples q = spec.sample_advection(i);
    if (q.min() != 0.0 || q.max() != 0.0)
      fail(ErrorCode::hypothesis_not_met, "rearrangement needs zero advection");
  }

  RearrangedField out;
  out.original = spec.sample_coupling();
  out.rearranged = out.original;
  const int nx = spec.cell.nx;
  for (int i = 0; i < spec.N; ++i)
    for (int j = 0; j < spec.N; ++j)
      for (int jt = 0; jt < spec.cell.nt; ++jt) {
        std::vector<double> row(nx);
        for (int k = 0; k < nx; ++k) row[k] = out.original.at(jt, k, i, j);
        std::vector<double> re = periodic_rearrangement(std::move(row));
        for (int k = 0; k < nx; ++k) out.rearranged.at(jt, k, i, j) = re[k];
      }

  SystemSpec rearr = spec_with_coupling_field(spec, out.rearranged);
  rearr.reducible_flag = spec.reducible_flag;
  out.lambda_original = lambda_prime(spec, opts).lambda;
  out.lambda_rearranged = lambda_prime(rearr, opts).lambda;
  return out;
}

}  // namespace coopeig
