#include "coopeig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopeig/lintri.hpp"

namespace coopeig {

namespace {

constexpr double kAffineTol = 1e-6;
constexpr double kBoundTol = 1e-6;
constexpr double kHypothesisTol = 1e-10;
constexpr double kDivergenceTol = 1e-8;

SystemSpec with_grid_coupling(const SystemSpec& base, const MatrixField& L) {
  SystemSpec out = base;
  out.coupling.clear();
  const int nt = base.cell.nt, nx = base.cell.nx;
  for (int i = 0; i < base.N; ++i)
    for (int j = 0; j < base.N; ++j) {
      std::vector<double> vals(static_cast<size_t>(nt) * nx);
      for (int jt = 0; jt < nt; ++jt)
        for (int k = 0; k < nx; ++k) vals[static_cast<size_t>(jt) * nx + k] = L.at(jt, k, i, j);
      out.coupling.push_back(CoefficientDescriptor::grid(nt, nx, std::move(vals)));
    }
  return out;
}

double lambda_prime_of(const SystemSpec& spec, const EigenOptions& opts) {
  return lambda_prime_extended(spec, opts);
}

/// Chord defect of the middle point of a parameter triple; nonnegative for
/// concave data.
double chord_defect(double s0, double l0, double s1, double l1, double s2, double l2) {
  const double w = (s1 - s0) / (s2 - s0);
  return l1 - ((1.0 - w) * l0 + w * l2);
}

void attach_concavity_verdicts(ScanTable& table) {
  double min_defect = std::numeric_limits<double>::infinity();
  double max_abs_defect = 0.0;
  for (size_t r = 0; r + 2 < table.rows.size(); ++r) {
    const auto& a = table.rows[r];
    const auto& b = table.rows[r + 1];
    const auto& c = table.rows[r + 2];
    const double defect = chord_defect(a.param, a.lambda, b.param, b.lambda, c.param, c.lambda);
    min_defect = std::min(min_defect, defect);
    max_abs_defect = std::max(max_abs_defect, std::abs(defect));
    table.rows[r + 1].verdict = defect >= -kAffineTol ? "concave_ok" : "concavity_violation";
  }
  if (table.rows.size() >= 3) {
    if (max_abs_defect <= kAffineTol)
      table.summary = "affine";
    else if (min_defect >= -kAffineTol)
      table.summary = "strictly_concave";
    else
      table.summary = "concavity_violation";
  } else {
    table.summary = "too_few_points";
  }
}

SystemSpec frozen_time_spec(const SystemSpec& spec, int time_node) {
  SystemSpec out = spec;
  const int nt = spec.cell.nt, nx = spec.cell.nx;
  auto freeze = [&](const CoefficientDescriptor& d) {
    ScalarFieldSamples s = sample(d, spec.cell);
    std::vector<double> vals(static_cast<size_t>(nt) * nx);
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < nx; ++k) vals[static_cast<size_t>(j) * nx + k] = s.at(time_node, k);
    return CoefficientDescriptor::grid(nt, nx, std::move(vals));
  };
  for (auto& d : out.diffusion) d = freeze(d);
  for (auto& d : out.advection) d = freeze(d);
  for (auto& d : out.coupling) d = freeze(d);
  return out;
}

SystemSpec time_averaged_spec(const SystemSpec& spec) {
  SystemSpec out = spec;
  const int nt = spec.cell.nt, nx = spec.cell.nx;
  auto average = [&](const CoefficientDescriptor& d) {
    ScalarFieldSamples s = sample(d, spec.cell);
    std::vector<double> vals(static_cast<size_t>(nt) * nx);
    for (int k = 0; k < nx; ++k) {
      double m = 0.0;
      for (int j = 0; j < nt; ++j) m += s.at(j, k);
      m /= nt;
      for (int j = 0; j < nt; ++j) vals[static_cast<size_t>(j) * nx + k] = m;
    }
    return CoefficientDescriptor::grid(nt, nx, std::move(vals));
  };
  for (auto& d : out.diffusion) d = average(d);
  for (auto& d : out.advection) d = average(d);
  for (auto& d : out.coupling) d = average(d);
  return out;
}

bool max_sample_deviation_from_x_mean(const SystemSpec& spec, double tol) {
  auto xdep = [&](const CoefficientDescriptor& d) {
    ScalarFieldSamples s = sample(d, spec.cell);
    return !s.space_independent(tol);
  };
  for (const auto& d : spec.diffusion)
    if (xdep(d)) return false;
  for (const auto& d : spec.advection)
    if (xdep(d)) return false;
  for (const auto& d : spec.coupling)
    if (xdep(d)) return false;
  return true;
}

}  // namespace

CoefficientDescriptor scale_descriptor(const CoefficientDescriptor& desc, double factor,
                                       const PeriodicCell& cell) {
  CoefficientDescriptor d = desc;
  switch (d.kind) {
    case CoefficientDescriptor::Kind::constant:
      d.constant_value *= factor;
      break;
    case CoefficientDescriptor::Kind::fourier:
      for (auto& t : d.terms) t.amplitude *= factor;
      break;
    case CoefficientDescriptor::Kind::grid:
      for (auto& v : d.grid_values) v *= factor;
      break;
    case CoefficientDescriptor::Kind::piecewise: {
      // keep the sampled footprint identical to scaling the samples
      ScalarFieldSamples s = sample(desc, cell);
      for (auto& v : s.values) v *= factor;
      d = CoefficientDescriptor::grid(s.nt, s.nx, std::move(s.values));
      break;
    }
  }
  return d;
}

SystemSpec scale_coefficients(const SystemSpec& spec, double diffusion_factor,
                              double advection_factor, double coupling_factor) {
  SystemSpec out = spec;
  for (auto& d : out.diffusion) d = scale_descriptor(d, diffusion_factor, spec.cell);
  for (auto& d : out.advection) d = scale_descriptor(d, advection_factor, spec.cell);
  for (auto& d : out.coupling) d = scale_descriptor(d, coupling_factor, spec.cell);
  return out;
}

SystemSpec mollify_piecewise_coupling(const SystemSpec& spec) {
  SystemSpec out = spec;
  const int nt = spec.cell.nt, nx = spec.cell.nx;
  for (auto& d : out.coupling) {
    if (d.kind != CoefficientDescriptor::Kind::piecewise) continue;
    ScalarFieldSamples s = sample(d, spec.cell);
    std::vector<double> sm(static_cast<size_t>(nt) * nx);
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < nx; ++k) {
        const int kp = (k + 1) % nx, km = (k - 1 + nx) % nx;
        sm[static_cast<size_t>(j) * nx + k] = 0.25 * s.at(j, km) + 0.5 * s.at(j, k) + 0.25 * s.at(j, kp);
      }
    d = CoefficientDescriptor::grid(nt, nx, std::move(sm));
  }
  return out;
}

SystemSpec ode_spec_from_coupling(const MatrixField& coupling, double period_T) {
  if (coupling.nx != 1) fail(ErrorCode::shape_mismatch, "ODE coupling field must have nx = 1");
  SystemSpec s;
  s.N = coupling.N;
  s.cell = {period_T, 1.0, std::max(coupling.nt, 4), 1};
  for (int i = 0; i < s.N; ++i) {
    s.diffusion.push_back(CoefficientDescriptor::constant(1.0));
    s.advection.push_back(CoefficientDescriptor::constant(0.0));
  }
  for (int i = 0; i < s.N; ++i)
    for (int j = 0; j < s.N; ++j) {
      std::vector<double> vals(s.cell.nt);
      for (int jt = 0; jt < s.cell.nt; ++jt)
        vals[jt] = coupling.at(jt % coupling.nt, 0, i, j);
      s.coupling.push_back(CoefficientDescriptor::grid(s.cell.nt, 1, std::move(vals)));
    }
  return s;
}

ScanTable concavity_in_L(const SystemSpec& spec0, const SystemSpec& spec1,
                         const std::vector<double>& s_grid, const ScanOptions& opts) {
  spec0.check_shapes();
  spec1.check_shapes();
  if (spec0.N != spec1.N || spec0.cell.nt != spec1.cell.nt || spec0.cell.nx != spec1.cell.nx ||
      spec0.cell.period_T != spec1.cell.period_T || spec0.cell.period_L != spec1.cell.period_L)
    fail(ErrorCode::shape_mismatch, "interpolation endpoints must share the cell");

  MatrixField L0 = spec0.sample_coupling();
  MatrixField L1 = spec1.sample_coupling();

  ScanTable table;
  table.parameter = "s";
  std::vector<double> grid = s_grid;
  std::sort(grid.begin(), grid.end());

  for (double s : grid) {
    MatrixField Ls = MatrixField::zeros(spec0.N, spec0.cell.nt, spec0.cell.nx);
    for (int jt = 0; jt < spec0.cell.nt; ++jt)
      for (int k = 0; k < spec0.cell.nx; ++k)
        for (int i = 0; i < spec0.N; ++i)
          for (int j = 0; j < spec0.N; ++j) {
            const double v0 = L0.at(jt, k, i, j), v1 = L1.at(jt, k, i, j);
            double v;
            if (i == j) {
              v = (1.0 - s) * v0 + s * v1;
            } else if (v0 <= 0.0 || v1 <= 0.0) {
              v = 0.0;  // log-convex path is identically zero here
            } else {
              v = std::pow(v0, 1.0 - s) * std::pow(v1, s);
            }
            Ls.at(jt, k, i, j) = v;
          }
    SystemSpec spec_s = with_grid_coupling(spec0, Ls);
    ScanRow row;
    row.param = s;
    row.lambda = lambda_prime_of(spec_s, opts.eigen);
    row.verdict = "endpoint";
    table.rows.push_back(row);
  }
  attach_concavity_verdicts(table);
  return table;
}

ScanTable diffusion_scan(const SystemSpec& spec_in, const std::vector<double>& d_values,
                         const ScanOptions& opts) {
  SystemSpec spec = opts.smooth_piecewise ? mollify_piecewise_coupling(spec_in) : spec_in;

  // Space-averaged operator is x-independent: at z = 0 its eigenvalue is the
  // periodic ODE eigenvalue of the space-averaged coupling.
  MatrixField L = spec.sample_coupling();
  AveragedMatrices avg = averaged_matrices(L);
  SystemSpec limit_spec = ode_spec_from_coupling(avg.space_mean, spec.cell.period_T);
  const double predicted = lambda_prime_of(limit_spec, opts.eigen);

  ScanTable table;
  table.parameter = "d";
  table.predicted_limit = predicted;
  std::vector<double> ds = d_values;
  std::sort(ds.begin(), ds.end());
  for (double d : ds) {
    ScanRow row;
    row.param = d;
    row.lambda = lambda_prime_of(scale_coefficients(spec, d, 1.0, 1.0), opts.eigen);
    row.predicted = predicted;
    row.abs_err = std::abs(row.lambda - predicted);
    row.verdict = "abs_err=" + format_double(row.abs_err);
    table.rows.push_back(row);
  }
  table.summary = "limit=" + format_double(predicted);
  return table;
}

ScanTable vanishing_scan(const SystemSpec& spec_in, const std::vector<double>& eps_values,
                         const ScanOptions& opts) {
  SystemSpec spec = opts.smooth_piecewise ? mollify_piecewise_coupling(spec_in) : spec_in;

  // Frozen-x periodic ODE eigenvalues, minimized over the grid nodes.
  MatrixField L = spec.sample_coupling();
  double predicted = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.cell.nx; ++k) {
    MatrixField Lk = MatrixField::zeros(spec.N, spec.cell.nt, 1);
    for (int jt = 0; jt < spec.cell.nt; ++jt)
      for (int i = 0; i < spec.N; ++i)
        for (int j = 0; j < spec.N; ++j) Lk.at(jt, 0, i, j) = L.at(jt, k, i, j);
    predicted = std::min(predicted,
                         lambda_prime_of(ode_spec_from_coupling(Lk, spec.cell.period_T), opts.eigen));
  }

  ScanTable table;
  table.parameter = "eps";
  table.predicted_limit = predicted;
  std::vector<double> es = eps_values;
  std::sort(es.begin(), es.end(), std::greater<double>());
  for (double eps : es) {
    ScanRow row;
    row.param = eps;
    row.lambda = lambda_prime_of(scale_coefficients(spec, eps * eps, eps, 1.0), opts.eigen);
    row.predicted = predicted;
    row.abs_err = std::abs(row.lambda - predicted);
    row.verdict = "abs_err=" + format_double(row.abs_err);
    table.rows.push_back(row);
  }
  std::reverse(table.rows.begin(), table.rows.end());  // rows sorted by param ascending
  table.summary = "limit=" + format_double(predicted);
  return table;
}

ScanTable frequency_scan(const SystemSpec& spec_in, const std::vector<double>& omega_values,
                         FrequencyDirection direction, const ScanOptions& opts) {
  SystemSpec spec = opts.smooth_piecewise ? mollify_piecewise_coupling(spec_in) : spec_in;

  double predicted = 0.0;
  if (direction == FrequencyDirection::to_infinity) {
    predicted = lambda_prime_of(time_averaged_spec(spec), opts.eigen);
  } else {
    // Trapezoid (= uniform periodic) average of frozen-t elliptic eigenvalues;
    // each frozen spec is time-independent, so the power iteration acts as a
    // long-horizon evolution of the elliptic semigroup.
    double acc = 0.0;
    for (int j = 0; j < spec.cell.nt; ++j)
      acc += lambda_prime_of(frozen_time_spec(spec, j), opts.eigen);
    predicted = acc / spec.cell.nt;
  }

  ScanTable table;
  table.parameter = "omega";
  table.predicted_limit = predicted;
  std::vector<double> ws = omega_values;
  std::sort(ws.begin(), ws.end());
  for (double w : ws) {
    if (!(w > 0)) fail(ErrorCode::schema_error, "time frequencies must be positive");
    // omega d/dt - E - L has the eigenvalues of omega * (d/dt - (E + L)/omega)
    SystemSpec scaled = scale_coefficients(spec, 1.0 / w, 1.0 / w, 1.0 / w);
    EigenOptions eo = opts.eigen;
    if (w < 1.0) {
      const double boost = std::min(std::ceil(1.0 / w), 32.0);
      eo.substeps = static_cast<int>(eo.substeps * boost);
    }
    ScanRow row;
    row.param = w;
    row.lambda = w * lambda_prime_of(scaled, eo);
    row.predicted = predicted;
    row.abs_err = std::abs(row.lambda - predicted);
    row.verdict = "abs_err=" + format_double(row.abs_err);
    table.rows.push_back(row);
  }
  table.summary = "limit=" + format_double(predicted);
  return table;
}

std::vector<BoundVerdict> bounds_report(const SystemSpec& spec, double z, const EigenOptions& opts) {
  spec.check_shapes();
  const int N = spec.N;
  const PeriodicCell& cell = spec.cell;
  const double h = cell.dx();

  MatrixField L = spec.sample_coupling();
  AveragedMatrices avg = averaged_matrices(L);
  std::vector<ScalarFieldSamples> a, q;
  for (int i = 0; i < N; ++i) {
    a.push_back(spec.sample_diffusion(i));
    q.push_back(spec.sample_advection(i));
  }

  const double lambda = principal_eigenpair(spec, z, opts).lambda;

  // shared hypothesis: d/dx (q_i - 2 a_i z) = 0 on the samples
  bool divergence_free = true;
  if (cell.nx > 1)
    for (int i = 0; i < N && divergence_free; ++i)
      for (int jt = 0; jt < cell.nt && divergence_free; ++jt)
        for (int k = 0; k < cell.nx; ++k) {
          const int kp = (k + 1) % cell.nx, km = (k - 1 + cell.nx) % cell.nx;
          const double vp = q[i].at(jt, kp) - 2.0 * a[i].at(jt, kp) * z;
          const double vm = q[i].at(jt, km) - 2.0 * a[i].at(jt, km) * z;
          if (std::abs((vp - vm) / (2.0 * h)) > kDivergenceTol) {
            divergence_free = false;
            break;
          }
        }

  bool line_sum_symmetric = true;
  for (int jt = 0; jt < cell.nt && line_sum_symmetric; ++jt)
    for (int k = 0; k < cell.nx; ++k) {
      SquareMatrix M(N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) M.at(i, j) = L.at(jt, k, i, j);
      if (!structure_flags(M).line_sum_symmetric) {
        line_sum_symmetric = false;
        break;
      }
    }

  // time means of the space means of a and q
  std::vector<double> a_mean(N, 0.0), q_mean(N, 0.0);
  for (int i = 0; i < N; ++i) {
    a_mean[i] = a[i].mean();
    q_mean[i] = q[i].mean();
  }

  std::vector<BoundVerdict> out;

  {  // line-sum-symmetric bound
    BoundVerdict v;
    v.name = "line_sum_symmetric";
    v.lambda = lambda;
    v.hypothesis_met = line_sum_symmetric && divergence_free;
    if (!line_sum_symmetric) v.hypothesis_note = "coupling is not line-sum-symmetric at all samples";
    else if (!divergence_free) v.hypothesis_note = "q - 2az is not divergence-free";
    if (v.hypothesis_met) {
      double sum = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) sum += avg.spacetime_mean.at(i, j);
      double tilt = 0.0;
      for (int i = 0; i < N; ++i) tilt += a_mean[i] * z * z - q_mean[i] * z;
      v.bound = -(sum + tilt) / N;
      v.satisfied = lambda <= v.bound + kBoundTol;
      v.equality = std::abs(lambda - v.bound) <= kBoundTol;
    }
    out.push_back(v);
  }

  {  // arithmetic/geometric space means (sharp matrix)
    BoundVerdict v;
    v.name = "geo_space_means";
    v.lambda = lambda;
    v.hypothesis_met = divergence_free;
    if (!divergence_free) v.hypothesis_note = "q - 2az is not divergence-free";
    if (v.hypothesis_met) {
      // d/dt - L#(t) - diag(z <a_i>(t) z - <q_i>(t) z)
      MatrixField K = avg.geo_space;  // nt x 1
      for (int jt = 0; jt < cell.nt; ++jt)
        for (int i = 0; i < N; ++i) {
          double am = 0.0, qm = 0.0;
          for (int k = 0; k < cell.nx; ++k) {
            am += a[i].at(jt, k);
            qm += q[i].at(jt, k);
          }
          am /= cell.nx;
          qm /= cell.nx;
          K.at(jt, 0, i, i) += am * z * z - qm * z;
        }
      v.bound = lambda_prime_extended(ode_spec_from_coupling(K, cell.period_T), opts);
      v.satisfied = lambda <= v.bound + kBoundTol;
      v.equality = std::abs(lambda - v.bound) <= kBoundTol;
    }
    out.push_back(v);
  }

  {  // arithmetic/geometric time means (flat matrix), x-independent operators
    BoundVerdict v;
    v.name = "geo_time_means";
    v.lambda = lambda;
    const bool x_indep = max_sample_deviation_from_x_mean(spec, kHypothesisTol);
    v.hypothesis_met = x_indep;
    if (!x_indep) v.hypothesis_note = "coefficients depend on x";
    if (v.hypothesis_met) {
      SquareMatrix flat = avg.geo_time;
      for (int i = 0; i < N; ++i) flat.at(i, i) += a_mean[i] * z * z - q_mean[i] * z;
      v.bound = -perron(flat).value;
      v.satisfied = lambda <= v.bound + kBoundTol;
      v.equality = std::abs(lambda - v.bound) <= kBoundTol;
    }
    out.push_back(v);
  }

  return out;
}

double variational_rayleigh(const SystemSpec& spec) {
  spec.check_shapes();
  const int N = spec.N, nx = spec.cell.nx, nt = spec.cell.nt;
  const double h = spec.cell.dx();

  std::vector<ScalarFieldSamples> a, q;
  for (int i = 0; i < N; ++i) {
    a.push_back(spec.sample_diffusion(i));
    q.push_back(spec.sample_advection(i));
  }
  MatrixField L = spec.sample_coupling();

  for (int i = 0; i < N; ++i) {
    if (!a[i].time_independent(0.0))
      fail(ErrorCode::not_self_adjoint, "diffusion depends on time");
    if (q[i].min() != 0.0 || q[i].max() != 0.0)
      fail(ErrorCode::not_self_adjoint, "advection present");
  }
  for (int jt = 0; jt < nt; ++jt)
    for (int k = 0; k < nx; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          if (jt > 0 && std::abs(L.at(jt, k, i, j) - L.at(0, k, i, j)) > 0)
            fail(ErrorCode::not_self_adjoint, "coupling depends on time");
          if (std::abs(L.at(jt, k, i, j) - L.at(jt, k, j, i)) > kHypothesisTol)
            fail(ErrorCode::not_self_adjoint, "coupling is not symmetric");
        }

  // H = -diag(d/dx(a d/dx)) - L(x) on node-major N x nx unknowns.
  BlockTridiagonal H;
  const bool spatial = nx > 1;
  H.lower.assign(static_cast<size_t>(nx) * N, 0.0);
  H.upper.assign(static_cast<size_t>(nx) * N, 0.0);
  H.diag.assign(static_cast<size_t>(nx) * N * N, 0.0);
  double gersh_low = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nx; ++k) {
    for (int i = 0; i < N; ++i) {
      const size_t e = static_cast<size_t>(k) * N + i;
      double up = 0.0, dn = 0.0, dd = 0.0;
      if (spatial) {
        const int kp = (k + 1) % nx, km = (k - 1 + nx) % nx;
        const double ap = 0.5 * (a[i].at(0, k) + a[i].at(0, kp));
        const double amh = 0.5 * (a[i].at(0, km) + a[i].at(0, k));
        up = -ap / (h * h);
        dn = -amh / (h * h);
        dd = (ap + amh) / (h * h);
      }
      H.lower[e] = dn;
      H.upper[e] = up;
      double radius = std::abs(up) + std::abs(dn);
      for (int j = 0; j < N; ++j) {
        H.diag[e * N + j] = (i == j ? dd : 0.0) - L.at(0, k, i, j);
        if (j != i) radius += std::abs(L.at(0, k, i, j));
      }
      gersh_low = std::min(gersh_low, H.diag[e * N + i] - radius);
    }
  }

  const double sigma = gersh_low - 1.0;
  BlockTridiagonal Hs = H;
  for (int k = 0; k < nx; ++k)
    for (int i = 0; i < N; ++i) Hs.diag[(static_cast<size_t>(k) * N + i) * N + i] -= sigma;
  BlockTridiagonalSolver solver;
  solver.factor(Hs, nx, N, /*periodic=*/spatial);

  auto apply_H = [&](const std::vector<double>& x) {
    std::vector<double> y(x.size(), 0.0);
    for (int k = 0; k < nx; ++k)
      for (int i = 0; i < N; ++i) {
        const size_t e = static_cast<size_t>(k) * N + i;
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += H.diag[e * N + j] * x[static_cast<size_t>(k) * N + j];
        if (spatial) {
          const int kp = (k + 1) % nx, km = (k - 1 + nx) % nx;
          s += H.upper[e] * x[static_cast<size_t>(kp) * N + i];
          s += H.lower[e] * x[static_cast<size_t>(km) * N + i];
        }
        y[e] = s;
      }
    return y;
  };

  std::vector<double> u(static_cast<size_t>(nx) * N, 1.0);
  double value = 0.0;
  int stable = 0;
  for (long it = 0; it < 100000; ++it) {
    solver.solve(u.data());
    double norm = 0.0;
    for (double v : u) norm = std::max(norm, std::abs(v));
    for (double& v : u) v /= norm;
    std::vector<double> Hu = apply_H(u);
    double num = 0.0, den = 0.0;
    for (size_t e2 = 0; e2 < u.size(); ++e2) {
      num += Hu[e2] * u[e2];
      den += u[e2] * u[e2];
    }
    const double estimate = num / den;
    stable = std::abs(estimate - value) <= 1e-13 * std::max(1.0, std::abs(estimate)) ? stable + 1 : 0;
    value = estimate;
    if (stable >= 10) return value;
  }
  fail(ErrorCode::no_convergence, "inverse power iteration did not settle");
}

SystemSpec self_adjoint_transform(const SystemSpec& spec) {
  spec.check_shapes();
  const int N = spec.N, nx = spec.cell.nx, nt = spec.cell.nt;
  const double h = spec.cell.dx();

  std::vector<ScalarFieldSamples> a, q;
  for (int i = 0; i < N; ++i) {
    a.push_back(spec.sample_diffusion(i));
    q.push_back(spec.sample_advection(i));
  }
  for (int i = 0; i < N; ++i)
    if (!a[i].time_independent(0.0) || !q[i].time_independent(0.0))
      fail(ErrorCode::hypothesis_not_met, "transform needs time-independent a and q");

  // The common gradient dQ/dx = q_i / a_i, identical across species with zero
  // x-mean.
  std::vector<double> grad(nx);
  for (int k = 0; k < nx; ++k) grad[k] = q[0].at(0, k) / a[0].at(0, k);
  for (int i = 1; i < N; ++i)
    for (int k = 0; k < nx; ++k)
      if (std::abs(q[i].at(0, k) / a[i].at(0, k) - grad[k]) > kDivergenceTol)
        fail(ErrorCode::hypothesis_not_met, "q_i / a_i differs across species");
  double mean = 0.0;
  for (double g : grad) mean += g;
  mean /= nx;
  if (std::abs(mean) > kDivergenceTol)
    fail(ErrorCode::hypothesis_not_met, "q/a must have zero x-mean");

  // L_Q = L + (1/4) diag(2 dq_i/dx - q_i^2 / a_i)
  SystemSpec out = spec;
  MatrixField L = spec.sample_coupling();
  MatrixField LQ = L;
  for (int jt = 0; jt < nt; ++jt)
    for (int k = 0; k < nx; ++k) {
      const int kp = (k + 1) % nx, km = (k - 1 + nx) % nx;
      for (int i = 0; i < N; ++i) {
        const double dq = nx > 1 ? (q[i].at(0, kp) - q[i].at(0, km)) / (2.0 * h) : 0.0;
        LQ.at(jt, k, i, i) += 0.25 * (2.0 * dq - q[i].at(0, k) * q[i].at(0, k) / a[i].at(0, k));
      }
    }
  out = with_grid_coupling(out, LQ);
  for (auto& d : out.advection) d = CoefficientDescriptor::constant(0.0);
  return out;
}

SystemSpec symmetrize_coupling(const SystemSpec& spec) {
  MatrixField L = spec.sample_coupling();
  MatrixField S = L;
  for (int jt = 0; jt < L.nt; ++jt)
    for (int k = 0; k < L.nx; ++k)
      for (int i = 0; i < L.N; ++i)
        for (int j = 0; j < L.N; ++j)
          S.at(jt, k, i, j) = 0.5 * (L.at(jt, k, i, j) + L.at(jt, k, j, i));
  return with_grid_coupling(spec, S);
}

}  // namespace coopeig
