#include "coopeig/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "coopeig/lintri.hpp"

namespace coopeig {

namespace {

/// One implicit substep: the matrix I - dt*A plus the raw coupling snapshot.
struct SubStep {
  BlockTridiagonal blocks;
  std::vector<double> coupling;  // K*N*N, L at the substep midpoint

  bool same_as(const SubStep& o) const {
    return coupling == o.coupling && blocks.same_as(o.blocks);
  }
};

BlockTridiagonal transpose_blocks(const BlockTridiagonal& b, int K, int N, bool periodic) {
  BlockTridiagonal t;
  t.lower.assign(b.lower.size(), 0.0);
  t.upper.assign(b.upper.size(), 0.0);
  t.diag.resize(b.diag.size());
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        t.diag[(static_cast<size_t>(k) * N + i) * N + j] = b.diag[(static_cast<size_t>(k) * N + j) * N + i];
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < N; ++i) {
      if (periodic || k + 1 < K)
        t.upper[static_cast<size_t>(k) * N + i] = b.lower[static_cast<size_t>((k + 1) % K) * N + i];
      if (periodic || k > 0)
        t.lower[static_cast<size_t>(k) * N + i] = b.upper[static_cast<size_t>((k - 1 + K) % K) * N + i];
    }
  return t;
}

/// Node coefficient data for the grid in use. Spatial neighbors of Dirichlet
/// boundary nodes come from the periodic extension of the coefficients; only
/// the unknowns stop at the boundary.
struct NodeFields {
  int nt = 0, K = 0, N = 0;
  std::vector<double> a, q, gamma;  // nt*K*N node values
  std::vector<double> a_up, a_dn;   // nt*K*N half-point diffusion
  std::vector<double> L;            // nt*K*N*N

  size_t sidx(int j, int k, int i) const { return (static_cast<size_t>(j) * K + k) * N + i; }
};

NodeFields gather_fields(const SystemSpec& spec, int K, bool periodic, double z) {
  NodeFields f;
  f.nt = spec.cell.nt;
  f.K = K;
  f.N = spec.N;
  const int nx = spec.cell.nx;
  const double h = spec.cell.dx();
  const bool spatial = K > 1;

  f.a.resize(static_cast<size_t>(f.nt) * K * f.N);
  f.q.resize(static_cast<size_t>(f.nt) * K * f.N);
  f.gamma.resize(static_cast<size_t>(f.nt) * K * f.N);
  f.a_up.resize(static_cast<size_t>(f.nt) * K * f.N);
  f.a_dn.resize(static_cast<size_t>(f.nt) * K * f.N);
  f.L.resize(static_cast<size_t>(f.nt) * K * f.N * f.N);

  std::vector<ScalarFieldSamples> as, qs;
  for (int i = 0; i < spec.N; ++i) {
    as.push_back(spec.sample_diffusion(i));
    qs.push_back(spec.sample_advection(i));
  }
  MatrixField Ls = spec.sample_coupling();

  auto cell_of = [&](int k) {  // node -> periodic cell column
    const int shifted = periodic ? k : k + 1;
    return ((shifted % nx) + nx) % nx;
  };

  for (int j = 0; j < f.nt; ++j)
    for (int k = 0; k < K; ++k) {
      const int c0 = cell_of(k);
      const int cp = (c0 + 1) % nx;
      const int cm = (c0 - 1 + nx) % nx;
      for (int i = 0; i < spec.N; ++i) {
        const double a0 = as[i].at(j, c0);
        f.a[f.sidx(j, k, i)] = a0;
        f.q[f.sidx(j, k, i)] = qs[i].at(j, c0);
        f.a_up[f.sidx(j, k, i)] = 0.5 * (a0 + as[i].at(j, cp));
        f.a_dn[f.sidx(j, k, i)] = 0.5 * (as[i].at(j, cm) + a0);
        double dax = 0.0;
        if (spatial && z != 0.0) dax = z * (as[i].at(j, cp) - as[i].at(j, cm)) / (2.0 * h);
        f.gamma[f.sidx(j, k, i)] = a0 * z * z + dax - f.q[f.sidx(j, k, i)] * z;
      }
      for (int r = 0; r < spec.N; ++r)
        for (int c = 0; c < spec.N; ++c)
          f.L[f.sidx(j, k, r) * spec.N + c] = Ls.at(j, c0, r, c);
    }
  return f;
}

void interp_time(const std::vector<double>& field, size_t stride, int nt, int M, int m,
                 std::vector<double>& out) {
  const double s = (m + 0.5) * static_cast<double>(nt) / M;
  const double fl = std::floor(s);
  const int j0 = static_cast<int>(fl) % nt;
  const int j1 = (j0 + 1) % nt;
  const double theta = s - fl;
  out.resize(stride);
  for (size_t e = 0; e < stride; ++e) {
    const double v0 = field[static_cast<size_t>(j0) * stride + e];
    const double v1 = field[static_cast<size_t>(j1) * stride + e];
    out[e] = v0 + theta * (v1 - v0);
  }
}

std::vector<double> to_node_major(const StateVector& u, int N, int K) {
  std::vector<double> x(static_cast<size_t>(N) * K);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < K; ++k) x[static_cast<size_t>(k) * N + i] = u.at(i, k);
  return x;
}

StateVector from_node_major(const std::vector<double>& x, int N, int K) {
  StateVector u = StateVector::zeros(N, K);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < K; ++k) u.at(i, k) = x[static_cast<size_t>(k) * N + i];
  return u;
}

}  // namespace

StateVector StateVector::ones(int N, int nx) {
  StateVector s;
  s.N = N;
  s.nx = nx;
  s.values.assign(static_cast<size_t>(N) * nx, 1.0);
  return s;
}

StateVector StateVector::zeros(int N, int nx) {
  StateVector s;
  s.N = N;
  s.nx = nx;
  s.values.assign(static_cast<size_t>(N) * nx, 0.0);
  return s;
}

double StateVector::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double StateVector::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

struct MonodromyContext::Impl {
  std::vector<SubStep> steps;                      // 1 if time-independent, else M
  std::vector<BlockTridiagonalSolver> factors;     // matching steps
  std::vector<BlockTridiagonalSolver> adj_factors; // factors of the transposes

  const SubStep& step(int m) const { return steps[steps.size() == 1 ? 0 : m]; }
  const BlockTridiagonalSolver& factor(int m) const { return factors[factors.size() == 1 ? 0 : m]; }
  const BlockTridiagonalSolver& adj_factor(int m) const {
    return adj_factors[adj_factors.size() == 1 ? 0 : m];
  }
};

MonodromyContext::MonodromyContext() : impl_(new Impl) {}
MonodromyContext::~MonodromyContext() = default;
MonodromyContext::MonodromyContext(MonodromyContext&&) noexcept = default;
MonodromyContext& MonodromyContext::operator=(MonodromyContext&&) noexcept = default;

MonodromyContext MonodromyContext::assemble(const SystemSpec& spec, double z,
                                            const AssembleOptions& opts) {
  validate_system(spec);
  MonodromyContext ctx;
  ctx.dirichlet_ = false;
  ctx.build(spec, z, opts, spec.cell.nx, /*periodic=*/true, /*radius=*/0);
  return ctx;
}

MonodromyContext MonodromyContext::assemble_dirichlet(const SystemSpec& spec, int radius_periods,
                                                      const AssembleOptions& opts) {
  if (radius_periods < 1)
    fail(ErrorCode::schema_error, "Dirichlet half-width must cover at least one period");
  validate_system(spec);
  MonodromyContext ctx;
  ctx.dirichlet_ = true;
  const int K = 2 * radius_periods * spec.cell.nx - 1;
  ctx.build(spec, 0.0, opts, K, /*periodic=*/false, radius_periods);
  return ctx;
}

void MonodromyContext::build(const SystemSpec& spec, double z, const AssembleOptions& opts, int K,
                             bool periodic, int radius) {
  (void)radius;
  const int N = spec.N;
  const int nt = spec.cell.nt;
  const double h = spec.cell.dx();
  const double T = spec.cell.period_T;
  const bool spatial = K > 1;
  if (N > 64) fail(ErrorCode::schema_error, "species count above 64 is unsupported");

  NodeFields f = gather_fields(spec, K, periodic, z);

  // Positivity shift c = 1 + max(sum_j |l_ij| + |gamma_i|) over node samples,
  // making the zero-order block L + diag(gamma) + cI entrywise nonnegative.
  double c = 0.0;
  double max_row_sum = 0.0;
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i) {
        double abs_l = 0.0, row_l = 0.0;
        for (int jj = 0; jj < N; ++jj) {
          const double l = f.L[f.sidx(j, k, i) * N + jj];
          abs_l += std::abs(l);
          row_l += l;
        }
        const double g = f.gamma[f.sidx(j, k, i)];
        c = std::max(c, abs_l + std::abs(g));
        max_row_sum = std::max(max_row_sum, row_l + g);
      }
  c += 1.0;
  if (opts.shift_override) c = *opts.shift_override;
  max_row_sum += c;

  // Substep count: the request, at least one substep per time node, and small
  // enough that I - dt*A stays a strictly diagonally dominant Z-matrix
  // (dt * positive growth bound <= 1/2), so every substep inverse is
  // entrywise nonnegative.
  int M = std::max(opts.substeps, nt);
  if (max_row_sum > 0.0) M = std::max<int>(M, static_cast<int>(std::ceil(2.0 * T * max_row_sum)));
  const double dt = T / M;

  // Mesh Peclet condition h|q - 2az| <= 2a for the off-diagonal signs of the
  // centered stencil; recorded, not enforced.
  bool peclet_ok = true;
  if (spatial)
    for (int j = 0; j < nt && peclet_ok; ++j)
      for (int k = 0; k < K && peclet_ok; ++k)
        for (int i = 0; i < N; ++i) {
          const double qt = f.q[f.sidx(j, k, i)] - 2.0 * f.a[f.sidx(j, k, i)] * z;
          if (h * std::abs(qt) > 2.0 * std::min(f.a_up[f.sidx(j, k, i)], f.a_dn[f.sidx(j, k, i)])) {
            peclet_ok = false;
            break;
          }
        }

  const size_t sN = static_cast<size_t>(K) * N;
  std::vector<double> a_mid, q_mid, up_mid, dn_mid, g_mid, L_mid;
  auto build_step = [&](int m) {
    interp_time(f.a, sN, nt, M, m, a_mid);
    interp_time(f.q, sN, nt, M, m, q_mid);
    interp_time(f.a_up, sN, nt, M, m, up_mid);
    interp_time(f.a_dn, sN, nt, M, m, dn_mid);
    interp_time(f.gamma, sN, nt, M, m, g_mid);
    interp_time(f.L, sN * N, nt, M, m, L_mid);

    SubStep step;
    step.blocks.lower.assign(sN, 0.0);
    step.blocks.upper.assign(sN, 0.0);
    step.blocks.diag.assign(sN * N, 0.0);
    step.coupling = L_mid;

    const double scale = std::exp(c * dt);
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i) {
        const size_t e = static_cast<size_t>(k) * N + i;
        double diffusion_diag = 0.0, up = 0.0, dn = 0.0;
        if (spatial) {
          const double qt = q_mid[e] - 2.0 * a_mid[e] * z;
          diffusion_diag = -(up_mid[e] + dn_mid[e]) / (h * h);
          up = up_mid[e] / (h * h) - qt / (2.0 * h);
          dn = dn_mid[e] / (h * h) + qt / (2.0 * h);
          if (!periodic && k == K - 1) up = 0.0;  // zero boundary value
          if (!periodic && k == 0) dn = 0.0;
        }
        step.blocks.lower[e] = scale * -dt * dn;
        step.blocks.upper[e] = scale * -dt * up;
        for (int jj = 0; jj < N; ++jj)
          step.blocks.diag[e * N + jj] =
              scale * ((i == static_cast<int>(jj) ? 1.0 - dt * (diffusion_diag + g_mid[e] + c) : 0.0) -
                       dt * L_mid[e * N + jj]);
      }
    return step;
  };

  // The factored map is e^{-c dt} (I - dt A)^{-1} per substep, so the
  // one-period multiplier stays near e^{-lambda T} instead of e^{(c-lambda)T},
  // which would overflow for strongly scaled coefficients.
  std::vector<SubStep> steps;
  steps.push_back(build_step(0));
  bool shared = true;
  for (int m = 1; m < M; ++m) {
    SubStep step = build_step(m);
    if (shared) {
      if (step.same_as(steps[0])) continue;
      // first deviation: earlier substeps were all identical to step 0
      steps.reserve(M);
      for (int mm = 1; mm < m; ++mm) steps.push_back(steps[0]);
      shared = false;
    }
    steps.push_back(std::move(step));
  }

  impl_->steps = std::move(steps);
  impl_->factors.resize(impl_->steps.size());
  impl_->adj_factors.resize(impl_->steps.size());
  for (size_t s = 0; s < impl_->steps.size(); ++s) {
    impl_->factors[s].factor(impl_->steps[s].blocks, K, N, periodic);
    impl_->adj_factors[s].factor(transpose_blocks(impl_->steps[s].blocks, K, N, periodic), K, N,
                                 periodic);
  }

  N_ = N;
  K_ = K;
  M_ = M;
  T_ = T;
  c_ = c;
  nt_ = nt;
  time_independent_ = impl_->steps.size() == 1;
  peclet_ok_ = peclet_ok;
}

StateVector MonodromyContext::apply(const StateVector& u0) const {
  if (u0.N != N_ || u0.nx != K_) fail(ErrorCode::shape_mismatch, "state shape mismatch");
  std::vector<double> x = to_node_major(u0, N_, K_);
  for (int m = 0; m < M_; ++m) impl_->factor(m).solve(x.data());
  return from_node_major(x, N_, K_);
}

StateVector MonodromyContext::apply_tracking(const StateVector& u0,
                                             std::vector<StateVector>& snapshots) const {
  if (u0.N != N_ || u0.nx != K_) fail(ErrorCode::shape_mismatch, "state shape mismatch");
  snapshots.clear();
  snapshots.reserve(M_);
  std::vector<double> x = to_node_major(u0, N_, K_);
  for (int m = 0; m < M_; ++m) {
    impl_->factor(m).solve(x.data());
    snapshots.push_back(from_node_major(x, N_, K_));
  }
  return snapshots.back();
}

StateVector MonodromyContext::apply_adjoint(const StateVector& v0) const {
  if (v0.N != N_ || v0.nx != K_) fail(ErrorCode::shape_mismatch, "state shape mismatch");
  std::vector<double> x = to_node_major(v0, N_, K_);
  for (int m = M_ - 1; m >= 0; --m) impl_->adj_factor(m).solve(x.data());
  return from_node_major(x, N_, K_);
}

StateVector MonodromyContext::apply_adjoint_tracking(const StateVector& v0,
                                                     std::vector<StateVector>& snapshots) const {
  if (v0.N != N_ || v0.nx != K_) fail(ErrorCode::shape_mismatch, "state shape mismatch");
  snapshots.assign(M_, StateVector());
  std::vector<double> x = to_node_major(v0, N_, K_);
  for (int m = M_ - 1; m >= 0; --m) {
    impl_->adj_factor(m).solve(x.data());
    snapshots[m] = from_node_major(x, N_, K_);
  }
  return snapshots.front();
}

double MonodromyContext::coupling_at(int m, int k, int i, int j) const {
  const SubStep& s = impl_->step(m);
  return s.coupling[(static_cast<size_t>(k) * N_ + i) * N_ + j];
}

std::vector<double> MonodromyContext::midpoint_matrix_field(const MatrixField& field, int m) const {
  if (dirichlet_) fail(ErrorCode::shape_mismatch, "midpoint sampling is periodic-only");
  if (field.N != N_ || field.nt != nt_ || field.nx != K_)
    fail(ErrorCode::shape_mismatch, "matrix field shape mismatch");
  std::vector<double> out;
  interp_time(field.values, static_cast<size_t>(K_) * N_ * N_, nt_, M_, m, out);
  return out;
}

}  // namespace coopeig
