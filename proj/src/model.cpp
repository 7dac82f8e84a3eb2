#include "coopeig/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace coopeig {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_into(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0) r += period;
  return r;
}

}  // namespace

void PeriodicCell::validate() const {
  if (!(period_T > 0) || !(period_L > 0))
    fail(ErrorCode::schema_error, "cell periods must be positive");
  if (nt < 4 || nx < 1)
    fail(ErrorCode::schema_error, "cell needs nt >= 4 and nx >= 1");
}

double ScalarFieldSamples::min() const {
  return *std::min_element(values.begin(), values.end());
}

double ScalarFieldSamples::max() const {
  return *std::max_element(values.begin(), values.end());
}

double ScalarFieldSamples::mean() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
}

bool ScalarFieldSamples::time_independent(double tol) const {
  for (int j = 1; j < nt; ++j)
    for (int k = 0; k < nx; ++k)
      if (std::abs(at(j, k) - at(0, k)) > tol) return false;
  return true;
}

bool ScalarFieldSamples::space_independent(double tol) const {
  for (int j = 0; j < nt; ++j)
    for (int k = 1; k < nx; ++k)
      if (std::abs(at(j, k) - at(j, 0)) > tol) return false;
  return true;
}

CoefficientDescriptor CoefficientDescriptor::constant(double v) {
  CoefficientDescriptor d;
  d.kind = Kind::constant;
  d.constant_value = v;
  return d;
}

CoefficientDescriptor CoefficientDescriptor::fourier(std::vector<FourierTerm> terms) {
  CoefficientDescriptor d;
  d.kind = Kind::fourier;
  d.terms = std::move(terms);
  return d;
}

CoefficientDescriptor CoefficientDescriptor::grid(int nt, int nx, std::vector<double> values) {
  CoefficientDescriptor d;
  d.kind = Kind::grid;
  d.grid_nt = nt;
  d.grid_nx = nx;
  d.grid_values = std::move(values);
  return d;
}

CoefficientDescriptor CoefficientDescriptor::piecewise(std::vector<PiecewisePatch> pieces,
                                                       double fallback) {
  CoefficientDescriptor d;
  d.kind = Kind::piecewise;
  d.pieces = std::move(pieces);
  d.piecewise_default = fallback;
  return d;
}

double CoefficientDescriptor::eval(double t, double x, const PeriodicCell& cell) const {
  switch (kind) {
    case Kind::constant:
      return constant_value;
    case Kind::fourier: {
      double v = 0.0;
      for (const auto& term : terms) {
        const double pt = kTwoPi * term.kt * t / cell.period_T;
        const double px = kTwoPi * term.kx * x / cell.period_L;
        const double ft = term.t_sin ? std::sin(pt) : std::cos(pt);
        const double fx = term.x_sin ? std::sin(px) : std::cos(px);
        v += term.amplitude * ft * fx;
      }
      return v;
    }
    case Kind::grid: {
      // Nearest-node lookup; grid payloads are defined on the cell grid.
      if (grid_nt <= 0 || grid_nx <= 0)
        fail(ErrorCode::schema_error, "grid descriptor has no payload");
      const double tw = wrap_into(t, cell.period_T);
      const double xw = wrap_into(x, cell.period_L);
      int j = static_cast<int>(std::floor(tw / cell.period_T * grid_nt + 0.5)) % grid_nt;
      int k = static_cast<int>(std::floor(xw / cell.period_L * grid_nx + 0.5)) % grid_nx;
      return grid_values[static_cast<size_t>(j) * grid_nx + k];
    }
    case Kind::piecewise: {
      const double tw = wrap_into(t, cell.period_T);
      const double xw = wrap_into(x, cell.period_L);
      double v = piecewise_default;
      for (const auto& p : pieces)
        if (tw >= p.t_lo && tw < p.t_hi && xw >= p.x_lo && xw < p.x_hi) v = p.value;
      return v;
    }
  }
  return 0.0;
}

ScalarFieldSamples sample(const CoefficientDescriptor& desc, const PeriodicCell& cell) {
  cell.validate();
  if (desc.kind == CoefficientDescriptor::Kind::grid &&
      (desc.grid_nt != cell.nt || desc.grid_nx != cell.nx))
    fail(ErrorCode::schema_error, "grid descriptor dimensions do not match the cell");
  ScalarFieldSamples out;
  out.nt = cell.nt;
  out.nx = cell.nx;
  out.values.resize(static_cast<size_t>(cell.nt) * cell.nx);
  for (int j = 0; j < cell.nt; ++j)
    for (int k = 0; k < cell.nx; ++k)
      out.at(j, k) = desc.eval(j * cell.dt_node(), k * cell.dx(), cell);
  return out;
}

MatrixField MatrixField::zeros(int N, int nt, int nx) {
  MatrixField f;
  f.N = N;
  f.nt = nt;
  f.nx = nx;
  f.values.assign(static_cast<size_t>(nt) * nx * N * N, 0.0);
  return f;
}

std::vector<double> MatrixField::entry_max() const {
  std::vector<double> m(static_cast<size_t>(N) * N, -std::numeric_limits<double>::infinity());
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < nx; ++k)
      for (int e = 0; e < N * N; ++e)
        m[e] = std::max(m[e], values[(static_cast<size_t>(j) * nx + k) * N * N + e]);
  return m;
}

std::vector<double> MatrixField::entry_min() const {
  std::vector<double> m(static_cast<size_t>(N) * N, std::numeric_limits<double>::infinity());
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < nx; ++k)
      for (int e = 0; e < N * N; ++e)
        m[e] = std::min(m[e], values[(static_cast<size_t>(j) * nx + k) * N * N + e]);
  return m;
}

MatrixField SystemSpec::sample_coupling() const {
  MatrixField f = MatrixField::zeros(N, cell.nt, cell.nx);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      ScalarFieldSamples s = sample(coupling_at(i, j), cell);
      for (int jt = 0; jt < cell.nt; ++jt)
        for (int k = 0; k < cell.nx; ++k)
          f.at(jt, k, i, j) = s.at(jt, k);
    }
  return f;
}

void SystemSpec::check_shapes() const {
  cell.validate();
  if (N < 1) fail(ErrorCode::schema_error, "species count must be >= 1");
  if (static_cast<int>(diffusion.size()) != N)
    fail(ErrorCode::schema_error, "diffusion needs one descriptor per species");
  if (static_cast<int>(advection.size()) != N)
    fail(ErrorCode::schema_error, "advection needs one descriptor per species");
  if (static_cast<int>(coupling.size()) != N * N)
    fail(ErrorCode::schema_error, "coupling needs an N x N descriptor array");
}

ValidationReport validate_system(const SystemSpec& spec) {
  spec.check_shapes();
  ValidationReport report;
  report.reducible_flagged = spec.reducible_flag;

  report.ellipticity_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.N; ++i)
    report.ellipticity_margin = std::min(report.ellipticity_margin, spec.sample_diffusion(i).min());
  if (!(report.ellipticity_margin > 0))
    fail(ErrorCode::ellipticity_violation, "min diffusion sample is not positive");

  MatrixField L = spec.sample_coupling();
  report.min_offdiagonal = std::numeric_limits<double>::infinity();
  for (int j = 0; j < L.nt; ++j)
    for (int k = 0; k < L.nx; ++k)
      for (int r = 0; r < spec.N; ++r)
        for (int c = 0; c < spec.N; ++c)
          if (r != c) report.min_offdiagonal = std::min(report.min_offdiagonal, L.at(j, k, r, c));
  if (spec.N == 1) report.min_offdiagonal = 0.0;
  if (report.min_offdiagonal < -kCooperativityTol)
    fail(ErrorCode::cooperativity_violation, "off-diagonal coupling sample below -1e-12");

  BlockStructure blocks = block_decompose(L.entry_max(), spec.N);
  report.irreducible = blocks.block_count() == 1;
  if (!report.irreducible && !spec.reducible_flag)
    report.notes.push_back("max-coupling matrix is reducible; spectral operations require the "
                           "reducible flag and the block extension");
  report.valid = true;
  return report;
}

std::vector<int> BlockStructure::block_species(int b) const {
  std::vector<int> out;
  for (int p = block_bounds[b]; p < block_bounds[b + 1]; ++p) out.push_back(permutation[p]);
  return out;
}

BlockStructure block_decompose(const std::vector<double>& entry_max, int N) {
  // Tarjan SCC on the graph j -> i whenever max l_{i,j} > 0 (i != j),
  // emitted in reverse topological order, then flipped so that block k only
  // feeds blocks before it (block upper triangular after permutation).
  std::vector<std::vector<int>> out_edges(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j && entry_max[static_cast<size_t>(i) * N + j] > kCooperativityTol)
        out_edges[j].push_back(i);

  std::vector<int> index(N, -1), low(N, 0), stack;
  std::vector<bool> on_stack(N, false);
  std::vector<std::vector<int>> components;
  int counter = 0;

  // Iterative Tarjan: frame = (node, next-edge position).
  for (int start = 0; start < N; ++start) {
    if (index[start] != -1) continue;
    std::vector<std::pair<int, size_t>> frames{{start, 0}};
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (pos < out_edges[v].size()) {
        int w = out_edges[v][pos++];
        if (index[w] == -1) {
          frames.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      int finished = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[finished]);
    }
  }

  // Tarjan emits SCCs so that every edge out of a later component points into
  // an earlier one; with edges j -> i meaning "j feeds i", listing components
  // in emission order makes row blocks only receive from blocks at or after
  // them, which is the block upper triangular convention used here.
  BlockStructure blocks;
  blocks.block_bounds.push_back(0);
  for (const auto& comp : components) {
    for (int s : comp) blocks.permutation.push_back(s);
    blocks.block_bounds.push_back(static_cast<int>(blocks.permutation.size()));
  }
  return blocks;
}

BlockStructure block_decompose(const SystemSpec& spec) {
  spec.check_shapes();
  return block_decompose(spec.sample_coupling().entry_max(), spec.N);
}

SystemSpec block_subsystem(const SystemSpec& spec, const BlockStructure& blocks, int b) {
  std::vector<int> species = blocks.block_species(b);
  SystemSpec sub;
  sub.N = static_cast<int>(species.size());
  sub.cell = spec.cell;
  for (int i : species) {
    sub.diffusion.push_back(spec.diffusion[i]);
    sub.advection.push_back(spec.advection[i]);
  }
  for (int i : species)
    for (int j : species) sub.coupling.push_back(spec.coupling_at(i, j));
  return sub;
}

}  // namespace coopeig
