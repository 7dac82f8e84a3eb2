#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coopeig/common.hpp"

namespace coopeig {

/// Uniform sampling grid over one space-time periodicity cell (0,T)x(0,L).
/// Sample (j,k) sits at (j*T/nt, k*L/nx); every field sampled on the cell is
/// wrap-around periodic by construction.
struct PeriodicCell {
  double period_T = 1.0;
  double period_L = 1.0;
  int nt = 16;
  int nx = 128;

  double dt_node() const { return period_T / nt; }
  double dx() const { return period_L / nx; }
  void validate() const;
};

/// nt x nx samples of a scalar coefficient, row-major in time.
struct ScalarFieldSamples {
  int nt = 0;
  int nx = 0;
  std::vector<double> values;  // nt*nx

  double& at(int j, int k) { return values[static_cast<size_t>(j) * nx + k]; }
  double at(int j, int k) const { return values[static_cast<size_t>(j) * nx + k]; }
  double min() const;
  double max() const;
  double mean() const;
  bool time_independent(double tol = 0.0) const;
  bool space_independent(double tol = 0.0) const;
};

struct FourierTerm {
  int kt = 0;          // time harmonic
  int kx = 0;          // space harmonic
  bool t_sin = false;  // cos(2*pi*kt*t/T) unless t_sin
  bool x_sin = false;  // cos(2*pi*kx*x/L) unless x_sin
  double amplitude = 0.0;
};

struct PiecewisePatch {
  double t_lo = 0.0, t_hi = 0.0;  // half-open [lo, hi) in time
  double x_lo = 0.0, x_hi = 0.0;  // half-open [lo, hi) in space
  double value = 0.0;
};

/// One scalar coefficient of the operator, in one of four concrete forms.
struct CoefficientDescriptor {
  enum class Kind { constant, fourier, grid, piecewise };

  Kind kind = Kind::constant;
  double constant_value = 0.0;
  std::vector<FourierTerm> terms;       // fourier
  std::vector<double> grid_values;      // grid, nt*nx row-major in time
  int grid_nt = 0, grid_nx = 0;
  std::vector<PiecewisePatch> pieces;   // piecewise, later patches win
  double piecewise_default = 0.0;

  static CoefficientDescriptor constant(double v);
  static CoefficientDescriptor fourier(std::vector<FourierTerm> terms);
  static CoefficientDescriptor grid(int nt, int nx, std::vector<double> values);
  static CoefficientDescriptor piecewise(std::vector<PiecewisePatch> pieces, double fallback = 0.0);

  /// Point evaluation with wrap-around periodicity in both variables.
  double eval(double t, double x, const PeriodicCell& cell) const;
};

/// Evaluates the descriptor at the cell's nodes.
ScalarFieldSamples sample(const CoefficientDescriptor& desc, const PeriodicCell& cell);

/// Grid-sampled N x N coupling matrix L(t,x).
struct MatrixField {
  int N = 0;
  int nt = 0;
  int nx = 0;
  std::vector<double> values;  // [(j*nx + k)*N*N + i*N + jj]

  static MatrixField zeros(int N, int nt, int nx);
  double& at(int j, int k, int row, int col) {
    return values[(static_cast<size_t>(j) * nx + k) * N * N + static_cast<size_t>(row) * N + col];
  }
  double at(int j, int k, int row, int col) const {
    return values[(static_cast<size_t>(j) * nx + k) * N * N + static_cast<size_t>(row) * N + col];
  }
  /// Entry-wise max over all samples.
  std::vector<double> entry_max() const;
  std::vector<double> entry_min() const;
};

/// Full description of the operator Q = diag(P_i) - L on a periodicity cell.
struct SystemSpec {
  int N = 1;
  PeriodicCell cell;
  std::vector<CoefficientDescriptor> diffusion;  // a_i(t,x) > 0
  std::vector<CoefficientDescriptor> advection;  // q_i(t,x)
  std::vector<CoefficientDescriptor> coupling;   // row-major N*N, l_{i,j}(t,x)
  bool reducible_flag = false;

  const CoefficientDescriptor& coupling_at(int i, int j) const {
    return coupling[static_cast<size_t>(i) * N + j];
  }
  MatrixField sample_coupling() const;
  ScalarFieldSamples sample_diffusion(int i) const { return sample(diffusion[i], cell); }
  ScalarFieldSamples sample_advection(int i) const { return sample(advection[i], cell); }
  void check_shapes() const;  // throws SCHEMA_ERROR
};

struct ValidationReport {
  bool valid = false;
  double ellipticity_margin = 0.0;        // min over samples of a_i
  double min_offdiagonal = 0.0;           // min over samples of l_{i,j}, i != j
  bool irreducible = false;               // verdict on the max-matrix
  bool reducible_flagged = false;
  std::vector<std::string> notes;
};

/// Checks the sampled analogues of the standing structural assumptions:
/// positive diffusion, nonnegative off-diagonal coupling, irreducible max-matrix
/// (or an explicit reducible flag). Throws on hard violations.
ValidationReport validate_system(const SystemSpec& spec);

/// Off-diagonal samples above this are rounded to zero during validation
/// (float noise from fourier evaluation).
inline constexpr double kCooperativityTol = 1e-12;

/// Block upper triangular form of the max-coupling matrix.
struct BlockStructure {
  std::vector<int> permutation;   // new index -> original species index
  std::vector<int> block_bounds;  // N_0 = 0 < N_1 <= ... <= N_{N'} = N
  int block_count() const { return static_cast<int>(block_bounds.size()) - 1; }
  std::vector<int> block_species(int b) const;  // original indices of block b
};

/// Strongly connected components of the directed graph j -> i whenever
/// max_{t,x} l_{i,j} > 0, ordered topologically; an irreducible spec yields
/// a single block.
BlockStructure block_decompose(const SystemSpec& spec);
BlockStructure block_decompose(const std::vector<double>& entry_max, int N);

/// Restriction of the spec to one diagonal block (off-block coupling dropped).
SystemSpec block_subsystem(const SystemSpec& spec, const BlockStructure& blocks, int b);

}  // namespace coopeig
