#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coopeig/spectra.hpp"

namespace coopeig {

struct ScanRow {
  double param = 0.0;
  double lambda = 0.0;
  std::optional<double> predicted;
  double abs_err = 0.0;  // |lambda - predicted| when predicted is present
  std::string verdict;
};

struct ScanTable {
  std::string parameter;
  std::optional<double> predicted_limit;
  std::vector<ScanRow> rows;  // sorted by param
  std::string summary;
};

struct ScanOptions {
  EigenOptions eigen;
  bool smooth_piecewise = true;  // one grid-cell mollification of piecewise coupling
};

/// lambda_1' along the interpolation path L[s]: diagonals linear in s,
/// off-diagonals geometric (zero whenever either endpoint vanishes), with
/// midpoint-concavity verdicts and affinity detection at 1e-6.
ScanTable concavity_in_L(const SystemSpec& spec0, const SystemSpec& spec1,
                         const std::vector<double>& s_grid, const ScanOptions& opts = {});

/// lambda_1' with a_i -> d a_i; the predicted limit is the eigenvalue of the
/// space-averaged (x-independent) operator.
ScanTable diffusion_scan(const SystemSpec& spec, const std::vector<double>& d_values,
                         const ScanOptions& opts = {});

/// lambda_1' with a_i -> eps^2 a_i, q_i -> eps q_i; the predicted limit is the
/// min over x-nodes of the frozen-x periodic ODE eigenvalue.
ScanTable vanishing_scan(const SystemSpec& spec, const std::vector<double>& eps_values,
                         const ScanOptions& opts = {});

enum class FrequencyDirection { to_zero, to_infinity };

/// lambda_1' with d/dt -> omega d/dt. For omega -> infinity the predicted
/// limit uses the time-averaged coefficients; for omega -> 0 the time average
/// of frozen-t elliptic eigenvalues (trapezoid in t).
ScanTable frequency_scan(const SystemSpec& spec, const std::vector<double>& omega_values,
                         FrequencyDirection direction, const ScanOptions& opts = {});

struct BoundVerdict {
  std::string name;
  bool hypothesis_met = false;
  std::string hypothesis_note;
  double bound = 0.0;    // right-hand side, when applicable
  double lambda = 0.0;   // lambda_{1,z} of the spec
  bool satisfied = false;
  bool equality = false;  // |lambda - bound| <= 1e-6
};

/// Evaluates the line-sum-symmetric bound and the two arithmetic/geometric
/// mean bounds at the given tilt; bounds whose hypotheses fail are skipped.
std::vector<BoundVerdict> bounds_report(const SystemSpec& spec, double z,
                                        const EigenOptions& opts = {});

/// Minimum of the discrete Rayleigh quotient of the self-adjoint elliptic
/// operator -diag(d/dx(a_i d/dx)) - L(x) over N x nx fields, by shifted
/// inverse power iteration. Requires time-independent symmetric L and q = 0.
double variational_rayleigh(const SystemSpec& spec);

/// Removes a gradient advection q_i = a_i dQ/dx (common across species, zero
/// x-mean) by the substitution v = e^{Q/2} u, yielding an advection-free spec
/// with the same lambda_1'.
SystemSpec self_adjoint_transform(const SystemSpec& spec);

/// Replaces the coupling by its pointwise symmetric part.
SystemSpec symmetrize_coupling(const SystemSpec& spec);

// -- spec surgery helpers shared by the scans and the CLI --

CoefficientDescriptor scale_descriptor(const CoefficientDescriptor& desc, double factor,
                                       const PeriodicCell& cell);
SystemSpec scale_coefficients(const SystemSpec& spec, double diffusion_factor,
                              double advection_factor, double coupling_factor);
/// One-pass (1,2,1)/4 smoothing in x of piecewise coupling entries.
SystemSpec mollify_piecewise_coupling(const SystemSpec& spec);
/// x-independent ODE spec (nx = 1) with the given nt x 1 coupling samples.
SystemSpec ode_spec_from_coupling(const MatrixField& coupling, double period_T);

}  // namespace coopeig
