#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "coopeig/discretize.hpp"

namespace coopeig {

struct EigenOptions {
  int substeps = 512;
  bool extrapolate = true;  // Richardson over (M, 2M); skipped when exact in dt
  double drift_tol = 1e-12;
  int drift_run = 10;
  long max_iterations = 200000;
  double residual_tol = 1e-8;
  const StateVector* warm_start = nullptr;
};

struct EigenResult {
  double lambda = 0.0;
  double z = 0.0;
  StateVector eigenfunction;  // at t = 0, unit max norm, positive
  double residual = 0.0;      // ||G u - rho u||_inf / ||u||_inf
  long iterations = 0;
  bool extrapolated = false;
  double multiplier = 0.0;    // dominant multiplier rho of the monodromy
  int substeps_used = 0;
  bool exact_in_time = false; // time-independent context, no dt error in lambda
};

struct ZMaximum {
  double z_star = 0.0;
  double lambda_1 = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int evaluations = 0;
};

struct ZSearchOptions {
  double z_tol = 1e-4;
  double z_limit = 64.0;
  double initial_step = 1.0;
  EigenOptions eigen;
};

/// Principal periodic eigenpair of Q_z by power iteration on the monodromy
/// map; lambda = c - (1/T) ln rho, with the exact scalar inversion
/// lambda = c - (1 - rho^{-1/M})/dt whenever the context is time-independent.
EigenResult principal_eigenpair(const SystemSpec& spec, double z, const EigenOptions& opts = {});

/// Same machinery on the transposed one-period map (discrete adjoint).
EigenResult adjoint_eigenpair(const SystemSpec& spec, double z, const EigenOptions& opts = {});

/// lambda_1' = lambda_{1,0}.
EigenResult lambda_prime(const SystemSpec& spec, const EigenOptions& opts = {});

/// lambda_1 = max_z lambda_{1,z}: bracket by doubling from z = 0, then
/// golden-section maximization of the strictly concave z-family.
ZMaximum lambda_one(const SystemSpec& spec, const ZSearchOptions& opts = {});

/// Principal eigenvalue on [-R, R] periods with zero boundary values.
EigenResult dirichlet_eigenvalue(const SystemSpec& spec, int radius_periods,
                                 const EigenOptions& opts = {});

struct ReducibleExtension {
  BlockStructure blocks;
  std::vector<EigenResult> block_lambda_prime;
  std::vector<ZMaximum> block_maxima;
  double lambda0 = 0.0;        // min over blocks of the block's own max over z
  double lambda1_tilde = 0.0;  // max over z of the min over blocks
  double z_tilde = 0.0;
  int evaluations = 0;
};

/// Per-block eigenvalues for reducible specs (continuous extension).
ReducibleExtension reducible_extension(const SystemSpec& spec, const ZSearchOptions& opts = {});

/// lambda_{1,0} extended to reducible specs: min over blocks of the block
/// lambda_1'. Irreducible specs fall through to lambda_prime.
double lambda_prime_extended(const SystemSpec& spec, const EigenOptions& opts = {});

/// Golden-section maximization of a concave function with doubling bracket;
/// shared by lambda_one and the reducible extension.
ZMaximum maximize_concave(const std::function<double(double)>& value, const ZSearchOptions& opts);

}  // namespace coopeig
