#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coopeig/analysis.hpp"

namespace coopeig {

/// lambda_1' of s*(transport + diffusion + mutation) - diag(r) along s in
/// (0,1], computed through the rescaling identity lambda(sQ) = s*lambda(Q).
/// The verdict requires a nondecreasing scan within -1e-8; the strict-increase
/// margin is reported when r depends on x.
ScanTable karlin_scan(const SystemSpec& spec, const MutationDecomposition& dec,
                      const std::vector<double>& s_grid, const ScanOptions& opts = {});

struct DerivativeOptions {
  EigenOptions eigen;
  bool extrapolate = false;  // Richardson on the derivative itself
};

/// Derivative of lambda_{1,z} along the coupling perturbation L + alpha*dL at
/// alpha = 0, from the direct and adjoint eigenfunctions. The substep sum is
/// the exact derivative of the discrete eigenvalue, so it matches centered
/// finite differences of the same discretization to roundoff.
double eigen_derivative(const SystemSpec& spec, double z, const MatrixField& dL,
                        const DerivativeOptions& opts = {});

/// Partition of the periodicity cell; each cell carries one mutation matrix.
struct PartitionCell {
  double t_lo = 0.0, t_hi = 0.0;  // half-open in t
  double x_lo = 0.0, x_hi = 0.0;  // half-open in x
};

struct MutationField {
  std::vector<PartitionCell> partition;
  std::vector<SquareMatrix> S;  // one doubly stochastic matrix per cell
};

enum class MutationObjective { minimize, maximize };

struct MutationTemplate {
  SystemSpec base;                       // supplies cell, diffusion, advection
  std::vector<CoefficientDescriptor> r;  // growth rates, one per species
  std::vector<CoefficientDescriptor> mu; // nonnegative mutation intensities
};

struct CertificateSample {
  std::uint64_t seed_index = 0;
  double lambda = 0.0;
  bool beats_optimum = false;
};

struct MutationOptimum {
  MutationField field;                  // the winning permutation assignment
  std::vector<int> permutation_index;   // per cell, index into lexicographic perms
  double objective_value = 0.0;
  std::vector<double> all_values;       // per enumerated assignment
  std::vector<CertificateSample> certificate;
  bool heuristic = false;               // local-search mode, not a certificate
};

struct MutationSearchOptions {
  MutationObjective objective = MutationObjective::minimize;
  int certificate_samples = 20;
  std::uint64_t seed = 1;
  std::size_t enumeration_limit = 20000;
  bool local_search = false;  // single-cell swaps for large partitions
  EigenOptions eigen;
};

/// Enumerates permutation-valued mutation fields over the partition and
/// certifies the optimum against random interior doubly stochastic fields
/// (Birkhoff combinations with seeded convex weights).
MutationOptimum optimize_mutation(const MutationTemplate& tmpl,
                                  const std::vector<PartitionCell>& partition,
                                  const MutationSearchOptions& opts = {});

/// Builds the coupling field diag(r) + (S - I) diag(mu) for a given
/// permutation-or-stochastic assignment on the partition.
SystemSpec mutation_spec(const MutationTemplate& tmpl, const std::vector<PartitionCell>& partition,
                         const std::vector<SquareMatrix>& S_per_cell);

struct RearrangedField {
  MatrixField original;
  MatrixField rearranged;
  double lambda_original = 0.0;
  double lambda_rearranged = 0.0;
};

/// Entrywise periodic rearrangement of the coupling (per entry and time node,
/// symmetric non-increasing about the cell midpoint) and the eigenvalue
/// comparison lambda(Q) >= lambda(P - L^dagger). Requires constant diffusion
/// per species and no advection.
RearrangedField rearrange(const SystemSpec& spec, const EigenOptions& opts = {});

/// Center-out placement of the descending samples: mid, mid-1, mid+1, ...,
/// with the left-of-midpoint slot favored for even counts.
std::vector<double> periodic_rearrangement(std::vector<double> samples);

/// All permutation matrices of order N in lexicographic order.
std::vector<SquareMatrix> permutation_matrices(int N);

}  // namespace coopeig
