#pragma once

#include <vector>

#include "coopeig/model.hpp"

namespace coopeig {

/// Dense square matrix, row-major, for state-space sizes N <= 64.
struct SquareMatrix {
  int N = 0;
  std::vector<double> a;  // N*N

  SquareMatrix() = default;
  explicit SquareMatrix(int n) : N(n), a(static_cast<size_t>(n) * n, 0.0) {}
  SquareMatrix(int n, std::vector<double> entries) : N(n), a(std::move(entries)) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * N + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * N + j]; }

  static SquareMatrix identity(int n);
  SquareMatrix transposed() const;
  std::vector<double> apply(const std::vector<double>& v) const;
  SquareMatrix operator+(const SquareMatrix& other) const;
  SquareMatrix& add_diagonal(double c);
  SquareMatrix& add_diagonal(const std::vector<double>& d);
};

/// Solves A x = b by Gaussian elimination with partial pivoting (A untouched).
std::vector<double> dense_solve(SquareMatrix A, std::vector<double> b);

struct PFResult {
  double value = 0.0;
  std::vector<double> right;  // nonnegative, unit sum
  std::vector<double> left;   // nonnegative, unit sum
  double residual = 0.0;      // ||M right - value right||_inf
  bool simple = true;
  long iterations = 0;
};

/// Dominant eigenvalue with nonnegative eigenvectors of an essentially
/// nonnegative matrix; irreducible input gives the Perron-Frobenius pair,
/// reducible input the continuous extension (max over diagonal blocks).
PFResult perron(const SquareMatrix& M);

struct StructureFlags {
  bool ess_nonneg = false;
  bool irreducible = false;
  bool line_sum_symmetric = false;  // M 1 == M^T 1 within 1e-10
  bool doubly_stochastic = false;
};

StructureFlags structure_flags(const SquareMatrix& M);

/// Reduced matrices of one coupling field. Arithmetic means throughout except
/// for the off-diagonal entries of the sharp/flat matrices, which switch to
/// exp(mean of ln) whenever the entry is positive on the whole cell and to 0
/// otherwise.
struct AveragedMatrices {
  MatrixField time_mean;      // 1 x nx, entries averaged over t
  MatrixField space_mean;     // nt x 1, entries averaged over x
  SquareMatrix spacetime_mean;
  MatrixField geo_space;      // nt x 1 ("sharp": geometric in x off the diagonal)
  SquareMatrix geo_time;      // ("flat": geometric in t, for x-independent fields)
};

AveragedMatrices averaged_matrices(const MatrixField& field);

/// Sampled (r, mu, S) triple with L = diag(r) + (S - I) diag(mu).
struct MutationDecomposition {
  int N = 0;
  int nt = 0;
  int nx = 0;
  std::vector<double> r;   // nt*nx*N
  std::vector<double> mu;  // nt*nx*N, nonnegative
  MatrixField S;           // doubly stochastic at every sample

  double r_at(int j, int k, int i) const {
    return r[(static_cast<size_t>(j) * nx + k) * N + i];
  }
  double mu_at(int j, int k, int i) const {
    return mu[(static_cast<size_t>(j) * nx + k) * N + i];
  }
};

struct DecompositionCheck {
  bool valid = false;
  double max_deviation = 0.0;  // worst violation over all invariants and samples
};

/// Verifies samplewise that S is doubly stochastic, mu >= 0, and that
/// diag(r) + (S - I) diag(mu) reproduces the coupling field to 1e-10.
DecompositionCheck check_decomposition(const MutationDecomposition& dec, const MatrixField& L);

}  // namespace coopeig
