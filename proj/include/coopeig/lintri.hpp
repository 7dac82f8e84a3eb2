#pragma once

#include <vector>

#include "coopeig/common.hpp"

namespace coopeig {

void lu_factor(int n, double* a, int* piv);
void lu_solve(int n, const double* a, const int* piv, double* b);

/// Node-major block tridiagonal matrix with diagonal off-diagonal blocks
/// (per-species scalars), optionally with periodic wrap.
struct BlockTridiagonal {
  std::vector<double> lower;  // K*N, multiplies node k-1
  std::vector<double> upper;  // K*N, multiplies node k+1
  std::vector<double> diag;   // K*N*N dense blocks

  bool same_as(const BlockTridiagonal& o) const {
    return lower == o.lower && upper == o.upper && diag == o.diag;
  }
};

/// Block-Thomas LU; periodic wrap handled by a Schur complement on the last
/// node (off-diagonal blocks are diagonal, so the correction stays rank N).
class BlockTridiagonalSolver {
public:
  void factor(const BlockTridiagonal& blocks, int K, int N, bool periodic);
  void solve(double* x) const;  // in place, node-major K*N

private:
  void chain_solve(double* x) const;
  int chain_length() const { return periodic_ ? K_ - 1 : K_; }

  int K_ = 0, N_ = 0;
  bool periodic_ = false;
  std::vector<double> chain_lu_;
  std::vector<int> chain_piv_;
  std::vector<double> lower_, upper_;
  std::vector<double> Z_;
  std::vector<double> schur_lu_;
  std::vector<int> schur_piv_;
  std::vector<double> dense_lu_;
  std::vector<int> dense_piv_;
};

}  // namespace coopeig
