#include "coopeig/lintri.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace coopeig {

void lu_factor(int n, double* a, int* piv) {
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[best * n + col])) best = r;
    if (a[best * n + col] == 0.0) fail(ErrorCode::singular_step, "singular implicit system");
    piv[col] = best;
    if (best != col)
      for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[best * n + j]);
    const double d = a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r * n + col] / d;
      a[r * n + col] = m;
      for (int j = col + 1; j < n; ++j) a[r * n + j] -= m * a[col * n + j];
    }
  }
}

void lu_solve(int n, const double* a, const int* piv, double* b) {
  for (int col = 0; col < n; ++col) {
    if (piv[col] != col) std::swap(b[col], b[piv[col]]);
    for (int r = col + 1; r < n; ++r) b[r] -= a[r * n + col] * b[col];
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * b[j];
    b[r] = s / a[r * n + r];
  }
}

void BlockTridiagonalSolver::factor(const BlockTridiagonal& blocks, int K, int N, bool periodic) {
  K_ = K;
  N_ = N;
  periodic_ = periodic;
  lower_ = blocks.lower;
  upper_ = blocks.upper;
  dense_lu_.clear();

  if (periodic && K <= 2) {
    const int n = K * N;
    dense_lu_.assign(static_cast<size_t>(n) * n, 0.0);
    dense_piv_.assign(n, 0);
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i) {
        const int row = k * N + i;
        for (int j = 0; j < N; ++j)
          dense_lu_[static_cast<size_t>(row) * n + k * N + j] +=
              blocks.diag[(static_cast<size_t>(k) * N + i) * N + j];
        const int km = (k - 1 + K) % K;
        const int kp = (k + 1) % K;
        dense_lu_[static_cast<size_t>(row) * n + km * N + i] += blocks.lower[static_cast<size_t>(k) * N + i];
        dense_lu_[static_cast<size_t>(row) * n + kp * N + i] += blocks.upper[static_cast<size_t>(k) * N + i];
      }
    lu_factor(n, dense_lu_.data(), dense_piv_.data());
    return;
  }

  const int C = chain_length();
  chain_lu_.assign(static_cast<size_t>(C) * N * N, 0.0);
  chain_piv_.assign(static_cast<size_t>(C) * N, 0);

  std::vector<double> prev_inv_upper(static_cast<size_t>(N) * N, 0.0);
  for (int k = 0; k < C; ++k) {
    double* G = &chain_lu_[static_cast<size_t>(k) * N * N];
    std::memcpy(G, &blocks.diag[static_cast<size_t>(k) * N * N], sizeof(double) * N * N);
    if (k > 0)
      for (int i = 0; i < N; ++i) {
        const double li = blocks.lower[static_cast<size_t>(k) * N + i];
        if (li == 0.0) continue;
        for (int j = 0; j < N; ++j) G[i * N + j] -= li * prev_inv_upper[static_cast<size_t>(i) * N + j];
      }
    lu_factor(N, G, &chain_piv_[static_cast<size_t>(k) * N]);
    if (k + 1 < C) {
      for (int j = 0; j < N; ++j) {
        double col[64] = {0.0};
        col[j] = blocks.upper[static_cast<size_t>(k) * N + j];
        lu_solve(N, G, &chain_piv_[static_cast<size_t>(k) * N], col);
        for (int i = 0; i < N; ++i) prev_inv_upper[static_cast<size_t>(i) * N + j] = col[i];
      }
    }
  }

  if (!periodic) return;

  // x_k = xhat_k - Z_k p with p the last node; column block 0 carries the
  // wrap of node 0, block C-1 the wrap of node C-1.
  Z_.assign(static_cast<size_t>(C) * N * N, 0.0);
  std::vector<double> col(static_cast<size_t>(C) * N);
  for (int j = 0; j < N; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = blocks.lower[j];
    col[static_cast<size_t>(C - 1) * N + j] += blocks.upper[static_cast<size_t>(C - 1) * N + j];
    chain_solve(col.data());
    for (int k = 0; k < C; ++k)
      for (int i = 0; i < N; ++i)
        Z_[(static_cast<size_t>(k) * N + i) * N + j] = col[static_cast<size_t>(k) * N + i];
  }

  schur_lu_.assign(static_cast<size_t>(N) * N, 0.0);
  schur_piv_.assign(N, 0);
  std::memcpy(schur_lu_.data(), &blocks.diag[static_cast<size_t>(K - 1) * N * N], sizeof(double) * N * N);
  for (int i = 0; i < N; ++i) {
    const double li = blocks.lower[static_cast<size_t>(K - 1) * N + i];
    const double ui = blocks.upper[static_cast<size_t>(K - 1) * N + i];
    for (int j = 0; j < N; ++j) {
      schur_lu_[static_cast<size_t>(i) * N + j] -= li * Z_[(static_cast<size_t>(C - 1) * N + i) * N + j];
      schur_lu_[static_cast<size_t>(i) * N + j] -= ui * Z_[static_cast<size_t>(i) * N + j];
    }
  }
  lu_factor(N, schur_lu_.data(), schur_piv_.data());
}

void BlockTridiagonalSolver::chain_solve(double* x) const {
  const int C = chain_length();
  const int N = N_;
  double s[64];
  for (int k = 1; k < C; ++k) {
    std::memcpy(s, &x[static_cast<size_t>(k - 1) * N], sizeof(double) * N);
    lu_solve(N, &chain_lu_[static_cast<size_t>(k - 1) * N * N], &chain_piv_[static_cast<size_t>(k - 1) * N], s);
    for (int i = 0; i < N; ++i)
      x[static_cast<size_t>(k) * N + i] -= lower_[static_cast<size_t>(k) * N + i] * s[i];
  }
  lu_solve(N, &chain_lu_[static_cast<size_t>(C - 1) * N * N], &chain_piv_[static_cast<size_t>(C - 1) * N],
           &x[static_cast<size_t>(C - 1) * N]);
  for (int k = C - 2; k >= 0; --k) {
    for (int i = 0; i < N; ++i)
      x[static_cast<size_t>(k) * N + i] -=
          upper_[static_cast<size_t>(k) * N + i] * x[static_cast<size_t>(k + 1) * N + i];
    lu_solve(N, &chain_lu_[static_cast<size_t>(k) * N * N], &chain_piv_[static_cast<size_t>(k) * N],
             &x[static_cast<size_t>(k) * N]);
  }
}

void BlockTridiagonalSolver::solve(double* x) const {
  if (!dense_lu_.empty()) {
    lu_solve(K_ * N_, dense_lu_.data(), dense_piv_.data(), x);
    return;
  }
  if (!periodic_) {
    chain_solve(x);
    return;
  }
  const int C = K_ - 1;
  const int N = N_;
  chain_solve(x);
  double* p = &x[static_cast<size_t>(C) * N];
  for (int i = 0; i < N; ++i) {
    p[i] -= lower_[static_cast<size_t>(K_ - 1) * N + i] * x[static_cast<size_t>(C - 1) * N + i];
    p[i] -= upper_[static_cast<size_t>(K_ - 1) * N + i] * x[i];
  }
  lu_solve(N, schur_lu_.data(), schur_piv_.data(), p);
  for (int k = 0; k < C; ++k)
    for (int i = 0; i < N; ++i) {
      double dot = 0.0;
      for (int j = 0; j < N; ++j) dot += Z_[(static_cast<size_t>(k) * N + i) * N + j] * p[j];
      x[static_cast<size_t>(k) * N + i] -= dot;
    }
}

}  // namespace coopeig
