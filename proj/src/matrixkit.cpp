#include "coopeig/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace coopeig {

namespace {

constexpr double kOffdiagTol = 1e-12;
constexpr double kLineSumTol = 1e-10;
constexpr double kDriftTol = 1e-12;
constexpr int kDriftRun = 10;
constexpr long kMaxIters = 100000;

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void normalize_sum(std::vector<double>& v) {
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s != 0.0)
    for (double& x : v) x /= s;
}

/// Power iteration on an entrywise nonnegative matrix with positive diagonal;
/// returns the spectral radius and a nonnegative unit-sum eigenvector.
std::pair<double, std::vector<double>> nonnegative_power(const SquareMatrix& B) {
  const int n = B.N;
  if (n == 1) return {B.at(0, 0), {1.0}};
  std::vector<double> v(n, 1.0 / n);
  double rho = 0.0;
  int stable = 0;
  for (long it = 0; it < kMaxIters; ++it) {
    std::vector<double> w = B.apply(v);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += w[i] * v[i];
      den += v[i] * v[i];
    }
    double estimate = num / den;
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;
    stable = std::abs(estimate - rho) <= kDriftTol * std::max(1.0, std::abs(estimate)) ? stable + 1 : 0;
    rho = estimate;
    v = std::move(w);
    if (stable >= kDriftRun) return {rho, v};
  }
  fail(ErrorCode::no_convergence, "power iteration did not settle; dominant pair near-degenerate");
}

std::vector<std::vector<int>> scc_blocks(const SquareMatrix& M) {
  BlockStructure blocks = block_decompose(M.a, M.N);
  std::vector<std::vector<int>> out;
  for (int b = 0; b < blocks.block_count(); ++b) out.push_back(blocks.block_species(b));
  return out;
}

SquareMatrix submatrix(const SquareMatrix& M, const std::vector<int>& idx) {
  SquareMatrix S(static_cast<int>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j)
      S.at(static_cast<int>(i), static_cast<int>(j)) = M.at(idx[i], idx[j]);
  return S;
}

/// Spectral radius shift: M + shift*I is entrywise nonnegative after clipping
/// float noise, with strictly positive diagonal.
SquareMatrix shifted_nonneg(const SquareMatrix& M, double shift) {
  SquareMatrix B = M;
  B.add_diagonal(shift);
  for (double& x : B.a) x = std::max(x, 0.0);
  return B;
}

struct DominantDirection {
  double value = 0.0;
  std::vector<double> vec;
  int ties = 1;
};

/// Dominant eigenvalue and a nonnegative right eigenvector of an essentially
/// nonnegative matrix, reducible allowed. Blocks are processed last-to-first
/// through the upper triangular structure: block b only receives from blocks
/// after it, so its component is determined by the later ones.
DominantDirection dominant_direction(const SquareMatrix& M, double shift) {
  const int n = M.N;
  auto blocks = scc_blocks(M);
  std::vector<double> block_values(blocks.size());
  for (size_t b = 0; b < blocks.size(); ++b)
    block_values[b] = nonnegative_power(shifted_nonneg(submatrix(M, blocks[b]), shift)).first - shift;

  DominantDirection out;
  out.value = *std::max_element(block_values.begin(), block_values.end());
  out.ties = 0;
  int chosen = -1;
  for (size_t b = 0; b < blocks.size(); ++b)
    if (block_values[b] >= out.value - 1e-12) {
      ++out.ties;
      chosen = static_cast<int>(b);
    }

  std::vector<std::vector<double>> xb(blocks.size());
  for (size_t b = blocks.size(); b-- > 0;) {
    if (static_cast<int>(b) > chosen) {
      xb[b].assign(blocks[b].size(), 0.0);
      continue;
    }
    if (static_cast<int>(b) == chosen) {
      xb[b] = nonnegative_power(shifted_nonneg(submatrix(M, blocks[b]), shift)).second;
      continue;
    }
    std::vector<double> rhs(blocks[b].size(), 0.0);
    for (size_t bp = b + 1; bp < blocks.size(); ++bp)
      for (size_t i = 0; i < blocks[b].size(); ++i)
        for (size_t j = 0; j < blocks[bp].size(); ++j)
          rhs[i] += M.at(blocks[b][i], blocks[bp][j]) * xb[bp][j];
    if (inf_norm(rhs) == 0.0) {
      xb[b].assign(blocks[b].size(), 0.0);
      continue;
    }
    if (block_values[b] >= out.value - 1e-12)
      fail(ErrorCode::no_convergence, "tied reducible blocks feed each other; no eigenvector");
    // (value*I - M_bb) x_b = rhs, nonsingular and inverse-nonnegative here.
    SquareMatrix A = submatrix(M, blocks[b]);
    for (double& x : A.a) x = -x;
    A.add_diagonal(out.value);
    xb[b] = dense_solve(std::move(A), std::move(rhs));
  }

  out.vec.assign(n, 0.0);
  for (size_t b = 0; b < blocks.size(); ++b)
    for (size_t i = 0; i < blocks[b].size(); ++i) out.vec[blocks[b][i]] = xb[b][i];
  for (double& v : out.vec) v = std::max(v, 0.0);
  normalize_sum(out.vec);
  return out;
}

}  // namespace

SquareMatrix SquareMatrix::identity(int n) {
  SquareMatrix I(n);
  for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
  return I;
}

SquareMatrix SquareMatrix::transposed() const {
  SquareMatrix T(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) T.at(j, i) = at(i, j);
  return T;
}

std::vector<double> SquareMatrix::apply(const std::vector<double>& v) const {
  std::vector<double> out(N, 0.0);
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += at(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

SquareMatrix SquareMatrix::operator+(const SquareMatrix& other) const {
  SquareMatrix out = *this;
  for (size_t i = 0; i < a.size(); ++i) out.a[i] += other.a[i];
  return out;
}

SquareMatrix& SquareMatrix::add_diagonal(double c) {
  for (int i = 0; i < N; ++i) at(i, i) += c;
  return *this;
}

SquareMatrix& SquareMatrix::add_diagonal(const std::vector<double>& d) {
  for (int i = 0; i < N; ++i) at(i, i) += d[i];
  return *this;
}

std::vector<double> dense_solve(SquareMatrix A, std::vector<double> b) {
  const int n = A.N;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A.at(r, col)) > std::abs(A.at(best, col))) best = r;
    if (A.at(best, col) == 0.0) fail(ErrorCode::singular_step, "singular dense system");
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(A.at(col, j), A.at(best, j));
      std::swap(b[col], b[best]);
    }
    for (int r = col + 1; r < n; ++r) {
      double m = A.at(r, col) / A.at(col, col);
      if (m == 0.0) continue;
      for (int j = col; j < n; ++j) A.at(r, j) -= m * A.at(col, j);
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= A.at(r, j) * b[j];
    b[r] = s / A.at(r, r);
  }
  return b;
}

PFResult perron(const SquareMatrix& M) {
  const int n = M.N;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && M.at(i, j) < -kOffdiagTol)
        fail(ErrorCode::not_essentially_nonnegative, "off-diagonal entry below -1e-12");

  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(M.at(i, i)));
  const double shift = 1.0 + max_diag;

  PFResult out;
  DominantDirection right = dominant_direction(M, shift);
  DominantDirection left = dominant_direction(M.transposed(), shift);
  out.value = right.value;
  out.right = std::move(right.vec);
  out.left = std::move(left.vec);
  out.simple = right.ties <= 1;

  std::vector<double> Mr = M.apply(out.right);
  for (int i = 0; i < n; ++i) Mr[i] -= out.value * out.right[i];
  out.residual = inf_norm(Mr);
  return out;
}

StructureFlags structure_flags(const SquareMatrix& M) {
  const int n = M.N;
  StructureFlags flags;
  flags.ess_nonneg = true;
  for (int i = 0; i < n && flags.ess_nonneg; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && M.at(i, j) < -kOffdiagTol) {
        flags.ess_nonneg = false;
        break;
      }

  flags.irreducible = scc_blocks(M).size() == 1;

  flags.line_sum_symmetric = true;
  flags.doubly_stochastic = true;
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      row += M.at(i, j);
      col += M.at(j, i);
      if (M.at(i, j) < -kOffdiagTol) flags.doubly_stochastic = false;
    }
    if (std::abs(row - col) > kLineSumTol) flags.line_sum_symmetric = false;
    if (std::abs(row - 1.0) > kLineSumTol || std::abs(col - 1.0) > kLineSumTol)
      flags.doubly_stochastic = false;
  }
  return flags;
}

AveragedMatrices averaged_matrices(const MatrixField& field) {
  const int N = field.N, nt = field.nt, nx = field.nx;
  AveragedMatrices out;
  out.time_mean = MatrixField::zeros(N, 1, nx);
  out.space_mean = MatrixField::zeros(N, nt, 1);
  out.spacetime_mean = SquareMatrix(N);
  out.geo_space = MatrixField::zeros(N, nt, 1);
  out.geo_time = SquareMatrix(N);

  std::vector<double> entry_min = field.entry_min();

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const bool positive_everywhere = entry_min[static_cast<size_t>(i) * N + j] > 0.0;
      for (int k = 0; k < nx; ++k) {
        double s = 0.0;
        for (int jt = 0; jt < nt; ++jt) s += field.at(jt, k, i, j);
        out.time_mean.at(0, k, i, j) = s / nt;
      }
      for (int jt = 0; jt < nt; ++jt) {
        double s = 0.0, slog = 0.0;
        for (int k = 0; k < nx; ++k) {
          s += field.at(jt, k, i, j);
          if (positive_everywhere) slog += std::log(field.at(jt, k, i, j));
        }
        out.space_mean.at(jt, 0, i, j) = s / nx;
        if (i == j)
          out.geo_space.at(jt, 0, i, j) = s / nx;
        else
          out.geo_space.at(jt, 0, i, j) = positive_everywhere ? std::exp(slog / nx) : 0.0;
      }
      double total = 0.0;
      for (int jt = 0; jt < nt; ++jt) total += out.space_mean.at(jt, 0, i, j);
      out.spacetime_mean.at(i, j) = total / nt;
      if (i == j) {
        out.geo_time.at(i, j) = total / nt;
      } else if (positive_everywhere) {
        double slog = 0.0;
        for (int jt = 0; jt < nt; ++jt) slog += std::log(out.space_mean.at(jt, 0, i, j));
        out.geo_time.at(i, j) = std::exp(slog / nt);
      } else {
        out.geo_time.at(i, j) = 0.0;
      }
    }
  return out;
}

DecompositionCheck check_decomposition(const MutationDecomposition& dec, const MatrixField& L) {
  if (dec.N != L.N || dec.nt != L.nt || dec.nx != L.nx || dec.S.N != L.N ||
      dec.S.nt != L.nt || dec.S.nx != L.nx)
    fail(ErrorCode::shape_mismatch, "decomposition and coupling field shapes disagree");

  const int N = L.N;
  DecompositionCheck out;
  for (int j = 0; j < L.nt; ++j)
    for (int k = 0; k < L.nx; ++k) {
      for (int i = 0; i < N; ++i) {
        double row = 0.0, col = 0.0;
        for (int c = 0; c < N; ++c) {
          double s = dec.S.at(j, k, i, c);
          if (s < 0) out.max_deviation = std::max(out.max_deviation, -s);
          row += s;
          col += dec.S.at(j, k, c, i);
        }
        out.max_deviation = std::max(out.max_deviation, std::abs(row - 1.0));
        out.max_deviation = std::max(out.max_deviation, std::abs(col - 1.0));
        if (dec.mu_at(j, k, i) < 0)
          out.max_deviation = std::max(out.max_deviation, -dec.mu_at(j, k, i));
      }
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
          double rebuilt = (r == c ? dec.r_at(j, k, r) - dec.mu_at(j, k, c) : 0.0) +
                           dec.S.at(j, k, r, c) * dec.mu_at(j, k, c);
          out.max_deviation = std::max(out.max_deviation, std::abs(rebuilt - L.at(j, k, r, c)));
        }
    }
  out.valid = out.max_deviation <= 1e-10;
  return out;
}

}  // namespace coopeig
