#include <doctest.h>

#include <cmath>

#include "coopeig/corpus.hpp"
#include "coopeig/matrixkit.hpp"

using namespace coopeig;

namespace {

SquareMatrix make(int n, std::initializer_list<double> vals) {
  return SquareMatrix(n, std::vector<double>(vals));
}

/// Neumann discrete Laplacian of order n with unit rate.
SquareMatrix neumann_laplacian(int n) {
  SquareMatrix M(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      M.at(i, i - 1) = 1.0;
      M.at(i, i) -= 1.0;
    }
    if (i + 1 < n) {
      M.at(i, i + 1) = 1.0;
      M.at(i, i) -= 1.0;
    }
  }
  return M;
}

}  // namespace

TEST_SUITE_BEGIN("matrixkit");

TEST_CASE("symmetric exchange has value 1 with the uniform vector") {
  PFResult r = perron(make(2, {0.0, 1.0, 1.0, 0.0}));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.right[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.right[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.simple);
  CHECK(r.residual <= 1e-10);
}

TEST_CASE("asymmetric 2x2 has value 1 + sqrt(eps)") {
  PFResult r = perron(make(2, {1.0, 1.0, 0.25, 1.0}));
  CHECK(r.value == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("Neumann discrete Laplacian has value 0 with the uniform vector") {
  for (int n : {2, 3, 5, 8}) {
    PFResult r = perron(neumann_laplacian(n));
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-11));
    for (int i = 0; i < n; ++i) CHECK(r.right[i] == doctest::Approx(1.0 / n).epsilon(1e-8));
  }
}

TEST_CASE("shift equivariance to 1e-10") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 5);
    SquareMatrix M(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.at(i, j) = i == j ? rng.uniform(-2, 2) : rng.uniform(0, 2);
    const double c = rng.uniform(-3, 3);
    SquareMatrix shifted = M;
    shifted.add_diagonal(c);
    CHECK(perron(shifted).value == doctest::Approx(perron(M).value + c).epsilon(1e-10));
  }
}

TEST_CASE("transpose preserves the value and swaps the vectors") {
  Rng rng(6);
  SquareMatrix M(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M.at(i, j) = i == j ? rng.uniform(-1, 1) : rng.uniform(0.1, 2);
  PFResult a = perron(M);
  PFResult b = perron(M.transposed());
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
  for (int i = 0; i < 3; ++i) {
    CHECK(a.left[i] == doctest::Approx(b.right[i]).epsilon(1e-8));
    CHECK(a.right[i] == doctest::Approx(b.left[i]).epsilon(1e-8));
  }
}

TEST_CASE("entrywise domination is monotone in the value") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 4);
    SquareMatrix M(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.at(i, j) = i == j ? rng.uniform(-1, 1) : rng.uniform(0.05, 1);
    SquareMatrix Mp = M;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Mp.at(i, j) += i == j ? rng.uniform(0, 0.5) : rng.uniform(0, 0.5);
    CHECK(perron(M).value <= perron(Mp).value + 1e-10);
  }
}

TEST_CASE("line-sum-symmetric with constant row sums pins the uniform vector") {
  // circulant: rows sum to rho = 0.6 + 0.9 + 0.5
  SquareMatrix M = make(3, {0.6, 0.9, 0.5, 0.5, 0.6, 0.9, 0.9, 0.5, 0.6});
  CHECK(structure_flags(M).line_sum_symmetric);
  PFResult r = perron(M);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
  for (int i = 0; i < 3; ++i) CHECK(r.right[i] == doctest::Approx(1.0 / 3).epsilon(1e-8));
}

TEST_CASE("structure flags") {
  StructureFlags id = structure_flags(SquareMatrix::identity(3));
  CHECK(id.ess_nonneg);
  CHECK_FALSE(id.irreducible);
  CHECK(id.line_sum_symmetric);
  CHECK(id.doubly_stochastic);

  StructureFlags asym = structure_flags(make(2, {1.0, 1.0, 0.25, 1.0}));
  CHECK(asym.ess_nonneg);
  CHECK(asym.irreducible);
  CHECK_FALSE(asym.line_sum_symmetric);
  CHECK_FALSE(asym.doubly_stochastic);
}

TEST_CASE("averaged matrices of the two-phase field") {
  // [[1,1],[0,1]] on the first half cell, [[1,0],[1,1]] on the second
  MatrixField f = MatrixField::zeros(2, 2, 8);
  for (int jt = 0; jt < 2; ++jt)
    for (int k = 0; k < 8; ++k) {
      f.at(jt, k, 0, 0) = 1.0;
      f.at(jt, k, 1, 1) = 1.0;
      f.at(jt, k, 0, 1) = k < 4 ? 1.0 : 0.0;
      f.at(jt, k, 1, 0) = k < 4 ? 0.0 : 1.0;
    }
  AveragedMatrices avg = averaged_matrices(f);
  CHECK(avg.spacetime_mean.at(0, 1) == doctest::Approx(0.5));
  CHECK(avg.spacetime_mean.at(1, 0) == doctest::Approx(0.5));
  CHECK(perron(avg.spacetime_mean).value == doctest::Approx(1.5).epsilon(1e-10));
  // pointwise matrices are triangular with value 1
  SquareMatrix left = make(2, {1, 1, 0, 1});
  CHECK(perron(left).value == doctest::Approx(1.0).epsilon(1e-10));
  // zero minimum kills the geometric mean off the diagonal
  CHECK(avg.geo_space.at(0, 0, 0, 1) == 0.0);
}

TEST_CASE("geometric versus arithmetic mean of a half-half entry") {
  MatrixField f = MatrixField::zeros(2, 2, 4);
  for (int jt = 0; jt < 2; ++jt)
    for (int k = 0; k < 4; ++k) {
      f.at(jt, k, 0, 0) = 1.0;
      f.at(jt, k, 1, 1) = 1.0;
      f.at(jt, k, 0, 1) = k < 2 ? 1.0 : 4.0;
      f.at(jt, k, 1, 0) = 1.0;
    }
  AveragedMatrices avg = averaged_matrices(f);
  CHECK(avg.geo_space.at(0, 0, 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(avg.space_mean.at(0, 0, 0, 1) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("constant fields average to themselves") {
  MatrixField f = MatrixField::zeros(2, 3, 5);
  for (int jt = 0; jt < 3; ++jt)
    for (int k = 0; k < 5; ++k) {
      f.at(jt, k, 0, 0) = -0.4;
      f.at(jt, k, 0, 1) = 0.7;
      f.at(jt, k, 1, 0) = 0.2;
      f.at(jt, k, 1, 1) = 1.1;
    }
  AveragedMatrices avg = averaged_matrices(f);
  CHECK(avg.spacetime_mean.at(0, 1) == doctest::Approx(0.7));
  CHECK(avg.geo_time.at(0, 1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(avg.geo_space.at(1, 0, 1, 0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(avg.time_mean.at(0, 2, 1, 1) == doctest::Approx(1.1));
}

TEST_CASE("AM-GM ordering of the averaged off-diagonals") {
  Rng rng(17);
  MatrixField f = MatrixField::zeros(2, 4, 16);
  for (int jt = 0; jt < 4; ++jt)
    for (int k = 0; k < 16; ++k) {
      f.at(jt, k, 0, 0) = rng.uniform(-1, 1);
      f.at(jt, k, 1, 1) = rng.uniform(-1, 1);
      f.at(jt, k, 0, 1) = rng.uniform(0.2, 2.0);
      f.at(jt, k, 1, 0) = rng.uniform(0.2, 2.0);
    }
  AveragedMatrices avg = averaged_matrices(f);
  for (int jt = 0; jt < 4; ++jt) {
    CHECK(avg.geo_space.at(jt, 0, 0, 1) <= avg.space_mean.at(jt, 0, 0, 1) + 1e-12);
    CHECK(avg.geo_space.at(jt, 0, 1, 0) <= avg.space_mean.at(jt, 0, 1, 0) + 1e-12);
  }
}

TEST_CASE("decomposition checks") {
  const int N = 2, nt = 2, nx = 3;
  MutationDecomposition dec;
  dec.N = N;
  dec.nt = nt;
  dec.nx = nx;
  dec.r.assign(static_cast<size_t>(nt) * nx * N, 0.0);
  dec.mu.assign(static_cast<size_t>(nt) * nx * N, 0.0);
  dec.S = MatrixField::zeros(N, nt, nx);

  SUBCASE("pure growth with identity mutation") {
    MatrixField L = MatrixField::zeros(N, nt, nx);
    for (int jt = 0; jt < nt; ++jt)
      for (int k = 0; k < nx; ++k)
        for (int i = 0; i < N; ++i) {
          dec.r[(static_cast<size_t>(jt) * nx + k) * N + i] = 0.3 * i - 0.1;
          dec.S.at(jt, k, i, i) = 1.0;
          L.at(jt, k, i, i) = 0.3 * i - 0.1;
        }
    DecompositionCheck c = check_decomposition(dec, L);
    CHECK(c.valid);
    CHECK(c.max_deviation == 0.0);
  }

  SUBCASE("exchange mutation reproduces [[-1,1],[1,-1]]") {
    MatrixField L = MatrixField::zeros(N, nt, nx);
    for (int jt = 0; jt < nt; ++jt)
      for (int k = 0; k < nx; ++k) {
        for (int i = 0; i < N; ++i)
          dec.mu[(static_cast<size_t>(jt) * nx + k) * N + i] = 1.0;
        dec.S.at(jt, k, 0, 1) = 1.0;
        dec.S.at(jt, k, 1, 0) = 1.0;
        L.at(jt, k, 0, 0) = -1.0;
        L.at(jt, k, 0, 1) = 1.0;
        L.at(jt, k, 1, 0) = 1.0;
        L.at(jt, k, 1, 1) = -1.0;
      }
    DecompositionCheck c = check_decomposition(dec, L);
    CHECK(c.valid);
  }

  SUBCASE("a bad row sum is reported as the deviation") {
    MatrixField L = MatrixField::zeros(N, nt, nx);
    for (int jt = 0; jt < nt; ++jt)
      for (int k = 0; k < nx; ++k) {
        dec.S.at(jt, k, 0, 0) = 1.1;
        dec.S.at(jt, k, 1, 1) = 1.0;
        L.at(jt, k, 0, 0) = 0.0;
        L.at(jt, k, 1, 1) = 0.0;
      }
    DecompositionCheck c = check_decomposition(dec, L);
    CHECK_FALSE(c.valid);
    CHECK(c.max_deviation == doctest::Approx(0.1));
  }
}

TEST_CASE("reducible input takes the max over diagonal blocks") {
  // upper triangular blocks {0} and {1} with values 2 and 5
  SquareMatrix M = make(2, {2.0, 1.0, 0.0, 5.0});
  PFResult r = perron(M);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(r.residual <= 1e-9);
  CHECK(r.right[0] >= 0.0);
  CHECK(r.right[1] >= 0.0);
}

TEST_CASE("not essentially nonnegative input is refused") {
  try {
    perron(make(2, {0.0, -0.5, 1.0, 0.0}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_essentially_nonnegative);
  }
}

TEST_SUITE_END();
