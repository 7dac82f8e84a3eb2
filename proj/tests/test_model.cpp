#include <doctest.h>

#include <algorithm>

#include "coopeig/corpus.hpp"
#include "coopeig/model.hpp"
#include "helpers.hpp"

using namespace coopeig;

TEST_SUITE_BEGIN("model");

TEST_CASE("constant descriptor samples uniformly") {
  PeriodicCell cell{1.0, 1.0, 4, 8};
  ScalarFieldSamples s = sample(CoefficientDescriptor::constant(3.5), cell);
  CHECK(s.min() == 3.5);
  CHECK(s.max() == 3.5);
}

TEST_CASE("fourier term evaluates the trigonometric sum at nodes") {
  PeriodicCell cell{1.0, 1.0, 4, 8};
  auto d = CoefficientDescriptor::fourier({{0, 1, false, false, 2.0}});
  ScalarFieldSamples s = sample(d, cell);
  CHECK(s.at(0, 0) == doctest::Approx(2.0));                 // cos(0) = 1
  CHECK(s.at(2, 2) == doctest::Approx(0.0).epsilon(1e-12));  // cos(pi/2)
}

TEST_CASE("piecewise uses half-open intervals") {
  PeriodicCell cell{1.0, 1.0, 4, 4};
  auto d = CoefficientDescriptor::piecewise({{0.0, 1.0, 0.0, 0.5, 1.0}, {0.0, 1.0, 0.5, 1.0, 0.0}});
  ScalarFieldSamples s = sample(d, cell);
  CHECK(s.at(0, 0) == 1.0);
  CHECK(s.at(0, 1) == 1.0);
  CHECK(s.at(0, 2) == 0.0);
  CHECK(s.at(0, 3) == 0.0);
}

TEST_CASE("fourier sampling round-trips through the DFT below Nyquist") {
  PeriodicCell cell{1.0, 1.0, 4, 32};
  auto d = CoefficientDescriptor::fourier({{0, 0, false, false, 0.7},
                                           {0, 1, false, false, 1.25},
                                           {0, 3, false, true, -0.6}});
  ScalarFieldSamples s = sample(d, cell);
  std::vector<double> row(s.values.begin(), s.values.begin() + 32);
  CHECK(testutil::dft_coefficient(row, 0).real() == doctest::Approx(0.7).epsilon(1e-12));
  // cos amplitude a contributes a/2 to harmonic +-k; sin contributes -a/2 i
  CHECK(testutil::dft_coefficient(row, 1).real() == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(testutil::dft_coefficient(row, 3).imag() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("validation accepts the advection counter-example") {
  ValidationReport r = validate_system(testutil::counterexample_spec(16, 4));
  CHECK(r.valid);
  CHECK(r.irreducible);
  CHECK(r.ellipticity_margin == doctest::Approx(1.0));
}

TEST_CASE("degenerate diffusion is rejected") {
  SystemSpec s = testutil::scalar_spec(0.0, 0.0);
  try {
    validate_system(s);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ellipticity_violation);
  }
}

TEST_CASE("negative off-diagonal coupling is rejected") {
  SystemSpec s = testutil::counterexample_spec(8, 4);
  s.coupling[1] = CoefficientDescriptor::constant(-0.5);
  try {
    validate_system(s);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cooperativity_violation);
  }
}

TEST_CASE("1x1 systems are irreducible by convention, even if zero") {
  SystemSpec s = testutil::scalar_spec(1.0, 0.0, 0.0);
  ValidationReport r = validate_system(s);
  CHECK(r.valid);
  CHECK(r.irreducible);
}

TEST_CASE("block decomposition: coupled and decoupled pairs") {
  SystemSpec coupled = testutil::counterexample_spec(8, 4);
  CHECK(block_decompose(coupled).block_count() == 1);

  SystemSpec decoupled = coupled;
  decoupled.coupling[1] = CoefficientDescriptor::constant(0.0);
  decoupled.coupling[2] = CoefficientDescriptor::constant(0.0);
  BlockStructure b = block_decompose(decoupled);
  CHECK(b.block_count() == 2);
  CHECK(b.block_species(0).size() == 1);
  CHECK(b.block_species(1).size() == 1);
}

TEST_CASE("block decomposition matches the reachability closure oracle") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Rng rng(seed);
    const int n = 4;
    std::vector<double> M(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng.uniform() < 0.35) M[i * n + j] = rng.uniform(0.1, 1.0);

    BlockStructure b = block_decompose(M, n);

    // partition: disjoint cover of [N]
    std::vector<int> seen(n, 0);
    for (int blk = 0; blk < b.block_count(); ++blk)
      for (int q : b.block_species(blk)) seen[q]++;
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

    // same block iff mutually reachable
    std::vector<bool> reach = testutil::reachability_closure(M, n);
    std::vector<int> block_of(n, -1);
    for (int blk = 0; blk < b.block_count(); ++blk)
      for (int q : b.block_species(blk)) block_of[q] = blk;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool same = block_of[i] == block_of[j];
        const bool mutual = reach[i * n + j] && reach[j * n + i];
        CHECK(same == mutual);
      }

    // block upper triangular after permutation: block(i) <= block(j) whenever
    // entry (i, j) is positive
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (M[i * n + j] > 0) CHECK(block_of[i] <= block_of[j]);
  }
}

TEST_CASE("relabeling species permutes blocks consistently") {
  Rng rng(99);
  const int n = 5;
  std::vector<double> M(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rng.uniform() < 0.3) M[i * n + j] = 1.0;
  BlockStructure base = block_decompose(M, n);

  const int perm[5] = {3, 0, 4, 1, 2};
  std::vector<double> P(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P[perm[i] * n + perm[j]] = M[i * n + j];
  BlockStructure permuted = block_decompose(P, n);

  std::vector<size_t> sizes_a, sizes_b;
  for (int b = 0; b < base.block_count(); ++b) sizes_a.push_back(base.block_species(b).size());
  for (int b = 0; b < permuted.block_count(); ++b) sizes_b.push_back(permuted.block_species(b).size());
  std::sort(sizes_a.begin(), sizes_a.end());
  std::sort(sizes_b.begin(), sizes_b.end());
  CHECK(sizes_a == sizes_b);
}

TEST_SUITE_END();
