#pragma once

#include <cstdint>

#include "coopeig/matrixkit.hpp"
#include "coopeig/model.hpp"

namespace coopeig {

/// Deterministic uniform doubles in [lo, hi) from a raw 64-bit generator,
/// independent of the standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64();
  double uniform(double lo = 0.0, double hi = 1.0);
  int uniform_int(int lo, int hi);  // inclusive bounds

private:
  std::uint64_t state_;
};

/// Constant-coefficient spec with N species, positive diffusion, mild
/// advection and a random irreducible essentially nonnegative coupling.
SystemSpec random_constant_spec(std::uint64_t seed, int N, int nx = 32, int nt = 4);

struct SmoothSpecOptions {
  int N = 2;
  int nx = 128;
  int nt = 8;
  bool time_dependent = false;
  double coupling_scale = 1.0;
  double advection_scale = 0.5;
};

/// Smooth fourier-built spec: a_i bounded away from zero, nonnegative
/// off-diagonal coupling with positive minimum (irreducible).
SystemSpec random_smooth_spec(std::uint64_t seed, const SmoothSpecOptions& opts = {});

/// Random line-sum-symmetric heterogeneous spec (symmetric part + circulant
/// part + diagonal field), unit diffusion, no advection.
SystemSpec random_line_sum_symmetric_spec(std::uint64_t seed, int N = 3, int nx = 64, int nt = 8);

/// Spec plus matching decomposition with x-dependent growth rates r_i(x),
/// positive mutation intensities and a constant doubly stochastic S.
struct KarlinCase {
  SystemSpec spec;
  MutationDecomposition decomposition;
};
KarlinCase random_karlin_case(std::uint64_t seed, int N = 2, int nx = 64, bool zero_growth = false);

/// Constant-diffusion, advection-free spec with smooth positive coupling for
/// the rearrangement comparison.
SystemSpec random_rearrangement_spec(std::uint64_t seed, int N = 2, int nx = 64, int nt = 4);

/// Random smooth matrix-field direction for eigenvalue derivatives.
MatrixField random_direction_field(std::uint64_t seed, int N, int nt, int nx);

}  // namespace coopeig
