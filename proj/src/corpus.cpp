#include "coopeig/corpus.hpp"

#include <cmath>

namespace coopeig {

std::uint64_t Rng::next_u64() {
  // splitmix64; stable across platforms
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

SystemSpec random_constant_spec(std::uint64_t seed, int N, int nx, int nt) {
  Rng rng(seed);
  SystemSpec s;
  s.N = N;
  s.cell = {1.0, 1.0, nt, nx};
  for (int i = 0; i < N; ++i) {
    s.diffusion.push_back(CoefficientDescriptor::constant(rng.uniform(0.5, 2.0)));
    s.advection.push_back(CoefficientDescriptor::constant(rng.uniform(-1.0, 1.0)));
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double v = i == j ? rng.uniform(-1.0, 1.0) : rng.uniform(0.05, 1.0);
      s.coupling.push_back(CoefficientDescriptor::constant(v));
    }
  return s;
}

namespace {

/// base plus harmonics whose amplitudes sum to at most `budget`, so the field
/// stays within [base - budget, base + budget].
CoefficientDescriptor smooth_field(Rng& rng, double base, double budget, bool time_dependent) {
  std::vector<FourierTerm> terms;
  terms.push_back({0, 0, false, false, base});
  terms.push_back({0, 1, false, false, 0.35 * budget * rng.uniform(-1.0, 1.0)});
  terms.push_back({0, 1, false, true, 0.30 * budget * rng.uniform(-1.0, 1.0)});
  terms.push_back({0, 2, false, true, 0.15 * budget * rng.uniform(-1.0, 1.0)});
  if (time_dependent) {
    terms.push_back({1, 0, false, false, 0.12 * budget * rng.uniform(-1.0, 1.0)});
    terms.push_back({1, 1, true, false, 0.08 * budget * rng.uniform(-1.0, 1.0)});
  }
  return CoefficientDescriptor::fourier(std::move(terms));
}

}  // namespace

SystemSpec random_smooth_spec(std::uint64_t seed, const SmoothSpecOptions& opts) {
  Rng rng(seed);
  SystemSpec s;
  s.N = opts.N;
  s.cell = {1.0, 1.0, opts.nt, opts.nx};
  for (int i = 0; i < opts.N; ++i) {
    // wiggle amplitudes below 40% of the base keep the samples positive
    s.diffusion.push_back(smooth_field(rng, rng.uniform(0.8, 1.5), 0.5, opts.time_dependent));
    s.advection.push_back(
        smooth_field(rng, opts.advection_scale * rng.uniform(-0.5, 0.5), 0.3 * opts.advection_scale,
                     opts.time_dependent));
  }
  for (int i = 0; i < opts.N; ++i)
    for (int j = 0; j < opts.N; ++j) {
      if (i == j) {
        s.coupling.push_back(smooth_field(rng, opts.coupling_scale * rng.uniform(-0.8, 0.8),
                                          0.4 * opts.coupling_scale, opts.time_dependent));
      } else {
        const double base = opts.coupling_scale * rng.uniform(0.4, 1.0);
        s.coupling.push_back(smooth_field(rng, base, 0.8 * base, opts.time_dependent));
      }
    }
  return s;
}

SystemSpec random_line_sum_symmetric_spec(std::uint64_t seed, int N, int nx, int nt) {
  Rng rng(seed);
  const PeriodicCell cell{1.0, 1.0, nt, nx};

  // symmetric nonnegative part + cyclic permutation part + diagonal part:
  // row sums equal column sums at every sample
  std::vector<ScalarFieldSamples> sym(static_cast<size_t>(N) * N);
  auto sample_smooth = [&](double base, double wiggle) {
    CoefficientDescriptor d = smooth_field(rng, base, wiggle, true);
    return sample(d, cell);
  };
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      if (i == j) continue;
      const double base = rng.uniform(0.3, 0.8);
      sym[static_cast<size_t>(i) * N + j] = sample_smooth(base, 0.8 * base);
      sym[static_cast<size_t>(j) * N + i] = sym[static_cast<size_t>(i) * N + j];
    }
  const double cyc_base = rng.uniform(0.2, 0.6);
  ScalarFieldSamples cyc = sample_smooth(cyc_base, 0.8 * cyc_base);
  std::vector<ScalarFieldSamples> diag(N);
  for (int i = 0; i < N; ++i) diag[i] = sample_smooth(rng.uniform(-0.5, 0.5), 0.4);

  SystemSpec s;
  s.N = N;
  s.cell = cell;
  for (int i = 0; i < N; ++i) {
    s.diffusion.push_back(CoefficientDescriptor::constant(1.0));
    s.advection.push_back(CoefficientDescriptor::constant(0.0));
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      std::vector<double> vals(static_cast<size_t>(nt) * nx, 0.0);
      for (int jt = 0; jt < nt; ++jt)
        for (int k = 0; k < nx; ++k) {
          double v = 0.0;
          if (i != j) v += sym[static_cast<size_t>(i) * N + j].at(jt, k);
          if (j == (i + 1) % N && N > 1) v += cyc.at(jt, k);
          if (i == j) v += diag[i].at(jt, k);
          vals[static_cast<size_t>(jt) * nx + k] = v;
        }
      s.coupling.push_back(CoefficientDescriptor::grid(nt, nx, std::move(vals)));
    }
  return s;
}

KarlinCase random_karlin_case(std::uint64_t seed, int N, int nx, bool zero_growth) {
  Rng rng(seed);
  KarlinCase out;
  SystemSpec& s = out.spec;
  s.N = N;
  s.cell = {1.0, 1.0, 4, nx};
  for (int i = 0; i < N; ++i) {
    s.diffusion.push_back(CoefficientDescriptor::constant(rng.uniform(0.5, 1.5)));
    s.advection.push_back(CoefficientDescriptor::constant(0.0));
  }

  // x-dependent growth rates, positive mutation intensities, constant
  // doubly stochastic S = (1 - w) I + w * cycle
  const double w = rng.uniform(0.3, 0.9);
  std::vector<ScalarFieldSamples> r(N), mu(N);
  for (int i = 0; i < N; ++i) {
    CoefficientDescriptor rd =
        zero_growth ? CoefficientDescriptor::constant(0.0)
                    : smooth_field(rng, rng.uniform(-0.3, 0.3), 0.6, false);
    r[i] = sample(rd, s.cell);
    mu[i] = sample(CoefficientDescriptor::constant(rng.uniform(0.4, 1.2)), s.cell);
  }

  MutationDecomposition dec;
  dec.N = N;
  dec.nt = s.cell.nt;
  dec.nx = nx;
  dec.r.resize(static_cast<size_t>(dec.nt) * nx * N);
  dec.mu.resize(static_cast<size_t>(dec.nt) * nx * N);
  dec.S = MatrixField::zeros(N, dec.nt, nx);
  for (int jt = 0; jt < dec.nt; ++jt)
    for (int k = 0; k < nx; ++k)
      for (int i = 0; i < N; ++i) {
        dec.r[(static_cast<size_t>(jt) * nx + k) * N + i] = r[i].at(jt, k);
        dec.mu[(static_cast<size_t>(jt) * nx + k) * N + i] = mu[i].at(jt, k);
        dec.S.at(jt, k, i, i) = 1.0 - w;
        dec.S.at(jt, k, (i + 1) % N, i) += w;
      }

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      std::vector<double> vals(static_cast<size_t>(dec.nt) * nx);
      for (int jt = 0; jt < dec.nt; ++jt)
        for (int k = 0; k < nx; ++k)
          vals[static_cast<size_t>(jt) * nx + k] =
              (i == j ? r[i].at(jt, k) - mu[j].at(jt, k) : 0.0) +
              dec.S.at(jt, k, i, j) * mu[j].at(jt, k);
      s.coupling.push_back(CoefficientDescriptor::grid(dec.nt, nx, std::move(vals)));
    }
  if (N == 1 || w == 0.0) s.reducible_flag = true;
  out.decomposition = std::move(dec);
  return out;
}

SystemSpec random_rearrangement_spec(std::uint64_t seed, int N, int nx, int nt) {
  Rng rng(seed);
  SystemSpec s;
  s.N = N;
  s.cell = {1.0, 1.0, nt, nx};
  for (int i = 0; i < N; ++i) {
    s.diffusion.push_back(CoefficientDescriptor::constant(rng.uniform(0.5, 2.0)));
    s.advection.push_back(CoefficientDescriptor::constant(0.0));
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double base = i == j ? rng.uniform(-0.5, 0.5) : rng.uniform(0.5, 1.0);
      const double budget = i == j ? 0.6 : 0.8 * base;
      s.coupling.push_back(smooth_field(rng, base, budget, false));
    }
  return s;
}

MatrixField random_direction_field(std::uint64_t seed, int N, int nt, int nx) {
  Rng rng(seed);
  const PeriodicCell cell{1.0, 1.0, nt, nx};
  MatrixField f = MatrixField::zeros(N, nt, nx);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      CoefficientDescriptor d = smooth_field(rng, rng.uniform(-1.0, 1.0), 0.5, true);
      ScalarFieldSamples s = sample(d, cell);
      for (int jt = 0; jt < nt; ++jt)
        for (int k = 0; k < nx; ++k) f.at(jt, k, i, j) = s.at(jt, k);
    }
  return f;
}

}  // namespace coopeig
