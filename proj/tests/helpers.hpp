#pragma once

// Shared spec builders and independent oracles for the test suites. The
// oracles deliberately avoid the library's own code paths: dense complex
// arithmetic, scaling-and-squaring exponentials, RK4 integration, DFT and
// reachability closures are all written out here.

#include <cmath>
#include <complex>
#include <vector>

#include "coopeig/model.hpp"

namespace testutil {

using coopeig::CoefficientDescriptor;
using coopeig::PeriodicCell;
using coopeig::SystemSpec;

constexpr double kPi = 3.14159265358979323846;

/// Q = d/dt - dxx + dx - (1/8) I - M with M the 2x2 Neumann discrete
/// Laplacian; lambda_{1,z} = z (1 - z) - 1/8.
inline SystemSpec counterexample_spec(int nx = 128, int nt = 8) {
  SystemSpec s;
  s.N = 2;
  s.cell = {1.0, 1.0, nt, nx};
  auto one = CoefficientDescriptor::constant(1.0);
  s.diffusion = {one, one};
  s.advection = {one, one};
  s.coupling = {CoefficientDescriptor::constant(0.125 - 1.0), one, one,
                CoefficientDescriptor::constant(0.125 - 1.0)};
  return s;
}

/// L(t) = [[0, eta(t)], [eta(t - T/2), 0]] with eta(t) = max(sin(2 pi t/T), 0)
/// in ODE mode.
inline SystemSpec exchange_eta_spec(double T = 2.0, int nt = 256) {
  SystemSpec s;
  s.N = 2;
  s.cell = {T, 1.0, nt, 1};
  auto one = CoefficientDescriptor::constant(1.0);
  auto zero = CoefficientDescriptor::constant(0.0);
  s.diffusion = {one, one};
  s.advection = {zero, zero};
  std::vector<double> eta(nt), eta_shift(nt);
  for (int j = 0; j < nt; ++j) {
    const double t = j * T / nt;
    eta[j] = std::max(std::sin(2 * kPi * t / T), 0.0);
    double ts = std::fmod(t - T / 2, T);
    if (ts < 0) ts += T;
    eta_shift[j] = std::max(std::sin(2 * kPi * ts / T), 0.0);
  }
  s.coupling = {zero, CoefficientDescriptor::grid(nt, 1, eta),
                CoefficientDescriptor::grid(nt, 1, eta_shift), zero};
  return s;
}

/// N = 1 spec with constant diffusion/advection and zero coupling.
inline SystemSpec scalar_spec(double a, double q, double l = 0.0, int nx = 64, int nt = 8) {
  SystemSpec s;
  s.N = 1;
  s.cell = {1.0, 1.0, nt, nx};
  s.diffusion = {CoefficientDescriptor::constant(a)};
  s.advection = {CoefficientDescriptor::constant(q)};
  s.coupling = {CoefficientDescriptor::constant(l)};
  return s;
}

// -- oracles --

/// Dense complex matrix exponential by scaling and squaring with a Taylor
/// core (matrices here are tiny).
inline std::vector<std::complex<double>> expm(std::vector<std::complex<double>> A, int n) {
  using C = std::complex<double>;
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(A[i * n + j]);
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& a : A) a *= scale;

  auto matmul = [n](const std::vector<C>& X, const std::vector<C>& Y) {
    std::vector<C> Z(static_cast<size_t>(n) * n, C(0));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const C x = X[i * n + k];
        if (x == C(0)) continue;
        for (int j = 0; j < n; ++j) Z[i * n + j] += x * Y[k * n + j];
      }
    return Z;
  };

  std::vector<C> result(static_cast<size_t>(n) * n, C(0));
  for (int i = 0; i < n; ++i) result[i * n + i] = C(1);
  std::vector<C> term = result;
  for (int k = 1; k <= 20; ++k) {
    term = matmul(term, A);
    for (auto& t : term) t /= static_cast<double>(k);
    for (size_t e = 0; e < result.size(); ++e) result[e] += term[e];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

/// Classical RK4 for u' = L(t) u with L given by a callback.
template <typename MatFn>
std::vector<double> rk4_linear(const MatFn& L_at, std::vector<double> u, int n, double t0,
                               double t1, int steps) {
  const double h = (t1 - t0) / steps;
  auto apply = [&](double t, const std::vector<double>& v) {
    std::vector<double> out(n, 0.0);
    std::vector<double> M = L_at(t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i] += M[i * n + j] * v[j];
    return out;
  };
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    std::vector<double> k1 = apply(t, u);
    std::vector<double> v2(n), v3(n), v4(n);
    for (int i = 0; i < n; ++i) v2[i] = u[i] + 0.5 * h * k1[i];
    std::vector<double> k2 = apply(t + 0.5 * h, v2);
    for (int i = 0; i < n; ++i) v3[i] = u[i] + 0.5 * h * k2[i];
    std::vector<double> k3 = apply(t + 0.5 * h, v3);
    for (int i = 0; i < n; ++i) v4[i] = u[i] + h * k3[i];
    std::vector<double> k4 = apply(t + h, v4);
    for (int i = 0; i < n; ++i) u[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return u;
}

/// Brute-force transitive closure: reach[i][j] = path j -> i through edges
/// j -> i whenever M[i][j] > 0.
inline std::vector<bool> reachability_closure(const std::vector<double>& M, int n) {
  std::vector<bool> reach(static_cast<size_t>(n) * n, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i * n + j] = i == j || M[i * n + j] > 1e-12;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i * n + k] && reach[k * n + j]) reach[i * n + j] = true;
  return reach;
}

/// Plain DFT coefficient of samples at integer harmonic k (space direction).
inline std::complex<double> dft_coefficient(const std::vector<double>& samples, int harmonic) {
  const int n = static_cast<int>(samples.size());
  std::complex<double> acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const double phase = -2.0 * kPi * harmonic * j / n;
    acc += samples[j] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<double>(n);
}

}  // namespace testutil
