// Writes the bundled verification configs (AC01..AC14). Re-run after editing
// and commit the outputs; the suite reads the JSON files, not this tool.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "coopeig/config.hpp"

using namespace coopeig;

namespace {

constexpr double kPi = 3.14159265358979323846;

void write(const std::string& dir, const std::string& name, const json& j) {
  std::ofstream out(dir + "/" + name + ".json");
  out << j.dump(2) << "\n";
  std::printf("wrote %s/%s.json\n", dir.c_str(), name.c_str());
}

json constant(double v) { return json{{"kind", "constant"}, {"value", v}}; }

json grid_desc(int nt, int nx, const std::vector<double>& vals) {
  json rows = json::array();
  for (int j = 0; j < nt; ++j) {
    json row = json::array();
    for (int k = 0; k < nx; ++k) row.push_back(vals[static_cast<size_t>(j) * nx + k]);
    rows.push_back(row);
  }
  return json{{"kind", "grid"}, {"values", rows}};
}

json cell(double T, double L, int nt, int nx) {
  return json{{"T", T}, {"L", L}, {"nt", nt}, {"nx", nx}};
}

// Advection counter-example: Q = d/dt - dxx + dx - (1/8)I - M with M the
// 2x2 Neumann discrete Laplacian; lambda_{1,z} = z(1-z) - 1/8.
json ac01() {
  json j;
  j["cell"] = cell(1.0, 1.0, 8, 128);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(1.0), constant(1.0)};
  j["coupling"] = {json::array({constant(0.125 - 1.0), constant(1.0)}),
                   json::array({constant(1.0), constant(0.125 - 1.0)})};
  return j;
}

// Block-diagonal pair d/dt - dxx and d/dt - dxx + 2 dx - 1 (reducible);
// the criterion couples it with eps * exchange.
json ac03() {
  // constant coefficients: the eigenfunctions are x-constant, so a minimal
  // spatial grid is exact and keeps the near-degenerate z-search cheap
  json j;
  j["cell"] = cell(1.0, 1.0, 8, 8);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(2.0)};
  j["coupling"] = {json::array({constant(0.0), constant(0.0)}),
                   json::array({constant(0.0), constant(1.0)})};
  j["reducible"] = true;
  return j;
}

// Smoothed two-phase coupling with separated off-diagonal supports: the
// space means stay exactly 1/2 (averaged matrix [[1,1/2],[1/2,1]]) while the
// pointwise matrices remain triangular, so the frozen-x eigenvalues are -1
// everywhere.
json ac04() {
  const int nx = 256, nt = 4;
  const double Lper = 2.0, gap = 0.2, ramp = 0.12;
  auto smoothstep = [](double u) { return u <= 0 ? 0.0 : u >= 1 ? 1.0 : u * u * (3 - 2 * u); };
  auto bump = [&](double x) {
    const double lo = gap, hi = Lper / 2 - gap;
    if (x <= lo || x >= hi) return 0.0;
    return smoothstep((x - lo) / ramp) * smoothstep((hi - x) / ramp);
  };
  std::vector<double> chi(nx), chis(nx);
  double mean = 0.0;
  for (int k = 0; k < nx; ++k) {
    chi[k] = bump(k * Lper / nx);
    mean += chi[k];
  }
  mean /= nx;
  for (int k = 0; k < nx; ++k) {
    chi[k] *= 0.5 / mean;
    chis[k] = chi[(k + nx / 2) % nx];
  }
  std::vector<double> rows12, rows21;
  for (int j = 0; j < nt; ++j) {
    rows12.insert(rows12.end(), chi.begin(), chi.end());
    rows21.insert(rows21.end(), chis.begin(), chis.end());
  }
  json j;
  j["cell"] = cell(1.0, Lper, nt, nx);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  j["coupling"] = {json::array({constant(1.0), grid_desc(nt, nx, rows12)}),
                   json::array({grid_desc(nt, nx, rows21), constant(1.0)})};
  return j;
}

// Constant nonsymmetric coupling [[1,1],[1/4,1]]: lambda' = -1.5 while the
// Rayleigh quotient of the symmetrized part is -1.625.
json ac05() {
  json j;
  j["cell"] = cell(1.0, 1.0, 8, 64);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  j["coupling"] = {json::array({constant(1.0), constant(1.0)}),
                   json::array({constant(0.25), constant(1.0)})};
  return j;
}

// Half-wave exchange system L(t) = [[0, eta(t)], [eta(t - T/2), 0]] with
// eta(t) = max(sin(2 pi t / T), 0), in ODE mode (nx = 1).
json ac06() {
  const double T = 2.0;
  const int nt = 1024;
  std::vector<double> eta(nt), eta_shift(nt);
  for (int j = 0; j < nt; ++j) {
    const double t = j * T / nt;
    eta[j] = std::max(std::sin(2 * kPi * t / T), 0.0);
    double ts = std::fmod(t - T / 2, T);
    if (ts < 0) ts += T;
    eta_shift[j] = std::max(std::sin(2 * kPi * ts / T), 0.0);
  }
  json j;
  j["cell"] = cell(T, 1.0, nt, 1);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  j["coupling"] = {json::array({constant(0.0), grid_desc(nt, 1, eta)}),
                   json::array({grid_desc(nt, 1, eta_shift), constant(0.0)})};
  return j;
}

// Half-wave exchange system over a long period; the slow-frequency value
// -(2 omega / T) ln(T / (pi omega)) needs T large to sit near its limit at
// omega = 1e-2.
json ac07b() {
  const double T = 20.0;
  const int nt = 1024;
  std::vector<double> eta(nt), eta_shift(nt);
  for (int j = 0; j < nt; ++j) {
    const double t = j * T / nt;
    eta[j] = std::max(std::sin(2 * kPi * t / T), 0.0);
    double ts = std::fmod(t - T / 2, T);
    if (ts < 0) ts += T;
    eta_shift[j] = std::max(std::sin(2 * kPi * ts / T), 0.0);
  }
  json j;
  j["cell"] = cell(T, 1.0, nt, 1);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  j["coupling"] = {json::array({constant(0.0), grid_desc(nt, 1, eta)}),
                   json::array({grid_desc(nt, 1, eta_shift), constant(0.0)})};
  return j;
}

// x-independent exchange family with constant Perron vector (ones):
// L(t) = [[r - m, m], [m, r - m]], r(t) and m(t) time-periodic.
json ac07() {
  json fourier_r = {{"kind", "fourier"},
                    {"terms", json::array({json{{"kt", 0}, {"kx", 0}, {"amplitude", 0.3}},
                                           json{{"kt", 1}, {"kx", 0}, {"amplitude", 0.2}}})}};
  json fourier_m = {{"kind", "fourier"},
                    {"terms", json::array({json{{"kt", 0}, {"kx", 0}, {"amplitude", 1.0}},
                                           json{{"kt", 1}, {"kx", 0}, {"tform", "sin"}, {"amplitude", 0.5}}})}};
  json diag = {{"kind", "fourier"},
               {"terms", json::array({json{{"kt", 0}, {"kx", 0}, {"amplitude", 0.3 - 1.0}},
                                      json{{"kt", 1}, {"kx", 0}, {"amplitude", 0.2}},
                                      json{{"kt", 1}, {"kx", 0}, {"tform", "sin"}, {"amplitude", -0.5}}})}};
  json j;
  j["cell"] = cell(1.0, 1.0, 32, 16);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  j["coupling"] = {json::array({diag, fourier_m}), json::array({fourier_m, diag})};
  return j;
}

// Constant irreducible doubly stochastic coupling.
json ac09() {
  json j;
  j["cell"] = cell(1.0, 1.0, 8, 32);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  j["coupling"] = {json::array({constant(0.3), constant(0.7)}),
                   json::array({constant(0.7), constant(0.3)})};
  return j;
}

// ODE-mode base cell for the mutation optimization benchmark; growth and
// mutation intensities come from the command/criterion.
json ac11() {
  // long phases make the cell-wise switching strategy strictly optimal
  json j;
  j["cell"] = cell(10.0, 1.0, 64, 1);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(1.0)};
  j["advection"] = {constant(0.0), constant(0.0)};
  // placeholder coupling; the optimizer rebuilds it from (r, mu, S)
  j["coupling"] = {json::array({constant(0.0), constant(1.0)}),
                   json::array({constant(1.0), constant(0.0)})};
  return j;
}

// Time-dependent smooth base operator for derivative checks.
json ac13() {
  auto fterm = [](int kt, int kx, const char* tf, const char* xf, double a) {
    return json{{"kt", kt}, {"kx", kx}, {"tform", tf}, {"xform", xf}, {"amplitude", a}};
  };
  json offdiag12 = {{"kind", "fourier"},
                    {"terms", json::array({fterm(0, 0, "cos", "cos", 0.8),
                                           fterm(0, 1, "cos", "cos", 0.25),
                                           fterm(1, 1, "sin", "sin", 0.2)})}};
  json offdiag21 = {{"kind", "fourier"},
                    {"terms", json::array({fterm(0, 0, "cos", "cos", 0.6),
                                           fterm(0, 1, "cos", "sin", -0.2),
                                           fterm(1, 0, "cos", "cos", 0.15)})}};
  json diag1 = {{"kind", "fourier"},
                {"terms", json::array({fterm(0, 0, "cos", "cos", 0.2),
                                       fterm(0, 1, "cos", "cos", 0.3),
                                       fterm(1, 0, "sin", "cos", 0.25)})}};
  json diag2 = {{"kind", "fourier"},
                {"terms", json::array({fterm(0, 0, "cos", "cos", -0.3),
                                       fterm(0, 2, "cos", "sin", 0.2),
                                       fterm(1, 1, "cos", "cos", 0.15)})}};
  json adv = {{"kind", "fourier"},
              {"terms", json::array({fterm(0, 0, "cos", "cos", 0.3),
                                     fterm(0, 1, "cos", "sin", 0.2)})}};
  json j;
  j["cell"] = cell(1.0, 1.0, 8, 64);
  j["species"] = 2;
  j["diffusion"] = {constant(1.0), constant(0.8)};
  j["advection"] = {adv, constant(0.0)};
  j["coupling"] = {json::array({diag1, offdiag12}), json::array({offdiag21, diag2})};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "configs";
  write(dir, "AC01", ac01());
  write(dir, "counterexample_advection", ac01());
  write(dir, "AC03", ac03());
  write(dir, "AC04", ac04());
  write(dir, "AC05", ac05());
  write(dir, "AC06", ac06());
  write(dir, "AC07", ac07());
  write(dir, "AC07b", ac07b());
  write(dir, "AC09", ac09());
  write(dir, "AC11", ac11());
  write(dir, "AC13", ac13());
  return 0;
}
