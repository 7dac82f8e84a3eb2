#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "coopeig/matrixkit.hpp"
#include "coopeig/model.hpp"

namespace coopeig {

/// Species-major samples of a state over the spatial grid.
struct StateVector {
  int N = 0;
  int nx = 0;
  std::vector<double> values;  // [i*nx + k]

  static StateVector ones(int N, int nx);
  static StateVector zeros(int N, int nx);
  double& at(int i, int k) { return values[static_cast<size_t>(i) * nx + k]; }
  double at(int i, int k) const { return values[static_cast<size_t>(i) * nx + k]; }
  double max_abs() const;
  double sum() const;
};

struct AssembleOptions {
  int substeps = 512;                    // raised automatically when too coarse
  std::optional<double> shift_override;  // fixed positivity shift instead of the default
};

/// One-period evolution map of d/dt u = (E_t + L_t + cI) u by implicit Euler.
/// Immutable after assembly; applications are const and thread-safe.
class MonodromyContext {
public:
  /// Spatially periodic operator on the cell, tilted by z.
  static MonodromyContext assemble(const SystemSpec& spec, double z, const AssembleOptions& opts = {});

  /// Same operator on [-R, R] periods with zero boundary values, untilted.
  static MonodromyContext assemble_dirichlet(const SystemSpec& spec, int radius_periods,
                                             const AssembleOptions& opts = {});

  StateVector apply(const StateVector& u0) const;
  /// Transpose of the discrete one-period map (left action).
  StateVector apply_adjoint(const StateVector& v0) const;
  /// As apply(), also recording the state after every substep (1..M).
  StateVector apply_tracking(const StateVector& u0, std::vector<StateVector>& snapshots) const;
  StateVector apply_adjoint_tracking(const StateVector& v0, std::vector<StateVector>& snapshots) const;

  int species() const { return N_; }
  int nodes() const { return K_; }
  int substeps() const { return M_; }
  double shift() const { return c_; }
  double period() const { return T_; }
  double dt() const { return T_ / M_; }
  bool time_independent() const { return time_independent_; }
  bool peclet_ok() const { return peclet_ok_; }
  bool dirichlet() const { return dirichlet_; }

  /// Coupling matrix at substep midpoint m and node k (used by derivatives).
  double coupling_at(int m, int k, int i, int j) const;

  /// Interpolates a node-sampled matrix field to the midpoint of substep m,
  /// matching the coefficient treatment of the assembly (periodic contexts).
  std::vector<double> midpoint_matrix_field(const MatrixField& field, int m) const;

  ~MonodromyContext();
  MonodromyContext(MonodromyContext&&) noexcept;
  MonodromyContext& operator=(MonodromyContext&&) noexcept;
  MonodromyContext(const MonodromyContext&) = delete;
  MonodromyContext& operator=(const MonodromyContext&) = delete;

private:
  MonodromyContext();
  void build(const SystemSpec& spec, double z, const AssembleOptions& opts, int K, bool periodic,
             int radius);
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int N_ = 0, K_ = 0, M_ = 0, nt_ = 0;
  double T_ = 0, c_ = 0;
  bool time_independent_ = false;
  bool peclet_ok_ = true;
  bool dirichlet_ = false;
};

}  // namespace coopeig
