#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "tvg/grid.hpp"
#include "tvg/rng.hpp"

namespace tvg {

/// Observation operator G mapping a field to m predictions.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  std::size_t output_size() const { return static_cast<std::size_t>(observation_points().size()); }
  /// Locations (denoising) or times (heat) at which G is observed.
  virtual const Vector& observation_points() const = 0;
  /// Deterministic and reentrant.
  virtual Vector apply(const Field& u) const = 0;
};

/// Point evaluation by linear interpolation.
class DenoisingModel final : public ForwardModel {
 public:
  DenoisingModel(Vector locations, Grid1D grid);

  const Vector& observation_points() const override { return locations_; }
  Vector apply(const Field& u) const override;

 private:
  Vector locations_;
  Grid1D grid_;
  std::vector<InterpStencil> stencils_;
};

std::unique_ptr<ForwardModel> denoising_model(const Vector& obs_locations, const Grid1D& grid);

/// Which sign the flux takes in the Robin condition at x = L.
enum class RobinSign {
  OutwardNormal,  // +u_x(L,t) + rho u(L,t) = h1
  AsPrinted,      // -u_x(L,t) + rho u(L,t) = h1
};

struct HeatRobinSetup {
  double space_len = 1.0;
  double time_len = 1.0;
  std::size_t nx = 101;
  std::size_t nt = 400;
  Field g{Grid1D(2, 0.0, 1.0)};  // initial temperature over [0, space_len]
  Vector h0;   // boundary data at x = 0 on the nt+1 solver time levels
  Vector h1;   // boundary data at x = L
  Vector obs_times;
  RobinSign sign = RobinSign::OutwardNormal;

  void validate() const;
};

/// Tabulates g on the solver space grid and h0/h1 on the solver time levels.
HeatRobinSetup tabulate_heat_setup(double space_len, double time_len, std::size_t nx,
                                   std::size_t nt, const std::function<double(double)>& g,
                                   const std::function<double(double)>& h0,
                                   const std::function<double(double)>& h1,
                                   Vector obs_times);

/// Thrown when the heat solver produces non-finite values.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// u_t = u_xx with Robin coefficient rho(t); observes u(L, t).
///
/// Crank-Nicolson in time, central differences in space, Robin rows closed with
/// ghost nodes. rho is interpolated from its own grid on [0, T] to the half-step
/// times t_k + dt/2; h0/h1 at the half step are averages of the tabulated levels.
/// Each step is one tridiagonal (Thomas) solve.
class HeatRobinModel final : public ForwardModel {
 public:
  explicit HeatRobinModel(HeatRobinSetup setup);

  const Vector& observation_points() const override { return setup_.obs_times; }
  Vector apply(const Field& rho) const override;

  /// u(L, t_k) for every solver time level k = 0..nt.
  Vector boundary_trace(const Field& rho) const;

  const HeatRobinSetup& setup() const { return setup_; }
  /// Number of apply() calls that saw min rho < 0.
  std::size_t negative_coefficient_count() const { return negative_rho_.load(); }

 private:
  HeatRobinSetup setup_;
  mutable std::atomic<std::size_t> negative_rho_{0};
};

std::unique_ptr<HeatRobinModel> heat_model(HeatRobinSetup setup);

/// y_j = G(truth)_j + noise_sd z_j.
ObservationSet generate_data(const ForwardModel& model, const Field& truth, double noise_sd,
                             Rng& rng);

// Synthetic truths. Nodes exactly on a jump take the left-limit value.

/// 0 on [0,1/3), 1 on [1/3,2/3), 0 on [2/3,1]; with the tie-break, 1 exactly on (1/3, 2/3].
double step_signal(double t);
/// Stand-in Robin coefficient: 1.5 on the middle third, 0.5 elsewhere.
double robin_standin(double t);

Field sample_function(const Grid1D& grid, const std::function<double(double)>& fn);

/// m equally spaced points on [a, b] including both ends.
Vector linspace(double a, double b, std::size_t m);

/// Setup with L = T = 1, g = x^2 + 1, h0 = t(2t+1), h1 = 2 + t(2t+2) and
/// m observation times k T / m, k = 1..m.
HeatRobinSetup default_heat_setup(std::size_t nx = 101, std::size_t nt = 400,
                                  std::size_t m = 100,
                                  RobinSign sign = RobinSign::OutwardNormal);

}  // namespace tvg
