#include "tvg/forward.hpp"

#include <cmath>
#include <string>

#include "tvg/tridiagonal.hpp"

namespace tvg {

DenoisingModel::DenoisingModel(Vector locations, Grid1D grid)
    : locations_(std::move(locations)), grid_(grid) {
  stencils_.reserve(static_cast<std::size_t>(locations_.size()));
  for (Eigen::Index j = 0; j < locations_.size(); ++j) {
    stencils_.push_back(interp_stencil(grid_, locations_[j]));
  }
}

Vector DenoisingModel::apply(const Field& u) const {
  if (!(u.grid == grid_)) throw std::invalid_argument("denoising model: grid mismatch");
  Vector out(locations_.size());
  for (std::size_t j = 0; j < stencils_.size(); ++j) {
    const auto [left, w] = stencils_[j];
    const auto i = static_cast<Eigen::Index>(left);
    out[static_cast<Eigen::Index>(j)] =
        w == 0.0 ? u.values[i] : (1.0 - w) * u.values[i] + w * u.values[i + 1];
  }
  return out;
}

std::unique_ptr<ForwardModel> denoising_model(const Vector& obs_locations, const Grid1D& grid) {
  return std::make_unique<DenoisingModel>(obs_locations, grid);
}

void HeatRobinSetup::validate() const {
  if (!(space_len > 0.0) || !(time_len > 0.0)) {
    throw std::invalid_argument("heat setup: L and T must be positive");
  }
  if (nx < 3) throw std::invalid_argument("heat setup: nx must be at least 3");
  if (nt < 2) throw std::invalid_argument("heat setup: nt must be at least 2");
  if (g.grid.lower() != 0.0 || g.grid.upper() != space_len) {
    throw std::invalid_argument("heat setup: g must live on [0, L]");
  }
  const auto levels = static_cast<Eigen::Index>(nt + 1);
  if (h0.size() != levels || h1.size() != levels) {
    throw std::invalid_argument("heat setup: h0/h1 need nt+1 values");
  }
  if (!h0.allFinite() || !h1.allFinite()) {
    throw std::invalid_argument("heat setup: boundary data must be finite");
  }
  for (Eigen::Index j = 0; j < obs_times.size(); ++j) {
    if (obs_times[j] < 0.0 || obs_times[j] > time_len) {
      throw std::invalid_argument("heat setup: observation time outside [0, T]");
    }
    if (j > 0 && !(obs_times[j] > obs_times[j - 1])) {
      throw std::invalid_argument("heat setup: observation times must increase");
    }
  }
}

HeatRobinSetup tabulate_heat_setup(double space_len, double time_len, std::size_t nx,
                                   std::size_t nt, const std::function<double(double)>& g,
                                   const std::function<double(double)>& h0,
                                   const std::function<double(double)>& h1,
                                   Vector obs_times) {
  HeatRobinSetup s;
  s.space_len = space_len;
  s.time_len = time_len;
  s.nx = nx;
  s.nt = nt;
  s.g = sample_function(Grid1D(nx, 0.0, space_len), g);
  const Grid1D levels(nt + 1, 0.0, time_len);
  s.h0 = sample_function(levels, h0).values;
  s.h1 = sample_function(levels, h1).values;
  s.obs_times = std::move(obs_times);
  s.validate();
  return s;
}

HeatRobinModel::HeatRobinModel(HeatRobinSetup setup) : setup_(std::move(setup)) {
  setup_.validate();
  const Grid1D space(setup_.nx, 0.0, setup_.space_len);
  if (!(setup_.g.grid == space)) setup_.g = regrid(setup_.g, space);
}

Vector HeatRobinModel::boundary_trace(const Field& rho) const {
  if (rho.grid.lower() != 0.0 || rho.grid.upper() != setup_.time_len) {
    throw std::invalid_argument("heat model: rho must live on [0, T]");
  }
  if (rho.values.minCoeff() < 0.0) negative_rho_.fetch_add(1, std::memory_order_relaxed);

  const std::size_t n = setup_.nx;
  const std::size_t last = n - 1;
  const double dx = setup_.space_len / static_cast<double>(last);
  const double dt = setup_.time_len / static_cast<double>(setup_.nt);
  const double r = dt / (dx * dx);
  const double s = setup_.sign == RobinSign::OutwardNormal ? 1.0 : -1.0;

  std::vector<double> u(setup_.g.values.data(), setup_.g.values.data() + n);
  std::vector<double> lower(n), diag(n), upper(n), rhs(n), scratch(n);

  // Interior rows never change.
  for (std::size_t i = 1; i < last; ++i) {
    lower[i] = -0.5 * r;
    diag[i] = 1.0 + r;
    upper[i] = -0.5 * r;
  }
  lower[0] = 0.0;
  upper[0] = -r;
  lower[last] = -r;
  upper[last] = 0.0;

  Vector trace(static_cast<Eigen::Index>(setup_.nt + 1));
  trace[0] = u[last];
  for (std::size_t k = 0; k < setup_.nt; ++k) {
    const double t_half = (static_cast<double>(k) + 0.5) * dt;
    const double rho_half = eval_at(rho, std::min(t_half, setup_.time_len));
    const auto kk = static_cast<Eigen::Index>(k);
    const double h0_half = 0.5 * (setup_.h0[kk] + setup_.h0[kk + 1]);
    const double h1_half = 0.5 * (setup_.h1[kk] + setup_.h1[kk + 1]);

    // Boundary rows of A: u_xx with the ghost node eliminated.
    //   x=0: (2u_1 - 2u_0 - 2dx rho u_0 + 2dx h0) / dx^2
    //   x=L: (2u_{N-1} - 2u_N - s 2dx rho u_N + s 2dx h1) / dx^2
    const double a0 = -2.0 - 2.0 * dx * rho_half;
    const double aL = -2.0 - s * 2.0 * dx * rho_half;
    diag[0] = 1.0 - 0.5 * r * a0;
    diag[last] = 1.0 - 0.5 * r * aL;

    rhs[0] = (1.0 + 0.5 * r * a0) * u[0] + r * u[1] + 2.0 * r * dx * h0_half;
    for (std::size_t i = 1; i < last; ++i) {
      rhs[i] = (1.0 - r) * u[i] + 0.5 * r * (u[i - 1] + u[i + 1]);
    }
    rhs[last] = (1.0 + 0.5 * r * aL) * u[last] + r * u[last - 1] + s * 2.0 * r * dx * h1_half;

    solve_tridiagonal(lower, diag, upper, rhs, scratch);
    u.swap(rhs);
    if (!std::isfinite(u[0]) || !std::isfinite(u[last]) || !std::isfinite(u[last / 2])) {
      throw SolverError("heat solver produced non-finite values at time step " +
                            std::to_string(k + 1),
                        k + 1);
    }
    trace[kk + 1] = u[last];
  }
  return trace;
}

Vector HeatRobinModel::apply(const Field& rho) const {
  const Vector trace = boundary_trace(rho);
  const Field trace_field(Grid1D(setup_.nt + 1, 0.0, setup_.time_len), trace);
  Vector out(setup_.obs_times.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = eval_at(trace_field, setup_.obs_times[j]);
  return out;
}

std::unique_ptr<HeatRobinModel> heat_model(HeatRobinSetup setup) {
  return std::make_unique<HeatRobinModel>(std::move(setup));
}

ObservationSet generate_data(const ForwardModel& model, const Field& truth, double noise_sd,
                             Rng& rng) {
  if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
  Vector y = model.apply(truth);
  for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += noise_sd * rng.normal();
  return ObservationSet(model.observation_points(), std::move(y), noise_sd);
}

double step_signal(double t) { return (t > 1.0 / 3.0 && t <= 2.0 / 3.0) ? 1.0 : 0.0; }

double robin_standin(double t) { return (t > 1.0 / 3.0 && t <= 2.0 / 3.0) ? 1.5 : 0.5; }

Field sample_function(const Grid1D& grid, const std::function<double(double)>& fn) {
  Vector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = fn(grid.point(i));
  return Field(grid, std::move(v));
}

Vector linspace(double a, double b, std::size_t m) {
  if (m == 1) return Vector::Constant(1, a);
  return Grid1D(m, a, b).points();
}

HeatRobinSetup default_heat_setup(std::size_t nx, std::size_t nt, std::size_t m,
                                  RobinSign sign) {
  Vector times(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    times[static_cast<Eigen::Index>(j)] = static_cast<double>(j + 1) / static_cast<double>(m);
  }
  auto setup = tabulate_heat_setup(
      1.0, 1.0, nx, nt, [](double x) { return x * x + 1.0; },
      [](double t) { return t * (2.0 * t + 1.0); },
      [](double t) { return 2.0 + t * (2.0 * t + 2.0); }, std::move(times));
  setup.sign = sign;
  return setup;
}

}  // namespace tvg
