#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvg/forward.hpp"
#include "tvg/samplers.hpp"

namespace tvg::app {

/// Failure reported by the driver as `error: <category>: <message>`.
class AppError : public std::runtime_error {
 public:
  AppError(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

/// Flat `key = value` text, `#` starts a comment. Keys are case sensitive.
std::map<std::string, std::string> parse_key_values(std::istream& is);

enum class ProblemKind { Denoising, HeatRobin, TvDenoising };

ProblemKind parse_problem(const std::string& name);
std::string problem_name(ProblemKind p);

/// Fully resolved experiment settings.
///
/// Keys (defaults depend on `problem`):
///   problem       denoising | heat-robin | tv-denoising
///   n             grid nodes for the unknown (89, 200 for heat-robin)
///   gamma, d      reference covariance amplitude and length (0.1, 0.02)
///   lambda        TV weight (500, 300 for heat-robin)
///   sigma         noise sd (0.02, 0.01 for heat-robin)
///   n_obs         data points (23 locations on [0,1]; 100 times for heat-robin)
///   sampler       pcn | spcn | rw-tv (rw-tv for tv-denoising, else pcn)
///   beta, k       pCN step and S-pCN inner moves (0.003 denoising, 0.02 heat; 10)
///   step_sd       random-walk scale (tv_step_scale / n unless given)
///   tv_step_scale 0.015
///   n_samples, burn_in, thin   200000, 50000, 10
///   seed          1
///   init          zero | prior (prior for heat-robin)
///   probe_t       0.2,0.5,0.8
///   max_lag       1000
///   nx, nt        heat solver resolution (101, 400)
///   robin_sign    outward | as-printed
///   observations  data file for sample/gp-exact/mesh-study (observations.csv)
///   n_list        mesh-study grid sizes (89,177,353)
///   tv_compare    mesh-study also runs the pure TV prior (false)
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Denoising;
  std::size_t n = 89;
  double gamma = 0.1;
  double d = 0.02;
  double lambda = 500.0;
  double sigma = 0.02;
  std::size_t n_obs = 23;
  Kernel sampler = Kernel::Pcn;
  SamplerConfig chain;
  double tv_step_scale = 0.015;
  std::string init = "zero";
  std::vector<double> probe_t{0.2, 0.5, 0.8};
  std::size_t max_lag = 1000;
  std::size_t nx = 101;
  std::size_t nt = 400;
  RobinSign sign = RobinSign::OutwardNormal;
  std::string observations = "observations.csv";
  std::vector<std::size_t> n_list{89, 177, 353};
  bool tv_compare = false;

  /// Every key with its resolved value, sorted by key.
  std::map<std::string, std::string> echo() const;
};

/// Defaults for `problem`, overlaid by `values`; `seed` wins over both.
/// Throws AppError("config", ...) on unknown keys or out-of-range values.
ExperimentConfig resolve_config(const std::map<std::string, std::string>& values,
                                std::optional<std::uint64_t> seed = std::nullopt);

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed = std::nullopt);

void write_config(std::ostream& os, const ExperimentConfig& cfg);

}  // namespace tvg::app
