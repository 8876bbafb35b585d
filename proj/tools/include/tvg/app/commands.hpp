#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tvg/app/config.hpp"
#include "tvg/diagnostics.hpp"
#include "tvg/forward.hpp"
#include "tvg/samplers.hpp"

namespace tvg::app {

namespace fs = std::filesystem;

/// Grid of n nodes on [0, 1], the domain of the unknown in every problem.
Grid1D unknown_grid(std::size_t n);

/// Nodes nearest to each probe location.
std::vector<std::size_t> probe_nodes(const Grid1D& grid, const std::vector<double>& probe_t);

std::shared_ptr<const ForwardModel> make_model(const ExperimentConfig& cfg, const Grid1D& grid);

struct SyntheticData {
  Field truth;
  ObservationSet obs;
};

/// Step signal observed at n_obs equally spaced locations (denoising), or the
/// stand-in Robin coefficient pushed through the heat solver (heat-robin).
/// Denoising data come from the signal itself, so they do not depend on n.
SyntheticData make_synthetic_data(const ExperimentConfig& cfg);

/// Throws AppError("data", ...) when the observations do not fit the config.
void check_observations(const ExperimentConfig& cfg, const ObservationSet& obs);

/// Prior factor (except tv-denoising) and target on an n-node grid.
Problem make_problem(const ExperimentConfig& cfg, const ObservationSet& obs, std::size_t n);

/// Runs cfg.sampler on an n-node grid with probe nodes from cfg.probe_t.
/// init=prior draws the start from the reference measure on a stream seeded
/// with seed + 1.
ChainOutput run_sampler(const ExperimentConfig& cfg, const ObservationSet& obs, std::size_t n);

struct MeshArm {
  std::vector<Field> means;       // regridded to the finest grid
  std::vector<double> accept_rate;
  Matrix sup_diff;                // pairwise sup-norm differences
  double max_sup_diff = 0.0;
};

struct MeshStudy {
  Grid1D fine;
  std::vector<std::size_t> n_list;
  MeshArm tg;
  std::optional<MeshArm> tv;  // pure TV prior, random walk with step tv_step_scale / N
};

/// Same inference at each N with seed + N. Needs problem=denoising and >= 2 sizes.
MeshStudy run_mesh_study(const ExperimentConfig& cfg, const ObservationSet& obs);

// Subcommands. Each writes config.txt (the resolved config) into `out`.
// Relative observation paths are resolved against `out`.
void cmd_generate(const ExperimentConfig& cfg, const fs::path& out);
void cmd_sample(const ExperimentConfig& cfg, const fs::path& out);
void cmd_gp_exact(const ExperimentConfig& cfg, const fs::path& out);
void cmd_mesh_study(const ExperimentConfig& cfg, const fs::path& out);

/// One SVG from one or more CSVs. The first column is x. A file with ci_lo and
/// ci_hi columns contributes a shaded band; sd, ci_lo and ci_hi are not drawn
/// as lines. Output is out/<name>.svg, name defaulting to the first input's stem.
void cmd_render(const std::vector<fs::path>& inputs, const fs::path& out,
                const std::string& name = "", const std::string& title = "");

}  // namespace tvg::app
