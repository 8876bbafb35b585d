#include "tvg/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "tvg/app/svg.hpp"
#include "tvg/csv.hpp"
#include "tvg/gaussian.hpp"
#include "tvg/potentials.hpp"

namespace tvg::app {
namespace {

void ensure_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw AppError("io", "cannot create output directory " + out.string());
  }
}

// Renders into memory first so a failed writer leaves no partial file.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buf;
  body(buf);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw AppError("io", "cannot write " + path.string());
  os << buf.str();
  if (!os.flush()) throw AppError("io", "write failed for " + path.string());
}

fs::path resolve(const fs::path& out, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : out / path;
}

ObservationSet load_observations(const ExperimentConfig& cfg, const fs::path& out) {
  const fs::path path = resolve(out, cfg.observations);
  std::ifstream in(path);
  if (!in) throw AppError("io", "cannot read observations " + path.string());
  try {
    return read_observations_csv(in);
  } catch (const std::exception& e) {
    throw AppError("data", path.string() + ": " + e.what());
  }
}

void echo_config(const ExperimentConfig& cfg, const fs::path& out) {
  write_file(out / "config.txt", [&](std::ostream& os) { write_config(os, cfg); });
}

std::string probe_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%g", t);
  return buf;
}

Field initial_field(const ExperimentConfig& cfg, const Problem& problem, const Grid1D& grid) {
  if (cfg.init == "prior") {
    Rng rng(cfg.chain.seed + 1);
    return sample_prior(*problem.prior, rng);
  }
  return Field(grid);
}

MeshArm compare(const std::vector<Field>& means, std::vector<double> rates) {
  MeshArm arm;
  arm.means = means;
  arm.accept_rate = std::move(rates);
  const auto m = static_cast<Eigen::Index>(means.size());
  arm.sup_diff = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double diff = (means[static_cast<std::size_t>(i)].values -
                           means[static_cast<std::size_t>(j)].values)
                              .cwiseAbs()
                              .maxCoeff();
      arm.sup_diff(i, j) = arm.sup_diff(j, i) = diff;
      arm.max_sup_diff = std::max(arm.max_sup_diff, diff);
    }
  }
  return arm;
}

void write_means(std::ostream& os, const Grid1D& fine, const std::vector<std::size_t>& n_list,
                 const std::vector<Field>& means) {
  os << 't';
  for (auto n : n_list) os << ",N" << n;
  os << '\n';
  for (std::size_t i = 0; i < fine.size(); ++i) {
    os << format_double(fine.point(i));
    for (const auto& m : means) os << ',' << format_double(m.values[static_cast<Eigen::Index>(i)]);
    os << '\n';
  }
}

void write_arm(std::ostream& os, const std::string& prefix, const std::vector<std::size_t>& n_list,
               const MeshArm& arm) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    os << prefix << "_accept_rate_" << n_list[i] << '=' << format_double(arm.accept_rate[i]) << '\n';
  }
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    for (std::size_t j = i + 1; j < n_list.size(); ++j) {
      os << prefix << "_sup_diff_" << n_list[i] << '_' << n_list[j] << '='
         << format_double(arm.sup_diff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
         << '\n';
    }
  }
  os << prefix << "_max_sup_diff=" << format_double(arm.max_sup_diff) << '\n';
}

}  // namespace

Grid1D unknown_grid(std::size_t n) { return Grid1D(n, 0.0, 1.0); }

std::vector<std::size_t> probe_nodes(const Grid1D& grid, const std::vector<double>& probe_t) {
  std::vector<std::size_t> nodes;
  for (double t : probe_t) {
    if (!grid.contains(t)) throw AppError("config", "probe t=" + format_double(t) + " outside the grid");
    nodes.push_back(static_cast<std::size_t>(std::lround((t - grid.lower()) / grid.spacing())));
  }
  return nodes;
}

std::shared_ptr<const ForwardModel> make_model(const ExperimentConfig& cfg, const Grid1D& grid) {
  if (cfg.problem == ProblemKind::HeatRobin) {
    return heat_model(default_heat_setup(cfg.nx, cfg.nt, cfg.n_obs, cfg.sign));
  }
  return denoising_model(linspace(0.0, 1.0, cfg.n_obs), grid);
}

SyntheticData make_synthetic_data(const ExperimentConfig& cfg) {
  const Grid1D grid = unknown_grid(cfg.n);
  Rng rng(cfg.chain.seed);
  if (cfg.problem == ProblemKind::HeatRobin) {
    Field truth = sample_function(grid, robin_standin);
    auto model = make_model(cfg, grid);
    ObservationSet obs = generate_data(*model, truth, cfg.sigma, rng);
    return {std::move(truth), std::move(obs)};
  }
  const Vector x = linspace(0.0, 1.0, cfg.n_obs);
  Vector y(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) y[j] = step_signal(x[j]) + cfg.sigma * rng.normal();
  return {sample_function(grid, step_signal), ObservationSet(x, y, cfg.sigma)};
}

void check_observations(const ExperimentConfig& cfg, const ObservationSet& obs) {
  if (std::abs(obs.noise_sd - cfg.sigma) > 1e-12 * cfg.sigma) {
    throw AppError("data", "observations have noise_sd=" + format_double(obs.noise_sd) +
                               " but config sigma=" + format_double(cfg.sigma));
  }
  if (cfg.problem == ProblemKind::HeatRobin) {
    const Vector times = default_heat_setup(3, 2, cfg.n_obs, cfg.sign).obs_times;
    if (obs.size() != static_cast<std::size_t>(times.size())) {
      throw AppError("data", "heat-robin expects " + std::to_string(times.size()) +
                                 " observation times, file has " + std::to_string(obs.size()));
    }
    for (Eigen::Index j = 0; j < times.size(); ++j) {
      if (std::abs(obs.locations[j] - times[j]) > 1e-9) {
        throw AppError("data", "observation time " + format_double(obs.locations[j]) +
                                   " does not match solver time " + format_double(times[j]));
      }
    }
    return;
  }
  if (obs.size() == 0) return;  // the posterior is the prior
  if (obs.locations[0] < 0.0 || obs.locations[obs.locations.size() - 1] > 1.0) {
    throw AppError("data", "observation locations fall outside [0, 1]");
  }
}

Problem make_problem(const ExperimentConfig& cfg, const ObservationSet& obs, std::size_t n) {
  check_observations(cfg, obs);
  const Grid1D grid = unknown_grid(n);
  std::shared_ptr<const ForwardModel> model;
  if (cfg.problem == ProblemKind::HeatRobin) {
    model = make_model(cfg, grid);
  } else {
    model = denoising_model(obs.locations, grid);
  }
  Problem p;
  p.target = make_target(model, obs, TVTerm(cfg.lambda));
  if (cfg.problem != ProblemKind::TvDenoising) {
    p.prior = std::make_shared<const CholeskyFactor>(
        factor(build_covariance(SqExpKernel(cfg.gamma, cfg.d), grid)));
  }
  return p;
}

ChainOutput run_sampler(const ExperimentConfig& cfg, const ObservationSet& obs, std::size_t n) {
  const Problem problem = make_problem(cfg, obs, n);
  const Grid1D grid = unknown_grid(n);
  SamplerConfig sc = cfg.chain;
  sc.probe_nodes = probe_nodes(grid, cfg.probe_t);
  if (cfg.sampler != Kernel::RwTv && !problem.prior) {
    throw AppError("config", kernel_name(cfg.sampler) + " needs a Gaussian reference measure");
  }
  if (cfg.init == "prior" && !problem.prior) {
    throw AppError("config", "init=prior needs a Gaussian reference measure");
  }
  return run_chain(cfg.sampler, initial_field(cfg, problem, grid), sc, problem);
}

MeshStudy run_mesh_study(const ExperimentConfig& cfg, const ObservationSet& obs) {
  if (cfg.problem != ProblemKind::Denoising) {
    throw AppError("config", "mesh-study runs on problem=denoising");
  }
  if (cfg.n_list.size() < 2) throw AppError("config", "mesh-study needs at least 2 grid sizes in n_list");
  const std::size_t finest = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  MeshStudy study{unknown_grid(finest), cfg.n_list, {}, std::nullopt};

  auto arm = [&](const ExperimentConfig& base, bool tv) {
    std::vector<Field> means;
    std::vector<double> rates;
    for (auto n : cfg.n_list) {
      ExperimentConfig c = base;
      c.n = n;
      c.chain.seed = cfg.chain.seed + n;
      if (tv) c.chain.step_sd = cfg.tv_step_scale / static_cast<double>(n);
      const ChainOutput out = run_sampler(c, obs, n);
      means.push_back(regrid(out.mean, study.fine));
      rates.push_back(out.stats.outer_accept_rate());
    }
    return compare(means, std::move(rates));
  };

  study.tg = arm(cfg, false);
  if (cfg.tv_compare) {
    ExperimentConfig tv = cfg;
    tv.problem = ProblemKind::TvDenoising;
    tv.sampler = Kernel::RwTv;
    tv.init = "zero";
    study.tv = arm(tv, true);
  }
  return study;
}

void cmd_generate(const ExperimentConfig& cfg, const fs::path& out) {
  ensure_dir(out);
  const SyntheticData data = make_synthetic_data(cfg);
  echo_config(cfg, out);
  write_file(out / "truth.csv", [&](std::ostream& os) { write_field_csv(os, data.truth); });
  write_file(out / "observations.csv", [&](std::ostream& os) { write_observations_csv(os, data.obs); });
}

void cmd_sample(const ExperimentConfig& cfg, const fs::path& out) {
  ensure_dir(out);
  const ObservationSet obs = load_observations(cfg, out);
  echo_config(cfg, out);
  const ChainOutput chain = run_sampler(cfg, obs, cfg.n);
  const Grid1D& grid = chain.mean.grid;

  write_file(out / "samples.csv", [&](std::ostream& os) { write_samples_csv(os, chain); });
  if (chain.samples.size() >= kMinSamplesForQuantiles) {
    write_file(out / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, summarize(chain)); });
  }
  write_file(out / "stats.txt", [&](std::ostream& os) {
    os << "sampler=" << kernel_name(chain.kernel) << '\n';
    os << "samples_stored=" << chain.samples.size() << '\n';
    write_stats(os, chain.stats);
    std::ostringstream burn;
    write_stats(burn, chain.burn_in_stats);
    std::istringstream lines(burn.str());
    for (std::string line; std::getline(lines, line);) os << "burn_in_" << line << '\n';
  });

  const auto& probes = chain.config.probe_nodes;
  write_file(out / "traces.csv", [&](std::ostream& os) {
    os << "step";
    for (double t : cfg.probe_t) os << ',' << probe_tag(t);
    os << '\n';
    for (std::size_t s = cfg.chain.thin - 1; s < chain.count; s += cfg.chain.thin) {
      os << s + 1;
      for (const auto& tr : chain.traces) os << ',' << format_double(tr[s]);
      os << '\n';
    }
  });

  std::vector<double> ess_values(probes.size()), iact_values(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& tr = chain.traces[p];
    std::vector<double> rho;
    try {
      if (tr.size() >= 2) {
        rho = acf(tr, std::min(cfg.max_lag, tr.size() - 1));
        iact_values[p] = iact(tr);
        ess_values[p] = ess(tr);
      } else {
        iact_values[p] = std::numeric_limits<double>::quiet_NaN();
        ess_values[p] = static_cast<double>(tr.size());
      }
    } catch (const std::domain_error&) {
      // Constant trace: the chain never moved at this node.
      rho = {1.0};
      iact_values[p] = std::numeric_limits<double>::quiet_NaN();
      ess_values[p] = 0.0;
    }
    write_file(out / ("acf_" + probe_tag(cfg.probe_t[p]) + ".csv"),
               [&](std::ostream& os) { write_acf_csv(os, rho); });
  }
  write_file(out / "probe_ess.csv", [&](std::ostream& os) {
    os << "t,ess,iact,ess_per_forward_eval\n";
    const double evals = static_cast<double>(chain.stats.forward_evals);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      os << format_double(grid.point(probes[p])) << ',' << format_double(ess_values[p]) << ','
         << format_double(iact_values[p]) << ','
         << format_double(evals > 0 ? ess_values[p] / evals : std::numeric_limits<double>::quiet_NaN())
         << '\n';
    }
  });
  if (chain.samples.size() >= 2) {
    write_file(out / "node_ess.csv",
               [&](std::ostream& os) { write_node_mixing_csv(os, grid, node_mixing(chain)); });
  }
}

void cmd_gp_exact(const ExperimentConfig& cfg, const fs::path& out) {
  if (cfg.problem != ProblemKind::Denoising) {
    throw AppError("config", "gp-exact needs problem=denoising (linear point observations)");
  }
  ensure_dir(out);
  const ObservationSet obs = load_observations(cfg, out);
  check_observations(cfg, obs);
  echo_config(cfg, out);
  const GpPosterior post = gp_posterior_exact(SqExpKernel(cfg.gamma, cfg.d), unknown_grid(cfg.n), obs);
  write_file(out / "gp.csv", [&](std::ostream& os) { write_gp_csv(os, post); });
}

void cmd_mesh_study(const ExperimentConfig& cfg, const fs::path& out) {
  ensure_dir(out);
  const ObservationSet obs = load_observations(cfg, out);
  echo_config(cfg, out);
  const MeshStudy study = run_mesh_study(cfg, obs);
  write_file(out / "means_tg.csv",
             [&](std::ostream& os) { write_means(os, study.fine, study.n_list, study.tg.means); });
  if (study.tv) {
    write_file(out / "means_tv.csv",
               [&](std::ostream& os) { write_means(os, study.fine, study.n_list, study.tv->means); });
  }
  write_file(out / "mesh_study.txt", [&](std::ostream& os) {
    os << "fine_n=" << study.fine.size() << '\n';
    write_arm(os, "tg", study.n_list, study.tg);
    if (study.tv) {
      write_arm(os, "tv", study.n_list, *study.tv);
      os << "tv_exceeds_tg=" << (study.tv->max_sup_diff > study.tg.max_sup_diff ? "true" : "false")
         << '\n';
    }
  });
}

void cmd_render(const std::vector<fs::path>& inputs, const fs::path& out, const std::string& name,
                const std::string& title) {
  if (inputs.empty()) throw AppError("usage", "render needs at least one CSV");
  Chart chart;
  chart.title = title;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw AppError("io", "cannot read " + path.string());
    CsvTable table;
    try {
      table = read_csv(in);
    } catch (const std::exception& e) {
      throw AppError("data", path.string() + ": " + e.what());
    }
    if (table.rows.empty() || table.header.size() < 2) {
      throw AppError("data", path.string() + ": no data rows to plot");
    }
    const std::string stem = path.stem().string();
    const auto x = table.column_values(0);
    if (chart.x_label.empty()) chart.x_label = table.header[0];
    const auto& h = table.header;
    const bool has_band = std::find(h.begin(), h.end(), "ci_lo") != h.end() &&
                          std::find(h.begin(), h.end(), "ci_hi") != h.end();
    if (has_band && !chart.band) {
      chart.band = Band{stem + ": 95% band", x, table.column_values(table.column("ci_lo")),
                        table.column_values(table.column("ci_hi"))};
    }
    for (std::size_t c = 1; c < h.size(); ++c) {
      if (h[c] == "sd" || h[c] == "ci_lo" || h[c] == "ci_hi") continue;
      const std::string label = inputs.size() > 1 ? stem + ": " + h[c] : h[c];
      chart.lines.push_back({label, x, table.column_values(c)});
    }
  }
  std::string svg;
  try {
    svg = render_svg(chart);
  } catch (const std::invalid_argument& e) {
    throw AppError("data", e.what());
  }
  ensure_dir(out);
  const std::string file = (name.empty() ? inputs.front().stem().string() : name) + ".svg";
  write_file(out / file, [&](std::ostream& os) { os << svg; });
}

}  // namespace tvg::app
