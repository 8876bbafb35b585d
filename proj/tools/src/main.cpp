// tvg: data generation, sampling, exact GP oracle, mesh studies and plots.
//
// Failures print a single line `error: <category>: <message>` to stderr.
// Exit codes: 1 runtime/numeric, 2 usage or config, 3 data, 4 io.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tvg/app/commands.hpp"

namespace {

int exit_code(const std::string& category) {
  if (category == "usage" || category == "config") return 2;
  if (category == "data") return 3;
  if (category == "io") return 4;
  return 1;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int fail(const std::string& category, const std::string& message) {
  std::cerr << "error: " << category << ": " << one_line(message) << '\n';
  return exit_code(category);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tvg::app;
  CLI::App app{"Bayesian inversion with TV-Gaussian priors"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value config file")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed, "overrides the config seed");
  };
  auto* generate = app.add_subcommand("generate", "write truth.csv and observations.csv");
  auto* sample = app.add_subcommand("sample", "run a chain and write samples, summary and diagnostics");
  auto* gp = app.add_subcommand("gp-exact", "exact Gaussian-process posterior (denoising)");
  auto* mesh = app.add_subcommand("mesh-study", "compare posterior means across grid sizes");
  for (auto* cmd : {generate, sample, gp, mesh}) add_common(cmd);

  auto* render = app.add_subcommand("render", "SVG line charts from CSV files");
  std::vector<std::string> inputs;
  std::string name, title;
  render->add_option("inputs", inputs, "CSV files")->required();
  render->add_option("--out", out_dir, "output directory")->required();
  render->add_option("--name", name, "output file stem");
  render->add_option("--title", title, "chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (render->parsed()) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      cmd_render(paths, out_dir, name, title);
      return 0;
    }
    const ExperimentConfig cfg = load_config(config_path, seed);
    if (generate->parsed()) cmd_generate(cfg, out_dir);
    else if (sample->parsed()) cmd_sample(cfg, out_dir);
    else if (gp->parsed()) cmd_gp_exact(cfg, out_dir);
    else if (mesh->parsed()) cmd_mesh_study(cfg, out_dir);
  } catch (const AppError& e) {
    return fail(e.category(), e.what());
  } catch (const tvg::ChainAborted& e) {
    return fail("numeric", e.what());
  } catch (const tvg::SolverError& e) {
    return fail("numeric", e.what());
  } catch (const std::domain_error& e) {
    return fail("numeric", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("data", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
