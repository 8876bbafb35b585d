#include "tvg/app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace tvg::app {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw AppError("config", key + "='" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  double x = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) bad(key, value, "not a finite number");
  return x;
}

std::size_t to_count(const std::string& key, const std::string& value) {
  const double x = to_double(key, value);
  if (x < 0.0 || x != std::floor(x) || x > 9.0e15) bad(key, value, "not a non-negative integer");
  return static_cast<std::size_t>(x);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
  return s;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "problem", "n",       "gamma",    "d",          "lambda",  "sigma",        "n_obs",
      "sampler", "beta",    "k",        "step_sd",    "tv_step_scale", "n_samples",
      "burn_in", "thin",    "seed",     "init",       "probe_t", "max_lag",      "nx",
      "nt",      "robin_sign", "observations", "n_list", "tv_compare"};
  return keys;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw AppError("config", "line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw AppError("config", "line " + std::to_string(lineno) + ": empty key");
    if (out.count(key)) throw AppError("config", "duplicate key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ProblemKind parse_problem(const std::string& name) {
  if (name == "denoising") return ProblemKind::Denoising;
  if (name == "heat-robin") return ProblemKind::HeatRobin;
  if (name == "tv-denoising") return ProblemKind::TvDenoising;
  throw AppError("config", "problem='" + name + "': expected denoising, heat-robin or tv-denoising");
}

std::string problem_name(ProblemKind p) {
  switch (p) {
    case ProblemKind::Denoising: return "denoising";
    case ProblemKind::HeatRobin: return "heat-robin";
    case ProblemKind::TvDenoising: return "tv-denoising";
  }
  return "?";
}

ExperimentConfig resolve_config(const std::map<std::string, std::string>& values,
                                std::optional<std::uint64_t> seed) {
  for (const auto& [key, value] : values) {
    if (!known_keys().count(key)) throw AppError("config", "unknown key '" + key + "'");
  }
  auto has = [&](const char* key) { return values.count(key) > 0; };
  auto get = [&](const char* key) { return values.at(key); };

  ExperimentConfig c;
  c.chain.n_samples = 200000;
  c.chain.burn_in = 50000;
  c.chain.thin = 10;
  c.chain.seed = 1;
  c.chain.beta = 0.003;
  c.chain.k = 10;
  if (has("problem")) c.problem = parse_problem(get("problem"));
  if (c.problem == ProblemKind::HeatRobin) {
    c.n = 200;
    c.lambda = 300.0;
    c.sigma = 0.01;
    c.n_obs = 100;
    c.chain.beta = 0.02;
    c.init = "prior";
  }
  if (c.problem == ProblemKind::TvDenoising) c.sampler = Kernel::RwTv;

  if (has("n")) c.n = to_count("n", get("n"));
  if (has("gamma")) c.gamma = to_double("gamma", get("gamma"));
  if (has("d")) c.d = to_double("d", get("d"));
  if (has("lambda")) c.lambda = to_double("lambda", get("lambda"));
  if (has("sigma")) c.sigma = to_double("sigma", get("sigma"));
  if (has("n_obs")) c.n_obs = to_count("n_obs", get("n_obs"));
  if (has("sampler")) {
    try {
      c.sampler = parse_kernel(get("sampler"));
    } catch (const std::invalid_argument& e) {
      throw AppError("config", e.what());
    }
  }
  if (has("beta")) c.chain.beta = to_double("beta", get("beta"));
  if (has("k")) c.chain.k = to_count("k", get("k"));
  if (has("tv_step_scale")) c.tv_step_scale = to_double("tv_step_scale", get("tv_step_scale"));
  if (has("n_samples")) c.chain.n_samples = to_count("n_samples", get("n_samples"));
  if (has("burn_in")) c.chain.burn_in = to_count("burn_in", get("burn_in"));
  if (has("thin")) c.chain.thin = to_count("thin", get("thin"));
  if (has("seed")) c.chain.seed = to_count("seed", get("seed"));
  if (seed) c.chain.seed = *seed;
  if (has("init")) c.init = get("init");
  if (has("probe_t")) {
    c.probe_t.clear();
    for (const auto& s : split_list(get("probe_t"))) c.probe_t.push_back(to_double("probe_t", s));
  }
  if (has("max_lag")) c.max_lag = to_count("max_lag", get("max_lag"));
  if (has("nx")) c.nx = to_count("nx", get("nx"));
  if (has("nt")) c.nt = to_count("nt", get("nt"));
  if (has("robin_sign")) {
    const auto s = get("robin_sign");
    if (s == "outward") c.sign = RobinSign::OutwardNormal;
    else if (s == "as-printed") c.sign = RobinSign::AsPrinted;
    else bad("robin_sign", s, "expected outward or as-printed");
  }
  if (has("observations")) c.observations = get("observations");
  if (has("n_list")) {
    c.n_list.clear();
    for (const auto& s : split_list(get("n_list"))) c.n_list.push_back(to_count("n_list", s));
  }
  if (has("tv_compare")) {
    const auto s = get("tv_compare");
    if (s == "true") c.tv_compare = true;
    else if (s == "false") c.tv_compare = false;
    else bad("tv_compare", s, "expected true or false");
  }

  if (c.n < 2) bad("n", std::to_string(c.n), "need at least 2 nodes");
  if (!(c.gamma > 0.0)) bad("gamma", format_double(c.gamma), "must be positive");
  if (!(c.d > 0.0)) bad("d", format_double(c.d), "must be positive");
  if (!(c.lambda >= 0.0)) bad("lambda", format_double(c.lambda), "must be non-negative");
  if (!(c.sigma > 0.0)) bad("sigma", format_double(c.sigma), "must be positive");
  if (c.n_obs < 1) bad("n_obs", "0", "need at least one observation");
  if (c.problem == ProblemKind::Denoising && c.n_obs < 2) bad("n_obs", "1", "need at least 2 locations");
  if (!(c.tv_step_scale > 0.0)) bad("tv_step_scale", format_double(c.tv_step_scale), "must be positive");
  c.chain.step_sd = has("step_sd") ? to_double("step_sd", get("step_sd"))
                                   : c.tv_step_scale / static_cast<double>(c.n);
  if (c.init != "zero" && c.init != "prior") bad("init", c.init, "expected zero or prior");
  for (double t : c.probe_t) {
    if (!(t >= 0.0 && t <= 1.0)) bad("probe_t", format_double(t), "probe outside [0, 1]");
  }
  if (c.nx < 3) bad("nx", std::to_string(c.nx), "need at least 3 space nodes");
  if (c.nt < 1) bad("nt", std::to_string(c.nt), "need at least 1 time step");
  for (auto m : c.n_list) {
    if (m < 2) bad("n_list", std::to_string(m), "grid sizes must be at least 2");
  }
  if (c.problem == ProblemKind::TvDenoising && c.sampler != Kernel::RwTv) {
    bad("sampler", kernel_name(c.sampler), "tv-denoising has no Gaussian reference; use rw-tv");
  }
  try {
    c.chain.validate();
  } catch (const std::invalid_argument& e) {
    throw AppError("config", e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw AppError("io", "cannot read config " + path.string());
  return resolve_config(parse_key_values(in), seed);
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::vector<std::string> probes, sizes;
  for (double t : probe_t) probes.push_back(format_double(t));
  for (auto m : n_list) sizes.push_back(std::to_string(m));
  return {
      {"problem", problem_name(problem)},
      {"n", std::to_string(n)},
      {"gamma", format_double(gamma)},
      {"d", format_double(d)},
      {"lambda", format_double(lambda)},
      {"sigma", format_double(sigma)},
      {"n_obs", std::to_string(n_obs)},
      {"sampler", kernel_name(sampler)},
      {"beta", format_double(chain.beta)},
      {"k", std::to_string(chain.k)},
      {"step_sd", format_double(chain.step_sd)},
      {"tv_step_scale", format_double(tv_step_scale)},
      {"n_samples", std::to_string(chain.n_samples)},
      {"burn_in", std::to_string(chain.burn_in)},
      {"thin", std::to_string(chain.thin)},
      {"seed", std::to_string(chain.seed)},
      {"init", init},
      {"probe_t", join(probes)},
      {"max_lag", std::to_string(max_lag)},
      {"nx", std::to_string(nx)},
      {"nt", std::to_string(nt)},
      {"robin_sign", sign == RobinSign::OutwardNormal ? "outward" : "as-printed"},
      {"observations", observations},
      {"n_list", join(sizes)},
      {"tv_compare", tv_compare ? "true" : "false"},
  };
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  for (const auto& [key, value] : cfg.echo()) os << key << '=' << value << '\n';
}

}  // namespace tvg::app
