#include "tvg/samplers.hpp"

#include <cassert>
#include <cmath>
#include <ostream>

namespace tvg {
namespace {

double evaluate(const Potential& p, const Field& u) { return p ? p(u) : 0.0; }

double evaluate_misfit(const Target& target, const Field& u, ChainStats& stats) {
  if (!target.misfit) return 0.0;
  ++stats.forward_evals;
  return target.misfit(u);
}

bool accept(double probability, Rng& rng) {
  assert(probability >= 0.0 && probability <= 1.0);
  return rng.uniform() < probability;
}

}  // namespace

Target make_target(std::shared_ptr<const ForwardModel> model, ObservationSet obs, TVTerm tv) {
  if (!model) throw std::invalid_argument("make_target: null forward model");
  if (model->output_size() != obs.size()) {
    throw std::invalid_argument("make_target: model output size differs from data size");
  }
  Target t;
  t.misfit = [model = std::move(model), obs = std::move(obs)](const Field& u) {
    return data_misfit(*model, obs, u);
  };
  if (tv.lambda > 0.0) t.regularizer = [tv](const Field& u) { return regularizer(tv, u); };
  return t;
}

Kernel parse_kernel(const std::string& name) {
  if (name == "pcn") return Kernel::Pcn;
  if (name == "spcn") return Kernel::Spcn;
  if (name == "rw-tv") return Kernel::RwTv;
  throw std::invalid_argument("unknown sampler '" + name + "' (expected pcn, spcn, rw-tv)");
}

std::string kernel_name(Kernel k) {
  switch (k) {
    case Kernel::Pcn: return "pcn";
    case Kernel::Spcn: return "spcn";
    case Kernel::RwTv: return "rw-tv";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (!(step_sd > 0.0)) throw std::invalid_argument("step_sd must be positive");
}

double ChainStats::outer_accept_rate() const {
  return outer_proposed == 0 ? 0.0
                             : static_cast<double>(outer_accepted) /
                                   static_cast<double>(outer_proposed);
}

double ChainStats::inner_accept_rate() const {
  return inner_proposed == 0 ? 0.0
                             : static_cast<double>(inner_accepted) /
                                   static_cast<double>(inner_proposed);
}

ChainState init_state(Field u, const Target& target, ChainStats& stats) {
  ChainState s{std::move(u), 0.0, 0.0};
  s.misfit = evaluate_misfit(target, s.u, stats);
  s.reg = evaluate(target.regularizer, s.u);
  if (!std::isfinite(s.misfit) || !std::isfinite(s.reg)) {
    throw std::domain_error("initial state has a non-finite potential");
  }
  return s;
}

double acceptance_probability(double current, double proposed) {
  if (!std::isfinite(current) || !std::isfinite(proposed)) {
    throw std::domain_error("non-finite potential (current=" + format_double(current) +
                            ", proposed=" + format_double(proposed) + ")");
  }
  if (proposed <= current) return 1.0;
  return std::exp(current - proposed);
}

Field pcn_propose(const Field& u, double beta, const Field& w) {
  if (!(u.grid == w.grid)) throw std::invalid_argument("pcn_propose: grid mismatch");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  const double keep = std::sqrt(1.0 - beta * beta);
  return Field(u.grid, keep * u.values + beta * w.values);
}

StepOutcome pcn_step(ChainState& state, const Target& target, const CholeskyFactor& prior,
                     double beta, Rng& rng, ChainStats& stats) {
  Field proposal = pcn_propose(state.u, beta, sample_prior(prior, rng));
  const double misfit = evaluate_misfit(target, proposal, stats);
  const double reg = evaluate(target.regularizer, proposal);
  const double p = acceptance_probability(state.misfit + state.reg, misfit + reg);
  ++stats.outer_proposed;
  if (!accept(p, rng)) return {false, 0};
  ++stats.outer_accepted;
  state.u = std::move(proposal);
  state.misfit = misfit;
  state.reg = reg;
  return {true, 0};
}

StepOutcome spcn_step(ChainState& state, const Target& target, const CholeskyFactor& prior,
                      double beta, std::size_t k, Rng& rng, ChainStats& stats) {
  if (k < 1) throw std::invalid_argument("spcn_step: k must be at least 1");
  Field v = state.u;
  double v_reg = state.reg;
  std::size_t inner = 0;
  for (std::size_t i = 0; i < k; ++i) {
    Field proposal = pcn_propose(v, beta, sample_prior(prior, rng));
    const double reg = evaluate(target.regularizer, proposal);
    ++stats.inner_proposed;
    if (accept(acceptance_probability(v_reg, reg), rng)) {
      ++stats.inner_accepted;
      ++inner;
      v = std::move(proposal);
      v_reg = reg;
    }
  }
  const double misfit = evaluate_misfit(target, v, stats);
  const double p = acceptance_probability(state.misfit, misfit);
  ++stats.outer_proposed;
  if (!accept(p, rng)) return {false, inner};
  ++stats.outer_accepted;
  state.u = std::move(v);
  state.misfit = misfit;
  state.reg = v_reg;
  return {true, inner};
}

StepOutcome rw_tv_step(ChainState& state, const Target& target, double step_sd, Rng& rng,
                       ChainStats& stats) {
  if (!(step_sd > 0.0)) throw std::invalid_argument("rw_tv_step: step_sd must be positive");
  Field proposal(state.u.grid, state.u.values + step_sd * rng.normals(state.u.values.size()));
  const double misfit = evaluate_misfit(target, proposal, stats);
  const double reg = evaluate(target.regularizer, proposal);
  const double p = acceptance_probability(state.misfit + state.reg, misfit + reg);
  ++stats.outer_proposed;
  if (!accept(p, rng)) return {false, 0};
  ++stats.outer_accepted;
  state.u = std::move(proposal);
  state.misfit = misfit;
  state.reg = reg;
  return {true, 0};
}

Field ChainOutput::variance() const {
  if (count < 2) return Field(mean.grid);
  return Field(mean.grid, m2.values / static_cast<double>(count - 1));
}

Field ChainOutput::second_moment() const {
  if (count == 0) return Field(mean.grid);
  return Field(mean.grid,
               m2.values / static_cast<double>(count) + mean.values.cwiseProduct(mean.values));
}

ChainOutput run_chain(Kernel kernel, const Field& initial, const SamplerConfig& config,
                      const Problem& problem) {
  config.validate();
  if (kernel != Kernel::RwTv) {
    if (!problem.prior) throw std::invalid_argument("run_chain: pCN kernels need a prior factor");
    if (!(problem.prior->grid() == initial.grid)) {
      throw std::invalid_argument("run_chain: initial state and prior live on different grids");
    }
  }
  for (auto node : config.probe_nodes) {
    if (node >= initial.grid.size()) throw std::invalid_argument("run_chain: probe node out of range");
  }

  ChainOutput out(initial.grid);
  out.config = config;
  out.kernel = kernel;
  out.traces.resize(config.probe_nodes.size());
  for (auto& tr : out.traces) tr.reserve(config.n_samples);
  out.samples.reserve(config.n_samples / config.thin);

  Rng rng(config.seed);
  ChainState state = init_state(initial, problem.target, out.burn_in_stats);
  const std::size_t total = config.burn_in + config.n_samples;

  try {
    for (std::size_t step = 0; step < total; ++step) {
      const bool sampling = step >= config.burn_in;
      ChainStats& stats = sampling ? out.stats : out.burn_in_stats;
      switch (kernel) {
        case Kernel::Pcn:
          pcn_step(state, problem.target, *problem.prior, config.beta, rng, stats);
          break;
        case Kernel::Spcn:
          spcn_step(state, problem.target, *problem.prior, config.beta, config.k, rng, stats);
          break;
        case Kernel::RwTv:
          rw_tv_step(state, problem.target, config.step_sd, rng, stats);
          break;
      }
      if (!sampling) continue;

      // Welford update of mean and squared deviations.
      ++out.count;
      const Vector delta = state.u.values - out.mean.values;
      out.mean.values += delta / static_cast<double>(out.count);
      out.m2.values += delta.cwiseProduct(state.u.values - out.mean.values);

      for (std::size_t p = 0; p < config.probe_nodes.size(); ++p) {
        out.traces[p].push_back(state.u.values[static_cast<Eigen::Index>(config.probe_nodes[p])]);
      }
      if (out.count % config.thin == 0) out.samples.push_back(state.u);
    }
  } catch (const std::exception& e) {
    throw ChainAborted(std::string("chain aborted after ") + std::to_string(out.count) +
                           " samples: " + e.what(),
                       std::move(out));
  }
  return out;
}

void write_samples_csv(std::ostream& os, const ChainOutput& out) {
  const auto& grid = out.mean.grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) os << ',';
    os << format_double(grid.point(i));
  }
  os << '\n';
  for (const auto& s : out.samples) {
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
      if (i) os << ',';
      os << format_double(s.values[i]);
    }
    os << '\n';
  }
}

void write_stats(std::ostream& os, const ChainStats& stats) {
  os << "outer_accept_rate=" << format_double(stats.outer_accept_rate()) << '\n'
     << "inner_accept_rate=" << format_double(stats.inner_accept_rate()) << '\n'
     << "forward_evals=" << stats.forward_evals << '\n'
     << "outer_proposed=" << stats.outer_proposed << '\n'
     << "outer_accepted=" << stats.outer_accepted << '\n'
     << "inner_proposed=" << stats.inner_proposed << '\n'
     << "inner_accepted=" << stats.inner_accepted << '\n';
}

}  // namespace tvg
