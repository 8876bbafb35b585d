#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvg/forward.hpp"
#include "tvg/gaussian.hpp"
#include "tvg/potentials.hpp"
#include "tvg/rng.hpp"

namespace tvg {

using Potential = std::function<double(const Field&)>;

/// Posterior density exp(-Phi(u) - R(u)) relative to the reference measure
/// (the Gaussian prior for pCN/S-pCN, Lebesgue measure for the random walk).
/// An empty callable stands for the zero potential.
struct Target {
  Potential misfit;       // Phi, the expensive term
  Potential regularizer;  // R, the cheap term
};

/// Phi from a forward model and data, R = lambda TV. Shares ownership of model.
Target make_target(std::shared_ptr<const ForwardModel> model, ObservationSet obs, TVTerm tv);

enum class Kernel { Pcn, Spcn, RwTv };

Kernel parse_kernel(const std::string& name);
std::string kernel_name(Kernel k);

struct SamplerConfig {
  double beta = 0.02;
  std::size_t k = 10;  // inner TV moves per S-pCN step
  std::size_t n_samples = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  double step_sd = 0.01;  // random-walk proposal scale
  std::vector<std::size_t> probe_nodes;  // full post-burn-in traces kept here

  void validate() const;
};

struct ChainStats {
  std::uint64_t outer_proposed = 0;
  std::uint64_t outer_accepted = 0;
  std::uint64_t inner_proposed = 0;
  std::uint64_t inner_accepted = 0;
  std::uint64_t forward_evals = 0;  // Phi evaluations

  double outer_accept_rate() const;
  double inner_accept_rate() const;
};

/// Current chain position with its cached potentials.
struct ChainState {
  Field u;
  double misfit = 0.0;
  double reg = 0.0;
};

ChainState init_state(Field u, const Target& target, ChainStats& stats);

struct StepOutcome {
  bool accepted = false;
  std::size_t inner_accepted = 0;
};

/// min{1, exp(current - proposed)}, exactly 1 when the potential does not
/// increase. Throws std::domain_error on non-finite input.
double acceptance_probability(double current, double proposed);

/// sqrt(1 - beta^2) u + beta w.
Field pcn_propose(const Field& u, double beta, const Field& w);

// Random-number consumption per step, in order:
//   pcn_step:   n normals (prior draw), 1 uniform
//   spcn_step:  k x (n normals, 1 uniform), then 1 uniform
//   rw_tv_step: n normals, 1 uniform
// The uniform is drawn even when the acceptance probability is 1.

/// Standard pCN on Phi + R. One Phi evaluation.
StepOutcome pcn_step(ChainState& state, const Target& target, const CholeskyFactor& prior,
                     double beta, Rng& rng, ChainStats& stats);

/// Splitting pCN: k pCN moves screened by R alone, then the composite move is
/// accepted on Phi. One Phi evaluation per call; Phi(u_current) and R are cached.
StepOutcome spcn_step(ChainState& state, const Target& target, const CholeskyFactor& prior,
                      double beta, std::size_t k, Rng& rng, ChainStats& stats);

/// Gaussian random walk u + step_sd z on Phi + R with Lebesgue reference; used
/// with R = lambda TV for the finite-dimensional TV prior.
StepOutcome rw_tv_step(ChainState& state, const Target& target, double step_sd, Rng& rng,
                       ChainStats& stats);

struct Problem {
  std::shared_ptr<const CholeskyFactor> prior;  // required by Pcn and Spcn
  Target target;
};

struct ChainOutput {
  explicit ChainOutput(const Grid1D& grid) : mean(grid), m2(grid) {}

  std::vector<Field> samples;  // every thin-th post-burn-in state
  Field mean;                  // over all post-burn-in states
  Field m2;                    // sum of squared deviations from the mean
  std::size_t count = 0;       // states accumulated into mean/m2
  std::vector<std::vector<double>> traces;  // one per probe node
  ChainStats stats;            // post-burn-in steps only
  ChainStats burn_in_stats;    // initial evaluation and burn-in
  SamplerConfig config;
  Kernel kernel = Kernel::Pcn;

  Field variance() const;
  Field second_moment() const;
};

/// Thrown when a step fails; carries everything accumulated before the failure.
class ChainAborted : public std::runtime_error {
 public:
  ChainAborted(const std::string& what, ChainOutput partial)
      : std::runtime_error(what), partial_(std::make_shared<ChainOutput>(std::move(partial))) {}
  const ChainOutput& partial() const { return *partial_; }

 private:
  std::shared_ptr<ChainOutput> partial_;
};

/// Runs burn_in + n_samples steps. Deterministic given config.seed.
ChainOutput run_chain(Kernel kernel, const Field& initial, const SamplerConfig& config,
                      const Problem& problem);

// Thinned samples, one row per sample, one column per node; the header row
// holds the node coordinates.
void write_samples_csv(std::ostream& os, const ChainOutput& out);
// `outer_accept_rate=`, `inner_accept_rate=`, `forward_evals=` lines.
void write_stats(std::ostream& os, const ChainStats& stats);

}  // namespace tvg
