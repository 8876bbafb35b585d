#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tvg/grid.hpp"
#include "tvg/samplers.hpp"

namespace tvg {

/// Biased autocorrelation estimate for lags 0..max_lag (divides by N, mean
/// removed, so rho(0) = 1). Throws std::invalid_argument when max_lag >= N and
/// std::domain_error for a constant series.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

/// Integrated autocorrelation time: sum of rho(l) for l >= 1 up to, but not
/// including, the first negative lag. Clamped at 0.
double iact(std::span<const double> series);

/// N / (1 + 2 iact).
double ess(std::span<const double> series);

/// Empirical quantile with linear interpolation between order statistics,
/// position (n - 1) p in the sorted sample.
double quantile(std::vector<double> values, double p);

struct PosteriorSummary {
  Field mean;
  Field sd;
  Field ci_lo;  // 2.5% pointwise
  Field ci_hi;  // 97.5% pointwise
};

constexpr std::size_t kMinSamplesForQuantiles = 40;

/// Mean and sd from the running moments, quantiles from the thinned samples.
PosteriorSummary summarize(const ChainOutput& out);

/// Series of node i across the thinned samples.
std::vector<double> node_series(const ChainOutput& out, std::size_t node);

struct NodeMixing {
  std::vector<double> ess;       // per node, from the thinned samples
  std::vector<double> acf_lag;   // rho at the requested lag (in chain steps)
  std::size_t sample_lag = 0;    // same lag in thinned-sample units
};

/// Per-node ESS and the ACF at lag `lag` chain steps (lag / thin in thinned
/// units, rounded to the nearest; NaN when the thinned series is too short).
/// A node that never moved gets ESS 0 and a NaN ACF.
NodeMixing node_mixing(const ChainOutput& out, std::size_t lag = 100);

// CSV `t,mean,sd,ci_lo,ci_hi`.
void write_summary_csv(std::ostream& os, const PosteriorSummary& s);
// CSV `lag,rho`.
void write_acf_csv(std::ostream& os, const std::vector<double>& rho);
// CSV `t,ess,acf_lag100`.
void write_node_mixing_csv(std::ostream& os, const Grid1D& grid, const NodeMixing& m);

}  // namespace tvg
