#include "tvg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace tvg {
namespace {

// Autocorrelation for every lag 0..N-1 by zero-padded FFT.
std::vector<double> full_acf(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("acf needs a series of length >= 2");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  std::size_t padded = 1;
  while (padded < 2 * n) padded <<= 1;
  std::vector<double> centered(padded, 0.0);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = series[i] - mean;
    var += centered[i] * centered[i];
  }
  // Relative test so a constant series with rounding noise still counts as stuck.
  if (!(var > 0.0) || var <= 1e-28 * static_cast<double>(n) * std::max(1.0, mean * mean)) {
    throw std::domain_error("acf: series has zero variance (stuck chain)");
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centered);
  for (auto& c : spectrum) c = std::norm(c);
  std::vector<double> autocov;
  fft.inv(autocov, spectrum);

  std::vector<double> rho(n);
  const double c0 = autocov[0];
  for (std::size_t l = 0; l < n; ++l) rho[l] = autocov[l] / c0;
  rho[0] = 1.0;
  return rho;
}

}  // namespace

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  if (max_lag >= series.size()) {
    throw std::invalid_argument("acf: max_lag must be below the series length");
  }
  auto rho = full_acf(series);
  rho.resize(max_lag + 1);
  return rho;
}

double iact(std::span<const double> series) {
  const auto rho = full_acf(series);
  double tau = 0.0;
  for (std::size_t l = 1; l < rho.size(); ++l) {
    if (rho[l] < 0.0) break;
    tau += rho[l];
  }
  return std::max(tau, 0.0);
}

double ess(std::span<const double> series) {
  return static_cast<double>(series.size()) / (1.0 + 2.0 * iact(series));
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> node_series(const ChainOutput& out, std::size_t node) {
  std::vector<double> s;
  s.reserve(out.samples.size());
  const auto i = static_cast<Eigen::Index>(node);
  for (const auto& f : out.samples) s.push_back(f.values[i]);
  return s;
}

PosteriorSummary summarize(const ChainOutput& out) {
  if (out.samples.size() < kMinSamplesForQuantiles) {
    throw std::invalid_argument("summarize: need at least " +
                                std::to_string(kMinSamplesForQuantiles) +
                                " stored samples, have " + std::to_string(out.samples.size()));
  }
  const Grid1D& grid = out.mean.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  Vector lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto s = node_series(out, static_cast<std::size_t>(i));
    lo[i] = quantile(s, 0.025);
    hi[i] = quantile(std::move(s), 0.975);
  }
  Vector sd = out.variance().values.cwiseMax(0.0).cwiseSqrt();
  return {out.mean, Field(grid, std::move(sd)), Field(grid, std::move(lo)),
          Field(grid, std::move(hi))};
}

NodeMixing node_mixing(const ChainOutput& out, std::size_t lag) {
  NodeMixing m;
  const std::size_t thin = out.config.thin;
  m.sample_lag = (lag + thin / 2) / thin;
  const std::size_t n = out.mean.grid.size();
  m.ess.resize(n);
  m.acf_lag.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = node_series(out, i);
    std::vector<double> rho;
    try {
      rho = full_acf(s);
    } catch (const std::domain_error&) {
      m.ess[i] = 0.0;
      m.acf_lag[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double tau = 0.0;
    for (std::size_t l = 1; l < rho.size() && rho[l] >= 0.0; ++l) tau += rho[l];
    m.ess[i] = static_cast<double>(s.size()) / (1.0 + 2.0 * tau);
    m.acf_lag[i] = m.sample_lag < rho.size() ? rho[m.sample_lag]
                                             : std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

void write_summary_csv(std::ostream& os, const PosteriorSummary& s) {
  os << "t,mean,sd,ci_lo,ci_hi\n";
  for (std::size_t i = 0; i < s.mean.grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    os << format_double(s.mean.grid.point(i)) << ',' << format_double(s.mean.values[k]) << ','
       << format_double(s.sd.values[k]) << ',' << format_double(s.ci_lo.values[k]) << ','
       << format_double(s.ci_hi.values[k]) << '\n';
  }
}

void write_acf_csv(std::ostream& os, const std::vector<double>& rho) {
  os << "lag,rho\n";
  for (std::size_t l = 0; l < rho.size(); ++l) os << l << ',' << format_double(rho[l]) << '\n';
}

void write_node_mixing_csv(std::ostream& os, const Grid1D& grid, const NodeMixing& m) {
  os << "t,ess,acf_lag100\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_double(grid.point(i)) << ',' << format_double(m.ess[i]) << ','
       << format_double(m.acf_lag[i]) << '\n';
  }
}

}  // namespace tvg
