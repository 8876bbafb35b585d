#pragma once

#include <iosfwd>

#include "tvg/grid.hpp"
#include "tvg/rng.hpp"

namespace tvg {

/// Squared-exponential covariance gamma * exp(-0.5 ((t1 - t2) / d)^2).
struct SqExpKernel {
  SqExpKernel(double variance, double length);

  double operator()(double t1, double t2) const;

  double gamma;
  double d;
};

/// Dense covariance of the zero-mean reference measure on a grid.
struct CovarianceOperator {
  Grid1D grid;
  Matrix matrix;
  double jitter = 0.0;  // amount added to the diagonal before factorization
};

CovarianceOperator build_covariance(const SqExpKernel& kernel, const Grid1D& grid);

/// Lower Cholesky factor L with L L^T = matrix + jitter I.
class CholeskyFactor {
 public:
  CholeskyFactor(CovarianceOperator cov, Matrix lower);

  const Grid1D& grid() const { return cov_.grid; }
  const Matrix& lower() const { return lower_; }
  const CovarianceOperator& covariance() const { return cov_; }
  double jitter() const { return cov_.jitter; }

 private:
  CovarianceOperator cov_;
  Matrix lower_;
};

/// Cholesky with a jitter ladder: 0, then 1e-12 s, 1e-11 s, ..., 1e-6 s where
/// s is the largest diagonal entry (gamma for the squared-exponential kernel).
/// Throws std::runtime_error if every rung fails.
CholeskyFactor factor(const CovarianceOperator& cov);

/// L z with z drawn as factor.grid().size() standard normals from the stream.
Field sample_prior(const CholeskyFactor& factor, Rng& rng);
/// L z for a given standard-normal vector z.
Field color_noise(const CholeskyFactor& factor, const Vector& z);

/// ||L^{-1} u||^2.
double cameron_martin_norm_sq(const CholeskyFactor& factor, const Field& u);

struct GpPosterior {
  Field mean;
  Field sd;
};

/// Exact Gaussian-process regression with point observations, evaluated at
/// every grid node.
GpPosterior gp_posterior_exact(const SqExpKernel& kernel, const Grid1D& grid,
                               const ObservationSet& obs);

// CSV `t,mean,sd`.
void write_gp_csv(std::ostream& os, const GpPosterior& post);

}  // namespace tvg
