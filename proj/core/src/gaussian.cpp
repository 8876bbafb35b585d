#include "tvg/gaussian.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace tvg {

SqExpKernel::SqExpKernel(double variance, double length) : gamma(variance), d(length) {
  if (!(gamma > 0.0)) throw std::invalid_argument("kernel gamma must be positive");
  if (!(d > 0.0)) throw std::invalid_argument("kernel length d must be positive");
}

double SqExpKernel::operator()(double t1, double t2) const {
  const double r = (t1 - t2) / d;
  return gamma * std::exp(-0.5 * r * r);
}

CovarianceOperator build_covariance(const SqExpKernel& kernel, const Grid1D& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Vector t = grid.points();
  Matrix c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    c(j, j) = kernel.gamma;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = kernel(t[i], t[j]);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return {grid, std::move(c), 0.0};
}

CholeskyFactor::CholeskyFactor(CovarianceOperator cov, Matrix lower)
    : cov_(std::move(cov)), lower_(std::move(lower)) {
  if (lower_.rows() != cov_.matrix.rows() || lower_.cols() != cov_.matrix.cols()) {
    throw std::invalid_argument("Cholesky factor shape mismatch");
  }
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    if (!(lower_(i, i) > 0.0)) {
      throw std::invalid_argument("Cholesky factor has a non-positive diagonal");
    }
  }
}

CholeskyFactor factor(const CovarianceOperator& cov) {
  const auto n = cov.matrix.rows();
  if (n == 0 || cov.matrix.cols() != n) {
    throw std::invalid_argument("covariance must be a non-empty square matrix");
  }
  const double scale = cov.matrix.diagonal().maxCoeff();
  if (!(scale > 0.0)) throw std::runtime_error("covariance diagonal is not positive");

  constexpr std::array<double, 8> ladder{0.0,   1e-12, 1e-11, 1e-10,
                                         1e-9,  1e-8,  1e-7,  1e-6};
  for (double rung : ladder) {
    const double jitter = rung * scale;
    Matrix shifted = cov.matrix;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Matrix lower = llt.matrixL();
    if (!(lower.diagonal().array() > 0.0).all()) continue;
    CovarianceOperator used = cov;
    used.jitter = jitter;
    return CholeskyFactor(std::move(used), std::move(lower));
  }
  throw std::runtime_error("covariance is not positive definite even with jitter " +
                           format_double(1e-6 * scale));
}

Field color_noise(const CholeskyFactor& factor, const Vector& z) {
  if (z.size() != factor.lower().rows()) {
    throw std::invalid_argument("noise vector length does not match the factor");
  }
  Vector v(z.size());
  v.noalias() = factor.lower().triangularView<Eigen::Lower>() * z;
  return Field(factor.grid(), std::move(v));
}

Field sample_prior(const CholeskyFactor& factor, Rng& rng) {
  return color_noise(factor, rng.normals(factor.lower().rows()));
}

double cameron_martin_norm_sq(const CholeskyFactor& factor, const Field& u) {
  if (!(u.grid == factor.grid())) {
    throw std::invalid_argument("Cameron-Martin norm: field is on a different grid");
  }
  const Vector z = factor.lower().triangularView<Eigen::Lower>().solve(u.values);
  return z.squaredNorm();
}

GpPosterior gp_posterior_exact(const SqExpKernel& kernel, const Grid1D& grid,
                               const ObservationSet& obs) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto m = obs.locations.size();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!grid.contains(obs.locations[j])) {
      throw std::out_of_range("observation location outside grid domain");
    }
  }
  const Vector t = grid.points();

  Vector mean = Vector::Zero(n);
  Vector var = Vector::Constant(n, kernel.gamma);
  if (m > 0) {
    Matrix gram(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        gram(i, j) = kernel(obs.locations[i], obs.locations[j]);
      }
    }
    gram.diagonal().array() += obs.noise_sd * obs.noise_sd;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("observation gram matrix is not positive definite");
    }
    Matrix cross(m, n);  // k_*(t_i) in column i
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) cross(j, i) = kernel(obs.locations[j], t[i]);
    }
    const Vector alpha = llt.solve(obs.y);
    mean = cross.transpose() * alpha;
    const Matrix whitened = llt.matrixL().solve(cross);
    var -= whitened.colwise().squaredNorm().transpose();
  }
  Vector sd = var.cwiseMax(0.0).cwiseSqrt();
  return {Field(grid, std::move(mean)), Field(grid, std::move(sd))};
}

void write_gp_csv(std::ostream& os, const GpPosterior& post) {
  os << "t,mean,sd\n";
  for (std::size_t i = 0; i < post.mean.grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    os << format_double(post.mean.grid.point(i)) << ',' << format_double(post.mean.values[k])
       << ',' << format_double(post.sd.values[k]) << '\n';
  }
}

}  // namespace tvg
