#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "support/property.hpp"
#include "tvg/gaussian.hpp"

namespace tvg {
namespace {

// gamma * exp(-1/2) for gamma = 0.1, evaluated independently.
constexpr double kOneLengthApart = 0.060653065971263342;
// gamma / (gamma + sigma^2) for gamma = 0.1, sigma = 0.02.
constexpr double kSingleObsMean = 0.99601593625498008;

TEST(Kernel, RejectsNonPositiveParameters) {
  EXPECT_THROW(SqExpKernel(0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(SqExpKernel(0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(SqExpKernel(-1.0, 0.1), std::invalid_argument);
}

TEST(Covariance, DiagonalIsGamma) {
  const auto cov = build_covariance(SqExpKernel(0.1, 0.02), Grid1D(89, 0.0, 1.0));
  for (Eigen::Index i = 0; i < 89; ++i) EXPECT_EQ(cov.matrix(i, i), 0.1);
  EXPECT_EQ(cov.jitter, 0.0);
}

TEST(Covariance, EntryOneLengthApart) {
  const auto cov = build_covariance(SqExpKernel(0.1, 0.1), Grid1D(11, 0.0, 1.0));
  EXPECT_NEAR(cov.matrix(3, 4), kOneLengthApart, 1e-15);
  EXPECT_NEAR(cov.matrix(7, 6), kOneLengthApart, 1e-15);
}

TEST(Covariance, FarEntriesVanish) {
  const auto cov = build_covariance(SqExpKernel(0.1, 0.02), Grid1D(101, 0.0, 1.0));
  // Nodes 20 apart are 0.2 = 10 d apart.
  EXPECT_LE(cov.matrix(0, 20), 0.1 * std::exp(-50.0) * (1 + 1e-12));
  EXPECT_LT(cov.matrix(0, 100), 1e-300);
}

TEST(Covariance, ExactlySymmetric) {
  const auto cov = build_covariance(SqExpKernel(0.3, 0.07), Grid1D(64, -1.0, 2.0));
  EXPECT_EQ(cov.matrix, cov.matrix.transpose());
}

TEST(Factor, IdentityGivesIdentity) {
  const Grid1D g(4, 0.0, 1.0);
  const CholeskyFactor f = factor(CovarianceOperator{g, Matrix::Identity(4, 4), 0.0});
  EXPECT_EQ(f.lower(), Matrix::Identity(4, 4));
  EXPECT_EQ(f.jitter(), 0.0);
}

TEST(Factor, OneByOne) {
  const Grid1D g(2, 0.0, 1.0);
  Matrix m(1, 1);
  m << 0.1;
  CovarianceOperator cov{g, m, 0.0};
  EXPECT_THROW(CholeskyFactor(cov, Matrix::Zero(1, 1)), std::invalid_argument);
  const CholeskyFactor f = factor(cov);
  EXPECT_DOUBLE_EQ(f.lower()(0, 0), std::sqrt(0.1));
}

TEST(Factor, ReconstructsWithinTolerance) {
  const double gamma = 0.1;
  const auto cov = build_covariance(SqExpKernel(gamma, 0.02), Grid1D(100, 0.0, 1.0));
  const CholeskyFactor f = factor(cov);
  Matrix target = cov.matrix;
  target.diagonal().array() += f.jitter();
  const Matrix rebuilt = f.lower() * f.lower().transpose();
  EXPECT_LT((rebuilt - target).cwiseAbs().maxCoeff(), 1e-10 * gamma);
  EXPECT_TRUE((f.lower().diagonal().array() > 0.0).all());
  EXPECT_TRUE(f.lower().isLowerTriangular());
}

TEST(Factor, LadderAddsJitterWhenNeeded) {
  // Long correlation length on a fine grid is numerically singular.
  const auto cov = build_covariance(SqExpKernel(0.1, 0.5), Grid1D(200, 0.0, 1.0));
  const CholeskyFactor f = factor(cov);
  EXPECT_GT(f.jitter(), 0.0);
  EXPECT_LE(f.jitter(), 1e-6 * 0.1);
  Matrix target = cov.matrix;
  target.diagonal().array() += f.jitter();
  EXPECT_LT((f.lower() * f.lower().transpose() - target).cwiseAbs().maxCoeff(), 1e-10 * 0.1);
}

TEST(Factor, FailsBeyondLadder) {
  const Grid1D g(2, 0.0, 1.0);
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;  // eigenvalue -1
  EXPECT_THROW(factor(CovarianceOperator{g, m, 0.0}), std::runtime_error);
}

TEST(SamplePrior, ZeroDrawGivesZeroField) {
  const CholeskyFactor f = factor(build_covariance(SqExpKernel(0.1, 0.02), Grid1D(30, 0.0, 1.0)));
  EXPECT_EQ(color_noise(f, Vector::Zero(30)).values, Vector::Zero(30));
  EXPECT_THROW(color_noise(f, Vector::Zero(29)), std::invalid_argument);
}

TEST(SamplePrior, SameSeedSameField) {
  const CholeskyFactor f = factor(build_covariance(SqExpKernel(0.1, 0.02), Grid1D(30, 0.0, 1.0)));
  Rng a(42), b(42), c(43);
  const Field fa = sample_prior(f, a), fb = sample_prior(f, b), fc = sample_prior(f, c);
  EXPECT_EQ(fa.values, fb.values);
  EXPECT_NE(fa.values, fc.values);
}

TEST(SamplePrior, MomentsMatchCovariance) {
  const Grid1D g(25, 0.0, 1.0);
  const auto cov = build_covariance(SqExpKernel(0.1, 0.1), g);
  const CholeskyFactor f = factor(cov);
  Rng rng(7);
  const int n = 100000;
  Matrix acc = Matrix::Zero(25, 25);
  for (int s = 0; s < n; ++s) {
    const Vector v = sample_prior(f, rng).values;
    acc.noalias() += v * v.transpose();
  }
  acc /= n;
  for (Eigen::Index i = 0; i < 25; ++i) {
    EXPECT_NEAR(acc(i, i), cov.matrix(i, i), 0.05 * cov.matrix(i, i)) << "node " << i;
  }
  // Pairs: sample second moment of a zero-mean Gaussian pair has variance
  // (C_ii C_jj + C_ij^2) / n.
  for (auto [i, j] : {std::pair{0, 1}, std::pair{3, 7}, std::pair{5, 20}, std::pair{12, 13}}) {
    const double cij = cov.matrix(i, j);
    const double se = std::sqrt((cov.matrix(i, i) * cov.matrix(j, j) + cij * cij) / n);
    EXPECT_NEAR(acc(i, j), cij, 5.0 * se) << "pair " << i << "," << j;
  }
}

TEST(CameronMartin, ZeroAndFirstColumn) {
  const CholeskyFactor f = factor(build_covariance(SqExpKernel(0.1, 0.05), Grid1D(40, 0.0, 1.0)));
  EXPECT_EQ(cameron_martin_norm_sq(f, Field(f.grid())), 0.0);
  const Field col(f.grid(), f.lower().col(0));
  EXPECT_NEAR(cameron_martin_norm_sq(f, col), 1.0, 1e-10);
}

TEST(CameronMartin, MatchesDenseSolve) {
  const auto cov = build_covariance(SqExpKernel(0.1, 0.05), Grid1D(40, 0.0, 1.0));
  const CholeskyFactor f = factor(cov);
  Matrix shifted = cov.matrix;
  shifted.diagonal().array() += f.jitter();
  const Eigen::FullPivLU<Matrix> lu(shifted);
  testing::for_all(21, 25, [&](testing::Gen& gen) {
    const Field u = gen.field(f.grid());
    const double oracle = u.values.dot(lu.solve(u.values));
    EXPECT_NEAR(cameron_martin_norm_sq(f, u), oracle, 1e-8 * std::abs(oracle));
  });
}

TEST(CameronMartin, PositiveUnlessZero) {
  const CholeskyFactor f = factor(build_covariance(SqExpKernel(0.1, 0.02), Grid1D(50, 0.0, 1.0)));
  testing::for_all(22, 40, [&](testing::Gen& gen) {
    const Field u = gen.field(f.grid(), gen.uniform(1e-3, 10.0));
    EXPECT_GT(cameron_martin_norm_sq(f, u), 0.0);
  });
}

TEST(CameronMartin, RejectsGridMismatch) {
  const CholeskyFactor f = factor(build_covariance(SqExpKernel(0.1, 0.05), Grid1D(10, 0.0, 1.0)));
  EXPECT_THROW(cameron_martin_norm_sq(f, Field(Grid1D(11, 0.0, 1.0))), std::invalid_argument);
}

TEST(GpExact, ZeroDataGivesZeroMean) {
  const Vector loc = Eigen::VectorXd::LinSpaced(5, 0.1, 0.9);
  const auto post = gp_posterior_exact(SqExpKernel(0.1, 0.08), Grid1D(21, 0.0, 1.0),
                                       ObservationSet(loc, Vector::Zero(5), 0.02));
  EXPECT_EQ(post.mean.values, Vector::Zero(21));
}

TEST(GpExact, EmptyObservationsGivePrior) {
  const auto post = gp_posterior_exact(SqExpKernel(0.1, 0.08), Grid1D(5, 0.0, 1.0),
                                       ObservationSet(Vector(0), Vector(0), 0.02));
  EXPECT_EQ(post.mean.values, Vector::Zero(5));
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(post.sd.values[i], std::sqrt(0.1));
}

TEST(GpExact, SingleObservationClosedForm) {
  Vector loc(1), y(1);
  loc << 0.5;
  y << 1.0;
  const auto post = gp_posterior_exact(SqExpKernel(0.1, 0.1), Grid1D(11, 0.0, 1.0),
                                       ObservationSet(loc, y, 0.02));
  EXPECT_NEAR(post.mean.values[5], kSingleObsMean, 1e-14);
}

TEST(GpExact, MatchesDenseOracleAndShrinksVariance) {
  const SqExpKernel k(0.1, 0.08);
  const Grid1D g(41, 0.0, 1.0);
  testing::for_all(23, 10, [&](testing::Gen& gen) {
    const auto m = static_cast<Eigen::Index>(gen.size(1, 12));
    Vector loc(m), y(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      loc[j] = (static_cast<double>(j) + gen.uniform(0.05, 0.95)) / static_cast<double>(m);
      y[j] = gen.normal();
    }
    const double sigma = gen.uniform(0.01, 0.5);
    const auto post = gp_posterior_exact(k, g, ObservationSet(loc, y, sigma));
    Matrix gram(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) gram(i, j) = k(loc[i], loc[j]) + (i == j ? sigma * sigma : 0.0);
    const Eigen::FullPivLU<Matrix> lu(gram);
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vector ks(m);
      for (Eigen::Index j = 0; j < m; ++j) ks[j] = k(loc[j], g.point(i));
      const double mean = ks.dot(lu.solve(y));
      const double var = k.gamma - ks.dot(lu.solve(ks));
      const auto ii = static_cast<Eigen::Index>(i);
      EXPECT_NEAR(post.mean.values[ii], mean, 1e-9 * (1.0 + std::abs(mean)));
      EXPECT_NEAR(post.sd.values[ii], std::sqrt(std::max(var, 0.0)), 1e-7);
      EXPECT_LE(post.sd.values[ii], std::sqrt(k.gamma) * (1.0 + 1e-12));
    }
  });
}

TEST(GpExact, InterpolatesAsNoiseVanishes) {
  Vector loc(4), y(4);
  loc << 0.2, 0.4, 0.6, 0.8;
  y << 0.3, -0.1, 0.7, 0.2;
  const auto post = gp_posterior_exact(SqExpKernel(0.1, 0.1), Grid1D(11, 0.0, 1.0),
                                       ObservationSet(loc, y, 1e-6));
  for (Eigen::Index j = 0; j < 4; ++j) {
    EXPECT_LT(std::abs(post.mean.values[2 + 2 * j] - y[j]), 1e-3);
  }
}

TEST(GpExact, InflatedNoiseShrinksMean) {
  const Vector loc = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
  Vector y(6);
  y << 0.5, -0.4, 1.0, 0.8, -0.2, 0.3;
  const Grid1D g(11, 0.0, 1.0);  // locations sit on nodes 0, 2, ..., 10
  const SqExpKernel k(0.1, 0.08);
  const auto sharp = gp_posterior_exact(k, g, ObservationSet(loc, y, 0.02));
  const auto blurred = gp_posterior_exact(k, g, ObservationSet(loc, y, 2.0));
  for (Eigen::Index j = 0; j < 6; ++j) {
    EXPECT_LT(std::abs(blurred.mean.values[2 * j]), std::abs(sharp.mean.values[2 * j]));
  }
}

TEST(GpExact, Errors) {
  Vector loc(1), y(1);
  loc << 1.5;
  y << 0.0;
  EXPECT_THROW(gp_posterior_exact(SqExpKernel(0.1, 0.1), Grid1D(5, 0.0, 1.0), ObservationSet(loc, y, 0.1)),
               std::out_of_range);
  Vector close(2), y2(2);
  close << 0.5, std::nextafter(0.5, 1.0);
  y2 << 0.0, 1.0;
  EXPECT_THROW(gp_posterior_exact(SqExpKernel(0.1, 0.1), Grid1D(5, 0.0, 1.0),
                                  ObservationSet(close, y2, 1e-200)),
               std::runtime_error);
}

TEST(GpExact, CsvHeader) {
  std::ostringstream os;
  write_gp_csv(os, gp_posterior_exact(SqExpKernel(0.1, 0.1), Grid1D(3, 0.0, 1.0),
                                      ObservationSet(Vector(0), Vector(0), 1.0)));
  EXPECT_EQ(os.str().substr(0, 10), "t,mean,sd\n");
}

}  // namespace
}  // namespace tvg
