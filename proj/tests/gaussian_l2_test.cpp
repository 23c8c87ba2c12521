// Copyright 2026 The latentreg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "latentreg/gaussian_l2.hpp"
#include "oracles.hpp"

namespace latentreg {
namespace {

constexpr double kPi = std::numbers::pi;

Vector random_vector(std::mt19937_64& gen, int d, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(gen);
  return v;
}

PointCloud random_cloud(std::mt19937_64& gen, int n, int d, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  RowMatrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = nd(gen);
  return PointCloud(m);
}

double max_sd(const Eigen::MatrixXd& m) {
  return std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().maxCoeff());
}

TEST(ProductIntegral, IdentityCases) {
  EXPECT_NEAR(gaussian_product_integral(Vector::Zero(1), Matrix::Identity(1, 1),
                                        Matrix::Identity(1, 1)),
              1.0 / std::sqrt(4.0 * kPi), 1e-15);
  const double d20 = gaussian_product_integral(Vector::Zero(20), Matrix::Identity(20, 20),
                                               Matrix::Identity(20, 20));
  EXPECT_NEAR(d20 / std::pow(4.0 * kPi, -10.0), 1.0, 1e-12);
}

TEST(ProductIntegral, MatchesQuadrature1D) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 25; ++trial) {
    const Vector mu = random_vector(gen, 1, 1.5);
    const Matrix s = oracle::random_spd(gen, 1);
    const Matrix g = oracle::random_spd(gen, 1);
    const double closed = gaussian_product_integral(mu, s, g);
    const double half = std::abs(mu(0)) + 12.0 * std::max(max_sd(s), max_sd(g));
    const double quad = oracle::integrate(
        [&](double x) {
          Vector p(1);
          p << x;
          return oracle::gaussian_density(p, mu, s) * oracle::gaussian_density(p, Vector::Zero(1), g);
        },
        -half, half, 1e-13);
    EXPECT_NEAR(closed, quad, 1e-8);
  }
}

TEST(ProductIntegral, MatchesQuadrature2D) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 6; ++trial) {
    const Vector mu = random_vector(gen, 2, 1.0);
    const Matrix s = oracle::random_spd(gen, 2);
    const Matrix g = oracle::random_spd(gen, 2);
    const double closed = gaussian_product_integral(mu, s, g);
    const double half = mu.cwiseAbs().maxCoeff() + 9.0 * std::max(max_sd(s), max_sd(g));
    const double quad = oracle::integrate2d(
        [&](double x, double y) {
          Vector p(2);
          p << x, y;
          return oracle::gaussian_density(p, mu, s) * oracle::gaussian_density(p, Vector::Zero(2), g);
        },
        -half, half, -half, half, 1e-11);
    EXPECT_NEAR(closed, quad, 1e-8);
  }
}

TEST(ProductIntegral, SwapSymmetry) {
  std::mt19937_64 gen(3);
  for (int d : {1, 3, 7}) {
    const Vector mu = random_vector(gen, d, 1.0);
    const Matrix s = oracle::random_spd(gen, d);
    const Matrix g = oracle::random_spd(gen, d);
    const double a = gaussian_product_integral(mu, s, g);
    const double b = gaussian_product_integral(-mu, g, s);
    EXPECT_NEAR(a / b, 1.0, 1e-12);
  }
}

TEST(ProductIntegral, RejectsNonSpd) {
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(gaussian_product_integral(Vector::Zero(2), bad, Matrix::Identity(2, 2)),
               NotPositiveDefinite);
  EXPECT_THROW(gaussian_product_integral(Vector::Zero(3), Matrix::Identity(2, 2),
                                         Matrix::Identity(2, 2)),
               std::invalid_argument);
}

TEST(SphericalIntegral, Examples) {
  EXPECT_NEAR(spherical_product_integral(0.0, 1.0, 1.0, 1), 1.0 / std::sqrt(4.0 * kPi), 1e-15);
  EXPECT_NEAR(spherical_product_integral(2.0, 1.0, 1.0, 1), std::exp(-1.0) / std::sqrt(4.0 * kPi),
              1e-15);
  EXPECT_THROW(spherical_product_integral(1.0, 0.0, 1.0, 2), std::domain_error);
}

TEST(SphericalIntegral, AgreesWithGeneralForm) {
  for (std::size_t d : {1u, 2u, 5u, 20u}) {
    for (double l : {0.0, 0.7, 3.0}) {
      for (auto [s2, g2] : {std::pair{1.0, 1.0}, {0.3, 2.0}, {4.0, 0.5}}) {
        Vector mu = Vector::Zero(static_cast<Eigen::Index>(d));
        mu(0) = l;
        const Matrix id = Matrix::Identity(mu.size(), mu.size());
        const double general = log_gaussian_product_integral(mu, s2 * id, g2 * id);
        const double spherical = log_spherical_product_integral(l, s2, g2, d);
        EXPECT_NEAR(std::exp(spherical - general), 1.0, 1e-12);
      }
    }
  }
}

TEST(GaussianPower, Examples) {
  const auto one = gaussian_power_identity(Vector::Zero(2), Matrix::Identity(2, 2), 1.0);
  EXPECT_NEAR(one.scale, 1.0, 1e-15);
  EXPECT_TRUE(one.component.covariance.isApprox(Matrix::Identity(2, 2)));
  const auto two = gaussian_power_identity(Vector::Zero(1), Matrix::Identity(1, 1), 2.0);
  EXPECT_NEAR(two.scale, 1.0 / std::sqrt(2.0 * kPi) / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(two.component.covariance(0, 0), 0.5, 1e-15);
  EXPECT_THROW(gaussian_power_identity(Vector::Zero(1), Matrix::Identity(1, 1), 0.0),
               std::domain_error);
}

TEST(GaussianPower, PointwiseIdentity) {
  std::mt19937_64 gen(4);
  for (double p : {0.3, 1.7, 2.0, 3.5}) {
    const Vector mu = random_vector(gen, 3, 1.0);
    const Matrix s = oracle::random_spd(gen, 3);
    const auto pw = gaussian_power_identity(mu, s, p);
    for (int k = 0; k < 5; ++k) {
      const Vector x = mu + random_vector(gen, 3, 0.8);
      const double lhs = std::pow(oracle::gaussian_density(x, mu, s), p);
      const double rhs = pw.scale * oracle::gaussian_density(x, mu, s / p);
      EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
    }
  }
}

TEST(SmoothedSample, Validation) {
  PointCloud x(2, 1);
  EXPECT_THROW(SmoothedSample(x, {Bandwidth::spherical(1.0)}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(SmoothedSample(x, {Bandwidth::spherical(1), Bandwidth::spherical(1)}, {0.5, 0.6}),
               std::invalid_argument);
  EXPECT_THROW(Bandwidth::spherical(0.0), std::domain_error);
  EXPECT_NO_THROW(SmoothedSample::uniform(x, 1.0));
}

// integral over the line of (density_a - density_b)^2
double quadrature_distance_1d(const SmoothedSample& a, const SmoothedSample& b) {
  return oracle::integrate(
      [&](double t) {
        Vector p(1);
        p << t;
        const double diff = a.density(p) - b.density(p);
        return diff * diff;
      },
      -16.0, 16.0, 1e-13);
}

TEST(SampleDistance, IdenticalMixturesGiveZero) {
  std::mt19937_64 gen(5);
  const auto a = SmoothedSample::uniform(random_cloud(gen, 6, 3, 1.0), 0.8);
  EXPECT_NEAR(l2_distance_samples(a, a), 0.0, 1e-10);
}

TEST(SampleDistance, SinglePointsClosedForm) {
  for (double l : {0.0, 0.5, 1.0, 3.0}) {
    RowMatrix y(1, 1);
    y << l;
    const auto a = SmoothedSample::uniform(PointCloud(1, 1), 1.0);
    const auto b = SmoothedSample::uniform(PointCloud(y), 1.0);
    const double expected = 2.0 / std::sqrt(4.0 * kPi) * (1.0 - std::exp(-l * l / 4.0));
    EXPECT_NEAR(l2_distance_samples(a, b), expected, 1e-14);
    EXPECT_NEAR(quadrature_distance_1d(a, b), expected, 1e-10);
  }
}

TEST(SampleDistance, MatchesQuadrature1D) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> sig(0.4, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_cloud(gen, 3, 1, 1.0);
    const auto y = random_cloud(gen, 2, 1, 1.0);
    std::vector<Bandwidth> bx, by;
    for (int i = 0; i < 3; ++i) bx.push_back(Bandwidth::spherical(sig(gen)));
    for (int i = 0; i < 2; ++i) by.push_back(Bandwidth::spherical(sig(gen)));
    const SmoothedSample a(x, bx, {0.2, 0.3, 0.5});
    const SmoothedSample b(y, by, {0.6, 0.4});
    EXPECT_NEAR(l2_distance_samples(a, b), quadrature_distance_1d(a, b), 1e-8);
  }
}

TEST(SampleDistance, MatchesQuadrature2DFullCovariance) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 3; ++trial) {
    const auto x = random_cloud(gen, 2, 2, 0.8);
    const auto y = random_cloud(gen, 2, 2, 0.8);
    const SmoothedSample a(x, {Bandwidth::full(oracle::random_spd(gen, 2)), Bandwidth::spherical(0.7)},
                           {0.5, 0.5});
    const SmoothedSample b(y, {Bandwidth::full(oracle::random_spd(gen, 2)),
                               Bandwidth::full(oracle::random_spd(gen, 2))},
                           {0.25, 0.75});
    const double quad = oracle::integrate2d(
        [&](double s, double t) {
          Vector p(2);
          p << s, t;
          const double diff = a.density(p) - b.density(p);
          return diff * diff;
        },
        -12.0, 12.0, -12.0, 12.0, 1e-11);
    EXPECT_NEAR(l2_distance_samples(a, b), quad, 1e-8);
  }
}

TEST(IsotropicDistance, Limits) {
  std::mt19937_64 gen(8);
  const auto x = random_cloud(gen, 5, 2, 1.0);
  EXPECT_NEAR(l2_distance_samples_isotropic(x, x, 0.7), 0.0, 1e-12);
  PointCloud origin(1, 2);
  EXPECT_EQ(l2_distance_samples_isotropic(origin, origin, 1.0), 0.0);
  RowMatrix far(1, 2);
  far << 100.0, 0.0;
  EXPECT_NEAR(l2_distance_samples_isotropic(origin, PointCloud(far), 1.0), 2.0, 1e-12);
}

TEST(IsotropicDistance, ScalesToGeneralForm) {
  std::mt19937_64 gen(9);
  for (int d = 1; d <= 5; ++d) {
    for (double sigma : {0.5, 1.0, 1.8}) {
      const auto x = random_cloud(gen, 4, d, 1.0);
      const auto y = random_cloud(gen, 3, d, 1.2);
      const double iso = l2_distance_samples_isotropic(x, y, sigma);
      const double general = l2_distance_samples(SmoothedSample::uniform(x, sigma),
                                                 SmoothedSample::uniform(y, sigma));
      EXPECT_NEAR(iso * std::pow(4.0 * kPi * sigma * sigma, -0.5 * d) / general, 1.0, 1e-9);
    }
  }
}

TEST(IsotropicDistance, DimensionMismatch) {
  EXPECT_THROW(l2_distance_samples_isotropic(PointCloud(2, 2), PointCloud(2, 3), 1.0),
               std::invalid_argument);
}

TEST(DistanceToPrior, SingleStandardGaussianIsZero) {
  EXPECT_NEAR(l2_distance_to_standard_gaussian(PointCloud(1, 4), {Bandwidth::spherical(1.0)}, true),
              0.0, 1e-14);
  EXPECT_NEAR(l2_distance_to_standard_gaussian_unit(PointCloud(1, 4)), 0.0, 1e-14);
}

TEST(DistanceToPrior, UnitFormMatchesScaledGeneral) {
  std::mt19937_64 gen(10);
  for (int d : {1, 2, 5, 20}) {
    const auto x = random_cloud(gen, 7, d, 1.0);
    const std::vector<Bandwidth> unit(7, Bandwidth::spherical(1.0));
    EXPECT_NEAR(l2_distance_to_standard_gaussian(x, unit, true),
                l2_distance_to_standard_gaussian_unit(x), 1e-12);
  }
}

TEST(DistanceToPrior, MatchesQuadrature1D) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> sig(0.4, 1.6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_cloud(gen, 2, 1, 1.2);
    const std::vector<Bandwidth> bw = {Bandwidth::spherical(sig(gen)),
                                       Bandwidth::spherical(sig(gen))};
    const double quad = oracle::integrate(
        [&](double t) {
          Vector p(1);
          p << t;
          double mix = 0.0;
          for (int i = 0; i < 2; ++i) {
            Vector c(1);
            c << x.matrix()(i, 0);
            mix += 0.5 * oracle::gaussian_density(p, c, bw[i].covariance(1));
          }
          const double diff = mix - oracle::gaussian_density(p, Vector::Zero(1), Matrix::Identity(1, 1));
          return diff * diff;
        },
        -16.0, 16.0, 1e-13);
    EXPECT_NEAR(l2_distance_to_standard_gaussian(x, bw), quad, 1e-8);
  }
}

TEST(DistanceToPrior, OrderIndependent) {
  std::mt19937_64 gen(12);
  const auto x = random_cloud(gen, 30, 3, 1.0);
  RowMatrix rev = x.matrix().colwise().reverse();
  const std::vector<Bandwidth> bw(30, Bandwidth::spherical(0.9));
  const double a = l2_distance_to_standard_gaussian(x, bw);
  const double b = l2_distance_to_standard_gaussian(PointCloud(rev), bw);
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST(MeanField, SigmaAtOriginIsOne) {
  for (std::size_t d : {1u, 2u, 5u, 20u, 50u}) EXPECT_NEAR(mean_field_sigma(0.0, d), 1.0, 1e-6);
}

TEST(MeanField, ApproximateRule) {
  const double r = std::sqrt(20.0);
  EXPECT_NEAR(mean_field_sigma(r, 20) / 1.5, 1.0, 0.15);
}

TEST(MeanField, LocallyOptimal) {
  for (double r : {0.0, 1.0, 3.0, 4.5, 8.0}) {
    const double s = mean_field_sigma(r, 20);
    const double f = mean_field_objective(s, r, 20);
    EXPECT_LE(f, mean_field_objective(s * (1 + 1e-3), r, 20));
    EXPECT_LE(f, mean_field_objective(s * (1 - 1e-3), r, 20));
  }
}

}  // namespace
}  // namespace latentreg
