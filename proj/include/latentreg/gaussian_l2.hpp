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

// Closed-form L2 geometry of Gaussian mixtures.
//
// The basic quantity is the overlap integral of two Gaussian densities
//
//   d(mu, S, G) = int rho_{mu,S}(x) rho_{0,G}(x) dx
//               = exp(-1/2 mu^T S^-1 (S^-1 + G^-1)^-1 G^-1 mu)
//                 / sqrt((2 pi)^D |S| |G| |S^-1 + G^-1|).
//
// Squared L2 distances between KDE-smoothed samples are weighted double
// sums of these overlaps. Everything is evaluated through Cholesky
// factors and log-determinants; the (2 pi)^D style normalizers are only
// exponentiated at the end, so D = 20 stays representable.
//
// These distances degrade in high dimension (Gaussians there are thin
// shells rather than balls) and are meant for validation, low-D work and
// mixture fitting.

#ifndef LATENTREG_GAUSSIAN_L2_HPP_
#define LATENTREG_GAUSSIAN_L2_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "latentreg/common.hpp"
#include "latentreg/sampling.hpp"

namespace latentreg {

/// Thrown when a covariance fails Cholesky factorization.
class NotPositiveDefinite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2 pi)
inline constexpr double kLog4Pi = 2.5310242469692907930;              // ln(4 pi)

inline Eigen::LLT<Matrix> factor_spd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw NotPositiveDefinite(std::string(what) + ": not square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NotPositiveDefinite(std::string(what) + ": not symmetric");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite(std::string(what) + ": not positive definite");
  return llt;
}

inline double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/// N(center, covariance) with SPD covariance.
struct GaussianComponent {
  Vector center;
  Matrix covariance;

  GaussianComponent(Vector c, Matrix cov) : center(std::move(c)), covariance(std::move(cov)) {
    if (center.size() != covariance.rows())
      throw std::invalid_argument("GaussianComponent: dimension mismatch");
    detail::factor_spd(covariance, "GaussianComponent");
  }

  double log_density(const Vector& x) const {
    const auto llt = detail::factor_spd(covariance, "GaussianComponent");
    const Vector diff = x - center;
    const Vector w = llt.matrixL().solve(diff);
    const double d = static_cast<double>(center.size());
    return -0.5 * (w.squaredNorm() + d * detail::kLog2Pi + detail::log_det(llt));
  }

  double density(const Vector& x) const { return std::exp(log_density(x)); }
};

/// log of the overlap integral d(mu, sigma, gamma), evaluated with the
/// (S^-1 + G^-1) form.
inline double log_gaussian_product_integral(const Vector& mu, const Matrix& sigma,
                                            const Matrix& gamma) {
  const Eigen::Index d = mu.size();
  if (sigma.rows() != d || gamma.rows() != d)
    throw std::invalid_argument("gaussian_product_integral: dimension mismatch");
  const auto llt_s = detail::factor_spd(sigma, "sigma");
  const auto llt_g = detail::factor_spd(gamma, "gamma");
  const Matrix id = Matrix::Identity(d, d);
  const Matrix s_inv = llt_s.solve(id);
  const Matrix g_inv = llt_g.solve(id);
  Matrix precision_sum = s_inv + g_inv;
  precision_sum = 0.5 * (precision_sum + precision_sum.transpose()).eval();
  const auto llt_p = detail::factor_spd(precision_sum, "sigma^-1 + gamma^-1");
  const Vector a = s_inv * mu;
  const Vector b = g_inv * mu;
  const double quad = a.dot(llt_p.solve(b));
  return -0.5 * quad - 0.5 * (static_cast<double>(d) * detail::kLog2Pi + detail::log_det(llt_s) +
                              detail::log_det(llt_g) + detail::log_det(llt_p));
}

inline double gaussian_product_integral(const Vector& mu, const Matrix& sigma,
                                        const Matrix& gamma) {
  return std::exp(log_gaussian_product_integral(mu, sigma, gamma));
}

/// log of d(l e, sigma2 I, gamma2 I) for any unit vector e.
inline double log_spherical_product_integral(double l, double sigma2, double gamma2,
                                             std::size_t dim) {
  detail::require_domain(sigma2 > 0.0 && gamma2 > 0.0,
                         "spherical_product_integral: variances must be > 0");
  const double s = sigma2 + gamma2;
  return -0.5 * l * l / s - 0.5 * static_cast<double>(dim) * (detail::kLog2Pi + std::log(s));
}

inline double spherical_product_integral(double l, double sigma2, double gamma2,
                                         std::size_t dim) {
  return std::exp(log_spherical_product_integral(l, sigma2, gamma2, dim));
}

/// rho_{mu,S}^p = scale * rho_{mu,S/p}.
struct GaussianPower {
  double scale;
  GaussianComponent component;
};

inline GaussianPower gaussian_power_identity(const Vector& mu, const Matrix& sigma, double p) {
  detail::require_domain(p > 0.0, "gaussian_power_identity: p must be > 0");
  const auto llt = detail::factor_spd(sigma, "sigma");
  const double d = static_cast<double>(mu.size());
  // |2 pi S| = (2 pi)^D |S|
  const double log_det_2pi = d * detail::kLog2Pi + detail::log_det(llt);
  const double log_scale = 0.5 * log_det_2pi * (1.0 - p) - 0.5 * d * std::log(p);
  return {std::exp(log_scale), GaussianComponent(mu, sigma / p)};
}

/// Per-point smoothing kernel: sigma^2 I or a full SPD covariance.
/// A full covariance may depend on the point position; callers supply it.
class Bandwidth {
 public:
  static Bandwidth spherical(double sigma) {
    detail::require_domain(sigma > 0.0, "Bandwidth: sigma must be > 0");
    return Bandwidth(sigma);
  }
  static Bandwidth full(Matrix covariance) {
    detail::factor_spd(covariance, "Bandwidth");
    return Bandwidth(std::move(covariance));
  }

  bool is_spherical() const { return std::holds_alternative<double>(value_); }
  double sigma() const { return std::get<double>(value_); }
  double variance() const { return sigma() * sigma(); }

  Matrix covariance(Eigen::Index dim) const {
    if (is_spherical()) return variance() * Matrix::Identity(dim, dim);
    const auto& m = std::get<Matrix>(value_);
    if (m.rows() != dim) throw std::invalid_argument("Bandwidth: dimension mismatch");
    return m;
  }

 private:
  explicit Bandwidth(double s) : value_(s) {}
  explicit Bandwidth(Matrix m) : value_(std::move(m)) {}
  std::variant<double, Matrix> value_;
};

/// Log overlap of Gaussians centred at two points differing by `diff`.
inline double log_pair_overlap(const Vector& diff, const Bandwidth& a, const Bandwidth& b) {
  const auto dim = diff.size();
  if (a.is_spherical() && b.is_spherical())
    return log_spherical_product_integral(diff.norm(), a.variance(), b.variance(),
                                          static_cast<std::size_t>(dim));
  return log_gaussian_product_integral(diff, a.covariance(dim), b.covariance(dim));
}

/// Weighted Gaussian mixture centred on the points of a cloud.
struct SmoothedSample {
  PointCloud points;
  std::vector<Bandwidth> bandwidths;
  std::vector<double> weights;

  SmoothedSample(PointCloud pts, std::vector<Bandwidth> bw, std::vector<double> w)
      : points(std::move(pts)), bandwidths(std::move(bw)), weights(std::move(w)) {
    if (bandwidths.size() != points.size() || weights.size() != points.size())
      throw std::invalid_argument("SmoothedSample: bandwidth/weight count != point count");
    KahanSum total;
    for (double v : weights) {
      if (!(v > 0.0)) throw std::invalid_argument("SmoothedSample: weights must be > 0");
      total += v;
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
      throw std::invalid_argument("SmoothedSample: weights must sum to 1");
  }

  /// Equal weights 1/n, all bandwidths sigma^2 I.
  static SmoothedSample uniform(PointCloud pts, double sigma) {
    const auto n = pts.size();
    return SmoothedSample(std::move(pts), std::vector<Bandwidth>(n, Bandwidth::spherical(sigma)),
                          std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.dim(); }

  double density(const Vector& x) const {
    const auto d = static_cast<Eigen::Index>(dim());
    KahanSum s;
    for (std::size_t i = 0; i < size(); ++i) {
      GaussianComponent g(points.point(i).transpose(), bandwidths[i].covariance(d));
      s += weights[i] * g.density(x);
    }
    return s.value();
  }
};

namespace detail {

// sum_{i,j} w_i v_j exp(log d(x_i - y_j, A_i, B_j) + shift)
inline double cross_overlap_sum(const SmoothedSample& a, const SmoothedSample& b, double shift) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Vector diff = (a.points.point(i) - b.points.point(j)).transpose();
      s += a.weights[i] * b.weights[j] *
           std::exp(log_pair_overlap(diff, a.bandwidths[i], b.bandwidths[j]) + shift);
    }
  }
  return s.value();
}

inline double clip_distance(double v, const char* what) {
  if (v < -1e-10) throw NumericError(std::string(what) + ": negative squared distance");
  return v < 0.0 ? 0.0 : v;
}

}  // namespace detail

/// Squared L2 distance between two smoothed samples.
inline double l2_distance_samples(const SmoothedSample& a, const SmoothedSample& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("l2_distance_samples: dimension mismatch");
  const double v = detail::cross_overlap_sum(a, a, 0.0) + detail::cross_overlap_sum(b, b, 0.0) -
                   2.0 * detail::cross_overlap_sum(a, b, 0.0);
  return detail::clip_distance(v, "l2_distance_samples");
}

/// Equal-weight, common sigma^2 I case with the sqrt(4 pi sigma^2)^D factor
/// removed: kernel exp(-|u - v|^2 / (4 sigma^2)).
inline double l2_distance_samples_isotropic(const PointCloud& x, const PointCloud& y,
                                            double sigma) {
  if (x.dim() != y.dim())
    throw std::invalid_argument("l2_distance_samples_isotropic: dimension mismatch");
  detail::require_domain(sigma > 0.0, "l2_distance_samples_isotropic: sigma must be > 0");
  const double inv = 1.0 / (4.0 * sigma * sigma);
  auto mean_kernel = [inv](const PointCloud& p, const PointCloud& q) {
    KahanSum s;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j)
        s += std::exp(-(p.point(i) - q.point(j)).squaredNorm() * inv);
    return s.value() / (static_cast<double>(p.size()) * static_cast<double>(q.size()));
  };
  const double v = mean_kernel(x, x) + mean_kernel(y, y) - 2.0 * mean_kernel(x, y);
  return detail::clip_distance(v, "l2_distance_samples_isotropic");
}

/// Squared L2 distance between the equal-weight mixture
/// (1/n) sum_i N(x_i, S_i) and N(0, I).
///
/// With `scaled` the result is multiplied by sqrt(4 pi)^D, which makes the
/// prior's self-overlap exactly 1.
inline double l2_distance_to_standard_gaussian(const PointCloud& x,
                                               const std::vector<Bandwidth>& bandwidths,
                                               bool scaled = false) {
  if (bandwidths.size() != x.size())
    throw std::invalid_argument("l2_distance_to_standard_gaussian: bandwidth count mismatch");
  const auto n = x.size();
  const auto dim = static_cast<Eigen::Index>(x.dim());
  const double shift = scaled ? 0.5 * static_cast<double>(dim) * detail::kLog4Pi : 0.0;
  const auto unit = Bandwidth::spherical(1.0);

  KahanSum self;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Vector diff = (x.point(i) - x.point(j)).transpose();
      self += std::exp(log_pair_overlap(diff, bandwidths[i], bandwidths[j]) + shift);
    }
  KahanSum cross;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector xi = x.point(i).transpose();
    cross += std::exp(log_pair_overlap(xi, bandwidths[i], unit) + shift);
  }
  const double nd = static_cast<double>(n);
  const double prior = std::exp(shift - 0.5 * static_cast<double>(dim) * detail::kLog4Pi);
  const double v = self.value() / (nd * nd) + prior - 2.0 / nd * cross.value();
  return detail::clip_distance(v, "l2_distance_to_standard_gaussian");
}

/// Scaled distance to N(0, I) for sigma_i = 1:
/// 1 + 1/n + (2/n^2) sum_{i<j} e^{-|x_i-x_j|^2/4} - (2/n) sum_i e^{-|x_i|^2/4}.
inline double l2_distance_to_standard_gaussian_unit(const PointCloud& x) {
  const auto n = x.size();
  const double nd = static_cast<double>(n);
  KahanSum pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pairs += std::exp(-0.25 * (x.point(i) - x.point(j)).squaredNorm());
  KahanSum radial;
  for (std::size_t i = 0; i < n; ++i) radial += std::exp(-0.25 * x.point(i).squaredNorm());
  const double v = 1.0 + 1.0 / nd + 2.0 / (nd * nd) * pairs.value() - 2.0 / nd * radial.value();
  return detail::clip_distance(v, "l2_distance_to_standard_gaussian_unit");
}

/// Mean-field cost of bandwidth sigma for a point at radius r, with all
/// other points assumed to follow N(0, I) exactly:
///   (4 pi sigma^2)^{-D/2} + (4 pi)^{-D/2} - 2 e^{-r^2/(2(1+sigma^2))} / (2 pi (1+sigma^2))^{D/2}.
inline double mean_field_objective(double sigma, double r, std::size_t dim) {
  const double d = static_cast<double>(dim);
  const double s2 = 1.0 + sigma * sigma;
  return std::exp(-0.5 * d * (detail::kLog4Pi + 2.0 * std::log(sigma))) +
         std::exp(-0.5 * d * detail::kLog4Pi) -
         2.0 * std::exp(-0.5 * r * r / s2 - 0.5 * d * (detail::kLog2Pi + std::log(s2)));
}

/// Bandwidth minimizing mean_field_objective over [0.25, 8]: log-grid scan,
/// then golden-section search down to a 1e-8 bracket.
inline double mean_field_sigma(double r, std::size_t dim) {
  detail::require_domain(r >= 0.0, "mean_field_sigma: r must be >= 0");
  detail::require(dim >= 1, "mean_field_sigma: dim must be >= 1");
  const double d = static_cast<double>(dim);
  // Objective times (4 pi)^{D/2}; same minimizer, no underflow.
  auto cost = [&](double sigma) {
    const double s2 = 1.0 + sigma * sigma;
    return std::exp(-d * std::log(sigma)) + 1.0 -
           2.0 * std::exp(-0.5 * r * r / s2 + 0.5 * d * std::log(2.0 / s2));
  };
  // The cost is flat near 1 for large sigma in high dimension, so a coarse
  // log grid picks the basin before golden section refines it.
  constexpr int kGrid = 64;
  auto grid = [](int k) { return 0.25 * std::pow(32.0, static_cast<double>(k) / kGrid); };
  int best = 0;
  double best_cost = cost(grid(0));
  for (int k = 1; k <= kGrid; ++k) {
    const double v = cost(grid(k));
    if (v < best_cost) {
      best = k;
      best_cost = v;
    }
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid(std::max(best - 1, 0));
  double b = grid(std::min(best + 1, kGrid));
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = cost(c);
  double fe = cost(e);
  while (b - a > 1e-8) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = cost(e);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace latentreg

#endif  // LATENTREG_GAUSSIAN_L2_HPP_
