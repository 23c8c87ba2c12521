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

// Attraction of empirical distributions to target CDFs.
//
// For a cloud x_1..x_n in R^D the radii r_i = |x_i|^2 and the half squared
// distances d_ij = |x_i - x_j|^2 / 2 (i < j) of an N(0, I) sample both
// follow chi^2_D. Sorting each statistic pairs the value of rank k with the
// target quantile c_k = F^-1((k - 0.5) / len), and
//
//   dbar = (w_r / n) sum_k |r_(k) - c_k| + (w_d / n') sum_k |d_(k) - c'_k|
//
// is the area between the empirical distribution functions and the target
// CDFs (n' = n(n-1)/2). Its subgradient moves each point along x_i for the
// radius term and along x_i - x_j for every pair it belongs to.
//
// The coordinate-wise variant ranks each coordinate separately and pulls a
// point toward F_j^-1((rank - 0.5) / n); it covers Gaussian, uniform,
// torus and quantized (codeword-seeking) priors.

#ifndef LATENTREG_CDF_ATTRACT_HPP_
#define LATENTREG_CDF_ATTRACT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "latentreg/common.hpp"
#include "latentreg/sampling.hpp"
#include "latentreg/specfun.hpp"

namespace latentreg {

enum class GradientMode {
  exact_subgradient,  // true subgradient of dbar
  paper_verbatim,     // distance term with coefficient 2/n' as in the reference listing
};

enum class NormKind { l1, l2 };

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

/// Quantile table F^-1((k - 0.5) / len), k = 1..len.
template <class InvCdf>
std::vector<double> midpoint_quantiles(std::size_t len, InvCdf&& inv_cdf) {
  std::vector<double> table(len);
  const double l = static_cast<double>(len);
  for (std::size_t k = 0; k < len; ++k)
    table[k] = inv_cdf((static_cast<double>(k) + 0.5) / l);
  return table;
}

/// Midpoint quantiles of an empirical reference sample (nearest rank).
/// Stand-in for targets without an analytic inverse CDF.
inline std::vector<double> empirical_quantile_table(std::span<const double> sample,
                                                    std::size_t len) {
  if (sample.empty()) throw std::invalid_argument("empirical_quantile_table: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  return midpoint_quantiles(len, [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * m));
    return sorted[std::min(idx, sorted.size() - 1)];
  });
}

/// Target quantiles for radii (length n) and pair distances (length n').
struct TargetQuantiles {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> radii;
  std::vector<double> distances;

  /// chi^2_dim tables for both statistics.
  static TargetQuantiles chi_square(std::size_t n, std::size_t dim) {
    if (n < 2) throw std::invalid_argument("build_target_quantiles: need n >= 2");
    const ChiSquare chi2(static_cast<int>(dim));
    auto inv = [&](double q) { return chi2.inv_cdf(q); };
    return {n, dim, midpoint_quantiles(n, inv), midpoint_quantiles(pair_count(n), inv)};
  }

  /// Tables taken from reference samples of each statistic.
  static TargetQuantiles empirical(std::size_t n, std::size_t dim,
                                   std::span<const double> radii_sample,
                                   std::span<const double> distance_sample) {
    if (n < 2) throw std::invalid_argument("TargetQuantiles: need n >= 2");
    return {n, dim, empirical_quantile_table(radii_sample, n),
            empirical_quantile_table(distance_sample, pair_count(n))};
  }

  std::size_t pairs() const { return distances.size(); }
};

inline TargetQuantiles build_target_quantiles(std::size_t n, std::size_t dim) {
  return TargetQuantiles::chi_square(n, dim);
}

/// Values with their sorting permutation; ties broken by element index.
struct SortedStat {
  std::vector<double> values;
  std::vector<std::uint32_t> order;          // rank -> element
  std::vector<std::uint32_t> inverse_order;  // element -> rank

  static SortedStat from_values(std::vector<double> v) {
    SortedStat s;
    const auto len = v.size();
    std::vector<std::pair<double, std::uint32_t>> keyed(len);
    for (std::size_t i = 0; i < len; ++i) keyed[i] = {v[i], static_cast<std::uint32_t>(i)};
    std::sort(keyed.begin(), keyed.end());
    s.order.resize(len);
    s.inverse_order.resize(len);
    for (std::size_t r = 0; r < len; ++r) {
      s.order[r] = keyed[r].second;
      s.inverse_order[keyed[r].second] = static_cast<std::uint32_t>(r);
    }
    s.values = std::move(v);
    return s;
  }

  std::size_t size() const { return values.size(); }
  double sorted(std::size_t rank) const { return values[order[rank]]; }
};

struct RadiiAndDistances {
  SortedStat radii;      // element i = point i
  SortedStat distances;  // element k = k-th pair (i<j) in row-major order
};

/// r_i = |x_i|^2 and d_ij = |x_i - x_j|^2 / 2 for i < j, pairs enumerated
/// as (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline RadiiAndDistances radii_and_distances(const PointCloud& x) {
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  if (n < 2) throw std::invalid_argument("radii_and_distances: need n >= 2");
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = rows::dot(x.row_ptr(i), x.row_ptr(i), d);
  std::vector<double> dist;
  dist.reserve(pair_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist.push_back(0.5 * rows::sq_dist(x.row_ptr(i), x.row_ptr(j), d));
  return {SortedStat::from_values(std::move(r)), SortedStat::from_values(std::move(dist))};
}

struct CdfOptions {
  GradientMode mode = GradientMode::exact_subgradient;
  NormKind norm = NormKind::l1;
  double radii_weight = 1.0;
  double distance_weight = 1.0;
};

struct CdfTerms {
  double radii = 0.0;      // unweighted radius term
  double distances = 0.0;  // unweighted distance term
  double total = 0.0;      // weighted sum
};

struct CdfEvaluation {
  CdfTerms terms;
  GradientField gradient;
};

namespace detail {

inline void check_targets(const PointCloud& x, const TargetQuantiles& t) {
  if (t.radii.size() != x.size() || t.distances.size() != pair_count(x.size()))
    throw std::invalid_argument("cdf_objective: target table sizes do not match the cloud");
}

inline double mismatch(double diff, NormKind norm) {
  return norm == NormKind::l1 ? std::abs(diff) : diff * diff;
}

// d mismatch / d diff, with the l1 sign convention sgn(0) = 0.
inline double mismatch_slope(double diff, NormKind norm, GradientMode mode) {
  if (norm == NormKind::l1) return sgn(diff);
  // the verbatim l2 variant substitutes the bracket for the sign
  return mode == GradientMode::exact_subgradient ? 2.0 * diff : diff;
}

inline CdfTerms matched_terms(const RadiiAndDistances& stats, const TargetQuantiles& t,
                              const CdfOptions& opts) {
  KahanSum r;
  for (std::size_t k = 0; k < stats.radii.size(); ++k)
    r += mismatch(stats.radii.sorted(k) - t.radii[k], opts.norm);
  KahanSum d;
  for (std::size_t k = 0; k < stats.distances.size(); ++k)
    d += mismatch(stats.distances.sorted(k) - t.distances[k], opts.norm);
  CdfTerms terms;
  terms.radii = r.value() / static_cast<double>(stats.radii.size());
  terms.distances = d.value() / static_cast<double>(stats.distances.size());
  terms.total = opts.radii_weight * terms.radii + opts.distance_weight * terms.distances;
  return terms;
}

}  // namespace detail

inline CdfTerms cdf_objective_terms(const PointCloud& x, const TargetQuantiles& targets,
                                    const CdfOptions& opts = {}) {
  detail::check_targets(x, targets);
  return detail::matched_terms(radii_and_distances(x), targets, opts);
}

/// dbar, the weighted radius + distance mismatch.
inline double cdf_objective(const PointCloud& x, const TargetQuantiles& targets,
                            const CdfOptions& opts = {}) {
  return cdf_objective_terms(x, targets, opts).total;
}

/// Objective and gradient from one sort of each statistic.
inline CdfEvaluation evaluate_cdf(const PointCloud& x, const TargetQuantiles& targets,
                                  const CdfOptions& opts = {}) {
  detail::check_targets(x, targets);
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  const auto stats = radii_and_distances(x);
  CdfEvaluation out{detail::matched_terms(stats, targets, opts), GradientField(n, d)};
  auto& g = out.gradient;

  // d r_i / d x_i = 2 x_i
  const double radius_coef = opts.radii_weight * 2.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = stats.radii.values[i] - targets.radii[stats.radii.inverse_order[i]];
    const double w = radius_coef * detail::mismatch_slope(diff, opts.norm, opts.mode);
    if (w == 0.0) continue;
    const double* xi = x.row_ptr(i);
    double* gi = g.row_ptr(i);
    for (std::size_t k = 0; k < d; ++k) gi[k] += w * xi[k];
  }

  // d d_ij / d x_i = x_i - x_j
  const double pair_scale = opts.mode == GradientMode::paper_verbatim ? 2.0 : 1.0;
  const double distance_coef =
      opts.distance_weight * pair_scale / static_cast<double>(stats.distances.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const double diff =
          stats.distances.values[k] - targets.distances[stats.distances.inverse_order[k]];
      const double w = distance_coef * detail::mismatch_slope(diff, opts.norm, opts.mode);
      if (w == 0.0) continue;
      rows::add_pair(w, x.row_ptr(i), x.row_ptr(j), g.row_ptr(i), g.row_ptr(j), d);
    }
  }
  return out;
}

inline GradientField cdf_gradient(const PointCloud& x, const TargetQuantiles& targets,
                                  const CdfOptions& opts = {}) {
  return evaluate_cdf(x, targets, opts).gradient;
}

/// x - alpha * g for the whole cloud.
inline PointCloud apply_step(const PointCloud& x, const GradientField& g, double alpha) {
  if (!g.matches(x)) throw std::invalid_argument("apply_step: gradient shape mismatch");
  RowMatrix next = x.matrix() - alpha * g.matrix();
  if (!next.allFinite()) throw NumericError("apply_step: non-finite coordinates");
  return PointCloud(std::move(next));
}

struct AttractionStep {
  PointCloud next;
  double objective;  // before the step
};

inline AttractionStep attraction_step(const PointCloud& x, const TargetQuantiles& targets,
                                      double alpha, const CdfOptions& opts = {}) {
  detail::require_domain(alpha >= 0.0, "attraction_step: alpha must be >= 0");
  auto eval = evaluate_cdf(x, targets, opts);
  return {apply_step(x, eval.gradient, alpha), eval.terms.total};
}

// ---------------------------------------------------------------------------
// Coordinate-wise attraction

/// Independent per-coordinate target distribution.
struct CoordinateTarget {
  enum class Kind { gaussian, uniform01, quantized_uniform, torus_uniform01 };

  Kind kind = Kind::gaussian;
  int bits = 0;  // quantized_uniform only

  static CoordinateTarget gaussian() { return {Kind::gaussian, 0}; }
  static CoordinateTarget uniform01() { return {Kind::uniform01, 0}; }
  static CoordinateTarget torus() { return {Kind::torus_uniform01, 0}; }
  static CoordinateTarget quantized(int k) {
    if (k < 1 || k > 30) throw std::domain_error("CoordinateTarget: bits must be in [1, 30]");
    return {Kind::quantized_uniform, k};
  }

  /// Staircase CDF of the quantized target: 2^-k floor(2^k v + 0.5).
  double quantized_cdf(double v) const {
    const double levels = std::ldexp(1.0, bits);
    return std::floor(levels * v + 0.5) / levels;
  }

  /// Ideal coordinate for 0-based rank s among n values.
  double position(std::size_t rank, std::size_t n) const {
    const double nd = static_cast<double>(n);
    const double s = static_cast<double>(rank);
    switch (kind) {
      case Kind::gaussian:
        return normal_inv_cdf((s + 0.5) / nd);
      case Kind::uniform01:
      case Kind::torus_uniform01:
        return (s + 0.5) / nd;
      case Kind::quantized_uniform: {
        const double levels = std::ldexp(1.0, bits);
        return (std::floor(levels * s / nd) + 0.5) / levels;
      }
    }
    return 0.0;
  }
};

namespace detail {

inline double wrap01(double v) {
  double w = v - std::floor(v);
  return w >= 1.0 ? 0.0 : w;
}

}  // namespace detail

/// Ideal position of every point, coordinate by coordinate (stable ranks).
/// Torus targets rank the coordinates after reduction modulo 1.
inline PointCloud coordinate_targets(const PointCloud& x, const CoordinateTarget& target) {
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  RowMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const bool torus = target.kind == CoordinateTarget::Kind::torus_uniform01;
  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x.row_ptr(i)[j];
      column[i] = torus ? detail::wrap01(v) : v;
    }
    const auto ranked = SortedStat::from_values(column);
    for (std::size_t i = 0; i < n; ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          target.position(ranked.inverse_order[i], n);
  }
  return PointCloud(std::move(out));
}

/// x + alpha (x~ - x). On the torus the move follows the shorter wrapped
/// displacement and the result is reduced modulo 1.
inline PointCloud coordinate_step(const PointCloud& x, const CoordinateTarget& target,
                                  double alpha) {
  detail::require_domain(alpha > 0.0 && alpha <= 1.0, "coordinate_step: alpha must be in (0,1]");
  const PointCloud ideal = coordinate_targets(x, target);
  RowMatrix next = x.matrix();
  if (target.kind != CoordinateTarget::Kind::torus_uniform01) {
    if (alpha == 1.0) return ideal;
    next += alpha * (ideal.matrix() - x.matrix());
    return PointCloud(std::move(next));
  }
  for (Eigen::Index i = 0; i < next.rows(); ++i) {
    for (Eigen::Index j = 0; j < next.cols(); ++j) {
      const double v = detail::wrap01(next(i, j));
      double delta = ideal.matrix()(i, j) - v;
      if (delta >= 0.5) delta -= 1.0;
      if (delta < -0.5) delta += 1.0;
      next(i, j) = detail::wrap01(v + alpha * delta);
    }
  }
  return PointCloud(std::move(next));
}

}  // namespace latentreg

#endif  // LATENTREG_CDF_ATTRACT_HPP_
