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

// Special functions behind the target CDFs: the regularized incomplete
// gamma function, the chi-squared distribution and the standard normal.
//
// P(a,x) uses the power series for x < a+1 and the Lentz continued fraction
// for Q(a,x) = 1 - P(a,x) otherwise. Upper-tail probabilities are kept as Q
// so that inverse CDFs stay accurate as q -> 1.

#ifndef LATENTREG_SPECFUN_HPP_
#define LATENTREG_SPECFUN_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "latentreg/common.hpp"

namespace latentreg {

namespace detail {

constexpr int kGammaMaxIter = 100000;
constexpr double kGammaEps = 1e-16;

inline double log_gamma_prefactor(double a, double x) {
  return -x + a * std::log(x) - std::lgamma(a);
}

// P(a,x) by series; converges fast for x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kGammaMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(log_gamma_prefactor(a, x));
}

// Q(a,x) by modified Lentz continued fraction; used for x >= a+1.
inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return std::exp(log_gamma_prefactor(a, x)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double reg_lower_gamma(double a, double x) {
  detail::require_domain(a > 0.0 && std::isfinite(a), "reg_lower_gamma: a must be > 0");
  detail::require_domain(x >= 0.0, "reg_lower_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double reg_upper_gamma(double a, double x) {
  detail::require_domain(a > 0.0 && std::isfinite(a), "reg_upper_gamma: a must be > 0");
  detail::require_domain(x >= 0.0, "reg_upper_gamma: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_continued_fraction(a, x);
}

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal quantile: Acklam's rational approximation followed by
/// one Halley correction against erfc, good to a few ulps.
inline double normal_inv_cdf(double q) {
  detail::require_domain(q > 0.0 && q < 1.0, "normal_inv_cdf: q must lie in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double q_low = 0.02425;
  double x;
  if (q < q_low) {
    const double t = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else if (q <= 1.0 - q_low) {
    const double t = q - 0.5;
    const double r = t * t;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double t = std::sqrt(-2.0 * std::log1p(-q));
    x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  // Halley step; the residual is formed on whichever tail is smaller.
  for (int it = 0; it < 2; ++it) {
    const double err = x < 0.0 ? normal_cdf(x) - q : (1.0 - q) - normal_cdf(-x);
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

/// Chi-squared distribution with `dof` degrees of freedom.
class ChiSquare {
 public:
  explicit ChiSquare(int dof) : dof_(dof) {
    if (dof < 1) throw std::domain_error("ChiSquare: dof must be >= 1");
  }

  int dof() const { return dof_; }

  double cdf(double x) const {
    detail::require_domain(x >= 0.0, "chi2_cdf: x must be >= 0");
    return reg_lower_gamma(0.5 * dof_, 0.5 * x);
  }

  /// 1 - cdf(x), without cancellation.
  double sf(double x) const {
    detail::require_domain(x >= 0.0, "chi2_sf: x must be >= 0");
    return reg_upper_gamma(0.5 * dof_, 0.5 * x);
  }

  double pdf(double x) const {
    if (x <= 0.0) return (x == 0.0 && dof_ == 2) ? 0.5 : 0.0;
    const double k = 0.5 * dof_;
    return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 -
                    std::lgamma(k));
  }

  /// Wilson-Hilferty cube approximation of the quantile.
  double wilson_hilferty(double q) const {
    const double k = static_cast<double>(dof_);
    const double h = 2.0 / (9.0 * k);
    const double t = 1.0 - h + normal_inv_cdf(q) * std::sqrt(h);
    return k * t * t * t;
  }

  /// Quantile. Newton iteration from the Wilson-Hilferty seed inside a
  /// shrinking bracket; bisects whenever Newton would leave the bracket.
  double inv_cdf(double q) const {
    detail::require_domain(q > 0.0 && q < 1.0, "chi2_inv_cdf: q must lie in (0,1)");
    const bool upper = q > 0.5;
    // residual(x) is increasing in x and vanishes at the quantile
    auto residual = [&](double x) { return upper ? (1.0 - q) - sf(x) : cdf(x) - q; };

    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof_));
    while (residual(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
    }
    double x = wilson_hilferty(q);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

    for (int it = 0; it < 500; ++it) {
      const double r = residual(x);
      if (r == 0.0) return x;
      if (r < 0.0) lo = x; else hi = x;
      if (std::abs(r) <= 1e-15 * std::min(q, 1.0 - q) || hi - lo <= 1e-15 * hi) break;
      const double f = pdf(x);
      double next = (f > 0.0 && std::isfinite(f)) ? x - r / f : lo - 1.0;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == x) break;
      x = next;
    }
    return x;
  }

 private:
  int dof_;
};

inline double chi2_cdf(const ChiSquare& dist, double x) { return dist.cdf(x); }
inline double chi2_inv_cdf(const ChiSquare& dist, double q) { return dist.inv_cdf(q); }

}  // namespace latentreg

#endif  // LATENTREG_SPECFUN_HPP_
