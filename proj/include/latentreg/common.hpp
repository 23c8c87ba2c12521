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

#ifndef LATENTREG_COMMON_HPP_
#define LATENTREG_COMMON_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace latentreg {

/// Row-major dense matrix; row i is the i-th point or gradient vector.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an iteration produces NaN/Inf or cannot make progress.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sgn(0) = 0.
inline double sgn(double v) {
  return static_cast<double>((0.0 < v) - (v < 0.0));
}

/// Neumaier compensated accumulator. Pairwise sums in this library go
/// through it so results do not depend on summation order beyond ~1 ulp.
class KahanSum {
 public:
  KahanSum& operator+=(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  KahanSum s;
  for (double v : values) s += v;
  return s.value();
}

namespace rows {

// Raw contiguous-row kernels for the O(n^2) pair loops.

inline double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

/// out_a += w (a - b); out_b -= w (a - b).
inline void add_pair(double w, const double* a, const double* b, double* out_a, double* out_b,
                     std::size_t d) {
  for (std::size_t k = 0; k < d; ++k) {
    const double t = w * (a[k] - b[k]);
    out_a[k] += t;
    out_b[k] -= t;
  }
}

/// out += w (a - b).
inline void add_diff(double w, const double* a, const double* b, double* out, std::size_t d) {
  for (std::size_t k = 0; k < d; ++k) out[k] += w * (a[k] - b[k]);
}

}  // namespace rows

namespace detail {

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_domain(bool cond, const char* what) {
  if (!cond) throw std::domain_error(what);
}

}  // namespace detail

}  // namespace latentreg

#endif  // LATENTREG_COMMON_HPP_
