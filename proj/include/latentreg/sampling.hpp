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

#ifndef LATENTREG_SAMPLING_HPP_
#define LATENTREG_SAMPLING_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentreg/common.hpp"

namespace latentreg {

/// Seedable generator with a fixed, documented stream so that experiments
/// can be replayed from any language.
///
/// * State: xoshiro256** (Blackman & Vigna), four 64-bit words.
/// * Seeding: the four words are successive outputs of SplitMix64 started
///   at `seed` (increment 0x9E3779B97F4A7C15, mix constants
///   0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31).
/// * next(): result = rotl(s1 * 5, 7) * 9; t = s1 << 17; s2 ^= s0;
///   s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45).
/// * uniform(): (next() >> 11) * 2^-53, in [0, 1).
/// * normal(): Marsaglia polar method on u, v = 2*uniform() - 1; each
///   accepted pair yields two deviates, the second returned by the next
///   call. The spare belongs to the generator, so a block of draws equals
///   the same number of draws made one at a time.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64(sm);
  }

  /// Independent stream for (seed, index) pairs, e.g. per step or per trial.
  static Rng derived(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return Rng(splitmix64(sm));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n points in R^dim; row i is point x_i. Entries are always finite.
class PointCloud {
 public:
  PointCloud(std::size_t n, std::size_t dim) : data_(RowMatrix::Zero(check_n(n), check_dim(dim))) {}

  explicit PointCloud(RowMatrix data) : data_(std::move(data)) {
    check_n(static_cast<std::size_t>(data_.rows()));
    check_dim(static_cast<std::size_t>(data_.cols()));
    if (!data_.allFinite()) throw std::invalid_argument("PointCloud: non-finite entry");
  }

  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }

  auto point(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }
  auto point(std::size_t i) { return data_.row(static_cast<Eigen::Index>(i)); }

  /// Contiguous storage of row i (row-major).
  const double* row_ptr(std::size_t i) const { return data_.data() + i * dim(); }
  double* row_ptr(std::size_t i) { return data_.data() + i * dim(); }

  const RowMatrix& matrix() const { return data_; }
  RowMatrix& matrix() { return data_; }

  bool operator==(const PointCloud& other) const {
    return data_.rows() == other.data_.rows() && data_.cols() == other.data_.cols() &&
           data_ == other.data_;
  }

 private:
  static std::size_t check_n(std::size_t n) {
    if (n < 1) throw std::invalid_argument("PointCloud: need at least one point");
    return n;
  }
  static std::size_t check_dim(std::size_t d) {
    if (d < 1) throw std::invalid_argument("PointCloud: dimension must be >= 1");
    return d;
  }

  RowMatrix data_;
};

/// Per-point gradient vectors; same shape as the cloud they belong to.
class GradientField {
 public:
  GradientField(std::size_t n, std::size_t dim)
      : data_(RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim))) {}

  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }

  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }
  auto row(std::size_t i) { return data_.row(static_cast<Eigen::Index>(i)); }

  const double* row_ptr(std::size_t i) const { return data_.data() + i * dim(); }
  double* row_ptr(std::size_t i) { return data_.data() + i * dim(); }

  const RowMatrix& matrix() const { return data_; }
  RowMatrix& matrix() { return data_; }

  double norm() const { return data_.norm(); }
  bool matches(const PointCloud& cloud) const {
    return size() == cloud.size() && dim() == cloud.dim();
  }

 private:
  RowMatrix data_;
};

/// i.i.d. N(0,1) entries, drawn row by row.
inline PointCloud sample_standard_normal(Rng& rng, std::size_t n, std::size_t dim) {
  PointCloud cloud(n, dim);
  auto& m = cloud.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  return cloud;
}

inline PointCloud sample_uniform_cube(Rng& rng, std::size_t n, std::size_t dim, double lo,
                                      double hi) {
  if (!(lo < hi)) throw std::domain_error("sample_uniform_cube: need lo < hi");
  PointCloud cloud(n, dim);
  auto& m = cloud.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  return cloud;
}

/// Normalized Gaussian rows; a zero row is redrawn.
inline PointCloud sample_unit_directions(Rng& rng, std::size_t count, std::size_t dim) {
  PointCloud cloud(count, dim);
  auto& m = cloud.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
      norm = m.row(i).norm();
    } while (norm == 0.0);
    m.row(i) /= norm;
  }
  return cloud;
}

// CSV: one row per point, comma-separated, 17 significant digits.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const PointCloud& cloud) {
  const auto& m = cloud.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

/// Parse error carrying the 1-based input line.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads a cloud written by write_csv. Blank lines and lines starting
/// with '#' are skipped; every data row must have the same column count.
inline PointCloud read_csv(std::istream& is) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      if (first == std::string::npos) throw CsvError(line_no, "empty field");
      field = field.substr(first, last - first + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw CsvError(line_no, "not a number: '" + field + "'");
      if (!std::isfinite(v)) throw CsvError(line_no, "non-finite value");
      values.push_back(v);
      ++count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw CsvError(line_no, "expected " + std::to_string(cols) + " columns, got " +
                                  std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw CsvError(line_no + 1, "no data rows");
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return PointCloud(std::move(m));
}

}  // namespace latentreg

#endif  // LATENTREG_SAMPLING_HPP_
