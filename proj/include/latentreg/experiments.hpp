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

// Experiment drivers behind the `latentreg` command line tool.
//
// Trial t uses seed base_seed + t for its initial cloud (Rng(seed)); the
// Gaussian reference cloud and projection directions of the test battery
// come from Rng::derived(seed, kReferenceStream) and
// Rng::derived(seed, kDirectionStream). Every file is written by exactly
// one trial or by the summary writer after all trials have joined, so
// outputs do not depend on the number of jobs.

#ifndef LATENTREG_EXPERIMENTS_HPP_
#define LATENTREG_EXPERIMENTS_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "latentreg/baselines.hpp"
#include "latentreg/calibration.hpp"
#include "latentreg/cdf_attract.hpp"
#include "latentreg/optimizer.hpp"
#include "latentreg/sampling.hpp"
#include "latentreg/stat_tests.hpp"
#include "latentreg/svg.hpp"

namespace latentreg::experiments {

namespace fs = std::filesystem;

inline constexpr std::uint64_t kReferenceStream = 0x100000000ULL;
inline constexpr std::uint64_t kDirectionStream = 0x100000001ULL;

// Step defaults, chosen by local sweeps at n = 200, D = 20.
inline constexpr std::size_t kAttractionSteps = 1500;
inline constexpr double kAttractionAlpha0 = 0.03;  // times the objective
inline constexpr std::size_t kCoordinateSteps = 300;
inline constexpr double kCoordinateAlpha0 = 0.1;
inline constexpr std::size_t kBaselineSteps = 3000;
inline constexpr double kCwaeAlpha0 = 10000.0;
inline constexpr double kWaeAlpha0 = 30.0;

enum class Row { gaussian, wae_mmd, cwae, attraction };

inline constexpr Row kFig1Rows[] = {Row::gaussian, Row::wae_mmd, Row::cwae, Row::attraction};

inline const char* row_name(Row r) {
  switch (r) {
    case Row::gaussian: return "gaussian";
    case Row::wae_mmd: return "wae_mmd";
    case Row::cwae: return "cwae";
    case Row::attraction: return "attraction";
  }
  return "?";
}

struct ExperimentSpec {
  std::size_t n = 200;
  std::size_t dim = 20;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::optional<std::size_t> steps;   // CDF attraction / coordinate demo
  std::optional<double> alpha0;       // CDF attraction / coordinate demo
  std::size_t baseline_steps = kBaselineSteps;
  double cwae_alpha0 = kCwaeAlpha0;
  double wae_alpha0 = kWaeAlpha0;
  KernelKind kernel = KernelKind::inverse_multiquadric;
  std::optional<double> stop_tolerance;
  GradientMode mode = GradientMode::exact_subgradient;
  NormKind norm = NormKind::l1;
  double init_lo = -1.0;
  double init_hi = 1.0;
  std::size_t projection_dirs = 10;
  std::size_t jobs = 1;
  bool timing = false;
  std::string target = "gaussian";  // attract demo
  int bits = 1;                     // quantized target
  fs::path out = "out";
};

inline void validate(const ExperimentSpec& s) {
  if (s.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (s.n < 2) throw std::invalid_argument("n must be >= 2");
  if (s.dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (s.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (s.steps && *s.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (s.alpha0 && !(*s.alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be > 0");
  if (s.projection_dirs < 1) throw std::invalid_argument("projection dirs must be >= 1");
  if (!(s.init_lo < s.init_hi)) throw std::invalid_argument("init range must satisfy lo < hi");
}

inline std::uint64_t trial_seed(const ExperimentSpec& s, std::size_t t) { return s.seed + t; }

inline CoordinateTarget parse_target(const std::string& name, int bits) {
  if (name == "uniform01") return CoordinateTarget::uniform01();
  if (name == "torus") return CoordinateTarget::torus();
  if (name == "quantized") return CoordinateTarget::quantized(bits);
  if (name.rfind("quantized(", 0) == 0 && name.back() == ')')
    return CoordinateTarget::quantized(std::stoi(name.substr(10, name.size() - 11)));
  if (name == "gaussian") return CoordinateTarget::gaussian();
  throw std::invalid_argument("unknown target '" + name + "'");
}

inline bool is_coordinate_demo(const ExperimentSpec& s) { return s.target != "gaussian"; }

inline std::size_t attraction_steps(const ExperimentSpec& s) {
  return s.steps.value_or(is_coordinate_demo(s) ? kCoordinateSteps : kAttractionSteps);
}

inline double attraction_alpha0(const ExperimentSpec& s) {
  return s.alpha0.value_or(is_coordinate_demo(s) ? kCoordinateAlpha0 : kAttractionAlpha0);
}

inline RunConfig base_config(const ExperimentSpec& s, std::size_t t) {
  RunConfig c;
  c.n = s.n;
  c.dim = s.dim;
  c.seed = trial_seed(s, t);
  c.init = {InitSpec::Kind::uniform_cube, s.init_lo, s.init_hi};
  c.record_wall_time = s.timing;
  return c;
}

inline CdfOptions cdf_options(const ExperimentSpec& s) { return {s.mode, s.norm, 1.0, 1.0}; }

// ---------------------------------------------------------------------------
// Parallel trials

/// Runs fn(0..count-1) on up to `jobs` threads. The exception of the lowest
/// failing index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Output helpers

inline std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

inline void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
}

inline void write_resolved_config(const fs::path& dir, const std::string& command,
                                  const ExperimentSpec& s) {
  auto os = open_output(dir / "config_resolved.txt");
  os << "command=" << command << '\n'
     << "n=" << s.n << '\n'
     << "dim=" << s.dim << '\n'
     << "trials=" << s.trials << '\n'
     << "seed=" << s.seed << '\n'
     << "trial_seeds=";
  for (std::size_t t = 0; t < s.trials; ++t) os << (t ? " " : "") << trial_seed(s, t);
  os << '\n'
     << "steps=" << attraction_steps(s) << '\n'
     << "alpha0=" << format_double(attraction_alpha0(s)) << '\n'
     << "baseline_steps=" << s.baseline_steps << '\n'
     << "cwae_alpha0=" << format_double(s.cwae_alpha0) << '\n'
     << "wae_alpha0=" << format_double(s.wae_alpha0) << '\n'
     << "kernel=" << (s.kernel == KernelKind::inverse_multiquadric ? "imq" : "exp") << '\n'
     << "stop_tolerance=" << (s.stop_tolerance ? format_double(*s.stop_tolerance) : "none")
     << '\n'
     << "gradient_mode=" << (s.mode == GradientMode::exact_subgradient ? "exact" : "paper")
     << '\n'
     << "norm=" << (s.norm == NormKind::l1 ? "l1" : "l2") << '\n'
     << "init_lo=" << format_double(s.init_lo) << '\n'
     << "init_hi=" << format_double(s.init_hi) << '\n'
     << "projection_dirs=" << s.projection_dirs << '\n'
     << "jobs=" << s.jobs << '\n'
     << "timing=" << (s.timing ? "true" : "false") << '\n'
     << "target=" << s.target << '\n'
     << "bits=" << s.bits << '\n'
     << "out=" << s.out.string() << '\n';
}

// ---------------------------------------------------------------------------
// Single trials

struct RowOutcome {
  PointCloud cloud;
  std::vector<TraceRow> trace;
  double final_objective = 0.0;
  StopReason reason = StopReason::max_steps;
};

/// Final cloud of one Fig. 1 row for trial t. The Gaussian row is a plain
/// N(0, I) sample from Rng(seed); the others start from the uniform cube.
inline RowOutcome row_outcome(const ExperimentSpec& s, Row row, std::size_t t) {
  RunConfig c = base_config(s, t);
  switch (row) {
    case Row::gaussian: {
      c.init.kind = InitSpec::Kind::gaussian;
      return {initial_cloud(c), {}, 0.0, StopReason::max_steps};
    }
    case Row::wae_mmd: {
      c.max_steps = s.baseline_steps;
      c.alpha0 = s.wae_alpha0;
      auto r = run(c, WaeMmdObjective{KernelSpec{s.kernel, s.dim}});
      return {std::move(r.final), std::move(r.trace), r.final_objective, r.reason};
    }
    case Row::cwae: {
      c.max_steps = s.baseline_steps;
      c.alpha0 = s.cwae_alpha0;
      auto r = run(c, CwaeObjective{});
      return {std::move(r.final), std::move(r.trace), r.final_objective, r.reason};
    }
    case Row::attraction: {
      c.max_steps = attraction_steps(s);
      c.alpha0 = attraction_alpha0(s);
      c.schedule = Schedule::proportional_to_objective;
      c.stop_tolerance = s.stop_tolerance;
      auto r = run(c, CdfAttractionObjective{TargetQuantiles::chi_square(s.n, s.dim),
                                             cdf_options(s)});
      return {std::move(r.final), std::move(r.trace), r.final_objective, r.reason};
    }
  }
  throw std::logic_error("row_outcome: bad row");
}

inline std::string trial_file(Row row, const char* what, std::size_t t) {
  return std::string(row_name(row)) + "_" + what + "_trial" + std::to_string(t) + ".csv";
}

inline EdfCurve radii_curve(const PointCloud& x) {
  const ChiSquare chi2(static_cast<int>(x.dim()));
  return make_edf_curve(squared_radii(x), [chi2](double q) { return chi2.inv_cdf(q); });
}

inline EdfCurve distance_curve(const PointCloud& x) {
  const ChiSquare chi2(static_cast<int>(x.dim()));
  return make_edf_curve(half_squared_distances(x), [chi2](double q) { return chi2.inv_cdf(q); });
}

/// Curve CSVs and trace of one row/trial. The attraction row's files are
/// shared with the Gaussian attraction demo.
inline void write_row_files(const fs::path& dir, Row row, std::size_t t, const RowOutcome& o) {
  {
    auto os = open_output(dir / trial_file(row, "radii", t));
    write_edf_csv(os, radii_curve(o.cloud));
  }
  {
    auto os = open_output(dir / trial_file(row, "distances", t));
    write_edf_csv(os, distance_curve(o.cloud));
  }
  if (row == Row::gaussian) return;
  auto os = open_output(dir / trial_file(row, "trace", t));
  if (row == Row::attraction) write_attraction_trace_csv(os, o.trace);
  else write_trace_csv(os, o.trace);
}

// ---------------------------------------------------------------------------
// Panels

inline const char* trial_color(std::size_t t) {
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                            "#bcbd22", "#17becf"};
  return kColors[t % 10];
}

/// EDF overlay of sorted per-trial samples against an analytic CDF.
inline svg::Panel analytic_panel(std::string title, std::string x_label,
                                 const std::vector<std::vector<double>>& sorted_trials,
                                 const CdfFn& cdf, const CdfFn& inv_cdf) {
  svg::Panel p;
  p.title = std::move(title);
  p.x_label = std::move(x_label);
  p.x_ticks = svg::decile_ticks(inv_cdf);
  double lo = inv_cdf(0.001);
  double hi = inv_cdf(0.999);
  for (std::size_t t = 0; t < sorted_trials.size(); ++t) {
    if (sorted_trials[t].empty()) continue;
    lo = std::min(lo, sorted_trials[t].front());
    hi = std::max(hi, sorted_trials[t].back());
    p.lines.push_back(svg::edf_polyline(sorted_trials[t], trial_color(t)));
  }
  p.lines.push_back(svg::cdf_polyline(cdf, lo, hi));
  return p;
}

/// EDF overlay against the pooled reference sample (black).
inline svg::Panel empirical_panel(std::string title, std::string x_label,
                                  const std::vector<std::vector<double>>& sorted_trials,
                                  std::vector<double> reference) {
  std::sort(reference.begin(), reference.end());
  svg::Panel p;
  p.title = std::move(title);
  p.x_label = std::move(x_label);
  p.x_ticks = svg::decile_ticks([&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(reference.size())));
    return reference[std::min(idx, reference.size() - 1)];
  });
  for (std::size_t t = 0; t < sorted_trials.size(); ++t)
    p.lines.push_back(svg::edf_polyline(sorted_trials[t], trial_color(t)));
  p.lines.push_back(svg::edf_polyline(reference, "#000000", 2.0, 1.0));
  return p;
}

inline void write_panel(const fs::path& path, const svg::Panel& p) {
  auto os = open_output(path);
  svg::render(os, p);
}

// ---------------------------------------------------------------------------
// fig1

struct Fig1Record {
  Row row;
  std::size_t trial;
  std::uint64_t seed;
  std::size_t steps;
  double final_objective;
  StopReason reason;
  double radii_ks;
  double distance_ks;
  double dbar;
  double mean_sq_radius_ratio;  // mean |x|^2 / D; < 1 narrower, > 1 wider
};

inline Fig1Record fig1_record(const ExperimentSpec& s, Row row, std::size_t t,
                              const RowOutcome& o, const TargetQuantiles& targets) {
  const auto sq = squared_radii(o.cloud);
  double mean = 0.0;
  for (double v : sq) mean += v;
  mean /= static_cast<double>(sq.size());
  return {row,
          t,
          trial_seed(s, t),
          o.trace.size(),
          o.final_objective,
          o.reason,
          radii_test(o.cloud).ks_linf,
          distance_test(o.cloud).ks_linf,
          cdf_objective(o.cloud, targets),
          mean / static_cast<double>(s.dim)};
}

inline void write_fig1_summary(std::ostream& os, const std::vector<Fig1Record>& recs) {
  os << "row,trial,seed,steps,stop_reason,final_objective,radii_ks,distance_ks,dbar,"
        "mean_sq_radius_ratio\n";
  for (const auto& r : recs)
    os << row_name(r.row) << ',' << r.trial << ',' << r.seed << ',' << r.steps << ','
       << to_string(r.reason) << ',' << format_double(r.final_objective) << ','
       << format_double(r.radii_ks) << ',' << format_double(r.distance_ks) << ','
       << format_double(r.dbar) << ',' << format_double(r.mean_sq_radius_ratio) << '\n';
}

/// Four rows x {radii, distances}: per-trial curve CSVs, eight SVG panels
/// and summary.csv. Returns the summary records in row-major order.
inline std::vector<Fig1Record> cmd_fig1(const ExperimentSpec& s) {
  validate(s);
  prepare_dir(s.out);
  write_resolved_config(s.out, "fig1", s);
  const auto targets = TargetQuantiles::chi_square(s.n, s.dim);
  const std::size_t rows = std::size(kFig1Rows);
  std::vector<Fig1Record> recs(rows * s.trials);
  std::vector<std::vector<double>> radii(rows * s.trials), dists(rows * s.trials);

  parallel_for(rows * s.trials, s.jobs, [&](std::size_t k) {
    const Row row = kFig1Rows[k / s.trials];
    const std::size_t t = k % s.trials;
    const auto o = row_outcome(s, row, t);
    write_row_files(s.out, row, t, o);
    recs[k] = fig1_record(s, row, t, o, targets);
    radii[k] = radii_curve(o.cloud).sorted_values;
    dists[k] = distance_curve(o.cloud).sorted_values;
  });

  const ChiSquare chi2(static_cast<int>(s.dim));
  const CdfFn cdf = [chi2](double v) { return chi2.cdf(std::max(v, 0.0)); };
  const CdfFn inv = [chi2](double q) { return chi2.inv_cdf(q); };
  for (std::size_t r = 0; r < rows; ++r) {
    const auto first = static_cast<std::ptrdiff_t>(r * s.trials);
    const auto last = first + static_cast<std::ptrdiff_t>(s.trials);
    const std::vector<std::vector<double>> rr(radii.begin() + first, radii.begin() + last);
    const std::vector<std::vector<double>> dd(dists.begin() + first, dists.begin() + last);
    const std::string name = row_name(kFig1Rows[r]);
    write_panel(s.out / (name + "_radii.svg"),
                analytic_panel(name + ": squared radii", "|x_i|^2", rr, cdf, inv));
    write_panel(s.out / (name + "_distances.svg"),
                analytic_panel(name + ": half squared distances", "|x_i - x_j|^2 / 2", dd, cdf,
                               inv));
  }
  auto os = open_output(s.out / "summary.csv");
  write_fig1_summary(os, recs);
  return recs;
}

// ---------------------------------------------------------------------------
// fig2

/// Bands for the spec's n, dim and direction count: the stored constants
/// when they apply, otherwise a fresh 400-trial calibration.
inline ReferenceBands bands_for(const ExperimentSpec& s) {
  const CalibrationSpec def;
  if (s.n == def.n && s.dim == def.dim && s.projection_dirs == def.projection_dirs)
    return kReferenceBands;
  CalibrationSpec c = def;
  c.n = s.n;
  c.dim = s.dim;
  c.projection_dirs = s.projection_dirs;
  return calibrate_reference_bands(c);
}

struct BatteryResult {
  double projection_ks;
  double scalar_ks;
  double angle_ks;
  bool projection_pass;
  bool scalar_pass;
  bool angle_pass;
  MardiaStats mardia;
  std::vector<double> projections;
  std::vector<double> scalars;
  std::vector<double> angles;

  bool all_pass() const { return projection_pass && scalar_pass && angle_pass; }
};

/// Projection, scalar-product and angle tests of a cloud from trial t.
inline BatteryResult battery(const ExperimentSpec& s, std::size_t t, const PointCloud& x,
                             const ReferenceBands& bands) {
  Rng rr = Rng::derived(trial_seed(s, t), kReferenceStream);
  Rng rd = Rng::derived(trial_seed(s, t), kDirectionStream);
  const auto ref = sample_standard_normal(rr, x.size(), x.dim());
  const auto dirs = sample_unit_directions(rd, s.projection_dirs, x.dim());
  BatteryResult b;
  b.projections = pooled_projections(x, dirs);
  b.scalars = pairwise_scalar_products(x);
  b.angles = pairwise_angles(x);
  b.projection_ks = edf_vs_cdf(b.projections, normal_cdf).ks_linf;
  b.scalar_ks = two_sample_ks(b.scalars, pairwise_scalar_products(ref));
  b.angle_ks = two_sample_ks(b.angles, pairwise_angles(ref));
  b.projection_pass = b.projection_ks <= bands.projection_ks_p95;
  b.scalar_pass = b.scalar_ks <= bands.scalar_ks_p95;
  b.angle_pass = b.angle_ks <= bands.angle_ks_p95;
  b.mardia = mardia_stats(x);
  std::sort(b.projections.begin(), b.projections.end());
  std::sort(b.scalars.begin(), b.scalars.end());
  std::sort(b.angles.begin(), b.angles.end());
  return b;
}

struct Fig2Record {
  std::size_t trial;
  std::uint64_t seed;
  std::string cloud;  // "random" or "attracted"
  BatteryResult result;
};

inline void write_fig2_summary(std::ostream& os, const std::vector<Fig2Record>& recs) {
  os << "trial,seed,cloud,projection_ks,scalar_ks,angle_ks,projection_pass,scalar_pass,"
        "angle_pass,mardia_skewness,mardia_kurtosis,mardia_second_moment\n";
  for (const auto& r : recs) {
    const auto& b = r.result;
    os << r.trial << ',' << r.seed << ',' << r.cloud << ',' << format_double(b.projection_ks)
       << ',' << format_double(b.scalar_ks) << ',' << format_double(b.angle_ks) << ','
       << b.projection_pass << ',' << b.scalar_pass << ',' << b.angle_pass << ','
       << format_double(b.mardia.skewness_stat) << ',' << format_double(b.mardia.kurtosis_stat)
       << ',' << format_double(b.mardia.second_moment) << '\n';
  }
}

/// Test battery on random and attraction-converged clouds: six SVG panels,
/// bands.txt and summary.csv. Returns records ordered (trial, random)
/// then (trial, attracted).
inline std::vector<Fig2Record> cmd_fig2(const ExperimentSpec& s) {
  validate(s);
  prepare_dir(s.out);
  write_resolved_config(s.out, "fig2", s);
  const auto bands = bands_for(s);
  {
    auto os = open_output(s.out / "bands.txt");
    write_bands(os, bands);
  }
  std::vector<Fig2Record> recs(2 * s.trials);
  std::vector<std::vector<double>> ref_scalars(s.trials), ref_angles(s.trials);
  parallel_for(2 * s.trials, s.jobs, [&](std::size_t k) {
    const std::size_t t = k / 2;
    const bool attracted = k % 2 == 1;
    const auto o = row_outcome(s, attracted ? Row::attraction : Row::gaussian, t);
    recs[k] = {t, trial_seed(s, t), attracted ? "attracted" : "random",
               battery(s, t, o.cloud, bands)};
    if (!attracted) {
      Rng rr = Rng::derived(trial_seed(s, t), kReferenceStream);
      const auto ref = sample_standard_normal(rr, s.n, s.dim);
      ref_scalars[t] = pairwise_scalar_products(ref);
      ref_angles[t] = pairwise_angles(ref);
    }
  });

  std::vector<double> pooled_scalars, pooled_angles;
  for (std::size_t t = 0; t < s.trials; ++t) {
    pooled_scalars.insert(pooled_scalars.end(), ref_scalars[t].begin(), ref_scalars[t].end());
    pooled_angles.insert(pooled_angles.end(), ref_angles[t].begin(), ref_angles[t].end());
  }
  for (const char* column : {"random", "attracted"}) {
    std::vector<std::vector<double>> proj, scal, ang;
    for (const auto& r : recs) {
      if (r.cloud != column) continue;
      proj.push_back(r.result.projections);
      scal.push_back(r.result.scalars);
      ang.push_back(r.result.angles);
    }
    const std::string c = column;
    write_panel(s.out / ("projection_" + c + ".svg"),
                analytic_panel(c + ": projections", "x_i . u", proj, normal_cdf,
                               normal_inv_cdf));
    write_panel(s.out / ("scalar_product_" + c + ".svg"),
                empirical_panel(c + ": scalar products", "x_i . x_j", scal, pooled_scalars));
    write_panel(s.out / ("angle_" + c + ".svg"),
                empirical_panel(c + ": angles", "angle(x_i, x_j)", ang, pooled_angles));
  }
  auto os = open_output(s.out / "summary.csv");
  write_fig2_summary(os, recs);
  return recs;
}

// ---------------------------------------------------------------------------
// eval

struct Statistic {
  std::string name;
  double value;
};

/// Statistics of a stored cloud. wae_mmd compares against an N(0, I)
/// sample of the same shape drawn from Rng(seed).
inline std::vector<Statistic> evaluate_cloud(const PointCloud& x, const std::string& which,
                                             std::uint64_t seed, KernelKind kernel) {
  if (which == "wae_mmd") {
    Rng rng(seed);
    const auto prior = sample_standard_normal(rng, x.size(), x.dim());
    return {{"wae_mmd", wae_mmd(x, prior, KernelSpec{kernel, x.dim()})}};
  }
  if (which == "cwae") return {{"cwae", cwae(x, CwaeParams(x.size(), x.dim()))}};
  if (which == "mardia") {
    const auto m = mardia_stats(x);
    return {{"skewness_stat", m.skewness_stat},
            {"kurtosis_stat", m.kurtosis_stat},
            {"second_moment", m.second_moment}};
  }
  if (which == "radii" || which == "distances") {
    const auto r = which == "radii" ? radii_test(x) : distance_test(x);
    return {{which + "_ks", r.ks_linf}, {which + "_l1", r.l1_area.value_or(0.0)}};
  }
  throw std::invalid_argument("unknown statistic '" + which + "'");
}

inline void write_statistics(std::ostream& os, const std::vector<Statistic>& stats) {
  os << "statistic,value\n";
  for (const auto& st : stats) os << st.name << ',' << format_double(st.value) << '\n';
}

// ---------------------------------------------------------------------------
// attract demo

struct AttractRecord {
  std::size_t trial;
  std::uint64_t seed;
  std::size_t steps;
  double final_objective;
  double min_coord;
  double max_coord;
  std::optional<double> codeword_fraction;
};

/// Distance of v to the nearest of the 2^k centers (m + 0.5) / 2^k.
inline double codeword_distance(double v, int bits) {
  const double levels = std::ldexp(1.0, bits);
  const double m = std::clamp(std::floor(levels * v), 0.0, levels - 1.0);
  return std::abs(v - (m + 0.5) / levels);
}

/// Share of coordinates within 2^{-k-2} of a codeword center.
inline double codeword_fraction(const PointCloud& x, int bits) {
  const double tol = std::ldexp(1.0, -bits - 2);
  std::size_t hits = 0;
  const auto& m = x.matrix();
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (codeword_distance(m.data()[i], bits) <= tol) ++hits;
  return static_cast<double>(hits) / static_cast<double>(m.size());
}

/// Mean absolute gap to the ideal coordinates (wrapped on the torus).
inline double coordinate_mismatch(const PointCloud& x, const PointCloud& ideal, bool torus) {
  KahanSum sum;
  const auto& a = x.matrix();
  const auto& b = ideal.matrix();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double d = std::abs(a.data()[i] - b.data()[i]);
    if (torus) d = std::min(d, 1.0 - d);
    sum += d;
  }
  return sum.value() / static_cast<double>(a.size());
}

struct CoordinateRun {
  PointCloud cloud;
  std::vector<TraceRow> trace;
  double final_objective;
};

/// Repeated x <- x + alpha (x~ - x) toward the ideal coordinates. Torus
/// results are reduced modulo 1.
inline CoordinateRun coordinate_run(const ExperimentSpec& s, const CoordinateTarget& target,
                                    PointCloud x) {
  const double alpha = attraction_alpha0(s);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("coordinate attraction needs alpha0 in (0, 1]");
  const bool torus = target.kind == CoordinateTarget::Kind::torus_uniform01;
  if (torus) x = PointCloud(RowMatrix(x.matrix().unaryExpr(&detail::wrap01)));
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  std::vector<TraceRow> trace;
  const std::size_t steps = attraction_steps(s);
  for (std::size_t step = 0; step < steps; ++step) {
    const double f = coordinate_mismatch(x, coordinate_targets(x, target), torus);
    if (f == 0.0 || (s.stop_tolerance && f < *s.stop_tolerance)) break;
    TraceRow row;
    row.step = step;
    row.objective = f;
    row.alpha = alpha;
    x = coordinate_step(x, target, alpha);
    if (s.timing) row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.push_back(row);
  }
  const double f = coordinate_mismatch(x, coordinate_targets(x, target), torus);
  return {std::move(x), std::move(trace), f};
}

inline void write_histograms(std::ostream& os, const PointCloud& before, const PointCloud& after,
                             double lo, double hi, std::size_t bins) {
  os << "coord,bin_lo,bin_hi,before,after\n";
  const double w = (hi - lo) / static_cast<double>(bins);
  auto bin_of = [&](double v) {
    const double k = std::floor((v - lo) / w);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(bins - 1)));
  };
  for (std::size_t j = 0; j < before.dim(); ++j) {
    std::vector<std::size_t> cb(bins, 0), ca(bins, 0);
    for (std::size_t i = 0; i < before.size(); ++i) ++cb[bin_of(before.row_ptr(i)[j])];
    for (std::size_t i = 0; i < after.size(); ++i) ++ca[bin_of(after.row_ptr(i)[j])];
    for (std::size_t k = 0; k < bins; ++k)
      os << j << ',' << format_double(lo + w * static_cast<double>(k)) << ','
         << format_double(lo + w * static_cast<double>(k + 1)) << ',' << cb[k] << ',' << ca[k]
         << '\n';
  }
}

inline void write_attract_summary(std::ostream& os, const std::string& target,
                                  const std::vector<AttractRecord>& recs) {
  os << "trial,seed,target,steps,final_objective,min_coord,max_coord,codeword_fraction\n";
  for (const auto& r : recs)
    os << r.trial << ',' << r.seed << ',' << target << ',' << r.steps << ','
       << format_double(r.final_objective) << ',' << format_double(r.min_coord) << ','
       << format_double(r.max_coord) << ','
       << (r.codeword_fraction ? format_double(*r.codeword_fraction) : "") << '\n';
}

/// Attraction demo. The Gaussian target runs the radii/distance attraction
/// of the fig1 bottom row and writes the same curve and trace files;
/// other targets run coordinate-wise attraction.
inline std::vector<AttractRecord> cmd_attract(const ExperimentSpec& s) {
  validate(s);
  const CoordinateTarget target = parse_target(s.target, s.bits);
  prepare_dir(s.out);
  write_resolved_config(s.out, "attract", s);
  std::vector<AttractRecord> recs(s.trials);
  parallel_for(s.trials, s.jobs, [&](std::size_t t) {
    const PointCloud before = initial_cloud(base_config(s, t));
    PointCloud after = before;
    double f = 0.0;
    std::size_t steps = 0;
    const std::string suffix = "_trial" + std::to_string(t) + ".csv";
    if (target.kind == CoordinateTarget::Kind::gaussian) {
      auto o = row_outcome(s, Row::attraction, t);
      write_row_files(s.out, Row::attraction, t, o);
      after = std::move(o.cloud);
      f = o.final_objective;
      steps = o.trace.size();
    } else {
      auto r = coordinate_run(s, target, before);
      auto os = open_output(s.out / ("trace" + suffix));
      write_trace_csv(os, r.trace);
      after = std::move(r.cloud);
      f = r.final_objective;
      steps = r.trace.size();
    }
    {
      auto os = open_output(s.out / ("before" + suffix));
      write_csv(os, before);
    }
    {
      auto os = open_output(s.out / ("after" + suffix));
      write_csv(os, after);
    }
    {
      auto os = open_output(s.out / ("histogram" + suffix));
      const bool gauss = target.kind == CoordinateTarget::Kind::gaussian;
      write_histograms(os, before, after, gauss ? -4.0 : 0.0, gauss ? 4.0 : 1.0, 32);
    }
    std::optional<double> frac;
    if (target.kind == CoordinateTarget::Kind::quantized_uniform)
      frac = codeword_fraction(after, target.bits);
    recs[t] = {t, trial_seed(s, t), steps, f, after.matrix().minCoeff(),
               after.matrix().maxCoeff(), frac};
  });
  auto os = open_output(s.out / "summary.csv");
  write_attract_summary(os, s.target, recs);
  return recs;
}

// ---------------------------------------------------------------------------
// calibrate

inline ReferenceBands cmd_calibrate(const CalibrationSpec& c, const fs::path& out) {
  const auto bands = calibrate_reference_bands(c);
  prepare_dir(out);
  auto os = open_output(out / "bands.txt");
  write_bands(os, bands);
  return bands;
}

}  // namespace latentreg::experiments

#endif  // LATENTREG_EXPERIMENTS_HPP_
