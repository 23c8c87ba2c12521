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

#ifndef LATENTREG_OPTIMIZER_HPP_
#define LATENTREG_OPTIMIZER_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "latentreg/baselines.hpp"
#include "latentreg/cdf_attract.hpp"
#include "latentreg/common.hpp"
#include "latentreg/sampling.hpp"

namespace latentreg {

enum class Schedule {
  constant,                  // alpha_t = alpha0
  proportional_to_objective  // alpha_t = alpha0 * f(x_t); CDF attraction only
};

struct InitSpec {
  enum class Kind { uniform_cube, gaussian };
  Kind kind = Kind::uniform_cube;
  double lo = -1.0;
  double hi = 1.0;
};

struct RunConfig {
  std::size_t n = 200;
  std::size_t dim = 20;
  std::uint64_t seed = 1;
  std::size_t max_steps = 1000;
  double alpha0 = 1.0;
  Schedule schedule = Schedule::constant;
  std::optional<double> stop_tolerance;  // stop once f < tolerance
  InitSpec init;
  bool record_wall_time = false;  // otherwise wall_ms stays 0 and traces are reproducible
};

/// WAE-MMD against a fresh N(0, I) sample of size n at every step, drawn
/// from Rng::derived(seed, step).
struct WaeMmdObjective {
  KernelSpec kernel;
};

struct CwaeObjective {};

struct CdfAttractionObjective {
  TargetQuantiles targets;
  CdfOptions options;
};

using Objective = std::variant<WaeMmdObjective, CwaeObjective, CdfAttractionObjective>;

struct TraceRow {
  std::size_t step = 0;
  double objective = 0.0;  // before the step
  double alpha = 0.0;      // accepted step size
  double wall_ms = 0.0;
  double radii_term = std::numeric_limits<double>::quiet_NaN();
  double distance_term = std::numeric_limits<double>::quiet_NaN();
};

enum class StopReason { max_steps, tolerance, stationary, no_descent };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::max_steps: return "max_steps";
    case StopReason::tolerance: return "tolerance";
    case StopReason::stationary: return "stationary";
    case StopReason::no_descent: return "no_descent";
  }
  return "?";
}

struct RunResult {
  PointCloud final;
  std::vector<TraceRow> trace;
  double final_objective = 0.0;
  StopReason reason = StopReason::max_steps;
};

inline PointCloud initial_cloud(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  if (cfg.init.kind == InitSpec::Kind::gaussian)
    return sample_standard_normal(rng, cfg.n, cfg.dim);
  return sample_uniform_cube(rng, cfg.n, cfg.dim, cfg.init.lo, cfg.init.hi);
}

namespace detail {

struct Evaluated {
  double value;
  GradientField gradient;
  double radii_term = std::numeric_limits<double>::quiet_NaN();
  double distance_term = std::numeric_limits<double>::quiet_NaN();
};

inline bool is_deterministic(const Objective& obj) {
  return !std::holds_alternative<WaeMmdObjective>(obj);
}

inline Evaluated evaluate(const Objective& obj, const PointCloud& x, const RunConfig& cfg,
                          std::size_t step) {
  if (const auto* w = std::get_if<WaeMmdObjective>(&obj)) {
    Rng rng = Rng::derived(cfg.seed, step);
    const auto prior = sample_standard_normal(rng, x.size(), x.dim());
    return {wae_mmd(x, prior, w->kernel), wae_mmd_gradient(x, prior, w->kernel)};
  }
  if (std::holds_alternative<CwaeObjective>(obj)) {
    const CwaeParams params(x.size(), x.dim());
    return {cwae(x, params), cwae_gradient(x, params)};
  }
  const auto& c = std::get<CdfAttractionObjective>(obj);
  auto e = evaluate_cdf(x, c.targets, c.options);
  return {e.terms.total, std::move(e.gradient), e.terms.radii, e.terms.distances};
}

inline void check_finite(const Evaluated& e, std::size_t step) {
  if (!std::isfinite(e.value) || !e.gradient.matrix().allFinite())
    throw NumericError("non-finite objective or gradient at step " + std::to_string(step));
}

}  // namespace detail

/// Gradient descent from a given cloud.
///
/// Deterministic objectives (CWAE, CDF attraction) halve alpha up to 20
/// times until the step does not increase f, so accepted objectives are
/// nonincreasing; the run ends if no halving succeeds. WAE-MMD resamples
/// its prior every step and takes plain steps.
inline RunResult run_from(PointCloud x, const RunConfig& cfg, const Objective& objective) {
  if (cfg.max_steps < 1) throw std::invalid_argument("run: max_steps must be >= 1");
  if (!(cfg.alpha0 > 0.0)) throw std::invalid_argument("run: alpha0 must be > 0");
  if (cfg.schedule == Schedule::proportional_to_objective &&
      !std::holds_alternative<CdfAttractionObjective>(objective))
    throw std::invalid_argument("run: proportional schedule needs a nonnegative objective");

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const bool deterministic = detail::is_deterministic(objective);

  auto step_from = [](const PointCloud& at, const GradientField& g, double a, std::size_t step) {
    try {
      return apply_step(at, g, a);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at step " + std::to_string(step));
    }
  };

  RunResult result{x, {}, 0.0, StopReason::max_steps};
  auto current = detail::evaluate(objective, x, cfg, 0);
  detail::check_finite(current, 0);

  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    if (step > 0 && !deterministic) {
      current = detail::evaluate(objective, x, cfg, step);
      detail::check_finite(current, step);
    }
    if (cfg.stop_tolerance && current.value < *cfg.stop_tolerance) {
      result.reason = StopReason::tolerance;
      break;
    }
    if (current.gradient.norm() == 0.0) {
      result.reason = StopReason::stationary;
      break;
    }
    double alpha = cfg.schedule == Schedule::constant ? cfg.alpha0 : cfg.alpha0 * current.value;

    TraceRow row;
    row.step = step;
    row.objective = current.value;
    row.radii_term = current.radii_term;
    row.distance_term = current.distance_term;

    if (!deterministic) {
      x = step_from(x, current.gradient, alpha, step);
    } else {
      bool accepted = false;
      for (int halvings = 0; halvings <= 20; ++halvings, alpha *= 0.5) {
        PointCloud trial = step_from(x, current.gradient, alpha, step);
        auto next = detail::evaluate(objective, trial, cfg, step + 1);
        detail::check_finite(next, step + 1);
        if (next.value <= current.value) {
          x = std::move(trial);
          current = std::move(next);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        result.reason = StopReason::no_descent;
        break;
      }
    }
    row.alpha = alpha;
    if (cfg.record_wall_time)
      row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    result.trace.push_back(row);
  }

  if (deterministic) {
    result.final_objective = current.value;
  } else {
    result.final_objective = detail::evaluate(objective, x, cfg, cfg.max_steps).value;
  }
  result.final = std::move(x);
  return result;
}

/// Gradient descent from the configured random initialization.
inline RunResult run(const RunConfig& cfg, const Objective& objective) {
  return run_from(initial_cloud(cfg), cfg, objective);
}

/// "step,objective,alpha,wall_ms"
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "step,objective,alpha,wall_ms\n";
  for (const auto& r : trace)
    os << r.step << ',' << format_double(r.objective) << ',' << format_double(r.alpha) << ','
       << format_double(r.wall_ms) << '\n';
}

/// "step,objective,radii_term,distance_term,alpha" for CDF attraction runs.
inline void write_attraction_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "step,objective,radii_term,distance_term,alpha\n";
  for (const auto& r : trace)
    os << r.step << ',' << format_double(r.objective) << ',' << format_double(r.radii_term)
       << ',' << format_double(r.distance_term) << ',' << format_double(r.alpha) << '\n';
}

}  // namespace latentreg

#endif  // LATENTREG_OPTIMIZER_HPP_
