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
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "latentreg/optimizer.hpp"

namespace latentreg {
namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.n = 20;
  cfg.dim = 4;
  cfg.seed = 3;
  cfg.max_steps = 60;
  cfg.alpha0 = 0.05;
  cfg.schedule = Schedule::proportional_to_objective;
  return cfg;
}

CdfAttractionObjective attraction(std::size_t n, std::size_t dim) {
  return {build_target_quantiles(n, dim), {}};
}

std::string trace_text(const RunResult& r) {
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  return os.str();
}

TEST(Run, DeterministicForConfig) {
  const auto cfg = small_config();
  for (const Objective& obj :
       {Objective(attraction(cfg.n, cfg.dim)), Objective(CwaeObjective{}),
        Objective(WaeMmdObjective{{KernelKind::inverse_multiquadric, cfg.dim}})}) {
    auto c = cfg;
    if (!std::holds_alternative<CdfAttractionObjective>(obj)) c.schedule = Schedule::constant;
    const auto a = run(c, obj);
    const auto b = run(c, obj);
    EXPECT_TRUE(a.final == b.final);
    EXPECT_EQ(trace_text(a), trace_text(b));
    EXPECT_EQ(a.final_objective, b.final_objective);
  }
}

TEST(Run, SeedChangesInitialization) {
  auto cfg = small_config();
  const auto a = initial_cloud(cfg);
  cfg.seed = 4;
  EXPECT_FALSE(a == initial_cloud(cfg));
  cfg.init.kind = InitSpec::Kind::uniform_cube;
  cfg.init.lo = -0.5;
  cfg.init.hi = 0.5;
  EXPECT_LE(initial_cloud(cfg).matrix().cwiseAbs().maxCoeff(), 0.5);
}

TEST(Run, PerfectCloudStopsImmediately) {
  const auto cfg = small_config();
  const auto x = initial_cloud(cfg);
  const auto stats = radii_and_distances(x);
  auto r = stats.radii.values;
  auto d = stats.distances.values;
  std::sort(r.begin(), r.end());
  std::sort(d.begin(), d.end());
  const CdfAttractionObjective perfect{{cfg.n, cfg.dim, r, d}, {}};
  const auto res = run_from(x, cfg, perfect);
  EXPECT_TRUE(res.trace.empty());
  EXPECT_EQ(res.reason, StopReason::stationary);
  EXPECT_TRUE(res.final == x);
  EXPECT_EQ(res.final_objective, 0.0);
}

TEST(Run, AttractionTraceNonincreasing) {
  auto cfg = small_config();
  cfg.max_steps = 200;
  const auto res = run(cfg, attraction(cfg.n, cfg.dim));
  ASSERT_FALSE(res.trace.empty());
  for (std::size_t k = 1; k < res.trace.size(); ++k)
    EXPECT_LE(res.trace[k].objective, res.trace[k - 1].objective);
  EXPECT_LT(res.final_objective, res.trace.front().objective);
  EXPECT_FALSE(std::isnan(res.trace.front().radii_term));
}

TEST(Run, CwaeTraceNonincreasing) {
  RunConfig cfg;
  cfg.n = 200;
  cfg.dim = 20;
  cfg.seed = 11;
  cfg.max_steps = 300;
  cfg.alpha0 = 10000.0;
  const auto res = run(cfg, CwaeObjective{});
  ASSERT_EQ(res.trace.size(), 300u);
  for (std::size_t k = 1; k < res.trace.size(); ++k)
    ASSERT_LE(res.trace[k].objective, res.trace[k - 1].objective) << k;
  EXPECT_LE(res.final_objective, res.trace.back().objective);
  EXPECT_LT(res.final_objective, res.trace.front().objective);
}

TEST(Run, WaeMovingAverageDecreases) {
  RunConfig cfg;
  cfg.n = 200;
  cfg.dim = 20;
  cfg.seed = 12;
  cfg.max_steps = 2000;
  // small enough that all 20 windows lie in the descent phase
  cfg.alpha0 = 3.0;
  const auto res = run(cfg, WaeMmdObjective{{KernelKind::inverse_multiquadric, 20}});
  ASSERT_EQ(res.trace.size(), 2000u);
  std::vector<double> window;
  for (std::size_t w = 0; w < 20; ++w) {
    double s = 0.0;
    for (std::size_t k = 100 * w; k < 100 * (w + 1); ++k) s += res.trace[k].objective;
    window.push_back(s / 100.0);
  }
  int decreasing = 0;
  for (std::size_t w = 1; w < window.size(); ++w)
    if (window[w] < window[w - 1]) ++decreasing;
  EXPECT_GE(decreasing, 17);
  EXPECT_LT(window.back(), window.front() - 0.02);
}

TEST(Run, StopTolerance) {
  auto cfg = small_config();
  cfg.max_steps = 5000;
  cfg.stop_tolerance = 1e9;
  const auto res = run(cfg, attraction(cfg.n, cfg.dim));
  EXPECT_EQ(res.reason, StopReason::tolerance);
  EXPECT_TRUE(res.trace.empty());
}

TEST(Run, ConfigValidation) {
  auto cfg = small_config();
  cfg.max_steps = 0;
  EXPECT_THROW(run(cfg, attraction(cfg.n, cfg.dim)), std::invalid_argument);
  cfg = small_config();
  cfg.alpha0 = 0.0;
  EXPECT_THROW(run(cfg, attraction(cfg.n, cfg.dim)), std::invalid_argument);
  cfg = small_config();
  EXPECT_THROW(run(cfg, CwaeObjective{}), std::invalid_argument);
  EXPECT_THROW(run(cfg, WaeMmdObjective{{KernelKind::inverse_multiquadric, cfg.dim}}),
               std::invalid_argument);
}

TEST(Run, NonFiniteObjectiveReportsStep) {
  auto cfg = small_config();
  cfg.schedule = Schedule::constant;
  cfg.alpha0 = 1e300;
  try {
    run(cfg, attraction(cfg.n, cfg.dim));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("at step"), std::string::npos) << e.what();
  }
}

TEST(Trace, CsvFormats) {
  auto cfg = small_config();
  cfg.max_steps = 2;
  const auto res = run(cfg, attraction(cfg.n, cfg.dim));
  const auto text = trace_text(res);
  EXPECT_EQ(text.substr(0, text.find('\n')), "step,objective,alpha,wall_ms");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  for (const auto& row : res.trace) EXPECT_EQ(row.wall_ms, 0.0);
  std::ostringstream os;
  write_attraction_trace_csv(os, res.trace);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "step,objective,radii_term,distance_term,alpha");
}

TEST(Trace, WallTimeOnlyWhenRequested) {
  auto cfg = small_config();
  cfg.max_steps = 3;
  cfg.record_wall_time = true;
  const auto res = run(cfg, attraction(cfg.n, cfg.dim));
  EXPECT_GT(res.trace.back().wall_ms, 0.0);
}

TEST(Trace, StopReasonNames) {
  EXPECT_STREQ(to_string(StopReason::max_steps), "max_steps");
  EXPECT_STREQ(to_string(StopReason::no_descent), "no_descent");
}

}  // namespace
}  // namespace latentreg
