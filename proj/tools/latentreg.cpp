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

// latentreg fig1|fig2|eval|attract|calibrate [options]
//
// Exit codes: 0 success, 1 usage error, 2 runtime or numeric failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "latentreg/calibration.hpp"
#include "latentreg/experiments.hpp"
#include "latentreg/sampling.hpp"

namespace {

namespace ex = latentreg::experiments;

int run_eval(const ex::ExperimentSpec& spec, const std::string& cloud_path,
             const std::string& which) {
  std::ifstream in(cloud_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + cloud_path);
  latentreg::PointCloud cloud(1, 1);
  try {
    cloud = latentreg::read_csv(in);
  } catch (const latentreg::CsvError& e) {
    throw std::runtime_error(cloud_path + ":" + e.what());
  }
  const auto stats = ex::evaluate_cloud(cloud, which, spec.seed, spec.kernel);
  std::cout << "# cloud=" << cloud_path << "\n# n=" << cloud.size() << "\n# dim=" << cloud.dim()
            << "\n# which=" << which << "\n# seed=" << spec.seed << '\n';
  ex::write_statistics(std::cout, stats);
  if (!spec.out.empty()) {
    ex::prepare_dir(spec.out);
    auto os = ex::open_output(spec.out / ("eval_" + which + ".csv"));
    ex::write_statistics(os, stats);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-space regularizers and CDF attraction experiments", "latentreg"};
  app.set_config("--config", "", "key=value file; command line flags override it");
  app.require_subcommand(1);

  ex::ExperimentSpec spec;
  std::optional<std::size_t> steps;
  std::optional<double> alpha0;
  std::optional<double> stop_tolerance;
  bool calibrated_stop = false;
  std::string out = "out";
  std::string mode = "exact";
  std::string norm = "l1";
  std::string kernel = "imq";
  std::string cloud_path;
  std::string which = "mardia";
  std::size_t calib_trials = 400;

  app.add_option("--n", spec.n, "Points per cloud")->capture_default_str();
  app.add_option("--dim", spec.dim, "Dimension")->capture_default_str();
  app.add_option("--trials", spec.trials, "Independent trials")->capture_default_str();
  app.add_option("--seed", spec.seed, "Base seed; trial t uses seed + t")->capture_default_str();
  app.add_option("--steps", steps, "Attraction steps (default 1500; 300 coordinate-wise)");
  app.add_option("--alpha0", alpha0, "Attraction step factor (default 0.03; 0.1 coordinate-wise)");
  app.add_option("--baseline-steps", spec.baseline_steps, "WAE-MMD/CWAE steps")
      ->capture_default_str();
  app.add_option("--cwae-alpha0", spec.cwae_alpha0, "CWAE step size")->capture_default_str();
  app.add_option("--wae-alpha0", spec.wae_alpha0, "WAE-MMD step size")->capture_default_str();
  app.add_option("--kernel", kernel, "WAE-MMD kernel")
      ->check(CLI::IsMember({"imq", "exp"}))
      ->capture_default_str();
  app.add_option("--stop-tolerance", stop_tolerance, "Stop once the objective drops below");
  app.add_flag("--calibrated-stop", calibrated_stop,
               "Stop attraction at 2x the median objective of true N(0,I) samples");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--jobs", spec.jobs, "Concurrent trials")->capture_default_str();
  app.add_option("--gradient-mode", mode, "CDF attraction gradient")
      ->check(CLI::IsMember({"exact", "paper"}))
      ->capture_default_str();
  app.add_option("--norm", norm, "CDF attraction mismatch norm")
      ->check(CLI::IsMember({"l1", "l2"}))
      ->capture_default_str();
  app.add_option("--init-lo", spec.init_lo, "Uniform init lower bound")->capture_default_str();
  app.add_option("--init-hi", spec.init_hi, "Uniform init upper bound")->capture_default_str();
  app.add_option("--projection-dirs", spec.projection_dirs, "Random directions, pooled")
      ->capture_default_str();
  app.add_flag("--timing", spec.timing, "Record wall_ms in traces");

  auto* fig1 = app.add_subcommand("fig1", "Radii/distance EDF grid for four methods");
  auto* fig2 = app.add_subcommand("fig2", "Projection, scalar product and angle tests");
  auto* eval = app.add_subcommand("eval", "Statistics of a stored cloud");
  auto* attract = app.add_subcommand("attract", "CDF attraction demo");
  auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo reference bands");
  for (auto* sub : {fig1, fig2, eval, attract, calibrate}) sub->fallthrough();

  eval->add_option("--cloud", cloud_path, "Cloud CSV")->required();
  eval->add_option("--which", which, "Statistic")
      ->check(CLI::IsMember({"wae_mmd", "cwae", "mardia", "radii", "distances"}))
      ->capture_default_str();
  attract->add_option("--target", spec.target, "gaussian|uniform01|torus|quantized|quantized(k)")
      ->capture_default_str();
  attract->add_option("--bits", spec.bits, "Bits per coordinate for quantized")
      ->capture_default_str();
  calibrate->add_option("--calibration-trials", calib_trials, "Gaussian samples")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  spec.steps = steps;
  spec.alpha0 = alpha0;
  spec.stop_tolerance = stop_tolerance;
  if (calibrated_stop) spec.stop_tolerance = 2.0 * latentreg::kReferenceBands.dbar_median;
  spec.out = out;
  spec.mode = mode == "exact" ? latentreg::GradientMode::exact_subgradient
                              : latentreg::GradientMode::paper_verbatim;
  spec.norm = norm == "l1" ? latentreg::NormKind::l1 : latentreg::NormKind::l2;
  spec.kernel = kernel == "imq" ? latentreg::KernelKind::inverse_multiquadric
                                : latentreg::KernelKind::exponential;
  try {
    ex::validate(spec);
    if (*attract) ex::parse_target(spec.target, spec.bits);
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*fig1) {
      const auto recs = ex::cmd_fig1(spec);
      std::cout << "wrote " << recs.size() << " runs to " << spec.out.string() << '\n';
    } else if (*fig2) {
      const auto recs = ex::cmd_fig2(spec);
      std::size_t pass = 0;
      for (const auto& r : recs)
        if (r.cloud == "attracted" && r.result.all_pass()) ++pass;
      std::cout << "attracted clouds within bands: " << pass << '/' << spec.trials << '\n';
    } else if (*eval) {
      if (app.get_option("--out")->count() == 0) spec.out.clear();
      return run_eval(spec, cloud_path, which);
    } else if (*attract) {
      const auto recs = ex::cmd_attract(spec);
      ex::write_attract_summary(std::cout, spec.target, recs);
    } else if (*calibrate) {
      latentreg::CalibrationSpec c;
      c.n = spec.n;
      c.dim = spec.dim;
      c.trials = calib_trials;
      c.seed = app.get_option("--seed")->count() ? spec.seed : c.seed;
      c.projection_dirs = spec.projection_dirs;
      latentreg::write_bands(std::cout, ex::cmd_calibrate(c, spec.out));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
