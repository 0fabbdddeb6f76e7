#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvdyn/dynamics.hpp"
#include "cvdyn/robustness.hpp"
#include "cvdyn/scenario.hpp"

namespace cvdyn {

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides noise.seed
  std::optional<int> samples;         // overrides noise.samples
  int threads = 0;                    // 0 = OpenMP default
};

struct SimulationResult {
  std::vector<Observables> rows;
  double peak_log_negativity = 0.0;
  double final_log_negativity = 0.0;
  std::vector<double> final_phonons;
  double final_purity = 0.0;
  // End of the forward (squeezing) block.
  double mid_time = 0.0;
  double mid_log_negativity = 0.0;
  std::vector<double> mid_phonons;
  double mid_squeezing = 0.0;  // r_eff of mode 0
  double max_position_spread = 0.0;  // m, largest sqrt(<x_1^2>) sampled
};

/// Samples the scenario's schedule (or `schedule` when given). Throws
/// NumericError naming the time of the first unphysical sample.
SimulationResult run_simulation(const Scenario& scenario, const JumpSchedule* schedule = nullptr);

/// run_simulation plus trajectory CSV and summary JSON under options.out_dir.
SimulationResult cmd_simulate(const Scenario& scenario, const RunOptions& options, std::ostream& log);

struct SweepRow {
  double ratio = 0.0;
  double final_log_negativity = 0.0;
  double pre_reversal_phonons = 0.0;  // mode 0 at the end of the forward block
  double final_phonons = 0.0;
  double baseline_log_negativity = 0.0;  // same duration at omega1 without jumps
};

/// One row per omega2 / omega1, computed in parallel and returned in input order.
std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::vector<double>& ratios, int threads = 0);
std::vector<SweepRow> cmd_sweep(const Scenario& scenario, const RunOptions& options, std::ostream& log);

struct NoiseRow {
  int cycles = 0;
  double sigma_omega = 0.0;  // rad/s
  double log_negativity = 0.0;
  double normalized = 0.0;  // against sigma = 0 at the same cycle count
  double standard_error = 0.0;
  int samples = 0;
  long redraws = 0;
};

struct ThresholdRow {
  int cycles = 0;
  bool forward_only = false;
  Threshold threshold;
  double estimate = 0.0;  // (4 omega1 / pi) e^{-2 r}
};

struct NoiseReport {
  std::vector<NoiseRow> grid;
  std::vector<ThresholdRow> thresholds;
};

NoiseReport run_noise(const Scenario& scenario, const RunOptions& options);
NoiseReport cmd_noise(const Scenario& scenario, const RunOptions& options, std::ostream& log);

struct EstimateItem {
  std::string name;
  double value = 0.0;
  std::string unit;
  std::string formula;
};

/// Standalone calculators for whatever blocks the scenario defines. Throws
/// ConfigError when there is nothing to estimate.
std::vector<EstimateItem> run_estimate(const Scenario& scenario);
std::vector<EstimateItem> cmd_estimate(const Scenario& scenario, const RunOptions& options, std::ostream& log);

struct ValidateOptions {
  double tolerance_scale = 1.0;  // multiplies every check's tolerance
  int threads = 0;
  std::uint64_t seed = 20240611;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double error = 0.0;
  double tolerance = 0.0;
};

std::vector<CheckResult> run_validation(const ValidateOptions& options);
/// Prints one line per check; returns true when all passed.
bool cmd_validate(const ValidateOptions& options, std::ostream& log);

/// "# cvdyn <version> scenario=<name> config=fnv1a64:<hash>"
std::string output_header(const std::string& name, std::uint64_t config_hash);

/// %.17g
std::string format_number(double value);

}  // namespace cvdyn
