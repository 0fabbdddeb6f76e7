#pragma once

#include <cstdint>

#include "cvdyn/dynamics.hpp"
#include "cvdyn/protocol.hpp"

namespace cvdyn {

/// Gaussian frequency-control error applied after every jump.
struct NoiseSpec {
  double sigma_omega = 0.0;  // rad/s
  int samples = 1000;
  std::uint64_t seed = 0;
  /// Also jitter each segment duration by the same relative amount
  /// sigma_omega / omega_nominal (sensitivity studies only).
  bool perturb_durations = false;

  void validate() const;
};

struct NoisySchedule {
  JumpSchedule schedule;
  int redraws = 0;  // non-positive frequency draws that were rejected
};

/// Replaces every mode frequency of every segment by an independent draw from
/// N(omega_nominal, sigma_omega^2) truncated to omega > 0. The stream depends
/// only on (seed, draw_index), so draws are reproducible in any order.
NoisySchedule sample_noisy_schedule(const JumpSchedule& schedule, const NoiseSpec& noise,
                                    std::uint64_t draw_index);

/// Full protocol (forward + reverse) of two resonators from the vacuum, or
/// only the forward block when forward_only is set.
struct NoiseProblem {
  ProtocolSpec protocol;
  double coupling = 0.0;  // N/m
  double mass = 0.0;      // kg
  BathParams bath;
  bool forward_only = false;

  JumpSchedule nominal_schedule() const;
  ModeUnits units() const { return {mass, protocol.omega1}; }
};

struct NoiseAverage {
  CovarianceMatrix covariance;
  double log_negativity = 0.0;
  double standard_error = 0.0;  // grouped jackknife over 10 batches
  int samples = 0;
  long redraws = 0;
};

/// Mean final covariance over noise.samples noisy runs, OpenMP-parallel over
/// draws. threads = 0 uses the OpenMP default. Results are bit-identical to
/// averaged_covariance_reference for any thread count.
NoiseAverage averaged_covariance(const NoiseProblem& problem, const NoiseSpec& noise, int threads = 0);

/// Serial reference implementation of averaged_covariance.
NoiseAverage averaged_covariance_reference(const NoiseProblem& problem, const NoiseSpec& noise);

struct ThresholdOptions {
  double cutoff = 1e-6;              // ebits; below this entanglement counts as destroyed
  double relative_tolerance = 0.05;  // final bracket upper / lower - 1
  int threads = 0;
};

struct Threshold {
  double sigma_star = 0.0;  // largest sigma found with E_N above the cutoff
  double upper = 0.0;       // smallest sigma found with E_N at or below it
  double noiseless_log_negativity = 0.0;
  int samples = 0;
  int evaluations = 0;
};

/// Bisection (geometric) on sigma_omega with common random numbers.
/// Throws InvalidScenario when the noiseless protocol is not entangled.
Threshold threshold_sigma_star(const NoiseProblem& problem, const NoiseSpec& base,
                               const ThresholdOptions& options = {});

/// Order-of-magnitude threshold (4 omega1 / pi) e^{-2 |r|}, r = N ln(omega1 / omega2).
double sigma_star_estimate(const ProtocolSpec& spec);

}  // namespace cvdyn
