#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvdyn/config.hpp"
#include "cvdyn/dynamics.hpp"
#include "cvdyn/physics_models.hpp"
#include "cvdyn/protocol.hpp"

namespace cvdyn {

struct SweepBlock {
  std::vector<double> ratios;  // omega2 / omega1
};

struct NoiseBlock {
  std::vector<double> sigma_hz;  // sigma_omega / 2 pi grid
  std::vector<int> cycles;       // protocol lengths; defaults to protocol.cycles
  int samples = 1000;
  std::uint64_t seed = 1;
  bool threshold = true;
  bool forward_threshold = false;  // also report sigma* of the forward block alone
  double cutoff = 1e-6;
  double relative_tolerance = 0.05;
  bool perturb_durations = false;
  bool dissipation = false;  // keep the bath during noise runs
};

struct CslBlock {
  std::optional<double> sigma_max;  // m; taken from the protocol when absent
  double length = 1e-7;             // a, m
  double reference_mass = 0.0;      // m0, kg
  double safety = 10.0;
  std::optional<double> rate;  // gamma0 for the coherence-time report; defaults to the bound
};

struct GasBlock {
  double pressure = 0.0;     // Pa
  double temperature = 0.0;  // K
  double molecule_mass = 0.0;
};

/// A fully resolved run description built from a config document.
struct Scenario {
  std::string name;
  int count = 2;
  double mass = 0.0;    // kg
  double radius = 0.0;  // m, 0 when only the mass was given

  std::string trap_type;
  double trap_omega = 0.0;  // rad/s, bare trap frequency before any local shift
  std::optional<PendulumJump> pendulum;
  double pendulum_length = 0.0;

  std::string interaction_type;  // casimir | gravity | power-law | none
  std::optional<PowerLawInteraction> interaction;
  BilinearCoupling bilinear{0.0, 0.0, 0.0};
  bool local_shift = false;
  double coupling = 0.0;  // lambda used in the simulation, N/m

  ProtocolSpec protocol;
  double quality = 0.0;  // 0 = no dissipation
  BathParams bath;
  double initial_nbar = 0.0;

  double sample_dt = 0.0;  // s
  std::string trajectory_file = "trajectory.csv";
  std::string summary_file = "summary.json";
  bool compare_no_reversal = false;

  std::optional<SweepBlock> sweep;
  std::optional<NoiseBlock> noise;
  std::optional<CslBlock> csl;
  std::optional<GasBlock> gas;

  std::uint64_t config_hash = 0;

  ModeUnits units() const { return {mass, protocol.omega1}; }
  /// build_full when protocol.reverse, build_forward otherwise.
  JumpSchedule schedule() const;
  /// Same total duration, no reversal: forward block then a hold at omega1.
  JumpSchedule no_reversal_schedule() const;
  CovarianceMatrix initial_state() const;
  /// Frequency after the optional local spring shift.
  double shifted(double omega) const;
};

Scenario load_scenario(const config::Document& doc);

/// Loads `path`, or the bundled preset of that name when no such file exists.
Scenario load_scenario_file(const std::string& path_or_preset);

/// Path of a bundled preset, e.g. preset_path("casimir-diamonds").
std::string preset_path(const std::string& name);

}  // namespace cvdyn
