#pragma once

#include <optional>

#include "cvdyn/dynamics.hpp"

namespace cvdyn {

/// Frequency-jump squeezing protocol. Each cycle jumps to omega2 for a
/// quarter period tau2 = pi / (2 omega2), then back to omega1 for
/// tau1 = pi / (2 omega1).
struct ProtocolSpec {
  double omega1 = 0.0;  // rad/s
  double omega2 = 0.0;  // rad/s
  int cycles = 0;
  bool reverse = false;
  /// Total dwell at omega1 between the last forward omega2 epoch and the first
  /// reverse one. Defaults to half a period, pi / omega1; must be >= tau1.
  std::optional<double> intermediate_wait;
  double hold_after = 0.0;  // s at omega1 once the protocol is over
  int modes = 2;

  void validate() const;
  double tau1() const;
  double tau2() const;
  double junction_wait() const;
};

double quarter_period(double omega);

/// N x [ (omega2, tau2), (omega1, tau1) ], followed by hold_after at omega1
/// unless spec.reverse is set.
JumpSchedule build_forward(const ProtocolSpec& spec, double coupling, double mass);

/// Forward block, then the inverse sequence N x [ (omega1, .), (omega2, tau2) ]
/// whose first omega1 epoch tops the junction dwell up to junction_wait(),
/// then hold_after at omega1. With lambda = gamma = 0 and the default wait the
/// reverse block undoes the forward block exactly.
JumpSchedule build_full(const ProtocolSpec& spec, double coupling, double mass);

/// Number of leading segments of build_full/build_forward that make up the
/// forward (squeezing) block.
std::size_t forward_segment_count(const ProtocolSpec& spec);

/// Squeezing in the variance convention: x variance after N ideal cycles from
/// vacuum is e^{-2 r} / 2 with r = N ln(omega1 / omega2).
double predicted_squeezing(const ProtocolSpec& spec);

struct FlipOptions {
  int target_mode = 1;
  /// When false, omega_flip < 20 omega only warns on stderr.
  bool strict = true;
};

/// Two modes at omega; every half period of omega the target mode jumps to
/// omega_flip for pi / omega_flip, which maps its quadratures to their
/// negatives. The schedule is truncated to `total` seconds.
JumpSchedule build_flip_schedule(double omega, double omega_flip, double total, double coupling,
                                 double mass, const FlipOptions& options = {});

}  // namespace cvdyn
