#include "cvdyn/protocol.hpp"

#include <cmath>
#include <iostream>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"

namespace cvdyn {

namespace {

Segment uniform_segment(double omega, double duration, int modes, double coupling, double mass) {
  Segment s;
  s.params.omega.assign(static_cast<std::size_t>(modes), omega);
  s.params.mass = mass;
  s.params.coupling = coupling;
  s.duration = duration;
  return s;
}

}  // namespace

double quarter_period(double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("quarter_period: frequency must be positive");
  return constants::pi / (2.0 * omega);
}

void ProtocolSpec::validate() const {
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw InvalidArgument("ProtocolSpec: frequencies must be positive");
  if (cycles < 0) throw InvalidArgument("ProtocolSpec: cycle count must be >= 0");
  if (modes < 1) throw InvalidArgument("ProtocolSpec: mode count must be >= 1");
  if (!(hold_after >= 0.0)) throw InvalidArgument("ProtocolSpec: hold_after must be >= 0");
  if (intermediate_wait && !(*intermediate_wait >= tau1())) {
    throw InvalidArgument("ProtocolSpec: intermediate_wait must be at least a quarter period of omega1");
  }
}

double ProtocolSpec::tau1() const { return quarter_period(omega1); }
double ProtocolSpec::tau2() const { return quarter_period(omega2); }
double ProtocolSpec::junction_wait() const { return intermediate_wait.value_or(constants::pi / omega1); }

std::size_t forward_segment_count(const ProtocolSpec& spec) { return 2 * static_cast<std::size_t>(spec.cycles); }

JumpSchedule build_forward(const ProtocolSpec& spec, double coupling, double mass) {
  spec.validate();
  JumpSchedule schedule;
  schedule.reserve(forward_segment_count(spec) + 1);
  for (int n = 0; n < spec.cycles; ++n) {
    schedule.push_back(uniform_segment(spec.omega2, spec.tau2(), spec.modes, coupling, mass));
    schedule.push_back(uniform_segment(spec.omega1, spec.tau1(), spec.modes, coupling, mass));
  }
  if (!spec.reverse && spec.hold_after > 0.0) {
    schedule.push_back(uniform_segment(spec.omega1, spec.hold_after, spec.modes, coupling, mass));
  }
  return schedule;
}

JumpSchedule build_full(const ProtocolSpec& spec, double coupling, double mass) {
  spec.validate();
  if (!spec.reverse) throw InvalidArgument("build_full: spec.reverse must be set");
  ProtocolSpec forward = spec;
  forward.reverse = true;  // suppresses the hold inside build_forward
  JumpSchedule schedule = build_forward(forward, coupling, mass);
  for (int n = 0; n < spec.cycles; ++n) {
    const double first = n == 0 ? spec.junction_wait() - spec.tau1() : spec.tau1();
    if (first > 0.0) schedule.push_back(uniform_segment(spec.omega1, first, spec.modes, coupling, mass));
    schedule.push_back(uniform_segment(spec.omega2, spec.tau2(), spec.modes, coupling, mass));
  }
  if (spec.hold_after > 0.0) {
    schedule.push_back(uniform_segment(spec.omega1, spec.hold_after, spec.modes, coupling, mass));
  }
  return schedule;
}

double predicted_squeezing(const ProtocolSpec& spec) {
  spec.validate();
  return spec.cycles * std::log(spec.omega1 / spec.omega2);
}

JumpSchedule build_flip_schedule(double omega, double omega_flip, double total, double coupling,
                                 double mass, const FlipOptions& options) {
  if (!(omega > 0.0) || !(omega_flip > 0.0)) throw InvalidArgument("build_flip_schedule: frequencies must be positive");
  if (!(total >= 0.0)) throw InvalidArgument("build_flip_schedule: total must be >= 0");
  if (options.target_mode < 0 || options.target_mode > 1) {
    throw InvalidArgument("build_flip_schedule: target mode must be 0 or 1");
  }
  if (omega_flip < 20.0 * omega) {
    if (options.strict) throw InvalidArgument("build_flip_schedule: flip frequency must be >= 20 omega");
    std::cerr << "warning: build_flip_schedule: flip frequency " << omega_flip << " is below 20 omega\n";
  }
  const double flip = constants::pi / omega_flip;
  const double spacing = constants::pi / omega;
  JumpSchedule schedule;
  double elapsed = 0.0;
  auto push = [&](Segment s) {
    const double room = total - elapsed;
    if (room <= 0.0) return false;
    if (s.duration > room) s.duration = room;
    elapsed += s.duration;
    schedule.push_back(std::move(s));
    return true;
  };
  while (elapsed < total) {
    if (!push(uniform_segment(omega, spacing - flip, 2, coupling, mass))) break;
    Segment flip_segment = uniform_segment(omega, flip, 2, coupling, mass);
    flip_segment.params.omega[options.target_mode] = omega_flip;
    if (!push(std::move(flip_segment))) break;
  }
  return schedule;
}

}  // namespace cvdyn
