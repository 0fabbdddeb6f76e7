#include "cvdyn/physics_models.hpp"

#include <cmath>
#include <numbers>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"

namespace cvdyn {

void PowerLawInteraction::validate() const {
  if (!(separation > 0.0)) throw InvalidArgument("PowerLawInteraction: separation must be positive");
  if (!(exponent >= 1.0)) throw InvalidArgument("PowerLawInteraction: exponent must be >= 1");
  if (!std::isfinite(strength)) throw InvalidArgument("PowerLawInteraction: strength must be finite");
}

PowerLawInteraction CasimirSpheres::at(double separation) const {
  if (!(radius > 0.0)) throw InvalidArgument("CasimirSpheres: radius must be positive");
  return {alpha * std::pow(radius, 6), 7.0, separation};
}

PowerLawInteraction gravity(double mass, double separation) {
  if (!(mass > 0.0)) throw InvalidArgument("gravity: mass must be positive");
  return {-constants::gravitational * mass * mass, 1.0, separation};
}

BilinearCoupling bilinear_coupling(const PowerLawInteraction& interaction) {
  interaction.validate();
  const double c = interaction.strength;
  const double n = interaction.exponent;
  const double d0 = interaction.separation;
  const double curvature = c * n * (n + 1.0) / std::pow(d0, n + 2.0);
  return {-curvature, curvature, c * n / std::pow(d0, n + 1.0)};
}

double equilibrium_displacement(double force, double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw InvalidArgument("equilibrium_displacement: mass and frequency must be positive");
  return force / (mass * omega * omega);
}

double casimir_alpha_for_peak(double target_log_negativity, double radius, double separation, double mass,
                              double omega) {
  if (!(target_log_negativity > 0.0)) throw InvalidArgument("casimir_alpha_for_peak: target must be positive");
  if (!(radius > 0.0) || !(separation > 0.0) || !(mass > 0.0) || !(omega > 0.0)) {
    throw InvalidArgument("casimir_alpha_for_peak: inputs must be positive");
  }
  const double lambda = target_log_negativity * std::numbers::ln2 * mass * omega * omega;
  return lambda * std::pow(separation, 9) / (56.0 * std::pow(radius, 6));
}

double sphere_mass(double radius, double density) {
  if (!(radius > 0.0) || !(density > 0.0)) throw InvalidArgument("sphere_mass: radius and density must be positive");
  return 4.0 / 3.0 * constants::pi * radius * radius * radius * density;
}

double trap_frequency_magnetic(const MagneticTrap& trap) {
  if (!(trap.susceptibility < 0.0)) throw InvalidArgument("trap_frequency_magnetic: susceptibility must be negative");
  if (!(trap.density > 0.0) || !(trap.gradient > 0.0)) {
    throw InvalidArgument("trap_frequency_magnetic: density and gradient must be positive");
  }
  return std::sqrt(-trap.susceptibility / (constants::vacuum_permeability * trap.density)) * trap.gradient;
}

PendulumJump pendulum_jump(const PendulumScenario& p) {
  if (!(p.length > 0.0)) throw InvalidArgument("pendulum_jump: length must be positive");
  if (!(p.gravity + p.acceleration > 0.0) || !(p.gravity > 0.0)) {
    throw InvalidArgument("pendulum_jump: effective gravity must be positive");
  }
  const double omega1 = std::sqrt(p.gravity / p.length);
  const double omega2 = std::sqrt((p.gravity + p.acceleration) / p.length);
  const double tau2 = constants::pi / (2.0 * omega2);
  return {omega1, omega2, 0.5 * p.acceleration * tau2 * tau2};
}

double pendulum_length(double omega, double gravity) {
  if (!(omega > 0.0) || !(gravity > 0.0)) throw InvalidArgument("pendulum_length: inputs must be positive");
  return gravity / (omega * omega);
}

double csl_form_factor(double x) {
  if (!(x > 0.0)) throw InvalidArgument("csl_form_factor: argument must be positive");
  const double x2 = x * x;
  return 6.0 / x2 * (1.0 - 2.0 / x2 + (1.0 + 2.0 / x2) * std::exp(-x2));
}

double csl_localization_rate(const CslParams& p) {
  if (!(p.rate > 0.0) || !(p.length > 0.0) || !(p.reference_mass > 0.0) || !(p.mass > 0.0) || !(p.radius > 0.0)) {
    throw InvalidArgument("CslParams: all parameters must be positive");
  }
  const double ratio = p.mass / p.reference_mass;
  return ratio * ratio * p.rate / (4.0 * p.length * p.length) * csl_form_factor(p.radius / p.length);
}

double csl_coherence_time(const CslParams& p, double delocalization) {
  if (!(delocalization >= 0.0)) throw InvalidArgument("csl_coherence_time: delocalization must be >= 0");
  const double rate = csl_localization_rate(p) * delocalization * delocalization;
  if (rate <= 1.0 / kMaxCoherenceTime) return kMaxCoherenceTime;
  return 1.0 / rate;
}

double csl_dwell_time(double omega1) {
  if (!(omega1 > 0.0)) throw InvalidArgument("csl_dwell_time: frequency must be positive");
  return 4.0 / 3.0 * constants::pi / (2.0 * omega1);
}

double csl_bound(const CslBoundInput& in) {
  if (!(in.sigma_max > 0.0) || !(in.mass > 0.0) || !(in.radius > 0.0) || !(in.length > 0.0) ||
      !(in.reference_mass > 0.0) || !(in.safety > 0.0)) {
    throw InvalidArgument("csl_bound: inputs must be positive");
  }
  const double tau = csl_dwell_time(in.omega1);
  const double m0 = in.reference_mass;
  return 4.0 * m0 * m0 * in.length * in.length /
         (in.safety * tau * in.mass * in.mass * in.sigma_max * in.sigma_max * csl_form_factor(in.radius / in.length));
}

double collision_rate(const GasParams& gas) {
  if (!(gas.pressure > 0.0) || !(gas.temperature > 0.0) || !(gas.radius > 0.0) || !(gas.molecule_mass > 0.0)) {
    throw InvalidArgument("collision_rate: inputs must be positive");
  }
  const double kt = constants::boltzmann * gas.temperature;
  const double speed = std::sqrt(3.0 * kt / gas.molecule_mass);
  return constants::pi * speed * gas.pressure * gas.radius * gas.radius / kt;
}

}  // namespace cvdyn
