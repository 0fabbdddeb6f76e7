#pragma once

namespace cvdyn {

/// U(d) = C / d^n about the separation d0.
struct PowerLawInteraction {
  double strength;    // C, J m^n
  double exponent;    // n
  double separation;  // d0, m

  void validate() const;
};

/// Leading sphere-sphere Casimir term U = alpha R0^6 / d^7.
struct CasimirSpheres {
  double alpha;   // J m
  double radius;  // R0, m

  PowerLawInteraction at(double separation) const;
};

/// Newtonian pair potential U = -G m^2 / d.
PowerLawInteraction gravity(double mass, double separation);

struct BilinearCoupling {
  double coupling;     // lambda, N/m: coefficient of x1 x2
  double local_shift;  // N/m added to each oscillator's spring constant
  double linear_force; // N, magnitude of C n / d0^(n+1); shifts the equilibria
};

/// Second-order expansion of the power law in the relative coordinate:
/// lambda = -C n (n+1) / d0^(n+2), local shift C n (n+1) / d0^(n+2).
BilinearCoupling bilinear_coupling(const PowerLawInteraction& interaction);

/// Static equilibrium displacement F / (m omega^2) caused by the linear term.
double equilibrium_displacement(double force, double mass, double omega);

/// Casimir alpha that makes |lambda| / (m omega^2 ln 2), the no-protocol
/// entanglement maximum, equal to `target_log_negativity`.
double casimir_alpha_for_peak(double target_log_negativity, double radius, double separation, double mass,
                              double omega);

double sphere_mass(double radius, double density);

struct MagneticTrap {
  double susceptibility;  // chi, dimensionless, < 0
  double density;         // kg/m^3
  double gradient;        // T/m
};

/// omega = sqrt(-chi / (mu0 rho)) B'.
double trap_frequency_magnetic(const MagneticTrap& trap);

struct PendulumScenario {
  double length;        // m
  double gravity;       // m/s^2
  double acceleration;  // base acceleration a_up, m/s^2
};

struct PendulumJump {
  double omega1;
  double omega2;
  double base_displacement;  // a_up tau2^2 / 2, m
};

PendulumJump pendulum_jump(const PendulumScenario& p);

/// Pendulum length with small-angle frequency omega.
double pendulum_length(double omega, double gravity);

/// f(x) = (6 / x^2) [1 - 2/x^2 + (1 + 2/x^2) e^{-x^2}].
double csl_form_factor(double x);

struct CslParams {
  double rate;            // gamma0, Hz
  double length;          // a, m
  double reference_mass;  // m0, kg
  double mass;            // body mass, kg
  double radius;          // body radius, m
};

/// Lambda = (m / m0)^2 gamma0 f(R / a) / (4 a^2), 1/(s m^2).
double csl_localization_rate(const CslParams& p);

/// 1 / (Lambda d^2), capped at kMaxCoherenceTime for d -> 0.
double csl_coherence_time(const CslParams& p, double delocalization);

inline constexpr double kMaxCoherenceTime = 1e300;

struct CslBoundInput {
  double sigma_max;       // m, maximal spread
  double omega1;          // rad/s
  double mass;            // kg
  double radius;          // m
  double length;          // a, m
  double reference_mass;  // m0, kg
  double safety = 10.0;
};

/// Time spent with sigma >= sigma_max / 2 while rotating at omega1: 4 tau1 / 3.
double csl_dwell_time(double omega1);

/// Largest gamma0 compatible with coherence for `safety` times the dwell time:
/// gamma_bar = 4 m0^2 a^2 / (safety tau m^2 sigma_max^2 f(R / a)).
double csl_bound(const CslBoundInput& in);

struct GasParams {
  double pressure;     // Pa
  double temperature;  // K
  double radius;       // m
  double molecule_mass;  // kg
};

/// R_air = pi v P R^2 / (kB T) with v = sqrt(3 kB T / m_a).
double collision_rate(const GasParams& gas);

}  // namespace cvdyn
