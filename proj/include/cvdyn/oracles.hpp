#pragma once

#include <random>
#include <utility>

#include "cvdyn/dynamics.hpp"

// Independent reference computations used to cross-check the propagators.
// Nothing here calls into the closed-form dynamics code.
namespace cvdyn::oracles {

struct Rk4Config {
  double dt = 0.0;          // s, upper bound on the step
  double tolerance = 1e-7;  // relative agreement expected against the closed form

  void validate() const;
};

/// Classical fixed-step RK4 for dV/dt = K V + V K^T - gamma V + gamma V_inf.
/// The step is shortened so that it divides `duration`. Rejects steps longer
/// than 1/200 of the fastest normal-mode period.
CovarianceMatrix rk4_evolve(const CovarianceMatrix& initial, const HamiltonianParams& params,
                            const BathParams& bath, const ModeUnits& units, double duration,
                            const Rk4Config& cfg);

/// e^{A t} from a truncated Taylor series of A t / 2^s, squared s times,
/// with s chosen so that |A t / 2^s| <= 1/2.
Matrix series_exponential(const Matrix& a, double t);

/// exp(Omega H) for a random symmetric H with entries ~ N(0, scale^2).
/// Symplectic by construction.
Matrix random_symplectic(int m, double scale, std::mt19937_64& rng);

/// S (oplus_k nu_k I_2) S^T with random nu_k >= 1/2 and random symplectic S.
CovarianceMatrix random_physical_state(int m, std::mt19937_64& rng, double squeeze_scale = 0.5,
                                       double max_nbar = 5.0);

/// Diagonal variances (X, P), in vacuum units, after one ideal
/// [omega2 quarter, omega1 quarter] cycle: (X / k, k P), k = (omega1 / omega2)^2.
std::pair<double, double> variance_map_cycle(double x, double p, double omega1, double omega2);

}  // namespace cvdyn::oracles
