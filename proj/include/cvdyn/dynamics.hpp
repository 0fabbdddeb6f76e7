#pragma once

#include <vector>

#include "cvdyn/gaussian_state.hpp"

namespace cvdyn {

/// Quadratic Hamiltonian of equal-mass oscillators,
///   H = sum_i p_i^2 / 2m + m omega_i^2 x_i^2 / 2 + coupling * x_0 x_1.
struct HamiltonianParams {
  std::vector<double> omega;  // rad/s, one per mode
  double mass = 0.0;          // kg
  double coupling = 0.0;      // N/m, acts between modes 0 and 1

  int modes() const { return static_cast<int>(omega.size()); }
  void validate() const;
};

/// K = Omega H_mat in internal units, so that dV/dt = K V + V K^T for closed
/// dynamics. Omega K is symmetric.
struct DriftMatrix {
  Matrix matrix;
};

/// Markovian thermal bath. gamma is frequency independent; the equilibrium
/// state is thermal with `nbar` quanta at each segment's own frequencies, or
/// at the reference frequency when rethermalize is false.
struct BathParams {
  double gamma = 0.0;  // 1/s
  double nbar = 0.0;
  bool rethermalize = true;

  void validate() const;
};

/// V_inf for the given Hamiltonian, in the reference units.
CovarianceMatrix equilibrium_state(const BathParams& bath, const HamiltonianParams& params,
                                   const ModeUnits& units);

/// One epoch of constant Hamiltonian.
struct Segment {
  HamiltonianParams params;
  double duration = 0.0;  // s
};

using JumpSchedule = std::vector<Segment>;

double schedule_duration(const JumpSchedule& schedule);

/// Covariance matrices sampled in time. omega holds the trap frequencies in
/// effect at each sample (for boundary samples, the segment just finished).
///
/// frame_states[i] is states[i] seen in the frame that co-rotates with the
/// uncoupled local oscillators since the start of the current segment. It is
/// related to states[i] by a local symplectic map, so it has the same
/// entanglement, purity and symplectic spectrum, but a squeezed state that is
/// halfway through a rotation stays well conditioned there.
struct Trajectory {
  std::vector<double> times;  // s
  std::vector<CovarianceMatrix> states;
  std::vector<CovarianceMatrix> frame_states;
  std::vector<std::vector<double>> omega;
  std::vector<int> segment;
};

DriftMatrix drift_matrix(const HamiltonianParams& params, const ModeUnits& units);

/// The same generator in SI coordinates (x in m, p in kg m/s, t in s).
Matrix drift_matrix_si(const HamiltonianParams& params);

/// e^{A t} by scaling and squaring with a Pade approximant. Throws
/// NumericError if the result overflows.
Matrix matrix_exponential(const Matrix& a, double t);

/// Phase-space flow e^{K t} of the closed dynamics over `duration` seconds.
/// Stable Hamiltonians are propagated in their normal-mode basis with exact
/// rotations, which stays symplectic to rounding for arbitrarily long times;
/// otherwise this falls back to matrix_exponential.
Matrix transfer_matrix(const HamiltonianParams& params, const ModeUnits& units, double duration);

/// Exact propagator of dV/dt = K V + V K^T - gamma V + gamma V_inf over one
/// segment:
///   V(t) = e^{-gamma t} F V F^T + D,   F = e^{K t},
/// with D obtained from the Lyapunov identity M D + D M^T = e^{Mt} Q e^{M^T t} - Q,
/// M = K - gamma/2, Q = gamma V_inf.
class SegmentPropagator {
 public:
  SegmentPropagator(const HamiltonianParams& params, const BathParams& bath, const ModeUnits& units,
                    double duration);

  CovarianceMatrix apply(const CovarianceMatrix& v) const;
  /// L^{-1} apply(v) L^{-T}, with L the uncoupled local rotation over the
  /// same duration, computed without forming apply(v) first.
  CovarianceMatrix apply_in_local_frame(const CovarianceMatrix& v) const;

  const Matrix& transfer() const { return transfer_; }
  double decay() const { return decay_; }
  const Matrix& diffusion() const { return diffusion_; }

 private:
  Matrix transfer_;
  Matrix frame_inverse_;
  double decay_ = 1.0;
  Matrix diffusion_;
};

CovarianceMatrix evolve_segment(const CovarianceMatrix& initial, const Segment& segment,
                                const BathParams& bath, const ModeUnits& units);

/// Final state after the whole schedule.
CovarianceMatrix propagate(const CovarianceMatrix& initial, const JumpSchedule& schedule,
                           const BathParams& bath, const ModeUnits& units);

/// Samples every `sample_dt` seconds inside each segment (counted from the
/// segment start) and at every segment boundary. Within a segment every
/// sample is propagated directly from the segment's initial state, so the
/// boundary chain never accumulates sampling round-off.
Trajectory evolve_schedule(const CovarianceMatrix& initial, const JumpSchedule& schedule,
                           const BathParams& bath, const ModeUnits& units, double sample_dt);

struct Observables {
  double time = 0.0;
  double log_negativity = 0.0;
  double purity = 0.0;
  std::vector<double> phonons;
  std::vector<double> var_x;  // m^2
  std::vector<double> var_p;  // (kg m/s)^2
  double cov_x1x2 = 0.0;      // m^2
};

/// Per-sample diagnostics. log_negativity is only evaluated for two or more
/// modes (0 otherwise). log_negativity and purity come from frame_states.
std::vector<Observables> observe(const Trajectory& trajectory, const ModeUnits& units);

}  // namespace cvdyn
