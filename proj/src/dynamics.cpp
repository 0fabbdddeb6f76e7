#include "cvdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"
#include "cvdyn/measures.hpp"

namespace cvdyn {

namespace {

// Internal potential matrix W: diag(w_i^2) plus the coupling between modes 0 and 1.
Matrix potential_matrix(const HamiltonianParams& params, const ModeUnits& units) {
  const int m = params.modes();
  Matrix w = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double ratio = params.omega[i] / units.omega_ref;
    w(i, i) = ratio * ratio;
  }
  if (m >= 2) {
    const double c = units.to_internal_coupling(params.coupling);
    w(0, 1) = c;
    w(1, 0) = c;
  }
  return w;
}

// Solves M X + X M^T = rhs through the Kronecker form
// (I (x) M + M (x) I) vec X = vec rhs, column-major vec.
Matrix solve_lyapunov(const Matrix& m, const Matrix& rhs) {
  const int n = static_cast<int>(m.rows());
  const int n2 = n * n;
  Matrix big = Matrix::Zero(n2, n2);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        big(i + j * n, k + j * n) += m(i, k);
        big(i + j * n, i + k * n) += m(j, k);
      }
    }
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n2);
  const Eigen::VectorXd x = big.partialPivLu().solve(b);
  if (!x.allFinite()) throw NumericError("dissipative integral: Lyapunov solve failed");
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

// cos/sin of theta, exact at multiples of pi/2. Quarter-period waits are
// built as pi / (2 omega), and the few-ulp error of that product would
// otherwise be amplified by the accumulated squeezing.
void rotation_phase(double theta, double& c, double& s) {
  const double turns = theta / (0.5 * constants::pi);
  const double nearest = std::round(turns);
  if (std::abs(turns - nearest) <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(turns))) {
    switch (static_cast<long long>(std::fmod(nearest, 4.0) + 4.0) % 4) {
      case 0: c = 1.0; s = 0.0; return;
      case 1: c = 0.0; s = 1.0; return;
      case 2: c = -1.0; s = 0.0; return;
      default: c = 0.0; s = -1.0; return;
    }
  }
  c = std::cos(theta);
  s = std::sin(theta);
}

// Inverse of the uncoupled local flow over internal time t: per mode the
// rotation [[c, s / w], [-w s, c]] undone.
Matrix local_frame_inverse(const HamiltonianParams& params, const ModeUnits& units, double t) {
  const int m = params.modes();
  Matrix l = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    const double w = params.omega[i] / units.omega_ref;
    double c = 0.0, s = 0.0;
    rotation_phase(w * t, c, s);
    l(i, i) = c;
    l(i, m + i) = -s / w;
    l(m + i, i) = w * s;
    l(m + i, m + i) = c;
  }
  return l;
}

}  // namespace

void HamiltonianParams::validate() const {
  if (omega.empty()) throw InvalidArgument("HamiltonianParams: no modes");
  if (!(mass > 0.0)) throw InvalidArgument("HamiltonianParams: mass must be positive");
  for (double w : omega) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("HamiltonianParams: trap frequencies must be positive");
    }
  }
  if (!std::isfinite(coupling)) throw InvalidArgument("HamiltonianParams: coupling must be finite");
  if (coupling != 0.0 && omega.size() < 2) {
    throw InvalidArgument("HamiltonianParams: coupling needs at least two modes");
  }
}

void BathParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("BathParams: gamma must be >= 0");
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw InvalidArgument("BathParams: nbar must be >= 0");
}

CovarianceMatrix equilibrium_state(const BathParams& bath, const HamiltonianParams& params,
                                   const ModeUnits& units) {
  std::vector<double> ratios(params.omega.size(), 1.0);
  if (bath.rethermalize) {
    for (std::size_t i = 0; i < ratios.size(); ++i) ratios[i] = params.omega[i] / units.omega_ref;
  }
  return thermal_state(ratios, bath.nbar);
}

double schedule_duration(const JumpSchedule& schedule) {
  double total = 0.0;
  for (const auto& segment : schedule) total += segment.duration;
  return total;
}

DriftMatrix drift_matrix(const HamiltonianParams& params, const ModeUnits& units) {
  params.validate();
  const int m = params.modes();
  Matrix k = Matrix::Zero(2 * m, 2 * m);
  k.topRightCorner(m, m).setIdentity();
  k.bottomLeftCorner(m, m) = -potential_matrix(params, units);
  return {k};
}

Matrix drift_matrix_si(const HamiltonianParams& params) {
  params.validate();
  const int m = params.modes();
  Matrix k = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    k(i, m + i) = 1.0 / params.mass;
    k(m + i, i) = -params.mass * params.omega[i] * params.omega[i];
  }
  if (m >= 2) {
    k(m, 1) = -params.coupling;
    k(m + 1, 0) = -params.coupling;
  }
  return k;
}

Matrix matrix_exponential(const Matrix& a, double t) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix_exponential: matrix must be square");
  if (!a.allFinite() || !std::isfinite(t)) throw InvalidArgument("matrix_exponential: non-finite input");
  const Matrix scaled = a * t;
  Matrix result = scaled.exp();
  if (!result.allFinite()) throw NumericError("matrix_exponential: overflow");
  return result;
}

Matrix transfer_matrix(const HamiltonianParams& params, const ModeUnits& units, double duration) {
  params.validate();
  if (!(duration >= 0.0)) throw InvalidArgument("transfer_matrix: duration must be >= 0");
  const int m = params.modes();
  const double t = units.to_internal_time(duration);
  const Matrix w = potential_matrix(params, units);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w);
  if (solver.info() != Eigen::Success || !(solver.eigenvalues().minCoeff() > 0.0)) {
    return matrix_exponential(drift_matrix(params, units).matrix, t);
  }
  const Matrix& u = solver.eigenvectors();
  const Eigen::VectorXd freq = solver.eigenvalues().cwiseSqrt();
  Eigen::VectorXd c(m), s(m);
  for (int k = 0; k < m; ++k) rotation_phase(freq(k) * t, c(k), s(k));
  Matrix f(2 * m, 2 * m);
  f.topLeftCorner(m, m) = u * c.asDiagonal() * u.transpose();
  f.topRightCorner(m, m) = u * s.cwiseQuotient(freq).asDiagonal() * u.transpose();
  f.bottomLeftCorner(m, m) = -(u * s.cwiseProduct(freq).asDiagonal() * u.transpose());
  f.bottomRightCorner(m, m) = f.topLeftCorner(m, m);
  return f;
}

SegmentPropagator::SegmentPropagator(const HamiltonianParams& params, const BathParams& bath,
                                     const ModeUnits& units, double duration) {
  bath.validate();
  transfer_ = transfer_matrix(params, units, duration);
  const int n = static_cast<int>(transfer_.rows());
  const double gamma = bath.gamma / units.omega_ref;
  const double t = units.to_internal_time(duration);
  frame_inverse_ = local_frame_inverse(params, units, t);
  decay_ = std::exp(-gamma * t);
  diffusion_ = Matrix::Zero(n, n);
  if (gamma > 0.0 && t > 0.0) {
    const Matrix q = gamma * equilibrium_state(bath, params, units).matrix();
    const Matrix drift = drift_matrix(params, units).matrix - 0.5 * gamma * Matrix::Identity(n, n);
    const Matrix rhs = decay_ * transfer_ * q * transfer_.transpose() - q;
    diffusion_ = solve_lyapunov(drift, rhs);
    diffusion_ = 0.5 * (diffusion_ + diffusion_.transpose()).eval();
  }
}

CovarianceMatrix SegmentPropagator::apply(const CovarianceMatrix& v) const {
  if (v.matrix().rows() != transfer_.rows()) throw InvalidArgument("SegmentPropagator: mode count mismatch");
  return CovarianceMatrix::symmetrized(decay_ * transfer_ * v.matrix() * transfer_.transpose() + diffusion_);
}

CovarianceMatrix SegmentPropagator::apply_in_local_frame(const CovarianceMatrix& v) const {
  if (v.matrix().rows() != transfer_.rows()) throw InvalidArgument("SegmentPropagator: mode count mismatch");
  const Matrix g = frame_inverse_ * transfer_;
  return CovarianceMatrix::symmetrized(decay_ * g * v.matrix() * g.transpose() +
                                       frame_inverse_ * diffusion_ * frame_inverse_.transpose());
}

CovarianceMatrix evolve_segment(const CovarianceMatrix& initial, const Segment& segment,
                                const BathParams& bath, const ModeUnits& units) {
  if (!(segment.duration >= 0.0)) throw InvalidArgument("evolve_segment: negative duration");
  require_physical(initial, "evolve_segment");
  return SegmentPropagator(segment.params, bath, units, segment.duration).apply(initial);
}

CovarianceMatrix propagate(const CovarianceMatrix& initial, const JumpSchedule& schedule,
                           const BathParams& bath, const ModeUnits& units) {
  CovarianceMatrix v = initial;
  for (const auto& segment : schedule) {
    if (!(segment.duration >= 0.0)) throw InvalidArgument("propagate: negative duration");
    if (segment.duration == 0.0) continue;
    v = SegmentPropagator(segment.params, bath, units, segment.duration).apply(v);
  }
  return v;
}

Trajectory evolve_schedule(const CovarianceMatrix& initial, const JumpSchedule& schedule,
                           const BathParams& bath, const ModeUnits& units, double sample_dt) {
  if (schedule.empty()) throw InvalidArgument("evolve_schedule: empty schedule");
  if (!(sample_dt > 0.0)) throw InvalidArgument("evolve_schedule: sample_dt must be positive");
  require_physical(initial, "evolve_schedule");

  Trajectory out;
  auto record = [&](double t, const CovarianceMatrix& v, const CovarianceMatrix& w, int index) {
    out.times.push_back(t);
    out.states.push_back(v);
    out.frame_states.push_back(w);
    out.omega.push_back(schedule[index].params.omega);
    out.segment.push_back(index);
  };

  record(0.0, initial, initial, 0);
  CovarianceMatrix v = initial;
  double start = 0.0;
  for (int index = 0; index < static_cast<int>(schedule.size()); ++index) {
    const Segment& segment = schedule[index];
    if (!(segment.duration >= 0.0)) throw InvalidArgument("evolve_schedule: negative duration");
    if (segment.duration == 0.0) continue;
    // Interior samples stop short of the boundary so times stay strictly increasing.
    const double guard = 1e-9 * sample_dt;
    for (long k = 1;; ++k) {
      const double offset = static_cast<double>(k) * sample_dt;
      if (offset >= segment.duration - guard) break;
      const SegmentPropagator partial(segment.params, bath, units, offset);
      record(start + offset, partial.apply(v), partial.apply_in_local_frame(v), index);
    }
    v = SegmentPropagator(segment.params, bath, units, segment.duration).apply(v);
    start += segment.duration;
    record(start, v, v, index);
  }
  return out;
}

std::vector<Observables> observe(const Trajectory& trajectory, const ModeUnits& units) {
  std::vector<Observables> rows;
  rows.reserve(trajectory.times.size());
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    const CovarianceMatrix& v = trajectory.states[s];
    const CovarianceMatrix& w =
        trajectory.frame_states.size() == trajectory.states.size() ? trajectory.frame_states[s] : v;
    const int m = v.modes();
    Observables row;
    row.time = trajectory.times[s];
    row.log_negativity = m >= 2 ? log_negativity(w) : 0.0;
    row.purity = purity(w);
    for (int i = 0; i < m; ++i) {
      row.phonons.push_back(phonon_number(v, i, units, trajectory.omega[s][i]));
      row.var_x.push_back(units.position_variance_si(v.x_variance(i)));
      row.var_p.push_back(units.momentum_variance_si(v.p_variance(i)));
    }
    row.cov_x1x2 = m >= 2 ? units.position_variance_si(v.xx_covariance(0, 1)) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cvdyn
