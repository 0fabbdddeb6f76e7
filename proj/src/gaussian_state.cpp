#include "cvdyn/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"

namespace cvdyn {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPairingTolerance = 1e-8;

void check_shape(const Matrix& v) {
  if (v.rows() != v.cols() || v.rows() == 0 || v.rows() % 2 != 0) {
    throw InvalidArgument("covariance matrix must be square with even dimension, got " +
                          std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
  }
  if (!v.allFinite()) {
    throw InvalidArgument("covariance matrix has non-finite entries");
  }
}

bool is_symmetric(const Matrix& v) {
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  return (v - v.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance * scale;
}

// S with S B S^T = sqrt(det B) I for a 2x2 symmetric positive-definite B.
// Returns false when B is not positive definite.
bool local_whitener(double a, double c, double b, Eigen::Matrix2d& s) {
  const double det = a * b - c * c;
  if (!(a > 0.0) || !(b > 0.0) || !(det > 0.0)) return false;
  const double root_det = std::sqrt(det);
  const double t = std::sqrt(a + b + 2.0 * root_det);
  // sqrt(B) = (B + root_det I) / t, so B^{-1/2} = t (B + root_det I)^{-1}.
  Eigen::Matrix2d shifted;
  shifted << a + root_det, c, c, b + root_det;
  const double shifted_det = shifted.determinant();
  Eigen::Matrix2d inverse;
  inverse << shifted(1, 1), -c, -c, shifted(0, 0);
  s = std::sqrt(root_det) * t / shifted_det * inverse;
  return true;
}

std::vector<double> spectrum(const Matrix& v) {
  const int m = static_cast<int>(v.rows() / 2);
  Matrix whitener = Matrix::Identity(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    Eigen::Matrix2d s;
    if (local_whitener(v(i, i), v(i, m + i), v(m + i, m + i), s)) {
      whitener(i, i) = s(0, 0);
      whitener(i, m + i) = s(0, 1);
      whitener(m + i, i) = s(1, 0);
      whitener(m + i, m + i) = s(1, 1);
    }
  }
  const Matrix balanced = whitener * v * whitener.transpose();
  const Eigen::MatrixXcd a =
      std::complex<double>(0.0, 1.0) * (symplectic_form(m) * balanced).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symplectic_eigenvalues: eigensolver did not converge");
  }
  std::vector<double> moduli(2 * m);
  for (int k = 0; k < 2 * m; ++k) moduli[k] = std::abs(solver.eigenvalues()(k));
  std::sort(moduli.begin(), moduli.end());

  std::vector<double> nu(m);
  for (int k = 0; k < m; ++k) {
    const double lo = moduli[2 * k];
    const double hi = moduli[2 * k + 1];
    if (hi - lo > kPairingTolerance * std::max(1.0, hi)) {
      throw NumericError("symplectic_eigenvalues: unpaired spectrum (" + std::to_string(lo) +
                         " vs " + std::to_string(hi) + ")");
    }
    nu[k] = 0.5 * (lo + hi);
  }
  return nu;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(const Matrix& entries) : v_(entries) {
  check_shape(v_);
  if (!is_symmetric(v_)) {
    throw InvalidArgument("covariance matrix is not symmetric");
  }
  v_ = 0.5 * (v_ + v_.transpose()).eval();
}

CovarianceMatrix::CovarianceMatrix(const Matrix& entries, Trusted) : v_(entries) {
  check_shape(v_);
  v_ = 0.5 * (v_ + v_.transpose()).eval();
}

CovarianceMatrix CovarianceMatrix::symmetrized(const Matrix& entries) {
  return CovarianceMatrix(entries, Trusted{});
}

Matrix symplectic_form(int m) {
  Matrix omega = Matrix::Zero(2 * m, 2 * m);
  omega.topRightCorner(m, m).setIdentity();
  omega.bottomLeftCorner(m, m) = -Matrix::Identity(m, m);
  return omega;
}

ModeUnits::ModeUnits(double mass_kg, double omega_ref_rad_s) : mass(mass_kg), omega_ref(omega_ref_rad_s) {
  if (!(mass > 0.0) || !(omega_ref > 0.0)) {
    throw InvalidArgument("ModeUnits: mass and reference frequency must be positive");
  }
}

double ModeUnits::length_scale() const { return std::sqrt(constants::hbar / (2.0 * mass * omega_ref)); }
double ModeUnits::momentum_scale() const { return std::sqrt(constants::hbar * mass * omega_ref / 2.0); }

double ModeUnits::to_internal_position(double metres) const {
  return metres / (std::numbers::sqrt2 * length_scale());
}
double ModeUnits::to_metres(double internal_position) const {
  return internal_position * std::numbers::sqrt2 * length_scale();
}
double ModeUnits::to_internal_momentum(double si) const {
  return si / (std::numbers::sqrt2 * momentum_scale());
}
double ModeUnits::to_si_momentum(double internal_momentum) const {
  return internal_momentum * std::numbers::sqrt2 * momentum_scale();
}
double ModeUnits::to_internal_coupling(double newton_per_metre) const {
  return newton_per_metre / (mass * omega_ref * omega_ref);
}
double ModeUnits::to_si_coupling(double internal) const { return internal * mass * omega_ref * omega_ref; }
double ModeUnits::position_variance_si(double internal) const {
  const double x0 = length_scale();
  return 2.0 * x0 * x0 * internal;
}
double ModeUnits::momentum_variance_si(double internal) const {
  const double p0 = momentum_scale();
  return 2.0 * p0 * p0 * internal;
}

CovarianceMatrix vacuum_state(int m) {
  if (m < 1) throw InvalidArgument("vacuum_state: mode count must be >= 1");
  return CovarianceMatrix::symmetrized(0.5 * Matrix::Identity(2 * m, 2 * m));
}

CovarianceMatrix thermal_state(int m, double nbar) {
  if (m < 1) throw InvalidArgument("thermal_state: mode count must be >= 1");
  if (!(nbar >= 0.0)) throw InvalidArgument("thermal_state: occupation must be non-negative");
  return CovarianceMatrix::symmetrized((nbar + 0.5) * Matrix::Identity(2 * m, 2 * m));
}

CovarianceMatrix thermal_state(std::span<const double> frequency_ratios, double nbar) {
  const int m = static_cast<int>(frequency_ratios.size());
  if (m < 1) throw InvalidArgument("thermal_state: mode count must be >= 1");
  if (!(nbar >= 0.0)) throw InvalidArgument("thermal_state: occupation must be non-negative");
  Matrix v = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    const double w = frequency_ratios[i];
    if (!(w > 0.0)) throw InvalidArgument("thermal_state: frequencies must be positive");
    v(i, i) = (nbar + 0.5) / w;
    v(m + i, m + i) = (nbar + 0.5) * w;
  }
  return CovarianceMatrix::symmetrized(v);
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v) { return spectrum(v.matrix()); }

std::vector<double> symplectic_eigenvalues(const Matrix& v) {
  check_shape(v);
  if (!is_symmetric(v)) throw InvalidArgument("symplectic_eigenvalues: input is not symmetric");
  return spectrum(0.5 * (v + v.transpose()));
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& v, std::span<const int> modes) {
  const int m = v.modes();
  if (modes.empty() || static_cast<int>(modes.size()) >= m) {
    throw InvalidArgument("partial_transpose: subset must be non-empty and proper");
  }
  std::vector<bool> flipped(m, false);
  for (int mode : modes) {
    if (mode < 0 || mode >= m) throw InvalidArgument("partial_transpose: mode index out of range");
    if (flipped[mode]) throw InvalidArgument("partial_transpose: repeated mode index");
    flipped[mode] = true;
  }
  Matrix out = v.matrix();
  for (int mode = 0; mode < m; ++mode) {
    if (!flipped[mode]) continue;
    out.row(m + mode) *= -1.0;
    out.col(m + mode) *= -1.0;
  }
  return CovarianceMatrix::symmetrized(out);
}

bool is_symplectic(const Matrix& s, double tolerance) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() == 0) return false;
  const int m = static_cast<int>(s.rows() / 2);
  const Matrix omega = symplectic_form(m);
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff() <= tolerance * scale * scale;
}

CovarianceMatrix apply_symplectic(const Matrix& s, const CovarianceMatrix& v) {
  if (s.rows() != v.matrix().rows() || s.cols() != v.matrix().cols()) {
    throw InvalidArgument("apply_symplectic: dimension mismatch");
  }
  if (!is_symplectic(s)) throw InvalidArgument("apply_symplectic: matrix is not symplectic");
  return CovarianceMatrix::symmetrized(s * v.matrix() * s.transpose());
}

bool is_physical(const CovarianceMatrix& v, double tolerance) {
  const auto nu = symplectic_eigenvalues(v);
  return nu.front() >= 0.5 - tolerance;
}

void require_physical(const CovarianceMatrix& v, const char* where, double tolerance) {
  const auto nu = symplectic_eigenvalues(v);
  if (nu.front() < 0.5 - tolerance) {
    throw InvalidState(std::string(where) + ": unphysical state (smallest symplectic eigenvalue " +
                       std::to_string(nu.front()) + ")");
  }
}

Matrix squeezer(int m, int mode, double r) {
  Matrix s = Matrix::Identity(2 * m, 2 * m);
  s(mode, mode) = std::exp(-r);
  s(m + mode, m + mode) = std::exp(r);
  return s;
}

Matrix rotation(int m, int mode, double theta) {
  Matrix s = Matrix::Identity(2 * m, 2 * m);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  s(mode, mode) = c;
  s(mode, m + mode) = sn;
  s(m + mode, mode) = -sn;
  s(m + mode, m + mode) = c;
  return s;
}

}  // namespace cvdyn
