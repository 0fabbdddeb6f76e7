#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvdyn {

using Matrix = Eigen::MatrixXd;

/// Second-moment matrix of an m-mode Gaussian state in (x_1..x_m, p_1..p_m)
/// ordering, in dimensionless units with hbar = 1 and vacuum variance 1/2.
///
/// Construction checks symmetry to 1e-12 relative and then symmetrizes, so
/// every instance is exactly symmetric. Physicality is not enforced by the
/// type; see is_physical().
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Matrix& entries);

  /// Symmetrizes without the tolerance check. For results of congruences and
  /// sums that are symmetric up to rounding.
  static CovarianceMatrix symmetrized(const Matrix& entries);

  int modes() const { return static_cast<int>(v_.rows() / 2); }
  const Matrix& matrix() const { return v_; }
  double operator()(int i, int j) const { return v_(i, j); }

  double x_variance(int mode) const { return v_(mode, mode); }
  double p_variance(int mode) const {
    const int m = modes();
    return v_(m + mode, m + mode);
  }
  double xx_covariance(int a, int b) const { return v_(a, b); }

 private:
  struct Trusted {};
  CovarianceMatrix(const Matrix& entries, Trusted);
  Matrix v_;
};

/// Omega = [[0, I_m], [-I_m, 0]].
Matrix symplectic_form(int m);

/// SI <-> internal conversion for one mode of mass `mass` referenced to the
/// trap frequency `omega_ref`. Internal coordinates are X = x / (sqrt(2) x0),
/// P = p / (sqrt(2) p0) and internal time is omega_ref * t.
struct ModeUnits {
  double mass;       // kg
  double omega_ref;  // rad/s

  ModeUnits(double mass, double omega_ref);

  double length_scale() const;    // x0 = sqrt(hbar / (2 m omega_ref))
  double momentum_scale() const;  // p0 = sqrt(hbar m omega_ref / 2)

  double to_internal_time(double seconds) const { return seconds * omega_ref; }
  double to_seconds(double internal_time) const { return internal_time / omega_ref; }
  double to_internal_position(double metres) const;
  double to_metres(double internal_position) const;
  double to_internal_momentum(double si) const;
  double to_si_momentum(double internal_momentum) const;
  /// Bilinear coupling lambda (N/m) as the dimensionless lambda / (m omega_ref^2).
  double to_internal_coupling(double newton_per_metre) const;
  double to_si_coupling(double internal) const;
  /// Position variance (m^2) of an internal X variance, and likewise for p.
  double position_variance_si(double internal) const;
  double momentum_variance_si(double internal) const;
};

CovarianceMatrix vacuum_state(int m);

/// (n + 1/2) I: thermal state of m modes that all sit at the reference frequency.
CovarianceMatrix thermal_state(int m, double nbar);

/// Thermal state of modes with frequencies omega_i = ratio_i * omega_ref,
/// expressed in the reference units: X variance (n + 1/2) / ratio_i and P
/// variance (n + 1/2) ratio_i.
CovarianceMatrix thermal_state(std::span<const double> frequency_ratios, double nbar);

/// The m symplectic eigenvalues (moduli of the eigenvalues of i Omega V with
/// the +/- pairs collapsed), ascending.
///
/// Each mode is first brought to a locally isotropic frame with a local
/// symplectic map, which leaves the spectrum unchanged and keeps strongly
/// squeezed inputs well conditioned for the complex eigensolver.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v);
/// Raw-matrix overload; rejects non-symmetric input.
std::vector<double> symplectic_eigenvalues(const Matrix& v);

/// P V P with P flipping the momentum signs of `modes`. The subset must be
/// non-empty and proper.
CovarianceMatrix partial_transpose(const CovarianceMatrix& v, std::span<const int> modes);

bool is_symplectic(const Matrix& s, double tolerance = 1e-9);

/// S V S^T. Rejects S that fails S Omega S^T = Omega within 1e-9.
CovarianceMatrix apply_symplectic(const Matrix& s, const CovarianceMatrix& v);

/// Smallest symplectic eigenvalue >= 1/2 - tolerance.
bool is_physical(const CovarianceMatrix& v, double tolerance = 1e-9);

/// Throws InvalidState unless is_physical(v, tolerance).
void require_physical(const CovarianceMatrix& v, const char* where, double tolerance = 1e-9);

/// Single-mode squeezer diag(e^-r, e^r) on `mode`, identity elsewhere.
Matrix squeezer(int m, int mode, double r);

/// Phase-space rotation by angle theta on `mode`: x -> x cos + p sin, p -> -x sin + p cos.
Matrix rotation(int m, int mode, double theta);

}  // namespace cvdyn
