#include "cvdyn/oracles.hpp"

#include <cmath>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"

namespace cvdyn::oracles {

void Rk4Config::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("Rk4Config: dt must be positive");
  if (!(tolerance > 0.0)) throw InvalidArgument("Rk4Config: tolerance must be positive");
}

CovarianceMatrix rk4_evolve(const CovarianceMatrix& initial, const HamiltonianParams& params,
                            const BathParams& bath, const ModeUnits& units, double duration,
                            const Rk4Config& cfg) {
  cfg.validate();
  params.validate();
  bath.validate();
  if (!(duration >= 0.0)) throw InvalidArgument("rk4_evolve: duration must be >= 0");
  const int m = params.modes();
  if (initial.modes() != m) throw InvalidArgument("rk4_evolve: mode count mismatch");

  // Generator in SI-free reference units, written out from the equations of motion
  // dX/dt = P, dP_i/dt = -w_i^2 X_i - l X_j.
  const double w0 = units.omega_ref;
  const double l = m >= 2 ? params.coupling / (params.mass * w0 * w0) : 0.0;
  Matrix k = Matrix::Zero(2 * m, 2 * m);
  Matrix v_inf = Matrix::Zero(2 * m, 2 * m);
  double fastest = 0.0;
  for (int i = 0; i < m; ++i) {
    const double w = params.omega[i] / w0;
    k(i, m + i) = 1.0;
    k(m + i, i) = -w * w;
    const double thermal_w = bath.rethermalize ? w : 1.0;
    v_inf(i, i) = (bath.nbar + 0.5) / thermal_w;
    v_inf(m + i, m + i) = (bath.nbar + 0.5) * thermal_w;
    fastest = std::max(fastest, std::sqrt(w * w + std::abs(l)));
  }
  if (m >= 2) {
    k(m, 1) = -l;
    k(m + 1, 0) = -l;
  }
  const double period = 2.0 * constants::pi / (fastest * w0);
  if (cfg.dt > period / 200.0) {
    throw InvalidArgument("rk4_evolve: step exceeds 1/200 of the oscillation period");
  }

  const double gamma = bath.gamma / w0;
  const double total = duration * w0;
  const long steps = std::max(1L, static_cast<long>(std::ceil(duration / cfg.dt - 1e-9)));
  const double h = total / static_cast<double>(steps);
  auto rhs = [&](const Matrix& v) -> Matrix {
    return k * v + v * k.transpose() - gamma * v + gamma * v_inf;
  };
  Matrix v = initial.matrix();
  if (duration > 0.0) {
    for (long s = 0; s < steps; ++s) {
      const Matrix k1 = rhs(v);
      const Matrix k2 = rhs(v + 0.5 * h * k1);
      const Matrix k3 = rhs(v + 0.5 * h * k2);
      const Matrix k4 = rhs(v + h * k3);
      v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return CovarianceMatrix::symmetrized(v);
}

Matrix series_exponential(const Matrix& a, double t) {
  if (a.rows() != a.cols()) throw InvalidArgument("series_exponential: matrix must be square");
  const Matrix scaled = a * t;
  const double norm = scaled.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = scaled / std::ldexp(1.0, squarings);
  const long n = x.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
  return sum;
}

Matrix random_symplectic(int m, double scale, std::mt19937_64& rng) {
  if (m < 1) throw InvalidArgument("random_symplectic: mode count must be >= 1");
  std::normal_distribution<double> normal(0.0, scale);
  Matrix h(2 * m, 2 * m);
  for (int i = 0; i < 2 * m; ++i) {
    for (int j = 0; j <= i; ++j) {
      h(i, j) = normal(rng);
      h(j, i) = h(i, j);
    }
  }
  return series_exponential(symplectic_form(m) * h, 1.0);
}

CovarianceMatrix random_physical_state(int m, std::mt19937_64& rng, double squeeze_scale, double max_nbar) {
  std::uniform_real_distribution<double> occupation(0.0, max_nbar);
  Matrix v = Matrix::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    const double nu = 0.5 + occupation(rng);
    v(k, k) = nu;
    v(m + k, m + k) = nu;
  }
  const Matrix s = random_symplectic(m, squeeze_scale, rng);
  return CovarianceMatrix::symmetrized(s * v * s.transpose());
}

std::pair<double, double> variance_map_cycle(double x, double p, double omega1, double omega2) {
  if (!(x > 0.0) || !(p > 0.0)) throw InvalidArgument("variance_map_cycle: variances must be positive");
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw InvalidArgument("variance_map_cycle: frequencies must be positive");
  // Quarter period at omega2 maps (X, P) -> (P / w^2, w^2 X), w = omega2 / omega1;
  // the quarter period at omega1 then swaps the two.
  const double w2 = (omega2 / omega1) * (omega2 / omega1);
  const double after_slow_x = p / w2;
  const double after_slow_p = w2 * x;
  return {after_slow_p, after_slow_x};
}

}  // namespace cvdyn::oracles
