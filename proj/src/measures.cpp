#include "cvdyn/measures.hpp"

#include <algorithm>
#include <cmath>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"

namespace cvdyn {

Bipartition Bipartition::split(int m, std::vector<int> modes_a) {
  if (m < 2) throw InvalidArgument("Bipartition: need at least two modes");
  std::vector<bool> in_a(m, false);
  for (int mode : modes_a) {
    if (mode < 0 || mode >= m) throw InvalidArgument("Bipartition: mode index out of range");
    if (in_a[mode]) throw InvalidArgument("Bipartition: repeated mode index");
    in_a[mode] = true;
  }
  Bipartition parts;
  for (int mode = 0; mode < m; ++mode) (in_a[mode] ? parts.modes_a : parts.modes_b).push_back(mode);
  if (parts.modes_a.empty() || parts.modes_b.empty()) {
    throw InvalidArgument("Bipartition: both sides must be non-empty");
  }
  return parts;
}

double log_negativity(const CovarianceMatrix& v, const Bipartition& parts) {
  const int m = v.modes();
  if (static_cast<int>(parts.modes_a.size() + parts.modes_b.size()) != m) {
    throw InvalidArgument("log_negativity: bipartition does not cover the state");
  }
  require_physical(v, "log_negativity");
  const auto nu = symplectic_eigenvalues(partial_transpose(v, parts.modes_b));
  double total = 0.0;
  for (double value : nu) total -= std::log2(std::min(1.0, 2.0 * std::abs(value)));
  return total;
}

double log_negativity(const CovarianceMatrix& v) { return log_negativity(v, Bipartition::split(v.modes(), {0})); }

double purity(const CovarianceMatrix& v) {
  // Product of symplectic eigenvalues equals sqrt(det V); this avoids the
  // cancellation a direct determinant suffers for strongly squeezed states.
  if (!(v.matrix().determinant() > 0.0)) throw InvalidState("purity: determinant is not positive");
  const auto nu = symplectic_eigenvalues(v);
  double p = 1.0;
  for (double value : nu) {
    if (!(value > 0.0)) throw InvalidState("purity: determinant is not positive");
    p /= 2.0 * value;
  }
  return p;
}

double phonon_number(const CovarianceMatrix& v, int mode, const ModeUnits& units, double omega) {
  if (mode < 0 || mode >= v.modes()) throw InvalidArgument("phonon_number: mode index out of range");
  if (!(omega > 0.0)) throw InvalidArgument("phonon_number: frequency must be positive");
  // In reference units <x^2>/x0(omega)^2 = 2 w X and <p^2>/p0(omega)^2 = 2 P / w.
  const double w = omega / units.omega_ref;
  return 0.5 * (w * v.x_variance(mode) + v.p_variance(mode) / w) - 0.5;
}

double effective_squeezing(const CovarianceMatrix& v, int mode) {
  if (mode < 0 || mode >= v.modes()) throw InvalidArgument("effective_squeezing: mode index out of range");
  return -0.5 * std::log(2.0 * v.x_variance(mode));
}

InteractionComponents interaction_components(double coupling, const ModeUnits& units) {
  const double x0 = units.length_scale();
  const double g = coupling * x0 * x0 / constants::hbar;
  return {g, g};
}

}  // namespace cvdyn
