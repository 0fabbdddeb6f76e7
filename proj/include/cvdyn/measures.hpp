#pragma once

#include <vector>

#include "cvdyn/gaussian_state.hpp"

namespace cvdyn {

struct Bipartition {
  std::vector<int> modes_a;
  std::vector<int> modes_b;

  /// {modes_a | complement}; validates non-empty, disjoint, covering.
  static Bipartition split(int m, std::vector<int> modes_a);
};

/// Logarithmic negativity in ebits: -sum_k log2 min(1, 2 nu_k) over the m
/// symplectic eigenvalues of the partial transpose with respect to modes_b.
double log_negativity(const CovarianceMatrix& v, const Bipartition& parts);
/// Two-mode shorthand for the {0} | {1} cut.
double log_negativity(const CovarianceMatrix& v);

/// 1 / (2^m sqrt(det V)); 1 for pure states.
double purity(const CovarianceMatrix& v);

/// Mean excitation number of `mode` with respect to a trap of frequency
/// `omega` (rad/s), assuming zero first moments.
double phonon_number(const CovarianceMatrix& v, int mode, const ModeUnits& units, double omega);

/// r_eff = -ln(2 <x^2>) / 2 of the mode's marginal; positive when
/// position-squeezed.
double effective_squeezing(const CovarianceMatrix& v, int mode);

/// Ladder-operator coefficients (rad/s) of the beam-splitter and
/// two-mode-squeezing halves of lambda x1 x2.
struct InteractionComponents {
  double beam_splitter;
  double two_mode_squeezing;
};
InteractionComponents interaction_components(double coupling, const ModeUnits& units);

}  // namespace cvdyn
