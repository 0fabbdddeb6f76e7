#include <cmath>
#include <random>

#include "doctest.h"

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"
#include "cvdyn/gaussian_state.hpp"
#include "cvdyn/measures.hpp"
#include "cvdyn/oracles.hpp"
#include "cvdyn/physics_models.hpp"

using namespace cvdyn;

namespace {

CovarianceMatrix tms(double r) {
  const double c = std::cosh(2 * r) / 2, s = std::sinh(2 * r) / 2;
  Matrix v = c * Matrix::Identity(4, 4);
  v(0, 1) = v(1, 0) = s;
  v(2, 3) = v(3, 2) = -s;
  return CovarianceMatrix(v);
}

Matrix local_symplectic(std::mt19937_64& rng) {
  // one random single-mode symplectic per mode, embedded block-diagonally
  Matrix s = Matrix::Identity(4, 4);
  for (int mode = 0; mode < 2; ++mode) {
    const Matrix one = oracles::random_symplectic(1, 0.8, rng);
    s(mode, mode) = one(0, 0);
    s(mode, mode + 2) = one(0, 1);
    s(mode + 2, mode) = one(1, 0);
    s(mode + 2, mode + 2) = one(1, 1);
  }
  return s;
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("log negativity examples") {
  CHECK(log_negativity(vacuum_state(2)) == 0.0);
  for (double r : {0.1, 0.5, 1.0, 3.0}) {
    CHECK(log_negativity(tms(r)) == doctest::Approx(2 * r / std::log(2.0)).epsilon(1e-10));
  }
  auto parts = Bipartition::split(3, {0});
  CHECK(parts.modes_b.size() == 2);
  CHECK(log_negativity(thermal_state(3, 1.0), parts) == 0.0);
  CHECK_THROWS_AS(Bipartition::split(2, {}), InvalidArgument);
  CHECK_THROWS_AS(Bipartition::split(2, {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(Bipartition::split(2, {5}), InvalidArgument);
  CHECK_THROWS_AS(log_negativity(CovarianceMatrix(0.3 * Matrix::Identity(4, 4))), InvalidState);
}

TEST_CASE("log negativity is invariant under local symplectic maps") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    auto v = oracles::random_physical_state(2, rng, 0.7, 2.0);
    const double before = log_negativity(v);
    const double after = log_negativity(apply_symplectic(local_symplectic(rng), v));
    CHECK(after == doctest::Approx(before).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("purity") {
  CHECK(purity(vacuum_state(1)) == doctest::Approx(1.0));
  CHECK(purity(vacuum_state(3)) == doctest::Approx(1.0));
  for (double n : {0.0, 1.0, 100.0}) {
    CHECK(purity(thermal_state(1, n)) == doctest::Approx(1.0 / (2 * n + 1)).epsilon(1e-12));
  }
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix s = oracles::random_symplectic(2, 0.6, rng);
    CHECK(purity(apply_symplectic(s, vacuum_state(2))) == doctest::Approx(1.0).epsilon(1e-9));
    const double p = purity(oracles::random_physical_state(2, rng));
    CHECK(p > 0.0);
    CHECK(p <= 1.0 + 1e-9);
  }
}

TEST_CASE("phonon number") {
  ModeUnits u(1e-16, 2 * constants::pi * 100);
  CHECK(std::abs(phonon_number(vacuum_state(2), 0, u, u.omega_ref)) < 1e-15);
  CHECK(phonon_number(thermal_state(2, 100.0), 1, u, u.omega_ref) == doctest::Approx(100.0));
  const double r = 1.7;
  auto sq = apply_symplectic(squeezer(1, 0, r), vacuum_state(1));
  CHECK(phonon_number(sq, 0, u, u.omega_ref) == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-12));
  // thermal state of a mode at half the reference frequency, counted at that frequency
  std::vector<double> ratios{0.5};
  CHECK(phonon_number(thermal_state(ratios, 4.0), 0, u, 0.5 * u.omega_ref) == doctest::Approx(4.0));
  CHECK_THROWS_AS(phonon_number(sq, 1, u, u.omega_ref), InvalidArgument);
  CHECK_THROWS_AS(phonon_number(sq, 0, u, 0.0), InvalidArgument);
}

TEST_CASE("effective squeezing") {
  CHECK(effective_squeezing(vacuum_state(1), 0) == doctest::Approx(0.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = std::exp(-2.0) / 2;
  d(1, 1) = std::exp(2.0) / 2;
  CHECK(effective_squeezing(CovarianceMatrix(d), 0) == doctest::Approx(1.0));
}

TEST_CASE("interaction components") {
  ModeUnits u(7e-6, 2 * constants::pi * 2.2);
  auto zero = interaction_components(0.0, u);
  CHECK(zero.beam_splitter == 0.0);
  CHECK(zero.two_mode_squeezing == 0.0);

  const double lambda = bilinear_coupling(gravity(7e-6, 2e-3)).coupling;
  CHECK(lambda == doctest::Approx(2 * constants::gravitational * 49e-12 / 8e-9).epsilon(1e-12));
  auto g = interaction_components(lambda, u);
  const double x0 = u.length_scale();
  CHECK(g.beam_splitter == doctest::Approx(lambda * x0 * x0 / constants::hbar).epsilon(1e-12));
  CHECK(g.two_mode_squeezing == g.beam_splitter);

  // x0 = 1 m and lambda = hbar N/m, i.e. both unity when hbar = 1
  ModeUnits unit(constants::hbar / 2, 1.0);
  CHECK(unit.length_scale() == doctest::Approx(1.0));
  auto one = interaction_components(constants::hbar, unit);
  CHECK(one.beam_splitter == doctest::Approx(1.0));
  CHECK(one.two_mode_squeezing == doctest::Approx(1.0));
}

}  // TEST_SUITE
