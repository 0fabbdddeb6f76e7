#include <cmath>
#include <random>

#include "doctest.h"

#include "cvdyn/constants.hpp"
#include "cvdyn/dynamics.hpp"
#include "cvdyn/errors.hpp"
#include "cvdyn/measures.hpp"
#include "cvdyn/oracles.hpp"
#include "cvdyn/protocol.hpp"

using namespace cvdyn;

namespace {

constexpr double kPi = constants::pi;
constexpr double kMass = 1e-16;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double relative(const Matrix& a, const Matrix& b) { return max_abs(a - b) / max_abs(b); }

struct RandomSegment {
  HamiltonianParams params;
  BathParams bath;
  ModeUnits units;
  double duration;
  CovarianceMatrix v0;
};

RandomSegment draw_segment(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const double w1 = 2 * kPi * uniform(50.0, 200.0);
  ModeUnits units(kMass, w1);
  HamiltonianParams params{{w1, w1 * uniform(0.5, 2.0)}, kMass, units.to_si_coupling(uniform(-1e-2, 1e-2))};
  BathParams bath{w1 * std::pow(10.0, uniform(-8.0, -2.0)), uniform(0.0, 100.0), unit(rng) < 0.5};
  const double duration = uniform(0.1, 2.0) * 2 * kPi / w1;
  return {params, bath, units, duration, oracles::random_physical_state(2, rng)};
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("drift matrix") {
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  HamiltonianParams free{{w, w}, kMass, 0.0};
  Matrix expected = Matrix::Zero(4, 4);
  expected.topRightCorner(2, 2).setIdentity();
  expected.bottomLeftCorner(2, 2) = -Matrix::Identity(2, 2);
  CHECK(drift_matrix(free, units).matrix == expected);

  // SI form laid out as the 4x4 generator: 1/m above, -m w^2 and -lambda below
  HamiltonianParams coupled{{w, 1.3 * w}, kMass, -2e-12};
  const Matrix k = drift_matrix_si(coupled);
  CHECK(k(0, 2) == doctest::Approx(1 / kMass));
  CHECK(k(1, 3) == doctest::Approx(1 / kMass));
  CHECK(k(2, 0) == doctest::Approx(-kMass * w * w));
  CHECK(k(3, 1) == doctest::Approx(-kMass * 1.69 * w * w));
  CHECK(k(2, 1) == 2e-12);
  CHECK(k(3, 0) == 2e-12);
  CHECK(k(0, 0) == 0.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = draw_segment(rng);
    const Matrix ok = symplectic_form(2) * drift_matrix(s.params, s.units).matrix;
    CHECK(max_abs(ok - ok.transpose()) == 0.0);
  }

  CHECK_THROWS_AS(drift_matrix(HamiltonianParams{{}, kMass, 0.0}, units), InvalidArgument);
  CHECK_THROWS_AS(drift_matrix(HamiltonianParams{{w}, kMass, 1.0}, units), InvalidArgument);
  CHECK_THROWS_AS(drift_matrix(HamiltonianParams{{-w, w}, kMass, 0.0}, units), InvalidArgument);
  CHECK_THROWS_AS(drift_matrix(HamiltonianParams{{w, w}, 0.0, 0.0}, units), InvalidArgument);
}

TEST_CASE("matrix exponential") {
  CHECK(matrix_exponential(Matrix::Zero(4, 4), 1.0) == Matrix::Identity(4, 4));
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  HamiltonianParams one{{w}, kMass, 0.0};
  // quarter period: X -> P, P -> -X in internal units
  const Matrix f = matrix_exponential(drift_matrix(one, units).matrix, units.to_internal_time(quarter_period(w)));
  CHECK(std::abs(f(0, 0)) < 1e-14);
  CHECK(f(0, 1) == doctest::Approx(1.0));
  CHECK(f(1, 0) == doctest::Approx(-1.0));

  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(4, 4);
    for (int i = 0; i < 16; ++i) a(i) = normal(rng);
    const double t = 0.05 + 1.5 * (trial / 50.0);
    CHECK(relative(matrix_exponential(a, t), oracles::series_exponential(a, t)) < 1e-10);
  }
  CHECK_THROWS_AS(matrix_exponential(Matrix::Zero(2, 3), 1.0), InvalidArgument);
  Matrix big = Matrix::Identity(2, 2) * 1e3;
  CHECK_THROWS_AS(matrix_exponential(big, 1.0), NumericError);
}

TEST_CASE("transfer matrix is symplectic and matches the exponential") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = draw_segment(rng);
    const Matrix f = transfer_matrix(s.params, s.units, s.duration);
    CHECK(is_symplectic(f, 1e-12));
    const Matrix e = matrix_exponential(drift_matrix(s.params, s.units).matrix, s.units.to_internal_time(s.duration));
    CHECK(relative(f, e) < 1e-10);
  }
  // unstable potential falls back to the exponential
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  HamiltonianParams unstable{{w, w}, kMass, units.to_si_coupling(2.0)};
  const Matrix f = transfer_matrix(unstable, units, 1e-3);
  CHECK(is_symplectic(f, 1e-9));
}

TEST_CASE("evolve_segment examples") {
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  std::mt19937_64 rng(31);
  const auto v0 = oracles::random_physical_state(2, rng);
  const Segment period{{{w, w}, kMass, 0.0}, 2 * kPi / w};
  CHECK(max_abs(evolve_segment(v0, period, {}, units).matrix() - v0.matrix()) < 1e-12);

  // a slow trap approximates K = 0: scalar relaxation towards V_inf
  const double slow = 1e-9 * w;
  ModeUnits slow_units(kMass, slow);
  HamiltonianParams frozen{{slow, slow}, kMass, 0.0};
  BathParams bath{5.0, 3.0, true};
  const double t = 0.2;
  const Matrix got = evolve_segment(v0, {frozen, t}, bath, slow_units).matrix();
  const Matrix v_inf = equilibrium_state(bath, frozen, slow_units).matrix();
  const Matrix want = std::exp(-bath.gamma * t) * v0.matrix() + (1 - std::exp(-bath.gamma * t)) * v_inf;
  CHECK(relative(got, want) < 1e-6);

  // vacuum held one period with Q = 1e8 and nbar = 100, against RK4
  BathParams weak{w / 1e8, 100.0};
  const Segment hold{{{w, w}, kMass, 0.0}, 2 * kPi / w};
  const Matrix closed = evolve_segment(vacuum_state(2), hold, weak, units).matrix();
  const Matrix rk4 = oracles::rk4_evolve(vacuum_state(2), hold.params, weak, units, hold.duration, {hold.duration / 2000}).matrix();
  CHECK(relative(closed, rk4) < 1e-8);

  CHECK_THROWS_AS(evolve_segment(v0, {period.params, -1.0}, {}, units), InvalidArgument);
  CHECK_THROWS_AS(evolve_segment(CovarianceMatrix(0.3 * Matrix::Identity(4, 4)), period, {}, units), InvalidState);
  CHECK_THROWS_AS(evolve_segment(v0, period, BathParams{-1.0, 0.0}, units), InvalidArgument);
}

TEST_CASE("evolve_schedule sampling") {
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  const Segment one{{{w, 0.7 * w}, kMass, units.to_si_coupling(1e-3)}, 0.0123};
  BathParams bath{w / 1e6, 10.0};
  const auto traj = evolve_schedule(vacuum_state(2), {one}, bath, units, 1e-3);
  const auto direct = evolve_segment(vacuum_state(2), one, bath, units);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(0.0123));
  CHECK(traj.times.size() == 14);  // t = 0, 12 interior samples, the boundary
  CHECK(traj.states.back().matrix() == direct.matrix());
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);

  // frame states carry the same invariants
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(log_negativity(traj.frame_states[i]) ==
          doctest::Approx(log_negativity(traj.states[i])).epsilon(1e-8).scale(1e-12));
    CHECK(purity(traj.frame_states[i]) == doctest::Approx(purity(traj.states[i])).epsilon(1e-9));
  }
  CHECK_THROWS_AS(evolve_schedule(vacuum_state(2), {}, bath, units, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(evolve_schedule(vacuum_state(2), {one}, bath, units, 0.0), InvalidArgument);
}

TEST_CASE("entanglement oscillates at the beat frequency without a protocol") {
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  const double ell = 1e-2;
  const Segment seg{{{w, w}, kMass, units.to_si_coupling(ell)}, 2 * kPi / (ell * w)};
  const auto rows = observe(evolve_schedule(vacuum_state(2), {seg}, {}, units, seg.duration / 400), units);
  // vanishes again after one beat period (normal modes sqrt(1 +/- ell) dephase by 2 pi)
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, r.log_negativity);
  CHECK(peak > 0.5 * ell / std::log(2.0));
  CHECK(rows.back().log_negativity < 0.05 * peak);
}

TEST_CASE("full protocol restores the initial state without coupling") {
  for (double ratio : {0.3, 0.5, 0.9, 1.4}) {
    ProtocolSpec spec{2 * kPi * 100, ratio * 2 * kPi * 100, 10, true};
    ModeUnits units(kMass, spec.omega1);
    const auto v0 = thermal_state(2, 0.5);
    const auto traj = evolve_schedule(v0, build_full(spec, 0.0, kMass), {}, units, 1e-3);
    CHECK(max_abs(traj.states.back().matrix() - v0.matrix()) < 1e-8);
    for (const auto& w : traj.frame_states) CHECK(is_physical(w));
  }
}

}  // TEST_SUITE

TEST_SUITE("oracles") {

TEST_CASE("rk4 agrees with the closed form on random segments") {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto s = draw_segment(rng);
    const Matrix closed = evolve_segment(s.v0, {s.params, s.duration}, s.bath, s.units).matrix();
    const double fastest = std::max(s.params.omega[0], s.params.omega[1]) * 1.01;
    const Matrix rk4 = oracles::rk4_evolve(s.v0, s.params, s.bath, s.units, s.duration, {2 * kPi / fastest / 800}).matrix();
    worst = std::max(worst, relative(rk4, closed));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("rk4 convergence order") {
  std::mt19937_64 rng(7);
  auto s = draw_segment(rng);
  const Matrix exact = evolve_segment(s.v0, {s.params, s.duration}, s.bath, s.units).matrix();
  const double fastest = std::max(s.params.omega[0], s.params.omega[1]) * 1.01;
  const double base = 2 * kPi / fastest / 200;
  const double e1 = max_abs(oracles::rk4_evolve(s.v0, s.params, s.bath, s.units, s.duration, {base}).matrix() - exact);
  const double e2 = max_abs(oracles::rk4_evolve(s.v0, s.params, s.bath, s.units, s.duration, {base / 2}).matrix() - exact);
  CHECK(std::log2(e1 / e2) >= 3.7);
}

TEST_CASE("rk4 simple limits and guards") {
  const double w = 2 * kPi * 100;
  ModeUnits units(kMass, w);
  std::mt19937_64 rng(9);
  const auto v0 = oracles::random_physical_state(2, rng);
  HamiltonianParams params{{w, w}, kMass, 0.0};
  const auto back = oracles::rk4_evolve(v0, params, {}, units, 2 * kPi / w, {2 * kPi / w / 1000});
  CHECK(relative(back.matrix(), v0.matrix()) < 1e-7);
  CHECK_THROWS_AS(oracles::rk4_evolve(v0, params, {}, units, 1.0, {2 * kPi / w / 10}), InvalidArgument);
  CHECK_THROWS_AS(oracles::rk4_evolve(v0, params, {}, units, 1.0, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(oracles::rk4_evolve(vacuum_state(1), params, {}, units, 1.0, {1e-5}), InvalidArgument);
}

TEST_CASE("variance map") {
  const double w1 = 2 * kPi * 100;
  auto same = oracles::variance_map_cycle(0.7, 1.3, w1, w1);
  CHECK(same.first == doctest::Approx(0.7));
  CHECK(same.second == doctest::Approx(1.3));
  auto half = oracles::variance_map_cycle(1.0, 1.0, w1, 0.5 * w1);
  CHECK(half.first == doctest::Approx(0.25));
  CHECK(half.second == doctest::Approx(4.0));
  double x = 1.0, p = 1.0;
  for (int k = 0; k < 10; ++k) std::tie(x, p) = oracles::variance_map_cycle(x, p, w1, 0.5 * w1);
  ProtocolSpec spec{w1, 0.5 * w1, 10};
  CHECK(x == doctest::Approx(std::exp(-2 * predicted_squeezing(spec))).epsilon(1e-12));
  CHECK(p == doctest::Approx(std::exp(2 * predicted_squeezing(spec))).epsilon(1e-12));
  CHECK_THROWS_AS(oracles::variance_map_cycle(-1.0, 1.0, w1, w1), InvalidArgument);
}

TEST_CASE("random state generators") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    CHECK(is_symplectic(oracles::random_symplectic(3, 0.5, rng)));
    CHECK(is_physical(oracles::random_physical_state(3, rng)));
  }
  Matrix a = Matrix::Identity(3, 3);
  CHECK(relative(oracles::series_exponential(a, 2.0), std::exp(2.0) * a) < 1e-13);
}

}  // TEST_SUITE
