// Acceptance criteria 1-9. One PASS/FAIL line per criterion, followed by the
// numbers behind it. Tolerances are fixed here.
//
// Criteria listed in kKnownFailures are reported as FAIL like any other but do
// not change the exit code; the README explains each of them. Any other
// failure makes the binary exit with 1.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cvdyn/commands.hpp"
#include "cvdyn/constants.hpp"
#include "cvdyn/measures.hpp"
#include "cvdyn/oracles.hpp"
#include "cvdyn/physics_models.hpp"
#include "cvdyn/protocol.hpp"
#include "cvdyn/robustness.hpp"
#include "cvdyn/scenario.hpp"

using namespace cvdyn;

namespace {

constexpr double kPi = constants::pi;

const std::set<int> kKnownFailures = {4, 6, 7};

struct Outcome {
  bool passed = true;
  std::vector<std::string> details;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  details.push_back(std::string(ok ? "ok    " : "MISS  ") + buf);
  passed = passed && ok;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// 1. Free evolution from the vacuum: the largest E_N over one beat period.
Outcome criterion_1() {
  Outcome out;
  const double w = 2 * kPi * 100;
  const double mass = sphere_mass(250e-9, 3500.0);
  const ModeUnits units(mass, w);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> exponent(-8.0, -3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double ell = std::pow(10.0, exponent(rng));
    const double sign = trial % 2 ? 1.0 : -1.0;
    HamiltonianParams params{{w, w}, mass, units.to_si_coupling(sign * ell)};
    auto en_at = [&](double t_internal) {
      const Matrix f = transfer_matrix(params, units, units.to_seconds(t_internal));
      return log_negativity(CovarianceMatrix::symmetrized(0.5 * f * f.transpose()));
    };
    // The fast oscillation at 2 omega rides on an envelope that varies over
    // the beat period; scan the envelope coarsely, maximize each fast window.
    const double beat = 2 * kPi / (std::sqrt(1 + ell) - std::sqrt(1 - ell));
    auto window_max = [&](double t0) {
      double best = 0.0, best_t = t0;
      constexpr int kFast = 48;
      for (int k = 0; k <= kFast; ++k) {
        const double t = t0 + kPi * k / kFast;
        const double e = en_at(t);
        if (e > best) best = e, best_t = t;
      }
      double lo = std::max(0.0, best_t - kPi / kFast), hi = best_t + kPi / kFast;
      for (int it = 0; it < 40; ++it) {
        const double a = lo + (hi - lo) * 0.382, b = lo + (hi - lo) * 0.618;
        if (en_at(a) > en_at(b)) hi = b; else lo = a;
      }
      return std::max(best, en_at(0.5 * (lo + hi)));
    };
    constexpr int kSlow = 400;
    double best = 0.0;
    int best_j = 0;
    for (int j = 0; j < kSlow; ++j) {
      const double e = window_max(beat * j / kSlow);
      if (e > best) best = e, best_j = j;
    }
    for (int j = -8; j <= 8; ++j) {
      if (best_j * 8 + j >= 0) best = std::max(best, window_max(beat * (best_j + j / 8.0) / kSlow));
    }
    const double predicted = ell / std::log(2.0);
    worst = std::max(worst, std::abs(best / predicted - 1));
  }
  out.check(worst <= 0.05, "20 couplings in [1e-8, 1e-3]: worst |max E_N / (l / ln 2) - 1| = %.3e (tolerance 0.05)", worst);
  return out;
}

// 2. Squeezing from N forward cycles.
Outcome criterion_2() {
  Outcome out;
  const double w1 = 2 * kPi * 100, mass = 1e-16;
  double worst_ratio = 0.0, worst_r = 0.0;
  for (int step = 0; step <= 12; ++step) {
    const double ratio = 0.3 + 0.05 * step;
    for (int n = 1; n <= 12; ++n) {
      ProtocolSpec spec{w1, ratio * w1, n};
      const auto v = propagate(vacuum_state(2), build_forward(spec, 0.0, mass), {}, ModeUnits(mass, w1));
      worst_ratio = std::max(worst_ratio, std::abs(2 * v.x_variance(0) / std::pow(ratio, 2 * n) - 1));
      worst_r = std::max(worst_r, std::abs(effective_squeezing(v, 0) / predicted_squeezing(spec) - 1));
    }
  }
  out.check(worst_ratio <= 1e-8, "x-variance ratio vs (w2/w1)^(2N), N <= 12, ratio 0.3..0.9: worst relative error %.3e (tolerance 1e-8)", worst_ratio);
  out.check(worst_r <= 1e-8, "r_eff vs N ln(w1/w2): worst relative error %.3e (tolerance 1e-8)", worst_r);
  return out;
}

// 3. Forward then reverse with no coupling and no bath.
Outcome criterion_3() {
  Outcome out;
  const double w1 = 2 * kPi * 100, mass = 1e-16;
  double worst = 0.0;
  for (double ratio : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.25, 1.7}) {
    for (int n = 1; n <= 12; ++n) {
      for (double nbar : {0.0, 2.0}) {
        ProtocolSpec spec{w1, ratio * w1, n, true};
        const auto v0 = thermal_state(2, nbar);
        const auto v = propagate(v0, build_full(spec, 0.0, mass), {}, ModeUnits(mass, w1));
        worst = std::max(worst, max_abs(v.matrix() - v0.matrix()));
      }
    }
  }
  out.check(worst <= 1e-8, "max entry |V_final - V_0| over 216 protocols: %.3e (tolerance 1e-8)", worst);
  return out;
}

// Sample closing segment `index` in a trajectory.
std::size_t end_of_segment(const Trajectory& t, int index) {
  std::size_t at = 0;
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    if (t.segment[i] == index) at = i;
  }
  return at;
}

// 4. Casimir scenario: retention without a bath, phonons and decay with one.
Outcome criterion_4() {
  Outcome out;
  const Scenario preset = load_scenario_file("casimir-diamonds");
  const ModeUnits units = preset.units();
  {
    Scenario s = preset;
    s.bath.gamma = 0.0;
    const JumpSchedule sched = s.schedule();
    const auto traj = evolve_schedule(s.initial_state(), sched, s.bath, units, s.sample_dt);
    const int forward = static_cast<int>(forward_segment_count(s.protocol));
    const int reversed = static_cast<int>(sched.size()) - 2;  // last segment is the hold
    const double pre = log_negativity(traj.states[end_of_segment(traj, forward - 1)]);
    const double post = log_negativity(traj.states[end_of_segment(traj, reversed)]);
    const double held = log_negativity(traj.states.back());
    out.check(std::abs(post / pre - 1) <= 0.05,
              "Gamma = 0: E_N before reversal %.4f, after reversal %.4f, relative change %.3f (tolerance 0.05)", pre,
              post, std::abs(post / pre - 1));
    out.details.push_back("info  Gamma = 0: E_N at the end of the 0.2 s hold " + format_number(held) +
                          " (change during the hold " + format_number(std::abs(held / post - 1)) + ")");
  }
  {
    const Scenario& s = preset;
    const JumpSchedule with = s.schedule();
    const JumpSchedule without = s.no_reversal_schedule();
    const auto a = evolve_schedule(s.initial_state(), with, s.bath, units, s.sample_dt);
    const auto b = evolve_schedule(s.initial_state(), without, s.bath, units, s.sample_dt);
    const auto ra = observe(a, units), rb = observe(b, units);
    const double na = ra.back().phonons[0], nb = rb.back().phonons[0];
    out.check(nb >= 10 * na, "nbar = 100, Q = 1e8: final phonons %.4g with reversal, %.4g without (ratio %.4g, need >= 10)",
              na, nb, nb / na);

    // Decay over the common post-protocol window, i.e. the hold of the reversed run.
    const double t_start = schedule_duration(with) - s.protocol.hold_after;
    auto window = [&](const std::vector<Observables>& rows, double& first, double& last, double& peak) {
      first = last = peak = 0.0;
      bool seen = false;
      for (const auto& r : rows) {
        if (r.time + 1e-12 < t_start) continue;
        if (!seen) first = r.log_negativity, seen = true;
        last = r.log_negativity;
        peak = std::max(peak, r.log_negativity);
      }
    };
    double fa, la, pa, fb, lb, pb;
    window(ra, fa, la, pa);
    window(rb, fb, lb, pb);
    const double duration = s.protocol.hold_after;
    const bool defined = fa > 0.0 && fb > 0.0;
    const double rate_a = defined ? (fa - la) / (fa * duration) : 0.0;
    const double rate_b = defined ? (fb - lb) / (fb * duration) : 0.0;
    out.check(defined && rate_a < 0.5 * rate_b,
              "nbar = 100, Q = 1e8: E_N over the last %.2f s goes %.4g -> %.4g with reversal, %.4g -> %.4g without; "
              "relative decay rates %.4g vs %.4g 1/s (need entanglement present and the first below half the second)",
              duration, fa, la, fb, lb, rate_a, rate_b);
    double largest = 0.0;
    for (const auto& r : ra) largest = std::max(largest, r.log_negativity);
    out.details.push_back("info  largest E_N at any time with reversal: " + format_number(largest));
  }
  return out;
}

// 5. Closed-form propagator against RK4.
Outcome criterion_5() {
  Outcome out;
  const double mass = 1e-16;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  double worst = 0.0;
  double worst_order = 1e9;
  for (int trial = 0; trial < 100; ++trial) {
    const double w1 = 2 * kPi * uniform(50.0, 200.0);
    const ModeUnits units(mass, w1);
    HamiltonianParams params{{w1, w1 * uniform(0.5, 2.0)}, mass, units.to_si_coupling(uniform(-1e-2, 1e-2))};
    BathParams bath{w1 * std::pow(10.0, uniform(-8.0, -2.0)), uniform(0.0, 100.0), unit(rng) < 0.5};
    const double duration = uniform(0.1, 2.0) * 2 * kPi / w1;
    const auto v0 = oracles::random_physical_state(2, rng);
    const Matrix closed = evolve_segment(v0, {params, duration}, bath, units).matrix();
    const double period = 2 * kPi / (std::max(params.omega[0], params.omega[1]) * 1.01);
    const Matrix fine = oracles::rk4_evolve(v0, params, bath, units, duration, {period / 800}).matrix();
    worst = std::max(worst, max_abs(fine - closed) / max_abs(closed));
    if (trial < 10) {
      const double e1 = max_abs(oracles::rk4_evolve(v0, params, bath, units, duration, {period / 200}).matrix() - closed);
      const double e2 = max_abs(oracles::rk4_evolve(v0, params, bath, units, duration, {period / 400}).matrix() - closed);
      worst_order = std::min(worst_order, std::log2(e1 / e2));
    }
  }
  out.check(worst <= 1e-7, "100 random segments: worst relative difference %.3e (tolerance 1e-7)", worst);
  out.check(worst_order >= 3.7, "observed RK4 order (step halving, 10 segments): min %.3f (need >= 3.7)", worst_order);
  return out;
}

// 6. Frequency-noise threshold on the Casimir scenario.
Outcome criterion_6() {
  Outcome out;
  const Scenario s = load_scenario_file("casimir-diamonds");
  NoiseSpec base;
  base.samples = 1000;
  base.seed = 1;
  std::vector<double> stars;
  bool within = true;
  double sigma_n10 = 0.0;
  for (int n = 6; n <= 12; ++n) {
    NoiseProblem p;
    p.protocol = s.protocol;
    p.protocol.cycles = n;
    p.protocol.hold_after = 0.0;
    p.coupling = s.coupling;
    p.mass = s.mass;
    p.bath = {};  // frequency noise alone
    const Threshold t = threshold_sigma_star(p, base);
    const double estimate = sigma_star_estimate(p.protocol);
    const double ratio = t.sigma_star / estimate;
    within = within && ratio >= 0.1 && ratio <= 10.0;
    stars.push_back(t.sigma_star);
    if (n == 10) sigma_n10 = t.sigma_star;
    char line[200];
    std::snprintf(line, sizeof line, "info  N = %2d: sigma*/2pi = %.4g Hz, estimate/2pi = %.4g Hz, ratio %.4g", n,
                  t.sigma_star / (2 * kPi), estimate / (2 * kPi), ratio);
    out.details.emplace_back(line);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < stars.size(); ++i) decreasing = decreasing && stars[i] < stars[i - 1];
  out.check(decreasing, "sigma* strictly decreasing over N = 6..12 (1000 samples per point)");
  out.check(within, "sigma* within a factor 10 of (4 w1 / pi) e^{-2r} for every N");
  out.check(sigma_n10 < 2 * kPi * 1e-3, "N = 10: sigma*/2pi = %.4g Hz (need < 1e-3 Hz)", sigma_n10 / (2 * kPi));
  return out;
}

// 7. Collapse-model bound and gas collisions.
Outcome criterion_7() {
  Outcome out;
  const CslBoundInput in{80e-9, 2 * kPi * 100, 1e-16, 250e-9, 100e-9, constants::carbon_atom_mass, 10.0};
  const double bound = csl_bound(in);
  out.check(std::abs(bound / 2e-17 - 1) <= 0.3, "CSL bound %.4g Hz (target 2e-17 Hz +/- 30%%)", bound);
  const GasParams gas{1.0, 100.0, 250e-9, constants::air_molecule_mass};
  const double per_pa = collision_rate(gas);
  out.check(per_pa >= 2e9 && per_pa <= 5e10, "collision rate %.4g Hz per Pa (target 1e10, within a factor 5)", per_pa);
  return out;
}

// 8. Gaussian-state properties on random inputs.
Outcome criterion_8() {
  Outcome out;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int trials = 1000;
  int spectrum = 0, local = 0, pure = 0, bounded = 0, physical = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto v = oracles::random_physical_state(2, rng, 0.6, 4.0);
    const Matrix s = oracles::random_symplectic(2, 0.6, rng);
    const auto w = apply_symplectic(s, v);
    const auto a = symplectic_eigenvalues(v), b = symplectic_eigenvalues(w);
    if (std::abs(b[0] / a[0] - 1) <= 1e-9 && std::abs(b[1] / a[1] - 1) <= 1e-9) ++spectrum;

    Matrix l = Matrix::Identity(4, 4);
    for (int mode = 0; mode < 2; ++mode) {
      const Matrix one = oracles::random_symplectic(1, 0.8, rng);
      l(mode, mode) = one(0, 0), l(mode, mode + 2) = one(0, 1);
      l(mode + 2, mode) = one(1, 0), l(mode + 2, mode + 2) = one(1, 1);
    }
    const double e0 = log_negativity(v), e1 = log_negativity(apply_symplectic(l, v));
    if (std::abs(e1 - e0) <= 1e-8 * (1 + e0)) ++local;

    const double p_pure = purity(apply_symplectic(s, vacuum_state(2)));
    const double p = purity(v);
    if (std::abs(p_pure - 1) <= 1e-9) ++pure;
    if (p > 0 && p <= 1 + 1e-12) ++bounded;

    const double w1 = 2 * kPi * (50 + 150 * unit(rng));
    const ModeUnits units(1e-16, w1);
    HamiltonianParams params{{w1, w1 * (0.5 + unit(rng))}, 1e-16, units.to_si_coupling(0.02 * (unit(rng) - 0.5))};
    BathParams bath{w1 * std::pow(10.0, -6 + 4 * unit(rng)), 10 * unit(rng)};
    const auto evolved = evolve_segment(w, {params, (0.05 + unit(rng)) / w1 * 2 * kPi}, bath, units);
    if (is_physical(w) && is_physical(evolved)) ++physical;
  }
  out.check(spectrum == trials, "symplectic-eigenvalue invariance: %d / %d", spectrum, trials);
  out.check(local == trials, "log-negativity local-unitary invariance: %d / %d", local, trials);
  out.check(pure == trials && bounded == trials, "purity: pure states %d / %d, bounds (0, 1] %d / %d", pure, trials,
            bounded, trials);
  out.check(physical == trials, "physicality preserved by symplectic maps and dissipative segments: %d / %d",
            physical, trials);
  return out;
}

// 9. Gravity-coupled pendula after 10 s.
Outcome criterion_9() {
  Outcome out;
  const Scenario s = load_scenario_file("gravity-pendula");
  const auto r = run_simulation(s);
  out.check(std::abs(s.bath.nbar / s.quality / 1e-10 - 1) < 1e-12, "preset nbar / Q = %.3g", s.bath.nbar / s.quality);
  out.check(std::abs(r.rows.back().time - 10.0) < 1e-9 && r.final_log_negativity >= 0.05 && r.final_log_negativity <= 5.0,
            "E_N at t = %.3f s: %.4f (need within [0.05, 5])", r.rows.back().time, r.final_log_negativity);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
      {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}};
  int unexpected = 0;
  for (const auto& [id, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.details.push_back(std::string("MISS  exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool known = kKnownFailures.count(id) > 0;
    std::printf("%s  criterion %d  (%.1f s)%s\n", o.passed ? "PASS" : "FAIL", id, seconds,
                !o.passed && known ? "  [known failure, see README]" : "");
    for (const auto& d : o.details) std::printf("      %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.passed && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
