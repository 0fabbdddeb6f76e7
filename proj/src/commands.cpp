#include "cvdyn/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <omp.h>

#include "json.hpp"

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"
#include "cvdyn/measures.hpp"
#include "cvdyn/oracles.hpp"

#ifndef CVDYN_VERSION
#define CVDYN_VERSION "dev"
#endif

namespace cvdyn {

namespace {

using nlohmann::json;

std::filesystem::path output_path(const RunOptions& options, const std::string& file) {
  std::filesystem::path dir(options.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + options.out_dir + "': " + ec.message());
  return dir / file;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_number(values[i]);
  }
  out << '\n';
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

json header_json(const Scenario& s) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, s.config_hash);
  return {{"tool", "cvdyn"}, {"version", CVDYN_VERSION}, {"scenario", s.name}, {"config_fnv1a64", hash}};
}

int team_size(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

// Physical mid-protocol spread: at omega1 an axis-aligned state rotates
// between its X and P variances, so the largest position variance over the
// following rotation is max(X, P) in reference units.
double rotating_spread(const CovarianceMatrix& v, const ModeUnits& units) {
  return std::sqrt(units.position_variance_si(std::max(v.x_variance(0), v.p_variance(0))));
}

json simulation_json(const SimulationResult& r) {
  return {{"peak_E_N", r.peak_log_negativity},
          {"final_E_N", r.final_log_negativity},
          {"final_phonons", r.final_phonons},
          {"final_purity", r.final_purity},
          {"mid_protocol",
           {{"time_s", r.mid_time},
            {"E_N", r.mid_log_negativity},
            {"phonons", r.mid_phonons},
            {"r_eff", r.mid_squeezing}}},
          {"max_position_spread_m", r.max_position_spread},
          {"samples", r.rows.size()}};
}

void write_trajectory(const std::filesystem::path& path, const Scenario& s, const SimulationResult& r) {
  auto out = open_output(path);
  out << output_header(s.name, s.config_hash) << '\n';
  if (s.count == 2) {
    out << "t_s,E_N,n_phonon_1,n_phonon_2,purity,var_x1,var_p1,var_x2,var_p2,cov_x1x2\n";
    for (const auto& row : r.rows) {
      write_row(out, {row.time, row.log_negativity, row.phonons[0], row.phonons[1], row.purity, row.var_x[0],
                      row.var_p[0], row.var_x[1], row.var_p[1], row.cov_x1x2});
    }
  } else {
    out << "t_s,E_N,n_phonon_1,purity,var_x1,var_p1\n";
    for (const auto& row : r.rows) {
      write_row(out, {row.time, row.log_negativity, row.phonons[0], row.purity, row.var_x[0], row.var_p[0]});
    }
  }
}

template <class Body>
void parallel_for(int count, int threads, Body body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(team_size(threads))
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(cvdyn_command_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string output_header(const std::string& name, std::uint64_t config_hash) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, config_hash);
  return "# cvdyn " CVDYN_VERSION " scenario=" + name + " config=fnv1a64:" + buf;
}

SimulationResult run_simulation(const Scenario& scenario, const JumpSchedule* schedule) {
  const JumpSchedule sched = schedule ? *schedule : scenario.schedule();
  const ModeUnits units = scenario.units();
  const Trajectory traj =
      evolve_schedule(scenario.initial_state(), sched, scenario.bath, units, scenario.sample_dt);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (!is_physical(traj.frame_states[i])) {
      throw NumericError("unphysical state at t = " + format_number(traj.times[i]) + " s");
    }
  }

  SimulationResult r;
  r.rows = observe(traj, units);
  for (const auto& row : r.rows) {
    r.peak_log_negativity = std::max(r.peak_log_negativity, row.log_negativity);
  }
  const Observables& last = r.rows.back();
  r.final_log_negativity = last.log_negativity;
  r.final_phonons = last.phonons;
  r.final_purity = last.purity;

  // Boundary sample closing the forward block; the initial sample if there is none.
  const int forward = static_cast<int>(forward_segment_count(scenario.protocol));
  std::size_t mid = 0;
  if (forward > 0) {
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      if (traj.segment[i] == forward - 1) mid = i;
    }
  }
  r.mid_time = traj.times[mid];
  r.mid_log_negativity = r.rows[mid].log_negativity;
  r.mid_phonons = r.rows[mid].phonons;
  r.mid_squeezing = effective_squeezing(traj.states[mid], 0);
  for (const auto& row : r.rows) {
    r.max_position_spread = std::max(r.max_position_spread, std::sqrt(row.var_x[0]));
  }
  r.max_position_spread = std::max(r.max_position_spread, rotating_spread(traj.states[mid], units));
  return r;
}

SimulationResult cmd_simulate(const Scenario& scenario, const RunOptions& options, std::ostream& log) {
  const SimulationResult r = run_simulation(scenario);
  write_trajectory(output_path(options, scenario.trajectory_file), scenario, r);
  json summary = header_json(scenario);
  summary["result"] = simulation_json(r);
  summary["coupling_N_per_m"] = scenario.coupling;
  summary["omega1_rad_s"] = scenario.protocol.omega1;
  summary["omega2_rad_s"] = scenario.protocol.omega2;
  summary["cycles"] = scenario.protocol.cycles;
  summary["reverse"] = scenario.protocol.reverse;
  summary["gamma_per_s"] = scenario.bath.gamma;

  log << "simulate " << scenario.name << ": " << r.rows.size() << " samples\n"
      << "  peak E_N " << format_number(r.peak_log_negativity) << ", final E_N "
      << format_number(r.final_log_negativity) << ", final phonons " << format_number(r.final_phonons[0])
      << "\n";

  if (scenario.compare_no_reversal) {
    const JumpSchedule plain = scenario.no_reversal_schedule();
    const SimulationResult c = run_simulation(scenario, &plain);
    std::filesystem::path name(scenario.trajectory_file);
    const std::string file = name.stem().string() + "_no_reversal" + name.extension().string();
    write_trajectory(output_path(options, file), scenario, c);
    summary["no_reversal"] = simulation_json(c);
    log << "  without reversal: final E_N " << format_number(c.final_log_negativity) << ", final phonons "
        << format_number(c.final_phonons[0]) << "\n";
  }
  write_json(output_path(options, scenario.summary_file), summary);
  return r;
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::vector<double>& ratios, int threads) {
  for (double r : ratios) {
    if (!(r > 0.0)) throw InvalidArgument("run_sweep: ratios must be positive");
  }
  std::vector<SweepRow> rows(ratios.size());
  const ModeUnits units = scenario.units();
  parallel_for(static_cast<int>(ratios.size()), threads, [&](int i) {
    Scenario point = scenario;
    point.protocol.omega2 = scenario.shifted(ratios[i] * scenario.trap_omega);
    const JumpSchedule sched = point.schedule();
    const std::size_t forward = std::min(sched.size(), forward_segment_count(point.protocol));
    const JumpSchedule head(sched.begin(), sched.begin() + static_cast<long>(forward));
    const JumpSchedule tail(sched.begin() + static_cast<long>(forward), sched.end());

    const CovarianceMatrix mid = propagate(point.initial_state(), head, point.bath, units);
    const CovarianceMatrix end = propagate(mid, tail, point.bath, units);
    const JumpSchedule flat{{HamiltonianParams{std::vector<double>(point.count, point.protocol.omega1), point.mass,
                                               point.coupling},
                             schedule_duration(sched)}};
    const CovarianceMatrix base = propagate(point.initial_state(), flat, point.bath, units);

    SweepRow row;
    row.ratio = ratios[i];
    row.pre_reversal_phonons = phonon_number(mid, 0, units, point.protocol.omega1);
    row.final_phonons = phonon_number(end, 0, units, point.protocol.omega1);
    if (point.count >= 2) {
      row.final_log_negativity = log_negativity(end);
      row.baseline_log_negativity = log_negativity(base);
    }
    rows[i] = row;
  });
  return rows;
}

std::vector<SweepRow> cmd_sweep(const Scenario& scenario, const RunOptions& options, std::ostream& log) {
  if (!scenario.sweep) throw ConfigError("sweep needs a [sweep] block with 'ratios'");
  const auto rows = run_sweep(scenario, scenario.sweep->ratios, options.threads);
  auto out = open_output(output_path(options, "sweep.csv"));
  out << output_header(scenario.name, scenario.config_hash) << '\n';
  out << "ratio,E_N_final,n_phonon_pre_reversal,n_phonon_final,E_N_baseline\n";
  for (const auto& r : rows) {
    write_row(out, {r.ratio, r.final_log_negativity, r.pre_reversal_phonons, r.final_phonons,
                    r.baseline_log_negativity});
  }
  log << "sweep " << scenario.name << ": " << rows.size() << " ratios\n";
  return rows;
}

NoiseReport run_noise(const Scenario& scenario, const RunOptions& options) {
  if (!scenario.noise) throw ConfigError("noise needs a [noise] block");
  const NoiseBlock& block = *scenario.noise;
  NoiseReport report;
  NoiseSpec base;
  base.samples = options.samples.value_or(block.samples);
  base.seed = options.seed.value_or(block.seed);
  base.perturb_durations = block.perturb_durations;
  if (base.samples < 1) throw ConfigError("--samples must be >= 1");

  for (int cycles : block.cycles) {
    NoiseProblem problem;
    problem.protocol = scenario.protocol;
    problem.protocol.cycles = cycles;
    problem.protocol.hold_after = 0.0;
    problem.coupling = scenario.coupling;
    problem.mass = scenario.mass;
    problem.bath = scenario.bath;
    if (!block.dissipation) problem.bath.gamma = 0.0;

    NoiseSpec exact = base;
    exact.sigma_omega = 0.0;
    exact.samples = 1;
    const double reference = averaged_covariance(problem, exact, options.threads).log_negativity;
    for (double sigma_hz : block.sigma_hz) {
      NoiseSpec noise = base;
      noise.sigma_omega = 2.0 * constants::pi * sigma_hz;
      if (noise.sigma_omega == 0.0) noise.samples = 1;
      const NoiseAverage avg = averaged_covariance(problem, noise, options.threads);
      NoiseRow row;
      row.cycles = cycles;
      row.sigma_omega = noise.sigma_omega;
      row.log_negativity = avg.log_negativity;
      row.normalized = reference > 0.0 ? avg.log_negativity / reference : 0.0;
      row.standard_error = avg.standard_error;
      row.samples = avg.samples;
      row.redraws = avg.redraws;
      report.grid.push_back(row);
    }
    if (block.threshold) {
      ThresholdOptions topt;
      topt.cutoff = block.cutoff;
      topt.relative_tolerance = block.relative_tolerance;
      topt.threads = options.threads;
      std::vector<bool> variants{false};
      if (block.forward_threshold) variants.push_back(true);
      for (bool forward_only : variants) {
        NoiseProblem p = problem;
        p.forward_only = forward_only;
        ThresholdRow t;
        t.cycles = cycles;
        t.forward_only = forward_only;
        t.threshold = threshold_sigma_star(p, base, topt);
        t.estimate = sigma_star_estimate(p.protocol);
        report.thresholds.push_back(t);
      }
    }
  }
  return report;
}

NoiseReport cmd_noise(const Scenario& scenario, const RunOptions& options, std::ostream& log) {
  const NoiseReport report = run_noise(scenario, options);
  {
    auto out = open_output(output_path(options, "noise.csv"));
    out << output_header(scenario.name, scenario.config_hash) << '\n';
    out << "cycles,sigma_omega_rad_s,sigma_hz,E_N,E_N_normalized,standard_error,samples,redraws\n";
    for (const auto& r : report.grid) {
      write_row(out, {static_cast<double>(r.cycles), r.sigma_omega, r.sigma_omega / (2.0 * constants::pi),
                      r.log_negativity, r.normalized, r.standard_error, static_cast<double>(r.samples),
                      static_cast<double>(r.redraws)});
    }
  }
  json summary = header_json(scenario);
  summary["thresholds"] = json::array();
  if (!report.thresholds.empty()) {
    auto out = open_output(output_path(options, "threshold.csv"));
    out << output_header(scenario.name, scenario.config_hash) << '\n';
    out << "cycles,forward_only,sigma_star_rad_s,sigma_star_hz,upper_rad_s,estimate_rad_s,ratio_to_estimate,"
           "E_N_noiseless,samples,evaluations\n";
    for (const auto& t : report.thresholds) {
      const Threshold& th = t.threshold;
      write_row(out, {static_cast<double>(t.cycles), t.forward_only ? 1.0 : 0.0, th.sigma_star,
                      th.sigma_star / (2.0 * constants::pi), th.upper, t.estimate, th.sigma_star / t.estimate,
                      th.noiseless_log_negativity, static_cast<double>(th.samples),
                      static_cast<double>(th.evaluations)});
      summary["thresholds"].push_back({{"cycles", t.cycles},
                                       {"forward_only", t.forward_only},
                                       {"sigma_star_rad_s", th.sigma_star},
                                       {"upper_rad_s", th.upper},
                                       {"estimate_rad_s", t.estimate},
                                       {"samples", th.samples}});
      log << "  N=" << t.cycles << (t.forward_only ? " (forward)" : "") << "  sigma* = "
          << format_number(th.sigma_star / (2.0 * constants::pi)) << " Hz (2 pi), estimate "
          << format_number(t.estimate / (2.0 * constants::pi)) << " Hz (2 pi)\n";
    }
  }
  write_json(output_path(options, "noise_summary.json"), summary);
  log << "noise " << scenario.name << ": " << report.grid.size() << " grid points, " << report.thresholds.size()
      << " thresholds\n";
  return report;
}

std::vector<EstimateItem> run_estimate(const Scenario& s) {
  if (s.interaction_type == "none" && !s.csl && !s.gas) {
    throw ConfigError("nothing to estimate: add an [interaction], [estimate.csl] or [estimate.gas] block");
  }
  std::vector<EstimateItem> items;
  auto add = [&](std::string name, double value, std::string unit, std::string formula) {
    items.push_back({std::move(name), value, std::move(unit), std::move(formula)});
  };
  const double two_pi = 2.0 * constants::pi;
  add("trap_frequency", s.trap_omega, "rad/s", s.trap_type == "magnetic" ? "sqrt(-chi / (mu0 rho)) B'" : s.trap_type == "pendulum" ? "sqrt(g / l)" : "input");
  add("trap_frequency_hz", s.trap_omega / two_pi, "Hz", "omega / 2 pi");
  add("omega2", s.protocol.omega2, "rad/s", "protocol");
  if (s.pendulum) {
    add("pendulum_length", s.pendulum_length, "m", "l");
    add("pendulum_omega2", s.pendulum->omega2, "rad/s", "sqrt((g + a_up) / l)");
    add("base_displacement", s.pendulum->base_displacement, "m", "a_up tau2^2 / 2");
  }
  add("mass", s.mass, "kg", s.radius > 0.0 ? "input or 4/3 pi R^3 rho" : "input");
  if (s.protocol.cycles > 0) {
    add("predicted_squeezing", predicted_squeezing(s.protocol), "", "r = N ln(omega1 / omega2)");
    add("sigma_star_estimate", sigma_star_estimate(s.protocol), "rad/s", "(4 omega1 / pi) e^{-2 r}");
  }

  if (s.interaction) {
    const double omega = s.trap_omega;
    add("coupling", s.bilinear.coupling, "N/m", "lambda = -C n (n+1) / d0^(n+2)");
    add("local_shift", s.bilinear.local_shift, "N/m", "C n (n+1) / d0^(n+2)");
    add("linear_force", s.bilinear.linear_force, "N", "C n / d0^(n+1)");
    add("equilibrium_displacement", equilibrium_displacement(s.bilinear.linear_force, s.mass, omega), "m",
        "F / (m omega^2)");
    add("peak_E_N_no_protocol", std::abs(s.bilinear.coupling) / (s.mass * omega * omega * std::log(2.0)), "ebit",
        "|lambda| / (m omega^2 ln 2)");
    const InteractionComponents g = interaction_components(s.coupling, ModeUnits(s.mass, omega));
    add("beam_splitter_rate", g.beam_splitter, "rad/s", "lambda x0^2 / hbar");
    add("two_mode_squeezing_rate", g.two_mode_squeezing, "rad/s", "lambda x0^2 / hbar");
    if (s.interaction_type == "casimir") {
      const double r6 = std::pow(s.radius > 0.0 ? s.radius : 1.0, 6);
      add("casimir_strength", s.interaction->strength, "J m^7", "alpha R0^6");
      if (s.radius > 0.0) add("casimir_alpha", s.interaction->strength / r6, "J m", "C / R0^6");
    }
  }

  if (s.csl) {
    const CslBlock& c = *s.csl;
    double sigma = 0.0;
    if (s.protocol.cycles > 0) {
      // Largest spread of a single free particle driven by the forward block.
      Scenario single = s;
      single.coupling = 0.0;
      single.bath.gamma = 0.0;
      ProtocolSpec fwd = s.protocol;
      fwd.reverse = false;
      fwd.hold_after = 0.0;
      const CovarianceMatrix mid =
          propagate(single.initial_state(), build_forward(fwd, 0.0, s.mass), single.bath, s.units());
      sigma = rotating_spread(mid, s.units());
      add("protocol_sigma_max", sigma, "m", "sqrt(max <x^2>) at mid-protocol");
    }
    if (c.sigma_max) sigma = *c.sigma_max;
    const CslBoundInput in{sigma, s.protocol.omega1, s.mass, s.radius, c.length, c.reference_mass, c.safety};
    const double bound = csl_bound(in);
    const double dwell = csl_dwell_time(s.protocol.omega1);
    add("csl_sigma_max", sigma, "m", c.sigma_max ? "input" : "protocol");
    add("csl_dwell_time", dwell, "s", "4 tau1 / 3");
    add("csl_form_factor", csl_form_factor(s.radius / c.length), "", "(6/x^2)[1 - 2/x^2 + (1 + 2/x^2) e^{-x^2}]");
    add("csl_rate_bound", bound, "Hz", "4 m0^2 a^2 / (safety tau m^2 sigma^2 f(R/a))");
    const double rate = c.rate.value_or(bound);
    const CslParams p{rate, c.length, c.reference_mass, s.mass, s.radius};
    add("csl_rate", rate, "Hz", c.rate ? "input" : "bound");
    add("csl_localization_rate", csl_localization_rate(p), "1/(s m^2)", "(m/m0)^2 gamma0 f(R/a) / (4 a^2)");
    add("csl_coherence_time", csl_coherence_time(p, sigma), "s", "1 / (Lambda sigma^2)");
  }

  if (s.gas) {
    const GasParams gas{s.gas->pressure, s.gas->temperature, s.radius, s.gas->molecule_mass};
    add("gas_mean_speed", std::sqrt(3.0 * constants::boltzmann * gas.temperature / gas.molecule_mass), "m/s",
        "sqrt(3 kB T / m_a)");
    add("collision_rate", collision_rate(gas), "Hz", "pi v P R^2 / (kB T)");
    GasParams unit = gas;
    unit.pressure = 1.0;
    add("collision_rate_per_pascal", collision_rate(unit), "Hz/Pa", "R_air / P");
  }
  return items;
}

std::vector<EstimateItem> cmd_estimate(const Scenario& scenario, const RunOptions& options, std::ostream& log) {
  const auto items = run_estimate(scenario);
  json report = header_json(scenario);
  report["estimates"] = json::array();
  log << "estimate " << scenario.name << "\n";
  for (const auto& item : items) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-28s %-24s %-10s %s\n", item.name.c_str(), format_number(item.value).c_str(),
                  item.unit.c_str(), item.formula.c_str());
    log << line;
    report["estimates"].push_back(
        {{"name", item.name}, {"value", item.value}, {"unit", item.unit}, {"formula", item.formula}});
  }
  write_json(output_path(options, "estimate.json"), report);
  return items;
}

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto max_abs = [](const Matrix& m) { return m.cwiseAbs().maxCoeff(); };
  std::vector<CheckResult> out;
  auto record = [&](std::string name, double error, double tolerance) {
    tolerance *= options.tolerance_scale;
    out.push_back({std::move(name), error <= tolerance, error, tolerance});
  };
  const double mass = 1e-16;

  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double w1 = 2.0 * constants::pi * uniform(50.0, 200.0);
      const ModeUnits units(mass, w1);
      HamiltonianParams params{{w1, w1 * uniform(0.5, 2.0)}, mass, units.to_si_coupling(uniform(-1e-2, 1e-2))};
      BathParams bath{w1 * std::pow(10.0, uniform(-8.0, -2.0)), uniform(0.0, 100.0)};
      const double duration = uniform(0.1, 2.0) * 2.0 * constants::pi / w1;
      const CovarianceMatrix v0 = oracles::random_physical_state(2, rng);
      const Matrix closed = evolve_segment(v0, {params, duration}, bath, units).matrix();
      const double fastest = std::max(params.omega[0], params.omega[1]) * 1.01;
      const Matrix rk4 =
          oracles::rk4_evolve(v0, params, bath, units, duration, {2.0 * constants::pi / fastest / 800.0}).matrix();
      worst = std::max(worst, max_abs(closed - rk4) / max_abs(closed));
    }
    record("rk4-vs-closed-form", worst, 1e-7);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      double ratio = uniform(0.3, 0.9);
      if (trial % 2) ratio = 1.0 / ratio;
      ProtocolSpec spec;
      spec.omega1 = 2.0 * constants::pi * 100.0;
      spec.cycles = 1 + static_cast<int>(unit(rng) * 12);
      spec.omega2 = ratio * spec.omega1;
      const ModeUnits units(mass, spec.omega1);
      const CovarianceMatrix v = propagate(vacuum_state(2), build_forward(spec, 0.0, mass), {}, units);
      double x = 1.0, p = 1.0;
      for (int k = 0; k < spec.cycles; ++k) std::tie(x, p) = oracles::variance_map_cycle(x, p, spec.omega1, spec.omega2);
      worst = std::max({worst, std::abs(2.0 * v.x_variance(0) / x - 1.0), std::abs(2.0 * v.p_variance(0) / p - 1.0)});
    }
    record("variance-map-vs-schedule", worst, 1e-8);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      double ratio = uniform(0.3, 0.9);
      if (trial % 2) ratio = 1.0 / ratio;
      ProtocolSpec spec;
      spec.omega1 = 2.0 * constants::pi * 100.0;
      spec.cycles = 1 + static_cast<int>(unit(rng) * 12);
      spec.reverse = true;
      spec.omega2 = ratio * spec.omega1;
      const ModeUnits units(mass, spec.omega1);
      const CovarianceMatrix v0 = thermal_state(2, uniform(0.0, 3.0));
      const CovarianceMatrix v = propagate(v0, build_full(spec, 0.0, mass), {}, units);
      worst = std::max(worst, max_abs(v.matrix() - v0.matrix()));
    }
    record("reversal-identity", worst, 1e-8);
  }
  {
    double worst = 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix a(4, 4);
      for (int i = 0; i < 16; ++i) a(i) = normal(rng);
      const double t = uniform(0.05, 1.5);
      const Matrix e = matrix_exponential(a, t);
      worst = std::max(worst, max_abs(e - oracles::series_exponential(a, t)) / max_abs(e));
    }
    record("expm-vs-series", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const CovarianceMatrix v = oracles::random_physical_state(2, rng);
      const Matrix s = oracles::random_symplectic(2, 0.5, rng);
      const auto before = symplectic_eigenvalues(v);
      const auto after = symplectic_eigenvalues(apply_symplectic(s, v));
      for (std::size_t k = 0; k < before.size(); ++k) worst = std::max(worst, std::abs(after[k] / before[k] - 1.0));
    }
    record("symplectic-invariance", worst, 1e-9);
  }
  {
    const double w1 = 2.0 * constants::pi * 100.0;
    const ModeUnits units(mass, w1);
    HamiltonianParams params{{w1, 0.5 * w1}, mass, 0.0};
    BathParams bath{w1 * 1e-2, 7.0};
    const double duration = 40.0 / bath.gamma;
    const CovarianceMatrix v = evolve_segment(oracles::random_physical_state(2, rng), {params, duration}, bath, units);
    const Matrix target = equilibrium_state(bath, params, units).matrix();
    record("thermalization", max_abs(v.matrix() - target) / max_abs(target), 1e-9);
  }
  {
    NoiseProblem problem;
    problem.protocol.omega1 = 2.0 * constants::pi * 100.0;
    problem.protocol.omega2 = 2.0 * constants::pi * 50.0;
    problem.protocol.cycles = 3;
    problem.protocol.reverse = true;
    problem.mass = mass;
    problem.coupling = ModeUnits(mass, problem.protocol.omega1).to_si_coupling(1e-3);
    NoiseSpec noise{0.01, 64, options.seed};
    const NoiseAverage par = averaged_covariance(problem, noise, options.threads);
    const NoiseAverage ser = averaged_covariance_reference(problem, noise);
    record("parallel-vs-serial", max_abs(par.covariance.matrix() - ser.covariance.matrix()), 0.0);
  }
  return out;
}

bool cmd_validate(const ValidateOptions& options, std::ostream& log) {
  const auto results = run_validation(options);
  bool ok = true;
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%s  %-26s error %.3e  tolerance %.3e\n", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.error, r.tolerance);
    log << line;
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace cvdyn
