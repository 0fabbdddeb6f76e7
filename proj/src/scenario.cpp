#include "cvdyn/scenario.hpp"

#include <cmath>
#include <filesystem>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"

#ifndef CVDYN_PRESET_DIR
#define CVDYN_PRESET_DIR "presets"
#endif

namespace cvdyn {

namespace {

using config::Document;

double positive(const Document& doc, const std::string& key) {
  const double v = doc.number(key);
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive", doc.line_of(key));
  return v;
}

std::optional<double> optional_positive(const Document& doc, const std::string& key) {
  if (!doc.has(key)) return std::nullopt;
  return positive(doc, key);
}

double non_negative_or(const Document& doc, const std::string& key, double fallback) {
  const double v = doc.number_or(key, fallback);
  if (!(v >= 0.0)) throw ConfigError("'" + key + "' must be >= 0", doc.line_of(key));
  return v;
}

void exclusive(const Document& doc, const std::string& a, const std::string& b) {
  if (doc.has(a) && doc.has(b)) {
    throw ConfigError("give either '" + a + "' or '" + b + "', not both", doc.line_of(b));
  }
}

void read_particle(const Document& doc, Scenario& s) {
  if (!doc.has_table("particle")) throw ConfigError("missing [particle] block");
  s.count = static_cast<int>(doc.integer_or("particle.count", 2));
  if (s.count != 1 && s.count != 2) {
    throw ConfigError("'particle.count' must be 1 or 2", doc.line_of("particle.count"));
  }
  s.radius = optional_positive(doc, "particle.radius").value_or(0.0);
  exclusive(doc, "particle.mass", "particle.density");
  if (doc.has("particle.mass")) {
    s.mass = positive(doc, "particle.mass");
  } else if (doc.has("particle.density")) {
    if (s.radius == 0.0) throw ConfigError("'particle.density' needs 'particle.radius'", doc.line_of("particle.density"));
    s.mass = sphere_mass(s.radius, positive(doc, "particle.density"));
  } else {
    throw ConfigError("[particle] needs 'mass' or 'radius' and 'density'");
  }
}

void read_trap(const Document& doc, Scenario& s) {
  if (!doc.has_table("trap")) throw ConfigError("missing [trap] block");
  s.trap_type = doc.string("trap.type");
  if (s.trap_type == "direct") {
    s.trap_omega = 2.0 * constants::pi * positive(doc, "trap.frequency_hz");
  } else if (s.trap_type == "magnetic") {
    MagneticTrap trap{doc.number("trap.susceptibility"), 0.0, positive(doc, "trap.gradient")};
    if (!(trap.susceptibility < 0.0)) {
      throw ConfigError("'trap.susceptibility' must be negative (diamagnetic)", doc.line_of("trap.susceptibility"));
    }
    if (doc.has("trap.density")) {
      trap.density = positive(doc, "trap.density");
    } else if (s.radius > 0.0) {
      trap.density = s.mass / (4.0 / 3.0 * constants::pi * s.radius * s.radius * s.radius);
    } else {
      throw ConfigError("magnetic trap needs 'trap.density' or a particle radius");
    }
    s.trap_omega = trap_frequency_magnetic(trap);
  } else if (s.trap_type == "pendulum") {
    exclusive(doc, "trap.length", "trap.frequency_hz");
    const double g = optional_positive(doc, "trap.gravity").value_or(constants::standard_gravity);
    double length = 0.0;
    if (doc.has("trap.length")) {
      length = positive(doc, "trap.length");
    } else {
      length = pendulum_length(2.0 * constants::pi * positive(doc, "trap.frequency_hz"), g);
    }
    const double a_up = doc.number_or("trap.acceleration", 0.0);
    if (!(g + a_up > 0.0)) {
      throw ConfigError("'trap.acceleration' must keep g + a_up positive", doc.line_of("trap.acceleration"));
    }
    s.pendulum = pendulum_jump({length, g, a_up});
    s.pendulum_length = length;
    s.trap_omega = s.pendulum->omega1;
  } else {
    throw ConfigError("'trap.type' must be direct, magnetic or pendulum", doc.line_of("trap.type"));
  }
}

void read_interaction(const Document& doc, Scenario& s) {
  s.interaction_type = doc.string_or("interaction.type", "none");
  s.local_shift = doc.boolean_or("interaction.local_shift", false);
  if (s.interaction_type == "none") return;
  if (s.count != 2) throw ConfigError("an interaction needs particle.count = 2", doc.line_of("interaction.type"));
  const double d0 = positive(doc, "interaction.separation");
  if (s.interaction_type == "casimir") {
    exclusive(doc, "interaction.alpha", "interaction.peak_log_negativity");
    double radius = optional_positive(doc, "interaction.radius").value_or(s.radius);
    if (!(radius > 0.0)) throw ConfigError("casimir interaction needs a sphere radius");
    double alpha = 0.0;
    if (doc.has("interaction.alpha")) {
      alpha = doc.number("interaction.alpha");
    } else if (doc.has("interaction.peak_log_negativity")) {
      alpha = casimir_alpha_for_peak(positive(doc, "interaction.peak_log_negativity"), radius, d0, s.mass,
                                     s.trap_omega);
    } else {
      throw ConfigError("casimir interaction needs 'alpha' or 'peak_log_negativity'");
    }
    s.interaction = CasimirSpheres{alpha, radius}.at(d0);
  } else if (s.interaction_type == "gravity") {
    s.interaction = gravity(s.mass, d0);
  } else if (s.interaction_type == "power-law") {
    s.interaction = PowerLawInteraction{doc.number("interaction.strength"), doc.number("interaction.exponent"), d0};
    if (!(s.interaction->exponent >= 1.0)) {
      throw ConfigError("'interaction.exponent' must be >= 1", doc.line_of("interaction.exponent"));
    }
  } else {
    throw ConfigError("'interaction.type' must be casimir, gravity, power-law or none",
                      doc.line_of("interaction.type"));
  }
  s.bilinear = bilinear_coupling(*s.interaction);
  s.coupling = s.bilinear.coupling;
}

void read_protocol(const Document& doc, Scenario& s) {
  ProtocolSpec& p = s.protocol;
  p.modes = s.count;
  p.omega1 = s.shifted(s.trap_omega);
  p.cycles = static_cast<int>(doc.integer_or("protocol.cycles", 0));
  if (p.cycles < 0) throw ConfigError("'protocol.cycles' must be >= 0", doc.line_of("protocol.cycles"));
  p.reverse = doc.boolean_or("protocol.reverse", false);

  exclusive(doc, "protocol.ratio", "protocol.omega2_hz");
  double omega2_bare = s.trap_omega;
  if (doc.has("protocol.ratio")) {
    omega2_bare = positive(doc, "protocol.ratio") * s.trap_omega;
  } else if (doc.has("protocol.omega2_hz")) {
    omega2_bare = 2.0 * constants::pi * positive(doc, "protocol.omega2_hz");
  } else if (s.pendulum) {
    omega2_bare = s.pendulum->omega2;
  } else if (p.cycles > 0) {
    throw ConfigError("[protocol] needs 'ratio' or 'omega2_hz'");
  }
  p.omega2 = s.shifted(omega2_bare);

  exclusive(doc, "protocol.wait_s", "protocol.wait_half_period_of");
  if (doc.has("protocol.wait_s")) {
    p.intermediate_wait = positive(doc, "protocol.wait_s");
  } else if (doc.has("protocol.wait_half_period_of")) {
    const std::string which = doc.string("protocol.wait_half_period_of");
    if (which == "omega1") {
      p.intermediate_wait = constants::pi / p.omega1;
    } else if (which == "omega2") {
      p.intermediate_wait = constants::pi / p.omega2;
    } else {
      throw ConfigError("'protocol.wait_half_period_of' must be omega1 or omega2",
                        doc.line_of("protocol.wait_half_period_of"));
    }
  }

  exclusive(doc, "protocol.hold_after_s", "protocol.total_time_s");
  p.hold_after = non_negative_or(doc, "protocol.hold_after_s", 0.0);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (doc.has("protocol.total_time_s")) {
    const double total = positive(doc, "protocol.total_time_s");
    ProtocolSpec bare = p;
    bare.hold_after = 0.0;
    const double used = schedule_duration(bare.reverse ? build_full(bare, 0.0, s.mass) : build_forward(bare, 0.0, s.mass));
    if (total < used) {
      throw ConfigError("'protocol.total_time_s' is shorter than the protocol (" + std::to_string(used) + " s)",
                        doc.line_of("protocol.total_time_s"));
    }
    p.hold_after = total - used;
  }
}

void read_bath(const Document& doc, Scenario& s) {
  s.bath.nbar = non_negative_or(doc, "bath.nbar", 0.0);
  s.bath.rethermalize = doc.boolean_or("bath.rethermalize", true);
  if (doc.has("bath.quality")) {
    s.quality = positive(doc, "bath.quality");
    s.bath.gamma = s.protocol.omega1 / s.quality;
  }
  const std::string state = doc.string_or("initial.state", "vacuum");
  if (state == "vacuum") {
    if (doc.has("initial.nbar")) throw ConfigError("'initial.nbar' needs initial.state = \"thermal\"", doc.line_of("initial.nbar"));
  } else if (state == "thermal") {
    s.initial_nbar = non_negative_or(doc, "initial.nbar", s.bath.nbar);
  } else {
    throw ConfigError("'initial.state' must be vacuum or thermal", doc.line_of("initial.state"));
  }
}

void read_output(const Document& doc, Scenario& s) {
  const double fastest = std::max(s.protocol.omega1, s.protocol.omega2);
  s.sample_dt = optional_positive(doc, "output.sample_dt_s").value_or(quarter_period(fastest) / 10.0);
  s.trajectory_file = doc.string_or("output.trajectory", s.trajectory_file);
  s.summary_file = doc.string_or("output.summary", s.summary_file);
  s.compare_no_reversal = doc.boolean_or("output.compare_no_reversal", false);
  if (s.compare_no_reversal && !s.protocol.reverse) {
    throw ConfigError("'output.compare_no_reversal' needs protocol.reverse = true", doc.line_of("output.compare_no_reversal"));
  }
}

void read_sweep(const Document& doc, Scenario& s) {
  if (!doc.has_table("sweep")) return;
  SweepBlock sweep;
  sweep.ratios = doc.numbers("sweep.ratios");
  if (sweep.ratios.empty()) throw ConfigError("'sweep.ratios' is empty", doc.line_of("sweep.ratios"));
  for (double r : sweep.ratios) {
    if (!(r > 0.0)) throw ConfigError("'sweep.ratios' entries must be positive", doc.line_of("sweep.ratios"));
  }
  s.sweep = sweep;
}

void read_noise(const Document& doc, Scenario& s) {
  if (!doc.has_table("noise")) return;
  NoiseBlock noise;
  if (doc.has("noise.sigma_hz")) noise.sigma_hz = doc.numbers("noise.sigma_hz");
  for (double v : noise.sigma_hz) {
    if (!(v >= 0.0)) throw ConfigError("'noise.sigma_hz' entries must be >= 0", doc.line_of("noise.sigma_hz"));
  }
  if (doc.has("noise.cycles")) {
    for (double c : doc.numbers("noise.cycles")) {
      if (!(c >= 1.0) || c != std::floor(c)) {
        throw ConfigError("'noise.cycles' entries must be positive integers", doc.line_of("noise.cycles"));
      }
      noise.cycles.push_back(static_cast<int>(c));
    }
  } else {
    noise.cycles.push_back(s.protocol.cycles);
  }
  noise.samples = static_cast<int>(doc.integer_or("noise.samples", noise.samples));
  if (noise.samples < 1) throw ConfigError("'noise.samples' must be >= 1", doc.line_of("noise.samples"));
  noise.seed = doc.unsigned_or("noise.seed", noise.seed);
  noise.threshold = doc.boolean_or("noise.threshold", noise.threshold);
  noise.forward_threshold = doc.boolean_or("noise.forward_threshold", noise.forward_threshold);
  noise.cutoff = optional_positive(doc, "noise.cutoff").value_or(noise.cutoff);
  noise.relative_tolerance = optional_positive(doc, "noise.relative_tolerance").value_or(noise.relative_tolerance);
  noise.perturb_durations = doc.boolean_or("noise.perturb_durations", false);
  noise.dissipation = doc.boolean_or("noise.dissipation", false);
  if (s.count != 2) throw ConfigError("[noise] needs two particles");
  s.noise = noise;
}

void read_estimates(const Document& doc, Scenario& s) {
  if (doc.has_table("estimate.csl")) {
    CslBlock csl;
    csl.sigma_max = optional_positive(doc, "estimate.csl.sigma_max");
    csl.length = optional_positive(doc, "estimate.csl.length").value_or(csl.length);
    csl.reference_mass = optional_positive(doc, "estimate.csl.reference_mass").value_or(constants::carbon_atom_mass);
    csl.safety = optional_positive(doc, "estimate.csl.safety").value_or(csl.safety);
    csl.rate = optional_positive(doc, "estimate.csl.rate");
    if (!(s.radius > 0.0)) throw ConfigError("[estimate.csl] needs 'particle.radius'");
    if (!csl.sigma_max && s.protocol.cycles == 0) {
      throw ConfigError("[estimate.csl] needs 'sigma_max' or a squeezing protocol");
    }
    s.csl = csl;
  }
  if (doc.has_table("estimate.gas")) {
    GasBlock gas;
    gas.pressure = positive(doc, "estimate.gas.pressure");
    gas.temperature = positive(doc, "estimate.gas.temperature");
    gas.molecule_mass = optional_positive(doc, "estimate.gas.molecule_mass").value_or(constants::air_molecule_mass);
    if (!(s.radius > 0.0)) throw ConfigError("[estimate.gas] needs 'particle.radius'");
    s.gas = gas;
  }
}

}  // namespace

double Scenario::shifted(double omega) const {
  if (!local_shift) return omega;
  const double k = mass * omega * omega + bilinear.local_shift;
  if (!(k > 0.0)) throw ConfigError("the local spring shift makes the trap unstable");
  return std::sqrt(k / mass);
}

JumpSchedule Scenario::schedule() const {
  JumpSchedule out = protocol.reverse ? build_full(protocol, coupling, mass) : build_forward(protocol, coupling, mass);
  if (out.empty()) {
    // No cycles and no hold: a zero-length run at omega1.
    out.push_back({HamiltonianParams{std::vector<double>(count, protocol.omega1), mass, coupling}, 0.0});
  }
  return out;
}

JumpSchedule Scenario::no_reversal_schedule() const {
  ProtocolSpec forward = protocol;
  forward.reverse = false;
  forward.hold_after = 0.0;
  const double used = schedule_duration(build_forward(forward, coupling, mass));
  forward.hold_after = std::max(0.0, schedule_duration(schedule()) - used);
  return build_forward(forward, coupling, mass);
}

CovarianceMatrix Scenario::initial_state() const { return thermal_state(count, initial_nbar); }

Scenario load_scenario(const Document& doc) {
  Scenario s;
  try {
    s.name = doc.string_or("name", "scenario");
    doc.string_or("description", "");
    read_particle(doc, s);
    read_trap(doc, s);
    read_interaction(doc, s);
    read_protocol(doc, s);
    read_bath(doc, s);
    read_output(doc, s);
    read_sweep(doc, s);
    read_noise(doc, s);
    read_estimates(doc, s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const auto unused = doc.unused_keys();
  if (!unused.empty()) {
    throw ConfigError("unknown key '" + unused.front() + "'", doc.line_of(unused.front()));
  }
  s.config_hash = doc.hash();
  return s;
}

std::string preset_path(const std::string& name) {
  return (std::filesystem::path(CVDYN_PRESET_DIR) / (name + ".toml")).string();
}

Scenario load_scenario_file(const std::string& path_or_preset) {
  if (std::filesystem::exists(path_or_preset)) return load_scenario(Document::load(path_or_preset));
  const std::string preset = preset_path(path_or_preset);
  if (std::filesystem::exists(preset)) return load_scenario(Document::load(preset));
  throw ConfigError("no config file or preset named '" + path_or_preset + "'");
}

}  // namespace cvdyn
