// cvdyn: scenario runner for the two-resonator squeezing simulator.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"

#include "cvdyn/commands.hpp"
#include "cvdyn/errors.hpp"
#include "cvdyn/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitValidation = 4;

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (flag < 0) throw cvdyn::ConfigError("--threads must be >= 0");
  if (const char* env = std::getenv("CVDYN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0) throw cvdyn::ConfigError("CVDYN_THREADS must be a non-negative integer");
    return static_cast<int>(n);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian dynamics of two coupled resonators under frequency-jump squeezing"};
  app.set_version_flag("--version", CVDYN_VERSION);
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  int threads = 0;
  double tolerance_scale = 1.0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "scenario file, or the name of a bundled preset");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads, 0 = auto (falls back to CVDYN_THREADS)");
  };

  auto* simulate = app.add_subcommand("simulate", "trajectory CSV and summary JSON");
  add_common(simulate, true);
  auto* sweep = app.add_subcommand("sweep", "end-of-protocol values over the omega2/omega1 grid");
  add_common(sweep, true);
  auto* noise = app.add_subcommand("noise", "frequency-noise study and destruction thresholds");
  add_common(noise, true);
  noise->add_option("--seed", seed, "overrides noise.seed");
  noise->add_option("--samples", samples, "overrides noise.samples")->check(CLI::PositiveNumber);
  auto* estimate = app.add_subcommand("estimate", "CSL bound, collision rate, couplings, trap frequencies");
  add_common(estimate, true);
  auto* validate = app.add_subcommand("validate", "oracle cross-checks");
  validate->add_option("--threads", threads, "worker threads, 0 = auto");
  validate->add_option("--seed", seed, "seed of the randomized checks");
  validate->add_option("--tolerance-scale", tolerance_scale, "multiplies every tolerance (testing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    cvdyn::RunOptions options;
    options.out_dir = out_dir;
    options.seed = seed;
    options.samples = samples;
    options.threads = resolve_threads(threads);
    if (options.threads > 0) omp_set_num_threads(options.threads);

    if (validate->parsed()) {
      cvdyn::ValidateOptions v;
      v.tolerance_scale = tolerance_scale;
      v.threads = options.threads;
      if (seed) v.seed = *seed;
      return cvdyn::cmd_validate(v, std::cout) ? 0 : kExitValidation;
    }

    const cvdyn::Scenario scenario = cvdyn::load_scenario_file(config);
    if (simulate->parsed()) cvdyn::cmd_simulate(scenario, options, std::cout);
    if (sweep->parsed()) cvdyn::cmd_sweep(scenario, options, std::cout);
    if (noise->parsed()) cvdyn::cmd_noise(scenario, options, std::cout);
    if (estimate->parsed()) cvdyn::cmd_estimate(scenario, options, std::cout);
    return 0;
  } catch (const cvdyn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cvdyn::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cvdyn::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const cvdyn::InvalidState& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const cvdyn::InvalidScenario& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
