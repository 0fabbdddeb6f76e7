#include "cvdyn/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include <omp.h>

#include "cvdyn/constants.hpp"
#include "cvdyn/errors.hpp"
#include "cvdyn/measures.hpp"

namespace cvdyn {

namespace {

constexpr int kJackknifeGroups = 10;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t draw_seed(std::uint64_t seed, std::uint64_t draw_index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(draw_index + 0x632be59bd9b4e019ULL));
}

struct DrawResult {
  Matrix final_state;
  int redraws = 0;
};

DrawResult run_draw(const NoiseProblem& problem, const JumpSchedule& nominal, const NoiseSpec& noise,
                    std::uint64_t index) {
  NoisySchedule noisy = sample_noisy_schedule(nominal, noise, index);
  const CovarianceMatrix v = propagate(vacuum_state(problem.protocol.modes), noisy.schedule, problem.bath,
                                       problem.units());
  return {v.matrix(), noisy.redraws};
}

double en_of_mean(const Matrix& sum, int count) {
  return log_negativity(CovarianceMatrix::symmetrized(sum / static_cast<double>(count)));
}

// Aggregation in draw order so the serial and parallel paths agree bit for bit.
NoiseAverage aggregate(const std::vector<DrawResult>& draws) {
  const int n = static_cast<int>(draws.size());
  const int dim = static_cast<int>(draws.front().final_state.rows());
  const int groups = std::min(kJackknifeGroups, n);
  std::vector<Matrix> group_sum(groups, Matrix::Zero(dim, dim));
  std::vector<int> group_count(groups, 0);
  long redraws = 0;
  for (int i = 0; i < n; ++i) {
    const int g = static_cast<int>(static_cast<long>(i) * groups / n);
    group_sum[g] += draws[i].final_state;
    ++group_count[g];
    redraws += draws[i].redraws;
  }
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& s : group_sum) total += s;

  NoiseAverage out{CovarianceMatrix::symmetrized(total / static_cast<double>(n)), 0.0, 0.0, n, redraws};
  out.log_negativity = log_negativity(out.covariance);
  if (groups >= 2) {
    std::vector<double> leave_out(groups);
    double mean = 0.0;
    for (int g = 0; g < groups; ++g) {
      leave_out[g] = en_of_mean(total - group_sum[g], n - group_count[g]);
      mean += leave_out[g] / groups;
    }
    double ss = 0.0;
    for (double value : leave_out) ss += (value - mean) * (value - mean);
    out.standard_error = std::sqrt((groups - 1.0) / groups * ss);
  }
  return out;
}

// Every draw is the nominal run when sigma = 0; skip the averaging so the
// result is the noiseless state exactly.
NoiseAverage noiseless_average(const NoiseProblem& problem, const JumpSchedule& nominal, const NoiseSpec& noise) {
  const DrawResult d = run_draw(problem, nominal, noise, 0);
  NoiseAverage out{CovarianceMatrix(d.final_state), 0.0, 0.0, noise.samples, 0};
  out.log_negativity = log_negativity(out.covariance);
  return out;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(sigma_omega >= 0.0) || !std::isfinite(sigma_omega)) throw InvalidArgument("NoiseSpec: sigma_omega must be >= 0");
  if (samples < 1) throw InvalidArgument("NoiseSpec: samples must be >= 1");
}

NoisySchedule sample_noisy_schedule(const JumpSchedule& schedule, const NoiseSpec& noise,
                                    std::uint64_t draw_index) {
  noise.validate();
  NoisySchedule out{schedule, 0};
  if (noise.sigma_omega == 0.0) return out;
  std::mt19937_64 engine(draw_seed(noise.seed, draw_index));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& segment : out.schedule) {
    const double reference = segment.params.omega.front();
    for (double& omega : segment.params.omega) {
      const double nominal = omega;
      double drawn = nominal + noise.sigma_omega * normal(engine);
      while (!(drawn > 0.0)) {
        ++out.redraws;
        drawn = nominal + noise.sigma_omega * normal(engine);
      }
      omega = drawn;
    }
    if (noise.perturb_durations) {
      const double factor = 1.0 + noise.sigma_omega / reference * normal(engine);
      segment.duration *= std::max(factor, 0.0);
    }
  }
  return out;
}

JumpSchedule NoiseProblem::nominal_schedule() const {
  ProtocolSpec spec = protocol;
  if (forward_only) {
    spec.reverse = false;
    spec.hold_after = 0.0;
    return build_forward(spec, coupling, mass);
  }
  spec.reverse = true;
  return build_full(spec, coupling, mass);
}

NoiseAverage averaged_covariance(const NoiseProblem& problem, const NoiseSpec& noise, int threads) {
  noise.validate();
  const JumpSchedule nominal = problem.nominal_schedule();
  if (noise.sigma_omega == 0.0) return noiseless_average(problem, nominal, noise);
  std::vector<DrawResult> draws(static_cast<std::size_t>(noise.samples));
  std::exception_ptr failure;
  const int team = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 8) num_threads(team)
  for (int i = 0; i < noise.samples; ++i) {
    try {
      draws[i] = run_draw(problem, nominal, noise, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(cvdyn_noise_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(draws);
}

NoiseAverage averaged_covariance_reference(const NoiseProblem& problem, const NoiseSpec& noise) {
  noise.validate();
  const JumpSchedule nominal = problem.nominal_schedule();
  if (noise.sigma_omega == 0.0) return noiseless_average(problem, nominal, noise);
  std::vector<DrawResult> draws;
  draws.reserve(static_cast<std::size_t>(noise.samples));
  for (int i = 0; i < noise.samples; ++i) {
    draws.push_back(run_draw(problem, nominal, noise, static_cast<std::uint64_t>(i)));
  }
  return aggregate(draws);
}

double sigma_star_estimate(const ProtocolSpec& spec) {
  // For omega2 > omega1 the momentum is squeezed instead; only |r| matters.
  const double r = std::abs(predicted_squeezing(spec));
  return 4.0 * spec.omega1 / constants::pi * std::exp(-2.0 * r);
}

Threshold threshold_sigma_star(const NoiseProblem& problem, const NoiseSpec& base, const ThresholdOptions& options) {
  base.validate();
  Threshold out;
  out.samples = base.samples;
  auto entanglement = [&](double sigma) {
    NoiseSpec noise = base;
    noise.sigma_omega = sigma;
    if (sigma == 0.0) noise.samples = 1;
    ++out.evaluations;
    return averaged_covariance(problem, noise, options.threads).log_negativity;
  };

  out.noiseless_log_negativity = entanglement(0.0);
  if (!(out.noiseless_log_negativity > options.cutoff)) {
    throw InvalidScenario("threshold_sigma_star: the noiseless protocol is not entangled");
  }

  constexpr int kMaxExpansions = 60;
  double lo = 0.0;
  double hi = std::max(sigma_star_estimate(problem.protocol), 1e-300);
  bool bracketed = false;
  if (entanglement(hi) > options.cutoff) {
    lo = hi;
    for (int k = 0; k < kMaxExpansions && !bracketed; ++k) {
      hi = lo * 4.0;
      if (entanglement(hi) > options.cutoff) {
        lo = hi;
      } else {
        bracketed = true;
      }
    }
  } else {
    for (int k = 0; k < kMaxExpansions && !bracketed; ++k) {
      lo = hi / 4.0;
      if (entanglement(lo) > options.cutoff) {
        bracketed = true;
      } else {
        hi = lo;
      }
    }
  }
  if (!bracketed) throw NumericError("threshold_sigma_star: could not bracket the threshold");
  while (hi / lo > 1.0 + options.relative_tolerance) {
    const double mid = std::sqrt(lo * hi);
    if (entanglement(mid) > options.cutoff) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.sigma_star = lo;
  out.upper = hi;
  return out;
}

}  // namespace cvdyn
