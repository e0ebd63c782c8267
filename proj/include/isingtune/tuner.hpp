#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "isingtune/annealer.hpp"
#include "isingtune/bqp.hpp"
#include "isingtune/rng.hpp"
#include "isingtune/samplers.hpp"

namespace isingtune {

/// Ordering sentinel for trials whose solver run found nothing feasible:
/// worse than every feasible objective.
inline constexpr double kInfeasibleObjective =
    std::numeric_limits<double>::infinity();

/// Trial objective t * E_p + T_{E_p}. With t at least the budget limit this
/// orders trials by energy first and, among equal energies, prefers the one
/// whose solution was found earlier.
inline double compute_objective(Energy e_p, double t_ep, double t_coeff) {
  return t_coeff * static_cast<double>(e_p) + t_ep;
}

/// Relative energy gap (e_p - e_min) / |e_min|.
inline double compute_gap(double e_p, double e_min) {
  if (e_min == 0.0) {
    throw std::domain_error("compute_gap: undefined for e_min = 0");
  }
  return (e_p - e_min) / std::abs(e_min);
}

inline double compute_gap(Energy e_p, Energy e_min) {
  return compute_gap(static_cast<double>(e_p), static_cast<double>(e_min));
}

/// Shrinks a parameter's active range to 1/gamma of its width, centered on
/// the best known value, clipped to the hard limits. Integer bounds are the
/// nearest integers to x_b +/- r_new/2 (half away from zero), which never
/// excludes x_b and keeps the width within ceil(r_old/gamma) + 1.
inline ParamSpec narrow_range(const ParamSpec& spec, ParamValue x_b,
                              double gamma) {
  if (gamma <= 1.0) {
    throw std::invalid_argument("narrow_range: gamma must exceed 1");
  }
  if (x_b < spec.allowed_min || x_b > spec.allowed_max) {
    throw std::invalid_argument("narrow_range: center outside allowed range");
  }
  const double r_new =
      static_cast<double>(spec.current_max - spec.current_min) / gamma;
  ParamSpec out = spec;
  out.current_min =
      std::max(spec.allowed_min,
               static_cast<ParamValue>(
                   std::llround(static_cast<double>(x_b) - r_new / 2.0)));
  out.current_max =
      std::min(spec.allowed_max,
               static_cast<ParamValue>(
                   std::llround(static_cast<double>(x_b) + r_new / 2.0)));
  return out;
}

enum class SamplerKind { kRandom, kTpe };
enum class Termination { kCompleted, kConverged };

struct TunerConfig {
  int n = 100;           // trial limit
  int m = 15;            // warm-up length before range narrowing
  int l = 15;            // consecutive non-improving trials before stopping
  double gamma = 4.0;    // range-narrowing divisor
  double t_coeff = 0.0;  // objective coefficient; 0 means "use budget limit"
  SolveBudget budget;
  SamplerKind sampler = SamplerKind::kTpe;
  bool fast_convergence = false;
  ParamSpace space = solver_param_space();

  double effective_t_coeff() const {
    return t_coeff != 0.0 ? t_coeff : budget.limit;
  }

  void validate() const {
    space.validate();
    if (n < 1) throw std::invalid_argument("tuner: n must be at least 1");
    if (fast_convergence) {
      if (m < 1 || m >= n) {
        throw std::invalid_argument(
            "tuner: warm-up length m must satisfy 1 <= m < n");
      }
      if (l < 1) throw std::invalid_argument("tuner: l must be at least 1");
      if (gamma <= 1.0) {
        throw std::invalid_argument("tuner: gamma must exceed 1");
      }
    }
  }
};

struct Trial {
  int index = 0;  // 1-based
  ParamVector params;
  std::optional<Energy> e_p;  // empty when no feasible solution was found
  double t_ep = 0.0;
  double objective = kInfeasibleObjective;
};

struct Study {
  std::vector<Trial> trials;
  std::optional<Energy> best_emin;
  ParamVector best_params;
  int best_trial_index = 0;      // 1-based trial that achieved best_emin
  std::uint64_t best_solver_seed = 0;
  double best_t_ep = 0.0;
  ParamSpace space;              // final state (narrowed when applicable)
  TunerConfig config;
  std::uint64_t rng_seed = 0;
  Termination termination = Termination::kCompleted;
};

/// Solver hook, injectable so studies can run against stubs in tests.
using TrialSolver = std::function<SolveReport(
    const Bqp&, const ParamVector&, const SolveBudget&, std::uint64_t seed)>;

inline TrialSolver annealer_trial_solver(const ParamSpace& space) {
  return [space](const Bqp& bqp, const ParamVector& values,
                 const SolveBudget& budget, std::uint64_t seed) {
    return solve(bqp, solver_params_from_vector(space, values), budget, seed);
  };
}

/// Runs one tuning study: suggest, solve, score, record, up to n trials.
/// With fast convergence enabled, every parameter range is narrowed once
/// after exactly m trials (centered on the best value so far), and the
/// study stops early once l consecutive post-warm-up trials pass without a
/// strict E_min improvement. on_trial, when set, fires after each trial is
/// recorded (the harness uses it to flush partial results).
inline Study run_study(const Bqp& bqp, const TunerConfig& config,
                       std::uint64_t seed, TrialSolver solver = nullptr,
                       const std::function<void(const Trial&)>& on_trial =
                           nullptr) {
  config.validate();
  if (!solver) solver = annealer_trial_solver(config.space);

  Study study;
  study.config = config;
  study.space = config.space;
  study.rng_seed = seed;

  Rng rng(seed);
  TpeState tpe;
  const double t_coeff = config.effective_t_coeff();
  int no_improve = 0;

  for (int trial_no = 1; trial_no <= config.n; ++trial_no) {
    ParamVector params;
    if (config.sampler == SamplerKind::kTpe) {
      params = suggest_tpe(study.space, tpe, rng);
    } else {
      params = suggest_random(study.space, rng);
    }

    // Common random numbers: every trial in a study reuses the study seed,
    // so equal parameter vectors give equal outcomes and the sampler
    // optimizes a reproducible response surface. Replication across seeds
    // comes from running several studies.
    const std::uint64_t solver_seed = seed;
    const SolveReport report = solver(bqp, params, config.budget, solver_seed);

    Trial trial;
    trial.index = trial_no;
    trial.params = params;
    bool improved = false;
    if (report.feasible_found) {
      trial.e_p = report.best_energy;
      trial.t_ep = report.time_found;
      trial.objective =
          compute_objective(report.best_energy, report.time_found, t_coeff);
      if (!study.best_emin || report.best_energy < *study.best_emin) {
        study.best_emin = report.best_energy;
        study.best_params = params;
        study.best_trial_index = trial_no;
        study.best_solver_seed = solver_seed;
        study.best_t_ep = report.time_found;
        improved = true;
      }
    }
    study.trials.push_back(trial);
    tpe.observations.emplace_back(params, trial.objective);
    if (on_trial) on_trial(study.trials.back());

    if (!config.fast_convergence) continue;

    if (trial_no > config.m) {
      if (improved) {
        no_improve = 0;
      } else if (++no_improve >= config.l) {
        study.termination = Termination::kConverged;
        break;
      }
    }
    if (trial_no == config.m && study.best_emin) {
      for (std::size_t k = 0; k < study.space.specs.size(); ++k) {
        study.space.specs[k] = narrow_range(
            study.space.specs[k], study.best_params[k], config.gamma);
      }
    }
  }
  return study;
}

}  // namespace isingtune
