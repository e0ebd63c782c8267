#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "isingtune/bqp.hpp"
#include "isingtune/rng.hpp"
#include "isingtune/samplers.hpp"

namespace isingtune {

/// The four integer knobs of the solver. num_run x num_group is the number
/// of independent annealing attempts; gs_level stretches the cooling
/// schedule (one temperature step every 1 + gs_level sweeps); gs_cutoff
/// restarts an attempt from a fresh random state after that many flip
/// proposals without improving the attempt's best combined energy
/// (0 disables restarts).
struct SolverParams {
  int num_run = 16;
  int num_group = 1;
  int gs_level = 5;
  int gs_cutoff = 8000;
};

inline constexpr int kNumRunMin = 1, kNumRunMax = 16;
inline constexpr int kNumGroupMin = 1, kNumGroupMax = 16;
inline constexpr int kGsLevelMin = 0, kGsLevelMax = 100;
inline constexpr int kGsCutoffMin = 0, kGsCutoffMax = 1000000;

inline void validate_solver_params(const SolverParams& p) {
  auto check = [](int v, int lo, int hi, const char* name) {
    if (v < lo || v > hi) {
      throw std::out_of_range(std::string(name) + "=" + std::to_string(v) +
                              " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }
  };
  check(p.num_run, kNumRunMin, kNumRunMax, "num_run");
  check(p.num_group, kNumGroupMin, kNumGroupMax, "num_group");
  check(p.gs_level, kGsLevelMin, kGsLevelMax, "gs_level");
  check(p.gs_cutoff, kGsCutoffMin, kGsCutoffMax, "gs_cutoff");
}

/// The search space of the four solver parameters, full machine ranges.
inline ParamSpace solver_param_space() {
  ParamSpace space;
  space.specs.emplace_back("num_run", kNumRunMin, kNumRunMax);
  space.specs.emplace_back("num_group", kNumGroupMin, kNumGroupMax);
  space.specs.emplace_back("gs_level", kGsLevelMin, kGsLevelMax);
  space.specs.emplace_back("gs_cutoff", kGsCutoffMin, kGsCutoffMax);
  return space;
}

inline SolverParams default_solver_params() { return SolverParams{}; }

/// Builds SolverParams from a parameter vector, matching entries by spec
/// name so the vector layout follows the space, not a fixed order.
inline SolverParams solver_params_from_vector(const ParamSpace& space,
                                              const ParamVector& values) {
  if (values.size() != space.specs.size()) {
    throw std::invalid_argument("parameter vector size mismatch");
  }
  SolverParams p;
  bool seen[4] = {false, false, false, false};
  for (std::size_t k = 0; k < space.specs.size(); ++k) {
    const std::string& name = space.specs[k].name;
    const int v = static_cast<int>(values[k]);
    if (name == "num_run") {
      p.num_run = v;
      seen[0] = true;
    } else if (name == "num_group") {
      p.num_group = v;
      seen[1] = true;
    } else if (name == "gs_level") {
      p.gs_level = v;
      seen[2] = true;
    } else if (name == "gs_cutoff") {
      p.gs_cutoff = v;
      seen[3] = true;
    } else {
      throw std::invalid_argument("unknown solver parameter '" + name + "'");
    }
  }
  if (!(seen[0] && seen[1] && seen[2] && seen[3])) {
    throw std::invalid_argument("parameter vector missing a solver knob");
  }
  return p;
}

enum class BudgetMode { kLogical, kWallClock };

/// Run budget. In logical mode the limit counts logical time units: one
/// unit is one full sweep of single-bit-flip proposals over all variables,
/// and the scheduled attempts share the budget round-robin, one sweep per
/// attempt per turn. Logical mode is deterministic. Wall-clock mode
/// interprets the limit as seconds and exists for realism demos.
struct SolveBudget {
  double limit = 0;
  BudgetMode mode = BudgetMode::kLogical;
};

struct SolveReport {
  Energy best_energy = std::numeric_limits<Energy>::max();
  double time_found = 0.0;  // logical units (or seconds in wall mode)
  Assignment best_assignment;
  bool feasible_found = false;
  double budget_used = 0.0;
  int attempts = 0;  // chains in the round-robin schedule
  std::int64_t sweeps_run = 0;
};

namespace annealer_detail {

// Union sparsity of objective and penalty as CSR; each off-diagonal term
// appears in both endpoint rows. Diagonals kept separate.
struct Adjacency {
  std::vector<std::size_t> row_start;
  std::vector<VarIndex> neighbor;
  std::vector<Coeff> c_obj;
  std::vector<Coeff> c_pen;
  std::vector<Coeff> diag_obj;
  std::vector<Coeff> diag_pen;
};

inline Adjacency build_adjacency(const Bqp& bqp) {
  const std::size_t m = static_cast<std::size_t>(bqp.num_vars);
  Adjacency adj;
  adj.diag_obj.assign(m, 0);
  adj.diag_pen.assign(m, 0);

  std::vector<std::size_t> degree(m, 0);
  auto count = [&](const SparseQubo& q) {
    for (const QuboTerm& t : q.terms()) {
      if (t.i == t.j) continue;
      ++degree[static_cast<std::size_t>(t.i)];
      ++degree[static_cast<std::size_t>(t.j)];
    }
  };
  count(bqp.q_obj);
  count(bqp.q_pen);

  adj.row_start.assign(m + 1, 0);
  for (std::size_t v = 0; v < m; ++v) {
    adj.row_start[v + 1] = adj.row_start[v] + degree[v];
  }
  const std::size_t entries = adj.row_start[m];
  adj.neighbor.assign(entries, 0);
  adj.c_obj.assign(entries, 0);
  adj.c_pen.assign(entries, 0);

  std::vector<std::size_t> cursor(adj.row_start.begin(),
                                  adj.row_start.end() - 1);
  auto fill = [&](const SparseQubo& q, bool is_obj) {
    for (const QuboTerm& t : q.terms()) {
      const std::size_t i = static_cast<std::size_t>(t.i);
      const std::size_t j = static_cast<std::size_t>(t.j);
      if (i == j) {
        (is_obj ? adj.diag_obj : adj.diag_pen)[i] += t.c;
        continue;
      }
      const std::size_t a = cursor[i]++;
      const std::size_t b = cursor[j]++;
      adj.neighbor[a] = t.j;
      adj.neighbor[b] = t.i;
      (is_obj ? adj.c_obj : adj.c_pen)[a] = t.c;
      (is_obj ? adj.c_obj : adj.c_pen)[b] = t.c;
    }
  };
  fill(bqp.q_obj, true);
  fill(bqp.q_pen, false);
  return adj;
}

// 1 + the largest absolute row sum of the objective: flipping one bit can
// never buy more objective than one unit of penalty costs.
inline Energy penalty_weight(const Adjacency& adj) {
  Energy worst = 0;
  const std::size_t m = adj.diag_obj.size();
  for (std::size_t v = 0; v < m; ++v) {
    Energy row = std::abs(adj.diag_obj[v]);
    for (std::size_t e = adj.row_start[v]; e < adj.row_start[v + 1]; ++e) {
      row += std::abs(adj.c_obj[e]);
    }
    worst = std::max(worst, row);
  }
  return 1 + worst;
}

struct AttemptState {
  std::vector<std::uint8_t> bits;
  std::vector<Coeff> h_obj;  // local field: diag + sum of couplings to set bits
  std::vector<Coeff> h_pen;
  Energy e_obj = 0;
  Energy e_pen = 0;  // includes the penalty constant offset
  Rng rng{0};
  std::int64_t epoch = 0;           // index into the doubling anneal ladder
  std::int64_t sweep_in_epoch = 0;  // sweeps completed in the current epoch
  Energy best_combined = 0;  // best since the last (re)start
  std::int64_t stall = 0;    // proposals since best_combined improved
  bool initialized = false;
};

inline void randomize(AttemptState& at, const Bqp& bqp, const Adjacency& adj) {
  const std::size_t m = static_cast<std::size_t>(bqp.num_vars);
  at.bits.resize(m);
  for (std::size_t v = 0; v < m; ++v) {
    at.bits[v] = static_cast<std::uint8_t>(at.rng.next_u64() & 1);
  }
  at.sweep_in_epoch = 0;
  at.h_obj.assign(m, 0);
  at.h_pen.assign(m, 0);
  at.e_obj = 0;
  at.e_pen = bqp.q_pen.offset();
  for (std::size_t v = 0; v < m; ++v) {
    at.h_obj[v] = adj.diag_obj[v];
    at.h_pen[v] = adj.diag_pen[v];
    for (std::size_t e = adj.row_start[v]; e < adj.row_start[v + 1]; ++e) {
      if (at.bits[static_cast<std::size_t>(adj.neighbor[e])]) {
        at.h_obj[v] += adj.c_obj[e];
        at.h_pen[v] += adj.c_pen[e];
      }
    }
    if (at.bits[v]) {
      at.e_obj += adj.diag_obj[v];
      at.e_pen += adj.diag_pen[v];
    }
  }
  // Add each active pair once (term list is canonical upper-triangular).
  for (const QuboTerm& t : bqp.q_obj.terms()) {
    if (t.i != t.j && at.bits[static_cast<std::size_t>(t.i)] &&
        at.bits[static_cast<std::size_t>(t.j)]) {
      at.e_obj += t.c;
    }
  }
  for (const QuboTerm& t : bqp.q_pen.terms()) {
    if (t.i != t.j && at.bits[static_cast<std::size_t>(t.i)] &&
        at.bits[static_cast<std::size_t>(t.j)]) {
      at.e_pen += t.c;
    }
  }
  at.stall = 0;
}

inline bool inequalities_hold(const Bqp& bqp,
                              const std::vector<std::uint8_t>& bits) {
  for (const LinearInequality& ineq : bqp.inequalities) {
    Coeff lhs = 0;
    for (std::size_t v = 0; v < ineq.weights.size(); ++v) {
      if (bits[v]) lhs += ineq.weights[v];
    }
    if (lhs > ineq.bound) return false;
  }
  return true;
}

}  // namespace annealer_detail

/// Restart-based simulated annealing on the combined energy
/// objective + A_pen * penalty, A_pen = 1 + max absolute objective row sum.
/// num_run x num_group attempts share the budget round-robin, one sweep per
/// attempt per scheduling turn. Each attempt runs a ladder of annealing
/// epochs: every epoch is a full geometric schedule from A_pen down to 1,
/// each temperature plateau held for 1 + gs_level sweeps, and successive
/// epochs double their plateau count and start from a fresh random state.
/// Short early epochs reach feasible assignments quickly; longer epochs use
/// extra budget for deeper anneals, and the trajectory never depends on the
/// budget, so extending the budget replays the same prefix. The best
/// assignment with zero penalty (and satisfied inequalities) is reported
/// together with the logical time at which it was first reached.
/// Deterministic in logical mode: identical (problem, params, budget, seed)
/// give identical reports.
inline SolveReport solve(const Bqp& bqp, const SolverParams& params,
                         const SolveBudget& budget, std::uint64_t seed) {
  using namespace annealer_detail;

  validate_solver_params(params);
  if (bqp.num_vars <= 0) {
    throw std::invalid_argument("solve: problem has no variables");
  }
  const bool logical = budget.mode == BudgetMode::kLogical;
  const std::int64_t total_turns =
      logical ? static_cast<std::int64_t>(budget.limit) : 0;
  if (logical && total_turns < 1) {
    throw std::invalid_argument("solve: logical budget must be at least 1");
  }
  if (!logical && !(budget.limit > 0)) {
    throw std::invalid_argument("solve: wall-clock budget must be positive");
  }

  const Adjacency adj = build_adjacency(bqp);
  const Energy a_pen = penalty_weight(adj);
  const std::size_t m = static_cast<std::size_t>(bqp.num_vars);
  const int num_attempts = params.num_run * params.num_group;
  const int sweeps_per_step = 1 + params.gs_level;
  const double t_hot = static_cast<double>(a_pen);
  constexpr double kTCold = 1.0;
  constexpr std::int64_t kFirstEpochPlateaus = 8;
  constexpr std::int64_t kMinLaneSweeps = 8;

  // In logical mode only as many scheduling lanes run as the budget can
  // feed with a useful number of sweeps; surplus attempts would receive
  // sub-anneal slivers and return garbage. The requested attempt count is
  // still reported.
  const std::int64_t lanes =
      logical ? std::clamp<std::int64_t>(total_turns / kMinLaneSweeps, 1,
                                         num_attempts)
              : num_attempts;

  auto epoch_plateaus = [](std::int64_t epoch) {
    return kFirstEpochPlateaus << std::min<std::int64_t>(epoch, 40);
  };
  // Epoch 0 is a fixed-rate bootstrap quench that reaches the frozen regime
  // within a few sweeps regardless of gs_level; the longer epochs hold each
  // plateau 1 + gs_level sweeps. Plateau k of an epoch with P plateaus runs
  // at t_hot^(1 - (k+1)/P) * t_cold^((k+1)/P), so the last plateau sits at
  // T_cold even for a single-plateau epoch.
  auto temperature = [&](const AttemptState& at) {
    if (t_hot <= kTCold) return kTCold;
    const double plateaus = static_cast<double>(epoch_plateaus(at.epoch));
    const std::int64_t hold = at.epoch == 0 ? 1 : sweeps_per_step;
    const double step =
        static_cast<double>(at.sweep_in_epoch / hold) + 1.0;
    return std::max(kTCold,
                    t_hot * std::pow(kTCold / t_hot, step / plateaus));
  };
  auto epoch_sweeps = [&](std::int64_t epoch) {
    return epoch_plateaus(epoch) * (epoch == 0 ? 1 : sweeps_per_step);
  };

  std::vector<AttemptState> attempts(static_cast<std::size_t>(lanes));

  SolveReport report;
  report.attempts = num_attempts;

  const auto wall_start = std::chrono::steady_clock::now();
  auto elapsed_seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         wall_start)
        .count();
  };

  auto consider_best = [&](const AttemptState& at, double now) {
    if (at.e_pen != 0) return;
    if (at.e_obj >= report.best_energy && report.feasible_found) return;
    if (!inequalities_hold(bqp, at.bits)) return;
    report.best_energy = at.e_obj;
    report.time_found = now;
    report.best_assignment.bits = at.bits;
    report.feasible_found = true;
  };

  for (std::int64_t turn = 0;; ++turn) {
    if (logical) {
      if (turn >= total_turns) break;
    } else if (elapsed_seconds() >= budget.limit) {
      break;
    }

    AttemptState& at = attempts[static_cast<std::size_t>(turn % lanes)];
    const double turn_time =
        logical ? static_cast<double>(turn) : elapsed_seconds();
    if (!at.initialized) {
      at.rng =
          Rng(Rng::mix(seed, static_cast<std::uint64_t>(turn % lanes)));
      randomize(at, bqp, adj);
      at.best_combined = at.e_obj + a_pen * at.e_pen;
      at.initialized = true;
      consider_best(at, turn_time);
    } else if (at.sweep_in_epoch >= epoch_sweeps(at.epoch)) {
      // Epoch complete: restart from a fresh state with a longer schedule.
      ++at.epoch;
      randomize(at, bqp, adj);
      at.best_combined = at.e_obj + a_pen * at.e_pen;
      consider_best(at, turn_time);
    }

    double temp = temperature(at);
    for (std::size_t v = 0; v < m; ++v) {
      const Coeff sign = at.bits[v] ? -1 : 1;
      const Energy d_obj = sign * at.h_obj[v];
      const Energy d_pen = sign * at.h_pen[v];
      const Energy d_comb = d_obj + a_pen * d_pen;
      const double u = at.rng.uniform_double();
      ++at.stall;
      const bool accept =
          d_comb <= 0 ||
          (static_cast<double>(d_comb) <= 44.0 * temp &&
           u < std::exp(-static_cast<double>(d_comb) / temp));
      if (accept) {
        at.bits[v] ^= 1;
        at.e_obj += d_obj;
        at.e_pen += d_pen;
        for (std::size_t e = adj.row_start[v]; e < adj.row_start[v + 1];
             ++e) {
          const std::size_t u_idx =
              static_cast<std::size_t>(adj.neighbor[e]);
          at.h_obj[u_idx] += sign * adj.c_obj[e];
          at.h_pen[u_idx] += sign * adj.c_pen[e];
        }
        const Energy combined = at.e_obj + a_pen * at.e_pen;
        if (combined < at.best_combined) {
          at.best_combined = combined;
          at.stall = 0;
        }
        if (at.e_pen == 0) {
          const double now =
              logical ? static_cast<double>(turn) +
                            static_cast<double>(v + 1) /
                                static_cast<double>(m)
                      : elapsed_seconds();
          consider_best(at, now);
        }
      }
      if (params.gs_cutoff > 0 && at.stall >= params.gs_cutoff) {
        // Converged by the cutoff's measure: restart the whole ladder.
        at.epoch = 0;
        randomize(at, bqp, adj);
        at.best_combined = at.e_obj + a_pen * at.e_pen;
        const double now =
            logical ? static_cast<double>(turn) +
                          static_cast<double>(v + 1) / static_cast<double>(m)
                    : elapsed_seconds();
        consider_best(at, now);
        temp = temperature(at);
      }
    }
    ++at.sweep_in_epoch;
    ++report.sweeps_run;
  }

  report.budget_used =
      logical ? static_cast<double>(total_turns) : elapsed_seconds();
  return report;
}

}  // namespace isingtune
