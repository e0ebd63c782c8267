// Command-line front end: tune (run a multi-seed study), compare (pairwise
// report comparison), encode (problem statistics), solve (single solver
// call with explicit parameters).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isingtune/harness.hpp"

namespace {

using namespace isingtune;

ProblemType parse_type(const std::string& value) {
  if (value == "tsp") return ProblemType::kTsp;
  if (value == "qap") return ProblemType::kQap;
  throw CLI::ValidationError("--type", "must be tsp or qap");
}

BudgetMode parse_mode(const std::string& value) {
  if (value == "logical") return BudgetMode::kLogical;
  if (value == "wall" || value == "wall-clock") return BudgetMode::kWallClock;
  throw CLI::ValidationError("--budget-mode", "must be logical or wall");
}

int run_tune(const std::string& config_path, CLI::App* cmd,
             const std::string& problem, const std::string& type_name,
             int n, int m, int l, double gamma, double t_coeff,
             const std::string& sampler, bool fast_convergence,
             double budget_limit, const std::string& budget_mode,
             const std::string& seeds, const std::string& output, int threads,
             const std::string& label) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) {
      std::cerr << "error: cannot open config file '" << config_path << "'\n";
      return 1;
    }
    config = parse_experiment_config(file, config_path);
  }

  const auto given = [&](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (given("--problem")) config.problem_path = problem;
  if (given("--type")) config.problem_type = parse_type(type_name);
  if (given("--n")) config.tuner.n = n;
  if (given("--m")) config.tuner.m = m;
  if (given("--l")) config.tuner.l = l;
  if (given("--gamma")) config.tuner.gamma = gamma;
  if (given("--t-coeff")) config.tuner.t_coeff = t_coeff;
  if (given("--sampler")) {
    config.tuner.sampler =
        sampler == "random" ? SamplerKind::kRandom : SamplerKind::kTpe;
  }
  if (given("--fast-convergence")) {
    config.tuner.fast_convergence = fast_convergence;
  }
  if (given("--budget")) config.tuner.budget.limit = budget_limit;
  if (given("--budget-mode")) config.tuner.budget.mode = parse_mode(budget_mode);
  if (given("--seeds")) config.seeds = harness_detail::parse_seed_list(seeds);
  if (given("--output")) config.output_dir = output;
  if (given("--threads")) config.threads = threads;
  if (given("--label")) config.label = label;

  const ExperimentReport report = run_experiment(config);
  std::cout << "label: " << config.effective_label() << "\n";
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const Study& study = report.studies[s];
    std::cout << "seed " << config.seeds[s] << ": " << study.trials.size()
              << " trials, "
              << (study.termination == Termination::kConverged ? "converged"
                                                               : "completed");
    if (study.best_emin) {
      std::cout << ", best E = " << *study.best_emin;
    } else {
      std::cout << ", no feasible solution";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << report.trials_csv.string() << ", "
            << report.curve_csv.string() << ", "
            << report.summary_json.string() << "\n";
  return 0;
}

int run_compare(const std::vector<std::string>& dirs,
                const std::string& output) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const std::vector<ComparisonRow> rows = compare_methods(paths);
  write_comparison_csv(rows, std::cout);
  if (!output.empty()) {
    std::ofstream file(output);
    write_comparison_csv(rows, file);
    std::cout << "wrote " << output << "\n";
  }
  return 0;
}

int run_encode(const std::string& problem, const std::string& type_name,
               bool as_json) {
  const LoadedProblem loaded = load_problem(problem, parse_type(type_name));
  const Bqp& bqp = loaded.bqp;
  if (as_json) {
    nlohmann::json stats;
    stats["file"] = loaded.path;
    stats["type"] = loaded.type_name;
    stats["size"] = loaded.instance_size;
    stats["num_vars"] = bqp.num_vars;
    stats["objective_terms"] = bqp.q_obj.terms().size();
    stats["penalty_terms"] = bqp.q_pen.terms().size();
    stats["penalty_offset"] = bqp.q_pen.offset();
    stats["inequalities"] = bqp.inequalities.size();
    std::cout << stats.dump(2) << "\n";
  } else {
    std::cout << "file:            " << loaded.path << "\n"
              << "type:            " << loaded.type_name << "\n"
              << "instance size:   " << loaded.instance_size << "\n"
              << "variables:       " << bqp.num_vars << "\n"
              << "objective terms: " << bqp.q_obj.terms().size() << "\n"
              << "penalty terms:   " << bqp.q_pen.terms().size() << "\n"
              << "penalty offset:  " << bqp.q_pen.offset() << "\n"
              << "inequalities:    " << bqp.inequalities.size() << "\n";
  }
  return 0;
}

int run_solve(const std::string& problem, const std::string& type_name,
              const SolverParams& params, double budget_limit,
              const std::string& budget_mode, std::uint64_t seed) {
  const LoadedProblem loaded = load_problem(problem, parse_type(type_name));
  SolveBudget budget;
  budget.limit = budget_limit;
  budget.mode = parse_mode(budget_mode);
  const SolveReport report = solve(loaded.bqp, params, budget, seed);

  std::cout << "attempts:    " << report.attempts << "\n"
            << "sweeps run:  " << report.sweeps_run << "\n"
            << "budget used: " << report.budget_used << "\n";
  if (!report.feasible_found) {
    std::cout << "no feasible solution found\n";
    return 2;
  }
  std::cout << "energy:      " << report.best_energy << "\n"
            << "found at:    " << report.time_found << "\n";
  const int n = loaded.instance_size;
  if (loaded.type_name == "tsp") {
    const std::vector<int> tour =
        tsp_tour_from_assignment(n, report.best_assignment);
    std::cout << "tour:       ";
    for (int city : tour) std::cout << " " << city;
    std::cout << "\n";
  } else {
    const std::vector<int> placement =
        qap_placement_from_assignment(n, report.best_assignment);
    std::cout << "placement:  ";
    for (int loc : placement) std::cout << " " << loc;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperparameter tuning for a QUBO simulated annealer"};
  app.require_subcommand(1);

  // tune
  auto* tune = app.add_subcommand("tune", "run a multi-seed tuning study");
  std::string config_path, problem, type_name = "tsp", sampler = "tpe";
  std::string budget_mode = "logical", seeds = "1", output, label;
  int n = 100, m = 15, l = 15, threads = 1;
  double gamma = 4.0, t_coeff = 0.0, budget_limit = 200;
  bool fast_convergence = false;
  tune->add_option("--config", config_path, "experiment config file");
  tune->add_option("--problem", problem, "problem file path");
  tune->add_option("--type", type_name, "problem type: tsp or qap");
  tune->add_option("--n", n, "trial limit");
  tune->add_option("--m", m, "warm-up trials before range narrowing");
  tune->add_option("--l", l, "non-improving trials before early stop");
  tune->add_option("--gamma", gamma, "range-narrowing divisor");
  tune->add_option("--t-coeff", t_coeff,
                   "objective coefficient (default: budget limit)");
  tune->add_option("--sampler", sampler, "tpe or random");
  tune->add_flag("--fast-convergence", fast_convergence,
                 "enable range narrowing and convergence judgment");
  tune->add_option("--budget", budget_limit, "per-trial solver budget");
  tune->add_option("--budget-mode", budget_mode, "logical or wall");
  tune->add_option("--seeds", seeds, "comma-separated seed list");
  tune->add_option("--output", output, "report output directory")
      ->envname("ISINGTUNE_OUTPUT_DIR");
  tune->add_option("--threads", threads, "concurrent studies");
  tune->add_option("--label", label, "method label used in reports");

  // compare
  auto* compare = app.add_subcommand("compare", "compare experiment reports");
  std::vector<std::string> report_dirs;
  std::string compare_output;
  compare->add_option("dirs", report_dirs, "report directories")
      ->required()
      ->expected(2, -1);
  compare->add_option("--output", compare_output, "also write CSV here");

  // encode
  auto* encode = app.add_subcommand("encode", "print encoded BQP statistics");
  std::string enc_problem, enc_type = "tsp";
  bool enc_json = false;
  encode->add_option("--problem", enc_problem, "problem file path")
      ->required();
  encode->add_option("--type", enc_type, "problem type: tsp or qap");
  encode->add_flag("--json", enc_json, "emit JSON");

  // solve
  auto* solve_cmd =
      app.add_subcommand("solve", "one solver run with explicit parameters");
  std::string sol_problem, sol_type = "tsp", sol_mode = "logical";
  SolverParams params;
  double sol_budget = 200;
  std::uint64_t sol_seed = 1;
  solve_cmd->add_option("--problem", sol_problem, "problem file path")
      ->required();
  solve_cmd->add_option("--type", sol_type, "problem type: tsp or qap");
  solve_cmd->add_option("--num-run", params.num_run, "parallel attempts");
  solve_cmd->add_option("--num-group", params.num_group, "attempt groups");
  solve_cmd->add_option("--gs-level", params.gs_level, "global search level");
  solve_cmd->add_option("--gs-cutoff", params.gs_cutoff,
                        "restart cutoff (0 disables)");
  solve_cmd->add_option("--budget", sol_budget, "solver budget");
  solve_cmd->add_option("--budget-mode", sol_mode, "logical or wall");
  solve_cmd->add_option("--seed", sol_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tune->parsed()) {
      return run_tune(config_path, tune, problem, type_name, n, m, l, gamma,
                      t_coeff, sampler, fast_convergence, budget_limit,
                      budget_mode, seeds, output, threads, label);
    }
    if (compare->parsed()) return run_compare(report_dirs, compare_output);
    if (encode->parsed()) return run_encode(enc_problem, enc_type, enc_json);
    if (solve_cmd->parsed()) {
      return run_solve(sol_problem, sol_type, params, sol_budget, sol_mode,
                       sol_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
