// Acceptance suite: one self-contained check per criterion, each printing a
// single pass/fail line. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "isingtune/harness.hpp"
#include "oracles.hpp"

using namespace isingtune;

namespace {

namespace fs = std::filesystem;

std::string data_path(const std::string& name) {
  return std::string(ISINGTUNE_TEST_DATA_DIR) + "/" + name;
}

SolveBudget logical_budget(double limit) {
  SolveBudget budget;
  budget.limit = limit;
  budget.mode = BudgetMode::kLogical;
  return budget;
}

struct CheckFailure {
  std::string message;
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure{message};
}

// ---------------------------------------------------------------------------
// 1. Encoding oracle: minimum feasible energy equals the permutation optimum
//    and the penalty vanishes exactly on permutation assignments.
// ---------------------------------------------------------------------------
std::string criterion_1() {
  int checked = 0;
  for (int n = 3; n <= 6; ++n) {
    for (int k = 0; k < 5; ++k) {
      const std::uint64_t seed = 4000 + 100 * n + k;

      const TspInstance tsp = oracles::random_tsp(n, seed);
      const Bqp tsp_bqp = encode_tsp(tsp);
      Energy tsp_min = std::numeric_limits<Energy>::max();
      oracles::for_each_permutation(n, [&](const std::vector<int>& perm) {
        const Assignment a = tsp_assignment(n, perm);
        expect(penalty_energy(tsp_bqp, a) == 0,
               "TSP permutation assignment has nonzero penalty");
        tsp_min = std::min(tsp_min, energy(tsp_bqp, a));
      });
      expect(tsp_min == oracles::brute_force_tsp_optimum(tsp),
             "TSP minimum feasible energy differs from brute force");

      const QapInstance qap = oracles::random_qap(n, seed);
      const Bqp qap_bqp = encode_qap(qap);
      Energy qap_min = std::numeric_limits<Energy>::max();
      oracles::for_each_permutation(n, [&](const std::vector<int>& perm) {
        const Assignment a = qap_assignment(n, perm);
        expect(penalty_energy(qap_bqp, a) == 0,
               "QAP permutation assignment has nonzero penalty");
        qap_min = std::min(qap_min, energy(qap_bqp, a));
      });
      expect(qap_min == oracles::brute_force_qap_optimum(qap),
             "QAP minimum feasible energy differs from brute force");
      checked += 2;
    }
  }

  // Exhaustive cross-check at n = 3: the feasible set is exactly the set of
  // permutation matrices.
  const Bqp bqp3 = encode_tsp(oracles::random_tsp(3, 777));
  int feasible = 0;
  for (std::uint64_t mask = 0; mask < 512; ++mask) {
    Assignment a(9);
    for (int v = 0; v < 9; ++v) {
      a.bits[v] = static_cast<std::uint8_t>((mask >> v) & 1);
    }
    if (is_feasible(bqp3, a)) ++feasible;
  }
  expect(feasible == 6, "n=3 feasible set is not the 3! permutations");
  return std::to_string(checked) + " random instances verified";
}

// ---------------------------------------------------------------------------
// 2. Benchmark parsing: instance sizes and the 3-4-5 triangle distance.
// ---------------------------------------------------------------------------
std::string criterion_2() {
  auto parse_tsp_file = [](const std::string& name) {
    std::ifstream file(data_path(name));
    expect(file.good(), "cannot open " + name);
    return parse_tsplib(file);
  };
  auto parse_qap_file = [](const std::string& name) {
    std::ifstream file(data_path(name));
    expect(file.good(), "cannot open " + name);
    return parse_qaplib(file);
  };

  expect(parse_tsp_file("kroA100.tsp").n == 100, "kroA100 node count");
  expect(parse_tsp_file("gr120.tsp").n == 120, "gr120 node count");
  expect(parse_qap_file("tai80a.dat").n == 80, "tai80a size");
  expect(parse_qap_file("tai100a.dat").n == 100, "tai100a size");
  expect(parse_tsp_file("triangle345.tsp").dist[0][1] == 5,
         "3-4-5 triangle distance");
  return "kroA100=100 gr120=120 tai80a=80 tai100a=100 triangle=5";
}

// ---------------------------------------------------------------------------
// 3. Objective formula and its tie-breaking order.
// ---------------------------------------------------------------------------
std::string criterion_3() {
  expect(compute_objective(1000, 12.5, 30.0) == 30012.5,
         "objective hand value");
  expect(compute_objective(0, 0.0, 30.0) == 0.0, "objective zero case");
  expect(compute_objective(500, 5.0, 30.0) <
             compute_objective(500, 9.0, 30.0),
         "equal energies must order by discovery time");
  expect(compute_objective(499, 29.5, 30.0) <
             compute_objective(500, 0.0, 30.0),
         "energy must dominate time for discovery times inside the budget");
  return "O(p) = t*E_p + T_Ep verified";
}

// ---------------------------------------------------------------------------
// 4. Range narrowing property suite plus the pinned clipping case.
// ---------------------------------------------------------------------------
std::string criterion_4() {
  {
    const ParamSpec clipped = narrow_range(ParamSpec("x", 0, 100), 5, 4.0);
    expect(clipped.current_min == 0 && clipped.current_max == 18,
           "clipping case [0,100], x_b=5, gamma=4 must give [0,18]");
  }
  Rng rng(4242);
  for (int k = 0; k < 10000; ++k) {
    const ParamValue lo = rng.uniform_int(-1000000, 1000000);
    const ParamValue hi = lo + rng.uniform_int(0, 2000000);
    ParamSpec spec("p", lo, hi);
    spec.current_min = rng.uniform_int(lo, hi);
    spec.current_max = rng.uniform_int(spec.current_min, hi);
    const ParamValue x_b = rng.uniform_int(lo, hi);
    const double gamma = 1.0 + rng.uniform_double() * 9.0 + 1e-9;

    const ParamSpec narrowed = narrow_range(spec, x_b, gamma);
    const double r_old =
        static_cast<double>(spec.current_max - spec.current_min);
    expect(narrowed.current_min >= lo && narrowed.current_max <= hi,
           "narrowed bounds escape the allowed limits");
    expect(narrowed.current_min <= x_b && x_b <= narrowed.current_max,
           "narrowed range lost its center");
    expect(narrowed.current_max - narrowed.current_min <=
               static_cast<ParamValue>(std::ceil(r_old / gamma)) + 1,
           "narrowed range too wide");
  }
  return "10000 random cases + clipping pin";
}

// ---------------------------------------------------------------------------
// 5. Convergence judgment with stub solvers.
// ---------------------------------------------------------------------------
std::string criterion_5() {
  const Bqp bqp = encode_tsp(oracles::random_tsp(3, 50));

  TrialSolver constant = [](const Bqp& b, const ParamVector&,
                            const SolveBudget&, std::uint64_t) {
    SolveReport report;
    report.attempts = 1;
    report.feasible_found = true;
    report.best_energy = 123;
    report.time_found = 1.0;
    report.best_assignment = Assignment(static_cast<std::size_t>(b.num_vars));
    return report;
  };
  auto counter = std::make_shared<Energy>(100000);
  TrialSolver improving = [counter](const Bqp& b, const ParamVector&,
                                    const SolveBudget&, std::uint64_t) {
    SolveReport report;
    report.attempts = 1;
    report.feasible_found = true;
    report.best_energy = --(*counter);
    report.time_found = 1.0;
    report.best_assignment = Assignment(static_cast<std::size_t>(b.num_vars));
    return report;
  };

  for (const auto& [m, l] : std::vector<std::pair<int, int>>{
           {3, 3}, {5, 2}, {15, 15}, {1, 7}}) {
    TunerConfig config;
    config.n = 100;
    config.m = m;
    config.l = l;
    config.fast_convergence = true;
    config.budget = logical_budget(10);
    const Study study = run_study(bqp, config, 1, constant);
    expect(static_cast<int>(study.trials.size()) == m + l,
           "constant stub must stop at exactly m + l trials");
    expect(study.termination == Termination::kConverged,
           "constant stub must report convergence");
  }

  TunerConfig config;
  config.n = 60;
  config.m = 10;
  config.l = 5;
  config.fast_convergence = true;
  config.budget = logical_budget(10);
  const Study study = run_study(bqp, config, 1, improving);
  expect(static_cast<int>(study.trials.size()) == 60,
         "improving stub must run all n trials");
  expect(study.termination == Termination::kCompleted,
         "improving stub must not report convergence");
  return "m+l termination exact; improving runs all n";
}

// ---------------------------------------------------------------------------
// 6/7. Sampler quality on a 20-node TSP. The studies are shared state
// between the two criteria so the heavy solves run once.
// ---------------------------------------------------------------------------
struct MethodStats {
  std::vector<double> final_e;
  std::vector<double> trials_used;
};

MethodStats run_method(const Bqp& bqp, SamplerKind sampler, bool fc, int n,
                       int warmup) {
  MethodStats stats;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    TunerConfig config;
    config.n = n;
    config.m = warmup;
    config.l = warmup;
    config.gamma = 4.0;
    config.sampler = sampler;
    config.fast_convergence = fc;
    config.budget = logical_budget(200);
    const Study study = run_study(bqp, config, seed);
    expect(study.best_emin.has_value(), "study found no feasible solution");
    stats.final_e.push_back(static_cast<double>(*study.best_emin));
    stats.trials_used.push_back(static_cast<double>(study.trials.size()));
  }
  return stats;
}

double mean(const std::vector<double>& v) {
  double sum = 0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

const Bqp& tuning_bqp() {
  static const Bqp bqp = encode_tsp(oracles::random_tsp(20, 606));
  return bqp;
}

std::string criterion_6() {
  const Bqp& bqp = tuning_bqp();
  const MethodStats random_stats =
      run_method(bqp, SamplerKind::kRandom, false, 100, 15);
  const MethodStats tpe_stats =
      run_method(bqp, SamplerKind::kTpe, false, 100, 15);
  const MethodStats fc_stats =
      run_method(bqp, SamplerKind::kTpe, true, 100, 15);

  const double random_median = oracles::median(random_stats.final_e);
  const double tpe_median = oracles::median(tpe_stats.final_e);
  const double fc_median = oracles::median(fc_stats.final_e);

  std::ostringstream detail;
  detail << "median E: random=" << random_median << " tpe=" << tpe_median
         << " fc=" << fc_median;
  expect(tpe_median <= random_median,
         "TPE median must not exceed random sampling (" + detail.str() + ")");
  expect(fc_median <= tpe_median * 1.01,
         "FastConvergence median must be within 1% of TPE (" + detail.str() +
             ")");
  return detail.str();
}

std::string criterion_7() {
  const Bqp& bqp = tuning_bqp();
  const MethodStats tpe_stats =
      run_method(bqp, SamplerKind::kTpe, false, 200, 15);
  const MethodStats fc_stats =
      run_method(bqp, SamplerKind::kTpe, true, 200, 15);

  const double fc_trials = mean(fc_stats.trials_used);
  const double tpe_e = mean(tpe_stats.final_e);
  const double fc_e = mean(fc_stats.final_e);

  std::ostringstream detail;
  detail << "fc mean trials=" << fc_trials << " (limit 100), mean E: fc="
         << fc_e << " tpe@200=" << tpe_e;
  expect(fc_trials <= 100.0,
         "FastConvergence must stop within half the trial limit (" +
             detail.str() + ")");
  expect(fc_e <= tpe_e * 1.01,
         "FastConvergence mean E must be within 1% of TPE at 200 trials (" +
             detail.str() + ")");
  return detail.str();
}

// ---------------------------------------------------------------------------
// 8. Determinism of trials.csv across reruns and thread counts.
// ---------------------------------------------------------------------------
std::string criterion_8() {
  const fs::path base =
      fs::temp_directory_path() / "isingtune_acceptance" / "determinism";
  fs::remove_all(base);

  auto run_into = [&](const std::string& leaf, int threads) {
    ExperimentConfig config;
    config.problem_path = data_path("triangle345.tsp");
    config.problem_type = ProblemType::kTsp;
    config.tuner.n = 8;
    config.tuner.m = 3;
    config.tuner.l = 4;
    config.tuner.fast_convergence = true;
    config.tuner.sampler = SamplerKind::kTpe;
    config.tuner.budget = logical_budget(30);
    config.seeds = {11, 22, 33};
    config.threads = threads;
    config.output_dir = (base / leaf).string();
    const ExperimentReport report = run_experiment(config);
    std::ifstream in(report.trials_csv, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
  };

  const std::string first = run_into("a", 1);
  const std::string second = run_into("b", 1);
  const std::string threaded = run_into("c", 4);
  expect(!first.empty(), "trials.csv was empty");
  expect(first == second, "reruns must reproduce trials.csv byte for byte");
  expect(first == threaded,
         "thread count must not change trials.csv bytes");
  return "3 runs x " + std::to_string(first.size()) + " bytes identical";
}

// ---------------------------------------------------------------------------
// 9. Solver sanity: optimal 3-node tours under corner parameters and the
//    monotone budget property.
// ---------------------------------------------------------------------------
std::string criterion_9() {
  const TspInstance tri = oracles::random_tsp(3, 31);
  const Bqp tri_bqp = encode_tsp(tri);
  const Energy optimal = tri.dist[0][1] + tri.dist[1][2] + tri.dist[2][0];

  for (int num_run : {1, 16}) {
    for (int num_group : {1, 16}) {
      for (int gs_level : {0, 100}) {
        for (int gs_cutoff : {0, 1000000}) {
          const SolverParams params{num_run, num_group, gs_level, gs_cutoff};
          const SolveReport report =
              solve(tri_bqp, params, logical_budget(4000), 5);
          expect(report.feasible_found,
                 "3-node TSP run found no feasible tour");
          expect(report.best_energy == optimal,
                 "3-node TSP run missed the optimal tour");
          expect(is_feasible(tri_bqp, report.best_assignment),
                 "reported assignment is not feasible");
        }
      }
    }
  }

  const Bqp bqp = encode_tsp(oracles::random_tsp(8, 64));
  SolverParams params;
  params.num_run = 2;
  params.num_group = 1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SolveReport small = solve(bqp, params, logical_budget(40), seed);
    const SolveReport large = solve(bqp, params, logical_budget(80), seed);
    expect(small.feasible_found && large.feasible_found,
           "budgeted runs must find feasible tours");
    expect(large.best_energy <= small.best_energy,
           "doubling the budget must not worsen the energy");
  }
  return "16 corner-parameter runs optimal; monotone on 10 seeds";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "encoding oracle", criterion_1},
      {2, "benchmark parsing", criterion_2},
      {3, "objective formula", criterion_3},
      {4, "range narrowing", criterion_4},
      {5, "convergence judgment", criterion_5},
      {6, "TPE beats random", criterion_6},
      {7, "fast convergence in fewer trials", criterion_7},
      {8, "determinism", criterion_8},
      {9, "solver sanity", criterion_9},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = true;
    try {
      detail = criterion.run();
    } catch (const CheckFailure& failure) {
      passed = false;
      detail = failure.message;
    } catch (const std::exception& e) {
      passed = false;
      detail = std::string("unexpected exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    std::printf("[%s] criterion %d: %s (%.1fs) %s\n",
                passed ? "PASS" : "FAIL", criterion.id, criterion.name,
                seconds, detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures;
  }
  return failures;
}
