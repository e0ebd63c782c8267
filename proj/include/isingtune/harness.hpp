#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "isingtune/annealer.hpp"
#include "isingtune/encoders.hpp"
#include "isingtune/parse_error.hpp"
#include "isingtune/qaplib.hpp"
#include "isingtune/tsplib.hpp"
#include "isingtune/tuner.hpp"

namespace isingtune {

enum class ProblemType { kTsp, kQap };

struct ExperimentConfig {
  std::string problem_path;
  ProblemType problem_type = ProblemType::kTsp;
  TunerConfig tuner;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  int threads = 1;
  std::string label;  // defaults to the sampler name when empty

  std::string effective_label() const {
    if (!label.empty()) return label;
    std::string name =
        tuner.sampler == SamplerKind::kTpe ? "tpe" : "random";
    if (tuner.fast_convergence) name += "+fc";
    return name;
  }

  void validate() const {
    tuner.validate();
    if (seeds.empty()) {
      throw std::invalid_argument("experiment: at least one seed required");
    }
    if (threads < 1) {
      throw std::invalid_argument("experiment: threads must be at least 1");
    }
  }
};

namespace harness_detail {

// Shortest representation that parses back to the same double, so CSV
// consumers recompute means and gaps exactly.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream item(token);
    std::uint64_t s = 0;
    if (!(item >> s)) {
      throw std::invalid_argument("bad seed '" + token + "'");
    }
    seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

}  // namespace harness_detail

/// Parses the flat "key = value" experiment config format with one
/// [section] per module. Unknown keys are errors so typos do not silently
/// fall back to defaults.
inline ExperimentConfig parse_experiment_config(std::istream& in,
                                                const std::string& filename) {
  ExperimentConfig config;
  std::string line;
  std::string section;
  int line_no = 0;

  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(filename + ": " + msg, line_no);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    std::string text = tsplib_detail::trim(line);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') throw fail("unterminated section header");
      section = tsplib_detail::trim(text.substr(1, text.size() - 2));
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) throw fail("expected 'key = value'");
    const std::string key = tsplib_detail::trim(text.substr(0, eq));
    const std::string value = tsplib_detail::trim(text.substr(eq + 1));
    if (key.empty()) throw fail("empty key");

    try {
      if (section == "problem") {
        if (key == "file") {
          config.problem_path = value;
        } else if (key == "type") {
          if (value == "tsp") {
            config.problem_type = ProblemType::kTsp;
          } else if (value == "qap") {
            config.problem_type = ProblemType::kQap;
          } else {
            throw std::invalid_argument("problem type must be tsp or qap");
          }
        } else {
          throw std::invalid_argument("unknown key '" + key + "'");
        }
      } else if (section == "tuner") {
        if (key == "n") {
          config.tuner.n = std::stoi(value);
        } else if (key == "m") {
          config.tuner.m = std::stoi(value);
        } else if (key == "l") {
          config.tuner.l = std::stoi(value);
        } else if (key == "gamma") {
          config.tuner.gamma = std::stod(value);
        } else if (key == "t_coeff") {
          config.tuner.t_coeff = std::stod(value);
        } else if (key == "sampler") {
          if (value == "tpe") {
            config.tuner.sampler = SamplerKind::kTpe;
          } else if (value == "random") {
            config.tuner.sampler = SamplerKind::kRandom;
          } else {
            throw std::invalid_argument("sampler must be tpe or random");
          }
        } else if (key == "fast_convergence") {
          config.tuner.fast_convergence = harness_detail::parse_bool(value);
        } else {
          throw std::invalid_argument("unknown key '" + key + "'");
        }
      } else if (section == "budget") {
        if (key == "limit") {
          config.tuner.budget.limit = std::stod(value);
        } else if (key == "mode") {
          if (value == "logical") {
            config.tuner.budget.mode = BudgetMode::kLogical;
          } else if (value == "wall" || value == "wall-clock") {
            config.tuner.budget.mode = BudgetMode::kWallClock;
          } else {
            throw std::invalid_argument("budget mode must be logical or wall");
          }
        } else {
          throw std::invalid_argument("unknown key '" + key + "'");
        }
      } else if (section == "experiment") {
        if (key == "seeds") {
          config.seeds = harness_detail::parse_seed_list(value);
        } else if (key == "output") {
          config.output_dir = value;
        } else if (key == "threads") {
          config.threads = std::stoi(value);
        } else if (key == "label") {
          config.label = value;
        } else {
          throw std::invalid_argument("unknown key '" + key + "'");
        }
      } else {
        throw std::invalid_argument("unknown section '" + section + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
  }
  return config;
}

/// A loaded and encoded problem plus the metadata recorded in reports.
struct LoadedProblem {
  Bqp bqp;
  std::string path;
  std::string type_name;
  int instance_size = 0;
};

inline LoadedProblem load_problem(const std::string& path, ProblemType type) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open problem file '" + path + "'");
  }
  LoadedProblem loaded;
  loaded.path = path;
  if (type == ProblemType::kTsp) {
    const TspInstance inst = parse_tsplib(file);
    loaded.bqp = encode_tsp(inst);
    loaded.type_name = "tsp";
    loaded.instance_size = inst.n;
  } else {
    const QapInstance inst = parse_qaplib(file);
    loaded.bqp = encode_qap(inst);
    loaded.type_name = "qap";
    loaded.instance_size = inst.n;
  }
  return loaded;
}

struct ExperimentReport {
  std::vector<Study> studies;  // one per seed, in config order
  std::filesystem::path trials_csv;
  std::filesystem::path curve_csv;
  std::filesystem::path summary_json;
};

namespace harness_detail {

inline std::string trial_row(std::uint64_t seed, const Trial& trial) {
  std::string row = std::to_string(seed) + "," + std::to_string(trial.index);
  for (ParamValue v : trial.params) row += "," + std::to_string(v);
  row += ",";
  if (trial.e_p) row += std::to_string(*trial.e_p);
  row += "," + format_number(trial.t_ep);
  row += "," + format_number(trial.objective);
  return row;
}

inline std::string trials_header(const ParamSpace& space) {
  std::string header = "seed,trial";
  for (const ParamSpec& s : space.specs) header += "," + s.name;
  header += ",e_p,t_ep,objective";
  return header;
}

// Best-so-far series per seed, padded to a common length by carrying the
// last value forward (a study that converged early keeps its final best).
struct CurveData {
  std::size_t rows = 0;
  std::vector<std::vector<double>> best_e;    // [seed][trial]
  std::vector<std::vector<double>> best_obj;  // [seed][trial]
};

inline CurveData build_curves(const std::vector<Study>& studies) {
  CurveData data;
  for (const Study& study : studies) {
    data.rows = std::max(data.rows, study.trials.size());
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (const Study& study : studies) {
    std::vector<double> e_series, obj_series;
    double best_e = inf, best_obj = inf;
    for (const Trial& trial : study.trials) {
      if (trial.e_p && static_cast<double>(*trial.e_p) < best_e) {
        best_e = static_cast<double>(*trial.e_p);
      }
      best_obj = std::min(best_obj, trial.objective);
      e_series.push_back(best_e);
      obj_series.push_back(best_obj);
    }
    while (e_series.size() < data.rows) {
      e_series.push_back(best_e);
      obj_series.push_back(best_obj);
    }
    data.best_e.push_back(std::move(e_series));
    data.best_obj.push_back(std::move(obj_series));
  }
  return data;
}

}  // namespace harness_detail

/// Runs one study per seed (optionally across threads; output is byte
/// identical regardless of thread count) and writes trials.csv, curve.csv
/// and summary.json into the output directory. With a single thread,
/// trials.csv is flushed after every completed trial so a crash leaves the
/// finished rows behind. The summary includes a default-parameter baseline
/// solve per seed, mirroring a run with no tuning at all.
inline ExperimentReport run_experiment(const ExperimentConfig& config,
                                       TrialSolver solver = nullptr) {
  config.validate();
  const LoadedProblem problem =
      load_problem(config.problem_path, config.problem_type);

  std::filesystem::create_directories(config.output_dir);
  ExperimentReport report;
  report.trials_csv = std::filesystem::path(config.output_dir) / "trials.csv";
  report.curve_csv = std::filesystem::path(config.output_dir) / "curve.csv";
  report.summary_json =
      std::filesystem::path(config.output_dir) / "summary.json";

  const std::size_t num_seeds = config.seeds.size();
  report.studies.resize(num_seeds);

  if (config.threads == 1) {
    std::ofstream trials(report.trials_csv);
    trials << harness_detail::trials_header(config.tuner.space) << "\n";
    trials.flush();
    for (std::size_t s = 0; s < num_seeds; ++s) {
      const std::uint64_t seed = config.seeds[s];
      report.studies[s] = run_study(
          problem.bqp, config.tuner, seed, solver,
          [&](const Trial& trial) {
            trials << harness_detail::trial_row(seed, trial) << "\n";
            trials.flush();
          });
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t s = next.fetch_add(1); s < num_seeds;
           s = next.fetch_add(1)) {
        report.studies[s] =
            run_study(problem.bqp, config.tuner, config.seeds[s], solver);
      }
    };
    std::vector<std::thread> pool;
    const std::size_t pool_size =
        std::min<std::size_t>(static_cast<std::size_t>(config.threads),
                              num_seeds);
    for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    std::ofstream trials(report.trials_csv);
    trials << harness_detail::trials_header(config.tuner.space) << "\n";
    for (std::size_t s = 0; s < num_seeds; ++s) {
      for (const Trial& trial : report.studies[s].trials) {
        trials << harness_detail::trial_row(config.seeds[s], trial) << "\n";
      }
    }
  }

  // curve.csv: best-so-far energy and objective per seed plus their means.
  {
    const harness_detail::CurveData curves =
        harness_detail::build_curves(report.studies);
    std::ofstream out(report.curve_csv);
    out << "trial";
    for (std::uint64_t seed : config.seeds) out << ",e_seed" << seed;
    out << ",e_mean";
    for (std::uint64_t seed : config.seeds) out << ",obj_seed" << seed;
    out << ",obj_mean\n";
    for (std::size_t row = 0; row < curves.rows; ++row) {
      out << (row + 1);
      double e_sum = 0, obj_sum = 0;
      for (std::size_t s = 0; s < num_seeds; ++s) {
        out << "," << harness_detail::format_number(curves.best_e[s][row]);
        e_sum += curves.best_e[s][row];
      }
      out << ","
          << harness_detail::format_number(e_sum /
                                           static_cast<double>(num_seeds));
      for (std::size_t s = 0; s < num_seeds; ++s) {
        out << "," << harness_detail::format_number(curves.best_obj[s][row]);
        obj_sum += curves.best_obj[s][row];
      }
      out << ","
          << harness_detail::format_number(obj_sum /
                                           static_cast<double>(num_seeds))
          << "\n";
    }
  }

  // summary.json: per-seed outcome, convergence stats, default baseline.
  {
    nlohmann::json summary;
    summary["label"] = config.effective_label();
    summary["instance"] = {
        {"file", config.problem_path},
        {"basename",
         std::filesystem::path(config.problem_path).filename().string()},
        {"type", problem.type_name},
        {"size", problem.instance_size},
        {"num_vars", problem.bqp.num_vars}};
    summary["budget"] = {
        {"limit", config.tuner.budget.limit},
        {"mode", config.tuner.budget.mode == BudgetMode::kLogical
                     ? "logical"
                     : "wall"}};
    summary["tuner"] = {
        {"n", config.tuner.n},
        {"m", config.tuner.m},
        {"l", config.tuner.l},
        {"gamma", config.tuner.gamma},
        {"t_coeff", config.tuner.effective_t_coeff()},
        {"sampler",
         config.tuner.sampler == SamplerKind::kTpe ? "tpe" : "random"},
        {"fast_convergence", config.tuner.fast_convergence}};

    nlohmann::json results = nlohmann::json::array();
    double trials_sum = 0;
    double conv_sum = 0;
    int conv_count = 0;
    double e_sum = 0;
    int e_count = 0;
    for (std::size_t s = 0; s < num_seeds; ++s) {
      const Study& study = report.studies[s];
      nlohmann::json entry;
      entry["seed"] = config.seeds[s];
      entry["trials_run"] = study.trials.size();
      entry["termination"] = study.termination == Termination::kConverged
                                 ? "converged"
                                 : "completed";
      trials_sum += static_cast<double>(study.trials.size());
      if (study.termination == Termination::kConverged) {
        entry["convergence_trial"] = study.trials.size();
        conv_sum += static_cast<double>(study.trials.size());
        ++conv_count;
      }
      if (study.best_emin) {
        nlohmann::json best;
        best["e_p"] = *study.best_emin;
        best["t_ep"] = study.best_t_ep;
        best["trial"] = study.best_trial_index;
        best["solver_seed"] = study.best_solver_seed;
        nlohmann::json params;
        for (std::size_t k = 0; k < study.space.specs.size(); ++k) {
          params[study.space.specs[k].name] = study.best_params[k];
        }
        best["params"] = params;
        entry["best"] = best;
        e_sum += static_cast<double>(*study.best_emin);
        ++e_count;
      }
      results.push_back(entry);
    }
    summary["results"] = results;
    summary["mean_trials_run"] = trials_sum / static_cast<double>(num_seeds);
    if (conv_count > 0) {
      summary["mean_convergence_trial"] =
          conv_sum / static_cast<double>(conv_count);
    }
    if (e_count > 0) {
      summary["mean_best_e"] = e_sum / static_cast<double>(e_count);
    }

    // Untuned reference point: default parameters, one solve per seed.
    {
      const SolverParams defaults = default_solver_params();
      nlohmann::json baseline;
      baseline["params"] = {{"num_run", defaults.num_run},
                            {"num_group", defaults.num_group},
                            {"gs_level", defaults.gs_level},
                            {"gs_cutoff", defaults.gs_cutoff}};
      nlohmann::json per_seed = nlohmann::json::array();
      double base_sum = 0;
      int base_count = 0;
      for (std::uint64_t seed : config.seeds) {
        const SolveReport r = solve(problem.bqp, defaults,
                                    config.tuner.budget, Rng::mix(seed, 0));
        nlohmann::json entry;
        entry["seed"] = seed;
        entry["feasible"] = r.feasible_found;
        if (r.feasible_found) {
          entry["e_p"] = r.best_energy;
          entry["t_ep"] = r.time_found;
          base_sum += static_cast<double>(r.best_energy);
          ++base_count;
        }
        per_seed.push_back(entry);
      }
      baseline["per_seed"] = per_seed;
      if (base_count > 0) {
        baseline["mean_e"] = base_sum / static_cast<double>(base_count);
      }
      summary["default_baseline"] = baseline;
    }

    std::ofstream out(report.summary_json);
    out << summary.dump(2) << "\n";
  }

  return report;
}

struct ComparisonRow {
  std::string method_a;
  std::string method_b;
  std::size_t at_trial = 0;  // earlier of the two convergence points
  double mean_e_a = 0;
  double mean_e_b = 0;
  double gap_b_vs_a = 0;  // (E_b - E_a) / |E_a|
  double trials_a = 0;
  double trials_b = 0;
};

namespace harness_detail {

struct LoadedReport {
  std::string label;
  nlohmann::json summary;
  std::vector<double> mean_e_curve;  // indexed by trial - 1
  double mean_trials = 0;
};

inline LoadedReport load_report(const std::filesystem::path& dir) {
  LoadedReport rep;
  std::ifstream summary_in(dir / "summary.json");
  if (!summary_in) {
    throw std::runtime_error("cannot open " + (dir / "summary.json").string());
  }
  summary_in >> rep.summary;
  rep.label = rep.summary.value("label", dir.filename().string());
  rep.mean_trials = rep.summary.value("mean_trials_run", 0.0);

  std::ifstream curve_in(dir / "curve.csv");
  if (!curve_in) {
    throw std::runtime_error("cannot open " + (dir / "curve.csv").string());
  }
  std::string line;
  if (!std::getline(curve_in, line)) {
    throw std::runtime_error("empty curve.csv in " + dir.string());
  }
  // Locate the e_mean column.
  std::ptrdiff_t e_mean_col = -1;
  {
    std::istringstream header(line);
    std::string name;
    std::ptrdiff_t col = 0;
    while (std::getline(header, name, ',')) {
      if (name == "e_mean") e_mean_col = col;
      ++col;
    }
  }
  if (e_mean_col < 0) {
    throw std::runtime_error("curve.csv in " + dir.string() +
                             " has no e_mean column");
  }
  while (std::getline(curve_in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::ptrdiff_t col = 0; std::getline(row, cell, ','); ++col) {
      if (col == e_mean_col) {
        rep.mean_e_curve.push_back(
            cell == "inf" ? std::numeric_limits<double>::infinity()
                          : std::stod(cell));
      }
    }
  }
  return rep;
}

}  // namespace harness_detail

/// Pairwise comparison of experiment reports over the same instance and
/// budget: for each pair, the mean best energies are read off both curves
/// at the earlier method's mean stopping trial and the relative gap is
/// reported, mirroring a convergence-point comparison between methods.
inline std::vector<ComparisonRow> compare_methods(
    const std::vector<std::filesystem::path>& report_dirs) {
  if (report_dirs.size() < 2) {
    throw std::invalid_argument("compare_methods: need at least two reports");
  }
  std::vector<harness_detail::LoadedReport> reports;
  for (const auto& dir : report_dirs) {
    reports.push_back(harness_detail::load_report(dir));
  }
  const nlohmann::json& ref_instance = reports.front().summary.at("instance");
  const nlohmann::json& ref_budget = reports.front().summary.at("budget");
  for (std::size_t r = 1; r < reports.size(); ++r) {
    const nlohmann::json& instance = reports[r].summary.at("instance");
    if (instance.at("basename") != ref_instance.at("basename") ||
        instance.at("num_vars") != ref_instance.at("num_vars") ||
        reports[r].summary.at("budget") != ref_budget) {
      throw std::invalid_argument(
          "comparison error: reports cover different instances or budgets");
    }
  }

  std::vector<ComparisonRow> rows;
  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      const auto& ra = reports[a];
      const auto& rb = reports[b];
      ComparisonRow row;
      row.method_a = ra.label;
      row.method_b = rb.label;
      row.trials_a = ra.mean_trials;
      row.trials_b = rb.mean_trials;
      const std::size_t k = static_cast<std::size_t>(
          std::llround(std::min(ra.mean_trials, rb.mean_trials)));
      row.at_trial = std::max<std::size_t>(k, 1);
      auto curve_at = [&](const harness_detail::LoadedReport& rep) {
        if (rep.mean_e_curve.empty()) {
          throw std::invalid_argument("comparison error: empty curve for " +
                                      rep.label);
        }
        const std::size_t idx =
            std::min(row.at_trial, rep.mean_e_curve.size()) - 1;
        return rep.mean_e_curve[idx];
      };
      row.mean_e_a = curve_at(ra);
      row.mean_e_b = curve_at(rb);
      row.gap_b_vs_a = compute_gap(row.mean_e_b, row.mean_e_a);
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                                 std::ostream& out) {
  out << "method_a,method_b,at_trial,mean_e_a,mean_e_b,gap_b_vs_a,"
         "trials_a,trials_b\n";
  for (const ComparisonRow& row : rows) {
    out << row.method_a << "," << row.method_b << "," << row.at_trial << ","
        << harness_detail::format_number(row.mean_e_a) << ","
        << harness_detail::format_number(row.mean_e_b) << ","
        << harness_detail::format_number(row.gap_b_vs_a) << ","
        << harness_detail::format_number(row.trials_a) << ","
        << harness_detail::format_number(row.trials_b) << "\n";
  }
}

}  // namespace isingtune
