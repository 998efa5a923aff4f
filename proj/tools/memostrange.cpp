// memostrange: solver and verification CLI for the homogenized
// reaction-diffusion system with a memory strange term.

#include "memostrange/cell_problem.hpp"
#include "memostrange/io.hpp"
#include "memostrange/macro_solver.hpp"
#include "memostrange/verification.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace memostrange;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

json load_or_empty(const std::optional<std::string>& path)
{
  return path ? read_json_file(*path) : json::object();
}

ModelParams study_params(const json& j, const char* key, const ModelParams& fallback,
                         std::vector<std::string>& issues)
{
  if (!j.contains(key)) return fallback;
  return params_from_json(j.at(key), issues);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::vector<std::string>& issues)
{
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    issues.push_back(std::string(key) + " has the wrong type");
    return fallback;
  }
}

void raise_if(std::vector<std::string>& issues)
{
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

fs::path output_dir(const std::optional<std::string>& out, const std::string& fallback)
{
  fs::path dir = out ? fs::path(*out) : fs::path(fallback);
  fs::create_directories(dir);
  return dir;
}

void print_report(const ConvergenceReport& r)
{
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.study << ": fitted order "
            << format_double(r.fitted_order) << " (expected " << r.expected_order << " ± "
            << r.tolerance << ")\n";
}

// --- solve ----------------------------------------------------------------------

int cmd_solve(const std::optional<std::string>& config_path, const std::optional<std::string>& out)
{
  if (!config_path) throw ConfigError({"solve requires --config <file>"});
  const RunConfig config = load_config(*config_path);
  const fs::path dir = output_dir(out, config.output_dir);
  const Grid grid = config.grid();

  SimulationResult result;
  try {
    result = run_simulation(config, config.dump_fields);
  } catch (const SimulationError& e) {
    std::cerr << "memostrange: solver failure at step " << e.step() << ": " << e.what() << '\n';
    return kExitFail;
  }
  write_series_csv(result.series, dir / "series.csv");
  emit_plot_script(dir / "series.csv", dir / "series.gp");
  for (const auto& snap : result.snapshots) {
    write_field_dump(snap.u, grid, snap.t, dir / ("field_" + std::to_string(snap.step_index) + ".csv"));
  }
  json summary{{"steps", result.steps},
               {"cg_iterations", result.cg_iterations},
               {"final_t", result.series.rows.back().t},
               {"config", config_to_json(config)}};
  json final_values = json::object();
  for (std::size_t i = 0; i < result.series.names.size(); ++i) {
    final_values[result.series.names[i]] = result.series.rows.back().values[i];
  }
  summary["final"] = final_values;
  write_json(summary, dir / "summary.json");
  std::cout << "solve: " << result.steps << " steps, output in " << dir.string() << '\n';
  return kExitPass;
}

// --- cell -----------------------------------------------------------------------

int cmd_cell(const std::optional<std::string>& config_path, const std::optional<std::string>& out)
{
  const json j = load_or_empty(config_path);
  std::vector<std::string> issues;
  check_keys(j, {"params", "eps", "mesh_points", "output_dir"}, issues);
  const ModelParams params = study_params(j, "params", derive_params(3, 1.0, 1.0, 1.0, 1.0), issues);
  const double eps = get_or(j, "eps", 0.1, issues);
  const int mesh = get_or(j, "mesh_points", 2000, issues);
  const std::string fallback_dir = get_or<std::string>(j, "output_dir", ".", issues);
  raise_if(issues);

  CellSolution sol;
  BoundaryFluxes exact;
  try {
    sol = solve_cell_radial(eps, params, mesh);
    exact = boundary_fluxes(eps, params);
  } catch (const std::domain_error& e) {
    throw ConfigError({e.what()});
  }
  const fs::path dir = output_dir(out, fallback_dir);

  std::ofstream csv(dir / "cell.csv");
  csv << "r,w_num,w_exact\n";
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < sol.r_samples.size(); ++i) {
    const double we = w_exact(sol.r_samples[i], eps, params);
    max_err = std::max(max_err, std::abs(sol.w_values[i] - we));
    csv << format_double(sol.r_samples[i]) << ',' << format_double(sol.w_values[i]) << ','
        << format_double(we) << '\n';
  }
  const double rel_inner = std::abs(sol.flux_inner / exact.inner - 1.0);
  const double rel_outer = std::abs(sol.flux_outer / exact.outer - 1.0);
  const bool pass = max_err <= 1e-6 && rel_inner <= 1e-4 && rel_outer <= 1e-4;
  write_json(json{{"eps", eps},
                  {"a_eps", sol.a_eps},
                  {"R_out", sol.R_out},
                  {"alpha_eps", sol.alpha_eps},
                  {"mesh_points", mesh},
                  {"flux_inner", sol.flux_inner},
                  {"flux_inner_exact", exact.inner},
                  {"flux_outer", sol.flux_outer},
                  {"flux_outer_exact", exact.outer},
                  {"effective_coefficient", effective_coefficient(eps, params)},
                  {"A_strange", params.A_strange},
                  {"max_abs_error", max_err},
                  {"pass", pass}},
             dir / "cell.json");
  std::cout << (pass ? "PASS" : "FAIL") << " cell: max |w_num - w_exact| = " << format_double(max_err)
            << ", flux errors " << format_double(rel_inner) << " / " << format_double(rel_outer) << '\n';
  return pass ? kExitPass : kExitFail;
}

// --- kernel -----------------------------------------------------------------------

int cmd_kernel(const std::optional<std::string>& config_path, const std::optional<std::string>& out)
{
  const json j = load_or_empty(config_path);
  std::vector<std::string> issues;
  check_keys(j, {"params", "input", "scheme", "dt_levels", "T", "probe", "output_dir"}, issues);
  const ModelParams params = study_params(j, "params", derive_params(3, 1.0, 1.0, 1.0, 1.0), issues);
  KernelStudyOptions options;
  KernelInput input = KernelInput::Sinusoid;
  try {
    input = parse_kernel_input(get_or<std::string>(j, "input", "sinusoid", issues));
    options.scheme = parse_memory_scheme(get_or<std::string>(j, "scheme", "backward-euler", issues));
  } catch (const std::invalid_argument& e) {
    issues.emplace_back(e.what());
  }
  options.dts = get_or<std::vector<double>>(j, "dt_levels", {}, issues);
  options.T = get_or(j, "T", 1.0, issues);
  options.probe = get_or(j, "probe", 2, issues);
  const std::string fallback_dir = get_or<std::string>(j, "output_dir", ".", issues);
  if (issues.empty() && !(params.beta > 0.0)) issues.emplace_back("kernel study requires beta > 0");
  if (!options.dts.empty() && options.dts.size() < 3) issues.emplace_back("dt_levels needs at least 3 entries");
  for (double dt : options.dts) {
    if (!(dt > 0.0)) issues.emplace_back("dt_levels must be positive");
  }
  raise_if(issues);

  const auto result = kernel_equivalence_study(input, params, options);
  const fs::path dir = output_dir(out, fallback_dir);
  std::ofstream csv(dir / "kernel.csv");
  csv << "t,v_ode,v_conv,abs_diff\n";
  for (const auto& p : result.trace) {
    csv << format_double(p.t) << ',' << format_double(p.v_ode) << ',' << format_double(p.v_conv)
        << ',' << format_double(std::abs(p.v_ode - p.v_conv)) << '\n';
  }
  std::ofstream levels(dir / "kernel_levels.csv");
  levels << "dt,max_abs_diff\n";
  for (std::size_t i = 0; i < result.report.resolutions.size(); ++i) {
    levels << format_double(result.report.resolutions[i]) << ','
           << format_double(result.report.errors[i]) << '\n';
  }
  const bool pass = result.report.pass && result.finest_discrepancy <= 1e-6;
  json report = report_to_json(result.report);
  report["finest_discrepancy"] = result.finest_discrepancy;
  report["pass"] = pass;
  write_json(report, dir / "kernel.json");
  print_report(result.report);
  std::cout << "finest discrepancy " << format_double(result.finest_discrepancy) << '\n';
  return pass ? kExitPass : kExitFail;
}

// --- mms --------------------------------------------------------------------------

int cmd_mms(const std::optional<std::string>& config_path, const std::optional<std::string>& out)
{
  const json j = load_or_empty(config_path);
  std::vector<std::string> issues;
  check_keys(j, {"regimes", "space_cells", "dt_factor", "space_T", "time_cells", "time_dts",
                 "time_T", "output_dir"},
             issues);
  const auto regime_names = get_or<std::vector<std::string>>(
      j, "regimes", {"parabolic", "elliptic-memory", "algebraic-memory"}, issues);
  const auto space_cells = get_or<std::vector<int>>(j, "space_cells", {8, 16, 32}, issues);
  const double dt_factor = get_or(j, "dt_factor", 0.5, issues);
  const double space_T = get_or(j, "space_T", 0.25, issues);
  const int time_cells = get_or(j, "time_cells", 32, issues);
  const auto time_dts = get_or<std::vector<double>>(j, "time_dts", {0.1, 0.05, 0.025, 0.0125}, issues);
  const double time_T = get_or(j, "time_T", 1.0, issues);
  const std::string fallback_dir = get_or<std::string>(j, "output_dir", ".", issues);
  std::vector<Regime> regimes;
  for (const auto& name : regime_names) {
    if (name == "parabolic") regimes.push_back(Regime::Parabolic);
    else if (name == "elliptic-memory") regimes.push_back(Regime::EllipticMemory);
    else if (name == "algebraic-memory") regimes.push_back(Regime::AlgebraicMemory);
    else issues.push_back("unknown regime: " + name);
  }
  if (space_cells.size() < 3 || time_dts.size() < 3) issues.emplace_back("studies need at least 3 levels");
  raise_if(issues);

  const fs::path dir = output_dir(out, fallback_dir);
  std::ofstream csv(dir / "mms.csv");
  csv << "study,resolution,error\n";
  json reports = json::array();
  bool pass = true;
  for (Regime regime : regimes) {
    const MmsCase mms = mms_case(regime);
    for (const auto& r : {space_study(mms, space_cells, dt_factor, space_T),
                          time_study(mms, time_cells, time_dts, time_T)}) {
      for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
        csv << r.study << ',' << format_double(r.resolutions[i]) << ',' << format_double(r.errors[i]) << '\n';
      }
      reports.push_back(report_to_json(r));
      print_report(r);
      pass = pass && r.pass;
    }
  }
  write_json(json{{"reports", reports}, {"pass", pass}}, dir / "mms.json");
  return pass ? kExitPass : kExitFail;
}

// --- compare ------------------------------------------------------------------------

int cmd_compare(const std::optional<std::string>& config_path, const std::optional<std::string>& out)
{
  const json j = load_or_empty(config_path);
  std::vector<std::string> issues;
  check_keys(j, {"trials", "cells", "T", "dt", "seed", "lambda", "output_dir"}, issues);
  TrialConfig trial;
  const int trials = get_or(j, "trials", 20, issues);
  trial.cells = get_or(j, "cells", 16, issues);
  trial.T = get_or(j, "T", 1.0, issues);
  trial.dt = get_or(j, "dt", 1e-2, issues);
  trial.lambda = get_or(j, "lambda", 1.0, issues);
  const auto seed = get_or<std::uint64_t>(j, "seed", 0, issues);
  const std::string fallback_dir = get_or<std::string>(j, "output_dir", ".", issues);
  if (trials < 1) issues.emplace_back("trials must be ≥ 1");
  if (!(trial.dt > 0.0)) issues.emplace_back("dt must be positive");
  raise_if(issues);

  const ComparisonCase cases[] = {ComparisonCase::AlphaBeta, ComparisonCase::BetaOnly,
                                  ComparisonCase::AlphaOnly};
  std::vector<TrialResult> results(3 * static_cast<std::size_t>(trials));
  parallel_for(results.size(), [&](std::size_t i) {
    results[i] = comparison_trial(seed + i % static_cast<std::size_t>(trials), cases[i / trials], trial);
  });

  const fs::path dir = output_dir(out, fallback_dir);
  std::ofstream csv(dir / "compare.csv");
  csv << "case,seed,max_u,max_v\n";
  double worst = -INFINITY;
  std::vector<double> seeds, maxima;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto s = seed + i % static_cast<std::size_t>(trials);
    csv << to_string(cases[i / trials]) << ',' << s << ',' << format_double(results[i].max_u) << ','
        << format_double(results[i].max_v) << '\n';
    worst = std::max({worst, results[i].max_u, results[i].max_v});
    seeds.push_back(static_cast<double>(s));
    maxima.push_back(std::max(results[i].max_u, results[i].max_v));
  }
  const bool pass = worst <= 1e-10;
  write_json(json{{"resolutions", seeds}, {"errors", maxima}, {"fitted_order", nullptr},
                  {"max_over_trials", worst}, {"threshold", 1e-10}, {"pass", pass}},
             dir / "compare.json");
  std::cout << (pass ? "PASS" : "FAIL") << " compare: largest max(u, v) over "
            << results.size() << " trials = " << format_double(worst) << '\n';
  return pass ? kExitPass : kExitFail;
}

// --- cell-sweep ---------------------------------------------------------------------

int cmd_cell_sweep(const std::optional<std::string>& config_path, const std::optional<std::string>& out)
{
  const json j = load_or_empty(config_path);
  std::vector<std::string> issues;
  check_keys(j, {"params", "eps", "mesh_points", "output_dir"}, issues);
  const ModelParams params = study_params(j, "params", derive_params(3, 1.0, 1.0, 1.0, 1.0), issues);
  const auto eps = get_or<std::vector<double>>(j, "eps", {0.1, 0.05, 0.025, 0.0125}, issues);
  const int mesh = get_or(j, "mesh_points", 2000, issues);
  const std::string fallback_dir = get_or<std::string>(j, "output_dir", ".", issues);
  if (eps.size() < 3) issues.emplace_back("eps needs at least 3 values");
  raise_if(issues);

  ConvergenceReport report;
  try {
    report = cell_eps_study(params, eps);
  } catch (const std::domain_error& e) {
    throw ConfigError({e.what()});
  }
  const fs::path dir = output_dir(out, fallback_dir);
  std::ofstream csv(dir / "cell_sweep.csv");
  csv << "eps,alpha_eps,effective_coefficient,A_strange,difference,identity_rel_error,flux_outer_rel_error\n";
  double worst_identity = 0.0;
  for (double e : eps) {
    const double alpha_eps = cell_alpha(e, params);
    const double eff = effective_coefficient(e, params);
    const double identity = std::abs(eff * (1.0 - alpha_eps) / params.A_strange - 1.0);
    worst_identity = std::max(worst_identity, identity);
    const auto sol = solve_cell_radial(e, params, mesh);
    const double flux_rel = std::abs(sol.flux_outer / boundary_fluxes(e, params).outer - 1.0);
    csv << format_double(e) << ',' << format_double(alpha_eps) << ',' << format_double(eff) << ','
        << format_double(params.A_strange) << ',' << format_double(eff - params.A_strange) << ','
        << format_double(identity) << ',' << format_double(flux_rel) << '\n';
  }
  const bool pass = report.pass && worst_identity <= 1e-12;
  json j_out = report_to_json(report);
  j_out["identity_max_rel_error"] = worst_identity;
  j_out["pass"] = pass;
  write_json(j_out, dir / "cell_sweep.json");
  print_report(report);
  return pass ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"memostrange: homogenized reaction-diffusion with a memory strange term"};
  app.require_subcommand(1);
  std::optional<std::string> config;
  std::optional<std::string> out;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const std::optional<std::string>&, const std::optional<std::string>&);
  };
  const Command commands[] = {
      {"solve", "time-integrate the coupled system from a run configuration", cmd_solve},
      {"cell", "solve the radial capacity problem and compare with the closed form", cmd_cell},
      {"kernel", "memory ODE versus exponential-kernel convolution", cmd_kernel},
      {"mms", "manufactured-solution convergence of the coupled solver", cmd_mms},
      {"compare", "randomized comparison-principle trials", cmd_compare},
      {"cell-sweep", "epsilon asymptotics of the strange-term constant", cmd_cell_sweep},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config, "JSON configuration file");
    sub->add_option("--out", out, "output directory");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return commands[i].run(config, out);
    }
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) std::cerr << "memostrange: " << issue << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "memostrange: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
