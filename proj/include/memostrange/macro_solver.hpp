#pragma once

#include "memostrange/grid.hpp"
#include "memostrange/memory_term.hpp"
#include "memostrange/model_params.hpp"
#include "memostrange/sources.hpp"
#include "memostrange/stencil.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace memostrange {

/// Bulk field u together with the memory variable; H = u - v.
struct CoupledState {
  Field u;
  MemoryState<double> memory;
  double t = 0.0;
  long step_index = 0;

  const Field& v() const { return memory.v; }
  Field H() const { return u - memory.v; }
};

struct SolverOptions {
  MemoryScheme scheme = MemoryScheme::BackwardEuler;
  double tol = 1e-10;
  int max_iter = 10000;
};

/// Diagonal coefficient of the per-step system in u after the memory update
/// has been substituted: alpha/dt + A (1 - d v_next / d u_next).
double eliminated_diagonal(const ModelParams& params, double dt, MemoryScheme scheme);

/// State at t = 0. u = 0 when alpha > 0; for alpha = 0 u solves
/// -Delta u + A u = f(0) with v = 0. For beta = 0, v follows algebraically.
CoupledState initial_state(const Grid& grid, const SourcePair& sources, const ModelParams& params,
                           const SolverOptions& options = {});

/// One fully implicit step of the coupled system: the memory update is
/// eliminated into the diffusion equation, leaving a single SPD solve for u.
CoupledState advance(const CoupledState& state, double dt, const Grid& grid,
                     const SourcePair& sources, const ModelParams& params,
                     const SolverOptions& options = {}, SolveReport* report = nullptr);

enum class ProbeKind { Point, L2, Min, Max };
enum class ProbeField { U, V, H };

struct Probe {
  ProbeKind kind = ProbeKind::L2;
  ProbeField field = ProbeField::U;
  std::vector<double> point;
  std::string name;

  bool operator==(const Probe&) const = default;
};

std::string default_probe_name(const Probe& probe, std::size_t ordinal);
double evaluate_probe(const Probe& probe, const Grid& grid, const CoupledState& state);

/// Everything needed to run one simulation.
struct RunConfig {
  ModelParams params = derive_params(3, 1.0, 1.0, 1.0, 1.0);
  int cells_per_axis = 32;
  std::vector<double> lower;
  std::vector<double> upper;
  double dt = 1e-2;
  double T = 1.0;
  MemoryScheme scheme = MemoryScheme::BackwardEuler;
  SourcePair sources;
  std::vector<Probe> probes;
  int output_stride = 1;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int max_iter = 10000;
  bool dump_fields = false;

  Grid grid() const;
  SolverOptions solver_options() const { return {scheme, tol, max_iter}; }
};

struct SeriesRow {
  double t = 0.0;
  std::vector<double> values;
};

struct Series {
  std::vector<std::string> names;
  std::vector<SeriesRow> rows;
};

struct SimulationResult {
  Series series;
  std::vector<CoupledState> snapshots;
  long steps = 0;
  long cg_iterations = 0;
};

class SimulationError : public std::runtime_error {
public:
  SimulationError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

private:
  long step_;
};

/// Number of steps used to reach T with step dt (the last step is shortened
/// when T is not a multiple of dt).
long step_count(double T, double dt);

/// Steps from t = 0 to T, recording probes at step 0, every output_stride
/// steps and at the final step. Snapshots are kept at the same steps when
/// `keep_snapshots` is set.
SimulationResult run_simulation(const RunConfig& config, bool keep_snapshots = false);

/// Tensor-product test function psi(x) eta(t) for the discrete weak form.
struct TestFunction {
  enum class Shape { Sine, Bump } shape = Shape::Sine;
  std::vector<int> modes;
  int time_power = 0;
};

/// Sines with unit modes and one doubled mode per axis, a polynomial bump;
/// each paired with eta(t) = 1, t, t^2.
std::vector<TestFunction> default_test_basis(int dim);

struct WeakResidualReport {
  double max_abs = 0.0;
  std::vector<double> values;
};

/// Discrete space-time residual of
///   alpha <d_t u, phi> + <grad u, grad phi> + A <u - v, phi> - <f, phi>
/// over a trajectory stored at uniform times starting at t = 0.
WeakResidualReport weak_residual(const std::vector<CoupledState>& history, const Grid& grid,
                                 const SourcePair& sources, const ModelParams& params,
                                 const std::vector<TestFunction>& basis);

WeakResidualReport weak_residual(const std::vector<CoupledState>& history, const Grid& grid,
                                 const SourcePair& sources, const ModelParams& params);

} // namespace memostrange
