#include "memostrange/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace memostrange {

double eliminated_diagonal(const ModelParams& params, double dt, MemoryScheme scheme)
{
  const auto c = memory_coefficients(params, dt, scheme);
  return params.alpha / dt + params.A_strange * (1.0 - c.uptake);
}

CoupledState initial_state(const Grid& grid, const SourcePair& sources, const ModelParams& params,
                           const SolverOptions& options)
{
  CoupledState state;
  state.u = Field::Zero(grid.size());
  if (params.alpha == 0.0) {
    // v(0) = 0 because beta > 0 whenever alpha = 0.
    const StencilOperator op(grid, params.A_strange);
    state.u = solve_linear(op, evaluate(sources.f, grid, 0.0), options.tol, options.max_iter);
  }
  state.memory = initial_memory(state.u, evaluate(sources.g, grid, 0.0), params);
  return state;
}

CoupledState advance(const CoupledState& state, double dt, const Grid& grid,
                     const SourcePair& sources, const ModelParams& params,
                     const SolverOptions& options, SolveReport* report)
{
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double t_next = state.t + dt;
  const auto c = memory_coefficients(params, dt, options.scheme);
  const Field f_next = evaluate(sources.f, grid, t_next);
  const Field g_next = evaluate(sources.g, grid, t_next);

  // v_next = v_known + c.uptake * u_next
  Field v_known = c.carry * state.memory.v + c.source * g_next;
  if (c.history != 0.0) v_known += c.history * state.memory.drive;

  const double inertia = params.alpha / dt;
  const StencilOperator op(grid, inertia + params.A_strange * (1.0 - c.uptake));
  const Field rhs = inertia * state.u + f_next + params.A_strange * v_known;

  CoupledState next;
  next.u = solve_linear(op, rhs, options.tol, options.max_iter, report, &state.u);
  next.memory.v = v_known + c.uptake * next.u;
  next.memory.drive = params.uptake() * next.u + g_next;
  next.memory.accumulated = params.beta * next.memory.v;
  next.memory.t = t_next;
  next.t = t_next;
  next.step_index = state.step_index + 1;
  return next;
}

std::string default_probe_name(const Probe& probe, std::size_t ordinal)
{
  const char* field = probe.field == ProbeField::U ? "u" : probe.field == ProbeField::V ? "v" : "H";
  switch (probe.kind) {
  case ProbeKind::Point: return std::string(field) + "_pt" + std::to_string(ordinal);
  case ProbeKind::L2: return std::string("l2_") + field;
  case ProbeKind::Min: return std::string("min_") + field;
  case ProbeKind::Max: return std::string("max_") + field;
  }
  return "probe" + std::to_string(ordinal);
}

double evaluate_probe(const Probe& probe, const Grid& grid, const CoupledState& state)
{
  const Field values = probe.field == ProbeField::U   ? state.u
                       : probe.field == ProbeField::V ? state.memory.v
                                                      : state.H();
  switch (probe.kind) {
  case ProbeKind::Point: return values[grid.nearest(probe.point)];
  case ProbeKind::L2: return grid.l2_norm(values);
  case ProbeKind::Min: return values.size() ? values.minCoeff() : 0.0;
  case ProbeKind::Max: return values.size() ? values.maxCoeff() : 0.0;
  }
  return 0.0;
}

Grid RunConfig::grid() const
{
  const std::size_t n = static_cast<std::size_t>(params.n);
  std::vector<double> lo = lower.empty() ? std::vector<double>(n, 0.0) : lower;
  std::vector<double> hi = upper.empty() ? std::vector<double>(n, 1.0) : upper;
  return Grid(params.n, cells_per_axis, std::move(lo), std::move(hi));
}

long step_count(double T, double dt)
{
  if (T <= 0.0) return 0;
  return static_cast<long>(std::ceil(T / dt - 1e-9));
}

SimulationResult run_simulation(const RunConfig& config, bool keep_snapshots)
{
  const Grid grid = config.grid();
  const auto options = config.solver_options();

  std::vector<Probe> probes = config.probes;
  if (probes.empty()) {
    for (auto field : {ProbeField::U, ProbeField::V, ProbeField::H}) {
      probes.push_back(Probe{ProbeKind::L2, field, {}, {}});
    }
  }

  SimulationResult result;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    result.series.names.push_back(probes[i].name.empty() ? default_probe_name(probes[i], i)
                                                         : probes[i].name);
  }

  auto record = [&](const CoupledState& state) {
    SeriesRow row;
    row.t = state.t;
    for (const auto& probe : probes) row.values.push_back(evaluate_probe(probe, grid, state));
    result.series.rows.push_back(std::move(row));
    if (keep_snapshots) result.snapshots.push_back(state);
  };

  CoupledState state;
  try {
    state = initial_state(grid, config.sources, config.params, options);
  } catch (const LinearSolveError& e) {
    throw SimulationError(std::string("initial elliptic solve failed: ") + e.what(), 0);
  }
  record(state);

  const long steps = step_count(config.T, config.dt);
  const int stride = std::max(config.output_stride, 1);
  for (long k = 1; k <= steps; ++k) {
    const double dt = (k == steps) ? config.T - state.t : config.dt;
    SolveReport report;
    try {
      state = advance(state, dt, grid, config.sources, config.params, options, &report);
    } catch (const LinearSolveError& e) {
      throw SimulationError("step " + std::to_string(k) + ": " + e.what(), k);
    }
    if (k == steps) state.t = config.T;
    result.cg_iterations += report.iterations;
    if (k % stride == 0 || k == steps) record(state);
  }
  result.steps = steps;
  return result;
}

std::vector<TestFunction> default_test_basis(int dim)
{
  std::vector<std::vector<int>> shapes;
  shapes.emplace_back(static_cast<std::size_t>(dim), 1);
  for (int d = 0; d < dim; ++d) {
    std::vector<int> m(static_cast<std::size_t>(dim), 1);
    m[static_cast<std::size_t>(d)] = 2;
    shapes.push_back(std::move(m));
  }
  std::vector<TestFunction> basis;
  for (int p = 0; p <= 2; ++p) {
    for (const auto& m : shapes) basis.push_back({TestFunction::Shape::Sine, m, p});
    basis.push_back({TestFunction::Shape::Bump, {}, p});
  }
  return basis;
}

namespace {

Field sample_test_shape(const TestFunction& fn, const Grid& grid)
{
  if (fn.shape == TestFunction::Shape::Sine) {
    return grid.sample([&](std::span<const double> x) { return mode_shape(grid, fn.modes, x); });
  }
  return grid.sample([&](std::span<const double> x) {
    double b = 1.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double xi = (x[d] - grid.lower(d)) / (grid.upper(d) - grid.lower(d));
      b *= 16.0 * xi * xi * (1.0 - xi) * (1.0 - xi);
    }
    return b;
  });
}

} // namespace

WeakResidualReport weak_residual(const std::vector<CoupledState>& history, const Grid& grid,
                                 const SourcePair& sources, const ModelParams& params,
                                 const std::vector<TestFunction>& basis)
{
  WeakResidualReport report;
  report.values.assign(basis.size(), 0.0);
  if (history.size() < 2) return report;

  std::vector<Field> shapes;
  shapes.reserve(basis.size());
  for (const auto& fn : basis) shapes.push_back(sample_test_shape(fn, grid));

  const StencilOperator laplacian = assemble_operator(grid);
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    const auto& now = history[k];
    const auto& next = history[k + 1];
    const double dt = next.t - now.t;
    // Pointwise strong residual at t_{k+1}; pairing it with psi is the
    // discrete weak form because -Delta_h is symmetric.
    Field local = params.alpha * (next.u - now.u) / dt + laplacian * next.u +
                  params.A_strange * (next.u - next.memory.v) -
                  evaluate(sources.f, grid, next.t);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const double eta = std::pow(next.t, basis[b].time_power);
      report.values[b] += dt * eta * grid.inner(local, shapes[b]);
    }
  }
  for (double v : report.values) report.max_abs = std::max(report.max_abs, std::abs(v));
  return report;
}

WeakResidualReport weak_residual(const std::vector<CoupledState>& history, const Grid& grid,
                                 const SourcePair& sources, const ModelParams& params)
{
  return weak_residual(history, grid, sources, params, default_test_basis(grid.dim()));
}

} // namespace memostrange
