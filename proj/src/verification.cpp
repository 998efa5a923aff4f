#include "memostrange/verification.hpp"

#include "memostrange/cell_problem.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace memostrange {

double fit_order(const std::vector<double>& resolutions, const std::vector<double>& errors)
{
  if (resolutions.size() != errors.size() || resolutions.size() < 2) {
    throw std::invalid_argument("fit_order needs matching arrays with at least two points");
  }
  const double m = static_cast<double>(resolutions.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    const double x = std::log(resolutions[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void ConvergenceReport::finalize()
{
  bool finite = !errors.empty();
  for (double e : errors) finite = finite && std::isfinite(e) && e > 0.0;
  fitted_order = finite ? fit_order(resolutions, errors) : std::nan("");
  pass = finite && resolutions.size() >= 3 &&
         std::abs(fitted_order - expected_order) <= tolerance;
}

unsigned worker_count()
{
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MEMOSTRANGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// --- manufactured solutions ---------------------------------------------------

namespace {

bool identically_zero(const TimeProfile& p)
{
  return std::all_of(p.poly.begin(), p.poly.end(), [](double c) { return c == 0.0; }) &&
         p.sine_amp == 0.0 && p.relax_amp == 0.0;
}

} // namespace

SourcePair manufacture_sources(const ManufacturedSolution& exact, const ModelParams& params,
                               bool discrete_laplacian)
{
  const bool shape_vanishes =
      !exact.modes.empty() &&
      std::none_of(exact.modes.begin(), exact.modes.end(), [](int m) { return m == 0; });
  if (!shape_vanishes && !identically_zero(exact.u_time)) {
    throw std::invalid_argument("manufactured u does not vanish on the boundary");
  }
  if (params.alpha > 0.0 && std::abs(exact.u_time.value(0.0)) > 1e-14) {
    throw std::invalid_argument("manufactured u must vanish at t = 0 when alpha > 0");
  }
  if (params.beta > 0.0 && std::abs(exact.v_time.value(0.0)) > 1e-14) {
    throw std::invalid_argument("manufactured v must vanish at t = 0 when beta > 0");
  }
  SourcePair pair;
  pair.f = ManufacturedSource{exact, SourceRole::Bulk, params, discrete_laplacian};
  pair.g = ManufacturedSource{exact, SourceRole::Surface, params, discrete_laplacian};
  return pair;
}

std::string to_string(Regime regime)
{
  switch (regime) {
  case Regime::Parabolic: return "alpha>0,beta>0";
  case Regime::EllipticMemory: return "alpha=0,beta>0";
  case Regime::AlgebraicMemory: return "alpha>0,beta=0";
  }
  return "?";
}

MmsCase mms_case(Regime regime)
{
  MmsCase mms;
  mms.regime = regime;
  mms.exact.modes = {1, 1, 1};
  switch (regime) {
  case Regime::Parabolic:
    mms.params = derive_params(3, 1.0, 1.0, 1.0, 1.0);
    mms.exact.u_time = TimeProfile{{}, 1.0, 2.0, 0.0, 0.0};
    mms.exact.v_time = TimeProfile{{}, 0.0, 0.0, 1.0, 1.0};
    break;
  case Regime::EllipticMemory:
    mms.params = derive_params(3, 1.0, 1.0, 0.0, 1.0);
    mms.exact.u_time = TimeProfile{{1.0}, 1.0, 2.0, 0.0, 0.0};
    mms.exact.v_time = TimeProfile{{}, 0.0, 0.0, 1.0, 1.0};
    break;
  case Regime::AlgebraicMemory:
    mms.params = derive_params(3, 1.0, 1.0, 1.0, 0.0);
    mms.exact.u_time = TimeProfile{{}, 1.0, 2.0, 0.0, 0.0};
    mms.exact.v_time = TimeProfile{{1.0, 0.0, -0.5}, 0.0, 0.0, 0.0, 0.0};
    break;
  }
  return mms;
}

MmsError mms_error(const MmsCase& mms, int cells_per_axis, double dt, double T,
                   MemoryScheme scheme, double tol, bool discrete_laplacian)
{
  const Grid grid(mms.params.n, cells_per_axis);
  const SourcePair sources = manufacture_sources(mms.exact, mms.params, discrete_laplacian);
  const SolverOptions options{scheme, tol, 20000};

  CoupledState state = initial_state(grid, sources, mms.params, options);
  const long steps = step_count(T, dt);
  for (long k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? T - state.t : dt;
    state = advance(state, h, grid, sources, mms.params, options);
  }
  MmsError err;
  err.u = grid.l2_norm(state.u - manufactured_u(mms.exact, grid, T));
  err.v = grid.l2_norm(state.memory.v - manufactured_v(mms.exact, grid, T));
  err.combined = std::hypot(err.u, err.v);
  return err;
}

// --- convergence studies --------------------------------------------------------

ConvergenceReport space_study(const MmsCase& mms, const std::vector<int>& cells, double dt_factor,
                              double T)
{
  ConvergenceReport report;
  report.study = "space/" + to_string(mms.regime);
  report.norm_kind = "L2-space";
  report.expected_order = 2.0;
  report.tolerance = 0.2;
  report.errors.resize(cells.size());
  for (int c : cells) report.resolutions.push_back(1.0 / c);
  parallel_for(cells.size(), [&](std::size_t i) {
    const double h = 1.0 / cells[i];
    report.errors[i] = mms_error(mms, cells[i], dt_factor * h * h, T).combined;
  });
  report.finalize();
  return report;
}

ConvergenceReport time_study(const MmsCase& mms, int cells, const std::vector<double>& dts,
                             double T)
{
  ConvergenceReport report;
  report.study = "time/" + to_string(mms.regime);
  report.norm_kind = "L2-space";
  report.expected_order = 1.0;
  report.tolerance = 0.2;
  report.resolutions = dts;
  report.errors.resize(dts.size());
  parallel_for(dts.size(), [&](std::size_t i) {
    report.errors[i] =
        mms_error(mms, cells, dts[i], T, MemoryScheme::BackwardEuler, 1e-12, true).combined;
  });
  report.finalize();
  return report;
}

namespace {

SourcePair beta_limit_sources()
{
  SourcePair s;
  s.f = SeparableSineSource{{SineTerm{2.0, {1, 1, 1}, 3.0, 0.0}, SineTerm{0.5, {1, 2, 1}, 0.0, 0.0}},
                            false};
  s.g = SeparableSineSource{{SineTerm{1.0, {1, 1, 1}, 2.0, 0.5}}, false};
  return s;
}

CoupledState run_to(const ModelParams& params, const Grid& grid, const SourcePair& sources,
                    double dt, double T)
{
  const SolverOptions options{MemoryScheme::BackwardEuler, 1e-12, 20000};
  CoupledState state = initial_state(grid, sources, params, options);
  const long steps = step_count(T, dt);
  for (long k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? T - state.t : dt;
    state = advance(state, h, grid, sources, params, options);
  }
  return state;
}

} // namespace

BetaLimitReport beta_limit_study(const ModelParams& params, int cells, double dt, double T,
                                 const std::vector<double>& betas)
{
  const Grid grid(params.n, cells);
  const SourcePair sources = beta_limit_sources();
  const ModelParams limit_params =
      derive_params(params.n, params.C0, params.lambda, params.alpha, 0.0);
  const CoupledState limit = run_to(limit_params, grid, sources, dt, T);

  BetaLimitReport out;
  out.report.study = "beta-limit";
  out.report.norm_kind = "L2-space";
  out.report.expected_order = 1.0;
  out.report.tolerance = 0.2;
  out.report.resolutions = betas;
  out.report.errors.resize(betas.size());
  parallel_for(betas.size(), [&](std::size_t i) {
    const ModelParams p = derive_params(params.n, params.C0, params.lambda, params.alpha, betas[i]);
    const CoupledState s = run_to(p, grid, sources, dt, T);
    out.report.errors[i] =
        std::hypot(grid.l2_norm(s.u - limit.u), grid.l2_norm(s.memory.v - limit.memory.v));
  });
  out.report.finalize();
  out.monotone = true;
  for (std::size_t i = 1; i < betas.size(); ++i) {
    out.monotone = out.monotone && out.report.errors[i] < out.report.errors[i - 1];
  }
  if (betas.size() >= 2) {
    out.last_ratio = out.report.errors.back() / out.report.errors[betas.size() - 2];
  }
  return out;
}

ConvergenceReport cell_eps_study(const ModelParams& params, const std::vector<double>& eps)
{
  ConvergenceReport report;
  report.study = "cell-eps";
  report.norm_kind = "Linf";
  report.expected_order = 2.0;
  report.tolerance = 0.1;
  report.resolutions = eps;
  for (double e : eps) {
    report.errors.push_back(std::abs(effective_coefficient(e, params) - params.A_strange));
  }
  report.finalize();
  return report;
}

ConvergenceReport convergence_study(StudyKind kind, int levels, const StudyBase& base)
{
  if (levels < 3) throw std::invalid_argument("convergence_study needs at least 3 levels");
  switch (kind) {
  case StudyKind::Space: {
    std::vector<int> cells;
    for (int l = 0; l < levels; ++l) cells.push_back(base.coarse_cells << l);
    return space_study(mms_case(base.regime), cells, base.dt_factor, base.T);
  }
  case StudyKind::Time: {
    std::vector<double> dts;
    for (int l = 0; l < levels; ++l) dts.push_back(base.coarse_dt / (1 << l));
    return time_study(mms_case(base.regime), base.fixed_cells, dts, base.time_T);
  }
  case StudyKind::BetaLimit: {
    std::vector<double> betas;
    for (int l = 0; l < levels; ++l) betas.push_back(base.coarse_beta * std::pow(0.1, l));
    return beta_limit_study(base.params, base.beta_cells, base.beta_dt, base.beta_T, betas).report;
  }
  case StudyKind::CellEps: {
    std::vector<double> eps;
    for (int l = 0; l < levels; ++l) eps.push_back(base.coarse_eps / (1 << l));
    return cell_eps_study(base.params, eps);
  }
  }
  throw std::invalid_argument("unknown study kind");
}

// --- comparison principle --------------------------------------------------------

std::string to_string(ComparisonCase c)
{
  switch (c) {
  case ComparisonCase::AlphaBeta: return "alpha-beta";
  case ComparisonCase::AlphaOnly: return "alpha-only";
  case ComparisonCase::BetaOnly: return "beta-only";
  }
  return "?";
}

ModelParams comparison_params(ComparisonCase c, double lambda)
{
  switch (c) {
  case ComparisonCase::AlphaBeta: return derive_params(3, 1.0, lambda, 1.0, 1.0);
  case ComparisonCase::AlphaOnly: return derive_params(3, 1.0, lambda, 1.0, 0.0);
  case ComparisonCase::BetaOnly: return derive_params(3, 1.0, lambda, 0.0, 1.0);
  }
  throw std::invalid_argument("unknown comparison case");
}

SourcePair random_nonpositive_sources(std::uint64_t seed, int dim)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amplitude(0.2, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> mode(1, 3);
  auto draw = [&] {
    SeparableSineSource src;
    src.negated_square = true;
    for (int j = 0; j < 3; ++j) {
      SineTerm term;
      term.amplitude = amplitude(rng);
      for (int d = 0; d < dim; ++d) term.modes.push_back(mode(rng));
      term.omega = angle(rng);
      term.phase = angle(rng);
      src.terms.push_back(std::move(term));
    }
    return src;
  };
  SourcePair pair;
  pair.f = draw();
  pair.g = draw();
  return pair;
}

TrialResult run_comparison(const ModelParams& params, const SourcePair& sources,
                           const TrialConfig& config)
{
  const Grid grid(params.n, config.cells);
  const SolverOptions options{MemoryScheme::BackwardEuler, config.tol, 20000};
  CoupledState state = initial_state(grid, sources, params, options);
  TrialResult out;
  out.max_u = state.u.maxCoeff();
  out.max_v = state.memory.v.maxCoeff();
  const long steps = step_count(config.T, config.dt);
  for (long k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? config.T - state.t : config.dt;
    state = advance(state, h, grid, sources, params, options);
    out.max_u = std::max(out.max_u, state.u.maxCoeff());
    out.max_v = std::max(out.max_v, state.memory.v.maxCoeff());
  }
  return out;
}

TrialResult comparison_trial(std::uint64_t seed, ComparisonCase c, const TrialConfig& config)
{
  const ModelParams params = comparison_params(c, config.lambda);
  return run_comparison(params, random_nonpositive_sources(seed, params.n), config);
}

// --- memory kernel --------------------------------------------------------------

std::string to_string(KernelInput input)
{
  switch (input) {
  case KernelInput::Constant: return "constant";
  case KernelInput::Ramp: return "ramp";
  case KernelInput::Sinusoid: return "sinusoid";
  }
  return "?";
}

KernelInput parse_kernel_input(const std::string& name)
{
  if (name == "constant") return KernelInput::Constant;
  if (name == "ramp") return KernelInput::Ramp;
  if (name == "sinusoid") return KernelInput::Sinusoid;
  throw std::invalid_argument("unknown kernel input: " + name +
                              " (expected constant, ramp or sinusoid)");
}

std::vector<double> default_kernel_dts(MemoryScheme scheme)
{
  const int first = scheme == MemoryScheme::BackwardEuler ? 16 : 6;
  std::vector<double> dts;
  for (int l = 0; l < 5; ++l) dts.push_back(std::ldexp(1.0, -(first + l)));
  return dts;
}

namespace {

struct KernelInputs {
  Eigen::VectorXd u_amp;
  Eigen::VectorXd g_amp;
  KernelInput kind;

  double profile_u(double t) const
  {
    switch (kind) {
    case KernelInput::Constant: return 1.0;
    case KernelInput::Ramp: return t;
    case KernelInput::Sinusoid: return std::sin(2.0 * std::numbers::pi * t);
    }
    return 0.0;
  }
  double profile_g(double t) const
  {
    switch (kind) {
    case KernelInput::Constant: return 1.0;
    case KernelInput::Ramp: return t;
    case KernelInput::Sinusoid: return std::cos(2.0 * std::numbers::pi * t);
    }
    return 0.0;
  }
  Eigen::VectorXd u(double t) const { return profile_u(t) * u_amp; }
  Eigen::VectorXd g(double t) const { return profile_g(t) * g_amp; }
};

} // namespace

KernelStudyResult kernel_equivalence_study(KernelInput input, const ModelParams& params,
                                           const KernelStudyOptions& options)
{
  if (!(params.beta > 0.0)) {
    throw std::invalid_argument("kernel equivalence study requires beta > 0");
  }
  const std::vector<double> dts =
      options.dts.empty() ? default_kernel_dts(options.scheme) : options.dts;
  const int points = std::max(options.points, 1);
  KernelInputs in{Eigen::VectorXd::LinSpaced(points, 0.5, 1.5),
                  Eigen::VectorXd::LinSpaced(points, -0.25, 0.25), input};
  const int probe = std::clamp(options.probe, 0, points - 1);

  KernelStudyResult result;
  auto& report = result.report;
  report.study = "kernel/" + to_string(input) + "/" + to_string(options.scheme);
  report.norm_kind = "Linf";
  report.expected_order = options.scheme == MemoryScheme::BackwardEuler ? 1.0 : 2.0;
  report.tolerance = 0.2;
  report.resolutions = dts;
  report.errors.assign(dts.size(), 0.0);

  std::vector<std::vector<KernelTracePoint>> traces(dts.size());
  parallel_for(dts.size(), [&](std::size_t level) {
    const double dt = dts[level];
    const long steps = step_count(options.T, dt);
    const int sub = std::max(1, static_cast<int>(std::ceil(dt / options.oracle_spacing - 1e-9)));
    const double ds = dt / sub;

    auto ode = initial_memory(in.u(0.0), in.g(0.0), params);
    KernelConvolution<double> reference(params, points);
    reference.start(in.u(0.0), in.g(0.0));
    double worst = 0.0;
    if (level == 0) traces[level].push_back({0.0, ode.v[probe], reference.value()[probe]});
    for (long k = 1; k <= steps; ++k) {
      const double t0 = (k - 1) * dt;
      for (int j = 1; j <= sub; ++j) {
        const double s = t0 + j * ds;
        reference.advance(ds, in.u(s), in.g(s));
      }
      const double t = k * dt;
      ode = step_memory(ode, in.u(t), in.g(t), dt, params, options.scheme);
      worst = std::max(worst, (ode.v - reference.value()).cwiseAbs().maxCoeff());
      if (level == 0) traces[level].push_back({t, ode.v[probe], reference.value()[probe]});
    }
    report.errors[level] = worst;
  });
  report.finalize();
  result.finest_discrepancy = report.errors.back();
  result.trace = std::move(traces.front());
  return result;
}

// --- steady state, stability, weak residual -------------------------------------

SteadyStateResult elliptic_steady_state(const ModelParams& params, int cells, double f_value,
                                        double g_value, double dt, double T, double tol)
{
  if (params.alpha != 0.0) {
    throw std::invalid_argument("elliptic_steady_state expects alpha = 0");
  }
  const Grid grid(params.n, cells);
  SourcePair sources{ConstantSource{f_value}, ConstantSource{g_value}};
  const SolverOptions options{MemoryScheme::BackwardEuler, tol, 20000};
  CoupledState state = initial_state(grid, sources, params, options);
  SteadyStateResult out;
  out.steps = step_count(T, dt);
  for (long k = 1; k <= out.steps; ++k) {
    state = advance(state, dt, grid, sources, params, options);
  }
  const Field v_inf = (params.uptake() * state.u.array() + g_value).matrix() / params.mu;
  const Field residual = assemble_operator(grid) * state.u +
                         params.A_strange * (state.u - v_inf) - Field::Constant(grid.size(), f_value);
  out.residual = residual.cwiseAbs().maxCoeff();
  out.memory_residual =
      (params.mu * state.memory.v.array() - params.uptake() * state.u.array() - g_value)
          .abs()
          .maxCoeff();
  return out;
}

StabilitySweep stability_sweep(const ModelParams& params, int trials, std::uint64_t seed)
{
  const Grid grid(params.n, 6);
  const int samples = 201;
  const double T = 1.0;
  StabilitySweep sweep;
  sweep.trials = trials;
  std::vector<double> ratios(static_cast<std::size_t>(trials), 0.0);
  std::vector<char> ok(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    const SourcePair data = random_nonpositive_sources(seed + trial, params.n);
    // Flip the sign of phi's square so both signs appear; add a linear-in-t part.
    auto phi_src = std::get<SeparableSineSource>(data.f);
    phi_src.negated_square = (trial % 2 == 0);
    auto g_src = std::get<SeparableSineSource>(data.g);
    g_src.negated_square = false;
    std::vector<Eigen::VectorXd> phi, g;
    for (int j = 0; j < samples; ++j) {
      const double t = T * j / (samples - 1);
      phi.push_back(evaluate(phi_src, grid, t) * (1.0 + t));
      g.push_back(evaluate(g_src, grid, t));
    }
    const auto check = stability_bound_check(phi, g, T, params, grid.cell_volume());
    ok[trial] = check.ok;
    ratios[trial] = check.rhs > 0.0 ? check.lhs / check.rhs : 0.0;
  });
  for (int i = 0; i < trials; ++i) {
    sweep.passed += ok[static_cast<std::size_t>(i)] ? 1 : 0;
    sweep.worst_ratio = std::max(sweep.worst_ratio, ratios[static_cast<std::size_t>(i)]);
  }
  return sweep;
}

std::vector<CoupledState> manufactured_history(const MmsCase& mms, const Grid& grid, double dt,
                                               double T)
{
  std::vector<CoupledState> history;
  const long steps = step_count(T, dt);
  for (long k = 0; k <= steps; ++k) {
    const double t = (k == steps) ? T : k * dt;
    CoupledState s;
    s.t = t;
    s.step_index = k;
    s.u = manufactured_u(mms.exact, grid, t);
    s.memory.v = manufactured_v(mms.exact, grid, t);
    s.memory.t = t;
    history.push_back(std::move(s));
  }
  return history;
}

WeakResidualStudy weak_residual_study(const MmsCase& mms, int coarse_cells, double dt_factor,
                                      double T)
{
  WeakResidualStudy study;
  study.cells = {coarse_cells, 2 * coarse_cells};
  study.residuals.resize(2);
  const SourcePair sources = manufacture_sources(mms.exact, mms.params);
  parallel_for(2, [&](std::size_t i) {
    const Grid grid(mms.params.n, study.cells[i]);
    const double h = 1.0 / study.cells[i];
    const auto history = manufactured_history(mms, grid, dt_factor * h * h, T);
    study.residuals[i] = weak_residual(history, grid, sources, mms.params).max_abs;
  });
  study.ratio = study.residuals[0] / study.residuals[1];
  return study;
}

} // namespace memostrange
