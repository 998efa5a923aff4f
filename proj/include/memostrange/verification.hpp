#pragma once

#include "memostrange/macro_solver.hpp"
#include "memostrange/memory_term.hpp"
#include "memostrange/model_params.hpp"
#include "memostrange/sources.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace memostrange {

/// Least-squares slope of log(error) against log(resolution).
double fit_order(const std::vector<double>& resolutions, const std::vector<double>& errors);

struct ConvergenceReport {
  std::string study;
  std::string norm_kind; ///< "Linf", "L2-space" or "L2-spacetime"
  std::vector<double> resolutions;
  std::vector<double> errors;
  double fitted_order = 0.0;
  double expected_order = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  /// Fits the order and sets `pass` from expected_order +- tolerance.
  void finalize();
};

/// Worker count for independent trials: MEMOSTRANGE_THREADS when set,
/// otherwise the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// --- manufactured solutions -------------------------------------------------

/// f := alpha u_t - Delta u + A (u - v), g := beta v_t + mu v - (n-2)/C0 u.
/// Throws std::invalid_argument when the pair violates the boundary data or
/// the initial conditions alpha u(0) = 0, beta v(0) = 0. With
/// `discrete_laplacian` f is built with the eigenvalue of -Delta_h.
SourcePair manufacture_sources(const ManufacturedSolution& exact, const ModelParams& params,
                               bool discrete_laplacian = false);

enum class Regime { Parabolic, EllipticMemory, AlgebraicMemory };

std::string to_string(Regime regime);

struct MmsCase {
  Regime regime = Regime::Parabolic;
  ModelParams params;
  ManufacturedSolution exact;
};

/// Smooth manufactured pair for each of the three alpha/beta regimes
/// (n = 3, C0 = 1, lambda = 1).
MmsCase mms_case(Regime regime);

struct MmsError {
  double u = 0.0;
  double v = 0.0;
  double combined = 0.0; ///< sqrt(u^2 + v^2), grid L2 at the final time
};

/// Runs the coupled solver with manufactured sources and returns the grid L2
/// errors at time T. `discrete_laplacian` removes the spatial error so that
/// only the time discretisation remains.
MmsError mms_error(const MmsCase& mms, int cells_per_axis, double dt, double T,
                   MemoryScheme scheme = MemoryScheme::BackwardEuler, double tol = 1e-12,
                   bool discrete_laplacian = false);

// --- convergence studies ------------------------------------------------------

enum class StudyKind { Space, Time, BetaLimit, CellEps };

/// Knobs shared by the studies; each study reads the fields it needs.
struct StudyBase {
  Regime regime = Regime::Parabolic;
  int coarse_cells = 8;        ///< space: doubled per level
  double dt_factor = 0.5;      ///< space: dt = dt_factor h^2
  int fixed_cells = 32;        ///< time
  double coarse_dt = 0.1;      ///< time: halved per level
  double T = 0.25;             ///< space
  double time_T = 1.0;         ///< time
  double coarse_beta = 1e-2;   ///< beta-limit: divided by 10 per level
  double beta_dt = 1e-2;       ///< beta-limit
  int beta_cells = 16;         ///< beta-limit
  double beta_T = 1.0;         ///< beta-limit
  double coarse_eps = 0.1;     ///< cell-eps: halved per level
  ModelParams params = derive_params(3, 1.0, 1.0, 1.0, 1.0); ///< beta-limit, cell-eps
};

ConvergenceReport convergence_study(StudyKind kind, int levels, const StudyBase& base);

/// Space order with dt = dt_factor h^2 on the given cells_per_axis levels.
ConvergenceReport space_study(const MmsCase& mms, const std::vector<int>& cells, double dt_factor,
                              double T);

/// Time order with backward Euler on a fixed grid. The sources use the
/// discrete Laplacian, so the spatial error is zero.
ConvergenceReport time_study(const MmsCase& mms, int cells, const std::vector<double>& dts,
                             double T);

struct BetaLimitReport {
  ConvergenceReport report; ///< resolutions are the beta values
  bool monotone = false;
  double last_ratio = 0.0; ///< error(beta_last) / error(beta_previous)
};

/// Distance at time T, in grid L2 of (u, v), between beta > 0 runs and the
/// beta = 0 run with otherwise identical data.
BetaLimitReport beta_limit_study(const ModelParams& params, int cells, double dt, double T,
                                 const std::vector<double>& betas);

/// |effective_coefficient(eps) - A_strange| for each eps.
ConvergenceReport cell_eps_study(const ModelParams& params, const std::vector<double>& eps);

// --- comparison principle -----------------------------------------------------

enum class ComparisonCase { AlphaBeta, AlphaOnly, BetaOnly };

std::string to_string(ComparisonCase c);

struct TrialConfig {
  int cells = 16;
  double T = 1.0;
  double dt = 1e-2;
  double lambda = 1.0;
  double tol = 1e-12;
};

struct TrialResult {
  double max_u = 0.0;
  double max_v = 0.0;
};

/// Parameters of each lemma case: (alpha, beta) = (1, 1), (1, 0), (0, 1).
ModelParams comparison_params(ComparisonCase c, double lambda = 1.0);

/// Nonpositive smooth sources -(sum of trigonometric modes)^2, deterministic in seed.
SourcePair random_nonpositive_sources(std::uint64_t seed, int dim);

/// Largest values of u and v over every step of a run with the given sources.
TrialResult run_comparison(const ModelParams& params, const SourcePair& sources,
                           const TrialConfig& config);

TrialResult comparison_trial(std::uint64_t seed, ComparisonCase c, const TrialConfig& config = {});

// --- memory kernel ------------------------------------------------------------

enum class KernelInput { Constant, Ramp, Sinusoid };

std::string to_string(KernelInput input);
KernelInput parse_kernel_input(const std::string& name);

struct KernelTracePoint {
  double t = 0.0;
  double v_ode = 0.0;
  double v_conv = 0.0;
};

struct KernelStudyOptions {
  MemoryScheme scheme = MemoryScheme::BackwardEuler;
  std::vector<double> dts;       ///< empty: scheme default
  double T = 1.0;
  double oracle_spacing = 0x1p-17; ///< upper bound on the reference subinterval
  int points = 5;                ///< size of the sampled field
  int probe = 2;                 ///< node recorded in the trace
};

struct KernelStudyResult {
  ConvergenceReport report;
  double finest_discrepancy = 0.0;
  std::vector<KernelTracePoint> trace; ///< coarsest level, probe node
};

/// Default dt ladders: 2^-16..2^-20 for backward Euler, 2^-6..2^-10 for the
/// trapezoid rule.
std::vector<double> default_kernel_dts(MemoryScheme scheme);

/// Max over nodes and steps of |step_memory - convolution reference| per dt.
KernelStudyResult kernel_equivalence_study(KernelInput input, const ModelParams& params,
                                           const KernelStudyOptions& options);

// --- elliptic steady state, stability estimate, weak residual -------------------

struct SteadyStateResult {
  double residual = 0.0; ///< max |-Delta u + A (u - v_inf) - f|
  double memory_residual = 0.0; ///< max |mu v - (n-2)/C0 u - g|
  long steps = 0;
};

/// Long-time alpha = 0 run with time-independent f and g.
SteadyStateResult elliptic_steady_state(const ModelParams& params, int cells, double f_value,
                                        double g_value, double dt, double T, double tol = 1e-13);

struct StabilitySweep {
  int trials = 0;
  int passed = 0;
  double worst_ratio = 0.0; ///< max lhs / rhs
};

/// Random smooth (phi, g) space-time histories checked with stability_bound_check.
StabilitySweep stability_sweep(const ModelParams& params, int trials, std::uint64_t seed);

struct WeakResidualStudy {
  std::vector<int> cells;
  std::vector<double> residuals;
  double ratio = 0.0; ///< coarse / fine
};

/// Weak residual of the exact manufactured trajectory sampled on two grids
/// (cells, 2 cells) with dt = dt_factor h^2.
WeakResidualStudy weak_residual_study(const MmsCase& mms, int coarse_cells, double dt_factor,
                                      double T);

/// Exact manufactured trajectory on the grid at uniform steps.
std::vector<CoupledState> manufactured_history(const MmsCase& mms, const Grid& grid, double dt,
                                               double T);

} // namespace memostrange
