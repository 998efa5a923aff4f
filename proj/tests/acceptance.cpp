// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "memostrange/cell_problem.hpp"
#include "memostrange/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace memostrange;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body)
{
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = elapsed < limit_s;
  const bool ok = out.ok && in_time;
  if (!ok) ++failures;
  std::printf("%s [%d] %s: %s (%.2fs, limit %.0fs%s)\n", ok ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), elapsed, limit_s, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

Outcome cell_closed_form()
{
  double worst_w = 0.0;
  double worst_flux = 0.0;
  for (int n : {3, 4}) {
    for (double C0 : {0.5, 1.0, 2.0}) {
      for (double eps : {0.1, 0.05}) {
        const ModelParams p = derive_params(n, C0, 1.0, 1.0, 1.0);
        const CellSolution s = solve_cell_radial(eps, p, 2000);
        for (Eigen::Index i = 0; i < s.r_samples.size(); ++i) {
          worst_w = std::max(worst_w, std::abs(s.w_values[i] - w_exact(s.r_samples[i], eps, p)));
        }
        const BoundaryFluxes f = boundary_fluxes(eps, p);
        worst_flux = std::max({worst_flux, std::abs(s.flux_inner / f.inner - 1.0),
                               std::abs(s.flux_outer / f.outer - 1.0)});
      }
    }
  }
  return {worst_w <= 1e-6 && worst_flux <= 1e-4,
          fmt("max |w - w_exact| = %.2e, max flux rel err = %.2e", worst_w, worst_flux)};
}

Outcome strange_constant()
{
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  double worst_identity = 0.0;
  for (int n : {3, 4}) {
    for (double C0 : {0.5, 1.0, 2.0}) {
      const ModelParams p = derive_params(n, C0, 1.0, 1.0, 1.0);
      const double capacity = (n - 2) * std::pow(C0, n - 2) * unit_sphere_area(n);
      for (double e : eps) {
        const double lhs = effective_coefficient(e, p) * (1.0 - cell_alpha(e, p));
        worst_identity = std::max(worst_identity, std::abs(lhs / capacity - 1.0));
      }
    }
  }
  const ModelParams p3 = derive_params(3, 1.0, 1.0, 1.0, 1.0);
  const ConvergenceReport r = cell_eps_study(p3, eps);
  const double limit_err = std::abs(p3.A_strange / (4.0 * std::numbers::pi) - 1.0);
  const bool order_ok = std::abs(r.fitted_order - 2.0) <= 0.1;
  return {worst_identity <= 1e-12 && order_ok && limit_err <= 1e-12,
          fmt("identity rel err = %.2e, order = %.3f, |A/4pi - 1| = %.2e", worst_identity,
              r.fitted_order, limit_err)};
}

Outcome memory_oracle()
{
  const ModelParams p = derive_params(3, 1.0, 1.0, 1.0, 1.0);
  bool ok = true;
  std::string detail;
  for (MemoryScheme scheme : {MemoryScheme::BackwardEuler, MemoryScheme::Trapezoid}) {
    for (KernelInput input : {KernelInput::Constant, KernelInput::Ramp, KernelInput::Sinusoid}) {
      KernelStudyOptions options;
      options.scheme = scheme;
      const KernelStudyResult r = kernel_equivalence_study(input, p, options);
      const bool level_ok = r.report.pass && r.finest_discrepancy <= 1e-6;
      ok = ok && level_ok;
      detail += fmt("%s%s/%s order %.3f finest %.1e", detail.empty() ? "" : ", ",
                    to_string(scheme).c_str(), to_string(input).c_str(), r.report.fitted_order,
                    r.finest_discrepancy);
    }
  }
  return {ok, detail};
}

Outcome mms_convergence()
{
  bool ok = true;
  std::string detail;
  for (Regime regime : {Regime::Parabolic, Regime::EllipticMemory, Regime::AlgebraicMemory}) {
    const MmsCase mms = mms_case(regime);
    const ConvergenceReport space = space_study(mms, {8, 16, 32}, 0.5, 0.25);
    const ConvergenceReport time = time_study(mms, 32, {0.1, 0.05, 0.025, 0.0125}, 1.0);
    ok = ok && space.pass && time.pass;
    detail += fmt("%s%s space %.3f time %.3f", detail.empty() ? "" : ", ",
                  to_string(regime).c_str(), space.fitted_order, time.fitted_order);
  }
  return {ok, detail};
}

Outcome comparison_principle()
{
  double worst = -1e300;
  for (ComparisonCase c :
       {ComparisonCase::AlphaBeta, ComparisonCase::AlphaOnly, ComparisonCase::BetaOnly}) {
    std::vector<TrialResult> results(20);
    parallel_for(results.size(), [&](std::size_t i) { results[i] = comparison_trial(1000 + i, c); });
    for (const auto& r : results) worst = std::max({worst, r.max_u, r.max_v});
  }
  return {worst <= 1e-10, fmt("60 trials, max(u, v) over all snapshots = %.2e", worst)};
}

Outcome beta_limit()
{
  const BetaLimitReport r =
      beta_limit_study(derive_params(3, 1.0, 1.0, 1.0, 1.0), 16, 1e-2, 1.0, {1e-2, 1e-3, 1e-4});
  const auto& e = r.report.errors;
  const bool below = e[2] < 10.0 * e[1];
  return {r.monotone && below,
          fmt("errors %.2e %.2e %.2e, monotone %s", e[0], e[1], e[2], r.monotone ? "yes" : "no")};
}

Outcome elliptic_steady()
{
  const SteadyStateResult r =
      elliptic_steady_state(derive_params(3, 1.0, 1.0, 0.0, 1.0), 16, 1.0, 0.5, 1.0, 50.0);
  return {r.residual <= 1e-8 && r.memory_residual <= 1e-8,
          fmt("residual %.2e, memory residual %.2e", r.residual, r.memory_residual)};
}

Outcome stability()
{
  const StabilitySweep r = stability_sweep(derive_params(3, 1.0, 1.0, 1.0, 1.0), 50, 20261018);
  return {r.passed == r.trials && r.trials == 50,
          fmt("%d/%d histories, worst lhs/rhs %.3f", r.passed, r.trials, r.worst_ratio)};
}

Outcome weak_residual_drop()
{
  const WeakResidualStudy r = weak_residual_study(mms_case(Regime::Parabolic), 8, 0.5, 0.25);
  return {std::abs(r.ratio - 4.0) <= 1.0,
          fmt("residual %.3e -> %.3e, ratio %.3f", r.residuals[0], r.residuals[1], r.ratio)};
}

} // namespace

int main()
{
  criterion(1, "cell closed form", 5, cell_closed_form);
  criterion(2, "strange constant", 1, strange_constant);
  criterion(3, "memory oracle equivalence", 10, memory_oracle);
  criterion(4, "MMS convergence", 300, mms_convergence);
  criterion(5, "comparison principle", 180, comparison_principle);
  criterion(6, "beta -> 0 consistency", 120, beta_limit);
  criterion(7, "alpha = 0 steady state", 60, elliptic_steady);
  criterion(8, "stability bound", 30, stability);
  criterion(9, "weak residual", 120, weak_residual_drop);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
