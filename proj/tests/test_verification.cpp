#include "memostrange/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace memostrange;
using doctest::Approx;

namespace {
const ModelParams unit3 = derive_params(3, 1.0, 1.0, 1.0, 1.0);
}

TEST_CASE("order fit")
{
  const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * x * x);
  CHECK(fit_order(h, e) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_order({0.1}, {1.0}), std::invalid_argument);

  ConvergenceReport r;
  r.resolutions = h;
  r.errors = e;
  r.expected_order = 2.0;
  r.tolerance = 0.1;
  r.finalize();
  CHECK(r.pass);
  r.errors[3] = 0.0;
  r.finalize();
  CHECK_FALSE(r.pass);
}

TEST_CASE("worker count honours the environment cap")
{
  setenv("MEMOSTRANGE_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  std::vector<int> hits(7, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(hits == std::vector<int>(7, 1));
  unsetenv("MEMOSTRANGE_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("manufactured sources")
{
  const Grid g(3, 8);
  const std::vector<double> centre{0.5, 0.5, 0.5};

  ManufacturedSolution zero;
  zero.modes = {1, 1, 1};
  const SourcePair z = manufacture_sources(zero, unit3);
  CHECK(evaluate(z.f, g, 0.3).isZero());
  CHECK(evaluate(z.g, g, 0.3).isZero());

  // u = t S, v = (1 - exp(-mu t / beta)) S.
  ManufacturedSolution sol;
  sol.modes = {1, 1, 1};
  sol.u_time = TimeProfile{{0.0, 1.0}, 0.0, 0.0, 0.0, 0.0};
  sol.v_time = TimeProfile{{}, 0.0, 0.0, 1.0, 2.0};
  const SourcePair s = manufacture_sources(sol, unit3);
  CHECK(evaluate_at(s.f, g, centre, 1.0) == Approx(32.30948652961862).epsilon(1e-13));
  CHECK(evaluate_at(s.g, g, centre, 1.0) == Approx(1.0).epsilon(1e-13));

  // Finite-difference cross-check of the time derivative used for f.
  const double d = 1e-5;
  const double fd = (sol.u_time.value(1.0 + d) - sol.u_time.value(1.0 - d)) / (2 * d);
  CHECK(fd == Approx(sol.u_time.derivative(1.0)).epsilon(1e-6));
  const double fdv = (sol.v_time.value(0.7 + d) - sol.v_time.value(0.7 - d)) / (2 * d);
  CHECK(fdv == Approx(sol.v_time.derivative(0.7)).epsilon(1e-6));

  // v is the exact memory response to u: g vanishes.
  const double k = unit3.uptake(), mu = unit3.mu, beta = unit3.beta;
  ManufacturedSolution response = sol;
  response.v_time = TimeProfile{{0.0, k / mu}, 0.0, 0.0, -k * beta / (mu * mu), mu / beta};
  const SourcePair r = manufacture_sources(response, unit3);
  CHECK(evaluate(r.g, g, 0.8).lpNorm<Eigen::Infinity>() <= 1e-14);

  // Point and field evaluation agree.
  const Field f = evaluate(s.f, g, 0.4);
  std::vector<double> x(3);
  g.coordinates(17, x);
  CHECK(f[17] == Approx(evaluate_at(s.f, g, x, 0.4)).epsilon(1e-13));

  ManufacturedSolution bad = sol;
  bad.u_time.poly = {1.0};
  CHECK_THROWS_AS(manufacture_sources(bad, unit3), std::invalid_argument);
}

TEST_CASE("discrete-Laplacian sources make the sampled pair a steady discrete solution")
{
  const ModelParams p = derive_params(3, 1.0, 1.0, 0.0, 1.0);
  ManufacturedSolution sol;
  sol.modes = {1, 2, 1};
  sol.u_time = TimeProfile{{0.5}, 0.0, 0.0, 0.0, 0.0};
  sol.v_time = TimeProfile{};
  const Grid g(3, 10);
  const SourcePair s = manufacture_sources(sol, p, true);
  const CoupledState st = initial_state(g, s, p, {MemoryScheme::BackwardEuler, 1e-13, 1000});
  CHECK((st.u - manufactured_u(sol, g, 0.0)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("regime cases")
{
  CHECK(mms_case(Regime::EllipticMemory).params.alpha == 0.0);
  CHECK(mms_case(Regime::AlgebraicMemory).params.beta == 0.0);
  CHECK(to_string(Regime::Parabolic) == "alpha>0,beta>0");
  for (Regime r : {Regime::Parabolic, Regime::EllipticMemory, Regime::AlgebraicMemory}) {
    const MmsCase c = mms_case(r);
    CHECK_NOTHROW(manufacture_sources(c.exact, c.params));
  }
}

TEST_CASE("time study on a small grid")
{
  const ConvergenceReport r =
      time_study(mms_case(Regime::AlgebraicMemory), 8, {0.1, 0.05, 0.025, 0.0125}, 1.0);
  CHECK(r.pass);
  CHECK(r.fitted_order == Approx(1.0).epsilon(0.05));
}

TEST_CASE("cell-eps study")
{
  const ConvergenceReport r = cell_eps_study(unit3, {0.1, 0.05, 0.025, 0.0125});
  CHECK(r.pass);
  CHECK(r.fitted_order == Approx(2.0).epsilon(0.05));
  CHECK_THROWS_AS(convergence_study(StudyKind::CellEps, 2, StudyBase{}), std::invalid_argument);
  CHECK(convergence_study(StudyKind::CellEps, 4, StudyBase{}).pass);
}

TEST_CASE("comparison principle")
{
  CHECK(comparison_params(ComparisonCase::AlphaOnly).beta == 0.0);
  CHECK(comparison_params(ComparisonCase::BetaOnly).alpha == 0.0);

  TrialConfig small;
  small.cells = 8;
  small.T = 0.5;
  small.dt = 0.05;
  const TrialResult zero = run_comparison(unit3, SourcePair{}, small);
  CHECK(zero.max_u == 0.0);
  CHECK(zero.max_v == 0.0);

  SourcePair negative;
  negative.f = ConstantSource{-1.0};
  const TrialResult neg = run_comparison(unit3, negative, TrialConfig{});
  CHECK(neg.max_u <= 1e-10);
  CHECK(neg.max_v <= 1e-10);

  const SourcePair a = random_nonpositive_sources(5, 3);
  const SourcePair b = random_nonpositive_sources(5, 3);
  CHECK(source_kind(a.f) == "separable-sine");
  CHECK(evaluate(a.f, Grid(3, 6), 0.3) == evaluate(b.f, Grid(3, 6), 0.3));
  CHECK(evaluate(a.g, Grid(3, 6), 0.7).maxCoeff() <= 0.0);

  for (ComparisonCase c :
       {ComparisonCase::AlphaBeta, ComparisonCase::AlphaOnly, ComparisonCase::BetaOnly}) {
    const TrialResult t = comparison_trial(11, c, small);
    CHECK(t.max_u <= 1e-10);
    CHECK(t.max_v <= 1e-10);
  }
}

TEST_CASE("kernel equivalence")
{
  CHECK(parse_kernel_input("ramp") == KernelInput::Ramp);
  CHECK_THROWS_AS(parse_kernel_input("step"), std::invalid_argument);
  KernelStudyOptions o;
  o.scheme = MemoryScheme::Trapezoid;
  const KernelStudyResult r = kernel_equivalence_study(KernelInput::Sinusoid, unit3, o);
  CHECK(r.report.pass);
  CHECK(r.finest_discrepancy <= 1e-6);
  CHECK_FALSE(r.trace.empty());
}

TEST_CASE("beta limit")
{
  const BetaLimitReport r = beta_limit_study(unit3, 8, 0.05, 1.0, {1e-2, 1e-3, 1e-4});
  CHECK(r.monotone);
  CHECK(r.last_ratio < 1.0);
}

TEST_CASE("elliptic steady state")
{
  const SteadyStateResult r =
      elliptic_steady_state(derive_params(3, 1.0, 1.0, 0.0, 1.0), 8, 1.0, 0.5, 1.0, 50.0);
  CHECK(r.residual <= 1e-8);
  CHECK(r.memory_residual <= 1e-8);
}

TEST_CASE("stability sweep")
{
  for (double beta : {0.0, 1.0}) {
    const StabilitySweep s = stability_sweep(derive_params(3, 1.0, 1.0, 1.0, beta), 10, 99);
    CHECK(s.passed == s.trials);
    CHECK(s.worst_ratio < 1.0);
  }
}
