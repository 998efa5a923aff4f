#include "memostrange/cell_problem.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace memostrange;
using doctest::Approx;

namespace {
const ModelParams unit3 = derive_params(3, 1.0, 1.0, 1.0, 1.0);
}

TEST_CASE("closed form takes the boundary values")
{
  const double a = particle_radius(unit3, 0.1);
  CHECK(w_exact(a, 0.1, unit3) == Approx(1.0));
  CHECK(w_exact(0.025, 0.1, unit3) == Approx(0.0).epsilon(1e-15));
  CHECK(w_exact(0.01, 0.1, unit3) == Approx(0.0625).epsilon(1e-13));
  CHECK_THROWS_AS(w_exact(0.03, 0.1, unit3), std::domain_error);
}

TEST_CASE("alpha_eps")
{
  CHECK(cell_alpha(0.1, unit3) == Approx(0.04).epsilon(1e-14));
  const ModelParams p4 = derive_params(4, 0.5, 1.0, 1.0, 1.0);
  CHECK(cell_alpha(0.1, p4) == Approx(std::pow(4.0 * 0.5 * 0.01 / 0.1, 2)).epsilon(1e-14));
}

TEST_CASE("analytic fluxes")
{
  const BoundaryFluxes f = boundary_fluxes(0.1, unit3);
  CHECK(f.inner == Approx(-1041.6666666666667).epsilon(1e-12));
  CHECK(f.outer == Approx(-1.6666666666666667).epsilon(1e-12));
  // eps^gamma times the inner flux tends to -(n-2)/C0.
  const double eps = 1e-3;
  CHECK(std::pow(eps, unit3.gamma) * boundary_fluxes(eps, unit3).inner == Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("effective coefficient")
{
  CHECK(effective_coefficient(0.1, unit3) == Approx(13.089969389957473).epsilon(1e-13));
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const double v = effective_coefficient(eps, unit3) * (1.0 - cell_alpha(eps, unit3));
    CHECK(v == Approx(4.0 * std::numbers::pi).epsilon(1e-12));
  }
}

TEST_CASE("numerical radial solve")
{
  for (int n : {3, 4}) {
    const ModelParams p = derive_params(n, 1.0, 1.0, 1.0, 1.0);
    const CellSolution s = solve_cell_radial(0.1, p, 2000);
    REQUIRE(s.r_samples.size() == 2000);
    CHECK(s.w_values[0] == Approx(1.0));
    CHECK(s.w_values[s.w_values.size() - 1] == Approx(0.0));
    double err = 0.0;
    bool monotone = true;
    for (Eigen::Index i = 0; i < s.r_samples.size(); ++i) {
      err = std::max(err, std::abs(s.w_values[i] - w_exact(s.r_samples[i], 0.1, p)));
      if (i > 0) monotone = monotone && s.w_values[i] < s.w_values[i - 1];
    }
    CHECK(err <= 1e-6);
    CHECK(monotone);
    const BoundaryFluxes f = boundary_fluxes(0.1, p);
    CHECK(s.flux_inner == Approx(f.inner).epsilon(1e-4));
    CHECK(s.flux_outer == Approx(f.outer).epsilon(1e-4));
    CHECK(s.alpha_eps == Approx(cell_alpha(0.1, p)));
  }
  CHECK_THROWS_AS(solve_cell_radial(0.1, unit3, 2), std::invalid_argument);
  CHECK_THROWS_AS(solve_cell_radial(0.5, unit3, 100), std::domain_error);
}
