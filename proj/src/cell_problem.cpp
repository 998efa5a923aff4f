#include "memostrange/cell_problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace memostrange {

double cell_alpha(double eps, const ModelParams& params)
{
  const double a = particle_radius(params, eps);
  return std::pow(4.0 * a / eps, params.n - 2);
}

double w_exact(double r, double eps, const ModelParams& params)
{
  const double a = particle_radius(params, eps);
  const double R = 0.25 * eps;
  if (r < a || r > R) {
    std::ostringstream msg;
    msg << "w_exact: r = " << r << " lies outside the annulus [" << a << ", " << R << "]";
    throw std::domain_error(msg.str());
  }
  const int p = 2 - params.n;
  const double outer = std::pow(R, p);
  return (std::pow(r, p) - outer) / (std::pow(a, p) - outer);
}

BoundaryFluxes boundary_fluxes(double eps, const ModelParams& params)
{
  const int n = params.n;
  const double alpha_eps = cell_alpha(eps, params);
  BoundaryFluxes fluxes;
  fluxes.inner = -(n - 2) / params.C0 * std::pow(eps, -params.gamma) / (1.0 - alpha_eps);
  fluxes.outer =
      (2 - n) * std::pow(params.C0, n - 2) * std::pow(4.0, n - 1) * eps / (1.0 - alpha_eps);
  return fluxes;
}

double effective_coefficient(double eps, const ModelParams& params)
{
  const int n = params.n;
  const double outer = boundary_fluxes(eps, params).outer;
  return std::pow(eps, -n) * params.omega_n * std::pow(0.25 * eps, n - 1) * std::abs(outer);
}

namespace {

// Thomas algorithm for a tridiagonal system; sub/sup are indexed by row.
std::vector<double> solve_tridiagonal(const std::vector<double>& sub,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& sup,
                                      std::vector<double> rhs)
{
  const std::size_t m = diag.size();
  std::vector<double> c(m);
  double pivot = diag[0];
  if (pivot == 0.0) throw std::runtime_error("cell solve: zero pivot in row 0");
  c[0] = sup[0] / pivot;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < m; ++i) {
    pivot = diag[i] - sub[i] * c[i - 1];
    if (pivot == 0.0) {
      throw std::runtime_error("cell solve: zero pivot in row " + std::to_string(i));
    }
    c[i] = sup[i] / pivot;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = m - 1; i-- > 0;) {
    rhs[i] -= c[i] * rhs[i + 1];
  }
  return rhs;
}

} // namespace

CellSolution solve_cell_radial(double eps, const ModelParams& params, int mesh_points)
{
  if (mesh_points < 3) {
    throw std::invalid_argument("solve_cell_radial: mesh_points must be >= 3");
  }
  CellSolution sol;
  sol.eps = eps;
  sol.a_eps = particle_radius(params, eps);
  sol.R_out = 0.25 * eps;
  sol.alpha_eps = cell_alpha(eps, params);

  // With s = log r the equation becomes w_ss + (n-2) w_s = 0.
  const int N = mesh_points;
  const double s0 = std::log(sol.a_eps);
  const double s1 = std::log(sol.R_out);
  const double ds = (s1 - s0) / (N - 1);
  const double k = params.n - 2;

  sol.r_samples.resize(N);
  for (int i = 0; i < N; ++i) {
    sol.r_samples[i] = std::exp(s0 + i * ds);
  }
  sol.r_samples[0] = sol.a_eps;
  sol.r_samples[N - 1] = sol.R_out;

  const double lower = 1.0 / (ds * ds) - 0.5 * k / ds;
  const double upper = 1.0 / (ds * ds) + 0.5 * k / ds;
  const double centre = -2.0 / (ds * ds);

  const std::size_t m = static_cast<std::size_t>(N - 2);
  std::vector<double> sub(m, lower), diag(m, centre), sup(m, upper), rhs(m, 0.0);
  // w = 1 on the particle, w = 0 on the outer sphere.
  rhs[0] = -lower * 1.0;

  sol.w_values.resize(N);
  sol.w_values[0] = 1.0;
  sol.w_values[N - 1] = 0.0;
  if (m > 0) {
    const auto interior = solve_tridiagonal(sub, diag, sup, rhs);
    for (std::size_t i = 0; i < m; ++i) {
      sol.w_values[static_cast<Eigen::Index>(i + 1)] = interior[i];
    }
  }

  const auto& w = sol.w_values;
  sol.flux_inner = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * ds) / sol.a_eps;
  sol.flux_outer = (3.0 * w[N - 1] - 4.0 * w[N - 2] + w[N - 3]) / (2.0 * ds) / sol.R_out;
  return sol;
}

} // namespace memostrange
