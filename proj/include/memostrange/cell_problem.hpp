#pragma once

#include "memostrange/model_params.hpp"

#include <Eigen/Core>

namespace memostrange {

/// Radial capacity potential around one particle: harmonic in the annulus
/// a_eps < r < eps/4, equal to 1 on the particle and 0 on the outer sphere.
struct CellSolution {
  double eps = 0.0;
  double a_eps = 0.0;
  double R_out = 0.0;
  Eigen::VectorXd r_samples;
  Eigen::VectorXd w_values;
  double flux_inner = 0.0; ///< dw/dr at r = a_eps
  double flux_outer = 0.0; ///< dw/dr at r = eps/4
  double alpha_eps = 0.0;  ///< (4 a_eps / eps)^(n-2)
};

struct BoundaryFluxes {
  double inner = 0.0;
  double outer = 0.0;
};

/// (4 a_eps / eps)^(n-2); equals (4 C0)^(n-2) eps^2 under the critical scaling.
double cell_alpha(double eps, const ModelParams& params);

/// Closed-form capacity potential. Throws std::domain_error outside the annulus.
double w_exact(double r, double eps, const ModelParams& params);

/// Second-order finite differences for (r^(n-1) w')' = 0 on a mesh that is
/// uniform in log r. Fluxes use one-sided second-order differences.
CellSolution solve_cell_radial(double eps, const ModelParams& params, int mesh_points);

/// Analytic normal derivatives of the capacity potential on both spheres.
BoundaryFluxes boundary_fluxes(double eps, const ModelParams& params);

/// Outer-sphere flux aggregated per unit volume of the periodic cell,
/// eps^-n * omega_n (eps/4)^(n-1) |flux_outer| = A_strange / (1 - alpha_eps).
double effective_coefficient(double eps, const ModelParams& params);

} // namespace memostrange
