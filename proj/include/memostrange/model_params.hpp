#pragma once

#include <string>
#include <vector>

namespace memostrange {

/// Scalar constants of the homogenized reaction-diffusion / memory system.
///
/// The raw fields are user input. The remaining fields are filled in by
/// derive_params() and must not be edited by hand afterwards.
struct ModelParams {
  int n = 3;           ///< spatial dimension
  double C0 = 1.0;     ///< particle radius prefactor, a_eps = C0 * eps^gamma
  double lambda = 1.0; ///< surface reaction rate
  double alpha = 1.0;  ///< weight of the bulk time derivative
  double beta = 1.0;   ///< weight of the surface time derivative

  double gamma = 0.0;     ///< critical exponent n/(n-2)
  double omega_n = 0.0;   ///< area of the unit sphere in R^n
  double A_strange = 0.0; ///< (n-2) C0^(n-2) omega_n
  double mu = 0.0;        ///< memory relaxation rate (n-2)/C0 + lambda

  /// Capture rate (n-2)/C0: how strongly the bulk field feeds the memory.
  double uptake() const { return static_cast<double>(n - 2) / C0; }

  bool operator==(const ModelParams&) const = default;
};

/// Gamma(m/2) for a positive integer m, by exact half-integer recursion.
double half_integer_gamma(int m);

/// 2 pi^(n/2) / Gamma(n/2).
double unit_sphere_area(int n);

/// Builds a fully derived parameter set; throws std::invalid_argument listing
/// every violated constraint.
ModelParams derive_params(int n, double C0, double lambda, double alpha, double beta);

/// Human-readable list of violated invariants; empty when the set is valid.
std::vector<std::string> validate_params(const ModelParams& params);

/// a_eps = C0 eps^gamma. Throws std::domain_error unless a_eps < eps/4.
double particle_radius(const ModelParams& params, double eps);

} // namespace memostrange
