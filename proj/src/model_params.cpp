#include "memostrange/model_params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace memostrange {

double half_integer_gamma(int m)
{
  if (m < 1) {
    throw std::invalid_argument("half_integer_gamma: argument must be >= 1");
  }
  // Gamma(1) = 1, Gamma(1/2) = sqrt(pi), Gamma(x + 1) = x Gamma(x).
  double value = (m % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  for (int k = (m % 2 == 0) ? 2 : 1; k + 2 <= m; k += 2) {
    value *= 0.5 * k;
  }
  return value;
}

double unit_sphere_area(int n)
{
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / half_integer_gamma(n);
}

std::vector<std::string> validate_params(const ModelParams& p)
{
  std::vector<std::string> issues;
  if (p.n < 3) issues.emplace_back("n must be ≥ 3");
  if (!(p.C0 > 0.0)) issues.emplace_back("C0 must be > 0");
  if (!(p.lambda >= 0.0)) issues.emplace_back("lambda must be ≥ 0");
  if (!(p.alpha >= 0.0)) issues.emplace_back("alpha must be ≥ 0");
  if (!(p.beta >= 0.0)) issues.emplace_back("beta must be ≥ 0");
  if (p.alpha == 0.0 && p.beta == 0.0) {
    issues.emplace_back("alpha and beta cannot both vanish");
  }
  return issues;
}

ModelParams derive_params(int n, double C0, double lambda, double alpha, double beta)
{
  ModelParams p;
  p.n = n;
  p.C0 = C0;
  p.lambda = lambda;
  p.alpha = alpha;
  p.beta = beta;

  const auto issues = validate_params(p);
  if (!issues.empty()) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < issues.size(); ++i) {
      msg << (i ? "; " : "") << issues[i];
    }
    throw std::invalid_argument(msg.str());
  }

  p.gamma = static_cast<double>(n) / static_cast<double>(n - 2);
  p.omega_n = unit_sphere_area(n);
  p.A_strange = (n - 2) * std::pow(C0, n - 2) * p.omega_n;
  p.mu = p.uptake() + lambda;
  return p;
}

double particle_radius(const ModelParams& params, double eps)
{
  if (!(eps > 0.0)) {
    throw std::domain_error("particle_radius: eps must be positive");
  }
  const double a = params.C0 * std::pow(eps, params.gamma);
  if (!(a < 0.25 * eps)) {
    std::ostringstream msg;
    msg << "particle radius " << a << " does not fit inside the cell ball of radius "
        << 0.25 * eps << " (eps = " << eps << ")";
    throw std::domain_error(msg.str());
  }
  return a;
}

} // namespace memostrange
