#include "memostrange/memory_term.hpp"

#include <algorithm>
#include <cmath>

namespace memostrange {

MemoryScheme parse_memory_scheme(std::string_view name)
{
  if (name == "backward-euler") return MemoryScheme::BackwardEuler;
  if (name == "trapezoid") return MemoryScheme::Trapezoid;
  throw std::invalid_argument("unknown scheme: " + std::string(name) +
                              " (expected backward-euler or trapezoid)");
}

std::string to_string(MemoryScheme scheme)
{
  return scheme == MemoryScheme::BackwardEuler ? "backward-euler" : "trapezoid";
}

namespace {

// Trapezoid rule in time of the squared spatial norms.
double spacetime_norm(const std::vector<Eigen::VectorXd>& history, double dt,
                      double cell_volume)
{
  if (history.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < history.size(); ++j) {
    const double w = (j == 0 || j + 1 == history.size()) ? 0.5 : 1.0;
    sum += w * history[j].squaredNorm();
  }
  return std::sqrt(sum * dt * cell_volume);
}

} // namespace

StabilityCheck stability_bound_check(const std::vector<Eigen::VectorXd>& phi_history,
                                     const std::vector<Eigen::VectorXd>& g_history, double T,
                                     const ModelParams& params, double cell_volume)
{
  StabilityCheck check;
  check.constant = 4.0 * std::max({1.0, 1.0 / params.mu, params.beta / params.mu});
  if (phi_history.empty() || g_history.size() != phi_history.size()) {
    check.ok = true;
    return check;
  }
  const std::size_t steps = phi_history.size() - 1;
  const double dt = steps > 0 ? T / static_cast<double>(steps) : 0.0;

  std::vector<Eigen::VectorXd> h_history;
  h_history.reserve(phi_history.size());
  if (params.beta > 0.0) {
    KernelConvolution<double> conv(params, phi_history.front().size());
    conv.start(phi_history[0], g_history[0]);
    h_history.push_back(phi_history[0]);
    for (std::size_t j = 1; j <= steps; ++j) {
      conv.advance(dt, phi_history[j], g_history[j]);
      h_history.push_back(phi_history[j] - conv.value());
    }
  } else {
    for (std::size_t j = 0; j <= steps; ++j) {
      h_history.push_back(h_algebraic(phi_history[j], g_history[j], params));
    }
  }

  std::vector<Eigen::VectorXd> dphi;
  dphi.reserve(phi_history.size());
  for (std::size_t j = 0; j <= steps && steps > 0; ++j) {
    if (j == 0) {
      dphi.push_back((phi_history[1] - phi_history[0]) / dt);
    } else if (j == steps) {
      dphi.push_back((phi_history[steps] - phi_history[steps - 1]) / dt);
    } else {
      dphi.push_back((phi_history[j + 1] - phi_history[j - 1]) / (2.0 * dt));
    }
  }

  check.lhs = spacetime_norm(h_history, dt, cell_volume);
  const double data = std::sqrt(cell_volume) * phi_history.front().norm() +
                      spacetime_norm(phi_history, dt, cell_volume) +
                      spacetime_norm(dphi, dt, cell_volume) +
                      spacetime_norm(g_history, dt, cell_volume);
  check.rhs = check.constant * data;
  check.ok = check.lhs <= check.rhs;
  return check;
}

} // namespace memostrange
