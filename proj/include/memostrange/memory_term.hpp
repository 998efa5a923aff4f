#pragma once

#include "memostrange/model_params.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memostrange {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class MemoryScheme { BackwardEuler, Trapezoid };

MemoryScheme parse_memory_scheme(std::string_view name);
std::string to_string(MemoryScheme scheme);

/// Pointwise memory variable v with H = u - v.
///
/// `accumulated` carries the unnormalised convolution integral, which is
/// beta * v whenever beta > 0. `drive` is the forcing (n-2)/C0 u + g at time
/// t; the trapezoid rule needs it from one step to the next.
template <typename Scalar>
struct MemoryState {
  VectorX<Scalar> v;
  Scalar t = 0;
  VectorX<Scalar> accumulated;
  VectorX<Scalar> drive;
};

template <typename Scalar = double>
MemoryState<Scalar> zero_memory(Eigen::Index size)
{
  MemoryState<Scalar> state;
  state.v = VectorX<Scalar>::Zero(size);
  state.accumulated = VectorX<Scalar>::Zero(size);
  state.drive = VectorX<Scalar>::Zero(size);
  return state;
}

/// Memory state at t = 0 with the forcing taken from (u0, g0).
template <typename DerivedU, typename DerivedG>
MemoryState<typename DerivedU::Scalar> initial_memory(const Eigen::MatrixBase<DerivedU>& u0,
                                                      const Eigen::MatrixBase<DerivedG>& g0,
                                                      const ModelParams& params)
{
  using Scalar = typename DerivedU::Scalar;
  auto state = zero_memory<Scalar>(u0.size());
  state.drive = Scalar(params.uptake()) * u0 + g0;
  if (params.beta == 0.0) {
    state.v = state.drive / Scalar(params.mu);
  }
  return state;
}

/// One-step memory update written as
///   v_next = carry * v + uptake * u_next + source * g_next + history * drive,
/// where drive = (n-2)/C0 u + g at the start of the step. For beta = 0 the
/// coefficients reproduce the algebraic branch mu v = (n-2)/C0 u + g.
struct MemoryCoefficients {
  double carry = 0.0;
  double uptake = 0.0;
  double source = 0.0;
  double history = 0.0;
};

inline MemoryCoefficients memory_coefficients(const ModelParams& params, double dt,
                                              MemoryScheme scheme)
{
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double k = params.uptake();
  const double beta = params.beta;
  const double mu = params.mu;
  MemoryCoefficients c;
  if (beta == 0.0) {
    c.uptake = k / mu;
    c.source = 1.0 / mu;
    return c;
  }
  if (scheme == MemoryScheme::BackwardEuler) {
    const double denom = beta + mu * dt;
    c.carry = beta / denom;
    c.uptake = dt * k / denom;
    c.source = dt / denom;
  } else {
    const double denom = beta / dt + 0.5 * mu;
    c.carry = (beta / dt - 0.5 * mu) / denom;
    c.uptake = 0.5 * k / denom;
    c.source = 0.5 / denom;
    c.history = 0.5 / denom;
  }
  return c;
}

/// H for beta = 0: (lambda u - g) / mu.
inline double h_algebraic(double u, double g, const ModelParams& params)
{
  if (params.beta != 0.0) {
    throw std::invalid_argument("h_algebraic requires beta = 0; use the memory ODE");
  }
  return (params.lambda * u - g) / params.mu;
}

template <typename DerivedU, typename DerivedG>
VectorX<typename DerivedU::Scalar> h_algebraic(const Eigen::MatrixBase<DerivedU>& u,
                                               const Eigen::MatrixBase<DerivedG>& g,
                                               const ModelParams& params)
{
  using Scalar = typename DerivedU::Scalar;
  if (params.beta != 0.0) {
    throw std::invalid_argument("h_algebraic requires beta = 0; use the memory ODE");
  }
  return (Scalar(params.lambda) * u - g) / Scalar(params.mu);
}

/// Advances beta dv/dt + mu v = (n-2)/C0 u + g by one step of size dt.
template <typename Scalar, typename DerivedU, typename DerivedG>
MemoryState<Scalar> step_memory(const MemoryState<Scalar>& state,
                                const Eigen::MatrixBase<DerivedU>& u_next,
                                const Eigen::MatrixBase<DerivedG>& g_next, double dt,
                                const ModelParams& params, MemoryScheme scheme)
{
  if (params.beta == 0.0) {
    throw std::invalid_argument("step_memory requires beta > 0; use h_algebraic");
  }
  if (u_next.size() != state.v.size() || g_next.size() != state.v.size()) {
    throw std::invalid_argument("step_memory: field sizes differ");
  }
  const auto c = memory_coefficients(params, dt, scheme);
  MemoryState<Scalar> next;
  next.drive = Scalar(params.uptake()) * u_next + g_next;
  next.v = Scalar(c.carry) * state.v + Scalar(c.uptake) * u_next + Scalar(c.source) * g_next;
  if (c.history != 0.0) {
    next.v += Scalar(c.history) * state.drive;
  }
  next.accumulated = Scalar(params.beta) * next.v;
  next.t = state.t + Scalar(dt);
  return next;
}

/// H = u - v.
template <typename DerivedU, typename Scalar>
VectorX<Scalar> h_from_state(const Eigen::MatrixBase<DerivedU>& u,
                             const MemoryState<Scalar>& state)
{
  if (u.size() != state.v.size()) {
    throw std::invalid_argument("h_from_state: field sizes differ");
  }
  return u - state.v;
}

/// Exponential-kernel convolution
///   v(t) = (1/beta) int_0^t q(s) exp(-mu (t - s) / beta) ds,   q = (n-2)/C0 u + g,
/// evaluated by the recurrence I <- exp(-z) I + increment with the input
/// interpolated linearly on each subinterval and the kernel integrated
/// exactly. Exact for inputs piecewise linear in time; O(1) state.
template <typename Scalar = double>
class KernelConvolution {
public:
  KernelConvolution(const ModelParams& params, Eigen::Index size)
      : params_(params), state_(zero_memory<Scalar>(size))
  {
    if (!(params.beta > 0.0)) {
      throw std::invalid_argument("convolution of the memory kernel requires beta > 0");
    }
  }

  template <typename DerivedU, typename DerivedG>
  void start(const Eigen::MatrixBase<DerivedU>& u0, const Eigen::MatrixBase<DerivedG>& g0)
  {
    state_ = zero_memory<Scalar>(u0.size());
    state_.drive = Scalar(params_.uptake()) * u0 + g0;
  }

  template <typename DerivedU, typename DerivedG>
  void advance(double ds, const Eigen::MatrixBase<DerivedU>& u_next,
               const Eigen::MatrixBase<DerivedG>& g_next)
  {
    const double z = params_.mu * ds / params_.beta;
    const double decay = std::exp(-z);
    // one_minus_phi = 1 - (1 - e^-z)/z, written to avoid cancellation for small z.
    double one_minus_phi;
    if (z < 1e-3) {
      one_minus_phi = z * (0.5 - z * (1.0 / 6.0 - z * (1.0 / 24.0 - z / 120.0)));
    } else {
      one_minus_phi = 1.0 + std::expm1(-z) / z;
    }
    const double prev_weight = (-std::expm1(-z) - one_minus_phi) / params_.mu;
    const double next_weight = one_minus_phi / params_.mu;

    VectorX<Scalar> drive_next = Scalar(params_.uptake()) * u_next + g_next;
    state_.v = Scalar(decay) * state_.v + Scalar(prev_weight) * state_.drive +
               Scalar(next_weight) * drive_next;
    state_.drive = std::move(drive_next);
    state_.accumulated = Scalar(params_.beta) * state_.v;
    state_.t += Scalar(ds);
  }

  const VectorX<Scalar>& value() const { return state_.v; }
  const MemoryState<Scalar>& state() const { return state_; }

private:
  ModelParams params_;
  MemoryState<Scalar> state_;
};

/// Reference value of the memory variable at time t from uniformly sampled
/// histories u(t_j), g(t_j), t_j = j t / (L - 1). The histories are
/// resampled linearly onto quad_points subintervals when that differs from
/// the sample count.
template <typename Scalar>
VectorX<Scalar> convolution_reference(const std::vector<VectorX<Scalar>>& u_history,
                                      const std::vector<VectorX<Scalar>>& g_history, double t,
                                      const ModelParams& params, int quad_points)
{
  if (u_history.empty() || g_history.size() != u_history.size()) {
    throw std::invalid_argument("convolution_reference: empty or mismatched history");
  }
  if (!(params.beta > 0.0)) {
    throw std::invalid_argument("convolution_reference requires beta > 0");
  }
  if (quad_points < 1) {
    throw std::invalid_argument("convolution_reference: quad_points must be >= 1");
  }
  const Eigen::Index size = u_history.front().size();
  KernelConvolution<Scalar> conv(params, size);
  if (u_history.size() == 1 || t == 0.0) {
    return VectorX<Scalar>::Zero(size);
  }
  const std::size_t intervals = u_history.size() - 1;
  auto sample = [&](const std::vector<VectorX<Scalar>>& hist, double s) -> VectorX<Scalar> {
    const double pos = s / t * static_cast<double>(intervals);
    std::size_t j = static_cast<std::size_t>(std::floor(pos));
    if (j >= intervals) return hist.back();
    const double w = pos - static_cast<double>(j);
    return Scalar(1.0 - w) * hist[j] + Scalar(w) * hist[j + 1];
  };

  if (static_cast<std::size_t>(quad_points) == intervals) {
    conv.start(u_history[0], g_history[0]);
    const double ds = t / static_cast<double>(intervals);
    for (std::size_t j = 1; j <= intervals; ++j) {
      conv.advance(ds, u_history[j], g_history[j]);
    }
  } else {
    conv.start(u_history[0], g_history[0]);
    const double ds = t / quad_points;
    for (int j = 1; j <= quad_points; ++j) {
      const double s = (j == quad_points) ? t : j * ds;
      conv.advance(ds, sample(u_history, s), sample(g_history, s));
    }
  }
  return conv.value();
}

/// Result of comparing ||H_phi|| against its data bound.
struct StabilityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool ok = false;
};

/// Discrete check of the L2(Q^T) stability estimate for H_phi, the solution
/// of beta H' + (n-2)/C0 H - lambda (phi - H) = beta phi' - g, beta H(0) = beta phi(0).
/// Histories are uniform samples on [0, T]; `cell_volume` weights the
/// spatial sums. The constant is 4 max(1, 1/mu, beta/mu); the estimate
/// itself leaves it unspecified.
StabilityCheck stability_bound_check(const std::vector<Eigen::VectorXd>& phi_history,
                                     const std::vector<Eigen::VectorXd>& g_history, double T,
                                     const ModelParams& params, double cell_volume = 1.0);

} // namespace memostrange
