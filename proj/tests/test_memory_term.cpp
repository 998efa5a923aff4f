#include "memostrange/memory_term.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace memostrange;
using doctest::Approx;

namespace {
const ModelParams unit3 = derive_params(3, 1.0, 1.0, 1.0, 1.0);
}

TEST_CASE("scheme names")
{
  CHECK(parse_memory_scheme("backward-euler") == MemoryScheme::BackwardEuler);
  CHECK(parse_memory_scheme("trapezoid") == MemoryScheme::Trapezoid);
  CHECK(to_string(MemoryScheme::Trapezoid) == "trapezoid");
  CHECK_THROWS_AS(parse_memory_scheme("euler"), std::invalid_argument);
}

TEST_CASE("algebraic branch")
{
  const ModelParams p = derive_params(3, 1.0, 1.0, 1.0, 0.0);
  CHECK(h_algebraic(0.0, 0.0, p) == 0.0);
  CHECK(h_algebraic(1.0, 0.0, p) == Approx(0.5));
  const ModelParams p0 = derive_params(3, 1.0, 0.0, 1.0, 0.0);
  CHECK(h_algebraic(1.0, 2.0, p0) == Approx(-2.0));
  CHECK_THROWS_AS(h_algebraic(1.0, 0.0, unit3), std::invalid_argument);

  // v from the algebraic memory and H = u - v agree with h_algebraic.
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
  const auto state = initial_memory(u, g, p);
  CHECK(state.v[1] == Approx(0.5));
  CHECK(h_from_state(u, state)[1] == Approx(0.5));
  CHECK(h_algebraic(u, g, p)[2] == Approx(0.5));
}

TEST_CASE("one backward Euler step")
{
  auto state = zero_memory(4);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(4);
  CHECK(step_memory(state, zero, zero, 0.1, unit3, MemoryScheme::BackwardEuler).v.isZero());
  const auto next = step_memory(state, one, zero, 0.1, unit3, MemoryScheme::BackwardEuler);
  CHECK(next.v[0] == Approx(0.08333333333333334).epsilon(1e-14));
  CHECK(next.t == Approx(0.1));
  CHECK(std::abs(next.v[0] - 0.09063462346100909) < 0.1);
  CHECK(next.accumulated[3] == Approx(next.v[3]));
}

TEST_CASE("one trapezoid step from rest")
{
  const auto state = zero_memory(1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const auto next = step_memory(state, one, zero, 0.1, unit3, MemoryScheme::Trapezoid);
  CHECK(next.v[0] == Approx(0.045454545454545456).epsilon(1e-14));
}

TEST_CASE("step_memory preconditions")
{
  const auto state = zero_memory(2);
  const Eigen::VectorXd two = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd three = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(step_memory(state, three, three, 0.1, unit3, MemoryScheme::BackwardEuler),
                  std::invalid_argument);
  CHECK_THROWS_WITH(step_memory(state, two, two, 0.0, unit3, MemoryScheme::BackwardEuler),
                    "dt must be positive");
  const ModelParams algebraic = derive_params(3, 1.0, 1.0, 1.0, 0.0);
  CHECK_THROWS_AS(step_memory(state, two, two, 0.1, algebraic, MemoryScheme::BackwardEuler),
                  std::invalid_argument);
}

TEST_CASE("convolution of a constant input")
{
  const int L = 1001;
  std::vector<Eigen::VectorXd> u(L, Eigen::VectorXd::Ones(2));
  std::vector<Eigen::VectorXd> g(L, Eigen::VectorXd::Zero(2));
  const Eigen::VectorXd v = convolution_reference(u, g, 1.0, unit3, L - 1);
  CHECK(v[0] == Approx(0.43233235838169365).epsilon(1e-13));
  CHECK(h_from_state(Eigen::VectorXd::Ones(2).eval(), MemoryState<double>{v, 1.0, v, v})[1] ==
        Approx(0.5676676416183064).epsilon(1e-13));
  // Resampled onto a finer quadrature the constant input stays exact.
  CHECK(convolution_reference(u, g, 1.0, unit3, 4000)[1] == Approx(0.43233235838169365).epsilon(1e-13));

  std::vector<Eigen::VectorXd> zero(L, Eigen::VectorXd::Zero(2));
  CHECK(convolution_reference(zero, zero, 1.0, unit3, L - 1).isZero());
}

TEST_CASE("long-time convolution matches the algebraic branch")
{
  const ModelParams p = derive_params(3, 1.0, 1.0, 1.0, 0.5);
  KernelConvolution<double> conv(p, 1);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 3.0);
  const Eigen::VectorXd g = Eigen::VectorXd::Constant(1, -1.0);
  conv.start(u, g);
  for (int j = 0; j < 400; ++j) conv.advance(0.1, u, g);
  CHECK(conv.value()[0] == Approx((p.uptake() * 3.0 - 1.0) / p.mu).epsilon(1e-12));
}

TEST_CASE("backward Euler discrepancy against the convolution is first order")
{
  auto discrepancy = [](double dt) {
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    auto state = zero_memory(1);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    for (int j = 0; j < steps; ++j) state = step_memory(state, one, zero, dt, unit3, MemoryScheme::BackwardEuler);
    return std::abs(state.v[0] - 0.43233235838169365);
  };
  const double ratio = discrepancy(0.01) / discrepancy(0.005);
  CHECK(ratio == Approx(2.0).epsilon(0.05));
}

TEST_CASE("trapezoid positivity for dt <= 2 beta / mu")
{
  const ModelParams p = derive_params(3, 1.0, 1.0, 1.0, 1.0);
  CHECK(memory_coefficients(p, 1.0, MemoryScheme::Trapezoid).carry >= 0.0);
  CHECK(memory_coefficients(p, 1.5, MemoryScheme::Trapezoid).carry < 0.0);
  const auto be = memory_coefficients(p, 10.0, MemoryScheme::BackwardEuler);
  CHECK(be.carry > 0.0);
  CHECK(be.uptake > 0.0);
}

TEST_CASE("stability bound on trivial and constant histories")
{
  const int L = 2001;
  std::vector<Eigen::VectorXd> zero(L, Eigen::VectorXd::Zero(1));
  const StabilityCheck z = stability_bound_check(zero, zero, 1.0, unit3);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.ok);

  std::vector<Eigen::VectorXd> one(L, Eigen::VectorXd::Ones(1));
  const StabilityCheck c = stability_bound_check(one, zero, 1.0, unit3);
  CHECK(c.lhs == Approx(0.7263067201673827).epsilon(1e-5));
  CHECK(c.ok);
  CHECK(c.constant == Approx(4.0));
}

TEST_CASE("stability bound on random smooth histories")
{
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (double beta : {0.0, 0.1, 1.0, 10.0}) {
    const ModelParams p = derive_params(3, 1.0, 1.0, 1.0, beta);
    for (int trial = 0; trial < 10; ++trial) {
      const double a0 = coef(rng), a1 = coef(rng), w = 6.0 * coef(rng), b0 = coef(rng);
      const int L = 401;
      std::vector<Eigen::VectorXd> phi, g;
      for (int j = 0; j < L; ++j) {
        const double t = j / double(L - 1);
        Eigen::VectorXd x(3), y(3);
        for (int i = 0; i < 3; ++i) {
          x[i] = a0 + a1 * std::sin(w * t + i);
          y[i] = b0 * std::cos(w * t - i);
        }
        phi.push_back(x);
        g.push_back(y);
      }
      CHECK(stability_bound_check(phi, g, 1.0, p, 0.1).ok);
    }
  }
}
