#pragma once

#include "memostrange/grid.hpp"
#include "memostrange/model_params.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace memostrange {

/// Scalar time profile
///   p(t) = sum_k poly[k] t^k + sine_amp sin(sine_freq t) + relax_amp (1 - exp(-relax_rate t))
/// with its exact derivative.
struct TimeProfile {
  std::vector<double> poly;
  double sine_amp = 0.0;
  double sine_freq = 0.0;
  double relax_amp = 0.0;
  double relax_rate = 0.0;

  double value(double t) const;
  double derivative(double t) const;

  bool operator==(const TimeProfile&) const = default;
};

/// prod_d sin(modes[d] pi xi_d) with xi_d the coordinate rescaled to [0, 1].
/// An empty mode list is the constant 1.
double mode_shape(const Grid& grid, std::span<const int> modes, std::span<const double> x);

/// Eigenvalue of -Delta for mode_shape on the box: sum_d (modes[d] pi / L_d)^2.
double mode_eigenvalue(const Grid& grid, std::span<const int> modes);

/// Eigenvalue of the discrete -Delta_h for the sampled mode_shape:
/// sum_d (4 / h_d^2) sin^2(modes[d] pi h_d / (2 L_d)).
double discrete_mode_eigenvalue(const Grid& grid, std::span<const int> modes);

/// mode_shape sampled at every interior node, built from per-axis tables.
Field mode_field(const Grid& grid, std::span<const int> modes);

/// Exact pair u = S(x) a(t), v = S(x) b(t) with S a product of sines.
struct ManufacturedSolution {
  std::vector<int> modes;
  TimeProfile u_time;
  TimeProfile v_time;

  bool operator==(const ManufacturedSolution&) const = default;
};

struct ConstantSource {
  double value = 0.0;
  bool operator==(const ConstantSource&) const = default;
};

struct SineTerm {
  double amplitude = 0.0;
  std::vector<int> modes;
  double omega = 0.0;
  double phase = 0.0;
  bool operator==(const SineTerm&) const = default;
};

/// sum_j amplitude_j S_j(x) cos(omega_j t + phase_j), or its negated square.
struct SeparableSineSource {
  std::vector<SineTerm> terms;
  bool negated_square = false;
  bool operator==(const SeparableSineSource&) const = default;
};

/// p(t) S(x).
struct PolynomialTimeSource {
  std::vector<double> coeffs;
  std::vector<int> modes;
  bool operator==(const PolynomialTimeSource&) const = default;
};

enum class SourceRole { Bulk, Surface };

/// f (Bulk) or g (Surface) generated from a manufactured pair, so that the
/// pair solves the coupled system exactly. With `discrete_laplacian` the bulk
/// source uses the eigenvalue of -Delta_h instead of -Delta, so the sampled
/// pair solves the spatially discrete system exactly.
struct ManufacturedSource {
  ManufacturedSolution solution;
  SourceRole role = SourceRole::Bulk;
  ModelParams params;
  bool discrete_laplacian = false;
  bool operator==(const ManufacturedSource&) const = default;
};

/// Samples at increasing times, linear in t between them and held constant
/// outside. A sample of size 1 is spatially uniform.
struct TabulatedSource {
  std::vector<double> times;
  std::vector<Field> values;
  bool operator==(const TabulatedSource& other) const;
};

using SourceSpec = std::variant<ConstantSource, SeparableSineSource, PolynomialTimeSource,
                                ManufacturedSource, TabulatedSource>;

struct SourcePair {
  SourceSpec f = ConstantSource{};
  SourceSpec g = ConstantSource{};
};

std::string source_kind(const SourceSpec& spec);

/// Value of the source at one point. Tabulated sources with full fields need
/// `index`, the interior node number.
double evaluate_at(const SourceSpec& spec, const Grid& grid, std::span<const double> x, double t,
                   Eigen::Index index = -1);

Field evaluate(const SourceSpec& spec, const Grid& grid, double t);

/// Exact u and v of a manufactured pair on the grid.
Field manufactured_u(const ManufacturedSolution& sol, const Grid& grid, double t);
Field manufactured_v(const ManufacturedSolution& sol, const Grid& grid, double t);

} // namespace memostrange
