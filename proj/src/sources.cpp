#include "memostrange/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memostrange {

double TimeProfile::value(double t) const
{
  double p = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) p = p * t + poly[k];
  return p + sine_amp * std::sin(sine_freq * t) - relax_amp * std::expm1(-relax_rate * t);
}

double TimeProfile::derivative(double t) const
{
  double p = 0.0;
  for (std::size_t k = poly.size(); k-- > 1;) p = p * t + static_cast<double>(k) * poly[k];
  return p + sine_amp * sine_freq * std::cos(sine_freq * t) +
         relax_amp * relax_rate * std::exp(-relax_rate * t);
}

double mode_shape(const Grid& grid, std::span<const int> modes, std::span<const double> x)
{
  if (modes.empty()) return 1.0;
  double s = 1.0;
  for (int d = 0; d < grid.dim(); ++d) {
    const int m = d < static_cast<int>(modes.size()) ? modes[d] : modes.back();
    const double xi = (x[d] - grid.lower(d)) / (grid.upper(d) - grid.lower(d));
    s *= std::sin(m * std::numbers::pi * xi);
  }
  return s;
}

double mode_eigenvalue(const Grid& grid, std::span<const int> modes)
{
  if (modes.empty()) return 0.0;
  double ev = 0.0;
  for (int d = 0; d < grid.dim(); ++d) {
    const int m = d < static_cast<int>(modes.size()) ? modes[d] : modes.back();
    const double k = m * std::numbers::pi / (grid.upper(d) - grid.lower(d));
    ev += k * k;
  }
  return ev;
}

double discrete_mode_eigenvalue(const Grid& grid, std::span<const int> modes)
{
  if (modes.empty()) return 0.0;
  double ev = 0.0;
  for (int d = 0; d < grid.dim(); ++d) {
    const int m = d < static_cast<int>(modes.size()) ? modes[d] : modes.back();
    const double h = grid.h(d);
    const double s = std::sin(m * std::numbers::pi * h / (2.0 * (grid.upper(d) - grid.lower(d))));
    ev += 4.0 * s * s / (h * h);
  }
  return ev;
}

Field mode_field(const Grid& grid, std::span<const int> modes)
{
  if (modes.empty()) return Field::Ones(grid.size());
  const int m = grid.interior_per_axis();
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(grid.dim()));
  for (int d = 0; d < grid.dim(); ++d) {
    const int k = d < static_cast<int>(modes.size()) ? modes[d] : modes.back();
    auto& table = tables[static_cast<std::size_t>(d)];
    table.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      table[static_cast<std::size_t>(i)] =
          std::sin(k * std::numbers::pi * (i + 1) / static_cast<double>(grid.cells_per_axis()));
    }
  }
  // Outer product built axis by axis; the last axis runs fastest.
  Field out = Field::Ones(1);
  for (int d = 0; d < grid.dim(); ++d) {
    const auto& table = tables[static_cast<std::size_t>(d)];
    Field next(out.size() * m);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      for (int j = 0; j < m; ++j) next[i * m + j] = out[i] * table[static_cast<std::size_t>(j)];
    }
    out = std::move(next);
  }
  return out;
}

bool TabulatedSource::operator==(const TabulatedSource& other) const
{
  if (times != other.times || values.size() != other.values.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != other.values[i].size() || values[i] != other.values[i]) return false;
  }
  return true;
}

std::string source_kind(const SourceSpec& spec)
{
  switch (spec.index()) {
  case 0: return "constant";
  case 1: return "separable-sine";
  case 2: return "polynomial-time";
  case 3: return "manufactured";
  default: return "tabulated";
  }
}

namespace {

double tabulated_value(const TabulatedSource& src, double t, Eigen::Index index)
{
  if (src.times.empty()) return 0.0;
  auto pick = [&](std::size_t j) {
    const Field& v = src.values[j];
    if (v.size() == 1) return v[0];
    if (index < 0 || index >= v.size()) {
      throw std::out_of_range("tabulated source: node index outside the tabulated field");
    }
    return v[index];
  };
  if (t <= src.times.front()) return pick(0);
  if (t >= src.times.back()) return pick(src.times.size() - 1);
  const auto it = std::upper_bound(src.times.begin(), src.times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - src.times.begin()) - 1;
  const double w = (t - src.times[j]) / (src.times[j + 1] - src.times[j]);
  return (1.0 - w) * pick(j) + w * pick(j + 1);
}

// Time factor of a manufactured source; the spatial factor is the mode shape.
double manufactured_amplitude(const ManufacturedSource& src, const Grid& grid, double t)
{
  const auto& sol = src.solution;
  const auto& p = src.params;
  const double a = sol.u_time.value(t);
  const double b = sol.v_time.value(t);
  if (src.role == SourceRole::Bulk) {
    const double ev = src.discrete_laplacian ? discrete_mode_eigenvalue(grid, sol.modes)
                                             : mode_eigenvalue(grid, sol.modes);
    return p.alpha * sol.u_time.derivative(t) + ev * a + p.A_strange * (a - b);
  }
  return p.beta * sol.v_time.derivative(t) + p.mu * b - p.uptake() * a;
}

} // namespace

double evaluate_at(const SourceSpec& spec, const Grid& grid, std::span<const double> x, double t,
                   Eigen::Index index)
{
  return std::visit(
      [&](const auto& src) -> double {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ConstantSource>) {
          return src.value;
        } else if constexpr (std::is_same_v<T, SeparableSineSource>) {
          double sum = 0.0;
          for (const auto& term : src.terms) {
            sum += term.amplitude * mode_shape(grid, term.modes, x) *
                   std::cos(term.omega * t + term.phase);
          }
          return src.negated_square ? -sum * sum : sum;
        } else if constexpr (std::is_same_v<T, PolynomialTimeSource>) {
          double p = 0.0;
          for (std::size_t k = src.coeffs.size(); k-- > 0;) p = p * t + src.coeffs[k];
          return p * mode_shape(grid, src.modes, x);
        } else if constexpr (std::is_same_v<T, ManufacturedSource>) {
          const double shape = mode_shape(grid, src.solution.modes, x);
          return shape * manufactured_amplitude(src, grid, t);
        } else {
          return tabulated_value(src, t, index);
        }
      },
      spec);
}

Field evaluate(const SourceSpec& spec, const Grid& grid, double t)
{
  if (const auto* c = std::get_if<ConstantSource>(&spec)) {
    return Field::Constant(grid.size(), c->value);
  }
  if (const auto* m = std::get_if<ManufacturedSource>(&spec)) {
    return manufactured_amplitude(*m, grid, t) * mode_field(grid, m->solution.modes);
  }
  if (const auto* p = std::get_if<PolynomialTimeSource>(&spec)) {
    double value = 0.0;
    for (std::size_t k = p->coeffs.size(); k-- > 0;) value = value * t + p->coeffs[k];
    return value * mode_field(grid, p->modes);
  }
  if (const auto* s = std::get_if<SeparableSineSource>(&spec)) {
    Field sum = Field::Zero(grid.size());
    for (const auto& term : s->terms) {
      sum += (term.amplitude * std::cos(term.omega * t + term.phase)) * mode_field(grid, term.modes);
    }
    if (s->negated_square) sum = -sum.cwiseAbs2();
    return sum;
  }
  Field out(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    grid.coordinates(i, x);
    out[i] = evaluate_at(spec, grid, x, t, i);
  }
  return out;
}

Field manufactured_u(const ManufacturedSolution& sol, const Grid& grid, double t)
{
  return sol.u_time.value(t) * mode_field(grid, sol.modes);
}

Field manufactured_v(const ManufacturedSolution& sol, const Grid& grid, double t)
{
  return sol.v_time.value(t) * mode_field(grid, sol.modes);
}

} // namespace memostrange
