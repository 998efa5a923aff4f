#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace memostrange {

using Field = Eigen::VectorXd;

/// Uniform tensor-product box [lower_d, upper_d] with homogeneous Dirichlet
/// data. Only interior nodes carry unknowns; they are numbered
/// lexicographically with the last axis running fastest.
class Grid {
public:
  Grid() = default;
  Grid(int dim, int cells_per_axis, double lower = 0.0, double upper = 1.0);
  Grid(int dim, int cells_per_axis, std::vector<double> lower, std::vector<double> upper);

  int dim() const { return dim_; }
  int cells_per_axis() const { return cells_; }
  int interior_per_axis() const { return cells_ - 1; }
  Eigen::Index size() const { return size_; }

  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double h(int axis) const { return h_[axis]; }
  const std::vector<double>& spacing() const { return h_; }
  double cell_volume() const;

  /// Stride of `axis` in the linear interior numbering.
  Eigen::Index stride(int axis) const { return strides_[axis]; }

  /// Multi-index (0-based interior) of a linear index.
  void unravel(Eigen::Index index, std::span<int> out) const;

  /// Physical coordinates of an interior node.
  void coordinates(Eigen::Index index, std::span<double> out) const;

  /// Linear index of the interior node nearest to `point`, clamped to the
  /// interior.
  Eigen::Index nearest(std::span<const double> point) const;

  bool contains(std::span<const double> point) const;

  /// Samples fn(x) at every interior node.
  Field sample(const std::function<double(std::span<const double>)>& fn) const;

  /// sqrt(cell_volume * sum x_i^2).
  double l2_norm(const Field& x) const;
  double inner(const Field& x, const Field& y) const;

  /// "<a>x<b>x..." of interior counts.
  std::string dims_string() const;

  bool operator==(const Grid&) const = default;

private:
  int dim_ = 0;
  int cells_ = 0;
  Eigen::Index size_ = 0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> h_;
  std::vector<Eigen::Index> strides_;
};

} // namespace memostrange
