#include "memostrange/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memostrange {

Grid::Grid(int dim, int cells_per_axis, double lower, double upper)
    : Grid(dim, cells_per_axis, std::vector<double>(static_cast<std::size_t>(std::max(dim, 0)), lower),
           std::vector<double>(static_cast<std::size_t>(std::max(dim, 0)), upper))
{}

Grid::Grid(int dim, int cells_per_axis, std::vector<double> lower, std::vector<double> upper)
    : dim_(dim), cells_(cells_per_axis), lower_(std::move(lower)), upper_(std::move(upper))
{
  if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
  if (cells_per_axis < 2) throw std::invalid_argument("cells_per_axis must be >= 2");
  if (lower_.size() != static_cast<std::size_t>(dim) ||
      upper_.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("grid extent must have one interval per axis");
  }
  h_.resize(static_cast<std::size_t>(dim));
  strides_.resize(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    if (!(upper_[d] > lower_[d])) {
      throw std::invalid_argument("grid extent must satisfy lower < upper on every axis");
    }
    h_[d] = (upper_[d] - lower_[d]) / cells_;
  }
  const Eigen::Index m = cells_ - 1;
  Eigen::Index stride = 1;
  for (int d = dim - 1; d >= 0; --d) {
    strides_[d] = stride;
    stride *= m;
  }
  size_ = stride;
}

double Grid::cell_volume() const
{
  double v = 1.0;
  for (double hd : h_) v *= hd;
  return v;
}

void Grid::unravel(Eigen::Index index, std::span<int> out) const
{
  const Eigen::Index m = cells_ - 1;
  for (int d = dim_ - 1; d >= 0; --d) {
    out[d] = static_cast<int>(index % m);
    index /= m;
  }
}

void Grid::coordinates(Eigen::Index index, std::span<double> out) const
{
  const Eigen::Index m = cells_ - 1;
  for (int d = dim_ - 1; d >= 0; --d) {
    out[d] = lower_[d] + static_cast<double>(index % m + 1) * h_[d];
    index /= m;
  }
}

Eigen::Index Grid::nearest(std::span<const double> point) const
{
  Eigen::Index index = 0;
  for (int d = 0; d < dim_; ++d) {
    long i = std::lround((point[d] - lower_[d]) / h_[d]) - 1;
    i = std::clamp<long>(i, 0, cells_ - 2);
    index += i * strides_[d];
  }
  return index;
}

bool Grid::contains(std::span<const double> point) const
{
  if (point.size() != static_cast<std::size_t>(dim_)) return false;
  for (int d = 0; d < dim_; ++d) {
    if (!(point[d] >= lower_[d] && point[d] <= upper_[d])) return false;
  }
  return true;
}

Field Grid::sample(const std::function<double(std::span<const double>)>& fn) const
{
  Field out(size_);
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (Eigen::Index i = 0; i < size_; ++i) {
    coordinates(i, x);
    out[i] = fn(x);
  }
  return out;
}

double Grid::l2_norm(const Field& x) const { return std::sqrt(cell_volume() * x.squaredNorm()); }

double Grid::inner(const Field& x, const Field& y) const { return cell_volume() * x.dot(y); }

std::string Grid::dims_string() const
{
  std::string out;
  for (int d = 0; d < dim_; ++d) {
    if (d) out += 'x';
    out += std::to_string(cells_ - 1);
  }
  return out;
}

} // namespace memostrange
