#pragma once

#include "memostrange/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace memostrange {

/// Matrix-free shift * I - Delta_h with the (2 dim + 1)-point stencil and
/// homogeneous Dirichlet data eliminated. Symmetric positive definite for any
/// shift >= 0.
class StencilOperator {
public:
  StencilOperator() = default;
  explicit StencilOperator(const Grid& grid, double shift = 0.0) : grid_(grid), shift_(shift)
  {
    inv_h2_.resize(static_cast<std::size_t>(grid.dim()));
    for (int d = 0; d < grid.dim(); ++d) inv_h2_[d] = 1.0 / (grid.h(d) * grid.h(d));
  }

  const Grid& grid() const { return grid_; }
  Eigen::Index rows() const { return grid_.size(); }
  Eigen::Index cols() const { return grid_.size(); }
  double shift() const { return shift_; }
  void set_shift(double shift) { shift_ = shift; }

  double diagonal() const
  {
    double d = shift_;
    for (double w : inv_h2_) d += 2.0 * w;
    return d;
  }

  template <typename DerivedX, typename DerivedY>
  void apply(const Eigen::MatrixBase<DerivedX>& x, Eigen::MatrixBase<DerivedY> const& y_out) const
  {
    auto& y = const_cast<Eigen::MatrixBase<DerivedY>&>(y_out);
    const Eigen::Index m = grid_.interior_per_axis();
    const Eigen::Index n = grid_.size();
    y.derived() = diagonal() * x;
    for (int d = 0; d < grid_.dim(); ++d) {
      const Eigen::Index s = grid_.stride(d);
      const Eigen::Index block = s * m;
      const double w = inv_h2_[d];
      for (Eigen::Index b = 0; b < n; b += block) {
        for (Eigen::Index j = 0; j + 1 < m; ++j) {
          const Eigen::Index lo = b + j * s;
          const Eigen::Index hi = lo + s;
          y.segment(lo, s) -= w * x.segment(hi, s);
          y.segment(hi, s) -= w * x.segment(lo, s);
        }
      }
    }
  }

  Field operator*(const Field& x) const
  {
    Field y(x.size());
    apply(x, y);
    return y;
  }

  /// Assembled copy of the operator; used for structural checks.
  Eigen::SparseMatrix<double> to_sparse() const
  {
    const Eigen::Index n = grid_.size();
    const Eigen::Index m = grid_.interior_per_axis();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * (2 * grid_.dim() + 1));
    std::vector<int> idx(static_cast<std::size_t>(grid_.dim()));
    for (Eigen::Index i = 0; i < n; ++i) {
      entries.emplace_back(i, i, diagonal());
      grid_.unravel(i, idx);
      for (int d = 0; d < grid_.dim(); ++d) {
        const Eigen::Index s = grid_.stride(d);
        if (idx[d] > 0) entries.emplace_back(i, i - s, -inv_h2_[d]);
        if (idx[d] + 1 < m) entries.emplace_back(i, i + s, -inv_h2_[d]);
      }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(entries.begin(), entries.end());
    return A;
  }

private:
  Grid grid_;
  double shift_ = 0.0;
  std::vector<double> inv_h2_;
};

/// -Delta_h on the interior of `grid`.
inline StencilOperator assemble_operator(const Grid& grid) { return StencilOperator(grid, 0.0); }

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

class LinearSolveError : public std::runtime_error {
public:
  LinearSolveError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(report)
  {}
  const SolveReport& report() const { return report_; }

private:
  SolveReport report_;
};

/// Jacobi-preconditioned conjugate gradients on any operator exposing
/// apply(x, y) and diagonal(). `x` holds the initial guess on entry.
/// Returns without throwing; see solve_linear for the checked variant.
template <typename Operator>
SolveReport conjugate_gradient(const Operator& op, const Field& rhs, Field& x, double tol,
                               int max_iter)
{
  SolveReport report;
  const double rhs_norm = rhs.norm();
  if (x.size() != rhs.size()) x = Field::Zero(rhs.size());
  if (rhs_norm == 0.0) {
    x.setZero();
    report.converged = true;
    return report;
  }
  const double inv_diag = 1.0 / op.diagonal();

  Field r(rhs.size()), Ap(rhs.size());
  op.apply(x, Ap);
  r = rhs - Ap;
  double res = r.norm() / rhs_norm;
  if (res <= tol) {
    report.relative_residual = res;
    report.converged = true;
    return report;
  }
  Field z = inv_diag * r;
  Field p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    op.apply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) {
      report.iterations = it;
      report.relative_residual = res;
      return report;
    }
    const double step = rz / pAp;
    x += step * p;
    r -= step * Ap;
    res = r.norm() / rhs_norm;
    report.iterations = it;
    report.relative_residual = res;
    if (res <= tol) {
      report.converged = true;
      return report;
    }
    z = inv_diag * r;
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return report;
}

/// Conjugate-gradient solve to relative residual `tol`; throws
/// LinearSolveError carrying the final residual on non-convergence.
template <typename Operator>
Field solve_linear(const Operator& op, const Field& rhs, double tol, int max_iter,
                   SolveReport* report = nullptr, const Field* guess = nullptr)
{
  Field x = guess ? *guess : Field::Zero(rhs.size());
  const auto rep = conjugate_gradient(op, rhs, x, tol, max_iter);
  if (report) *report = rep;
  if (!rep.converged) {
    throw LinearSolveError("conjugate gradients did not converge in " +
                               std::to_string(rep.iterations) +
                               " iterations (relative residual " +
                               std::to_string(rep.relative_residual) + ")",
                           rep);
  }
  return x;
}

} // namespace memostrange
